"""Python surface of the fairpol C++ core."""

try:
    from ._fairpol import (  # noqa: F401
        evaluate_assignment,
        fairness_metrics,
        fit_policy_tree,
        generate_synthetic,
        mq_adjust,
        predict_policy_tree,
        run_comparison,
    )
except ImportError:  # running against an in-tree build dir on PYTHONPATH
    from _fairpol import (  # noqa: F401
        evaluate_assignment,
        fairness_metrics,
        fit_policy_tree,
        generate_synthetic,
        mq_adjust,
        predict_policy_tree,
        run_comparison,
    )

__all__ = [
    "evaluate_assignment",
    "fairness_metrics",
    "fit_policy_tree",
    "generate_synthetic",
    "mq_adjust",
    "predict_policy_tree",
    "run_comparison",
]
