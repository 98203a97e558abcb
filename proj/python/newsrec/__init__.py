"""Content-based news recommender: experiment commands and metrics."""

from ._core import (
    NewsrecError,
    compare,
    dyn_score,
    dynamism,
    entropy,
    evaluate,
    generate,
    gini,
    ndcg,
    precision_recall_at,
    run,
    t_test,
    train,
    validate_config,
)


def chain(config, seed=None, out=None):
    """Runs generate, train, run, evaluate and compare; returns every written path."""
    written = []
    for step in (generate, train, run, evaluate, compare):
        written += step(config, seed=seed, out=out)
    return written


__all__ = [
    "NewsrecError",
    "chain",
    "compare",
    "dyn_score",
    "dynamism",
    "entropy",
    "evaluate",
    "generate",
    "gini",
    "ndcg",
    "precision_recall_at",
    "run",
    "t_test",
    "train",
    "validate_config",
]
