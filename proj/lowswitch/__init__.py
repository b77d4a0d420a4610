"""Python bindings for the low-switching-cost RL core."""

from ._lowswitch import (
    HashedCounter,
    RandomProjection,
    agent_ids,
    criterion_ids,
    environment_ids,
    feature_similarity,
    gaussian_kl,
    rsi,
    run,
    smallest_eigenvalue,
    student_t_two_sided_p,
    theorem1_check,
    welch_t_test,
)

__all__ = [
    "HashedCounter",
    "RandomProjection",
    "agent_ids",
    "criterion_ids",
    "environment_ids",
    "feature_similarity",
    "gaussian_kl",
    "rsi",
    "run",
    "smallest_eigenvalue",
    "student_t_two_sided_p",
    "theorem1_check",
    "welch_t_test",
]
