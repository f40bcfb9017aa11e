"""Labeling container shared by every structure learner."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NOISE = -1


@dataclass
class Labeling:
    """Integer group label per user; -1 marks density-method noise."""

    users: list
    labels: np.ndarray
    n_groups: int
    algorithm: str
    config: dict = field(default_factory=dict)

    @classmethod
    def build(cls, users, labels, algorithm: str, config: dict | None = None):
        labels = np.asarray(labels, dtype=np.int64)
        if len(users) != len(labels):
            raise ValueError("users and labels length mismatch")
        n_groups = len({int(l) for l in labels if l != NOISE})
        return cls(
            users=list(users),
            labels=labels,
            n_groups=n_groups,
            algorithm=algorithm,
            config=dict(config or {}),
        )

    def effective_groups(self) -> int:
        """Distinct label values, counting noise as its own group."""
        return len(set(self.labels.tolist()))

    def validate(self) -> None:
        if len(self.users) != len(self.labels):
            raise ValueError("users and labels length mismatch")
        distinct = {int(l) for l in self.labels if l != NOISE}
        if len(distinct) != self.n_groups:
            raise ValueError("n_groups inconsistent with labels")
        if distinct and (min(distinct) < 0 or max(distinct) >= self.n_groups):
            raise ValueError("labels must lie in [0, n_groups) apart from noise")


def compress_labels(raw) -> np.ndarray:
    """Relabel to [0, k) in order of first appearance; noise stays -1."""
    raw = np.asarray(raw, dtype=np.int64)
    mapping: dict[int, int] = {}
    out = np.empty_like(raw)
    for i, v in enumerate(raw.tolist()):
        if v == NOISE:
            out[i] = NOISE
            continue
        if v not in mapping:
            mapping[v] = len(mapping)
        out[i] = mapping[v]
    return out
