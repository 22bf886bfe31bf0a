"""Desk-scale verification of the LoRA low-rank weight update.

Dense double-precision matrices only; this exists to check the algebra
(delta construction, effective weights, parameter accounting), not to
touch real transformer weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch


@dataclass(frozen=True)
class LoraFactors:
    """Low-rank factor pair with scale: delta = alpha * (B @ A)."""

    A: np.ndarray  # (r, d)
    B: np.ndarray  # (d, r)
    alpha: float
    r: int
    d: int

    def __post_init__(self):
        if self.r < 1 or self.d < 1:
            raise ShapeMismatch(f"r and d must be positive, got r={self.r}, d={self.d}")
        if self.r > self.d:
            raise ShapeMismatch(f"rank r={self.r} exceeds dimension d={self.d}")
        if self.A.shape != (self.r, self.d):
            raise ShapeMismatch(f"A must be {(self.r, self.d)}, got {self.A.shape}")
        if self.B.shape != (self.d, self.r):
            raise ShapeMismatch(f"B must be {(self.d, self.r)}, got {self.B.shape}")


def lora_delta(f: LoraFactors) -> np.ndarray:
    """Weight update alpha * B @ A; shape (d, d), matrix rank <= r."""
    return f.alpha * (f.B @ f.A)


def apply_lora(W: np.ndarray, f: LoraFactors) -> np.ndarray:
    """Effective weights W + delta."""
    if W.shape != (f.d, f.d):
        raise ShapeMismatch(f"W must be {(f.d, f.d)}, got {W.shape}")
    return W + lora_delta(f)


def trainable_param_count(f: LoraFactors) -> int:
    """Parameters trained by the adapter: the two factor matrices."""
    return 2 * f.r * f.d


def full_count(d: int) -> int:
    """Parameters in the full dense update the adapter replaces."""
    return d * d


def numerical_rank(M: np.ndarray, rel_tol: float = 1e-9) -> int:
    """Rank by singular values above rel_tol * largest singular value."""
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


def param_count_table(pairs: list[tuple[int, int]]) -> str:
    """Text table of trainable vs full parameter counts for (r, d) pairs."""
    header = f"{'r':>6} {'d':>8} {'trainable (2rd)':>16} {'full (d^2)':>14} {'ratio':>8}"
    rows = [header, "-" * len(header)]
    for r, d in pairs:
        trainable = 2 * r * d
        full = d * d
        rows.append(f"{r:>6} {d:>8} {trainable:>16,} {full:>14,} {trainable / full:>8.4f}")
    return "\n".join(rows)
