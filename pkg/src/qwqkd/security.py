"""Key-rate analysis for the one-way walk-based QKD protocol.

Computes the basis-overlap constant ``c`` of a walk (the largest squared
overlap between any computational basis state and any walk-basis state),
generalized-Pauli channel statistics, conditional entropies and the
resulting asymptotic key-rate lower bound

    r = log2(1/c) - H(A_Z|B_Z) - H(A_W|B_W),

together with the maximal quantum error rate for which r stays positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .walk import Flip, StepOrder, WalkParams, coin_matrix, flip_matrix, walk_basis_amplitudes

__all__ = [
    "OverlapReport",
    "PauliChannel",
    "KeyRateReport",
    "compute_c",
    "pauli_unitary",
    "channel_probs",
    "joint_distribution",
    "depolarizing_closed_form",
    "depolarizing_joint",
    "qber",
    "binary_entropy",
    "symmetric_conditional_entropy",
    "conditional_entropy",
    "key_rate",
    "max_tolerated_qber",
]


@dataclass(frozen=True)
class OverlapReport:
    """Result of minimizing the overlap constant c over the step count.

    ``c`` is the max squared amplitude of the walk matrix at ``t_star``
    steps; ``row``/``col`` give the basis indices (x, y) attaining it.
    ``c_trace`` optionally retains c(t) for t = 1..T_max.
    """

    c: float
    t_star: int
    row: int
    col: int
    c_trace: np.ndarray | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.c <= 1.0 + 1e-12:
            raise ValueError(f"c must lie in (0, 1], got {self.c}")


def compute_c(P: int, theta: float, phi: float = 0.0, flip: Flip = Flip.I,
              t_max: int = 5000, step_order: StepOrder = StepOrder.COIN_THEN_SHIFT,
              keep_trace: bool = False) -> OverlapReport:
    """Minimize c(t) = max_{x,y} |<x| U^t (I (x) F) |y>|^2 over t = 1..t_max.

    Only the two columns with initial position 0 are evolved: every other
    column is a spatial translation of one of these (the walk commutes with
    translations), which permutes amplitudes without changing the maximum.
    Ties in c(t) are broken towards the smallest t.

    P must be odd: on an even cycle the amplitude support is confined to
    alternating parity classes, which only hurts the overlap constant.
    """
    if P % 2 == 0:
        raise ValueError(f"cycle length P must be odd, got {P}")
    if t_max < 1:
        raise ValueError(f"t_max must be >= 1, got {t_max}")
    coin_t = coin_matrix(theta, phi).T
    flip = Flip(flip)
    coin_first = StepOrder(step_order) is StepOrder.COIN_THEN_SHIFT

    cols = np.zeros((2, P, 2), dtype=complex)
    cols[0, 0, 0] = 1.0   # column for initial state (0, R)
    cols[1, 0, 1] = 1.0   # column for initial state (0, L)
    if flip is not Flip.I:
        cols = cols @ flip_matrix(flip).T

    best_c = math.inf
    best_t = -1
    best_rc = (0, 0)
    trace = np.empty(t_max) if keep_trace else None
    for t in range(1, t_max + 1):
        if coin_first:
            cols = cols @ coin_t
            cols[:, :, 0] = np.roll(cols[:, :, 0], 1, axis=1)
            cols[:, :, 1] = np.roll(cols[:, :, 1], -1, axis=1)
        else:
            cols[:, :, 0] = np.roll(cols[:, :, 0], 1, axis=1)
            cols[:, :, 1] = np.roll(cols[:, :, 1], -1, axis=1)
            cols = cols @ coin_t
        mags = np.abs(cols)
        c_t = float(mags.max()) ** 2
        if trace is not None:
            trace[t - 1] = c_t
        if c_t < best_c:
            best_c = c_t
            best_t = t
            y, x, s = np.unravel_index(int(mags.argmax()), mags.shape)
            best_rc = (2 * x + s, y)   # column y is initial state (0, R/L) = index y
    return OverlapReport(c=best_c, t_star=best_t, row=best_rc[0], col=best_rc[1],
                         c_trace=trace)


def pauli_unitary(m: int, n: int, P: int) -> np.ndarray:
    """Generalized Pauli (shift-and-phase) unitary on dimension 2P.

    ``U_{m,n} = sum_k exp(i pi k n / P) |k+m mod 2P><k|``; the phase is the
    standard clock ``omega^{k n}`` with ``omega = exp(2 pi i / (2P))``, and
    the index shift wraps mod 2P.
    """
    d = 2 * P
    if not (0 <= m < d and 0 <= n < d):
        raise ValueError(f"Pauli indices must lie in [0, {d}), got ({m}, {n})")
    ks = np.arange(d)
    u = np.zeros((d, d), dtype=complex)
    u[(ks + m) % d, ks] = np.exp(1j * np.pi * ks * n / P)
    return u


@dataclass(frozen=True, eq=False)
class PauliChannel:
    """Generalized Pauli noise model: probabilities p[m, n] of U_{m,n}."""

    P: int
    table: np.ndarray
    error_weight: float | None = None

    def __post_init__(self) -> None:
        d = 2 * self.P
        table = np.asarray(self.table, dtype=float)
        if table.shape != (d, d):
            raise ValueError(f"probability table must be {d}x{d}, got {table.shape}")
        if (table < -1e-15).any():
            raise ValueError("probability table has negative entries")
        if abs(table.sum() - 1.0) > 1e-12:
            raise ValueError(f"probability table sums to {table.sum()}, expected 1")
        object.__setattr__(self, "table", table)

    @property
    def dim(self) -> int:
        return 2 * self.P


def channel_probs(error_weight: float, P: int) -> PauliChannel:
    """Uniform non-identity Pauli mixture with total error weight E_r.

    p[0,0] = 1 - E_r and every other entry is E_r / ((2P)^2 - 1).
    """
    if not 0.0 <= error_weight <= 1.0:
        raise ValueError(f"error weight must lie in [0, 1], got {error_weight}")
    d = 2 * P
    table = np.full((d, d), error_weight / (d * d - 1))
    table[0, 0] = 1.0 - error_weight
    return PauliChannel(P=P, table=table, error_weight=error_weight)


def joint_distribution(basis: str, walk: WalkParams | None,
                       channel: PauliChannel) -> np.ndarray:
    """Joint outcome distribution Pr(Alice=i, Bob=j) under the Pauli channel.

    Alice measures her half of the maximally entangled state; outcome i
    collapses Bob's half onto the i-th vector of the key basis (for the walk
    basis, Alice's measurement is taken in the conjugated walk basis so that
    the collapsed state is exactly the walk vector, reproducing the
    prepare-and-measure statistics).  The channel then acts on Bob's half as
    the full Kraus sum and Bob measures in the same basis.

    This is the desk-scale oracle; production paths use
    :func:`depolarizing_closed_form`.
    """
    P = channel.P
    d = channel.dim
    if basis == "Z":
        b = np.eye(d, dtype=complex)
    elif basis == "W":
        if walk is None:
            raise ValueError("walk parameters are required for the W basis")
        if walk.P != P:
            raise ValueError(f"walk has P={walk.P} but channel has P={P}")
        b = walk_basis_amplitudes(walk)
    else:
        raise ValueError(f"basis must be 'Z' or 'W', got {basis!r}")
    joint = np.zeros((d, d))
    for m in range(d):
        for n in range(d):
            p = channel.table[m, n]
            if p == 0.0:
                continue
            overlaps = b.conj().T @ pauli_unitary(m, n, P) @ b
            joint += p * (np.abs(overlaps) ** 2).T
    return joint / d


def depolarizing_closed_form(error_weight: float, P: int) -> tuple[float, float]:
    """Depolarizing reduction of the uniform Pauli mixture.

    The uniform-over-non-identity mixture acts as
    ``rho -> (1 - lam) rho + lam I/(2P)`` with
    ``lam = E_r (2P)^2 / ((2P)^2 - 1)``; the induced error rate is
    ``Q = lam (2P-1)/(2P) = 2P E_r / (2P + 1)``.
    """
    if not 0.0 <= error_weight <= 1.0:
        raise ValueError(f"error weight must lie in [0, 1], got {error_weight}")
    d = 2 * P
    lam = error_weight * d * d / (d * d - 1)
    q = lam * (d - 1) / d
    return lam, q


def depolarizing_joint(error_weight: float, P: int) -> np.ndarray:
    """Closed-form joint distribution of the depolarizing reduction."""
    lam, _ = depolarizing_closed_form(error_weight, P)
    d = 2 * P
    joint = np.full((d, d), lam / (d * d))
    joint[np.diag_indices(d)] = (1.0 - lam + lam / d) / d
    return joint


def qber(joint: np.ndarray) -> float:
    """Total error rate Q = sum of off-diagonal joint probabilities."""
    joint = np.asarray(joint)
    return float(joint.sum() - np.trace(joint))


def binary_entropy(q: float) -> float:
    """h2(q) in bits, with h2(0) = h2(1) = 0."""
    if q <= 0.0 or q >= 1.0:
        return 0.0
    return -q * math.log2(q) - (1.0 - q) * math.log2(1.0 - q)


def symmetric_conditional_entropy(q: float, d: int) -> float:
    """H(A|B) for a symmetric-error joint on d symbols with error rate q.

    Errors uniform over the d-1 wrong symbols give
    ``H(A|B) = h2(q) + q log2(d - 1)``.
    """
    return binary_entropy(q) + (q * math.log2(d - 1) if d > 1 else 0.0)


def conditional_entropy(joint: np.ndarray) -> float:
    """H(A|B) = H(AB) - H(B) in bits, with 0 log 0 = 0."""
    joint = np.asarray(joint, dtype=float)
    if (joint < -1e-12).any():
        raise ValueError("joint distribution has negative entries")
    total = joint.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"joint distribution sums to {total}, expected 1")
    nz = joint[joint > 0.0]
    h_ab = -(nz * np.log2(nz)).sum()
    pb = joint.sum(axis=0)
    pb = pb[pb > 0.0]
    h_b = -(pb * np.log2(pb)).sum()
    return float(h_ab - h_b)


def key_rate(c: float, h_z: float, h_w: float) -> float:
    """Devetak-Winter lower bound r = log2(1/c) - H(A_Z|B_Z) - H(A_W|B_W)."""
    if not 0.0 < c <= 1.0:
        raise ValueError(f"c must lie in (0, 1], got {c}")
    if h_z < 0.0 or h_w < 0.0:
        raise ValueError("conditional entropies must be non-negative")
    return math.log2(1.0 / c) - h_z - h_w


def max_tolerated_qber(c: float, P: int, tol: float = 1e-6) -> float:
    """Largest Q with positive key rate under symmetric noise.

    Solves ``log2(1/c) = 2 [h2(Q) + Q log2(2P - 1)]`` for Q in
    ``[0, (2P-1)/(2P))`` by bisection; returns 0 when even the noiseless
    rate is non-positive.
    """
    if not 0.0 < c <= 1.0:
        raise ValueError(f"c must lie in (0, 1], got {c}")
    d = 2 * P

    def rate(q: float) -> float:
        return math.log2(1.0 / c) - 2.0 * symmetric_conditional_entropy(q, d)

    if rate(0.0) <= 0.0:
        return 0.0
    hi = (d - 1) / d
    if rate(hi) >= 0.0:
        raise ValueError(f"no sign change on [0, {hi}]; c={c} is below 1/(2P)")
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if rate(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class KeyRateReport:
    """c, the two conditional entropies, the rate bound and the error rate."""

    c: float
    h_z: float
    h_w: float
    rate: float
    qer: float

    def __post_init__(self) -> None:
        expected = math.log2(1.0 / self.c) - self.h_z - self.h_w
        if abs(self.rate - expected) > 1e-12:
            raise ValueError(
                f"inconsistent report: rate={self.rate} but "
                f"log2(1/c) - H_Z - H_W = {expected}"
            )

    @classmethod
    def from_symmetric_noise(cls, c: float, P: int, qer: float) -> "KeyRateReport":
        """Report for symmetric channel noise at error rate ``qer``."""
        h = symmetric_conditional_entropy(qer, 2 * P)
        return cls(c=c, h_z=h, h_w=h, rate=key_rate(c, h, h), qer=qer)
