"""Channel and eavesdropper models for the protocol simulations.

A channel transforms one transmitted 2P-dimensional state per pass.  The
Pauli noise channel is unraveled per transmission: a generalized Pauli
unitary is sampled from the probability table and applied to the state,
which reproduces the channel statistics exactly for product-state
protocols.  Entangling-pair attacks act on the joint (transit x ancilla)
system and are handled inside the semi-quantum simulator.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import security, walk

__all__ = [
    "AttackKind",
    "AttackModel",
    "IdealChannel",
    "PauliNoise",
    "Adversary",
    "Channel",
    "apply_pauli",
    "sample_pauli",
    "transmit",
    "controlled_shift_attack",
    "random_entangling_attack",
]


class AttackKind(str, enum.Enum):
    INTERCEPT_RESEND_Z = "intercept_resend_z"
    INTERCEPT_RESEND_W = "intercept_resend_w"
    IMPERSONATE_MITM = "impersonate_mitm"
    ENTANGLING_PAIR = "entangling_pair"


@dataclass(frozen=True, eq=False)
class AttackModel:
    """Eavesdropper model.

    For ``ENTANGLING_PAIR`` the unitaries act on the (2P * ancilla_dim)-
    dimensional joint space of the transmitted system and Eve's memory,
    applied in the forward and reverse channel respectively.
    """

    kind: AttackKind
    ancilla_dim: int = 0
    forward_unitary: np.ndarray | None = None
    reverse_unitary: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", AttackKind(self.kind))
        if self.kind is AttackKind.ENTANGLING_PAIR:
            if self.ancilla_dim < 1:
                raise ValueError("entangling attack needs ancilla_dim >= 1")
            for name in ("forward_unitary", "reverse_unitary"):
                u = getattr(self, name)
                if u is None:
                    raise ValueError(f"entangling attack needs {name}")
                u = np.asarray(u, dtype=complex)
                if u.ndim != 2 or u.shape[0] != u.shape[1]:
                    raise ValueError(f"{name} must be a square matrix")
                err = np.abs(u.conj().T @ u - np.eye(u.shape[0])).max()
                if err > 1e-10:
                    raise ValueError(f"{name} is not unitary (deviation {err:.2e})")
                object.__setattr__(self, name, u)


@dataclass(frozen=True)
class IdealChannel:
    """Noiseless, adversary-free channel."""


@dataclass(frozen=True)
class PauliNoise:
    """Generalized Pauli channel with error weight E_r (see security module)."""

    error_weight: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.error_weight <= 1.0:
            raise ValueError(f"error weight must lie in [0, 1], got {self.error_weight}")


@dataclass(frozen=True, eq=False)
class Adversary:
    attack: AttackModel


Channel = IdealChannel | PauliNoise | Adversary


def apply_pauli(state: np.ndarray, m: int, n: int, P: int) -> np.ndarray:
    """Apply U_{m,n} to a 2P-vector without building the matrix."""
    d = 2 * P
    phases = np.exp(1j * np.pi * np.arange(d) * n / P)
    return np.roll(state * phases, m)


def sample_pauli(error_weight: float, d: int, rng: np.random.Generator) -> tuple[int, int]:
    """Draw (m, n) from the uniform non-identity mixture with weight E_r."""
    if rng.random() < 1.0 - error_weight:
        return 0, 0
    idx = 1 + int(rng.integers(d * d - 1))
    return idx // d, idx % d


def transmit(channel: Channel, state: np.ndarray, P: int, rng: np.random.Generator,
             walk_params: walk.WalkParams | None = None) -> np.ndarray:
    """Send a state through one channel pass.

    ``walk_params`` identifies the walk basis used by an intercept-resend-W
    adversary (the one-way protocol's walk is public; for the two-way
    protocol passing the true per-state walk models a maximally informed
    Eve).
    """
    if isinstance(channel, IdealChannel):
        return state
    if isinstance(channel, PauliNoise):
        m, n = sample_pauli(channel.error_weight, 2 * P, rng)
        if m == 0 and n == 0:
            return state
        return apply_pauli(state, m, n, P)
    if isinstance(channel, Adversary):
        kind = channel.attack.kind
        if kind is AttackKind.INTERCEPT_RESEND_Z:
            outcome = walk.sample_measurement(state, rng)
            return walk.basis_state(P, outcome // 2, outcome % 2)
        if kind is AttackKind.INTERCEPT_RESEND_W:
            if walk_params is None:
                raise ValueError("intercept-resend-W needs the walk parameters")
            w = walk.walk_basis_amplitudes(walk_params)
            outcome = walk.sample_measurement(w.conj().T @ state, rng)
            return w[:, outcome].copy()
        if kind is AttackKind.IMPERSONATE_MITM:
            fresh = int(rng.integers(2 * P))
            return walk.basis_state(P, fresh // 2, fresh % 2)
        raise ValueError(f"attack {kind.value} does not act on single transmissions")
    raise TypeError(f"unknown channel model: {channel!r}")


def controlled_shift_attack(P: int, ancilla_dim: int | None = None) -> AttackModel:
    """Forward unitary copying the Z index into Eve's ancilla (mod d_E).

    ``U_F |i, a> = |i, a + i mod d_E>`` with identity in the reverse
    channel: Eve learns measure-resend key symbols perfectly but disturbs
    reflected states.
    """
    d = 2 * P
    de = d if ancilla_dim is None else ancilla_dim
    u = np.zeros((d * de, d * de))
    for i in range(d):
        for a in range(de):
            u[i * de + (a + i) % de, i * de + a] = 1.0
    return AttackModel(kind=AttackKind.ENTANGLING_PAIR, ancilla_dim=de,
                       forward_unitary=u, reverse_unitary=np.eye(d * de))


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * np.exp(-1j * np.angle(np.diag(r)))[None, :]


def random_entangling_attack(P: int, ancilla_dim: int,
                             rng: np.random.Generator) -> AttackModel:
    """Independent Haar-random forward and reverse attack unitaries."""
    n = 2 * P * ancilla_dim
    return AttackModel(kind=AttackKind.ENTANGLING_PAIR, ancilla_dim=ancilla_dim,
                       forward_unitary=haar_unitary(n, rng),
                       reverse_unitary=haar_unitary(n, rng))
