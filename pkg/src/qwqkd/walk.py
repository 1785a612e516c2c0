"""Exact state-vector simulation of discrete-time coined quantum walks on a cycle.

The walker lives on a cycle of ``P`` positions with a 2-dimensional coin,
so the joint space has dimension ``2P``.  Throughout the package the basis
index convention is

    ``i = 2 * x + s``,   position ``x in {0, .., P-1}``,  coin ``s in {0, 1}``

with ``s = 0`` for the right-moving coin state ``|R>`` and ``s = 1`` for
``|L>``.  States are plain complex ndarrays of shape ``(2P,)`` with unit
Euclidean norm; nothing in this module mutates its inputs.

One walk step is either ``S @ (I (x) C)`` (coin applied first, then the
conditional shift; the default) or ``(I (x) C) @ S``.  The shift ``S`` moves
``(x, R) -> (x+1 mod P, R)`` and ``(x, L) -> (x-1 mod P, L)``.  An optional
coin flip ``F`` acts exactly once, before the first step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Flip",
    "StepOrder",
    "WalkParams",
    "coin_matrix",
    "flip_matrix",
    "coin_index",
    "basis_state",
    "apply_coin",
    "apply_shift",
    "translate",
    "evolve",
    "inverse_evolve",
    "walk_basis_amplitudes",
    "fourier_amplitudes",
    "born_distribution",
    "sample_measurement",
]

TWO_PI = 2.0 * math.pi

_SQRT2 = math.sqrt(2.0)


class Flip(str, enum.Enum):
    """Initial coin flip applied once before the walk steps."""

    I = "I"
    X = "X"
    Y = "Y"


class StepOrder(str, enum.Enum):
    """Order of coin and shift inside one walk step."""

    COIN_THEN_SHIFT = "coin_then_shift"   # step = S . (I (x) C)
    SHIFT_THEN_COIN = "shift_then_coin"   # step = (I (x) C) . S


@dataclass(frozen=True)
class WalkParams:
    """Full specification of one coined walk on a cycle.

    Parameters
    ----------
    P:
        Number of cycle positions, ``P >= 1``.  ``P = 1`` is allowed (the
        position space is trivial and the walk reduces to repeated coin
        rotations).
    theta, phi:
        Coin rotation angles in radians; reduced to ``[0, 2pi)`` on
        construction.
    t:
        Number of walk steps, ``t >= 0``.
    flip:
        Coin flip applied once before the first step.
    step_order:
        Whether the coin or the shift acts first within a step.
    """

    P: int
    theta: float
    phi: float = 0.0
    t: int = 0
    flip: Flip = Flip.I
    step_order: StepOrder = StepOrder.COIN_THEN_SHIFT

    def __post_init__(self) -> None:
        if self.P < 1:
            raise ValueError(f"cycle length P must be >= 1, got {self.P}")
        if self.t < 0:
            raise ValueError(f"step count t must be >= 0, got {self.t}")
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "flip", Flip(self.flip))
        object.__setattr__(self, "step_order", StepOrder(self.step_order))

    @property
    def dim(self) -> int:
        return 2 * self.P


def coin_matrix(theta: float, phi: float = 0.0) -> np.ndarray:
    """Generalized coin rotation in the ordered basis (|R>, |L>).

    Returns the 2x2 unitary

        [[ e^{i phi} cos(theta),  e^{i phi} sin(theta)],
         [-e^{-i phi} sin(theta), e^{-i phi} cos(theta)]]

    which reduces to the plain rotation for ``phi = 0``.
    """
    c, s = math.cos(theta), math.sin(theta)
    ep = complex(math.cos(phi), math.sin(phi))
    em = ep.conjugate()
    return np.array([[ep * c, ep * s], [-em * s, em * c]], dtype=complex)


def flip_matrix(flip: Flip) -> np.ndarray:
    """2x2 unitary for the initial coin flip ``F``."""
    flip = Flip(flip)
    if flip is Flip.I:
        return np.eye(2, dtype=complex)
    if flip is Flip.X:
        return np.array([[1, 1], [1, -1]], dtype=complex) / _SQRT2
    return np.array([[1, 1], [1j, -1j]], dtype=complex) / _SQRT2


def coin_index(s) -> int:
    """Map a coin label (0/1 or 'R'/'L') to the internal index 0/1."""
    if isinstance(s, str):
        label = s.strip().upper()
        if label == "R":
            return 0
        if label == "L":
            return 1
        raise ValueError(f"coin label must be 'R' or 'L', got {s!r}")
    s = int(s)
    if s not in (0, 1):
        raise ValueError(f"coin index must be 0 or 1, got {s}")
    return s


def basis_state(P: int, position: int, coin) -> np.ndarray:
    """Computational basis state |position, coin> as a (2P,) vector."""
    if not 0 <= position < P:
        raise ValueError(f"position must be in [0, {P}), got {position}")
    state = np.zeros(2 * P, dtype=complex)
    state[2 * position + coin_index(coin)] = 1.0
    return state


# ---------------------------------------------------------------------------
# The internal column layout used by the evolution kernels is (n, P, 2):
# n independent state columns, position axis, coin axis.  A single state
# vector (2P,) maps to shape (1, P, 2) and a (2P, n) column matrix to
# (n, P, 2) by transposing first.


def _as_columns(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    return state.reshape(1, -1, 2).copy()


def _shift_columns(cols: np.ndarray, direction: int) -> None:
    cols[..., 0] = np.roll(cols[..., 0], direction, axis=-1)
    cols[..., 1] = np.roll(cols[..., 1], -direction, axis=-1)


def _steps_columns(cols: np.ndarray, coin: np.ndarray, order: StepOrder,
                   n_steps: int, inverse: bool = False) -> np.ndarray:
    """Apply n_steps walk steps (or inverse steps) to (n, P, 2) columns."""
    if inverse:
        ct = coin.conj()          # right-multiplying by C.conj() applies C^dagger
        direction = -1
        coin_first = order is StepOrder.SHIFT_THEN_COIN
    else:
        ct = coin.T
        direction = 1
        coin_first = order is StepOrder.COIN_THEN_SHIFT
    for _ in range(n_steps):
        if coin_first:
            cols = cols @ ct
            _shift_columns(cols, direction)
        else:
            _shift_columns(cols, direction)
            cols = cols @ ct
    return cols


def apply_coin(state: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Apply a 2x2 coin matrix to every position's coin sub-vector."""
    cols = _as_columns(state)
    cols = cols @ np.asarray(matrix, dtype=complex).T
    return cols.reshape(-1)


def apply_shift(state: np.ndarray, inverse: bool = False) -> np.ndarray:
    """Conditional shift: (x,R) -> (x+1, R), (x,L) -> (x-1, L), mod P.

    With ``inverse=True`` the directions are reversed, i.e. the adjoint
    shift is applied.
    """
    cols = _as_columns(state)
    _shift_columns(cols, -1 if inverse else 1)
    return cols.reshape(-1)


def translate(state: np.ndarray, r: int) -> np.ndarray:
    """Spatial translation T_r (x) I_c: moves (x, s) to (x + r mod P, s)."""
    cols = _as_columns(state)
    P = cols.shape[1]
    if not 0 <= r < P:
        raise ValueError(f"translation offset must be in [0, {P}), got {r}")
    return np.roll(cols, r, axis=1).reshape(-1)


def evolve(state: np.ndarray, params: WalkParams) -> np.ndarray:
    """Evolve a state: apply the flip once, then t walk steps."""
    cols = _as_columns(state)
    if params.flip is not Flip.I:
        cols = cols @ flip_matrix(params.flip).T
    coin = coin_matrix(params.theta, params.phi)
    cols = _steps_columns(cols, coin, params.step_order, params.t)
    return cols.reshape(-1)


def inverse_evolve(state: np.ndarray, params: WalkParams) -> np.ndarray:
    """Invert :func:`evolve`: t inverse steps, then the flip adjoint."""
    cols = _as_columns(state)
    coin = coin_matrix(params.theta, params.phi)
    cols = _steps_columns(cols, coin, params.step_order, params.t, inverse=True)
    if params.flip is not Flip.I:
        cols = cols @ flip_matrix(params.flip).conj()
    return cols.reshape(-1)


def walk_basis_amplitudes(params: WalkParams) -> np.ndarray:
    """Amplitude matrix of the walk basis, computed stepwise.

    Column ``y`` holds ``evolve(|y>, params)``, i.e. the whole matrix is
    ``U^t (I (x) F)`` in the basis convention of this module.  The matrix is
    unitary to numerical accuracy.
    """
    d = params.dim
    cols = np.eye(d, dtype=complex).T.reshape(d, params.P, 2)
    if params.flip is not Flip.I:
        cols = cols @ flip_matrix(params.flip).T
    coin = coin_matrix(params.theta, params.phi)
    cols = _steps_columns(cols, coin, params.step_order, params.t)
    return cols.reshape(d, d).T


def fourier_amplitudes(params: WalkParams) -> np.ndarray:
    """Same matrix as :func:`walk_basis_amplitudes`, via the momentum basis.

    The shift is diagonal in the position-Fourier basis, so one walk step
    decomposes into P independent 2x2 momentum blocks.  Each block's t-th
    power is taken by eigendecomposition (eigenphases multiplied by t), and
    the result is transformed back.  Serves as an independent oracle for the
    stepwise evolution; the two agree to ~1e-9 even for t of order 5*10^4.
    """
    P, d, t = params.P, params.dim, params.t
    coin = coin_matrix(params.theta, params.phi)
    omega = np.exp(2j * np.pi / P)
    ks = np.arange(P)
    # momentum-block step operators
    blocks = np.empty((P, 2, 2), dtype=complex)
    for m in range(P):
        dm = np.diag([omega ** (-m), omega ** m])
        b = dm @ coin if params.step_order is StepOrder.COIN_THEN_SHIFT else coin @ dm
        w, v = np.linalg.eig(b)
        wt = np.exp(1j * t * np.angle(w))   # |w| = 1 up to rounding
        blocks[m] = (v * wt) @ np.linalg.inv(v)
    bd = np.zeros((d, d), dtype=complex)
    for m in range(P):
        bd[2 * m : 2 * m + 2, 2 * m : 2 * m + 2] = blocks[m]
    phi_mat = omega ** np.outer(ks, ks) / np.sqrt(P)   # columns are momentum states
    g = np.kron(phi_mat, np.eye(2))
    u_t = g @ bd @ g.conj().T
    if params.flip is not Flip.I:
        u_t = u_t @ np.kron(np.eye(P), flip_matrix(params.flip))
    return u_t


def born_distribution(state: np.ndarray) -> np.ndarray:
    """Measurement distribution |amplitude_i|^2 over the 2P basis states."""
    state = np.asarray(state)
    probs = np.abs(state) ** 2
    total = probs.sum()
    if abs(total - 1.0) > 1e-8:
        raise ValueError(f"state is not normalized (|norm^2 - 1| = {abs(total-1.0):.2e})")
    return probs


def sample_measurement(state: np.ndarray, rng: np.random.Generator,
                       position_only: bool = False) -> int:
    """Sample one computational-basis measurement outcome.

    Returns the basis index ``i = 2x + s``, or just the position ``x`` when
    ``position_only`` is set (the coin is traced out, as in the position
    measurement of the two-way protocol's key decryption).
    """
    probs = born_distribution(state)
    if position_only:
        probs = probs.reshape(-1, 2).sum(axis=1)
    cdf = np.cumsum(probs)
    u = rng.random() * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="right"), len(cdf) - 1))
