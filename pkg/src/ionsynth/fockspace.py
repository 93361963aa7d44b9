"""Composite Hilbert space for two truncated boson modes and a three-level ion.

Basis states are |m, n⟩ ⊗ |level⟩ where m counts quanta in the x mode
(register), n counts quanta in the y mode (work mode), and level is one of
the internal states A, B, C.  Amplitudes are stored flattened row-major over
(m, n, level): m is the slowest index, level the fastest, so the three
internal amplitudes of one phonon cell sit next to each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import ContractError, DimensionError

NORM_TOL = 1e-9


class Level(IntEnum):
    """Internal ion levels, ordered A < B < C."""

    A = 0
    B = 1
    C = 2


@dataclass(frozen=True)
class StateVector:
    """Immutable state on the composite space.

    dims is (D_x, D_y, 3); amps has length D_x * D_y * 3 and is flattened
    row-major over (m, n, level).  The amplitude buffer is marked read-only,
    all operations return new instances.
    """

    dims: tuple[int, int, int]
    amps: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        dx, dy, nl = self.dims
        if nl != 3 or dx < 1 or dy < 1:
            raise DimensionError(f"bad dims {self.dims}: want (D_x>=1, D_y>=1, 3)")
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (dx * dy * nl,):
            raise DimensionError(
                f"amplitude buffer has shape {amps.shape}, want ({dx * dy * nl},)"
            )
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    def index(self, m: int, n: int, level: Level | int) -> int:
        dx, dy, _ = self.dims
        lv = int(level)
        if not (0 <= m < dx and 0 <= n < dy and 0 <= lv < 3):
            raise DimensionError(f"state index (m={m}, n={n}, level={lv}) outside dims {self.dims}")
        return (m * dy + n) * 3 + lv

    def amplitude(self, m: int, n: int, level: Level | int) -> complex:
        return complex(self.amps[self.index(m, n, level)])

    def grid(self) -> np.ndarray:
        """Read-only view shaped (D_x, D_y, 3)."""
        return self.amps.reshape(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ContractError("cannot normalize a zero state")
        return StateVector(self.dims, self.amps / nrm)


def zero_state(dims: tuple[int, int, int]) -> StateVector:
    dx, dy, nl = dims
    return StateVector(dims, np.zeros(dx * dy * nl, dtype=np.complex128))


def basis_state(dims: tuple[int, int, int], m: int, n: int, level: Level | int) -> StateVector:
    """Unit amplitude on |m, n⟩ ⊗ |level⟩."""
    state = zero_state(dims)
    amps = state.amps.copy()
    amps[state.index(m, n, level)] = 1.0
    return StateVector(dims, amps)


def from_grid(grid: np.ndarray) -> StateVector:
    grid = np.asarray(grid, dtype=np.complex128)
    if grid.ndim != 3 or grid.shape[2] != 3:
        raise DimensionError(f"grid shape {grid.shape} is not (D_x, D_y, 3)")
    return StateVector(tuple(grid.shape), grid.reshape(-1))


def _check_same_dims(a: StateVector, b: StateVector) -> None:
    if a.dims != b.dims:
        raise DimensionError(f"dimension mismatch: {a.dims} vs {b.dims}")


def inner_product(a: StateVector, b: StateVector) -> complex:
    """⟨a|b⟩ with the left argument conjugated."""
    _check_same_dims(a, b)
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|⟨a|b⟩|² for normalized states; global phase drops out."""
    _check_same_dims(a, b)
    for name, st in (("first", a), ("second", b)):
        if abs(st.norm() - 1.0) > NORM_TOL:
            raise ContractError(f"{name} state is not normalized (norm {st.norm():.12g})")
    val = abs(inner_product(a, b)) ** 2
    return float(min(max(val, 0.0), 1.0))


def project_internal(state: StateVector, level: Level | int) -> tuple[StateVector | None, float]:
    """Project onto one internal level.

    Returns (normalized post-measurement state, probability).  When the
    probability is zero there is no post state and None is returned in its
    place.
    """
    lv = int(level)
    if not 0 <= lv < 3:
        raise DimensionError(f"no internal level {lv}")
    grid = state.grid().copy()
    keep = grid[:, :, lv].copy()
    prob = float(np.sum(np.abs(keep) ** 2))
    if prob <= 0.0:
        return None, 0.0
    grid[:, :, :] = 0.0
    grid[:, :, lv] = keep / np.sqrt(prob)
    return from_grid(grid), prob


def mode_swap(state: StateVector) -> StateVector:
    """Exchange the two boson modes: |m, n⟩ ⊗ |ℓ⟩ → |n, m⟩ ⊗ |ℓ⟩.

    Requires D_x == D_y.  Applying it twice is the identity.
    """
    dx, dy, _ = state.dims
    if dx != dy:
        raise DimensionError(f"mode swap needs equal mode dimensions, got {dx} and {dy}")
    return from_grid(np.swapaxes(state.grid(), 0, 1))


def guard_occupancy(state: StateVector, n_max: int) -> float:
    """Total probability sitting above the logical truncation in either mode."""
    dx, dy, _ = state.dims
    if n_max + 1 > dx or n_max + 1 > dy:
        raise DimensionError(f"n_max={n_max} does not fit in dims {state.dims}")
    probs = np.abs(state.grid()) ** 2
    total = probs.sum()
    logical = probs[: n_max + 1, : n_max + 1, :].sum()
    return float(max(total - logical, 0.0))
