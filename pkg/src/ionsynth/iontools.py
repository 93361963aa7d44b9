"""Trap parameters, laser channels, and the couplings they generate.

Four effective interactions drive the composite system:

* ``stark1``      level A ↔ B, detuned per x-phonon row by a light shift,
* ``sideband_y``  level C at n ↔ level B at n+1 (work-mode sideband),
* ``carrier``     level B ↔ C at fixed phonon numbers,
* ``sideband_x``  level C at m ↔ level B at m+1 (register-mode sideband).

Couplings outside the Lamb-Dicke regime pick up phonon-number dependent
factors built from Laguerre polynomials; those factors are computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractError, DimensionError
from .fockspace import Level


@dataclass(frozen=True)
class TrapParams:
    """Static parameters of one synthesis problem.

    n_max is the highest addressed phonon number, so the target operator has
    dimension n_max + 1.  Both modes are truncated at n_max + guard with a
    hard wall above; the guard levels only catch leakage and are monitored,
    never addressed.  chi is the light-shift strength and the coupling
    magnitudes are dimensionless, pulse durations are absorbed into complex
    pulse areas (area = g * t).
    """

    n_max: int
    eta_x: float = 0.4
    eta_y: float = 0.4
    chi: float = 100.0
    g1_mag: float = 1.0
    g2_mag: float = 1.0
    g3_mag: float = 1.0
    g4_mag: float = 1.0
    guard: int = 2

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ContractError(f"n_max must be >= 0, got {self.n_max}")
        if self.guard < 1:
            raise ContractError(f"guard must be >= 1, got {self.guard}")
        if self.eta_x < 0 or self.eta_y < 0:
            raise ContractError("Lamb-Dicke parameters must be >= 0")
        if self.chi <= 0:
            raise ContractError(f"chi must be > 0, got {self.chi}")
        for name in ("g1_mag", "g2_mag", "g3_mag", "g4_mag"):
            if getattr(self, name) <= 0:
                raise ContractError(f"{name} must be > 0")

    @property
    def dim_x(self) -> int:
        return self.n_max + 1 + self.guard

    @property
    def dim_y(self) -> int:
        return self.n_max + 1 + self.guard

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.dim_x, self.dim_y, 3)

    @property
    def chi_ratio(self) -> float:
        """Light-shift strength in units of the stark1 coupling magnitude."""
        return self.chi / self.g1_mag

    def to_json_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "eta_x": self.eta_x,
            "eta_y": self.eta_y,
            "chi": self.chi,
            "g1_mag": self.g1_mag,
            "g2_mag": self.g2_mag,
            "g3_mag": self.g3_mag,
            "g4_mag": self.g4_mag,
            "guard": self.guard,
        }

    @staticmethod
    def from_json_dict(data: dict) -> "TrapParams":
        try:
            return TrapParams(
                n_max=int(data["n_max"]),
                eta_x=float(data["eta_x"]),
                eta_y=float(data["eta_y"]),
                chi=float(data["chi"]),
                g1_mag=float(data["g1_mag"]),
                g2_mag=float(data["g2_mag"]),
                g3_mag=float(data["g3_mag"]),
                g4_mag=float(data["g4_mag"]),
                guard=int(data["guard"]),
            )
        except KeyError as exc:
            raise ContractError(f"params dict is missing key {exc}") from exc


class ChannelKind(str, Enum):
    STARK1 = "stark1"
    SIDEBAND_Y = "sideband_y"
    CARRIER = "carrier"
    SIDEBAND_X = "sideband_x"


@dataclass(frozen=True)
class Channel:
    """A laser channel; stark1 additionally names the addressed x row."""

    kind: ChannelKind
    row_m: int | None = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "kind", ChannelKind(self.kind))
        except ValueError:
            raise ContractError(f"unknown channel kind {self.kind!r}") from None
        if self.kind == ChannelKind.STARK1:
            if self.row_m is None or self.row_m < 0:
                raise ContractError("stark1 channel needs a nonnegative row_m")
        elif self.row_m is not None:
            raise ContractError(f"{self.kind.value} channel does not take row_m")

    def coupling_mag(self, params: TrapParams) -> float:
        return {
            ChannelKind.STARK1: params.g1_mag,
            ChannelKind.SIDEBAND_Y: params.g2_mag,
            ChannelKind.CARRIER: params.g3_mag,
            ChannelKind.SIDEBAND_X: params.g4_mag,
        }[self.kind]


def laguerre(m: int, alpha: int, x: float) -> float:
    """Generalized Laguerre polynomial L^alpha_m(x) by the three-term recurrence.

    The recurrence is numerically stable for the small degrees used here
    (degree <= truncation plus guard).
    """
    if m < 0:
        raise ContractError(f"Laguerre degree must be >= 0, got {m}")
    if alpha not in (0, 1):
        raise ContractError(f"only alpha in {{0, 1}} is used, got {alpha}")
    prev = 1.0
    if m == 0:
        return prev
    cur = 1.0 + alpha - x
    for k in range(2, m + 1):
        prev, cur = cur, ((2 * k - 1 + alpha - x) * cur - (k - 1 + alpha) * prev) / k
    return cur


def stark_shift(m: int, params: TrapParams) -> float:
    """Light shift s_m = chi * (1 + exp(-2 eta_x^2) L^0_m(4 eta_x^2)) of row m."""
    if m < 0:
        raise DimensionError(f"row index must be >= 0, got {m}")
    ex = params.eta_x
    return params.chi * (1.0 + math.exp(-2.0 * ex * ex) * laguerre(m, 0, 4.0 * ex * ex))


def sideband_coupling(n: int, eta: float) -> float:
    """Signed sideband element between phonon numbers n and n+1.

    Value: exp(-eta^2 / 2) * L^1_n(eta^2) / sqrt(n + 1).  It reduces to
    sqrt(n + 1) as eta -> 0 and can change sign at large eta^2.  The raising
    operator in the interaction acts before the phonon-number dependent
    envelope, so the envelope series is evaluated at the lower number n; see
    sideband_coupling_series for the equivalent series form.
    """
    if n < 0:
        raise DimensionError(f"phonon number must be >= 0, got {n}")
    e2 = eta * eta
    return math.exp(-e2 / 2.0) * laguerre(n, 1, e2) / math.sqrt(n + 1.0)


def sideband_coupling_series(n: int, eta: float, terms: int | None = None) -> float:
    """Same matrix element from the defining operator series.

    The envelope F is a power series in the lowering and raising operators;
    its diagonal value at phonon number n is
    exp(-eta^2/2) * sum_k (-1)^k eta^(2k) / ((k+1)! k!) * n! / (n-k)!
    and the full element is sqrt(n+1) times that.  Evaluating the envelope at
    n+1 instead (raising first, envelope after) gives a different number;
    the lower-number form is the one whose eta -> 0 limit matches the
    resonant sqrt(n+1) element, so it is authoritative throughout.
    """
    if n < 0:
        raise DimensionError(f"phonon number must be >= 0, got {n}")
    if terms is None:
        terms = n + 1
    e2 = eta * eta
    total = 0.0
    for k in range(min(terms, n + 1)):
        falling = math.factorial(n) / math.factorial(n - k)
        total += (-1.0) ** k * e2**k / (math.factorial(k + 1) * math.factorial(k)) * falling
    return math.exp(-e2 / 2.0) * math.sqrt(n + 1.0) * total


def build_hamiltonian(
    channel: Channel,
    params: TrapParams,
    delta_y: float = 0.0,
    coupling_phase: float = 0.0,
) -> np.ndarray:
    """Dense Hermitian generator of one channel on the full composite space.

    Index layout matches StateVector: (m * D_y + n) * 3 + level.  delta_y
    only enters the stark1 channel (it is the work-laser detuning that picks
    the resonant row); coupling_phase is the phase of the complex coupling,
    magnitudes come from params.  Every channel is block diagonal over one-
    and two-dimensional invariant subspaces, and sideband elements out of the
    top guard level are zero (hard wall).
    """
    dx, dy, _ = params.dims
    dim = dx * dy * 3
    ham = np.zeros((dim, dim), dtype=np.complex128)

    def idx(m: int, n: int, level: Level) -> int:
        return (m * dy + n) * 3 + int(level)

    g = channel.coupling_mag(params) * np.exp(1j * coupling_phase)

    if channel.kind == ChannelKind.STARK1:
        for m in range(dx):
            shift = delta_y + stark_shift(m, params)
            for n in range(dy):
                ia, ib = idx(m, n, Level.A), idx(m, n, Level.B)
                ham[ia, ia] = shift
                ham[ib, ib] = -shift
                ham[ia, ib] = g
                ham[ib, ia] = np.conj(g)
    elif channel.kind == ChannelKind.CARRIER:
        for m in range(dx):
            for n in range(dy):
                ib, ic = idx(m, n, Level.B), idx(m, n, Level.C)
                ham[ib, ic] = g
                ham[ic, ib] = np.conj(g)
    elif channel.kind == ChannelKind.SIDEBAND_Y:
        for m in range(dx):
            for n in range(dy - 1):
                ib, ic = idx(m, n + 1, Level.B), idx(m, n, Level.C)
                f = sideband_coupling(n, params.eta_y)
                ham[ib, ic] = g * f
                ham[ic, ib] = np.conj(g) * f
    elif channel.kind == ChannelKind.SIDEBAND_X:
        for n in range(dy):
            for m in range(dx - 1):
                ib, ic = idx(m + 1, n, Level.B), idx(m, n, Level.C)
                f = sideband_coupling(m, params.eta_x)
                ham[ib, ic] = g * f
                ham[ic, ib] = np.conj(g) * f
    else:  # pragma: no cover
        raise ContractError(f"unknown channel kind {channel.kind}")
    return ham
