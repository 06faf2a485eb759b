"""Band quantities of the dimerized chain in the reduced zone.

Both quasiparticle branches are supported: the conventional SSH solution
(lower signs in the Bogoliubov coefficients) and the independent
upper-sign solution. All functions accept scalar or array wavenumbers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DegeneratePointError, DomainError

# slack on the zone edge so that grids built from pi / (2a) are accepted
_ZONE_RTOL = 1e-12


class Branch(enum.Enum):
    UPPER = "upper"
    SSH = "ssh"

    @classmethod
    def parse(cls, value: "Branch | str") -> "Branch":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"upper": cls.UPPER, "uppersign": cls.UPPER,
                   "ssh": cls.SSH, "lower": cls.SSH, "lowersignssh": cls.SSH}
        try:
            return aliases[key]
        except KeyError:
            raise DomainError(f"unknown branch {value!r}; expected 'upper' or 'ssh'") from None


@dataclass(frozen=True)
class ChainParams:
    """Physical parameters of one chain.

    Units: t0 [eV], alpha [eV/A], K [eV/A^2], a [A], u [A].
    """

    t0: float
    alpha: float
    K: float
    a: float
    N: int
    u: float = 0.0

    def __post_init__(self):
        for name in ("t0", "alpha", "K", "a"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
        if int(self.N) != self.N or self.N < 2:
            raise DomainError(f"N must be an integer >= 2, got {self.N!r}")
        if not math.isfinite(self.u):
            raise DomainError(f"u must be finite, got {self.u!r}")

    @property
    def zone_edge(self) -> float:
        return math.pi / (2.0 * self.a)

    def with_u(self, u: float) -> "ChainParams":
        return replace(self, u=float(u))


# conventional trans-polyacetylene literature values, used as a demonstration
# configuration only
SAMPLE_PARAMS = ChainParams(t0=2.5, alpha=4.1, K=21.0, a=1.22, N=100, u=0.0)


@dataclass(frozen=True)
class BandSample:
    k: np.ndarray | float
    eps: np.ndarray | float
    gap: np.ndarray | float
    E: np.ndarray | float
    alpha_k: np.ndarray | float
    beta_k: np.ndarray | float
    branch: Branch


@dataclass(frozen=True)
class OccupationState:
    """Occupation numbers of the conduction and valence level at one k."""

    n_c: float
    n_v: float

    def __post_init__(self):
        for name in ("n_c", "n_v"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {value!r}")

    @property
    def imbalance(self) -> float:
        return self.n_c - self.n_v


EQUILIBRIUM = OccupationState(n_c=0.0, n_v=1.0)
INVERTED = OccupationState(n_c=1.0, n_v=0.0)


_DEGENERATE_RTOL = 16.0 * np.finfo(float).eps


def _check_zone(p: ChainParams, k):
    k = np.asarray(k, dtype=float)
    edge = p.zone_edge
    if np.any(np.abs(k) > edge * (1.0 + _ZONE_RTOL)) or not np.all(np.isfinite(k)):
        raise DomainError(f"k outside the reduced zone |k| <= pi/(2a) = {edge:.12g} 1/A")
    return k


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def k_grid(p: ChainParams, size: int = 2048, *, half: bool = False) -> np.ndarray:
    """Uniform grid over the reduced zone, endpoints included."""
    if size < 2:
        raise DomainError("k grid needs at least two points")
    lo = 0.0 if half else -p.zone_edge
    return np.linspace(lo, p.zone_edge, int(size))


def dispersion(p: ChainParams, k):
    k = _check_zone(p, k)
    return _out(2.0 * p.t0 * np.cos(k * p.a))


def gap_function(p: ChainParams, k):
    k = _check_zone(p, k)
    return _out(4.0 * p.alpha * p.u * np.sin(k * p.a))


def band_sample(p: ChainParams, k, branch: Branch | str = Branch.UPPER) -> BandSample:
    branch = Branch.parse(branch)
    k = _check_zone(p, k)
    eps = 2.0 * p.t0 * np.cos(k * p.a)
    gap = 4.0 * p.alpha * p.u * np.sin(k * p.a)
    E = np.hypot(eps, gap)
    # cos(pi/2) rounds to ~1e-16, so a zero gap at the edge leaves only noise in eps
    if np.any(E <= _DEGENERATE_RTOL * p.t0):
        raise DegeneratePointError("E_k = 0 (u = 0 at the zone edge): coefficients undefined")
    ratio = eps / E
    # principal roots; the overall sign of the pair is a gauge choice
    plus = np.sqrt((1.0 + ratio) / 2.0)
    minus = np.sqrt((1.0 - ratio) / 2.0)
    if branch is Branch.UPPER:
        alpha_k, beta_k = minus, plus
    else:
        alpha_k, beta_k = plus, minus
    return BandSample(k=_out(k), eps=_out(eps), gap=_out(gap), E=_out(E),
                      alpha_k=_out(alpha_k), beta_k=_out(beta_k), branch=branch)


def quasiparticle_energy(p: ChainParams, k, branch: Branch | str = Branch.UPPER,
                         band: str = "c"):
    """Quasiparticle energy in the conduction (``band="c"``) or valence band.

    The upper-sign branch gives (gap^2 - eps^2) / E, the SSH branch gives E;
    the valence energy is the negative of the conduction energy.
    """
    s = band_sample(p, k, branch)
    if s.branch is Branch.UPPER:
        energy = (np.square(s.gap) - np.square(s.eps)) / s.E
    else:
        energy = np.asarray(s.E, dtype=float)
    if band == "c":
        return _out(energy)
    if band == "v":
        return _out(-energy)
    raise DomainError(f"band must be 'c' or 'v', got {band!r}")
