"""Continuum-limit ground-state energy of the upper-sign branch.

Three routes to the same energy E0(u) (ground-state occupation n_c = 0,
n_v = 1):

* :func:`energy_quadrature` integrates over the reduced zone numerically;
* :func:`energy_elliptic` is the closed form in complete elliptic integrals;
* :func:`energy_expansion` is its small-z truncation (log-type double well).

The dimensionless dimerization is ``z = 2 alpha |u| / t0``; the closed form
uses the elliptic parameter ``m = 1 - z**2``. That is the only reading
under which the closed form reproduces the zone integral (checked in the
test suite against the other three candidate conventions).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, optimize, special

from .band import ChainParams
from .errors import DomainError, QuadratureError, SearchError


def dimensionless_z(p: ChainParams, u: float | None = None) -> float:
    u = p.u if u is None else u
    return 2.0 * p.alpha * abs(u) / p.t0


def _resolve_u(p: ChainParams, u: float | None) -> float:
    u = p.u if u is None else float(u)
    if not math.isfinite(u):
        raise DomainError(f"u must be finite, got {u!r}")
    return u


def elastic_energy(p: ChainParams, u: float | None = None) -> float:
    u = _resolve_u(p, u)
    return 2.0 * p.N * p.K * u * u


def energy_quadrature(p: ChainParams, u: float | None = None, *, rtol: float = 1e-10,
                      limit: int = 500) -> float:
    """Zone integral of the ground-state energy by adaptive quadrature [eV]."""
    u = _resolve_u(p, u)
    two_t0 = 2.0 * p.t0
    four_alpha_u = 4.0 * p.alpha * u

    # integrate in x = k a over [0, pi/2]; dk = dx / a cancels the prefactor's a
    def integrand(x):
        eps = two_t0 * math.cos(x)
        gap = four_alpha_u * math.sin(x)
        E = math.hypot(eps, gap)
        if E == 0.0:
            return 0.0
        return (gap * gap - eps * eps) / E

    z = dimensionless_z(p, u)
    # the integrand varies on a scale ~z near the zone edge
    points = [math.pi / 2 - z] if 0.0 < z < 0.5 else None
    value, err, info, *msg = integrate.quad(integrand, 0.0, math.pi / 2, epsabs=0.0,
                                            epsrel=rtol, limit=limit, points=points,
                                            full_output=1)
    if msg:
        scale = -(2.0 * p.N / math.pi)
        raise QuadratureError(f"zone integral did not converge: {msg[0].strip()}",
                              estimate=scale * value + elastic_energy(p, u),
                              error_bound=abs(scale) * err)
    return -(2.0 * p.N / math.pi) * value + elastic_energy(p, u)


def energy_elliptic(p: ChainParams, u: float | None = None) -> float:
    """Closed-form ground-state energy in complete elliptic integrals [eV]."""
    u = _resolve_u(p, u)
    z = dimensionless_z(p, u)
    if z >= 1.0:
        raise DomainError(f"closed form valid for z = 2 alpha |u| / t0 < 1, got z = {z:.6g}")
    if z == 0.0:
        bracket = 1.0  # E(1) = 1 and the K(1) coefficient vanishes
    else:
        z2 = z * z
        # ellipkm1 takes the complementary parameter z2, keeping K accurate as z -> 0
        K, E = float(special.ellipkm1(z2)), float(special.ellipe(1.0 - z2))
        # F + (1+z2)/(1-z2) (E - F), rearranged to avoid the E - F cancellation
        bracket = ((1.0 + z2) * E - 2.0 * z2 * K) / (1.0 - z2)
    return 4.0 * p.N * p.t0 / math.pi * bracket + elastic_energy(p, u)


def energy_expansion(p: ChainParams, u: float | None = None, *, z_max: float = 0.3) -> float:
    """Small-z truncation of the closed form: constant, u^2 ln u and u^2 terms [eV]."""
    u = _resolve_u(p, u)
    z = dimensionless_z(p, u)
    if z >= z_max:
        raise DomainError(f"expansion only used for z < {z_max}, got z = {z:.6g}")
    if u == 0.0:
        return p.N * 4.0 * p.t0 / math.pi
    au2 = p.alpha**2 * u * u
    log_term = math.log(2.0 * p.t0 / (p.alpha * abs(u)))
    per_site = (4.0 * p.t0 / math.pi
                - (6.0 / math.pi) * log_term * 4.0 * au2 / p.t0
                + 28.0 * au2 / (math.pi * p.t0))
    return p.N * per_site + elastic_energy(p, u)


def well_profile(p: ChainParams, u_values) -> np.ndarray:
    return np.array([energy_elliptic(p, float(u)) for u in np.asarray(u_values, dtype=float)])


@dataclass(frozen=True)
class GroundStateResult:
    u0: float
    E_min: float
    E_at_zero: float
    z0: float
    well_depth: float
    no_dimerization: bool = False
    side: int = 1
    evaluations: int = 0

    @property
    def wells(self) -> tuple[float, float]:
        return (-self.u0, self.u0)

    @property
    def u_signed(self) -> float:
        return self.side * self.u0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["units"] = {"u0": "angstrom", "E_min": "eV", "E_at_zero": "eV",
                      "well_depth": "eV", "z0": "dimensionless"}
        return d


def _search_grid(u_max: float) -> np.ndarray:
    # log spacing catches minima far below the linear spacing (stiff lattices)
    grid = np.concatenate([np.geomspace(u_max * 1e-10, u_max, 240),
                           np.linspace(0.0, u_max, 241)[1:]])
    return np.unique(grid)


def minimize_dimerization(p: ChainParams, method_tolerance: float = 1e-8, *,
                          z_max: float = 0.9, side: int = 1) -> GroundStateResult:
    """Locate the dimerized minimum of the closed-form energy.

    The search runs over ``0 < side*u <= u_max`` with ``z(u_max) = z_max``:
    a coarse scan brackets the minimum, then bounded Brent refinement
    narrows it to ``method_tolerance * u_max``.
    """
    if side not in (1, -1):
        raise DomainError("side must be +1 or -1")
    if not 0.0 < z_max < 1.0:
        raise DomainError("z_max must lie in (0, 1)")
    u_max = z_max * p.t0 / (2.0 * p.alpha)
    e_zero = energy_elliptic(p, 0.0)

    grid = _search_grid(u_max)
    values = np.array([energy_elliptic(p, side * u) for u in grid])
    evaluations = grid.size + 1
    i = int(np.argmin(values))
    # wells shallower than a few hundred ulps of E(0) are rounding noise
    resolution = 256.0 * np.finfo(float).eps * abs(e_zero)

    if values[i] >= e_zero - resolution:
        return GroundStateResult(u0=0.0, E_min=e_zero, E_at_zero=e_zero, z0=0.0,
                                 well_depth=0.0, no_dimerization=True, side=side,
                                 evaluations=evaluations)
    if i == grid.size - 1:
        raise SearchError(
            f"minimum not bracketed: energy still decreasing at u_max = {u_max:.6g} A "
            f"(z = {z_max}); E(u_max) = {values[i]:.12g} eV, E(0) = {e_zero:.12g} eV")

    lo = grid[i - 1] if i > 0 else 0.0
    hi = grid[i + 1]
    res = optimize.minimize_scalar(lambda u: energy_elliptic(p, side * u), bounds=(lo, hi),
                                   method="bounded",
                                   options={"xatol": method_tolerance * u_max, "maxiter": 500})
    evaluations += int(res.nfev)
    if not res.success:
        raise SearchError(f"bounded search failed in [{lo:.6g}, {hi:.6g}] A: {res.message}")
    u0, e_min = float(res.x), float(res.fun)
    if e_min > values[i]:
        u0, e_min = float(grid[i]), float(values[i])
    return GroundStateResult(u0=u0, E_min=e_min, E_at_zero=e_zero,
                             z0=dimensionless_z(p, u0), well_depth=e_zero - e_min,
                             side=side, evaluations=evaluations)
