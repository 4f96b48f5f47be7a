"""Spherical cavity solvers: sharp bag, confined cavity, hard-wall limit.

The sharp-interface (bag) energy of N quarks on ladder level k in a ball of
radius R, with surface tension a and volume (bag) constant b, is

    E(R) = N * lam_k(mu_in, mu_out; R) + a * 4 pi R^2 + b * (4/3) pi R^3,

where lam_k comes from the closed-form two-zone matching (interior mass
mu_in = m - g, exterior mass mu_out = m) and levels missing from the
bound-state window contribute the exterior band edge.  The stationarity
condition in R is the wall balance

    2 a / R + b - N g (v(R)^2 - u(R)^2) = 0,

(mean curvature of a sphere is 2/R), so the 1D optimizer refines a golden
bracket by bisecting the sign of the analytic radial derivative, and the
residual of the wall balance doubles as the optimality certificate.

The confined cavity (hard wall) appears twice: directly through its exact
eigenvalue, and as the limit of two-zone problems with interior mass m and
exterior masses M_n growing without bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dispersion import (Ladder, TwoZoneProblem, TwoZoneState, eigenvalues,
                         mit_eigenvalue, two_zone_state)

#: relative radius tolerance of the derivative bisection
RADIUS_RTOL = 1e-10
#: optimum closer than this (relative) to an interval end is flagged
BOUNDARY_GUARD = 1e-3


@dataclass(frozen=True)
class BagConfig:
    """Sharp-bag model parameters; requires 0 < g < m so the two-zone
    operator keeps a spectral gap, and a positive geometric penalty."""

    n_quarks: int
    g: float
    m: float
    a: float
    b: float
    k: int = 1
    r_interval: Tuple[float, float] = (0.0, 0.0)   # (0,0) -> default

    def __post_init__(self):
        if self.n_quarks < 1:
            raise ValueError("need at least one quark")
        if not (0.0 < self.g < self.m):
            raise ValueError(
                f"bag model requires 0 < g < m (got g={self.g}, m={self.m}); "
                "the coupling must not close the mass gap")
        if self.a < 0.0 or self.b < 0.0 or max(self.a, self.b) <= 0.0:
            raise ValueError("need a, b >= 0 with max(a, b) > 0")
        if self.k < 1:
            raise ValueError("ladder index starts at 1")
        if self.r_interval == (0.0, 0.0):
            object.__setattr__(self, "r_interval",
                               (1e-2 / self.m, 1e2 / self.m))
        lo, hi = self.r_interval
        if not (0.0 < lo < hi):
            raise ValueError(f"invalid radius interval {self.r_interval}")


@dataclass
class BagReport:
    config: Optional[BagConfig]
    R: float
    mu_in: float
    mu_out: float
    ladder: List[float]          # levels 1..k at the optimal radius
    lam: float                   # occupied level (band edge if missing)
    energy: float
    boundary_ratio: float        # u(R)/v(R), NaN when the level is missing
    curvature_residual: float
    flagged: bool                # boundary optimum: widen the interval
    state: Optional[TwoZoneState] = None


def _level(mu_in: float, mu_out: float, R: float, k: int):
    """k-th two-zone level at radius R, band-edge padded: (lam, state|None)."""
    p = TwoZoneProblem(mu_in=mu_in, mu_out=mu_out, R=R)
    lad: Ladder = eigenvalues(p, k)
    if lad.complete:
        lam = lad.values[k - 1]
        return lam, two_zone_state(p, lam), lad.values
    return mu_out, None, lad.values


def cavity_energy(n_quarks: int, mu_in: float, mu_out: float, a: float,
                  b: float, k: int, R: float) -> float:
    """Sharp-cavity energy at radius R for a general two-zone mass pair."""
    if not R > 0.0:
        raise ValueError("R must be positive")
    lam, _, _ = _level(mu_in, mu_out, R, k)
    return (n_quarks * lam + a * 4.0 * math.pi * R**2
            + b * (4.0 / 3.0) * math.pi * R**3)


def cavity_energy_derivative(n_quarks: int, mu_in: float, mu_out: float,
                             a: float, b: float, k: int, R: float) -> float:
    """Analytic dE/dR.

    Moving the wall outward swaps exterior for interior mass in a thin
    shell, so first-order perturbation gives
    d lam/dR = (mu_in - mu_out) * 4 pi R^2 * (v(R)^2 - u(R)^2); a missing
    level sits at the band edge and does not respond to R.
    """
    lam, state, _ = _level(mu_in, mu_out, R, k)
    geom = 8.0 * math.pi * a * R + 4.0 * math.pi * b * R**2
    if state is None:
        return geom
    rho = state.boundary_density()
    return n_quarks * (mu_in - mu_out) * 4.0 * math.pi * R**2 * rho + geom


def bag_energy(cfg: BagConfig, R: float) -> float:
    """Bag energy at radius R (interior mass m - g, exterior mass m)."""
    return cavity_energy(cfg.n_quarks, cfg.m - cfg.g, cfg.m, cfg.a, cfg.b,
                         cfg.k, R)


def _golden(f, lo: float, hi: float, iters: int = 60) -> float:
    """Golden-section minimum of f on [lo, hi] in the log coordinate."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(lo), math.log(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(math.exp(c)), f(math.exp(d))
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(math.exp(d))
    return math.exp(0.5 * (a + b))


def _refine_by_derivative(df, lo: float, hi: float) -> float:
    """Bisect the sign change of the radial derivative inside [lo, hi]."""
    dlo, dhi = df(lo), df(hi)
    if dlo == 0.0:
        return lo
    if dhi == 0.0:
        return hi
    if dlo * dhi > 0.0:
        return math.nan
    while (hi - lo) > RADIUS_RTOL * hi:
        mid = 0.5 * (lo + hi)
        dm = df(mid)
        if dm == 0.0:
            return mid
        if dlo * dm < 0.0:
            hi, dhi = mid, dm
        else:
            lo, dlo = mid, dm
    return 0.5 * (lo + hi)


def _minimize_cavity(n_quarks: int, mu_in: float, mu_out: float, a: float,
                     b: float, k: int, interval: Tuple[float, float],
                     cfg: Optional[BagConfig],
                     g_for_balance: Optional[float]) -> BagReport:
    lo, hi = interval
    f = lambda R: cavity_energy(n_quarks, mu_in, mu_out, a, b, k, R)
    df = lambda R: cavity_energy_derivative(n_quarks, mu_in, mu_out, a, b, k, R)
    R0 = _golden(f, lo, hi)
    span = 0.2
    blo = max(lo, R0 * (1.0 - span))
    bhi = min(hi, R0 * (1.0 + span))
    R = _refine_by_derivative(df, blo, bhi)
    flagged = False
    if math.isnan(R):
        R = R0
        # derivative never changes sign near the golden point: running into
        # an interval end (collapse or escape)
        flagged = True
    rel_lo = (R - lo) / (hi - lo)
    rel_hi = (hi - R) / (hi - lo)
    if min(rel_lo, rel_hi) < BOUNDARY_GUARD:
        flagged = True
    lam, state, lower = _level(mu_in, mu_out, R, k)
    energy = (n_quarks * lam + a * 4.0 * math.pi * R**2
              + b * (4.0 / 3.0) * math.pi * R**3)
    if state is not None:
        ratio = state.boundary_ratio()
        gw = g_for_balance if g_for_balance is not None else (mu_out - mu_in)
        resid = abs(2.0 * a / R + b
                    - n_quarks * gw * state.boundary_density())
    else:
        ratio = math.nan
        resid = abs(2.0 * a / R + b)
    ladder_vals = list(lower[:k])
    return BagReport(config=cfg, R=R, mu_in=mu_in, mu_out=mu_out,
                     ladder=ladder_vals, lam=lam, energy=energy,
                     boundary_ratio=ratio, curvature_residual=resid,
                     flagged=flagged, state=state)


def minimize_bag(cfg: BagConfig) -> BagReport:
    """Optimal bag radius by golden search plus derivative bisection.

    The wall-balance residual of the report certifies interior optimality;
    a flagged report means the minimum sat on the search boundary."""
    return _minimize_cavity(cfg.n_quarks, cfg.m - cfg.g, cfg.m, cfg.a, cfg.b,
                            cfg.k, cfg.r_interval, cfg, cfg.g)


def curvature_residual(report: BagReport) -> float:
    """Wall balance |2a/R + b - N g (v^2 - u^2)(R)| of a finished report."""
    return report.curvature_residual


@dataclass
class MITReport:
    R: float
    lam: float
    energy: float
    convex_ok: bool
    samples: np.ndarray = field(repr=False, default=None)


def mit_ground(cfg: BagConfig) -> MITReport:
    """Unique optimal radius of the confined-cavity ground state.

    The objective R -> N lam_1(R) + a P + b V is strictly convex and
    coercive; midpoint convexity is verified on a log sample of the search
    interval and reported alongside the optimum.
    """
    N, m, a, b = cfg.n_quarks, cfg.m, cfg.a, cfg.b
    f = lambda R: (N * mit_eigenvalue(R, m, 1) + a * 4.0 * math.pi * R**2
                   + b * (4.0 / 3.0) * math.pi * R**3)
    lo, hi = cfg.r_interval
    R0 = _golden(f, lo, hi, iters=80)

    def df(R, step=1e-6):
        return (f(R * (1 + step)) - f(R * (1 - step))) / (2 * R * step)

    R = _refine_by_derivative(df, max(lo, R0 * 0.8), min(hi, R0 * 1.2))
    if math.isnan(R):
        R = R0
    Rs = np.geomspace(lo, hi, 33)
    vals = np.array([f(x) for x in Rs])
    # midpoint convexity in the log coordinate spacing
    convex_ok = bool(np.all(vals[:-2] + vals[2:] - 2.0 * vals[1:-1] > -1e-8))
    return MITReport(R=R, lam=mit_eigenvalue(R, m, 1), energy=f(R),
                     convex_ok=convex_ok, samples=np.stack([Rs, vals]))


@dataclass
class MITLimitRow:
    mass_out: float
    R: float
    energy: float
    boundary_ratio: float     # NaN when the cavity failed to bind (collapse)
    flagged: bool


@dataclass
class MITLimitResult:
    rows: List[MITLimitRow]
    limit: MITReport

    def energy_gaps(self) -> np.ndarray:
        return np.array([abs(r.energy - self.limit.energy) for r in self.rows])


def mit_limit(cfg: BagConfig, masses: Sequence[float]) -> MITLimitResult:
    """Sharp-cavity minima for a growing sequence of exterior masses.

    Each row solves the two-zone cavity with interior mass m and exterior
    mass M_n; the limit row is the confined cavity itself.  Energies climb
    toward the confined value and the boundary ratio u(R)/v(R) approaches
    the confined boundary condition u = v.
    """
    masses = list(masses)
    if any(mn <= cfg.m for mn in masses):
        raise ValueError("exterior masses must exceed the interior mass")
    if any(b <= a for a, b in zip(masses, masses[1:])):
        raise ValueError("exterior masses must be strictly increasing")
    rows = []
    for mn in masses:
        rep = _minimize_cavity(cfg.n_quarks, cfg.m, mn, cfg.a, cfg.b, cfg.k,
                               cfg.r_interval, cfg, g_for_balance=None)
        rows.append(MITLimitRow(mass_out=mn, R=rep.R, energy=rep.energy,
                                boundary_ratio=rep.boundary_ratio,
                                flagged=rep.flagged))
    return MITLimitResult(rows=rows, limit=mit_ground(cfg))
