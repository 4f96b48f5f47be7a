"""Soliton bag ground and excited states by energy minimization.

The energy of N quarks occupying ladder levels k_1 <= ... <= k_N in a radial
scalar field phi is

    E(phi) = sum_i lam^{k_i}(phi) + 4 pi int [ phi'^2 / 2 + U(phi) ] r^2 dr,

with U the double-well-plus-mass self-interaction.  Levels absent from the
bound-state window (0, m) contribute the band edge m each, so E(0) = N*m and
a field is worth keeping only when it binds quarks below their free mass.

The default solver is damped gradient descent in an H^1 metric with Armijo
backtracking (monotone energies by construction); a self-consistent-field
mode with linear mixing is available as a secondary option.  A converged
minimizer is reported together with the residual of the coupled stationarity
system: the field equation -Delta phi + U'(phi) + sum_i g (v_i^2 - u_i^2) = 0
and the eigen-residuals of the occupied levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import solveh_banded

from .descent import FieldFunctional, minimize_field
from .dirac import RadialField, RadialSpinor, density
from .grid import FOUR_PI, RadialGrid, make_grid
from .potentials import PotentialSpec


@dataclass(frozen=True)
class ModelParams:
    """Quark content: N particles on ladder levels k_1 <= ... <= k_N."""

    n_quarks: int
    g: float
    m: float
    k_indices: Tuple[int, ...] = (1,)

    def __post_init__(self):
        if self.n_quarks < 1:
            raise ValueError("need at least one quark")
        if not self.g > 0.0:
            raise ValueError("coupling g must be positive")
        if not self.m > 0.0:
            raise ValueError("mass m must be positive")
        ks = tuple(int(k) for k in self.k_indices)
        if len(ks) != self.n_quarks:
            raise ValueError("one excitation index per quark")
        if any(k < 1 for k in ks) or list(ks) != sorted(ks):
            raise ValueError("excitation indices must be ascending and >= 1")
        object.__setattr__(self, "k_indices", ks)


@dataclass(frozen=True)
class SolitonConfig:
    model: ModelParams
    potential: PotentialSpec
    r_max: float
    n: int
    tol: float = 1e-6
    max_iter: int = 4000
    mixing: float = 0.5          # SCF damping, in (0, 1]
    mode: str = "descent"        # "descent" | "scf"

    def __post_init__(self):
        if not 0.0 < self.mixing <= 1.0:
            raise ValueError("mixing must lie in (0, 1]")
        if self.mode not in ("descent", "scf"):
            raise ValueError(f"unknown solver mode {self.mode!r}")
        if not self.tol > 0.0:
            raise ValueError("tolerance must be positive")

    def grid(self) -> RadialGrid:
        return make_grid(self.r_max, self.n)

    def functional(self, grid: Optional[RadialGrid] = None) -> FieldFunctional:
        grid = grid or self.grid()
        pot = self.potential
        return FieldFunctional(grid=grid, m=self.model.m, g=self.model.g,
                               n_quarks=self.model.n_quarks,
                               k_indices=self.model.k_indices, c_grad=0.5,
                               v_prim=pot.u, v_prim_d=pot.u_prime)


@dataclass
class ELResidual:
    field: float     # L^2(r^2 dr) norm of the field equation residual
    eigen: float     # worst eigenpair residual of the occupied levels


@dataclass
class SolitonReport:
    config: SolitonConfig
    phi: RadialField
    lambdas: np.ndarray
    spinors: List[Optional[RadialSpinor]]
    energy: float
    history: List[float]
    grad_norm: float
    iterations: int
    converged: bool
    el: ELResidual
    all_bound: bool        # every occupied level strictly inside (0, m)


def initial_guess(cfg: SolitonConfig, grid: Optional[RadialGrid] = None) -> np.ndarray:
    """Smoothed well of depth m/g: deep enough to bind, shallow enough that
    the effective mass stays nonnegative (the basin the theory controls)."""
    grid = grid or cfg.grid()
    m, g = cfg.model.m, cfg.model.g
    r0, w = 2.0 / m, 0.5 / m
    vals = -(m / g) * (1.0 - np.tanh((grid.r_primal - r0) / w)) / 2.0
    vals[-1] = 0.0
    return vals


def energy(cfg: SolitonConfig, phi: RadialField) -> float:
    """Total energy of the configuration at field phi."""
    fn = cfg.functional(phi.grid)
    return fn.energy(phi.values)


def gradient(cfg: SolitonConfig, phi: RadialField) -> RadialField:
    """L^2 gradient of the energy; refuses on near-degenerate levels."""
    fn = cfg.functional(phi.grid)
    vals = fn.gradient_field(phi.values, check_gap=True)
    return RadialField(grid=phi.grid, values=vals)


def _report_from_state(cfg: SolitonConfig, fn: FieldFunctional,
                       phi_vals: np.ndarray, history: List[float],
                       grad_norm: float, iterations: int,
                       converged: bool) -> SolitonReport:
    grid = fn.grid
    phi = RadialField(grid=grid, values=phi_vals)
    E, solve = fn.energy_and_ladder(phi_vals)
    spinors = solve.spectral.ladder_spinors(cfg.model.k_indices)
    el = el_residual_from(cfg, phi, solve, spinors)
    m = cfg.model.m
    lam = solve.values
    return SolitonReport(config=cfg, phi=phi, lambdas=lam, spinors=spinors,
                         energy=E, history=history, grad_norm=grad_norm,
                         iterations=iterations, converged=converged, el=el,
                         all_bound=bool(np.all((lam > 0.0) & (lam < m))))


def minimize(cfg: SolitonConfig,
             phi0: Optional[np.ndarray] = None) -> SolitonReport:
    """Minimize the soliton energy from the standard (or given) initial well.

    Non-convergence within the iteration budget returns a flagged partial
    report rather than raising.
    """
    grid = cfg.grid()
    fn = cfg.functional(grid)
    start = initial_guess(cfg, grid) if phi0 is None else np.asarray(phi0, float)
    if cfg.mode == "scf":
        return _minimize_scf(cfg, fn, start)
    pot = cfg.potential
    res = minimize_field(fn, start, tol=cfg.tol, max_iter=cfg.max_iter,
                         curvature=lambda t: np.abs(_u_second(pot, t)))
    return _report_from_state(cfg, fn, res.phi, res.history, res.grad_norm,
                              res.iterations, res.converged)


def _minimize_scf(cfg: SolitonConfig, fn: FieldFunctional,
                  start: np.ndarray) -> SolitonReport:
    """Self-consistent field iteration with linear mixing.

    Alternates the eigenproblem at frozen phi with a Newton solve of the
    field equation at frozen quark density.  No monotonicity guarantee; kept
    as the physicists' classic scheme for cross-checks.
    """
    grid = fn.grid
    pot = cfg.potential
    g = cfg.model.g
    nd = grid.n - 1
    phi = np.array(start, dtype=float)
    phi[-1] = 0.0
    history = [fn.energy(phi)]
    gnorm = math.inf
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        solve = fn.ladder(phi)
        gfield = fn.gradient_field(phi, solve=solve, check_gap=True)
        gnorm = fn.grad_norm(gfield)
        if gnorm <= cfg.tol:
            converged = True
            break
        source = np.zeros(nd)
        for y in solve.vectors:
            if y is None:
                continue
            ysq = y**2 / float(np.dot(y, y))
            d = g * ysq[0::2]
            d -= g * 0.5 * ysq[1::2]
            d[1:] -= g * 0.5 * ysq[1::2][:-1]
            source += d
        # modified Newton on K phi + vol U'(phi) + source = 0, frozen source;
        # |U''| keeps the tridiagonal Jacobian positive definite
        target = phi[:nd].copy()
        stiff = FOUR_PI * grid.vol_staggered[1:] / grid.h**2
        for _ in range(50):
            resid = _field_equation(fn, target, pot, source)
            if float(np.max(np.abs(resid))) < 1e-12 * max(1.0, cfg.model.m):
                break
            jac_diag = stiff.copy()
            jac_diag[1:] += stiff[:-1]
            jac_diag += FOUR_PI * grid.vol_primal[:nd] * np.maximum(
                np.abs(_u_second(pot, target)), 1e-6)
            ab = np.zeros((2, nd))
            ab[0, 1:] = -stiff[:-1]
            ab[1] = jac_diag
            target -= solveh_banded(ab, resid, lower=False)
        new = (1.0 - cfg.mixing) * phi[:nd] + cfg.mixing * target
        phi = np.append(new, 0.0)
        history.append(fn.energy(phi))
    return _report_from_state(cfg, fn, phi, history, gnorm, it, converged)


def _u_second(pot: PotentialSpec, t: np.ndarray) -> np.ndarray:
    k = pot.kappa
    return 2.0 * k * (1.0 + 6.0 * t + 6.0 * t**2) + 2.0 * pot.b


def _field_equation(fn: FieldFunctional, target: np.ndarray,
                    pot: PotentialSpec, source: np.ndarray) -> np.ndarray:
    grid = fn.grid
    nd = grid.n - 1
    full = np.append(target, 0.0)
    vol_s = grid.vol_staggered[1:]
    dph = (full[1:] - full[:-1]) / grid.h
    t = vol_s * dph / grid.h
    lap = -t.copy()
    lap[1:] += t[:-1]
    return (FOUR_PI * lap
            + FOUR_PI * grid.vol_primal[:nd] * pot.u_prime(target)
            + source)


def el_residual_from(cfg: SolitonConfig, phi: RadialField, solve,
                     spinors: List[Optional[RadialSpinor]]) -> ELResidual:
    """Stationarity residuals reassembled from the final (phi, psi_i, lam_i).

    The field equation is evaluated from the discrete Laplacian of phi, the
    potential derivative and the quark densities of the freshly solved
    eigenstates; the eigen-residual is the backward error of those pairs.
    """
    grid = phi.grid
    nd = grid.n - 1
    pot = cfg.potential
    vals = phi.values
    vol_s = grid.vol_staggered[1:]
    dph = (np.append(vals[1:], 0.0)[:nd] - vals[:nd]) / grid.h
    t = vol_s * dph / grid.h
    lap = -t.copy()
    lap[1:] += t[:-1]
    resid = lap / grid.vol_primal[:nd] + pot.u_prime(vals[:nd])
    for psi in spinors:
        if psi is None:
            continue
        resid = resid + cfg.model.g * density(psi).values[:nd]
    norm = math.sqrt(FOUR_PI * float(np.dot(grid.vol_primal[:nd], resid**2)))
    return ELResidual(field=norm, eigen=float(solve.spectral.residual))


def el_residual(cfg: SolitonConfig, report: SolitonReport) -> ELResidual:
    """Recompute both stationarity residuals for a finished report."""
    fn = cfg.functional(report.phi.grid)
    solve = fn.ladder(report.phi.values)
    spinors = solve.spectral.ladder_spinors(cfg.model.k_indices)
    return el_residual_from(cfg, report.phi, solve, spinors)
