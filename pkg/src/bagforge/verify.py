"""Invariant battery: structural identities the solvers must satisfy.

Each check returns (name, passed, detail).  The battery is wired to the
`verify` subcommand and reused by the test suite; it exercises the operator
identities (mirror spectrum across the two spin-orbit sectors, singular
values of the supercharge block), the first-order perturbation formula
against finite differences, agreement between the matrix eigensolver and
the closed-form two-zone oracle, and the confined-cavity monotonicity.
"""

from __future__ import annotations

import math
from typing import List, Tuple

import numpy as np

from .dirac import (RadialField, assemble_hamiltonian, density, eigen_solve,
                    hellmann_feynman, supercharge_singular_values)
from .dispersion import TwoZoneProblem, eigenvalues, mit_eigenvalue
from .grid import make_grid

Check = Tuple[str, bool, str]


def random_bound_field(grid, m: float, g: float, rng: np.random.Generator,
                       depth: float = 1.0) -> RadialField:
    """Smooth random multi-bump well with m + g*phi >= depth-scaled floor.

    depth=1 touches the zero-mass floor; depth<1 keeps a strict gap.
    """
    r = grid.r_primal
    raw = np.zeros_like(r)
    for _ in range(rng.integers(1, 4)):
        center = rng.uniform(0.0, 0.45 * grid.r_max)
        width = rng.uniform(0.08, 0.22) * grid.r_max
        raw += rng.uniform(0.3, 1.0) * np.exp(-((r - center) / width) ** 2)
    peak = float(np.max(raw))
    scale = depth * rng.uniform(0.5, 1.0) / peak
    vals = -(m / g) * scale * raw
    vals[-1] = 0.0
    if abs(vals[-2]) > 1e-10:      # force decay into the last cells
        vals *= np.minimum(1.0, (grid.r_max - r) / (0.05 * grid.r_max))
        vals[-1] = 0.0
    return RadialField(grid=grid, values=vals)


def check_susy_pairing(seed: int = 0, trials: int = 5, n: int = 900,
                       r_max: float = 25.0, m: float = 1.0,
                       g: float = 0.5) -> Check:
    """Spectrum of the full symmetric subspace is mirror-symmetric about 0
    and gapped away from 0 while the effective mass stays nonnegative."""
    rng = np.random.default_rng(seed)
    grid = make_grid(r_max, n)
    worst_pair, worst_gap = 0.0, math.inf
    for _ in range(trials):
        phi = random_bound_field(grid, m, g, rng)
        w = 0.99 * m
        lam_m = eigen_solve(assemble_hamiltonian(phi, g, m, sector=-1),
                            window=(-w, w)).eigenvalues
        lam_p = eigen_solve(assemble_hamiltonian(phi, g, m, sector=+1),
                            window=(-w, w)).eigenvalues
        both = np.concatenate([lam_m, lam_p])
        for lam in both:
            worst_pair = max(worst_pair, float(np.min(np.abs(both + lam))))
        if both.size:
            worst_gap = min(worst_gap, float(np.min(np.abs(both))))
    ok = worst_pair <= 1e-8 and worst_gap >= 1e-2 * m
    return ("susy-pairing", ok,
            f"max pair error {worst_pair:.2e}, min |lambda| {worst_gap:.3f}")


def check_supercharge_svd(seed: int = 1, n: int = 400,
                          r_max: float = 20.0) -> Check:
    """Singular values of the supercharge block equal |eigenvalues| of the
    ansatz sector: the operator form of the positive-ladder formula."""
    rng = np.random.default_rng(seed)
    m, g = 1.0, 0.5
    grid = make_grid(r_max, n)
    phi = random_bound_field(grid, m, g, rng)
    op = assemble_hamiltonian(phi, g, m)
    lam = np.linalg.eigvalsh(op.dense())
    sv = supercharge_singular_values(phi, g, m)
    err = float(np.max(np.abs(np.sort(np.abs(lam)) - sv)))
    ok = err <= 1e-8
    return ("supercharge-svd", ok, f"max |sv - |eig|| = {err:.2e}")


def check_hellmann_feynman(seed: int = 2, n: int = 1200,
                           r_max: float = 25.0) -> Check:
    """First-order eigenvalue response along random directions matches a
    centered difference of the assembled problem to 1e-4 relative."""
    rng = np.random.default_rng(seed)
    m, g = 1.0, 1.0
    grid = make_grid(r_max, n)
    phi = random_bound_field(grid, m, g, rng, depth=0.9)
    res = eigen_solve(assemble_hamiltonian(phi, g, m))
    lad = res.ladder
    if lad.size == 0:
        return ("hellmann-feynman", False, "no bound state in test well")
    pos = int(np.where(res.eigenvalues == lad[0])[0][0])
    lam0 = float(lad[0])
    psi = res.spinor(pos)
    worst = 0.0
    for _ in range(3):
        c = rng.uniform(0.2 * r_max, 0.6 * r_max)
        w = rng.uniform(0.05, 0.15) * r_max
        dirvals = np.exp(-((grid.r_primal - c) / w) ** 2)
        dirvals[-1] = 0.0
        direction = RadialField(grid=grid, values=dirvals)
        hf = hellmann_feynman(phi, (lam0, psi), direction, g, m)
        t = 1e-4
        lam_p = _nearest_eig(phi, direction, g, m, +t, lam0)
        lam_m = _nearest_eig(phi, direction, g, m, -t, lam0)
        fd = (lam_p - lam_m) / (2.0 * t)
        worst = max(worst, abs(hf - fd) / max(abs(fd), 1e-12))
    ok = worst <= 1e-4
    return ("hellmann-feynman", ok, f"max relative mismatch {worst:.2e}")


def _nearest_eig(phi: RadialField, direction: RadialField, g: float,
                 m: float, t: float, lam0: float) -> float:
    shifted = RadialField(grid=phi.grid,
                          values=phi.values + t * direction.values)
    lam = eigen_solve(assemble_hamiltonian(shifted, g, m)).eigenvalues
    return float(lam[np.argmin(np.abs(lam - lam0))])


def check_oracle_agreement(seed: int = 3, trials: int = 5, n: int = 4000,
                           mu_out: float = 1.0) -> Check:
    """Square-well ground levels: matrix eigensolver vs closed-form matching."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < trials:
        mu_in = rng.uniform(0.0, 0.9 * mu_out)
        R = rng.uniform(1.0, 10.0) / mu_out
        p = TwoZoneProblem(mu_in=mu_in, mu_out=mu_out, R=R)
        lad = eigenvalues(p, 1)
        # skip near-threshold states: their exponential tails exceed any
        # fixed truncation radius, so the comparison is meaningless there
        if not lad.complete or lad.values[0] > 0.97 * mu_out:
            continue
        r_max = R + 18.0 / mu_out
        grid = make_grid(r_max, n)
        vals = np.where(grid.r_primal < R, (mu_in - mu_out), 0.0)
        vals[-1] = 0.0
        phi = RadialField(grid=grid, values=vals)
        res = eigen_solve(assemble_hamiltonian(phi, g=1.0, m=mu_out))
        if res.ladder.size == 0:
            return ("oracle-agreement", False, "matrix missed a bound state")
        worst = max(worst, abs(res.ladder[0] - lad.values[0]))
        done += 1
    ok = worst <= 2e-3 * mu_out
    return ("oracle-agreement", ok, f"max |matrix - matching| = {worst:.2e}")


def check_cavity_root() -> Check:
    """Massless confined cavity frequency against an independent bisection
    of tan(x) = x/(1-x)."""
    f = lambda x: math.tan(x) - x / (1.0 - x)
    lo, hi = 2.0, 2.2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(lo) * f(mid) <= 0:
            hi = mid
        else:
            lo = mid
    x_ref = 0.5 * (lo + hi)
    lam = mit_eigenvalue(1.0, 1e-8, 1)
    ok = abs(lam - x_ref) <= 1e-6
    return ("cavity-ground-root", ok, f"lam={lam:.8f} vs x_ref={x_ref:.8f}")


def check_cavity_shape() -> Check:
    """R -> lam_1(R) decreasing and midpoint-convex on a log grid."""
    Rs = np.geomspace(0.2, 20.0, 50)
    lam = np.array([mit_eigenvalue(R, 1.0, 1) for R in Rs])
    decreasing = bool(np.all(np.diff(lam) < 0.0))
    convex = bool(np.all(lam[:-2] + lam[2:] - 2.0 * lam[1:-1] >= -1e-8))
    ok = decreasing and convex
    return ("cavity-shape", ok, f"decreasing={decreasing} convex={convex}")


def check_density_normalization(seed: int = 4) -> Check:
    """Eigenstates from the solver are unit-normalized under the grid metric."""
    rng = np.random.default_rng(seed)
    grid = make_grid(25.0, 1000)
    phi = random_bound_field(grid, 1.0, 1.0, rng, depth=0.95)
    res = eigen_solve(assemble_hamiltonian(phi, 1.0, 1.0))
    if res.ladder.size == 0:
        return ("normalization", False, "no bound state in test well")
    psi = res.ladder_spinors([1])[0]
    err = abs(psi.norm_sq() - 1.0)
    gram = res.gram_deviation()
    dens = density(psi)
    ok = err <= 1e-8 and gram <= 1e-8 and math.isfinite(float(dens.values[0]))
    return ("normalization", ok, f"|norm-1|={err:.2e}, gram dev={gram:.2e}")


def run_battery(seed: int = 0) -> List[Check]:
    return [
        check_susy_pairing(seed=seed),
        check_supercharge_svd(seed=seed + 1),
        check_hellmann_feynman(seed=seed + 2),
        check_oracle_agreement(seed=seed + 3),
        check_cavity_root(),
        check_cavity_shape(),
        check_density_normalization(seed=seed + 4),
    ]
