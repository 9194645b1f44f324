"""Seeded sampling of points on the variety.

A counter-based generator keyed by the run seed drives every draw, so equal
configurations reproduce byte-identical output.  Raw gaussian points are
first projected onto the central complex level with a min-norm Newton
iteration, then moved to the real-moment solution along the complex gauge
orbit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (MaxIterations, NotInjective, NotOnVariety, QuiverLimError,
                     SamplingFailed)
from .quiver import CentralParameter, DimensionVectors, Quiver
from .repspace import RepPoint, central_lie, moment_complex
from .slices import moment_derivative_matrix
from .solver import SolveReport, solve_real_moment


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator; the single randomness source of the package."""
    return np.random.Generator(np.random.Philox(int(seed)))


def random_rep(quiver: Quiver, dims: DimensionVectors,
               rng: np.random.Generator, scale: float = 1.0) -> RepPoint:
    """Standard complex gaussian entries in every slot, scaled uniformly."""
    n = RepPoint.zeros(quiver, dims).flatten().size
    flat = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return RepPoint.from_flat(quiver, dims, scale * flat)


def project_complex_level(p: RepPoint, c_values, tol: float = 1e-12,
                          max_iter: int = 50) -> RepPoint:
    """Min-norm Newton projection onto the complex level mu_C = c.

    Each step solves the linearization in the least-squares sense, which
    picks the increment orthogonal to the kernel; quadratic convergence
    makes the projection sharp at desk scale.
    """
    target = central_lie(np.asarray(c_values, dtype=complex), p.dims)
    cur = p.copy()
    for _ in range(max_iter):
        gap = moment_complex(cur) - target
        res = np.concatenate([b.ravel() for b in gap.blocks]) \
            if gap.blocks else np.zeros(0, dtype=complex)
        norm = float(np.linalg.norm(res))
        if norm <= tol * max(1.0, cur.norm() ** 2):
            return cur
        D = moment_derivative_matrix(cur)
        delta, *_ = np.linalg.lstsq(D, -res, rcond=None)
        cur = cur + RepPoint.from_flat(p.quiver, p.dims, delta)
    raise MaxIterations(
        f"complex-level projection did not converge (residual {norm:.3e})")


@dataclass
class SampleReport:
    point: RepPoint
    solve: SolveReport
    attempts: int
    seed: int


def sample_on_variety(quiver: Quiver, dims: DimensionVectors,
                      central: CentralParameter, seed: int = 0,
                      tol: float = 1e-10, restarts: int = 10,
                      scale: float = 1.0) -> SampleReport:
    """Draw a random point of the variety at the configured central parameter.

    Retries with fresh gaussian draws when a projection or solve fails;
    gives up with SamplingFailed after the restart budget.
    """
    rng = make_rng(seed)
    sigma = central.sigma_array()
    c_vals = central.c_array()
    last: QuiverLimError | None = None
    for attempt in range(1, restarts + 1):
        raw = random_rep(quiver, dims, rng, scale=scale)
        try:
            leveled = project_complex_level(raw, c_vals)
            rep = solve_real_moment(leveled, sigma, tol=tol)
        except (MaxIterations, NotInjective, NotOnVariety) as exc:
            last = exc
            continue
        return SampleReport(point=rep.point, solve=rep, attempts=attempt,
                            seed=int(seed))
    raise SamplingFailed(
        f"no variety point after {restarts} restarts (last error: {last})")
