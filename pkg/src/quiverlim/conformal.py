"""Conformal-limit construction.

The family interpolates between a circle-action rescaling of a slice datum
and a closed-form point whose complex moment sits on the central level fixed
by the real parameter.  Trading the real parameter for the complex one is
realized by a sphere rotation of the quaternionic structure followed by the
inverse circle rescaling; the final real-moment solve at parameter zero
pins the gauge representative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFit, NotOnSlice, NotOnVariety
from .fixedpoints import WeightGrading, weight_grading
from .invariants import fingerprint
from .repspace import (RepPoint, central_lie, inf_action_adjoint,
                       moment_complex, moment_real, zeta_real_lie)
from .slices import positive_weight_project
from .solver import SolveReport, graded_solve, solve_real_moment

STAGE_TOL_FACTOR = 50.0


def twistor_rotate(p: RepPoint, xi: complex) -> RepPoint:
    """Rotate the complex-structure direction by xi in the conjugate chart.

    The moment maps transform exactly:
      real:    (1-|xi|^2) mu_R - i conj(xi) mu_C - i xi mu_C^dagger
      complex: mu_C - 2i xi mu_R - xi^2 mu_C^dagger
    """
    xi = complex(xi)
    q = p.quiver
    B = [p.B[h] - q.h_eps(h) * xi * p.B[q.h_bar(h)].conj().T
         for h in range(q.num_h)]
    i_new = [ik - xi * jk.conj().T for ik, jk in zip(p.i, p.j)]
    j_new = [jk + xi * ik.conj().T for ik, jk in zip(p.i, p.j)]
    return RepPoint(p.quiver, p.dims, B, i_new, j_new)


def conformal_point(p0: RepPoint, A: RepPoint, hbar: complex,
                    grading: WeightGrading | None = None,
                    check_tol: float = 1e-8) -> RepPoint:
    """Closed-form family member attached to a slice increment A at scale hbar.

    Reversed-edge and outgoing-framing data of the base point enter divided
    by hbar while conjugates of the forward data are added to the forward
    slots; the result keeps its complex moment on the central level set by
    the real parameter of the base point, uniformly as hbar shrinks.
    """
    hb = complex(hbar)
    if hb == 0:
        raise ValueError("hbar must be nonzero")
    at = p0 + A
    scale = max(1.0, at.norm() ** 2)
    mc_dev = (moment_complex(at) - moment_complex(p0)).norm()
    if mc_dev > check_tol * scale:
        raise NotOnSlice(
            f"increment moves the complex moment off its central level ({mc_dev:.3e})")
    adj = inf_action_adjoint(p0, A).norm()
    if adj > check_tol * max(1.0, p0.norm() * A.norm()):
        raise NotOnSlice(
            f"increment is not orthogonal to the gauge orbit ({adj:.3e})")
    if grading is not None:
        off = (A - positive_weight_project(A, grading)).norm()
        if off > check_tol * max(1.0, A.norm()):
            raise NotOnSlice(
                f"increment has support below weight one ({off:.3e})")

    q = p0.quiver
    E = q.num_edges
    B = []
    for h in range(q.num_h):
        if h < E:
            B.append(p0.B[h] + A.B[h] - hb * p0.B[h + E].conj().T)
        else:
            B.append((p0.B[h] + A.B[h]) / hb + p0.B[h - E].conj().T)
    i_new = [p0.i[k] + A.i[k] - hb * p0.j[k].conj().T for k in range(q.n)]
    j_new = [(p0.j[k] + A.j[k]) / hb + p0.i[k].conj().T for k in range(q.n)]
    return RepPoint(p0.quiver, p0.dims, B, i_new, j_new)


def conformal_limit(p0: RepPoint, A: RepPoint, hbar: complex,
                    tol: float = 1e-10, max_iter: int = 100,
                    grading: WeightGrading | None = None) -> SolveReport:
    """Kempf-Ness representative of the closed-form point at real parameter zero."""
    pA = conformal_point(p0, A, hbar, grading=grading)
    zeros = np.zeros(p0.quiver.n)
    return solve_real_moment(pA, zeros, tol=tol, max_iter=max_iter)


@dataclass
class ConformalFamilySample:
    R: float
    hbar: complex
    point: RepPoint
    fingerprint: np.ndarray
    stage_residuals: dict[str, float]
    iterations: int


def conformal_family_sample(p0: RepPoint, A: RepPoint, sigma, hbar: complex,
                            R: float, grading: WeightGrading | None = None,
                            tol: float = 1e-10, max_len: int = 4,
                            use_graded: bool = True) -> ConformalFamilySample:
    """One member of the rotation-scaling family at circle parameter R.

    Four stages: solve the real moment equation at the rescaled increment,
    rotate the sphere direction by hbar*R, apply the inverse weighted
    rescaling (which normalizes the gauge so the representative stays
    bounded), and re-solve at real parameter zero.  The exact moment values
    after the middle stages are asserted.
    """
    R = float(R)
    hb = complex(hbar)
    if R <= 0 or hb == 0:
        raise ValueError("R must be positive and hbar nonzero")
    if grading is None:
        grading = weight_grading(p0)
    base_gap = (grading.base_point - p0).norm()
    if base_gap > 1e-8 * max(1.0, p0.norm()):
        raise ValueError("grading was computed at a different base point")
    sig = np.asarray(sigma, dtype=float)
    xi = hb * R

    start = p0 + grading.act(R, A)
    if use_graded:
        rep1 = graded_solve(start, grading, R, sig, tol=tol)
    else:
        rep1 = solve_real_moment(start, sig, tol=tol)
    q1 = rep1.point

    q2 = twistor_rotate(q1, xi)
    zr = zeta_real_lie(sig, p0.dims)
    stage_tol2 = STAGE_TOL_FACTOR * tol * max(1.0, q2.norm() ** 2)
    dev_real = (moment_real(q2) - zr * (1.0 - abs(xi) ** 2)).norm()
    dev_cplx = (moment_complex(q2) - central_lie(2.0 * xi * sig, p0.dims)).norm()
    if dev_real > stage_tol2 or dev_cplx > stage_tol2:
        raise NotOnVariety(
            f"rotated point misses its exact moment targets "
            f"(real {dev_real:.3e}, complex {dev_cplx:.3e}, tol {stage_tol2:.3e})")

    q3 = grading.act(1.0 / xi, q2)
    # rescaling conjugates the moment; its conditioning amplifies stage-2 noise
    amp = grading.power_gauge(1.0 / xi).cond() ** 2
    stage_tol3 = STAGE_TOL_FACTOR * tol * amp * max(1.0, q3.norm() ** 2)
    dev3 = (moment_complex(q3) - central_lie(2.0 * sig, p0.dims)).norm()
    if dev3 > stage_tol3:
        raise NotOnVariety(
            f"rescaled point leaves the limiting complex level ({dev3:.3e})")

    rep4 = solve_real_moment(q3, np.zeros(p0.quiver.n), tol=tol)
    point = rep4.point
    return ConformalFamilySample(
        R=R, hbar=hb, point=point,
        fingerprint=fingerprint(point, max_len),
        stage_residuals={
            "start_solve": float(rep1.residual),
            "rotation_real": float(dev_real),
            "rotation_complex": float(dev_cplx),
            "rescale_complex": float(dev3),
            "final_solve": float(rep4.residual),
        },
        iterations=rep4.iterations)


@dataclass
class ConvergenceReport:
    hbar: complex
    rows: list[tuple[float, float]]  # (R, fingerprint distance to the limit)
    slope: float | None
    fit_residual: float | None
    degenerate: bool
    limit_fingerprint: np.ndarray
    samples: list[ConformalFamilySample]

    def to_rows(self) -> list[dict]:
        return [{"R": r, "distance": d} for r, d in self.rows]


def convergence_study(p0: RepPoint, A: RepPoint, sigma, hbar: complex,
                      R_grid, grading: WeightGrading | None = None,
                      tol: float = 1e-10, max_len: int = 4,
                      use_graded: bool = True,
                      strict: bool = False) -> ConvergenceReport:
    """Fit the approach rate of the family to its conformal limit.

    Distances are gauge-invariant fingerprint distances; the fit is a
    least-squares line in log-log coordinates over the grid points above
    the solver floor.  With fewer than two usable points the study is
    degenerate: the slope is None (or DegenerateFit when strict).
    """
    grid = [float(r) for r in R_grid]
    if not grid or any(b >= a for a, b in zip(grid, grid[1:])) or grid[-1] <= 0:
        raise ValueError("R_grid must be strictly decreasing and positive")
    if grading is None:
        grading = weight_grading(p0)
    limit = conformal_limit(p0, A, hbar, tol=tol, grading=grading)
    fp_limit = fingerprint(limit.point, max_len)

    samples: list[ConformalFamilySample] = []
    rows: list[tuple[float, float]] = []
    for R in grid:
        s = conformal_family_sample(p0, A, sigma, hbar, R, grading=grading,
                                    tol=tol, max_len=max_len,
                                    use_graded=use_graded)
        rows.append((R, float(np.linalg.norm(s.fingerprint - fp_limit))))
        samples.append(s)

    fp_scale = float(np.max(np.abs(fp_limit))) if fp_limit.size else 0.0
    floor = 100.0 * tol * max(1.0, fp_scale)
    usable = [(r, d) for r, d in rows if d > floor]
    if len(usable) < 2:
        if strict:
            raise DegenerateFit(
                "all family distances sit at the solver floor; "
                "no approach rate is measurable")
        return ConvergenceReport(hbar=complex(hbar), rows=rows, slope=None,
                                 fit_residual=None, degenerate=True,
                                 limit_fingerprint=fp_limit, samples=samples)
    lr = np.log([r for r, _ in usable])
    ld = np.log([d for _, d in usable])
    coeffs = np.polyfit(lr, ld, 1)
    fit_res = float(np.max(np.abs(np.polyval(coeffs, lr) - ld)))
    return ConvergenceReport(hbar=complex(hbar), rows=rows,
                             slope=float(coeffs[0]), fit_residual=fit_res,
                             degenerate=False, limit_fingerprint=fp_limit,
                             samples=samples)
