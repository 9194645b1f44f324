"""Transverse slices to gauge orbits on the complex moment level.

The tangent space at a stable point is the joint kernel of the complex
moment derivative and the adjoint of the infinitesimal action.  The slice
solvers correct a tangent increment nonlinearly so that p + q stays on the
central complex level while remaining metric-orthogonal to the orbit; the
positive-weight variants run the same construction inside the attracting
subspace of a fixed-point grading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DimensionMismatch, IllConditioned, LeftBasin,
                     MaxIterations, NotOnSlice)
from .fixedpoints import WeightGrading
from .quiver import expected_dimension
from .repspace import (LieElement, RepPoint, central_deviation, dmu_complex,
                       inf_action_adjoint, moment_complex)

SV_RATIO = 1e-8
COND_LIMIT = 1e12
NEWTON_SLOPE = 1e-4
MIN_DAMPING = 2.0 ** -10


def _lie_flat(x: LieElement) -> np.ndarray:
    parts = [b.ravel() for b in x.blocks]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=complex)


def stacked_conditions(p: RepPoint, shift: RepPoint | None = None) -> np.ndarray:
    """Matrix of q -> (dmu_C(p + shift, q), adjoint-action_p(q)) on flat coords.

    The adjoint row block is always taken at the base point p: the slice
    orthogonality condition is fixed while the moment rows move with the
    Newton iterate.
    """
    at = p if shift is None else p + shift
    n = p.flatten().size
    cols = []
    for t in range(n):
        e = np.zeros(n, dtype=complex)
        e[t] = 1.0
        q = RepPoint.from_flat(p.quiver, p.dims, e)
        cols.append(np.concatenate([_lie_flat(dmu_complex(at, q)),
                                    _lie_flat(inf_action_adjoint(p, q))]))
    return np.stack(cols, axis=1) if cols else np.zeros((0, 0), dtype=complex)


def _null_and_row(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(null-space basis columns, row-space basis columns, singular values)."""
    if mat.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex), np.zeros((0, 0), dtype=complex), np.zeros(0)
    u, s, vh = np.linalg.svd(mat, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > SV_RATIO * smax)) if smax > 0 else 0
    null = vh[rank:].conj().T
    row = vh[:rank].conj().T
    return null, row, s


@dataclass
class SliceBasis:
    base_point: RepPoint
    vectors: list[RepPoint]
    kind: str  # "full_tangent" | "bb_tangent"

    def count(self) -> int:
        return len(self.vectors)

    def real_dimension(self) -> int:
        return 2 * len(self.vectors)

    def combine(self, coeffs) -> RepPoint:
        out = RepPoint.zeros(self.base_point.quiver, self.base_point.dims)
        for c, vec in zip(coeffs, self.vectors):
            out = out + complex(c) * vec
        return out

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "count": self.count(),
            "real_dimension": self.real_dimension(),
            "base_point": self.base_point.to_dict(),
            "vectors": [v.to_dict() for v in self.vectors],
        }


def _condition_residual(p: RepPoint, q: RepPoint) -> float:
    return float(np.linalg.norm(np.concatenate([
        _lie_flat(dmu_complex(p, q)), _lie_flat(inf_action_adjoint(p, q))])))


def tangent_basis(p: RepPoint) -> SliceBasis:
    """Orthonormal basis of the slice tangent space at a stable point.

    The count must match the expected dimension (as a real dimension);
    a mismatch signals non-genericity or instability.
    """
    null, _, _ = _null_and_row(stacked_conditions(p))
    expected = expected_dimension(p.quiver, p.dims)
    if 2 * null.shape[1] != expected:
        raise DimensionMismatch(
            f"tangent null space has real dimension {2 * null.shape[1]}, "
            f"expected {expected}")
    vectors = [RepPoint.from_flat(p.quiver, p.dims, null[:, t])
               for t in range(null.shape[1])]
    scale = max(1.0, p.norm())
    worst = max((_condition_residual(p, v) for v in vectors), default=0.0)
    if worst > 1e-10 * scale:
        raise DimensionMismatch(
            f"tangent vector violates the defining conditions ({worst:.3e})")
    return SliceBasis(base_point=p, vectors=vectors, kind="full_tangent")


def moment_derivative_matrix(p: RepPoint) -> np.ndarray:
    """Flat-coordinate matrix of q -> dmu_C(p, q)."""
    n = p.flatten().size
    cols = []
    for t in range(n):
        e = np.zeros(n, dtype=complex)
        e[t] = 1.0
        cols.append(_lie_flat(dmu_complex(p, RepPoint.from_flat(p.quiver, p.dims, e))))
    return np.stack(cols, axis=1) if cols else np.zeros((0, 0), dtype=complex)


def moment_correction(p: RepPoint, q: RepPoint) -> RepPoint:
    """Linear correction q + (dmu_C)^*G(-dmu_C(p,q)) killing the moment row.

    G is the pseudo-inverse of dmu_C (dmu_C)^* on its image; the result is
    the metric-orthogonal projection of q onto ker dmu_C(p, .).
    """
    D = moment_derivative_matrix(p)
    u, s, vh = np.linalg.svd(D, full_matrices=False)
    smax = s[0] if s.size else 0.0
    keep = s > SV_RATIO * smax if smax > 0 else np.zeros(0, dtype=bool)
    if keep.any():
        smin = float(s[keep].min())
        cond = (float(smax) / smin) ** 2
        if cond > COND_LIMIT:
            raise IllConditioned(
                f"moment-derivative normal operator condition {cond:.3e}")
    y = -(D @ q.flatten())
    coef = u[:, keep].conj().T @ y
    corr = vh[keep].conj().T @ (coef / s[keep])
    return q + RepPoint.from_flat(p.quiver, p.dims, corr)


def _constrained_newton(p: RepPoint, q0: RepPoint, directions: np.ndarray,
                        target, tol: float, max_iter: int,
                        stay_inside=None) -> RepPoint:
    """Newton on F(q) = (mu_C(p+q) - target, adjoint-action_p(q)) with updates
    restricted to the span of `directions` (columns, flat coords)."""
    def residual(q: RepPoint) -> np.ndarray:
        mc = moment_complex(p + q)
        top = _lie_flat(mc) - target
        return np.concatenate([top, _lie_flat(inf_action_adjoint(p, q))])

    q = q0.copy()
    r = residual(q)
    r_norm = float(np.linalg.norm(r))
    scale = max(1.0, (p + q0).norm() ** 2)
    it = 0
    while r_norm > tol * scale:
        if it >= max_iter:
            raise MaxIterations(
                f"slice correction hit {max_iter} iterations, residual {r_norm:.3e}")
        jac = stacked_conditions(p, shift=q) @ directions
        delta_c, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        delta_flat = directions @ delta_c
        t = 1.0
        accepted = False
        while t >= MIN_DAMPING:
            q_try = q + RepPoint.from_flat(p.quiver, p.dims, t * delta_flat)
            if stay_inside is not None:
                q_try = stay_inside(q_try)
            r_try = residual(q_try)
            n_try = float(np.linalg.norm(r_try))
            if n_try <= (1.0 - NEWTON_SLOPE * t) * r_norm:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            raise LeftBasin(
                f"slice correction stalled at residual {r_norm:.3e}; "
                "starting increment is outside the Newton basin")
        q, r, r_norm = q_try, r_try, n_try
        it += 1
    return q


def slice_solve(p: RepPoint, q0: RepPoint, tol: float = 1e-10,
                max_iter: int = 50) -> RepPoint:
    """Correct a tangent increment so p + q solves the complex moment equation.

    The returned q keeps the tangential projection of q0 (chart condition):
    Newton updates are restricted to the metric complement of the tangent
    space.  The complex moment target is the central value at p itself.
    """
    mc = moment_complex(p)
    if central_deviation(mc) > 1e-8 * max(1.0, p.norm() ** 2):
        raise NotOnSlice("base point does not sit on a central complex level")
    null, row, _ = _null_and_row(stacked_conditions(p))
    flat0 = q0.flatten()
    if null.shape[1]:
        off = flat0 - null @ (null.conj().T @ flat0)
    else:
        off = flat0
    if float(np.linalg.norm(off)) > 1e-8 * max(1.0, float(np.linalg.norm(flat0))):
        raise NotOnSlice("starting increment is not tangent to the slice")
    return _constrained_newton(p, q0, row, _lie_flat(mc), tol, max_iter)


def bb_tangent_basis(p0: RepPoint, grading: WeightGrading) -> SliceBasis:
    """Slice tangent basis inside the strictly positive weight subspace.

    Its real dimension must be half the full slice dimension.
    """
    plus = _positive_weight_columns(p0, grading)
    mat = stacked_conditions(p0) @ plus
    null, _, _ = _null_and_row(mat)
    expected = expected_dimension(p0.quiver, p0.dims)
    got = 2 * null.shape[1]
    if 2 * got != expected:
        raise DimensionMismatch(
            f"positive-weight null space has real dimension {got}, "
            f"expected half of {expected}")
    vectors = [RepPoint.from_flat(p0.quiver, p0.dims, plus @ null[:, t])
               for t in range(null.shape[1])]
    return SliceBasis(base_point=p0, vectors=vectors, kind="bb_tangent")


def _positive_weight_columns(p0: RepPoint, grading: WeightGrading) -> np.ndarray:
    """Orthonormal flat-coordinate basis of the full-action weight >= 1 subspace."""
    wt_flat = np.real(grading.slot_weight_arrays().flatten())
    n = wt_flat.size
    cols = []
    for t in range(n):
        if wt_flat[t] >= 0.5:
            e = np.zeros(n, dtype=complex)
            e[t] = 1.0
            cols.append(grading.from_eigenbasis(
                RepPoint.from_flat(p0.quiver, p0.dims, e)).flatten())
    return np.stack(cols, axis=1) if cols else np.zeros((n, 0), dtype=complex)


def positive_weight_project(q: RepPoint, grading: WeightGrading) -> RepPoint:
    """Metric-orthogonal projection onto the weight >= 1 subspace."""
    eig = grading.to_eigenbasis(q)
    wts = grading.slot_weight_arrays()

    def pick(mat, warr):
        return np.where(np.real(warr) >= 0.5, mat, 0.0)

    kept = RepPoint(q.quiver, q.dims,
                    [pick(m, a) for m, a in zip(eig.B, wts.B)],
                    [pick(m, a) for m, a in zip(eig.i, wts.i)],
                    [pick(m, a) for m, a in zip(eig.j, wts.j)])
    return grading.from_eigenbasis(kept)


def bb_slice_solve(p0: RepPoint, q0: RepPoint, grading: WeightGrading,
                   tol: float = 1e-10, max_iter: int = 50,
                   basin_norm: float = 1.0) -> RepPoint:
    """Correct a positive-weight tangent increment onto the attracting slice.

    Newton updates stay inside the weight >= 1 subspace (projector applied
    each step).  Increments beyond the basin are first shrunk with the
    inverse blockwise rescaling, solved small, and mapped back with the
    forward rescaling, which preserves both slice equations.
    """
    norm0 = q0.norm()
    if norm0 > basin_norm:
        R = 2.0 * norm0 / basin_norm
        small = grading.act(1.0 / R, q0)
        A_small = bb_slice_solve(p0, small, grading, tol=tol, max_iter=max_iter,
                                 basin_norm=basin_norm)
        return grading.act(R, A_small)

    plus = _positive_weight_columns(p0, grading)
    if plus.shape[1] == 0:
        return q0.copy()
    mat = stacked_conditions(p0) @ plus
    _, row_c, _ = _null_and_row(mat)
    directions = plus @ row_c if row_c.shape[1] else plus[:, :0]

    def keep_graded(q: RepPoint) -> RepPoint:
        return positive_weight_project(q, grading)

    target = _lie_flat(moment_complex(p0))
    return _constrained_newton(p0, keep_graded(q0), directions, target, tol,
                               max_iter, stay_inside=keep_graded)
