"""Newton solver for the real moment map along complex-gauge orbits.

Given p with central complex moment value, find a hermitian exponent xi with
mu_R(exp(xi).p) = i sigma Id.  The iteration composes hermitian exponentials;
the reported single exponent is recovered from the polar decomposition of the
accumulated gauge (the positive factor is the unique invariant of the solve,
so two damping schedules must agree on exp(xi)).

The linearized operator at p acts on hermitian tuples.  The literal formula

  L(p, xi)_k = sum_{h: in(h)=k} B_h (B_h^dag xi_k - xi_out B_h^dag)
               - (B_hbar^dag xi_out - xi_k B_hbar^dag) B_hbar
               + i_k i_k^dag xi_k + xi_k j_k^dag j_k

is half the Frechet derivative of xi -> -2i mu_R(exp(xi).p) at xi = 0: the
full derivative is L(xi) + L(xi)^dag, which the Newton step uses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GradingViolation, MaxIterations, NotInjective, NotOnVariety
from .quiver import DimensionVectors
from .repspace import (GaugeElement, LieElement, RepPoint, central_deviation,
                       dmoment_real_scaled, gauge_act, hermitian_residual,
                       inf_action, lie_exp, moment_complex)

EIG_FLOOR_RATIO = 1e-10
ARMIJO_SLOPE = 1e-4
MAX_HALVINGS = 10


def linearized_operator(p: RepPoint, xi: LieElement) -> LieElement:
    q = p.quiver
    blocks = []
    for k in range(q.n):
        acc = np.zeros((p.dims.v[k], p.dims.v[k]), dtype=complex)
        xk = xi.blocks[k]
        for h in q.h_into(k):
            xo = xi.blocks[q.h_out(h)]
            bh = p.B[h]
            bb = p.B[q.h_bar(h)]
            acc += bh @ (bh.conj().T @ xk - xo @ bh.conj().T)
            acc -= (bb.conj().T @ xo - xk @ bb.conj().T) @ bb
        acc += p.i[k] @ p.i[k].conj().T @ xk + xk @ p.j[k].conj().T @ p.j[k]
        blocks.append(acc)
    return LieElement(p.dims, blocks, "general")


def newton_derivative(p: RepPoint, xi: LieElement) -> LieElement:
    """Full derivative of xi -> -2i mu_R(exp(xi).p) at 0: equals L + L^dag."""
    return dmoment_real_scaled(p, inf_action(p, xi))


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Real-orthonormal basis of hermitian dim x dim matrices under Re Tr(AB^dag)."""
    basis = []
    for a in range(dim):
        e = np.zeros((dim, dim), dtype=complex)
        e[a, a] = 1.0
        basis.append(e)
    s = 1.0 / np.sqrt(2.0)
    for a in range(dim):
        for b in range(a + 1, dim):
            e = np.zeros((dim, dim), dtype=complex)
            e[a, b] = s
            e[b, a] = s
            basis.append(e)
            e = np.zeros((dim, dim), dtype=complex)
            e[a, b] = 1j * s
            e[b, a] = -1j * s
            basis.append(e)
    return basis


class _HermCoords:
    """Real coordinates on the space of hermitian tuples for one dims vector."""

    def __init__(self, dims: DimensionVectors):
        self.dims = dims
        self.bases = [hermitian_basis(vk) for vk in dims.v]
        self.sizes = [vk * vk for vk in dims.v]
        self.total = sum(self.sizes)

    def to_vec(self, x: LieElement) -> np.ndarray:
        out = np.zeros(self.total)
        pos = 0
        for k, basis in enumerate(self.bases):
            blk = x.blocks[k]
            for e in basis:
                out[pos] = np.vdot(e, blk).real
                pos += 1
        return out

    def from_vec(self, vec: np.ndarray) -> LieElement:
        blocks = []
        pos = 0
        for k, basis in enumerate(self.bases):
            blk = np.zeros((self.dims.v[k], self.dims.v[k]), dtype=complex)
            for e in basis:
                blk += vec[pos] * e
                pos += 1
            blocks.append(blk)
        return LieElement(self.dims, blocks, "hermitian")


def assemble_newton_matrix(p: RepPoint, coords: _HermCoords) -> np.ndarray:
    """Matrix of the full derivative on hermitian coordinates (real symmetric PSD)."""
    m = np.zeros((coords.total, coords.total))
    col = 0
    for k, basis in enumerate(coords.bases):
        for e in basis:
            xi = LieElement.zeros(p.dims, "hermitian")
            xi.blocks[k] = e.copy()
            m[:, col] = coords.to_vec(newton_derivative(p, xi))
            col += 1
    return 0.5 * (m + m.T)


def _spectral_solve(mat: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve by eigendecomposition, guarding the smallest-eigenvalue ratio."""
    if mat.shape[0] == 0:
        return rhs.copy()
    vals, vecs = np.linalg.eigh(mat)
    top = float(vals.max(initial=0.0))
    if top <= 0.0 or float(vals.min()) < EIG_FLOOR_RATIO * top:
        raise NotInjective(
            f"linearized operator eigenvalue ratio below {EIG_FLOOR_RATIO:g} "
            f"(min {vals.min():.3e}, max {top:.3e})")
    return vecs @ ((vecs.T @ rhs) / vals)


def hermitian_log(g: GaugeElement) -> LieElement:
    """(1/2) log(g^dag g): the hermitian exponent of the positive polar factor."""
    blocks = []
    for gk in g.g:
        if gk.size == 0:
            blocks.append(gk.copy())
            continue
        h = gk.conj().T @ gk
        vals, vecs = np.linalg.eigh(0.5 * (h + h.conj().T))
        vals = np.maximum(vals.real, np.finfo(float).tiny)
        blocks.append(0.5 * (vecs @ np.diag(np.log(vals)) @ vecs.conj().T))
    return LieElement(g.dims, blocks, "hermitian")


def _check_central_complex(p: RepPoint) -> LieElement:
    mc = moment_complex(p)
    dev = central_deviation(mc)
    scale = max(1.0, p.norm() ** 2)
    if dev > 1e-8 * scale:
        raise NotOnVariety(
            f"complex moment map is not central (deviation {dev:.3e}); "
            "the real-moment solve is only defined on central levels")
    return mc


@dataclass
class SolveReport:
    xi: LieElement
    residual: float
    iterations: int
    converged: bool
    history: list[tuple[int, float, float]] = field(default_factory=list)
    point: RepPoint | None = None

    def history_rows(self) -> list[dict]:
        return [{"iter": it, "residual": res, "damping": damp}
                for it, res, damp in self.history]


def solve_real_moment(p: RepPoint, sigma, tol: float = 1e-10, max_iter: int = 100,
                      forced_damping: tuple[float, ...] = ()) -> SolveReport:
    """Damped Newton on the complex-gauge orbit of p.

    forced_damping pins the step fraction of the first iterations (used to
    realize distinct schedules for the uniqueness checks); afterwards a full
    step with up-to-ten halvings on the residual norm is used.
    """
    _check_central_complex(p)
    sig = np.asarray(sigma, dtype=float)
    if sig.shape != (p.quiver.n,):
        raise ValueError("sigma must provide one real entry per vertex")

    coords = _HermCoords(p.dims)
    g_total = GaugeElement.identity(p.dims)
    p_cur = p.copy()
    res = hermitian_residual(p_cur, sig)
    res_norm = res.norm()
    history: list[tuple[int, float, float]] = [(0, res_norm, 0.0)]

    it = 0
    while res_norm > tol:
        if it >= max_iter:
            raise MaxIterations(
                f"real-moment solve hit {max_iter} iterations, residual {res_norm:.3e}")
        mat = assemble_newton_matrix(p_cur, coords)
        step = coords.from_vec(_spectral_solve(mat, -coords.to_vec(res)))

        t = forced_damping[it] if it < len(forced_damping) else 1.0
        accepted = False
        for _ in range(MAX_HALVINGS + 1):
            # an overflowing or degenerate trial is an ordinary rejection
            try:
                with np.errstate(over="ignore", invalid="ignore"):
                    g_step = lie_exp(t * step)
                    p_try = gauge_act(g_step, p_cur)
                    res_try = hermitian_residual(p_try, sig)
                    new_norm = res_try.norm()
            except np.linalg.LinAlgError:
                t *= 0.5
                continue
            if np.isfinite(new_norm) and new_norm <= (1.0 - ARMIJO_SLOPE * t) * res_norm:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            raise MaxIterations(
                f"residual stalled at {res_norm:.3e} after {MAX_HALVINGS} halvings")
        p_cur = p_try
        g_total = g_step.compose(g_total)
        res, res_norm = res_try, new_norm
        it += 1
        history.append((it, res_norm, t))

    xi = hermitian_log(g_total)
    point = gauge_act(lie_exp(xi), p)
    final = hermitian_residual(point, sig).norm()
    return SolveReport(xi=xi, residual=final, iterations=it, converged=True,
                       history=history, point=point)


@dataclass
class GradedSolveReport:
    stages: list[tuple[int, LieElement]]
    xi_total: LieElement
    residual: float
    point: RepPoint
    converged: bool


def graded_solve(p_start: RepPoint, grading, r_scale: float, sigma,
                 tol: float = 1e-10, max_iter: int = 100) -> GradedSolveReport:
    """Stagewise solve near a graded fixed point.

    Stage j inverts the operator frozen at the fixed point on the weight
    blocks |m| <= j of the hermitian residual; the correction exponent is
    confined to those blocks (GradingViolation otherwise) and scales as
    R^{j+2}.  A final plain Newton pass finishes to tol.  Returned stage
    elements are the unscaled coefficients xi_j = delta_j / R^{j+2}.
    """
    p0 = grading.base_point
    sig = np.asarray(sigma, dtype=float)
    coords = _HermCoords(p_start.dims)
    frozen = assemble_newton_matrix(p0, coords)
    m_max = grading.max_end_weight()

    p_cur = p_start.copy()
    g_total = GaugeElement.identity(p_start.dims)
    stages: list[tuple[int, LieElement]] = []
    for j in range(m_max):
        res = hermitian_residual(p_cur, sig)
        res_j = grading.lie_project(res, j)
        delta = coords.from_vec(_spectral_solve(frozen, -coords.to_vec(res_j)))
        outside = (delta - grading.lie_project(delta, j)).norm()
        d_norm = delta.norm()
        if d_norm > 0 and outside > 1e-8 * d_norm:
            raise GradingViolation(
                f"stage {j} correction leaves its weight block "
                f"(relative leakage {outside / d_norm:.3e})")
        delta = grading.lie_project(delta, j)
        g_step = lie_exp(delta)
        p_cur = gauge_act(g_step, p_cur)
        g_total = g_step.compose(g_total)
        stages.append((j, delta * float(r_scale) ** (-(j + 2))))

    final = solve_real_moment(p_cur, sig, tol=tol, max_iter=max_iter)
    g_total = lie_exp(final.xi).compose(g_total)
    stages.append((m_max, final.xi * float(r_scale) ** (-(m_max + 2))))

    xi_total = hermitian_log(g_total)
    point = gauge_act(lie_exp(xi_total), p_start)
    residual = hermitian_residual(point, sig).norm()
    return GradedSolveReport(stages=stages, xi_total=xi_total, residual=residual,
                             point=point, converged=True)
