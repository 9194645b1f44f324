"""Scaling-action fixed points and their weight decompositions.

The scaling action multiplies every reversed-edge matrix and every j-matrix
by R and leaves the rest alone.  A point is fixed when each rescaling can be
undone by a gauge transformation; the infinitesimal compensator is i*D for a
hermitian D whose per-vertex eigenvalues are the integer weights.  Pairing
the scaling with the gauge power R^D gives a linear action on the whole
representation space that fixes the point and scales its tangent directions
blockwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (GradingViolation, NoConvergence, NonIntegerWeights,
                     NotFixed, NotInjective, NotOnVariety, QuiverLimError)
from .invariants import fingerprint_distance, nilpotency_bound
from .quiver import DimensionVectors, Quiver
from .repspace import (GaugeElement, LieElement, RepPoint, central_deviation,
                       gauge_act, inf_action, lie_exp, moment_complex,
                       moment_real)
from .solver import hermitian_basis, solve_real_moment

INT_WEIGHT_TOL = 1e-6
STABILITY_RATIO = 1e-10


def cstar_act(R: complex, p: RepPoint) -> RepPoint:
    """Multiply reversed-edge and j matrices by R."""
    E = p.quiver.num_edges
    return RepPoint(
        quiver=p.quiver, dims=p.dims,
        B=[b.copy() if h < E else R * b for h, b in enumerate(p.B)],
        i=[m.copy() for m in p.i],
        j=[R * m for m in p.j])


def _real_flat(p: RepPoint) -> np.ndarray:
    z = p.flatten()
    return np.concatenate([z.real, z.imag])


def _action_matrix_hermitian(p: RepPoint) -> tuple[np.ndarray, list]:
    """Columns: infinitesimal gauge action of each hermitian basis element."""
    cols = []
    basis_elems = []
    for k in range(p.quiver.n):
        vk = p.dims.v[k]
        for E_mat in hermitian_basis(vk):
            blocks = [np.zeros((p.dims.v[m], p.dims.v[m]), dtype=complex)
                      for m in range(p.quiver.n)]
            blocks[k] = E_mat
            xi = LieElement(dims=p.dims, blocks=blocks, klass="hermitian")
            basis_elems.append(xi)
            cols.append(_real_flat(inf_action(p, xi)))
    mat = np.stack(cols, axis=1) if cols else np.zeros((_real_flat(p).size, 0))
    return mat, basis_elems


def _action_matrix_complex(p: RepPoint) -> np.ndarray:
    """Columns: action of every elementary matrix over the complexified gauge algebra."""
    cols = []
    for k in range(p.quiver.n):
        vk = p.dims.v[k]
        for a in range(vk):
            for b in range(vk):
                blocks = [np.zeros((p.dims.v[m], p.dims.v[m]), dtype=complex)
                          for m in range(p.quiver.n)]
                blocks[k][a, b] = 1.0
                xi = LieElement(dims=p.dims, blocks=blocks, klass="general")
                cols.append(inf_action(p, xi).flatten())
    return np.stack(cols, axis=1) if cols else np.zeros((p.flatten().size, 0))


def stability_margin(p: RepPoint) -> tuple[float, float]:
    """(smallest, largest) singular value of the complexified gauge action."""
    mat = _action_matrix_complex(p)
    if mat.shape[1] == 0:
        return float("inf"), 0.0
    s = np.linalg.svd(mat, compute_uv=False)
    return float(s[-1]), float(s[0])


@dataclass
class FixedPointReport:
    fixed: bool
    residual: float
    tol_used: float
    generator: LieElement | None
    stable: bool
    min_singular: float
    crosscheck: float


def _require_on_variety(p: RepPoint, tol: float) -> None:
    """Both moment maps must sit at central values (scalar blocks)."""
    scale = tol * max(1.0, p.norm() ** 2)
    dev_r = central_deviation(moment_real(p))
    dev_c = central_deviation(moment_complex(p))
    if max(dev_r, dev_c) > scale:
        raise NotOnVariety(
            f"point is not on a central moment level "
            f"(real deviation {dev_r:.3e}, complex deviation {dev_c:.3e})")


def is_fixed_point(p: RepPoint, tol: float = 1e-8) -> FixedPointReport:
    """Detect a scaling-action fixed point and recover its compensating generator.

    Solves the least-squares problem matching the infinitesimal gauge action
    of a hermitian D against the derivative of the scaling action, then
    confirms at two finite angles.  The point must sit on central moment
    levels (NotOnVariety otherwise).
    """
    _require_on_variety(p, tol)
    E = p.quiver.num_edges
    scale = tol * max(1.0, p.norm())
    target = RepPoint(
        quiver=p.quiver, dims=p.dims,
        B=[np.zeros_like(b) if h < E else -b for h, b in enumerate(p.B)],
        i=[np.zeros_like(m) for m in p.i],
        j=[-m for m in p.j])
    mat, basis_elems = _action_matrix_hermitian(p)
    rhs = _real_flat(target)
    if mat.shape[1] == 0:
        coeff = np.zeros(0)
        resid = float(np.linalg.norm(rhs))
    else:
        coeff, _, _, _ = np.linalg.lstsq(mat, rhs, rcond=None)
        resid = float(np.linalg.norm(mat @ coeff - rhs))
    gen = LieElement.zeros(p.dims, klass="hermitian")
    for c, xi in zip(coeff, basis_elems):
        gen = gen + float(c) * xi
    smin, smax = stability_margin(p)
    stable = smin > STABILITY_RATIO * max(1.0, smax)

    cross = 0.0
    if resid <= scale:
        for theta in (np.pi / 3, np.pi / 2):
            g = lie_exp(LieElement(dims=p.dims,
                                   blocks=[1j * theta * b for b in gen.blocks],
                                   klass="skew"))
            moved = gauge_act(g, cstar_act(np.exp(1j * theta), p))
            cross = max(cross, (moved - p).norm())
    fixed = resid <= scale and cross <= 10.0 * scale
    return FixedPointReport(fixed=fixed, residual=resid, tol_used=scale,
                            generator=gen if fixed else None,
                            stable=stable, min_singular=smin, crosscheck=cross)


@dataclass
class WeightGrading:
    """Integer weight data of a fixed point.

    weights[k] lists the eigenvalues of the generator on V_k ascending;
    qmats[k] holds the matching orthonormal eigenvectors as columns.
    """

    base_point: RepPoint
    weights: tuple[tuple[int, ...], ...]
    qmats: list[np.ndarray]
    generator: LieElement

    @property
    def quiver(self) -> Quiver:
        return self.base_point.quiver

    @property
    def dims(self) -> DimensionVectors:
        return self.base_point.dims

    def max_end_weight(self) -> int:
        gaps = [ws[-1] - ws[0] for ws in self.weights if ws]
        return max(gaps, default=0)

    def power_gauge(self, s: complex) -> GaugeElement:
        blocks = []
        for k, q in enumerate(self.qmats):
            d = np.diag([complex(s) ** w for w in self.weights[k]]) \
                if self.weights[k] else np.zeros((0, 0), dtype=complex)
            blocks.append(q @ d @ q.conj().T)
        return GaugeElement(dims=self.dims, g=blocks)

    def act(self, R: complex, p: RepPoint) -> RepPoint:
        """Combined scaling-plus-gauge action; fixes the base point."""
        return gauge_act(self.power_gauge(R), cstar_act(R, p))

    def _to_eigen(self, xi: LieElement) -> list[np.ndarray]:
        return [q.conj().T @ b @ q for q, b in zip(self.qmats, xi.blocks)]

    def _from_eigen(self, blocks: list[np.ndarray], klass: str) -> LieElement:
        out = [q @ b @ q.conj().T for q, b in zip(self.qmats, blocks)]
        return LieElement(dims=self.dims, blocks=out, klass=klass)

    def lie_project(self, xi: LieElement, j: int) -> LieElement:
        """Keep only gauge-algebra components of adjoint weight |m| <= j."""
        kept = []
        for k, b in enumerate(self._to_eigen(xi)):
            ws = np.array(self.weights[k], dtype=int)
            mask = np.abs(ws[:, None] - ws[None, :]) <= j
            kept.append(np.where(mask, b, 0.0))
        return self._from_eigen(kept, xi.klass)

    def lie_component(self, xi: LieElement, m: int) -> LieElement:
        kept = []
        for k, b in enumerate(self._to_eigen(xi)):
            ws = np.array(self.weights[k], dtype=int)
            mask = (ws[:, None] - ws[None, :]) == m
            kept.append(np.where(mask, b, 0.0))
        return self._from_eigen(kept, "general")

    def component_norm(self, xi: LieElement, m: int) -> float:
        return self.lie_component(xi, m).norm()

    def tangent_weight_counts(self) -> dict[int, int]:
        """Complex dimension of each full-action weight block of the rep space."""
        counts: dict[int, int] = {}

        def add(w: int, n: int = 1):
            counts[w] = counts.get(w, 0) + n

        q = self.quiver
        for h in range(2 * q.num_edges):
            a, b = q.h_out(h), q.h_in(h)
            shift = 0 if h < q.num_edges else 1
            for wr in self.weights[b]:
                for wc in self.weights[a]:
                    add(wr - wc + shift)
        for k in range(q.n):
            for wr in self.weights[k]:
                add(wr, self.dims.w[k])      # i block rows
                add(1 - wr, self.dims.w[k])  # j block columns
        return counts

    def to_eigenbasis(self, p: RepPoint) -> RepPoint:
        """Rewrite all slots in the per-vertex eigenbases of the generator."""
        q = self.quiver
        Q = self.qmats
        return RepPoint(
            q, self.dims,
            [Q[q.h_in(h)].conj().T @ p.B[h] @ Q[q.h_out(h)] for h in range(q.num_h)],
            [Q[k].conj().T @ p.i[k] for k in range(q.n)],
            [p.j[k] @ Q[k] for k in range(q.n)])

    def from_eigenbasis(self, p: RepPoint) -> RepPoint:
        q = self.quiver
        Q = self.qmats
        return RepPoint(
            q, self.dims,
            [Q[q.h_in(h)] @ p.B[h] @ Q[q.h_out(h)].conj().T for h in range(q.num_h)],
            [Q[k] @ p.i[k] for k in range(q.n)],
            [p.j[k] @ Q[k].conj().T for k in range(q.n)])

    def slot_weight_arrays(self) -> RepPoint:
        """Full-action weight of every matrix entry, stored in a RepPoint whose
        entries are the (real integer) weights, in eigenbasis coordinates."""
        q = self.quiver
        B = []
        for h in range(q.num_h):
            a, b = q.h_out(h), q.h_in(h)
            shift = 0 if h < q.num_edges else 1
            wr = np.array(self.weights[b], dtype=float)[:, None]
            wc = np.array(self.weights[a], dtype=float)[None, :]
            B.append((wr - wc + shift) * np.ones((len(self.weights[b]),
                                                  len(self.weights[a]))))
        i_w = [np.array(self.weights[k], dtype=float)[:, None]
               * np.ones((self.dims.v[k], self.dims.w[k]))
               if self.dims.v[k] else np.zeros((0, self.dims.w[k]))
               for k in range(q.n)]
        j_w = [(1.0 - np.array(self.weights[k], dtype=float)[None, :])
               * np.ones((self.dims.w[k], self.dims.v[k]))
               if self.dims.v[k] else np.zeros((self.dims.w[k], 0))
               for k in range(q.n)]
        return RepPoint(q, self.dims, B, i_w, j_w)


def grade_increment(q: RepPoint, grading: WeightGrading) -> dict[int, RepPoint]:
    """Split an increment by full-action weight.

    Oriented-edge entries between weight-a and weight-b lines carry b - a;
    reversed-edge entries carry b - a + 1; i rows carry their line weight;
    j columns carry one minus theirs.  Summing the parts returns q exactly.
    """
    eig = grading.to_eigenbasis(q)
    wts = grading.slot_weight_arrays()
    parts: dict[int, RepPoint] = {}
    all_w = set()
    for arr in list(wts.B) + list(wts.i) + list(wts.j):
        all_w.update(int(round(x)) for x in np.real(arr).ravel())
    for w in sorted(all_w):
        def pick(mat, warr):
            return np.where(np.rint(np.real(warr)) == w, mat, 0.0)
        part = RepPoint(
            q.quiver, q.dims,
            [pick(m, a) for m, a in zip(eig.B, wts.B)],
            [pick(m, a) for m, a in zip(eig.i, wts.i)],
            [pick(m, a) for m, a in zip(eig.j, wts.j)])
        parts[w] = grading.from_eigenbasis(part)
    return parts


def weight_grading(p: RepPoint, tol: float = 1e-8) -> WeightGrading:
    """Diagonalize the compensating generator of a fixed point.

    Raises NotFixed when the point is not fixed, NotInjective when the
    complexified gauge action has kernel, NonIntegerWeights when an
    eigenvalue strays from the integers.
    """
    rep = is_fixed_point(p, tol=tol)
    if not rep.fixed:
        raise NotFixed(f"point is not a scaling fixed point "
                       f"(residual {rep.residual:.3e} > {rep.tol_used:.3e})")
    if not rep.stable:
        raise NotInjective(
            f"gauge action has kernel at the fixed point "
            f"(smallest singular value {rep.min_singular:.3e})")
    weights = []
    qmats = []
    gen_blocks = []
    for k, blk in enumerate(rep.generator.blocks):
        herm = 0.5 * (blk + blk.conj().T)
        evals, evecs = np.linalg.eigh(herm) if herm.size else (np.zeros(0), np.zeros((0, 0)))
        rounded = np.rint(evals)
        if evals.size and np.max(np.abs(evals - rounded)) > INT_WEIGHT_TOL:
            raise NonIntegerWeights(
                f"vertex {k} weights {evals} are not integral")
        ints = tuple(int(x) for x in rounded)
        weights.append(ints)
        qmats.append(evecs.astype(complex))
        gen_blocks.append(evecs @ np.diag(rounded.astype(float)) @ evecs.conj().T
                          if evals.size else np.zeros((0, 0), dtype=complex))
    gen = LieElement(dims=p.dims, blocks=gen_blocks, klass="hermitian")
    grading = WeightGrading(base_point=p, weights=tuple(weights), qmats=qmats,
                            generator=gen)

    # base-point structure: every slot entry sits at full-action weight 0
    # (oriented edges and i preserve line weight, reversed edges drop it by
    # one before the scaling shift, j is supported on weight-one lines)
    parts = grade_increment(p, grading)
    off = sum((q_part.norm() for w, q_part in parts.items() if w != 0), 0.0)
    if off > 100 * tol * max(1.0, p.norm()):
        raise GradingViolation(
            f"fixed point has components off the zero weight block "
            f"(stray norm {off:.3e})")
    return grading


def bb_expected_dimension(grading: WeightGrading) -> dict[str, int]:
    """Dimension audit of the attracting set modulo its gauge stabilizers.

    Counts the strictly positive weight block of the representation space and
    subtracts the non-negative and strictly positive conjugation blocks of the
    complexified gauge algebra.
    """
    counts = grading.tangent_weight_counts()
    dim_m_pos = sum(n for w, n in counts.items() if w >= 1)
    dim_g_pos = 0
    dim_g_nonneg = 0
    for ws in grading.weights:
        for wa in ws:
            for wb in ws:
                if wa - wb >= 1:
                    dim_g_pos += 1
                if wa - wb >= 0:
                    dim_g_nonneg += 1
    return {
        "rep_weight_ge1": dim_m_pos,
        "gauge_weight_ge1": dim_g_pos,
        "gauge_weight_ge0": dim_g_nonneg,
        "bb_dimension": dim_m_pos - dim_g_pos - dim_g_nonneg,
    }


def scaling_energy(p: RepPoint) -> float:
    """Squared norm of the slots the scaling action shrinks."""
    E = p.quiver.num_edges
    total = sum(float(np.vdot(b, b).real) for b in p.B[E:])
    total += sum(float(np.vdot(m, m).real) for m in p.j)
    return total


@dataclass
class FlowReport:
    limit: RepPoint
    R_final: float
    rows: list[tuple[float, float, float]]
    fixed_report: FixedPointReport


def default_schedule(steps: int = 40, ratio: float = 0.5) -> tuple[float, ...]:
    return tuple(ratio ** t for t in range(1, steps + 1))


def flow_limit(p: RepPoint, sigma, schedule=None, tol: float = 1e-9,
               max_len: int | None = None, solve_tol: float = 1e-10) -> FlowReport:
    """Follow the scaling action towards R -> 0 along a decreasing schedule.

    At each R the original point is rescaled and re-solved onto the real
    moment level; the walk stops once consecutive invariant fingerprints are
    Cauchy (distance <= tol) and the point passes the fixed-point test.  The
    energy of the shrinking slots must decrease monotonically along the way.
    rows: (R, shrinking-slot energy, fingerprint step distance).
    """
    if schedule is None:
        schedule = default_schedule()
    schedule = [float(R) for R in schedule]
    if any(b >= a for a, b in zip(schedule, schedule[1:])) or \
            any(R <= 0 for R in schedule) or (schedule and schedule[0] >= 1.0 + 1e-12):
        raise ValueError("schedule must be strictly decreasing in (0, 1]")
    if max_len is None:
        max_len = nilpotency_bound(p.dims)

    q_prev = solve_real_moment(p, sigma, tol=solve_tol).point
    energy = scaling_energy(q_prev)
    rows: list[tuple[float, float, float]] = []
    R_prev = 1.0
    for R in schedule:
        # rescaling the previous representative by the bounded ratio reaches
        # the same orbit point as rescaling the original by R, with uniformly
        # bounded gauge travel per step
        q_next = solve_real_moment(cstar_act(R / R_prev, q_prev), sigma,
                                   tol=solve_tol).point
        R_prev = R
        e_next = scaling_energy(q_next)
        dist = fingerprint_distance(q_prev, q_next, max_len)
        rows.append((R, e_next, dist))
        if e_next > energy + 1e-9 * max(1.0, energy):
            raise NoConvergence(
                f"shrinking-slot energy rose from {energy:.6e} to {e_next:.6e} "
                f"at R={R:g}; the flow is not descending")
        energy = e_next
        q_prev = q_next
        if dist <= tol:
            rep = is_fixed_point(q_next, tol=10 * max(tol, solve_tol))
            if rep.fixed:
                # the limit carries O(R_final) dirt in its shrinking slots;
                # keeping the zero-weight component removes it exactly
                try:
                    grading = weight_grading(q_next)
                    parts = grade_increment(q_next, grading)
                    polished = parts.get(0, RepPoint.zeros(p.quiver, p.dims))
                    rep2 = is_fixed_point(polished, tol=10 * max(tol, solve_tol))
                    if rep2.fixed:
                        return FlowReport(limit=polished, R_final=R, rows=rows,
                                          fixed_report=rep2)
                except QuiverLimError:
                    pass
                return FlowReport(limit=q_next, R_final=R, rows=rows,
                                  fixed_report=rep)
    raise NoConvergence(
        f"scaling flow did not settle along the schedule "
        f"(last fingerprint step {rows[-1][2]:.3e})" if rows else
        "empty flow schedule")
