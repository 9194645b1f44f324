"""Verification pipeline.

Runs every invariant suite of the package against one configured quiver:
genericity of the central parameter, seeded sampling, the adjoint and
rotation identities, solver uniqueness, the scaling flow to a fixed point,
dimension audits, slice corrections, conformal-family convergence, and the
gauge invariance and escape behavior of path invariants.  Results are
collected per suite and written as a JSON report plus CSV tables keyed by
the configuration digest.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .conformal import (conformal_limit, conformal_point, convergence_study,
                        twistor_rotate)
from .errors import QuiverLimError
from .fixedpoints import (bb_expected_dimension, cstar_act, flow_limit,
                          weight_grading)
from .invariants import (enumerate_paths, escape_slope, fingerprint,
                         fingerprint_labels, invariant_size, is_nilpotent,
                         path_escape_exponent)
from .presets import resolve_quiver_spec
from .quiver import expected_dimension, is_generic
from .repspace import (LieElement, central_deviation, gauge_act,
                       hermitian_residual, inf_action, inf_action_adjoint,
                       lie_exp, lie_inner, metric, moment_complex, moment_real,
                       symplectic_form)
from .sampling import make_rng, sample_on_variety
from .slices import (bb_slice_solve, bb_tangent_basis, moment_correction,
                     slice_solve, tangent_basis)
from .solver import solve_real_moment


@dataclass
class SuiteResult:
    name: str
    passed: bool
    worst: float
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "worst_residual": float(self.worst), "note": self.note}


@dataclass
class VerifyReport:
    config: RunConfig
    quiver_name: str
    suites: list[SuiteResult] = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_dict(self) -> dict:
        # drop output_dir so the report bytes do not depend on where
        # the report lands
        cfg = self.config.to_dict()
        del cfg["output_dir"]
        return {
            "config": cfg,
            "config_sha256": self.config.digest(),
            "quiver": self.quiver_name,
            "suites": [s.to_dict() for s in self.suites],
            "all_passed": self.all_passed,
        }


def _rand_lie(dims, rng, scale: float, klass: str = "general") -> LieElement:
    blocks = [scale * (rng.standard_normal((n, n))
                       + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
              for n in dims.v]
    return LieElement(dims, [np.asarray(b, dtype=complex) for b in blocks], klass)


def _rand_point(quiver, dims, rng, scale: float):
    from .repspace import RepPoint
    n = RepPoint.zeros(quiver, dims).flatten().size
    flat = scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return RepPoint.from_flat(quiver, dims, flat)


class _Pipeline:
    """Builds the shared artifacts; each stage records its failure once."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.quiver, self.dims, self.central, self.preset = \
            resolve_quiver_spec(cfg.quiver_file)
        self.sigma = self.central.sigma_array()
        self.sample = None
        self.flow = None
        self.p0 = None
        self.grading = None
        self.basis = None
        self.bb_basis = None
        self.A = None
        self.studies = []
        self.failures: dict[str, str] = {}

    def stage(self, name: str, fn):
        if name in self.failures:
            return None
        try:
            return fn()
        except (QuiverLimError, ValueError, np.linalg.LinAlgError) as exc:
            self.failures[name] = f"{type(exc).__name__}: {exc}"
            return None


def _suite_genericity(pl: _Pipeline) -> SuiteResult:
    ok = is_generic(pl.central, pl.quiver, pl.dims)
    note = "" if ok else "central parameter lies on a wall"
    return SuiteResult("genericity", bool(ok), 0.0 if ok else 1.0, note)


def _suite_sampling(pl: _Pipeline) -> SuiteResult:
    def run():
        return sample_on_variety(pl.quiver, pl.dims, pl.central,
                                 seed=pl.cfg.seed, tol=pl.cfg.tol)
    pl.sample = pl.stage("sampling", run)
    if pl.sample is None:
        return SuiteResult("sampling", False, np.inf, pl.failures["sampling"])
    p = pl.sample.point
    scale = max(1.0, p.norm() ** 2)
    res_r = hermitian_residual(p, pl.sigma).norm()
    dev_c = central_deviation(moment_complex(p))
    twin = sample_on_variety(pl.quiver, pl.dims, pl.central,
                             seed=pl.cfg.seed, tol=pl.cfg.tol)
    identical = np.array_equal(p.flatten(), twin.point.flatten())
    worst = max(res_r, dev_c)
    passed = res_r <= 10 * pl.cfg.tol * scale and dev_c <= 1e-8 * scale and identical
    note = "" if identical else "same seed gave different bytes"
    return SuiteResult("sampling", passed, float(worst), note)


def _suite_adjoint(pl: _Pipeline) -> SuiteResult:
    rng = make_rng(pl.cfg.seed + 1)
    worst = 0.0
    for _ in range(20):
        p = _rand_point(pl.quiver, pl.dims, rng, 1.0)
        q = _rand_point(pl.quiver, pl.dims, rng, 1.0)
        xi = _rand_lie(pl.dims, rng, 1.0)
        lhs = metric(inf_action(p, xi), q)
        rhs = lie_inner(xi, inf_action_adjoint(p, q))
        worst = max(worst, abs(lhs - rhs))
        # derivative of the complex moment agrees with its odd finite part
        from .repspace import dmu_complex, moment_complex as mc
        odd = (mc(p + q) - mc(p - q)) * 0.5
        worst = max(worst, (dmu_complex(p, q) - odd).norm())
    return SuiteResult("adjoint_identities", worst <= 1e-9, float(worst))


def _suite_solver(pl: _Pipeline) -> SuiteResult:
    if pl.sample is None:
        return SuiteResult("solver_uniqueness", False, np.inf,
                           "prerequisite failed: sampling")
    # rescaling keeps the complex moment central while leaving the real level
    start = cstar_act(0.7, pl.sample.point)
    try:
        rep_a = solve_real_moment(start, pl.sigma, tol=pl.cfg.tol)
        rep_b = solve_real_moment(start, pl.sigma, tol=pl.cfg.tol,
                                  forced_damping=(0.5, 0.75))
    except QuiverLimError as exc:
        return SuiteResult("solver_uniqueness", False, np.inf, str(exc))
    ga, gb = lie_exp(rep_a.xi), lie_exp(rep_b.xi)
    diff = max((float(np.abs(a - b).max(initial=0.0))
                for a, b in zip(ga.g, gb.g)), default=0.0)
    return SuiteResult("solver_uniqueness", diff <= 1e-8, float(diff))


def _suite_twistor(pl: _Pipeline) -> SuiteResult:
    if pl.sample is None:
        return SuiteResult("twistor_rotation", False, np.inf,
                           "prerequisite failed: sampling")
    p = pl.sample.point
    mr, mc = moment_real(p), moment_complex(p)
    rng = make_rng(pl.cfg.seed + 3)
    worst = 0.0
    for _ in range(5):
        re, im = rng.uniform(-2, 2, size=2)
        xi = complex(re, im)
        q = twistor_rotate(p, xi)
        tgt_r = mr * (1 - abs(xi) ** 2) - mc * (1j * np.conj(xi)) \
            - mc.dagger() * (1j * xi)
        tgt_c = mc - mr * (2j * xi) - mc.dagger() * (xi ** 2)
        worst = max(worst, (moment_real(q) - tgt_r).norm(),
                    (moment_complex(q) - tgt_c).norm())
    scale = max(1.0, p.norm() ** 2)
    return SuiteResult("twistor_rotation", worst <= 1e-9 * scale, float(worst))


def _suite_flow(pl: _Pipeline) -> SuiteResult:
    if pl.sample is None:
        return SuiteResult("fixed_point_flow", False, np.inf,
                           "prerequisite failed: sampling")

    def run():
        return flow_limit(pl.sample.point, pl.sigma,
                          max_len=min(pl.cfg.max_len, 2 * sum(pl.dims.v)),
                          solve_tol=pl.cfg.tol)
    pl.flow = pl.stage("flow", run)
    if pl.flow is None:
        return SuiteResult("fixed_point_flow", False, np.inf, pl.failures["flow"])
    pl.p0 = pl.flow.limit

    def grade():
        return weight_grading(pl.p0)
    pl.grading = pl.stage("grading", grade)
    if pl.grading is None:
        return SuiteResult("fixed_point_flow", False, np.inf,
                           pl.failures["grading"])
    worst = float(pl.flow.fixed_report.residual)
    return SuiteResult("fixed_point_flow", True, worst,
                       f"settled at R={pl.flow.R_final:g}")


def _suite_dimensions(pl: _Pipeline) -> SuiteResult:
    if pl.sample is None or pl.grading is None:
        return SuiteResult("dimension_audit", False, np.inf,
                           "prerequisite failed: sampling or grading")
    expected = expected_dimension(pl.quiver, pl.dims)

    def full():
        return tangent_basis(pl.sample.point)
    pl.basis = pl.stage("tangent", full)
    if pl.basis is None:
        return SuiteResult("dimension_audit", False, np.inf,
                           pl.failures["tangent"])

    def bb():
        return bb_tangent_basis(pl.p0, pl.grading)
    pl.bb_basis = pl.stage("bb_tangent", bb)
    if pl.bb_basis is None:
        return SuiteResult("dimension_audit", False, np.inf,
                           pl.failures["bb_tangent"])
    audit = bb_expected_dimension(pl.grading)
    ok = (pl.basis.real_dimension() == expected
          and 2 * pl.bb_basis.real_dimension() == expected
          and pl.bb_basis.count() == audit["bb_dimension"])
    note = (f"expected {expected}, tangent {pl.basis.real_dimension()}, "
            f"attracting {pl.bb_basis.real_dimension()}, "
            f"formula {audit['bb_dimension']}")
    return SuiteResult("dimension_audit", ok, 0.0 if ok else 1.0, note)


def _suite_isotropy(pl: _Pipeline) -> SuiteResult:
    if pl.bb_basis is None:
        return SuiteResult("isotropy", False, np.inf,
                           "prerequisite failed: attracting basis")
    vecs = pl.bb_basis.vectors
    worst = 0.0
    for a in range(len(vecs)):
        for b in range(len(vecs)):
            worst = max(worst, abs(symplectic_form(vecs[a], vecs[b])))
    return SuiteResult("isotropy", worst <= 1e-12, float(worst))


def _suite_slice(pl: _Pipeline) -> SuiteResult:
    if pl.basis is None:
        return SuiteResult("slice_correction", False, np.inf,
                           "prerequisite failed: tangent basis")
    p = pl.sample.point
    if pl.basis.count() == 0:
        return SuiteResult("slice_correction", True, 0.0, "zero-dimensional slice")
    rng = make_rng(pl.cfg.seed + 4)
    coeffs = 0.05 * (rng.standard_normal(pl.basis.count())
                     + 1j * rng.standard_normal(pl.basis.count()))
    q0 = pl.basis.combine(coeffs)
    try:
        q = slice_solve(p, q0, tol=pl.cfg.tol)
    except QuiverLimError as exc:
        return SuiteResult("slice_correction", False, np.inf, str(exc))
    scale = max(1.0, (p + q).norm() ** 2)
    dev_mc = (moment_complex(p + q) - moment_complex(p)).norm()
    dev_adj = inf_action_adjoint(p, q).norm()
    # the tangential projection of the output must be the input increment
    null = np.stack([v.flatten() for v in pl.basis.vectors], axis=1)
    tang = null @ (null.conj().T @ q.flatten())
    dev_chart = float(np.linalg.norm(tang - q0.flatten()))
    v0 = pl.basis.vectors[0]
    dev_proj = (moment_correction(p, v0) - v0).norm()
    worst = max(dev_mc, dev_adj, dev_chart, dev_proj)
    return SuiteResult("slice_correction", worst <= 1e-8 * scale, float(worst))


def _suite_bb_slice(pl: _Pipeline) -> SuiteResult:
    if pl.bb_basis is None or pl.grading is None:
        return SuiteResult("attracting_slice", False, np.inf,
                           "prerequisite failed: attracting basis")
    if pl.bb_basis.count() == 0:
        return SuiteResult("attracting_slice", True, 0.0,
                           "zero-dimensional attracting slice")
    rng = make_rng(pl.cfg.seed + 5)
    coeffs = 0.3 * (rng.standard_normal(pl.bb_basis.count())
                    + 1j * rng.standard_normal(pl.bb_basis.count()))
    q0 = pl.bb_basis.combine(coeffs)

    def run():
        return bb_slice_solve(pl.p0, q0, pl.grading, tol=pl.cfg.tol)
    pl.A = pl.stage("bb_slice", run)
    if pl.A is None:
        return SuiteResult("attracting_slice", False, np.inf,
                           pl.failures["bb_slice"])
    scale = max(1.0, (pl.p0 + pl.A).norm() ** 2)
    dev_mc = (moment_complex(pl.p0 + pl.A) - moment_complex(pl.p0)).norm()
    dev_adj = inf_action_adjoint(pl.p0, pl.A).norm()
    try:
        pA = conformal_point(pl.p0, pl.A, pl.cfg.hbar_grid[0],
                             grading=pl.grading)
        dev_central = central_deviation(moment_complex(pA))
    except QuiverLimError as exc:
        return SuiteResult("attracting_slice", False, np.inf, str(exc))
    worst = max(dev_mc, dev_adj, dev_central)
    return SuiteResult("attracting_slice", worst <= 1e-8 * scale, float(worst))


def _suite_conformal(pl: _Pipeline) -> SuiteResult:
    # a rigid quiver has no slice directions, so there is nothing to converge
    if pl.bb_basis is not None and pl.bb_basis.count() == 0:
        return SuiteResult("conformal_convergence", True, 0.0,
                           "zero-dimensional attracting slice")
    if pl.A is None or pl.grading is None:
        return SuiteResult("conformal_convergence", False, np.inf,
                           "prerequisite failed: attracting slice")
    worst = 0.0
    notes = []
    passed = True
    for hb in pl.cfg.hbar_grid:
        try:
            st = convergence_study(pl.p0, pl.A, pl.sigma, hb, pl.cfg.r_grid,
                                   grading=pl.grading, tol=pl.cfg.tol,
                                   max_len=pl.cfg.max_len)
        except QuiverLimError as exc:
            return SuiteResult("conformal_convergence", False, np.inf, str(exc))
        pl.studies.append(st)
        if st.degenerate:
            notes.append(f"hbar={hb:g}: degenerate (distances at floor)")
            continue
        notes.append(f"hbar={hb:g}: slope {st.slope:.3f}")
        worst = max(worst, abs(st.slope - 2.0))
        if not (1.5 <= st.slope <= 3.0):
            passed = False
    return SuiteResult("conformal_convergence", passed, float(worst),
                       "; ".join(notes))


def _suite_invariance(pl: _Pipeline) -> SuiteResult:
    if pl.sample is None:
        return SuiteResult("gauge_invariance", False, np.inf,
                           "prerequisite failed: sampling")
    p = pl.sample.point
    rng = make_rng(pl.cfg.seed + 6)
    base = fingerprint(p, pl.cfg.max_len)
    ref = max(1.0, float(np.linalg.norm(base)))
    worst = 0.0
    for _ in range(10):
        g = lie_exp(_rand_lie(pl.dims, rng, 0.4))
        moved = fingerprint(gauge_act(g, p), pl.cfg.max_len)
        worst = max(worst, float(np.linalg.norm(moved - base)) / ref)
    return SuiteResult("gauge_invariance", worst <= 1e-9, float(worst))


def _suite_escape(pl: _Pipeline) -> SuiteResult:
    # no slice directions means no invariant can blow up along them
    if pl.bb_basis is not None and pl.bb_basis.count() == 0:
        return SuiteResult("escape_rates", True, 0.0,
                           "zero-dimensional attracting slice")
    if pl.A is None or pl.p0 is None:
        return SuiteResult("escape_rates", False, np.inf,
                           "prerequisite failed: attracting slice")
    if np.all(np.abs(pl.central.c_array()) == 0) \
            and not is_nilpotent(pl.p0, tol=1e-8):
        return SuiteResult("escape_rates", False, 1.0,
                           "scaling limit point is not nilpotent")
    at = pl.p0 + pl.A
    candidates = []
    for kind in ("admissible", "loop"):
        for ps in enumerate_paths(pl.quiver, pl.dims, pl.cfg.max_len, kind):
            if path_escape_exponent(ps) >= 1 and invariant_size(at, ps) > 1e-6:
                candidates.append(ps)
    if not candidates:
        return SuiteResult("escape_rates", True, 0.0,
                           "no non-vanishing escaping invariant at this point")
    grid = (0.04, 0.02, 0.01, 0.005)
    worst = 0.0
    checked = 0
    for ps in candidates[:3]:
        try:
            st = escape_slope(pl.p0, pl.A, grid, ps)
        except QuiverLimError as exc:
            return SuiteResult("escape_rates", False, np.inf,
                               f"{ps}: {exc}")
        worst = max(worst, abs(st.slope + st.expected_exponent))
        checked += 1
    return SuiteResult("escape_rates", worst <= 0.2, float(worst),
                       f"checked {checked} paths")


def verify_run(cfg: RunConfig) -> tuple[VerifyReport, "_Pipeline"]:
    pl = _Pipeline(cfg)
    report = VerifyReport(config=cfg, quiver_name=cfg.quiver_file)
    for suite in (_suite_genericity, _suite_sampling, _suite_adjoint,
                  _suite_solver, _suite_twistor, _suite_flow,
                  _suite_dimensions, _suite_isotropy, _suite_slice,
                  _suite_bb_slice, _suite_conformal, _suite_invariance,
                  _suite_escape):
        report.suites.append(suite(pl))
    return report, pl


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(x) if isinstance(x, float) else x for x in row])


def write_outputs(report: VerifyReport, pl: "_Pipeline", out_dir: str) -> None:
    """JSON summary plus CSV tables; identical configs give identical bytes."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    audit_rows = []
    if pl.grading is not None and pl.basis is not None and pl.bb_basis is not None:
        audit = bb_expected_dimension(pl.grading)
        audit_rows.append([
            report.quiver_name,
            expected_dimension(pl.quiver, pl.dims),
            pl.basis.real_dimension(), pl.bb_basis.real_dimension(),
            audit["rep_weight_ge1"], audit["gauge_weight_ge1"],
            audit["gauge_weight_ge0"], audit["bb_dimension"]])
    _write_csv(os.path.join(out_dir, "dimension_audit.csv"),
               ["quiver", "expected_real", "tangent_real", "attracting_real",
                "rep_weight_ge1", "gauge_weight_ge1", "gauge_weight_ge0",
                "attracting_formula"], audit_rows)

    flow_rows = []
    if pl.flow is not None:
        flow_rows = [[float(r), float(e), float(d)] for r, e, d in pl.flow.rows]
    _write_csv(os.path.join(out_dir, "flow_trace.csv"),
               ["R", "shrinking_energy", "fingerprint_step"], flow_rows)

    conv_rows = []
    for st in pl.studies:
        for smp, (r, d) in zip(st.samples, st.rows):
            conv_rows.append([
                float(st.hbar.real), float(r), float(d),
                *[float(smp.stage_residuals[k]) for k in
                  ("start_solve", "rotation_real", "rotation_complex",
                   "rescale_complex", "final_solve")]])
    _write_csv(os.path.join(out_dir, "convergence.csv"),
               ["hbar", "R", "distance", "start_solve", "rotation_real",
                "rotation_complex", "rescale_complex", "final_solve"],
               conv_rows)

    fp_rows = []
    if pl.p0 is not None:
        labels = fingerprint_labels(pl.quiver, pl.dims, pl.cfg.max_len)
        base = fingerprint(pl.p0, pl.cfg.max_len)
        lim = None
        if pl.A is not None:
            try:
                lim = fingerprint(
                    conformal_limit(pl.p0, pl.A, pl.cfg.hbar_grid[0],
                                    tol=pl.cfg.tol, grading=pl.grading).point,
                    pl.cfg.max_len)
            except QuiverLimError:
                lim = None
        for t, lab in enumerate(labels):
            row = [lab, float(base[t])]
            row.append(float(lim[t]) if lim is not None else "")
            fp_rows.append(row)
    _write_csv(os.path.join(out_dir, "fingerprints.csv"),
               ["path", "fixed_point_value", "conformal_limit_value"], fp_rows)
