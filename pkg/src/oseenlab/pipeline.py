"""Stage orchestration: classify, solve, decompose, regularity, verify, study.

Every stage writes its artifacts into the output directory as it finishes,
so a failure later on leaves the earlier results in place.  Reports are
flat ``key = value`` text; floats use 17 significant digits.
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import galerkin as gk
from .config import RunConfig
from .errors import InvalidInputError, OseenLabError, SolverError
from .expr import parse_expression
from .fields import (
    ExprField,
    VectorField,
    boundary_l2,
    fmt17,
    h1_norm,
    l2_norm,
    normal_trace,
    write_scalar_csv,
    write_vector_csv,
)
from .flatness import Verdict, classify_admissibility
from .helmholtz import boundary_vorticity_residual, decompose
from .transport import regularity_report
from .verify import (
    CheckResult,
    estimate_monitor,
    korn_rayleigh,
    lambda_fd_check,
    manufactured,
    poincare_v,
    poincare_w,
    solution_errors,
    strong_residuals,
    w_norm,
)

log = logging.getLogger("oseenlab")

EXIT_OK, EXIT_FAIL, EXIT_INADMISSIBLE = 0, 1, 2


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return fmt17(v)
    if isinstance(v, (list, tuple)):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def write_report(path, items) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k, v in items:
            fh.write(f"{k} = {_fmt(v)}\n")


@dataclass
class Problem:
    """Domain, parameters and data resolved from a config."""

    cfg: RunConfig
    domain: object
    params: gk.OseenParameters
    F: VectorField
    G: ExprField
    B_expr: ExprField | None
    exact: object = None

    def B(self, quad):
        if self.exact is not None:
            return self.exact.B(quad)
        return self.B_expr.on_boundary(quad)


def build_problem(cfg: RunConfig) -> Problem:
    domain = cfg.domain.build()
    base = gk.OseenParameters(cfg.mu, cfg.nu, cfg.gamma, f=1.0 if cfg.f is None else cfg.f, sigma=cfg.sigma)
    if cfg.f is None:
        basis = gk.build_basis(domain, cfg.N[-1], base)
        thr = gk.f_threshold(basis, base)
        if not math.isfinite(thr):
            raise SolverError("no friction coefficient on the grid makes the Galerkin matrix coercive")
        base = base.replace(f=max(1.0, 10.0 * thr))
    if cfg.manufactured:
        ex = manufactured(domain, base)
        return Problem(cfg, domain, base, ex.F, ex.G, None, ex)
    F = VectorField(ExprField(parse_expression(cfg.F1)), ExprField(parse_expression(cfg.F2)))
    return Problem(cfg, domain, base, F, ExprField(parse_expression(cfg.G)), ExprField(parse_expression(cfg.B)))


def solve_problem(prob: Problem, N: int) -> gk.GalerkinSolution:
    basis = gk.build_basis(prob.domain, N, prob.params)
    return gk.solve(prob.domain, N, prob.params, F=prob.F, G=prob.G, B=prob.B(basis.quad), basis=basis)


@dataclass
class RunState:
    out: str
    stages: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    flatness: object = None
    solution: object = None

    def path(self, name):
        return os.path.join(self.out, name)


# --------------------------------------------------------------------------
# stages


def stage_classify(prob: Problem, st: RunState):
    rep = classify_admissibility(prob.domain)
    rep.domain = prob.cfg.domain.label()
    with open(st.path("flatness.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(rep.to_text())
    st.flatness = rep
    st.stages.append("classify")
    return rep


def stage_solve(prob: Problem, st: RunState, N: int | None = None):
    N = N or prob.cfg.N[-1]
    sol = solve_problem(prob, N)
    q = sol.quad
    write_vector_csv(st.path("u.csv"), q, sol.u)
    write_scalar_csv(st.path("w.csv"), q, sol.w)
    e = gk.energy_report(sol.u, sol.w, q)
    items = [("N", N), ("mu", prob.params.mu), ("nu", prob.params.nu), ("gamma", prob.params.gamma),
             ("f", prob.params.f), ("sigma", sol.basis.sigma),
             ("coercivity_margin", sol.diagnostics["coercivity_margin"]),
             ("linear_residual", sol.diagnostics["residual"]),
             ("lift_condition", sol.lift.condition),
             ("normal_trace_l2", boundary_l2(normal_trace(sol.u, q), q))]
    items += sorted(e.items())
    if prob.exact is not None:
        items += sorted(solution_errors(sol, prob.exact).items())
    write_report(st.path("solve.txt"), items)
    st.solution = sol
    st.stages.append("solve")
    return sol


def stage_decompose(prob: Problem, st: RunState):
    sol = st.solution
    q = sol.quad
    H = decompose(prob.domain, sol.u, q, degree=prob.cfg.degree, bubble=sol.basis.bubble)
    write_scalar_csv(st.path("psi.csv"), q, H.psi)
    write_scalar_csv(st.path("A.csv"), q, H.A)
    un = boundary_l2(normal_trace(sol.u, q), q)
    write_report(st.path("decompose.txt"), [
        ("roundtrip_defect", H.defect), ("A_boundary_l2", H.boundary_A),
        ("perp_grad_A_normal_l2", H.normal_trace_perp), ("net_flux", H.compat_defect),
        ("normal_trace_l2", un)])
    st.stages.append("decompose")
    return H


def stage_regularity(prob: Problem, st: RunState):
    sol = st.solution
    verdict = st.flatness.verdict.value if st.flatness is not None else "Unchecked"
    rep = regularity_report(sol, verdict, delta_clip=prob.cfg.delta_clip)
    q = sol.quad
    write_scalar_csv(st.path("lambda.csv"), q, rep.lam.lam)
    write_scalar_csv(st.path("w_transport.csv"), q, rep.w_transport)
    write_report(st.path("regularity.txt"), list(rep.to_dict().items()))
    st.stages.append("regularity")
    return rep


def stage_verify(prob: Problem, st: RunState, reg=None, helm=None):
    cfg = prob.cfg
    sol = st.solution
    q = sol.quad
    p = prob.params
    checks = []
    kr = korn_rayleigh(sol.basis, p)
    checks.append((CheckResult("korn_min_quotient", kr.min_quotient, 0.0, ">",
                               {"f": kr.f, "threshold_f": kr.threshold_f}), True))
    pv = poincare_v(sol.basis)
    checks.append((pv, True))
    checks.append((poincare_w(prob.domain, q, cfg.poincare_samples, cfg.seed), True))
    scale = max(1.0, float(np.linalg.norm(sol.r)))
    checks.append((CheckResult("galerkin_linear_residual", sol.diagnostics["residual"], 1e-10 * scale), True))
    checks.append((CheckResult("coercivity_margin", sol.diagnostics["coercivity_margin"], 0.0, ">"), True))
    un = boundary_l2(normal_trace(sol.u, q), q)
    checks.append((CheckResult("normal_trace", un, cfg.trace_tol), True))
    wl2, wx1 = l2_norm(sol.w, q), l2_norm(sol.w.dx1, q)
    checks.append((CheckResult("density_poincare", wl2 - prob.domain.diameter * wx1, 1e-12, "<="), True))
    mms = prob.exact is not None
    res = strong_residuals(sol.u, sol.w, prob.F, prob.G, prob.B(q), p, q)
    for k, v in res.items():
        tol = cfg.residual_tol if k != "continuity" and k != "inflow_density" else 1e-8
        checks.append((CheckResult(f"residual_{k}", v, tol), mms or k in ("continuity", "inflow_density")))
    bv = boundary_vorticity_residual(sol.u, p, q, prob.B(q))
    checks.append((CheckResult("boundary_vorticity", bv, cfg.residual_tol), mms))
    if helm is not None:
        err = solution_errors(sol, prob.exact)["u_h1_error"] if mms else 0.0
        checks.append((CheckResult("helmholtz_roundtrip", helm.defect, 10.0 * (un + err)), mms))
    if reg is not None:
        wn = max(1.0, l2_norm(sol.w, q))
        checks.append((CheckResult("transport_consistency", reg.transport_gap, 1e-8 * wn), True))
        checks.append((lambda_fd_check(prob.domain, q, reg.Ht, reg.gbar, delta_clip=cfg.delta_clip), True))
    st.checks.extend(checks)
    write_checks(st.path("checks.csv"), checks)
    st.stages.append("verify")
    return checks


def write_checks(path, checks):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("name,value,relation,threshold,pass,enforced\n")
        for c, enforced in checks:
            fh.write(f"{c.name},{_fmt(c.value)},{c.relation},{_fmt(c.threshold)},{c.passed},{enforced}\n")


def stage_study(prob: Problem, st: RunState):
    rows = []
    for N in prob.cfg.N:
        sol = solve_problem(prob, N)
        q = sol.quad
        row = {"N": N}
        if prob.exact is not None:
            row.update(solution_errors(sol, prob.exact))
        res = strong_residuals(sol.u, sol.w, prob.F, prob.G, prob.B(q), prob.params, q)
        row.update({f"res_{k}": v for k, v in res.items()})
        row["energy"] = h1_norm(sol.u, q) + w_norm(sol.w, q)
        rows.append(row)
    keys = list(rows[0].keys())
    with open(st.path("study.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(keys) + "\n")
        for r in rows:
            fh.write(",".join(_fmt(r[k]) for k in keys) + "\n")
    checks = []
    if len(rows) >= 3:
        checks.append((estimate_monitor([r["energy"] for r in rows], prob.cfg.energy_ratio), True))
    if prob.exact is not None and len(rows) >= 2:
        for key in ("u_h1_error", "w_l2_error"):
            e = [r[key] for r in rows]
            dec = all(b < a for a, b in zip(e, e[1:]))
            checks.append((CheckResult(f"monotone_{key}", float(dec), 1.0, ">="), True))
    st.checks.extend(checks)
    write_checks(st.path("study_checks.csv"), checks)
    st.stages.append("study")
    return rows


# --------------------------------------------------------------------------
# driver


COMMANDS = ("classify", "solve", "decompose", "regularity", "verify", "study", "run")


def run_pipeline(cfg: RunConfig, out_dir: str, command: str = "run") -> int:
    """Execute ``command`` and return the exit status; summary.txt is always written."""
    if command not in COMMANDS:
        raise InvalidInputError(f"unknown command {command!r}")
    os.makedirs(out_dir, exist_ok=True)
    st = RunState(out_dir)
    status, error = EXIT_OK, None
    try:
        prob = build_problem(cfg)
        if command in ("classify", "regularity", "run"):
            stage_classify(prob, st)
        if command == "study":
            stage_study(prob, st)
        elif command != "classify":
            stage_solve(prob, st)
            helm = reg = None
            if command in ("decompose", "verify", "run"):
                helm = stage_decompose(prob, st)
            if command in ("regularity", "verify", "run"):
                reg = stage_regularity(prob, st)
            if command in ("verify", "run"):
                stage_verify(prob, st, reg, helm)
        if any(enf and not c.passed for c, enf in st.checks):
            status = EXIT_FAIL
        if st.flatness is not None:
            if st.flatness.verdict is Verdict.INADMISSIBLE:
                status = EXIT_INADMISSIBLE
            elif st.flatness.verdict is Verdict.INDETERMINATE and status == EXIT_OK:
                status = EXIT_FAIL
    except OseenLabError as exc:
        status, error = EXIT_FAIL, f"{type(exc).__name__}: {exc}"
        log.error("%s", error)
    except Exception as exc:  # unexpected: still leave a summary behind
        status, error = EXIT_FAIL, f"internal {type(exc).__name__}: {exc}"
        log.exception("stage failed")
    finally:
        write_summary(st, cfg, command, status, error)
    return status


def write_summary(st: RunState, cfg: RunConfig, command: str, status: int, error):
    items = [("command", command), ("domain", cfg.domain.label() if cfg is not None else "unknown"), ("exit_status", status),
             ("stages", " ".join(st.stages) or "none")]
    if st.flatness is not None:
        items.append(("flatness", st.flatness.verdict.value))
    if "regularity" in st.stages:
        reg = open(st.path("regularity.txt"), encoding="utf-8").read()
        verdict = [ln.split(" = ")[1] for ln in reg.splitlines() if ln.startswith("verdict = ")]
        items.append(("regularity", verdict[0] if verdict else "unknown"))
    enforced = [c for c, e in st.checks if e]
    items.append(("checks_enforced", len(enforced)))
    items.append(("checks_failed", " ".join(c.name for c in enforced if not c.passed) or "none"))
    if error:
        items.append(("error", error))
    write_report(st.path("summary.txt"), items)
