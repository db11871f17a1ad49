"""Existence/nonexistence classification for the nonlinear problem.

The decision chain: radius sigma and boundary sum K from the series; if K is
finite, one linear solve (datum f at unit load) and one eigensolve give the
two thresholds

    lambda_exist    = K / sup(v1)      below it a solution is certified,
    lambda_nonexist = K * lambda1(A,f) above it none can exist,

and the load factor is classified against the bracket.  Threshold equality is
never decided by float luck: a small relative band around each threshold is
reported as Indeterminate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from . import series as series_mod
from .elliptic import (
    EllipticProblem,
    GridFunction,
    CoefficientField,
    Grid,
    assemble_operator,
    measure_above,
    solve_linear,
    sup_norm,
)
from .params import Tolerances
from .series import CoefficientSequence, SeriesProfile
from .spectral import principal_eigenpair

VERDICT_EXISTS = "ExistsCertified"
VERDICT_NONEXIST = "NonexistenceProven"
VERDICT_INDETERMINATE = "Indeterminate"
VERDICT_TRIVIAL = "TrivialOnly"
VERDICT_ALL_DATA = "ExistsAllData"

_VERDICT_ORDER = {VERDICT_EXISTS: 0, VERDICT_INDETERMINATE: 1, VERDICT_NONEXIST: 2}


@dataclass(frozen=True, eq=False)
class DiagnosisReport:
    """Thresholds and verdict for one problem at its configured load factor.

    ``lambda1_coarse``/``sup_v1_coarse`` repeat the two computed quantities on
    a half-resolution grid when one exists, so the user can see the
    discretization sensitivity of the bracket.
    """

    series_profile: SeriesProfile
    verdict: str
    lambda_scale: float
    grid_n: int
    tolerances: Tolerances
    sup_v1: float | None = None
    lambda1: float | None = None
    lambda_exist: float | None = None
    lambda_nonexist: float | None = None
    flat_zone_measure: float = 0.0
    detail: str = ""
    sup_v1_coarse: float | None = None
    lambda1_coarse: float | None = None
    v1: GridFunction | None = None


def classify(
    lam: float,
    lambda_exist: float,
    lambda_nonexist: float,
    band: float,
) -> str:
    """Place a load factor against the bracket with a relative guard band.

    Values within ``band`` (relative) of either threshold are Indeterminate;
    in particular a load exactly at a threshold never flips verdict by
    rounding.
    """
    if math.isinf(lambda_exist) and math.isinf(lambda_nonexist):
        return VERDICT_ALL_DATA
    if lam < lambda_exist * (1.0 - band):
        return VERDICT_EXISTS
    if lam > lambda_nonexist * (1.0 + band):
        return VERDICT_NONEXIST
    return VERDICT_INDETERMINATE


def _coarse_problem(problem: EllipticProblem) -> EllipticProblem | None:
    """Half-resolution restriction of the problem by nodal subsampling."""
    g = problem.grid
    if g.nx % 2 or g.nx < 8:
        return None
    if g.dim == 1:
        cg_grid = Grid(dim=1, x0=g.x0, x1=g.x1, nx=g.nx // 2)
        a1 = problem.field.a1[::2]
        f_vals = problem.f.values[::2]
        fld = CoefficientField(
            grid=cg_grid, a1=a1, alpha=problem.field.alpha, beta=problem.field.beta
        )
    else:
        if g.ny % 2 or g.ny < 8:
            return None
        cg_grid = Grid(
            dim=2, x0=g.x0, x1=g.x1, nx=g.nx // 2, y0=g.y0, y1=g.y1, ny=g.ny // 2
        )
        a1 = problem.field.a1[::2, ::2]
        a2 = problem.field.a2[::2, ::2]
        f_vals = problem.f.values[::2, ::2]
        fld = CoefficientField(
            grid=cg_grid,
            a1=a1,
            a2=a2,
            alpha=problem.field.alpha,
            beta=problem.field.beta,
        )
    f_cg = GridFunction(grid=cg_grid, values=f_vals)
    return EllipticProblem(
        grid=cg_grid, field=fld, f=f_cg, lambda_scale=problem.lambda_scale
    )


def _thresholds(problem: EllipticProblem, tols: Tolerances):
    """One linear solve at unit load plus one eigensolve."""
    op = assemble_operator(problem.grid, problem.field)
    v1 = solve_linear(
        op, problem.f, tols.tol_linear, max_iter=tols.max_linear_iter
    )
    sup_v1 = sup_norm(v1)
    pair = principal_eigenpair(
        op,
        problem.f,
        tols.tol_eig,
        inner_tol=min(tols.tol_linear, tols.tol_eig * 1e-2),
        max_iter=tols.max_eig_iter,
        max_linear_iter=tols.max_linear_iter,
    )
    return v1, sup_v1, pair.lambda1


def diagnose(
    seq: CoefficientSequence,
    problem: EllipticProblem,
    tols: Tolerances | None = None,
) -> DiagnosisReport:
    """Full classification of (sequence, problem) at the configured load."""
    tols = tols if tols is not None else Tolerances()
    tols.validate()
    prof = series_mod.profile(
        seq, m_max=tols.m_max, tol=tols.tol_series, ceiling=tols.divergence_ceiling
    )
    lam = problem.lambda_scale
    base = dict(
        series_profile=prof,
        lambda_scale=lam,
        grid_n=problem.grid.nx,
        tolerances=tols,
    )

    if prof.sigma == 0.0:
        # only u = 0 fits under the ceiling sigma; no linear solve is needed
        return DiagnosisReport(
            verdict=VERDICT_TRIVIAL, detail="sigma = 0 forces the zero solution", **base
        )
    if prof.K.is_divergent:
        return DiagnosisReport(
            verdict=VERDICT_ALL_DATA,
            lambda_exist=math.inf,
            lambda_nonexist=math.inf,
            detail=prof.K.detail or "boundary sum divergent",
            **base,
        )
    if not prof.K.is_finite:
        return DiagnosisReport(
            verdict=VERDICT_INDETERMINATE,
            detail=f"boundary sum undecided: {prof.K.detail}",
            **base,
        )

    K = prof.K.value
    v1, sup_v1, lambda1 = _thresholds(problem, tols)
    lambda_exist = K / sup_v1
    lambda_nonexist = K * lambda1
    verdict = classify(lam, lambda_exist, lambda_nonexist, tols.classification_band)
    flat = measure_above(v1.scaled(lam), K)

    sup_c = lam1_c = None
    coarse = _coarse_problem(problem)
    if coarse is not None:
        _, sup_c, lam1_c = _thresholds(coarse, tols)

    return DiagnosisReport(
        verdict=verdict,
        sup_v1=sup_v1,
        lambda1=lambda1,
        lambda_exist=lambda_exist,
        lambda_nonexist=lambda_nonexist,
        flat_zone_measure=flat,
        sup_v1_coarse=sup_c,
        lambda1_coarse=lam1_c,
        v1=v1,
        **base,
    )


@dataclass(frozen=True, eq=False)
class SweepResult:
    rows: tuple[tuple[float, str], ...]
    lambda_exist: float | None
    lambda_nonexist: float | None
    base_report: DiagnosisReport


def lambda_sweep(
    seq: CoefficientSequence,
    problem: EllipticProblem,
    lambda_grid,
    tols: Tolerances | None = None,
) -> SweepResult:
    """Classify each load factor against one shared bracket.

    The auxiliary solution scales linearly with the load, so a single
    diagnosis serves the whole grid.
    """
    lams = [float(x) for x in lambda_grid]
    if any(x <= 0 for x in lams):
        raise ValueError("lambda grid entries must be positive")
    report = diagnose(seq, problem, tols)
    band = report.tolerances.classification_band
    rows = []
    for lam in lams:
        if report.verdict == VERDICT_TRIVIAL:
            rows.append((lam, VERDICT_TRIVIAL))
        elif report.verdict == VERDICT_ALL_DATA:
            rows.append((lam, VERDICT_ALL_DATA))
        elif report.lambda_exist is None:
            rows.append((lam, VERDICT_INDETERMINATE))
        else:
            rows.append(
                (lam, classify(lam, report.lambda_exist, report.lambda_nonexist, band))
            )
    return SweepResult(
        rows=tuple(rows),
        lambda_exist=report.lambda_exist,
        lambda_nonexist=report.lambda_nonexist,
        base_report=report,
    )


def verdict_rank(verdict: str) -> int:
    """Order of the three bracket verdicts along increasing load."""
    return _VERDICT_ORDER[verdict]


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------


def _json_value(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def report_to_dict(report: DiagnosisReport) -> dict:
    """Flat dict with a fixed key set and order, ready for JSON."""
    prof = report.series_profile
    t = report.tolerances
    return {
        "sigma": _json_value(prof.sigma),
        "sigma_method": prof.sigma_method,
        "K_status": prof.K.status,
        "K_value": _json_value(prof.K.value),
        "K_tail_bound": _json_value(prof.K.tail_bound),
        "sup_v1": _json_value(report.sup_v1),
        "lambda1": _json_value(report.lambda1),
        "lambda_exist": _json_value(report.lambda_exist),
        "lambda_nonexist": _json_value(report.lambda_nonexist),
        "verdict": report.verdict,
        "flat_zone_measure": _json_value(report.flat_zone_measure),
        "grid_n": report.grid_n,
        "tol_linear": t.tol_linear,
        "tol_eig": t.tol_eig,
        "tol_series": t.tol_series,
    }


def report_to_json(report: DiagnosisReport, comment: str | None = None) -> str:
    body = json.dumps(report_to_dict(report), indent=2)
    if comment is None:
        return body + "\n"
    return f"# {comment}\n{body}\n"
