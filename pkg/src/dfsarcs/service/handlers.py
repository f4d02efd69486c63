"""Request handlers: the one place where schemas meet the computation core.

The CLI calls these through the in-process ASGI app and remote clients
through uvicorn, so every result is produced exactly once, here.  Family
tables are cached per (family, reduce) for the life of the process; a
long-running service therefore answers repeat queries from warm tables.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from fractions import Fraction

from .. import enumeration, forest, simulator
from ..algebra import format_rational, parse_rational
from ..model import ModelParams
from ..recursions import Family, FamilyTable, verify_extended, verify_knuth
from . import models

logger = logging.getLogger("dfsarcs.service")

_tables: dict[tuple[Family, bool], FamilyTable] = {}
_tables_lock = threading.Lock()


def get_table(family: Family, *, reduce_entries: bool = False, workers: int = 1) -> FamilyTable:
    key = (family, reduce_entries)
    with _tables_lock:
        table = _tables.get(key)
        if table is None:
            table = FamilyTable(family, reduce_entries=reduce_entries)
            _tables[key] = table
    table.workers = workers
    return table


def reset_tables() -> None:
    """Drop all cached tables (used by tests)."""
    with _tables_lock:
        _tables.clear()


def handle_verify(req: models.VerifyRequest) -> models.VerifyResponse:
    gx = get_table(Family.MERGED_FB, reduce_entries=req.reduce, workers=req.workers)
    gy = get_table(Family.MERGED_BF, reduce_entries=req.reduce, workers=req.workers)
    results = []
    all_equal = True
    for n in range(1, req.n_max + 1):
        started = time.perf_counter()
        if req.mode == "knuth":
            equal = verify_knuth(n, gx, gy)
        else:
            equal = verify_extended(n, gx, gy)
        elapsed = time.perf_counter() - started
        fx, fy = gx.entry(n), gy.entry(n)
        terms = max(fx.num.term_count, fy.num.term_count)
        factors = max(fx.factor_count, fy.factor_count)
        logger.info(
            "verify mode=%s n=%d equal=%s wall=%.3fs terms=%d factors=%d",
            req.mode, n, equal, elapsed, terms, factors,
        )
        results.append(
            models.VerifyEntry(
                n=n, equal=equal, numerator_terms=terms, denominator_factors=factors
            )
        )
        all_equal = all_equal and equal
    return models.VerifyResponse(
        mode=req.mode, n_max=req.n_max, results=results, all_equal=all_equal
    )


def handle_cross_check(req: models.CrossCheckRequest) -> models.CrossCheckResponse:
    full_n_max = req.full_family_n_max if req.full_family_n_max is not None else min(req.n_max, 8)
    full = get_table(Family.FULL, workers=req.workers)
    gx = get_table(Family.MERGED_FB, workers=req.workers)
    gy = get_table(Family.MERGED_BF, workers=req.workers)
    gy_alt = get_table(Family.MERGED_BF_ALT, workers=req.workers)
    checks: list[models.CrossCheckItem] = []

    for n in range(1, req.n_max + 1):
        checks.append(
            models.CrossCheckItem(
                name="back_first_recursions_agree",
                n=n,
                passed=gy.entry(n) == gy_alt.entry(n),
            )
        )
    for n in range(1, full_n_max + 1):
        f = full.entry(n)
        checks.append(
            models.CrossCheckItem(
                name="forward_tracking_specializes_full",
                n=n,
                passed=gx.entry(n) == f.identify("y", "z"),
            )
        )
        checks.append(
            models.CrossCheckItem(
                name="back_tracking_specializes_full",
                n=n,
                passed=gy.entry(n) == f.map_variables({"x": "z", "y": "x"}),
            )
        )
    if full_n_max >= 3 or req.n_max >= 3:
        f3 = full.entry(3)
        swapped = f3.map_variables({"x": "y", "y": "x"})
        checks.append(
            models.CrossCheckItem(
                name="forward_back_swap_detected_unequal",
                n=3,
                passed=not (f3 == swapped),
            )
        )
    all_passed = all(c.passed for c in checks)
    return models.CrossCheckResponse(
        n_max=req.n_max,
        full_family_n_max=full_n_max,
        checks=checks,
        all_passed=all_passed,
    )


def _parse_p(text: str) -> Fraction:
    p = parse_rational(text)
    if not (0 < p < 1):
        raise ValueError(f"p must lie strictly between 0 and 1, got {text!r}")
    return p


def handle_distribution(req: models.DistributionRequest) -> models.DistributionResponse:
    params = ModelParams(req.n, _parse_p(req.p))
    pgf = forest.pgf_arc_count(params, req.role)
    table = forest.dist_coeffs(pgf, req.kmax)
    means = {role: forest.mean_arc_count(params, role) for role in ("F", "B", "T", "C")}
    fb = means["F"] == means["B"]
    tc = means["T"] == means["C"]
    coeffs = [
        models.DistCoeff(k=k, prob=format_rational(prob))
        for k, prob in enumerate(table.probabilities)
    ]
    return models.DistributionResponse(
        n=req.n,
        p=format_rational(params.p),
        role=req.role,
        coeffs=coeffs,
        tail=format_rational(table.tail),
        means=models.MeansBlock(
            F=format_rational(means["F"]),
            B=format_rational(means["B"]),
            T=format_rational(means["T"]),
            C=format_rational(means["C"]),
            forward_equals_back=fb,
            tree_equals_cross=tc,
        ),
        ok=fb and tc,
    )


def handle_simulate(req: models.SimulateRequest) -> models.SimulateResponse:
    params = ModelParams(req.n, _parse_p(req.p))
    summary = simulator.run_trials(params, req.trials, req.seed, req.projection)
    histogram = [
        models.HistogramRow(key=list(k), count=c)
        for k, c in sorted(summary.counts.items())
    ]

    gof_block = None
    ok = True
    single_role = len(req.projection) == 1 and req.projection[0] in forest.ROLES
    if single_role and req.trials >= 100:
        exact_p = _parse_p(req.exact_p) if req.exact_p else params.p
        exact_params = ModelParams(req.n, exact_p)
        exact = forest.dist_coeffs(
            forest.pgf_arc_count(exact_params, req.projection[0]), req.kmax
        )
        fit = simulator.compare_empirical(summary, exact, req.significance)
        gof_block = models.GofBlock(
            statistic=fit.statistic,
            dof=fit.dof,
            threshold=fit.threshold,
            significance=fit.significance,
            tv_distance=fit.tv_distance,
            cells=fit.cells,
            passed=fit.passed,
        )
        ok = ok and fit.passed

    mean_block = None
    if req.trials >= 100:
        mean_f = summary.mean("F")
        mean_b = summary.mean("B")
        se = math.sqrt((summary.variance("F") + summary.variance("B")) / req.trials)
        within = abs(mean_f - mean_b) <= 3 * se if se > 0 else mean_f == mean_b
        mean_block = models.MeanComparison(
            mean_f=mean_f, mean_b=mean_b, combined_se=se, within_three_se=within
        )
        ok = ok and within

    trial_block = None
    if req.trials == 1:
        rng = simulator.trial_rng(req.seed, 0)
        g = simulator.gen_digraph(params, rng)
        result = simulator.dfs_classify(g)
        trial_block = models.TrialDump(
            arcs=[list(a) for a in g.arcs],
            tally=list(result.tally),
            tree_sizes=list(result.tree_sizes),
            discovery_order=list(result.discovery_order),
            arc_events=[[str(u), str(v), kind] for u, v, kind in result.arc_events],
        )

    return models.SimulateResponse(
        n=req.n,
        p=format_rational(params.p),
        trials=req.trials,
        seed=req.seed,
        projection=list(req.projection),
        histogram=histogram,
        gof=gof_block,
        mean_check=mean_block,
        trial=trial_block,
        ok=ok,
    )


def _counter_rows(counter: enumeration.InstanceCounter) -> list[models.CounterRow]:
    return [models.CounterRow(**row) for row in counter.to_json()]


def _mismatch_block(m: enumeration.SeriesMismatch | None) -> models.MismatchBlock | None:
    if m is None:
        return None
    return models.MismatchBlock(
        tally=list(m.tally),
        series_coefficient=format_rational(m.series_coefficient),
        instance_count=m.instance_count,
    )


def handle_oracle(req: models.OracleRequest) -> models.OracleResponse:
    bound = req.bound if req.bound is not None else req.max_arcs
    tree_counter = enumeration.enumerate_tree_instances(req.n, req.max_arcs)
    full = get_table(Family.FULL)
    tree_ok, tree_mis = enumeration.compare_series(tree_counter, full.entry(req.n), bound)

    forest_ok = None
    forest_mis = None
    forest_rows = None
    if req.include_forest:
        forest_counter = enumeration.enumerate_forest_instances(req.n, req.max_arcs)
        strata = forest.ForestTable(full).strata(req.n)
        forest_ok, forest_mis = enumeration.compare_series(forest_counter, strata, bound)
        forest_rows = _counter_rows(forest_counter)

    ok = tree_ok and (forest_ok is not False)
    return models.OracleResponse(
        n=req.n,
        max_arcs=req.max_arcs,
        bound=bound,
        tree_match=tree_ok,
        tree_mismatch=_mismatch_block(tree_mis),
        forest_match=forest_ok,
        forest_mismatch=_mismatch_block(forest_mis),
        tree_counts=_counter_rows(tree_counter),
        forest_counts=forest_rows,
        ok=ok,
    )
