"""Counting experiment: how often do sequence-filled fuzzy chains turn out ergodic?

For each chain size n, a stream of low-discrepancy points is cut into
transition matrices, each matrix is iterated to its power cycle, and the
classification counts are tallied per (generator, size) cell.  Everything is
deterministic for a fixed configuration, including across worker counts.
"""

from __future__ import annotations

import json
import statistics
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .fuzzymc import Classification, CycleNotFoundError, analyze_powers, default_max_steps
from .qrseq import GeneratorSpec, point_block

__all__ = [
    "CellResult",
    "CountRule",
    "DEFAULT_SIZES",
    "DEFAULT_TRIALS",
    "ExperimentConfig",
    "ExperimentReport",
    "FillMode",
    "FillStrategy",
    "build_matrix",
    "emit_report",
    "generator_spec_for",
    "parse_report_json",
    "run_experiment",
    "trend_violations",
    "warn_on_trend_violations",
]

DEFAULT_SIZES = (5, 50, 100, 1000)
DEFAULT_TRIALS = 1000

GENERATOR_KINDS = ("faure", "torus", "kronecker")

REPORT_COLUMNS = (
    "generator",
    "size",
    "trials",
    "strong",
    "weak",
    "periodic",
    "not_found",
    "headline",
    "tau_min",
    "tau_median",
    "tau_max",
)


class FillMode(str, Enum):
    # one d = n dimensional point per matrix row
    PER_ROW_POINT = "per-row-point"
    # a d-dimensional stream read coordinate by coordinate, row-major
    FLATTEN_STREAM = "flatten-stream"


@dataclass(frozen=True)
class FillStrategy:
    """How sequence coordinates map onto matrix entries.

    per-row-point: row i of trial t is point index skip + t*n + i of an
    n-dimensional generator.  flatten-stream: entry (i, j) of trial t is
    stream position skip + t*n^2 + i*n + j of a stream_dim-dimensional
    generator read coordinate by coordinate.
    """

    mode: FillMode = FillMode.PER_ROW_POINT
    stream_dim: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", FillMode(self.mode))
        if self.stream_dim < 1:
            raise ValueError("stream_dim must be >= 1")


class CountRule(str, Enum):
    STRONG_PLUS_WEAK = "strong-plus-weak"
    STRONG_ONLY = "strong-only"


@dataclass(frozen=True)
class ExperimentConfig:
    sizes: tuple[int, ...] = DEFAULT_SIZES
    trials: int = DEFAULT_TRIALS
    generator: str = "torus"
    fill: FillStrategy = FillStrategy()
    skip: int | None = None  # None: generator default (faure base / 0)
    max_steps: int | None = None  # None: max(1000, 4n) per size
    count_rule: CountRule = CountRule.STRONG_PLUS_WEAK

    def __post_init__(self) -> None:
        sizes = tuple(int(n) for n in self.sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ValueError("sizes must be non-empty and all >= 1")
        object.__setattr__(self, "sizes", sizes)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.generator not in GENERATOR_KINDS:
            raise ValueError(
                f"generator must be one of {GENERATOR_KINDS}, got {self.generator!r}"
            )
        object.__setattr__(self, "count_rule", CountRule(self.count_rule))
        if self.skip is not None and self.skip < 0:
            raise ValueError("skip must be >= 0")
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


def generator_spec_for(kind: str, n: int, fill: FillStrategy, skip: int | None = None) -> GeneratorSpec:
    """Concrete generator spec for one experiment cell."""
    dim = n if fill.mode is FillMode.PER_ROW_POINT else fill.stream_dim
    if kind == "faure":
        return GeneratorSpec.faure(dim, skip=skip)
    if kind == "torus":
        return GeneratorSpec.torus(dim, skip=skip)
    if kind == "kronecker":
        # default Kronecker multipliers follow the torus choice
        return GeneratorSpec.torus(dim, skip=skip)
    raise ValueError(f"unknown generator kind {kind!r}")


def build_matrix(
    gen: GeneratorSpec | Callable[[int, int], np.ndarray],
    n: int,
    trial: int,
    fill: FillStrategy = FillStrategy(),
    skip: int | None = None,
) -> np.ndarray:
    """Transition matrix for one trial, cut from the generator stream.

    `gen` is a GeneratorSpec, or any callable (start, count) -> (count, dim)
    array, which test stubs use.  `skip` overrides the spec's burn-in.
    """
    if n < 1 or trial < 0:
        raise ValueError("need n >= 1 and trial >= 0")
    if isinstance(gen, GeneratorSpec):
        if skip is None:
            skip = gen.skip or 0
        dim = gen.dim
        source = lambda start, count: point_block(gen, start, count)
    else:
        if skip is None:
            skip = 0
        dim = n if fill.mode is FillMode.PER_ROW_POINT else fill.stream_dim
        source = gen

    if fill.mode is FillMode.PER_ROW_POINT:
        if dim != n:
            raise ValueError(f"per-row-point needs an n-dimensional generator (n={n}, dim={dim})")
        return source(skip + trial * n, n)

    first = skip + trial * n * n
    offset = first % dim
    npoints = -(-(offset + n * n) // dim)  # ceil
    flat = source(first // dim, npoints).ravel()
    return flat[offset : offset + n * n].reshape(n, n)


@dataclass
class CellResult:
    """Classification tallies for one (generator, size) cell."""

    generator: str
    size: int
    trials: int
    strong: int
    weak: int
    periodic: int
    not_found: int
    headline: int
    tau_min: int | None
    tau_median: float | None
    tau_max: int | None
    seconds: float

    def counts_total(self) -> int:
        return self.strong + self.weak + self.periodic + self.not_found


@dataclass
class ExperimentReport:
    generator: str
    trials: int
    count_rule: CountRule
    fill: FillStrategy
    skip: int | None
    max_steps: int | None
    cells: list[CellResult] = field(default_factory=list)


def _headline(strong: int, weak: int, rule: CountRule) -> int:
    return strong if rule is CountRule.STRONG_ONLY else strong + weak


def _run_trial(args) -> tuple[int, str, int | None]:
    kind, n, trial, mode, stream_dim, skip, max_steps = args
    fill = FillStrategy(mode=mode, stream_dim=stream_dim)
    spec = generator_spec_for(kind, n, fill, skip=skip)
    matrix = build_matrix(spec, n, trial, fill)
    try:
        res = analyze_powers(matrix, max_steps=max_steps)
    except CycleNotFoundError:
        return trial, "not_found", None
    return trial, res.classification.value, res.tau


def run_experiment(
    config: ExperimentConfig,
    workers: int = 1,
    matrix_source: Callable[[int, int], np.ndarray] | None = None,
) -> ExperimentReport:
    """Run the counting experiment for one generator across all sizes.

    Trials are independent, so any worker count gives the same report
    (timings aside); aggregation sorts by trial index before counting.
    `matrix_source` (n, trial) -> matrix bypasses the generators for tests
    and forces the sequential path.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    report = ExperimentReport(
        generator=config.generator,
        trials=config.trials,
        count_rule=config.count_rule,
        fill=config.fill,
        skip=config.skip,
        max_steps=config.max_steps,
    )
    for n in config.sizes:
        max_steps = config.max_steps or default_max_steps(n)
        t0 = time.perf_counter()
        if matrix_source is not None:
            records = []
            for trial in range(config.trials):
                try:
                    res = analyze_powers(matrix_source(n, trial), max_steps=max_steps)
                    records.append((trial, res.classification.value, res.tau))
                except CycleNotFoundError:
                    records.append((trial, "not_found", None))
        else:
            tasks = [
                (config.generator, n, trial, config.fill.mode.value,
                 config.fill.stream_dim, config.skip, max_steps)
                for trial in range(config.trials)
            ]
            if workers == 1:
                records = [_run_trial(t) for t in tasks]
            else:
                chunk = max(1, config.trials // (workers * 4))
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    records = list(pool.map(_run_trial, tasks, chunksize=chunk))
        records.sort(key=lambda r: r[0])
        seconds = time.perf_counter() - t0

        tally = {c.value: 0 for c in Classification}
        tally["not_found"] = 0
        taus = []
        for _, outcome, tau in records:
            tally[outcome] += 1
            if tau is not None:
                taus.append(tau)
        strong = tally[Classification.STRONG_ERGODIC.value]
        weak = tally[Classification.WEAK_ERGODIC.value]
        report.cells.append(
            CellResult(
                generator=config.generator,
                size=n,
                trials=config.trials,
                strong=strong,
                weak=weak,
                periodic=tally[Classification.PERIODIC.value],
                not_found=tally["not_found"],
                headline=_headline(strong, weak, config.count_rule),
                tau_min=min(taus) if taus else None,
                tau_median=float(statistics.median(taus)) if taus else None,
                tau_max=max(taus) if taus else None,
                seconds=seconds,
            )
        )
    return report


def trend_violations(reports: Sequence[ExperimentReport]) -> list[str]:
    """Sizes where a Kronecker/Torus headline falls below the Faure one.

    The comparison is advisory: whether it holds depends on protocol choices
    the fill strategy leaves open, so violations are reported, not fatal.
    """
    faure = {c.size: c.headline for r in reports if r.generator == "faure" for c in r.cells}
    msgs = []
    for rep in reports:
        if rep.generator == "faure":
            continue
        for cell in rep.cells:
            ref = faure.get(cell.size)
            if ref is not None and cell.headline < ref:
                msgs.append(
                    f"size {cell.size}: {rep.generator} headline {cell.headline} "
                    f"< faure headline {ref}"
                )
    return msgs


def warn_on_trend_violations(reports: Sequence[ExperimentReport]) -> list[str]:
    msgs = trend_violations(reports)
    for m in msgs:
        warnings.warn("ergodic-count ordering violated: " + m, stacklevel=2)
    return msgs


def _cell_row(cell: CellResult, include_timing: bool) -> list[str]:
    row = [
        cell.generator,
        str(cell.size),
        str(cell.trials),
        str(cell.strong),
        str(cell.weak),
        str(cell.periodic),
        str(cell.not_found),
        str(cell.headline),
        "" if cell.tau_min is None else str(cell.tau_min),
        "" if cell.tau_median is None else format(cell.tau_median, ".17g"),
        "" if cell.tau_max is None else str(cell.tau_max),
    ]
    if include_timing:
        row.append(format(cell.seconds, ".3f"))
    return row


def emit_report(report: ExperimentReport, fmt: str = "csv", include_timing: bool = True) -> str:
    """Render a report as csv, json, or a markdown table.

    The markdown form mirrors the two-column Size / ergodic-count layout;
    csv and json carry the full class breakdown.  include_timing=False drops
    the wall-clock column so reports from different runs compare byte for
    byte.
    """
    if fmt == "csv":
        cols = REPORT_COLUMNS + (("seconds",) if include_timing else ())
        lines = [",".join(cols)]
        lines += [",".join(_cell_row(c, include_timing)) for c in report.cells]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        payload = {
            "generator": report.generator,
            "trials": report.trials,
            "count_rule": report.count_rule.value,
            "fill": {"mode": report.fill.mode.value, "stream_dim": report.fill.stream_dim},
            "skip": report.skip,
            "max_steps": report.max_steps,
            "cells": [
                {
                    "generator": c.generator,
                    "size": c.size,
                    "trials": c.trials,
                    "strong": c.strong,
                    "weak": c.weak,
                    "periodic": c.periodic,
                    "not_found": c.not_found,
                    "headline": c.headline,
                    "tau_min": c.tau_min,
                    "tau_median": c.tau_median,
                    "tau_max": c.tau_max,
                    **({"seconds": c.seconds} if include_timing else {}),
                }
                for c in report.cells
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if fmt == "markdown":
        lines = [
            "| Size | Number of ergodic fuzzy Markov chains |",
            "| --- | --- |",
        ]
        lines += [f"| n={c.size} | {c.headline} |" for c in report.cells]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report_json(text: str) -> ExperimentReport:
    """Inverse of emit_report(fmt="json")."""
    payload = json.loads(text)
    report = ExperimentReport(
        generator=payload["generator"],
        trials=payload["trials"],
        count_rule=CountRule(payload["count_rule"]),
        fill=FillStrategy(mode=payload["fill"]["mode"], stream_dim=payload["fill"]["stream_dim"]),
        skip=payload["skip"],
        max_steps=payload["max_steps"],
    )
    for c in payload["cells"]:
        report.cells.append(
            CellResult(
                generator=c["generator"],
                size=c["size"],
                trials=c["trials"],
                strong=c["strong"],
                weak=c["weak"],
                periodic=c["periodic"],
                not_found=c["not_found"],
                headline=c["headline"],
                tau_min=c["tau_min"],
                tau_median=c["tau_median"],
                tau_max=c["tau_max"],
                seconds=c.get("seconds", 0.0),
            )
        )
    return report
