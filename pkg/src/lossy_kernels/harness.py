"""Experiment runner: kernelize a corpus at several accuracies and audit ratios.

Each (instance, accuracy) cell is independent.  With LOSSY_KERNELS_THREADS
set above 1 the cells run in a process pool; rows are always returned in
(instance id, accuracy) order, so output does not depend on scheduling.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Sequence, TextIO

from .framework import CSV_COLUMNS, ParameterizedInstance, RatioReport, verify_ratio
from .oracles import OracleRefusal
from .problems import get

THREADS_ENV = "LOSSY_KERNELS_THREADS"


@dataclass(frozen=True)
class Cell:
    problem: str
    instance_id: str
    instance: ParameterizedInstance
    accuracy: float
    verify: bool


def run_cell(cell: Cell) -> RatioReport:
    problem = get(cell.problem)
    inst = cell.instance
    kernel = problem.kernelize(inst.payload, inst.k, cell.accuracy)
    red = kernel.reduced
    blank = RatioReport(
        instance=cell.instance_id,
        problem=problem.name,
        accuracy=cell.accuracy,
        n=problem.size(inst.payload),
        k=inst.k,
        n_reduced=problem.size(red.payload),
        k_reduced=red.k,
        opt=None,
        opt_reduced=None,
        val_kernel_sol=None,
        val_lifted=None,
        ratio=None,
        strict_ok=None,
    )
    if not cell.verify:
        return blank
    try:
        opt = problem.oracle(inst.payload, inst.k)[0]
        opt_red, solution = problem.oracle(red.payload, red.k)
    except OracleRefusal:
        return blank
    return verify_ratio(problem, inst, kernel, solution, cell.instance_id, cell.accuracy, opt, opt_red)


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def run_experiment(
    corpus: Iterable[tuple[str, ParameterizedInstance]],
    problem: str,
    accuracies: Sequence[float],
    verify: bool = True,
    threads: int | None = None,
) -> list[RatioReport]:
    cells = [
        Cell(problem, iid, inst, acc, verify)
        for iid, inst in sorted(corpus, key=lambda item: item[0])
        for acc in sorted(accuracies)
    ]
    threads = thread_count() if threads is None else threads
    if threads > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(run_cell, cells))
    return [run_cell(c) for c in cells]


def write_csv(rows: Iterable[RatioReport], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_row())


def to_csv(rows: Iterable[RatioReport]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def violations(rows: Iterable[RatioReport]) -> list[RatioReport]:
    return [r for r in rows if r.ok is False]


def summarize(table: Iterable[dict[str, Any]]) -> list[dict[str, Any]]:
    """Aggregate CSV rows per (problem, accuracy)."""
    groups: dict[tuple[str, str], list[dict[str, Any]]] = {}
    for row in table:
        groups.setdefault((row["problem"], row["accuracy"]), []).append(row)
    out = []
    for (prob, acc), rows in sorted(groups.items()):
        ratios = [float(r["ratio"]) for r in rows if r["ratio"] not in ("", None)]
        out.append(
            {
                "problem": prob,
                "accuracy": acc,
                "rows": len(rows),
                "verified": len(ratios),
                "max_n_reduced": max(int(r["n_reduced"]) for r in rows),
                "min_ratio": min(ratios) if ratios else None,
                "max_ratio": max(ratios) if ratios else None,
                "strict_failures": sum(r["strict_ok"] == "0" for r in rows),
            }
        )
    return out
