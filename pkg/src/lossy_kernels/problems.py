"""Registry tying each problem's value function, oracle and kernel together."""

from __future__ import annotations

from itertools import combinations

from . import cvc, cycles, factors, ola, oracles, pvc, steiner
from .framework import Problem


def _pvc_solutions(g, k):
    verts = sorted(g.vertices)
    for r in range(min(k, len(verts)) + 1):
        for s in combinations(verts, r):
            yield frozenset(s)


CVC = Problem(
    name="cvc",
    orientation="min",
    value=cvc.cvc_value,
    oracle=oracles.exact_cvc,
    kernelize=cvc.cvc_kernelize,
    size=len,
    accuracy_kind="alpha",
    solutions=lambda g, k: oracles.enumerate_cvcs(g),
)

DF = Problem(
    name="df",
    orientation="max",
    value=factors.df_value,
    oracle=lambda text, k: oracles.exact_df(text),
    kernelize=factors.df_kernelize,
    size=len,
    accuracy_kind="eps",
)

CP = Problem(
    name="cp",
    orientation="max",
    value=cycles.cp_value,
    oracle=oracles.exact_cp,
    kernelize=cycles.cp_kernelize,
    size=len,
    accuracy_kind="eps",
)

PVC = Problem(
    name="pvc",
    orientation="max",
    value=pvc.pvc_value,
    oracle=oracles.exact_pvc,
    kernelize=pvc.pvc_kernelize,
    size=len,
    accuracy_kind="alpha",
    solutions=_pvc_solutions,
)

STEINER = Problem(
    name="steiner",
    orientation="min",
    value=steiner.st_value,
    oracle=lambda inst, k: steiner.dreyfus_wagner(inst.graph, inst.terminals),
    kernelize=steiner.steiner_kernelize,
    size=lambda inst: len(inst.graph),
    accuracy_kind="eps",
)

OLA = Problem(
    name="ola",
    orientation="min",
    value=ola.ola_value,
    oracle=lambda inst, k: oracles.exact_ola(inst.graph),
    kernelize=lambda inst, k, eps: ola.ola_kernelize(inst.graph, inst.cover, k, eps),
    size=lambda inst: len(inst.graph),
    accuracy_kind="eps",
)

PROBLEMS: dict[str, Problem] = {p.name: p for p in (CVC, DF, CP, PVC, STEINER, OLA)}


def get(name: str) -> Problem:
    try:
        return PROBLEMS[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; choose from {', '.join(PROBLEMS)}") from None
