"""Contracts shared by all kernels: instances, value functions, kernel
outputs, strictness checks and ratio reports.

Ratios are computed with exact rationals wherever both sides are finite so
that boundary cases (a ratio exactly equal to alpha) never flip because of
floating point noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Optional

from .graph import MinorTranscript

INF = math.inf
Number = int | float | Fraction


class AccuracyError(ValueError):
    pass


class EnumerationBudgetExceeded(RuntimeError):
    """Raised when exhaustive enumeration would exceed its budget."""


@dataclass(frozen=True)
class ParameterizedInstance:
    payload: Any
    k: int

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("parameter must be nonnegative")


@dataclass
class KernelOutput:
    reduced: ParameterizedInstance
    lifter: Callable[[Any], Any]
    alpha: Fraction
    strict: bool
    size_bound: Optional[int] = None
    transcript: Optional[MinorTranscript] = None
    info: dict = field(default_factory=dict)

    def lift(self, solution: Any) -> Any:
        return self.lifter(solution)


@dataclass(frozen=True)
class Problem:
    """Everything the harness needs to run and audit one problem.

    ``value(payload, k, solution)`` returns an int, a Fraction, or a signed
    infinity for infeasible candidates.  ``oracle(payload, k)`` returns the
    exact optimum and a witness.  ``kernelize(payload, k, accuracy)`` returns
    a ``KernelOutput``.  ``accuracy_kind`` is ``"alpha"`` or ``"eps"``.
    """

    name: str
    orientation: str
    value: Callable[[Any, int, Any], Number]
    oracle: Callable[[Any, int], tuple[Number, Any]]
    kernelize: Callable[[Any, int, float], KernelOutput]
    size: Callable[[Any], int]
    accuracy_kind: str
    solutions: Optional[Callable[[Any, int], Iterable[Any]]] = None

    def __post_init__(self) -> None:
        if self.orientation not in ("min", "max"):
            raise ValueError("orientation must be 'min' or 'max'")
        if self.accuracy_kind not in ("alpha", "eps"):
            raise ValueError("accuracy_kind must be 'alpha' or 'eps'")


def exact(x: Number) -> Fraction | float:
    """Convert to Fraction, leaving infinities alone.

    Floats go through their shortest repr so that ``1.5`` becomes ``3/2``
    rather than its binary expansion.
    """
    if isinstance(x, float):
        if math.isinf(x):
            return x
        return Fraction(repr(x))
    return Fraction(x)


def alpha_from_accuracy(orientation: str, kind: str, accuracy: Number) -> Fraction:
    """Declared ratio alpha >= 1 for a given accuracy knob.

    Minimisation schemes use alpha = 1 + eps; maximisation schemes promise a
    (1 - eps) fraction, i.e. alpha = 1 / (1 - eps).
    """
    acc = exact(accuracy)
    if kind == "alpha":
        if acc < 1:
            raise AccuracyError(f"alpha must be >= 1, got {accuracy}")
        return acc
    if not 0 < acc <= 1 or (orientation == "max" and acc >= 1):
        raise AccuracyError(f"eps out of range: {accuracy}")
    return 1 + acc if orientation == "min" else 1 / (1 - acc)


def quotient(orientation: str, value: Number, opt: Number) -> Fraction | float:
    """value / OPT with the conventions needed at the boundaries.

    Infeasible candidates give +inf (minimisation) or 0 (maximisation).
    When OPT is 0 the only feasible value is 0 and the quotient is 1.
    """
    if orientation == "min":
        if value == INF:
            return INF
        if opt == 0:
            return Fraction(1) if value == 0 else INF
        return exact(value) / exact(opt)
    if value == -INF:
        return Fraction(0)
    if opt == 0:
        return Fraction(1)
    return exact(value) / exact(opt)


def _divide(a: Fraction | float, b: Fraction | float) -> Fraction | float:
    if b == 0:
        return INF if a > 0 else Fraction(1)
    if math.isinf(a) and math.isinf(b):
        return Fraction(1)
    if math.isinf(b):
        return Fraction(0)
    if math.isinf(a):
        return INF
    return a / b


def achieved_ratio(orientation: str, lifted_q, kernel_q) -> Fraction | float:
    """Degradation factor introduced by lifting.

    Minimisation: (lifted ratio) / (kernel ratio), compared against alpha.
    Maximisation: (lifted ratio) / (kernel ratio), compared against 1/alpha.
    """
    return _divide(lifted_q, kernel_q)


def ratio_ok(orientation: str, lifted_q, kernel_q, alpha: Fraction) -> bool:
    if orientation == "min":
        return kernel_q == INF or lifted_q <= alpha * kernel_q
    return lifted_q * alpha >= kernel_q


def strict_ok(orientation: str, lifted_q, kernel_q, alpha: Fraction) -> bool:
    if orientation == "min":
        return lifted_q <= max(kernel_q, alpha)
    return lifted_q >= min(kernel_q, 1 / alpha)


def run_kernel(problem: Problem, instance: ParameterizedInstance, accuracy: Number) -> KernelOutput:
    alpha_from_accuracy(problem.orientation, problem.accuracy_kind, accuracy)
    return problem.kernelize(instance.payload, instance.k, accuracy)


def check_strictness(
    problem: Problem,
    instance: ParameterizedInstance,
    kernel: KernelOutput,
    all_kernel_solutions: Optional[Iterable[Any]] = None,
    budget: int = 1 << 16,
    opt: Number | None = None,
    opt_reduced: Number | None = None,
) -> bool:
    """True iff every enumerated reduced solution lifts strictly.

    ``opt`` and ``opt_reduced`` may be passed in to avoid recomputing them.
    """
    red = kernel.reduced
    if opt is None:
        opt = problem.oracle(instance.payload, instance.k)[0]
    if opt_reduced is None:
        opt_reduced = problem.oracle(red.payload, red.k)[0]
    if all_kernel_solutions is None:
        if problem.solutions is None:
            raise ValueError(f"{problem.name} has no solution enumerator")
        all_kernel_solutions = problem.solutions(red.payload, red.k)
    for count, sol in enumerate(all_kernel_solutions, 1):
        if count > budget:
            raise EnumerationBudgetExceeded(f"more than {budget} reduced solutions")
        kq = quotient(problem.orientation, problem.value(red.payload, red.k, sol), opt_reduced)
        lifted = kernel.lift(sol)
        lq = quotient(problem.orientation, problem.value(instance.payload, instance.k, lifted), opt)
        if not strict_ok(problem.orientation, lq, kq, kernel.alpha):
            return False
    return True


CSV_COLUMNS = (
    "instance",
    "problem",
    "accuracy",
    "n",
    "k",
    "n_reduced",
    "k_reduced",
    "opt",
    "opt_reduced",
    "val_kernel_sol",
    "val_lifted",
    "ratio",
    "strict_ok",
)


def _fmt(x: Any) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{float(x):.6f}"
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.6f}"
    return str(x)


@dataclass
class RatioReport:
    instance: str
    problem: str
    accuracy: Number
    n: int
    k: int
    n_reduced: int
    k_reduced: int
    opt: Number | None
    opt_reduced: Number | None
    val_kernel_sol: Number | None
    val_lifted: Number | None
    ratio: Fraction | float | None
    strict_ok: bool | None
    ok: bool | None = None

    @property
    def verified(self) -> bool:
        return self.opt is not None and self.opt_reduced is not None

    def csv_row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]


def verify_ratio(
    problem: Problem,
    instance: ParameterizedInstance,
    kernel: KernelOutput,
    kernel_solution: Any,
    instance_id: str = "",
    accuracy: Number | None = None,
    opt: Number | None = None,
    opt_reduced: Number | None = None,
) -> RatioReport:
    red = kernel.reduced
    if opt is None:
        opt = problem.oracle(instance.payload, instance.k)[0]
    if opt_reduced is None:
        opt_reduced = problem.oracle(red.payload, red.k)[0]
    val_kernel = problem.value(red.payload, red.k, kernel_solution)
    lifted = kernel.lift(kernel_solution)
    val_lifted = problem.value(instance.payload, instance.k, lifted)
    kq = quotient(problem.orientation, val_kernel, opt_reduced)
    lq = quotient(problem.orientation, val_lifted, opt)
    return RatioReport(
        instance=instance_id,
        problem=problem.name,
        accuracy=accuracy if accuracy is not None else kernel.alpha,
        n=problem.size(instance.payload),
        k=instance.k,
        n_reduced=problem.size(red.payload),
        k_reduced=red.k,
        opt=opt,
        opt_reduced=opt_reduced,
        val_kernel_sol=val_kernel,
        val_lifted=val_lifted,
        ratio=achieved_ratio(problem.orientation, lq, kq),
        strict_ok=strict_ok(problem.orientation, lq, kq, kernel.alpha),
        ok=ratio_ok(problem.orientation, lq, kq, kernel.alpha),
    )


def identity_kernel(instance: ParameterizedInstance) -> KernelOutput:
    """Test double: returns the instance unchanged with alpha = 1."""
    return KernelOutput(instance, lambda s: s, Fraction(1), True, None)
