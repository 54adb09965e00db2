"""Call-by-value small-step semantics: constant application, single
steps over evaluation contexts, bounded multi-step, and traces."""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import (
    Abs,
    App,
    Bool,
    Const,
    Constant,
    Expr,
    If,
    Num,
    free_vars,
    is_value,
    substitute,
)

DEFAULT_FUEL = 10_000


@dataclass(frozen=True)
class Stepped:
    next: Expr


@dataclass(frozen=True)
class AlreadyValue:
    pass


@dataclass(frozen=True)
class Stuck:
    reason: str
    redex: Expr


StepResult = Stepped | AlreadyValue | Stuck


@dataclass(frozen=True)
class Value:
    v: Expr


@dataclass(frozen=True)
class FuelExhausted:
    last: Expr
    steps: int


@dataclass(frozen=True)
class StuckAt:
    e: Expr
    reason: str


EvalOutcome = Value | FuelExhausted | StuckAt


def apply_constant(c: Constant, v: Expr) -> Expr | None:
    """The delta rules; None when no rule covers (c, v)."""
    if not is_value(v):
        raise ValueError("apply_constant: operand is not a value")
    match c:
        case Constant.ADD1:
            return Num(v.value + 1) if isinstance(v, Num) else None
        case Constant.NOT:
            return Bool(isinstance(v, Bool) and v.value is False)
        case Constant.NUMBER_P:
            return Bool(isinstance(v, Num))
        case Constant.BOOLEAN_P:
            return Bool(isinstance(v, Bool))
        case Constant.PROCEDURE_P:
            return Bool(isinstance(v, (Abs, Const)))
        case Constant.EVEN_P:
            return Bool(v.value % 2 == 0) if isinstance(v, Num) else None
        case Constant.ODD_P:
            return Bool(v.value % 2 != 0) if isinstance(v, Num) else None
    return None


def delta_apply(c: Constant, v: Expr) -> Expr | None:
    """Alias for apply_constant, matching the usual name of the δ table."""
    return apply_constant(c, v)


def _is_false(v: Expr) -> bool:
    return isinstance(v, Bool) and v.value is False


def step(e: Expr) -> StepResult:
    """One step of the leftmost-innermost call-by-value reduction."""
    if free_vars(e):
        raise ValueError("step: term is not closed")
    if is_value(e):
        return AlreadyValue()
    return _step(e)


def _step(e: Expr) -> StepResult:
    match e:
        case App(rator, rand):
            if not is_value(rator):
                inner = _step(rator)
                return Stepped(App(inner.next, rand)) if isinstance(inner, Stepped) else inner
            if not is_value(rand):
                inner = _step(rand)
                return Stepped(App(rator, inner.next)) if isinstance(inner, Stepped) else inner
            match rator:
                case Const(c):
                    out = apply_constant(c, rand)
                    if out is None:
                        return Stuck(f"{c.value} is not defined on this operand", e)
                    return Stepped(out)
                case Abs(param, _, body):
                    return Stepped(substitute(body, param, rand))
                case _:
                    return Stuck("operator not applicable", e)
        case If(test, then, els):
            if not is_value(test):
                inner = _step(test)
                return Stepped(If(inner.next, then, els)) if isinstance(inner, Stepped) else inner
            return Stepped(els if _is_false(test) else then)
    return Stuck("no reduction rule", e)


def evaluate(e: Expr, fuel: int = DEFAULT_FUEL) -> EvalOutcome:
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    for steps in range(fuel + 1):
        res = step(e)
        match res:
            case AlreadyValue():
                return Value(e)
            case Stuck(reason, _):
                return StuckAt(e, reason)
            case Stepped(next):
                if steps == fuel:
                    return FuelExhausted(e, fuel)
                e = next
    return FuelExhausted(e, fuel)


def trace(e: Expr, fuel: int = DEFAULT_FUEL) -> list[Expr]:
    """Every term of the reduction sequence, first and last included."""
    out = [e]
    for _ in range(fuel):
        res = step(e)
        if not isinstance(res, Stepped):
            break
        e = res.next
        out.append(e)
    return out
