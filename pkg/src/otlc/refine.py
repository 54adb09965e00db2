"""Refinement predicate declarations and the erasure homomorphisms.

Erasure deletes every refinement constructor from types, annotations,
predicates, and environments.  It reduces soundness of the refined
system to soundness of the base system: an erased well-typed term is
well-typed at the erased type, and erasure commutes with reduction.
"""

from __future__ import annotations

from .checker import Judgment, Mode, TypeEnv, pred_equal, typecheck, TypeCheckError
from .subtyping import UndeclaredRefinement, constant_type, type_equal
from .syntax import (
    Abs,
    App,
    Arrow,
    Constant,
    Expr,
    If,
    Pred,
    Refine,
    Type,
    TypeOfPred,
    UnionT,
)


def declare_refinement(delta: frozenset[Constant] | set[Constant], c: Constant) -> frozenset[Constant]:
    """Admit `c` as a refinement predicate; idempotent."""
    if not isinstance(constant_type(c), Arrow):
        raise ValueError(f"{c.value} has no function type")  # unreachable for the fixed constant set
    return frozenset(delta) | {c}


def erase_type(t: Type) -> Type:
    match t:
        case Refine(_, base):
            return erase_type(base)
        case Arrow(arg, res, latent):
            return Arrow(erase_type(arg), erase_type(res),
                         None if latent is None else erase_type(latent))
        case UnionT(members):
            return UnionT(tuple(erase_type(m) for m in members))
        case _:
            return t


def erase_expr(e: Expr) -> Expr:
    match e:
        case Abs(param, annot, body):
            return Abs(param, erase_type(annot), erase_expr(body))
        case App(rator, rand):
            return App(erase_expr(rator), erase_expr(rand))
        case If(test, then, els):
            return If(erase_expr(test), erase_expr(then), erase_expr(els))
        case _:
            return e


def erase_pred(p: Pred) -> Pred:
    if isinstance(p, TypeOfPred):
        return TypeOfPred(erase_type(p.type), p.var)
    return p


def erase_env(g: TypeEnv) -> TypeEnv:
    return {x: erase_type(t) for x, t in g.items()}


def uses_refinements(e: Expr) -> bool:
    """True when any annotation in `e` mentions a refinement type or `e`
    mentions a refining constant."""
    from .syntax import Const

    match e:
        case Abs(_, annot, body):
            return erase_type(annot) != annot or uses_refinements(body)
        case App(rator, rand):
            return uses_refinements(rator) or uses_refinements(rand)
        case If(test, then, els):
            return any(uses_refinements(x) for x in (test, then, els))
        case Const(c):
            return c in (Constant.EVEN_P, Constant.ODD_P)
        case _:
            return False


def erased_judgment(delta: frozenset, g: TypeEnv, e: Expr) -> Judgment:
    """Type the erased term under the erased environment, with constants
    typed at their erased types."""
    return typecheck(frozenset(), erase_env(g), erase_expr(e), Mode.PRIMARY,
                     erase_constants=True)


def erased_judgment_holds(delta: frozenset, g: TypeEnv, e: Expr) -> bool:
    """Check that erasing a well-typed term yields a judgment at least as
    strong as the erasure of its judgment.

    Strict equality does not hold in general: erasure can make type-test
    narrowing sharper (for example remove(Number, (Refinement odd?)) is
    Number, while its erasure remove(Number, Number) is the empty union),
    so the erased derivation may conclude a subtype of the erased type and
    a sub-predicate of the erased predicate.
    """
    from .checker import is_subpred
    from .subtyping import subtype

    j = typecheck(frozenset(delta), g, e, Mode.PRIMARY)
    try:
        je = erased_judgment(frozenset(delta), g, e)
    except (TypeCheckError, UndeclaredRefinement):
        return False
    return (subtype(frozenset(), je.type, erase_type(j.type))
            and is_subpred(je.pred, erase_pred(j.pred)))
