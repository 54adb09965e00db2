"""Randomized soundness testing.

Generates well-typed closed terms, reduces them, and checks per step that
typing is preserved (type shrinks, predicate is a sub-predicate), that
non-values always step, that terminating runs of base-typed terms end in
a suitably typed value, and, when refinements are enabled, that erasure
commutes with reduction and preserves typability.

Subject-reduction judgments are taken on the refinement-erased terms:
refinement soundness is established by erasure, and the predicates of
refinement tests on literals are not stable step-to-step in the unerased
system.  Without refinements erasure is the identity, so this is the
plain check.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from .checker import (
    Judgment,
    Mode,
    TypeCheckError,
    env_minus,
    env_plus,
    is_subpred,
    pred_equal,
    typecheck,
)
from .refine import erase_env, erase_expr, erase_pred, erase_type, erased_judgment_holds
from .semantics import Stepped, Stuck, step, trace
from .subtyping import (
    UndeclaredRefinement,
    constant_type,
    normalize,
    subtype,
)
from .syntax import (
    BOOLEAN,
    FALSE_T,
    NONE_PRED,
    NUM,
    TOP,
    TRUE_T,
    Abs,
    App,
    Arrow,
    Bool,
    Const,
    Constant,
    Expr,
    If,
    Num,
    Refine,
    TrueT,
    FalseT,
    NumT,
    UnionT,
    Var,
    VarPred,
    free_vars,
    is_value,
    parse_expr,
    print_expr,
)

NUM_OR_BOOL = UnionT((NUM, TRUE_T, FALSE_T))
REFINE_EVEN = Refine(Constant.EVEN_P, NUM)

FIG2_RULES = (
    "T-Var", "T-Num", "T-Const", "T-True", "T-False",
    "T-Abs", "T-AbsPred", "T-App", "T-AppPred", "T-If",
)

_PREDICATE_CONSTANTS = (
    Constant.NOT, Constant.NUMBER_P, Constant.BOOLEAN_P, Constant.PROCEDURE_P,
)


@dataclass
class FuzzConfig:
    count: int
    seed: int
    max_depth: int = 6
    fuel: int = 1000
    with_refinements: bool = False

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")


@dataclass
class FuzzFailure:
    kind: str
    term: str
    step: int
    detail: str


@dataclass
class FuzzReport:
    generated: int = 0
    preservation_failures: list[FuzzFailure] = field(default_factory=list)
    progress_failures: list[FuzzFailure] = field(default_factory=list)
    erasure_failures: list[FuzzFailure] = field(default_factory=list)
    roundtrip_failures: list[FuzzFailure] = field(default_factory=list)
    coverage: dict[str, int] = field(default_factory=dict)
    seed: int = 0
    elapsed_ms: float = 0.0

    def all_failures(self) -> list[FuzzFailure]:
        return (self.preservation_failures + self.progress_failures
                + self.erasure_failures + self.roundtrip_failures)

    def to_dict(self) -> dict:
        return {
            "generated": self.generated,
            "failures": [
                {"kind": f.kind, "term": f.term, "step": f.step, "detail": f.detail}
                for f in self.all_failures()
            ],
            "coverage": dict(sorted(self.coverage.items())),
            "seed": self.seed,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# ---------------------------------------------------------------------------
# Type-directed term generation


class _GenFail(Exception):
    pass


def _pred_mentions_var(e: Expr) -> bool:
    """Whether the predicate of `e` may mention a program variable (a bare
    variable predicate or a per-variable type fact).  Such predicates
    dissolve to tt/ff once the variable is substituted by a value, which
    statically decides any if whose test this expression is."""
    match e:
        case Var(_):
            return True
        case App(_, rand):
            return isinstance(rand, Var) or _pred_mentions_var(rand)
        case If(test, then, els):
            return any(_pred_mentions_var(x) for x in (test, then, els))
        case _:
            return False


def _pred_unstable(e: Expr) -> bool:
    """Whether the predicate of `e` can change once enclosing binders are
    substituted away.  A variable's predicate becomes the value's
    predicate.  An if whose test is decided by substitution takes its
    branch's predicate, which may mention a still-bound variable the
    original combined predicate did not — so the enclosing context would
    suddenly narrow under a fact it never checked the branches against."""
    match e:
        case Var(_):
            return True
        case If(test, then, els):
            return (_pred_mentions_var(test)
                    or _pred_unstable(then) or _pred_unstable(els))
        case _:
            return False


class _Gen:
    def __init__(self, rng: random.Random, delta: frozenset, with_refinements: bool):
        self.rng = rng
        self.delta = delta
        self.with_refinements = with_refinements
        self.counter = 0
        self.goals = [NUM, BOOLEAN, TOP, NUM_OR_BOOL]
        self.annots = [TOP, NUM, BOOLEAN, NUM_OR_BOOL, Arrow(NUM, NUM), Arrow(TOP, BOOLEAN)]
        if with_refinements:
            self.annots.append(Arrow(REFINE_EVEN, NUM))

    def fresh(self) -> str:
        self.counter += 1
        return f"v{self.counter}"

    def fits(self, t, goal) -> bool:
        try:
            return subtype(self.delta, t, goal)
        except UndeclaredRefinement:
            return False

    def expr(self, env: dict, goal, depth: int) -> Expr:
        if depth <= 1:
            return self.leaf(env, goal)
        builders = ["leaf"] * 30 + ["if"] * 30 + ["app"] * 25 + ["lam"] * 15
        self.rng.shuffle(builders)
        for name in builders[:8]:
            try:
                if name == "leaf":
                    return self.leaf(env, goal)
                if name == "if":
                    return self.cond(env, goal, depth)
                if name == "app":
                    return self.app(env, goal, depth)
                return self.lam(env, goal, depth)
            except _GenFail:
                continue
        return self.leaf(env, goal)

    def leaf(self, env: dict, goal) -> Expr:
        g = normalize(goal)
        usable = [x for x, t in env.items() if self.fits(t, g)]
        if usable and self.rng.random() < 0.5:
            return Var(self.rng.choice(usable))
        return self.literal(env, g, 0)

    def literal(self, env: dict, g, retry: int) -> Expr:
        match g:
            case NumT():
                return Num(self.rng.randint(-10, 99))
            case TrueT():
                return Bool(True)
            case FalseT():
                return Bool(False)
            case UnionT(members):
                if g == BOOLEAN:
                    return Bool(self.rng.random() < 0.5)
                if not members:
                    raise _GenFail
                return self.literal(env, self.rng.choice(members), retry)
            case Arrow(arg, res, latent):
                if latent is None:
                    for c in Constant:
                        if self.fits(constant_type(c), g) and self.rng.random() < 0.4:
                            return Const(c)
                x = self.fresh()
                body = self.expr({**env, x: arg}, res, 1)
                e = Abs(x, arg, body)
                # the inferred latent must match; revalidation catches misses
                return e
            case Refine(_, _):
                usable = [x for x, t in env.items() if self.fits(t, g)]
                if not usable:
                    raise _GenFail
                return Var(self.rng.choice(usable))
            case _:  # Top
                pick = self.rng.random()
                if pick < 0.35:
                    return Num(self.rng.randint(-10, 99))
                if pick < 0.6:
                    return Bool(self.rng.random() < 0.5)
                if pick < 0.8:
                    return Const(self.rng.choice(list(Constant)[:5]))
                return self.literal(env, Arrow(NUM, NUM), retry)

    def vet(self, env: dict, e: Expr) -> tuple[Judgment, Judgment]:
        """Primary judgment of `e` plus its judgment in the system used to
        re-judge reduction chains (erased, extended, sound constant table).
        The chain-side predicate must agree with the erasure of the primary
        one or be plain `none`; otherwise the narrowing assumed while
        generating the surrounding term will not match the narrowing seen
        when the chain is re-judged.  Bare-variable predicates are out
        entirely: a Boolean variable narrowed to True does not cover the
        value #t (typed at Boolean) substituted for it."""
        try:
            j = typecheck(self.delta, env, e, Mode.PRIMARY)
            je = typecheck(frozenset(), erase_env(env), erase_expr(e),
                           Mode.EXTENDED, erase_constants=True,
                           drop_inexact_latents=True)
        except (TypeCheckError, UndeclaredRefinement):
            raise _GenFail from None
        if isinstance(j.pred, VarPred) and not isinstance(e, Var):
            raise _GenFail
        if je.pred != NONE_PRED and not pred_equal(erase_pred(j.pred), je.pred):
            raise _GenFail
        return j, je

    def cond(self, env: dict, goal, depth: int) -> Expr:
        test = self.make_test(env, depth)
        j1, je1 = self.vet(env, test)
        if isinstance(j1.pred, VarPred) or _pred_unstable(test):
            raise _GenFail
        try:
            env_then = env_plus(self.delta, env, j1.pred)
            env_else = env_minus(self.delta, env, j1.pred)
            erased = erase_env(env)
            chain_then = env_plus(frozenset(), erased, je1.pred)
            chain_else = env_minus(frozenset(), erased, je1.pred)
        except (TypeCheckError, UndeclaredRefinement):
            raise _GenFail from None
        # Branches are generated under the primary narrowing; they stay
        # typeable when re-judged only if the chain-side narrowing is at
        # least as strong pointwise (a dead branch narrowed to the empty
        # union has no chain-side counterpart, for example).
        for mine, chain in ((env_then, chain_then), (env_else, chain_else)):
            if not all(subtype(frozenset(), chain[x], erase_type(mine[x]))
                       for x in mine):
                raise _GenFail
        then = self.expr(env_then, goal, depth - 1)
        els = self.expr(env_else, goal, depth - 1)
        return If(test, then, els)

    def make_test(self, env: dict, depth: int) -> Expr:
        narrowable = [x for x, t in env.items()
                      if normalize(t) == TOP or isinstance(normalize(t), UnionT)]
        if narrowable and self.rng.random() < 0.6:
            x = self.rng.choice(narrowable)
            c = self.rng.choice((Constant.NUMBER_P, Constant.BOOLEAN_P))
            return App(Const(c), Var(x))
        if self.with_refinements:
            nums = [x for x, t in env.items() if self.fits(t, NUM)]
            if nums and self.rng.random() < 0.5:
                c = self.rng.choice((Constant.EVEN_P, Constant.ODD_P))
                return App(Const(c), Var(self.rng.choice(nums)))
        return self.expr(env, BOOLEAN, depth - 1)

    def app(self, env: dict, goal, depth: int) -> Expr:
        g = normalize(goal)
        options = []
        if self.fits(NUM, g):
            options.append("add1")
        if self.fits(BOOLEAN, g):
            options.append("predicate")
        arrows = [x for x, t in env.items()
                  if isinstance(normalize(t), Arrow) and self.fits(normalize(t).res, g)]
        if arrows:
            options.append("call")
        options.append("beta")
        if self.with_refinements and self.fits(NUM, g):
            options.append("even-guard")
        match self.rng.choice(options):
            case "add1":
                return App(Const(Constant.ADD1), self.operand(env, NUM, depth))
            case "predicate":
                c = self.rng.choice(_PREDICATE_CONSTANTS)
                arg = constant_type(c).arg
                strict = constant_type(c).latent is not None
                return App(Const(c), self.operand(env, arg, depth, strict=strict))
            case "call":
                f = self.rng.choice(arrows)
                ft = normalize(env[f])
                return App(Var(f), self.operand(env, ft.arg, depth,
                                                strict=ft.latent is not None))
            case "even-guard":
                return self.even_guard(env, depth)
            case _:
                sigma = self.rng.choice(self.annots)
                x = self.fresh()
                body = self.expr({**env, x: sigma}, goal, depth - 1)
                fn = Abs(x, sigma, body)
                try:
                    lat = normalize(typecheck(self.delta, env, fn,
                                              Mode.PRIMARY).type).latent
                except (TypeCheckError, UndeclaredRefinement):
                    raise _GenFail from None
                arg = self.operand(env, sigma, depth, strict=lat is not None)
                return App(fn, arg)

    def operand(self, env: dict, want, depth: int, strict: bool = False) -> Expr:
        """Argument expression fitting `want`.  When the operator carries a
        latent predicate (`strict`), only operands whose predicate dissolves
        to tt/ff as soon as the enclosing binder is substituted are safe:
        variables, values, and vetted compounds without per-variable preds."""
        usable = [x for x, t in env.items() if self.fits(t, want)]
        if usable and self.rng.random() < 0.6:
            return Var(self.rng.choice(usable))
        e = self.expr(env, want, depth - 1)
        if strict and not isinstance(e, Var):
            if _pred_unstable(e):
                return self.literal(env, normalize(want), 0)
            self.vet(env, e)
        return e

    def even_guard(self, env: dict, depth: int) -> Expr:
        """A function guarded by a parity test, applied to concrete values:
        ((lambda (f : (-> (Refinement even?) Number))
           (lambda (n : Number) (if (even? n) (f n) n))) v_f) v_n."""
        f, n, m = self.fresh(), self.fresh(), self.fresh()
        guarded = Abs(
            f, Arrow(REFINE_EVEN, NUM),
            Abs(n, NUM, If(App(Const(Constant.EVEN_P), Var(n)),
                           App(Var(f), Var(n)), Var(n))))
        fn_arg = Abs(m, NUM, self.operand({**env, m: NUM}, NUM, depth - 1))
        num_arg = self.operand(env, NUM, depth - 1)
        return App(App(guarded, fn_arg), num_arg)

    def lam(self, env: dict, goal, depth: int) -> Expr:
        g = normalize(goal)
        if isinstance(g, Arrow):
            if g.latent is not None:
                raise _GenFail  # inferred latents rarely line up; let leaves handle it
            x = self.fresh()
            return Abs(x, g.arg, self.expr({**env, x: g.arg}, g.res, depth - 1))
        if g == TOP:
            sigma = self.rng.choice(self.annots)
            x = self.fresh()
            res = self.rng.choice(self.goals)
            return Abs(x, sigma, self.expr({**env, x: sigma}, res, depth - 1))
        raise _GenFail


def gen_typed_term(rng: random.Random, max_depth: int, delta: frozenset,
                   with_refinements: bool = False) -> Expr:
    """A closed term that typechecks with the primary rules under `delta`."""
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    delta = frozenset(delta)
    for attempt in range(60):
        depth = max(1, max_depth - attempt // 20)
        gen = _Gen(rng, delta, with_refinements)
        goal = rng.choice(gen.goals)
        try:
            e = gen.expr({}, goal, depth)
        except _GenFail:
            continue
        if free_vars(e):
            continue
        try:
            typecheck(delta, {}, e, Mode.PRIMARY)
        except (TypeCheckError, UndeclaredRefinement):
            continue
        return e
    return Num(rng.randint(0, 9))


# ---------------------------------------------------------------------------
# Subject reduction


def _is_base(t) -> bool:
    t = normalize(erase_type(t))
    if isinstance(t, (NumT, TrueT, FalseT)):
        return True
    if isinstance(t, UnionT):
        return all(_is_base(m) for m in t.members)
    return False


def check_subject_reduction(e: Expr, fuel: int, delta: frozenset,
                            with_refinements: bool = False) -> list[FuzzFailure]:
    """Per-step verdicts for one primary-typed closed term; empty list
    means every clause held."""
    delta = frozenset(delta)
    failures: list[FuzzFailure] = []
    text = print_expr(e)

    def fail(kind: str, i: int, detail: str):
        failures.append(FuzzFailure(kind, text, i, detail))

    tr = trace(e, fuel)

    judgments = []
    for i, term in enumerate(tr):
        try:
            judgments.append(
                typecheck(frozenset(), {}, erase_expr(term), Mode.EXTENDED,
                          erase_constants=True, drop_inexact_latents=True))
        except TypeCheckError as err:
            fail("preservation", i, f"intermediate term untypeable: {err}")
            return failures

    for i in range(1, len(judgments)):
        prev, cur = judgments[i - 1], judgments[i]
        if not subtype(frozenset(), cur.type, prev.type):
            fail("preservation", i,
                 f"type widened from {print_expr(tr[i-1])} to {print_expr(tr[i])}")
        if not is_subpred(cur.pred, prev.pred):
            fail("preservation", i,
                 f"predicate not preserved from {print_expr(tr[i-1])} to {print_expr(tr[i])}")

    last = tr[-1]
    res = step(last)
    if isinstance(res, Stuck):
        fail("progress", len(tr) - 1, f"stuck: {res.reason}")

    if is_value(last) and _is_base(judgments[0].type):
        if not subtype(frozenset(), judgments[-1].type, judgments[0].type):
            fail("soundness", len(tr) - 1, "final value type exceeds the initial type")
        if not is_subpred(judgments[-1].pred, judgments[0].pred):
            fail("soundness", len(tr) - 1, "final value predicate exceeds the initial one")

    if with_refinements:
        if not erased_judgment_holds(delta, {}, e):
            fail("erased-typing", 0, "erased term does not carry the erased judgment")
        for i, term in enumerate(tr[:-1]):
            nxt = step(term)
            er = step(erase_expr(term))
            if not (isinstance(nxt, Stepped) and isinstance(er, Stepped)
                    and er.next == erase_expr(nxt.next)):
                fail("erasure-commutation", i,
                     "erasure does not commute with reduction")

    return failures


# ---------------------------------------------------------------------------
# Shrinking


def _positions(e: Expr, path=()) -> list[tuple]:
    out = [path]
    match e:
        case Abs(_, _, body):
            out += _positions(body, path + ("body",))
        case App(rator, rand):
            out += _positions(rator, path + ("rator",))
            out += _positions(rand, path + ("rand",))
        case If(test, then, els):
            out += _positions(test, path + ("test",))
            out += _positions(then, path + ("then",))
            out += _positions(els, path + ("els",))
    return out


def _replace(e: Expr, path: tuple, repl: Expr) -> Expr:
    if not path:
        return repl
    head, rest = path[0], path[1:]
    match e:
        case Abs(param, annot, body):
            return Abs(param, annot, _replace(body, rest, repl))
        case App(rator, rand):
            if head == "rator":
                return App(_replace(rator, rest, repl), rand)
            return App(rator, _replace(rand, rest, repl))
        case If(test, then, els):
            if head == "test":
                return If(_replace(test, rest, repl), then, els)
            if head == "then":
                return If(test, _replace(then, rest, repl), els)
            return If(test, then, _replace(els, rest, repl))
    return repl


def shrink_failure(e: Expr, delta: frozenset, still_fails, budget: int = 200) -> Expr:
    """Greedily replace subterms with literals while the term stays
    primary-typed and `still_fails` keeps holding.  `budget` caps the
    number of `still_fails` evaluations (each one re-runs the reduction
    chain, so unbounded shrinking can dominate a fuzz run)."""
    candidates = (Num(0), Bool(True), Bool(False))
    changed = True
    while changed and budget > 0:
        changed = False
        for path in _positions(e):
            if not path and isinstance(e, (Num, Bool)):
                continue
            for lit in candidates:
                cand = _replace(e, path, lit)
                if cand == e:
                    continue
                try:
                    typecheck(delta, {}, cand, Mode.PRIMARY)
                except (TypeCheckError, UndeclaredRefinement):
                    continue
                budget -= 1
                if still_fails(cand):
                    e = cand
                    changed = True
                    break
                if budget <= 0:
                    return e
            if changed:
                break
    return e


# ---------------------------------------------------------------------------
# The driver


_KIND_BUCKET = {
    "preservation": "preservation_failures",
    "soundness": "preservation_failures",
    "progress": "progress_failures",
    "erased-typing": "erasure_failures",
    "erasure-commutation": "erasure_failures",
}


def run_fuzz(config: FuzzConfig) -> FuzzReport:
    """Deterministic for a given config; failures are data, not errors."""
    start = time.monotonic()
    delta = (frozenset({Constant.EVEN_P, Constant.ODD_P})
             if config.with_refinements else frozenset())
    report = FuzzReport(seed=config.seed)
    for i in range(config.count):
        rng = random.Random(f"{config.seed}:{i}")
        e = gen_typed_term(rng, config.max_depth, delta, config.with_refinements)
        report.generated += 1
        typecheck(delta, {}, e, Mode.PRIMARY, coverage=report.coverage)

        if parse_expr(print_expr(e)) != e:
            report.roundtrip_failures.append(
                FuzzFailure("roundtrip", print_expr(e), 0,
                            "printing then parsing changed the term"))

        fails = check_subject_reduction(e, config.fuel, delta, config.with_refinements)
        if fails:
            def still_fails(t):
                return bool(check_subject_reduction(
                    t, config.fuel, delta, config.with_refinements))

            minimal = shrink_failure(e, delta, still_fails)
            min_fails = check_subject_reduction(
                minimal, config.fuel, delta, config.with_refinements) or fails
            for f in min_fails:
                getattr(report, _KIND_BUCKET[f.kind]).append(f)
    report.elapsed_ms = (time.monotonic() - start) * 1000.0
    return report
