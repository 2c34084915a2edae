"""Staged variable elimination producing pure quasi-inequalities.

Stage 1 distributes conjunction over disjunction on the left (and dually on
the right, including box over conjunction), splits the result into
inequalities, and turns each one into a system ``i0 <= lhs  =>  i0 <= rhs``
with a fresh nominal.

Stage 2 normalizes the antecedents (split conjunctions, then residuate box
and implication until each has a variable, bot or top on the right), then
decomposes the consequent outside-in: an implication on the right is
residuated and re-anchored at a fresh nominal whose defining inequality is
normalized like the originals; a box on the right is residuated, with a
fresh anchor only if more decomposition is needed.  Deleting drops trivial
``<= top`` antecedents after every round.

Stage 3 eliminates the variables smallest-first along the dependence order
with the right-handed Ackermann rule: the joined left sides of the
``theta <= p`` antecedents are substituted for p everywhere else, subject to
the polarity side conditions.

Every rule application is recorded in a trace whose steps can be replayed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .formula import (
    BOT,
    And,
    BlackDiamond,
    Bot,
    Box,
    Formula,
    Implies,
    Inequality,
    Nominal,
    Or,
    PropVar,
    QuasiInequality,
    Top,
    fresh_nominal,
    is_basic,
    negative_or_absent,
    polarity,
    positive_or_absent,
    prop_vars,
    quasi_nominal_names,
    quasi_prop_vars,
    substitute,
)
from .inductive import DependenceOrder, classify_inductive, is_positive

_REWRITE_CAP = 100_000

TraceState = Union[Inequality, QuasiInequality, tuple]


@dataclass(frozen=True)
class TraceStep:
    rule: str
    params: tuple
    before: TraceState
    after: TraceState


@dataclass
class AlbaTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def record(self, rule: str, params: tuple, before: TraceState, after: TraceState) -> None:
        self.steps.append(TraceStep(rule, params, before, after))


@dataclass
class AlbaOutput:
    systems: tuple[QuasiInequality, ...]
    trace: AlbaTrace


class AlbaFailure(Exception):
    """The algorithm got stuck; carries the stuck system and partial trace."""

    def __init__(self, message: str, stuck: QuasiInequality | None = None,
                 trace: AlbaTrace | None = None):
        super().__init__(message)
        self.stuck = stuck
        self.trace = trace if trace is not None else AlbaTrace()


class AckermannViolation(Exception):
    """A side condition of the Ackermann rule fails; names the offender."""

    def __init__(self, var: str, where: str, detail: str):
        super().__init__(f"cannot eliminate {var}: {where}: {detail}")
        self.var = var
        self.where = where
        self.detail = detail


# ---------------------------------------------------------------------------
# Stage 1: distribution, splitting, first approximation.
# ---------------------------------------------------------------------------

def _rewrite_fixpoint(f: Formula, rule: Callable[[Formula], Formula | None]) -> Formula:
    budget = [_REWRITE_CAP]

    def go(g: Formula) -> Formula:
        if isinstance(g, And):
            g = And(go(g.left), go(g.right))
        elif isinstance(g, Or):
            g = Or(go(g.left), go(g.right))
        elif isinstance(g, Implies):
            g = Implies(go(g.left), go(g.right))
        elif isinstance(g, Box):
            g = Box(go(g.body))
        elif isinstance(g, BlackDiamond):
            g = BlackDiamond(go(g.body))
        out = rule(g)
        if out is None:
            return g
        budget[0] -= 1
        if budget[0] <= 0:
            raise RuntimeError("distribution rewriting exceeded its step cap")
        return go(out)

    return go(f)


def _lhs_rule(g: Formula) -> Formula | None:
    if isinstance(g, And):
        if isinstance(g.left, Or):
            return Or(And(g.left.left, g.right), And(g.left.right, g.right))
        if isinstance(g.right, Or):
            return Or(And(g.left, g.right.left), And(g.left, g.right.right))
    return None


def _rhs_rule(g: Formula) -> Formula | None:
    if isinstance(g, Or):
        if isinstance(g.left, And):
            return And(Or(g.left.left, g.right), Or(g.left.right, g.right))
        if isinstance(g.right, And):
            return And(Or(g.left, g.right.left), Or(g.left, g.right.right))
    if isinstance(g, Implies) and isinstance(g.right, And):
        return And(Implies(g.left, g.right.left), Implies(g.left, g.right.right))
    if isinstance(g, Box) and isinstance(g.body, And):
        return And(Box(g.body.left), Box(g.body.right))
    return None


def distribute(ineq: Inequality) -> Inequality:
    """Apply the distribution rewrites exhaustively on both sides."""
    return Inequality(_rewrite_fixpoint(ineq.lhs, _lhs_rule),
                      _rewrite_fixpoint(ineq.rhs, _rhs_rule))


def split_inequality(ineq: Inequality) -> tuple[Inequality, ...]:
    """Split top-level conjunctions on the right and disjunctions on the left."""
    out: list[Inequality] = []

    def go(iq: Inequality) -> None:
        if isinstance(iq.rhs, And):
            go(Inequality(iq.lhs, iq.rhs.left))
            go(Inequality(iq.lhs, iq.rhs.right))
        elif isinstance(iq.lhs, Or):
            go(Inequality(iq.lhs.left, iq.rhs))
            go(Inequality(iq.lhs.right, iq.rhs))
        else:
            out.append(iq)

    go(ineq)
    return tuple(out)


def preprocess(ineq: Inequality) -> tuple[Inequality, ...]:
    """Stage-1 rewriting: distribution to fixpoint, then splitting."""
    return split_inequality(distribute(ineq))


def first_approximation(ineq: Inequality, used: frozenset[str] | set[str] = frozenset(),
                        *, fresh: str | None = None) -> QuasiInequality:
    if fresh is None:
        fresh = fresh_nominal(set(used))
    nom = Nominal(fresh)
    return QuasiInequality((Inequality(nom, ineq.lhs),), Inequality(nom, ineq.rhs))


# ---------------------------------------------------------------------------
# Stage 2 rules.
# ---------------------------------------------------------------------------

def apply_splitting(sys: QuasiInequality) -> tuple[QuasiInequality, ...]:
    """Flatten antecedents in place; a consequent redex forks the system."""
    ants: list[Inequality] = []
    for a in sys.antecedents:
        ants.extend(split_inequality(a))
    return tuple(QuasiInequality(tuple(ants), c) for c in split_inequality(sys.consequent))


def _residuate_step(ineq: Inequality) -> Inequality | None:
    if isinstance(ineq.rhs, Box):
        return Inequality(BlackDiamond(ineq.lhs), ineq.rhs.body)
    if isinstance(ineq.rhs, Implies):
        return Inequality(And(ineq.lhs, ineq.rhs.left), ineq.rhs.right)
    return None


def _residuate_fixpoint(ineq: Inequality) -> Inequality:
    while True:
        step = _residuate_step(ineq)
        if step is None:
            return ineq
        ineq = step


def apply_residuation(sys: QuasiInequality) -> QuasiInequality:
    """Residuate every antecedent to fixpoint (box and implication on the right)."""
    return QuasiInequality(tuple(_residuate_fixpoint(a) for a in sys.antecedents),
                           sys.consequent)


def residuate_consequent(sys: QuasiInequality) -> QuasiInequality:
    step = _residuate_step(sys.consequent)
    if step is None:
        raise ValueError(f"consequent has no residuation redex: {sys.consequent}")
    return QuasiInequality(sys.antecedents, step)


def apply_approximation(sys: QuasiInequality, used: frozenset[str] | set[str] = frozenset(),
                        *, fresh: str | None = None) -> QuasiInequality:
    """Anchor the consequent at a fresh nominal: S => f <= g becomes
    S & j <= f => j <= g."""
    if fresh is None:
        fresh = fresh_nominal(set(used) | quasi_nominal_names(sys))
    assert fresh not in quasi_nominal_names(sys), "approximation nominal must be fresh"
    nom = Nominal(fresh)
    return QuasiInequality(sys.antecedents + (Inequality(nom, sys.consequent.lhs),),
                           Inequality(nom, sys.consequent.rhs))


def apply_deleting(sys: QuasiInequality) -> QuasiInequality:
    if isinstance(sys.consequent.rhs, Top):
        return QuasiInequality((), sys.consequent)
    return QuasiInequality(tuple(a for a in sys.antecedents if not isinstance(a.rhs, Top)),
                           sys.consequent)


def apply_ackermann(sys: QuasiInequality, var: str) -> QuasiInequality:
    """Eliminate a variable by substituting the join of its lower bounds.

    Antecedents split into ``theta_i <= var`` (collected and dropped) and the
    rest; the join of the theta_i (bot when there are none) replaces var in
    every remaining formula.  Side conditions: var must not occur in any
    theta_i; remaining antecedents must be positive in var on the left and
    negative on the right; the consequent the other way around.
    """
    p = PropVar(var)
    thetas: list[Formula] = []
    others: list[Inequality] = []
    for a in sys.antecedents:
        if a.rhs == p:
            thetas.append(a.lhs)
        else:
            others.append(a)
    for th in thetas:
        if var in prop_vars(th):
            raise AckermannViolation(var, f"lower bound {th} <= {var}",
                                     f"{var} occurs in its own lower bound")
    for a in others:
        if not positive_or_absent(a.lhs, var):
            raise AckermannViolation(var, f"antecedent {a}",
                                     f"left side is {polarity(a.lhs, var).name} in {var}, not positive")
        if not negative_or_absent(a.rhs, var):
            raise AckermannViolation(var, f"antecedent {a}",
                                     f"right side is {polarity(a.rhs, var).name} in {var}, not negative")
    if not negative_or_absent(sys.consequent.lhs, var):
        raise AckermannViolation(var, f"consequent {sys.consequent}",
                                 f"left side is {polarity(sys.consequent.lhs, var).name} in {var}, not negative")
    if not positive_or_absent(sys.consequent.rhs, var):
        raise AckermannViolation(var, f"consequent {sys.consequent}",
                                 f"right side is {polarity(sys.consequent.rhs, var).name} in {var}, not positive")

    theta: Formula = BOT
    if thetas:
        theta = thetas[0]
        for th in thetas[1:]:
            theta = Or(theta, th)

    def sub(g: Formula) -> Formula:
        return substitute(g, var, theta)

    return QuasiInequality(tuple(Inequality(sub(a.lhs), sub(a.rhs)) for a in others),
                           Inequality(sub(sys.consequent.lhs), sub(sys.consequent.rhs)))


# ---------------------------------------------------------------------------
# Shape checks.
# ---------------------------------------------------------------------------

def is_minval(f: Formula, var: str, omega: DependenceOrder) -> bool:
    """Grammar of computed lower bounds: a nominal, a black diamond of one,
    or one conjoined with a positive formula in the variables below var."""
    if isinstance(f, Nominal):
        return True
    if isinstance(f, BlackDiamond):
        return is_minval(f.body, var, omega)
    if isinstance(f, And):
        return is_minval(f.left, var, omega) and is_positive(f.right, omega.below(var))
    return False


def _check_minval_shapes(sys: QuasiInequality, omega: DependenceOrder) -> None:
    for a in sys.antecedents:
        if isinstance(a.rhs, PropVar):
            assert is_minval(a.lhs, a.rhs.name, omega), \
                f"antecedent {a} is not in computed-lower-bound shape"


# ---------------------------------------------------------------------------
# The driver.
# ---------------------------------------------------------------------------

RULES: dict[str, Callable[..., TraceState]] = {
    "distribute": distribute,
    "split_ineq": split_inequality,
    "first_approx": lambda iq, fresh: first_approximation(iq, fresh=fresh),
    "split": apply_splitting,
    "residuate_ants": apply_residuation,
    "residuate_cons": residuate_consequent,
    "approx": lambda sys, fresh: apply_approximation(sys, fresh=fresh),
    "delete": apply_deleting,
    "ackermann": apply_ackermann,
}


def replay_step(step: TraceStep) -> TraceState:
    return RULES[step.rule](step.before, *step.params)


def _decomposable(g: Formula) -> bool:
    return isinstance(g, (Implies, Box))


def run_alba(f: Formula) -> AlbaOutput:
    """Run the three stages on an implication in the basic fragment.

    Raises AlbaFailure (with the stuck system) when a side condition fails
    or variables cannot be eliminated.
    """
    trace = AlbaTrace()
    if not isinstance(f, Implies):
        raise AlbaFailure(f"input must be an implication, got {f}", trace=trace)
    if not is_basic(f):
        raise AlbaFailure(f"input must be in the basic fragment (no nominals, no <*>): {f}",
                          trace=trace)
    omega = classify_inductive(f)
    if omega is not None:
        order = omega.minimal_first(prop_vars(f))
    else:
        # Not recognizably inductive: try anyway in lexicographic order and
        # let the Ackermann side conditions report where it gets stuck.
        order = tuple(sorted(prop_vars(f)))

    ineq = Inequality(f.left, f.right)

    distributed = distribute(ineq)
    if distributed != ineq:
        trace.record("distribute", (), ineq, distributed)
    parts = split_inequality(distributed)
    if parts != (distributed,):
        trace.record("split_ineq", (), distributed, parts)

    systems: list[QuasiInequality] = []
    for part in parts:
        fresh = fresh_nominal(set())
        quasi = first_approximation(part, fresh=fresh)
        trace.record("first_approx", (fresh,), part, quasi)
        systems.append(quasi)

    def checked(rule: str, sys: QuasiInequality, fn: Callable, *params) -> QuasiInequality:
        out = fn(sys, *params)
        if rule == "split":
            assert len(out) == 1, "consequent splitting cannot fork here"
            if out != (sys,):
                trace.record(rule, params, sys, out)
            return out[0]
        if out != sys:
            trace.record(rule, params, sys, out)
        return out

    outputs: list[QuasiInequality] = []
    for sys in systems:
        sys = checked("split", sys, apply_splitting)
        sys = checked("residuate_ants", sys, apply_residuation)
        sys = checked("delete", sys, apply_deleting)

        while True:
            rhs = sys.consequent.rhs
            if isinstance(rhs, Implies):
                sys = checked("residuate_cons", sys, residuate_consequent)
                fresh = fresh_nominal(quasi_nominal_names(sys))
                sys = checked("approx", sys, lambda s, fr: apply_approximation(s, fresh=fr), fresh)
                sys = checked("split", sys, apply_splitting)
                sys = checked("residuate_ants", sys, apply_residuation)
                sys = checked("delete", sys, apply_deleting)
            elif isinstance(rhs, Box):
                sys = checked("residuate_cons", sys, residuate_consequent)
                if _decomposable(sys.consequent.rhs):
                    fresh = fresh_nominal(quasi_nominal_names(sys))
                    sys = checked("approx", sys, lambda s, fr: apply_approximation(s, fresh=fr), fresh)
                sys = checked("delete", sys, apply_deleting)
            else:
                break

        if omega is not None:
            _check_minval_shapes(sys, omega)

        for p in order:
            if p not in quasi_prop_vars(sys):
                continue
            try:
                sys = checked("ackermann", sys, apply_ackermann, p)
            except AckermannViolation as exc:
                raise AlbaFailure(str(exc), stuck=sys, trace=trace) from exc

        remaining = quasi_prop_vars(sys)
        if remaining:
            raise AlbaFailure(f"variables {sorted(remaining)} remain after elimination",
                              stuck=sys, trace=trace)
        outputs.append(sys)

    return AlbaOutput(tuple(outputs), trace)
