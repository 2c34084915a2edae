"""First-order correspondence language and the regular-open translation.

The signature has the two order relations ``leq1``, ``leq2``, the
accessibility relation ``R``, equality, one unary predicate per
propositional variable, and individual symbols for nominals (which may be
quantified).  The translation of a modal formula is built by structural
recursion; disjunction, nominals and the black diamond go through the
syntactic regular-open closure

    RO12_x(a(x)) = (forall y >=1 x)(exists z >=2 y)(exists z' <=1 z) a(z')

with the bounded quantifiers elaborated into plain ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

from . import formula as fm
from .formula import Formula, Inequality, QuasiInequality


@dataclass(frozen=True)
class WorldVar:
    name: str


@dataclass(frozen=True)
class NominalConst:
    name: str


FOTerm = Union[WorldVar, NominalConst]

REL_SYMBOLS = ("leq1", "leq2", "R")


class FOFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return print_fo(self)


@dataclass(frozen=True)
class Equal(FOFormula):
    left: FOTerm
    right: FOTerm


@dataclass(frozen=True)
class NotEqual(FOFormula):
    left: FOTerm
    right: FOTerm


@dataclass(frozen=True)
class Rel(FOFormula):
    sym: str
    left: FOTerm
    right: FOTerm

    def __post_init__(self):
        if self.sym not in REL_SYMBOLS:
            raise ValueError(f"unknown relation symbol {self.sym!r}")


@dataclass(frozen=True)
class Pred(FOFormula):
    name: str
    arg: FOTerm


@dataclass(frozen=True)
class Conj(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Disj(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Impl(FOFormula):
    left: FOFormula
    right: FOFormula


@dataclass(frozen=True)
class Forall(FOFormula):
    var: str
    body: FOFormula


@dataclass(frozen=True)
class Exists(FOFormula):
    var: str
    body: FOFormula


def _term_name(t: FOTerm) -> str:
    return t.name


def free_symbols(phi: FOFormula) -> frozenset[str]:
    """Free individual symbols: world variables and nominal constants alike."""
    if isinstance(phi, (Equal, NotEqual, Rel)):
        return frozenset({_term_name(phi.left), _term_name(phi.right)})
    if isinstance(phi, Pred):
        return frozenset({_term_name(phi.arg)})
    if isinstance(phi, (Conj, Disj, Impl)):
        return free_symbols(phi.left) | free_symbols(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return free_symbols(phi.body) - {phi.var}
    raise TypeError(f"not an FO node: {phi!r}")


def pred_names(phi: FOFormula) -> frozenset[str]:
    if isinstance(phi, Pred):
        return frozenset({phi.name})
    if isinstance(phi, (Conj, Disj, Impl)):
        return pred_names(phi.left) | pred_names(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return pred_names(phi.body)
    return frozenset()


def is_sentence(phi: FOFormula) -> bool:
    return not free_symbols(phi)


def bound_vars(phi: FOFormula) -> list[str]:
    if isinstance(phi, (Conj, Disj, Impl)):
        return bound_vars(phi.left) + bound_vars(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return [phi.var] + bound_vars(phi.body)
    return []


def bound_vars_distinct(phi: FOFormula) -> bool:
    bv = bound_vars(phi)
    return len(bv) == len(set(bv))


class VarSupply:
    """Deterministic supply of world-variable names, never reusing one.

    Emits x, y, z, w, x1, y1, z1, w1, x2, ... skipping reserved names, so
    every binder in a translation gets its own variable.
    """

    _BASE = ("x", "y", "z", "w")

    def __init__(self, reserved: frozenset[str] | set[str] = frozenset()):
        self._used = set(reserved)
        self._idx = 0

    def fresh(self) -> str:
        while True:
            base = self._BASE[self._idx % 4]
            k = self._idx // 4
            self._idx += 1
            name = base if k == 0 else f"{base}{k}"
            if name not in self._used:
                self._used.add(name)
                return name


def pred_name(var: str) -> str:
    """Unary predicate symbol for a propositional variable (P for p)."""
    return var[0].upper() + var[1:]


def syntactic_ro_closure(x: str, hole: Callable[[str], FOFormula], supply: VarSupply) -> FOFormula:
    """Quantify a one-hole body under the regular-open closure at x."""
    y = supply.fresh()
    z = supply.fresh()
    zp = supply.fresh()
    return Forall(
        y,
        Impl(
            Rel("leq1", WorldVar(x), WorldVar(y)),
            Exists(
                z,
                Conj(
                    Rel("leq2", WorldVar(y), WorldVar(z)),
                    Exists(zp, Conj(Rel("leq1", WorldVar(zp), WorldVar(z)), hole(zp))),
                ),
            ),
        ),
    )


def st(x: str, f: Formula, supply: VarSupply | None = None) -> FOFormula:
    """Regular-open translation of a modal formula at world variable x."""
    if supply is None:
        supply = VarSupply(reserved=fm.nominal_names(f) | {x})
    if isinstance(f, fm.PropVar):
        return Pred(pred_name(f.name), WorldVar(x))
    if isinstance(f, fm.Bot):
        return NotEqual(WorldVar(x), WorldVar(x))
    if isinstance(f, fm.Top):
        return Equal(WorldVar(x), WorldVar(x))
    if isinstance(f, fm.Nominal):
        name = f.name
        return syntactic_ro_closure(x, lambda v: Equal(NominalConst(name), WorldVar(v)), supply)
    if isinstance(f, fm.And):
        return Conj(st(x, f.left, supply), st(x, f.right, supply))
    if isinstance(f, fm.Or):
        y = supply.fresh()
        z = supply.fresh()
        return Forall(
            y,
            Impl(
                Rel("leq1", WorldVar(x), WorldVar(y)),
                Exists(
                    z,
                    Conj(
                        Rel("leq2", WorldVar(y), WorldVar(z)),
                        Disj(st(z, f.left, supply), st(z, f.right, supply)),
                    ),
                ),
            ),
        )
    if isinstance(f, fm.Implies):
        y = supply.fresh()
        return Forall(
            y,
            Impl(
                Rel("leq1", WorldVar(x), WorldVar(y)),
                Impl(st(y, f.left, supply), st(y, f.right, supply)),
            ),
        )
    if isinstance(f, fm.Box):
        y = supply.fresh()
        return Forall(y, Impl(Rel("R", WorldVar(x), WorldVar(y)), st(y, f.body, supply)))
    if isinstance(f, fm.BlackDiamond):
        body = f.body

        def hole(v: str) -> FOFormula:
            y = supply.fresh()
            return Exists(y, Conj(Rel("R", WorldVar(y), WorldVar(v)), st(y, body, supply)))

        return syntactic_ro_closure(x, hole, supply)
    raise TypeError(f"not a formula node: {f!r}")


def _ineq_symbols(ineq: Inequality) -> frozenset[str]:
    return fm.nominal_names(ineq.lhs) | fm.nominal_names(ineq.rhs)


def st_inequality(ineq: Inequality, supply: VarSupply | None = None) -> FOFormula:
    """forall x (ST_x(lhs) -> ST_x(rhs)): truth of the inequality is global."""
    if supply is None:
        supply = VarSupply(reserved=_ineq_symbols(ineq))
    x = supply.fresh()
    return Forall(x, Impl(st(x, ineq.lhs, supply), st(x, ineq.rhs, supply)))


def st_quasi(q: QuasiInequality, supply: VarSupply | None = None) -> FOFormula:
    if supply is None:
        supply = VarSupply(reserved=fm.quasi_nominal_names(q))
    head: FOFormula | None = None
    for ineq in q.antecedents:
        part = st_inequality(ineq, supply)
        head = part if head is None else Conj(head, part)
    tail = st_inequality(q.consequent, supply)
    return tail if head is None else Impl(head, tail)


def _subst_nominal_const(phi: FOFormula, name: str, var: str) -> FOFormula:
    def sub_term(t: FOTerm) -> FOTerm:
        if isinstance(t, NominalConst) and t.name == name:
            return WorldVar(var)
        return t

    if isinstance(phi, Equal):
        return Equal(sub_term(phi.left), sub_term(phi.right))
    if isinstance(phi, NotEqual):
        return NotEqual(sub_term(phi.left), sub_term(phi.right))
    if isinstance(phi, Rel):
        return Rel(phi.sym, sub_term(phi.left), sub_term(phi.right))
    if isinstance(phi, Pred):
        return Pred(phi.name, sub_term(phi.arg))
    if isinstance(phi, Conj):
        return Conj(_subst_nominal_const(phi.left, name, var), _subst_nominal_const(phi.right, name, var))
    if isinstance(phi, Disj):
        return Disj(_subst_nominal_const(phi.left, name, var), _subst_nominal_const(phi.right, name, var))
    if isinstance(phi, Impl):
        return Impl(_subst_nominal_const(phi.left, name, var), _subst_nominal_const(phi.right, name, var))
    if isinstance(phi, Forall):
        return Forall(phi.var, _subst_nominal_const(phi.body, name, var))
    if isinstance(phi, Exists):
        return Exists(phi.var, _subst_nominal_const(phi.body, name, var))
    raise TypeError(f"not an FO node: {phi!r}")


def correspondent(systems: list[QuasiInequality] | tuple[QuasiInequality, ...]) -> FOFormula:
    """Conjunction over pure systems of the universal closure of their
    translations; nominal symbols become universally quantified variables.

    Nominals are renamed apart across systems (continuing the i0, i1, ...
    scheme) so that every binder in the sentence is distinct.
    """
    if not systems:
        raise ValueError("no systems to translate")
    counter = 0
    renamed: list[tuple[QuasiInequality, list[str]]] = []
    for q in systems:
        if fm.quasi_prop_vars(q):
            raise ValueError(f"system is not pure: {q}")
        names = fm.nominals_in_order(q)
        mapping = {n: f"i{counter + k}" for k, n in enumerate(names)}
        counter += len(names)
        renamed.append((
            QuasiInequality(
                tuple(Inequality(fm.rename_nominals(a.lhs, mapping),
                                 fm.rename_nominals(a.rhs, mapping))
                      for a in q.antecedents),
                Inequality(fm.rename_nominals(q.consequent.lhs, mapping),
                           fm.rename_nominals(q.consequent.rhs, mapping)),
            ),
            [mapping[n] for n in names],
        ))
    # one supply across all systems keeps every binder in the sentence distinct
    supply = VarSupply(reserved=frozenset(f"i{k}" for k in range(counter)))
    parts: list[FOFormula] = []
    for q, noms in renamed:
        phi = st_quasi(q, supply)
        for n in reversed(noms):
            phi = Forall(n, _subst_nominal_const(phi, n, n))
        parts.append(phi)
    out = parts[0]
    for p in parts[1:]:
        out = Conj(out, p)
    return out


# ---------------------------------------------------------------------------
# Printing and alpha-equivalence.
# ---------------------------------------------------------------------------

_PREC_IMPL = 1
_PREC_DISJ = 2
_PREC_CONJ = 3


def print_fo(phi: FOFormula) -> str:
    return _render_fo(phi, 0)


def _render_fo(phi: FOFormula, ctx: int) -> str:
    if isinstance(phi, Equal):
        return f"{phi.left.name} = {phi.right.name}"
    if isinstance(phi, NotEqual):
        return f"{phi.left.name} != {phi.right.name}"
    if isinstance(phi, Rel):
        return f"{phi.sym}({phi.left.name},{phi.right.name})"
    if isinstance(phi, Pred):
        return f"{phi.name}({phi.arg.name})"
    if isinstance(phi, Conj):
        s = f"{_render_fo(phi.left, _PREC_CONJ)} & {_render_fo(phi.right, _PREC_CONJ + 1)}"
        return f"({s})" if ctx > _PREC_CONJ else s
    if isinstance(phi, Disj):
        s = f"{_render_fo(phi.left, _PREC_DISJ)} | {_render_fo(phi.right, _PREC_DISJ + 1)}"
        return f"({s})" if ctx > _PREC_DISJ else s
    if isinstance(phi, Impl):
        s = f"{_render_fo(phi.left, _PREC_IMPL + 1)} -> {_render_fo(phi.right, _PREC_IMPL)}"
        return f"({s})" if ctx > _PREC_IMPL else s
    if isinstance(phi, Forall):
        s = f"forall {phi.var}. {_render_fo(phi.body, 0)}"
        return f"({s})" if ctx > 0 else s
    if isinstance(phi, Exists):
        s = f"exists {phi.var}. {_render_fo(phi.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"not an FO node: {phi!r}")


def alpha_eq(a: FOFormula, b: FOFormula) -> bool:
    """Equality up to renaming of bound variables (including quantified
    nominal symbols)."""
    return _alpha(a, b, {}, {}, 0)


def _alpha_term(s: FOTerm, t: FOTerm, ea: dict, eb: dict) -> bool:
    ra = ea.get(s.name, ("free", type(s).__name__, s.name))
    rb = eb.get(t.name, ("free", type(t).__name__, t.name))
    return ra == rb


def _alpha(a: FOFormula, b: FOFormula, ea: dict, eb: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, (Equal, NotEqual)):
        return _alpha_term(a.left, b.left, ea, eb) and _alpha_term(a.right, b.right, ea, eb)
    if isinstance(a, Rel):
        return a.sym == b.sym and _alpha_term(a.left, b.left, ea, eb) and _alpha_term(a.right, b.right, ea, eb)
    if isinstance(a, Pred):
        return a.name == b.name and _alpha_term(a.arg, b.arg, ea, eb)
    if isinstance(a, (Conj, Disj, Impl)):
        return _alpha(a.left, b.left, ea, eb, depth) and _alpha(a.right, b.right, ea, eb, depth)
    if isinstance(a, (Forall, Exists)):
        ea2 = dict(ea)
        eb2 = dict(eb)
        ea2[a.var] = depth
        eb2[b.var] = depth
        return _alpha(a.body, b.body, ea2, eb2, depth + 1)
    raise TypeError(f"not an FO node: {a!r}")
