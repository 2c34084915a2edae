"""Finite birelational frames with an admissible accessibility relation.

Worlds are indexed; world sets are int bitmasks and relations are tuples of
row bitmasks (row w = successors of w), since everything downstream is
exhaustive enumeration over frames with a handful of points.

The two preorders induce up-set topologies; the composite
interior-after-closure operator is a nucleus on the up-sets of the first
order, and its fixpoints form the complete Heyting algebra the modal
operators act on.  ``closure_c`` maps any set to the least fixpoint
containing it; the black diamond is that closure of the R-image.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Mapping, Union

from . import fo
from .formula import (
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
    nominal_names,
    prop_vars,
    quasi_nominal_names,
    quasi_prop_vars,
)


class FrameError(ValueError):
    """A frame file or frame tuple violates one of the frame axioms."""


class UnboundSymbol(KeyError):
    """A formula mentions a symbol the valuation/environment does not bind."""


class BudgetExceeded(RuntimeError):
    """A validity check would exceed its model-check budget."""


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class FMFrame:
    """(X, <=1, <=2, R) with <=2 a suborder of <=1 and R box-admissible."""

    worlds: tuple[str, ...]
    leq1: tuple[int, ...]
    leq2: tuple[int, ...]
    rel: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.worlds)

    @property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1

    def index(self, name: str) -> int:
        try:
            return self.worlds.index(name)
        except ValueError:
            raise UnboundSymbol(f"unknown world {name!r}") from None


def upset1(frame: FMFrame, y: int) -> int:
    out = 0
    for w in bits(y):
        out |= frame.leq1[w]
    return out


def interior1(frame: FMFrame, y: int) -> int:
    out = 0
    for w in range(frame.size):
        if frame.leq1[w] & ~y == 0:
            out |= 1 << w
    return out


def closure2(frame: FMFrame, y: int) -> int:
    out = 0
    for w in range(frame.size):
        if frame.leq2[w] & y:
            out |= 1 << w
    return out


def nucleus12(frame: FMFrame, y: int) -> int:
    return interior1(frame, closure2(frame, y))


def r_image(frame: FMFrame, y: int) -> int:
    out = 0
    for w in bits(y):
        out |= frame.rel[w]
    return out


def box_set(frame: FMFrame, y: int) -> int:
    out = 0
    for w in range(frame.size):
        if frame.rel[w] & ~y == 0:
            out |= 1 << w
    return out


@dataclass(frozen=True)
class ROAlgebra:
    """The fixpoint family of the nucleus with its Heyting-with-box structure."""

    frame: FMFrame
    carrier: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "_members", frozenset(self.carrier))

    def __contains__(self, y: int) -> bool:
        return y in self._members

    def meet(self, y: int, z: int) -> int:
        return y & z

    def join(self, y: int, z: int) -> int:
        return nucleus12(self.frame, y | z)

    def impl(self, y: int, z: int) -> int:
        return interior1(self.frame, (self.frame.full & ~y) | z)

    def box(self, y: int) -> int:
        return box_set(self.frame, y)

    def closure_c(self, y: int) -> int:
        return nucleus12(self.frame, upset1(self.frame, y))

    def bdiamond(self, y: int) -> int:
        return self.closure_c(r_image(self.frame, y))

    def join_all(self, members: list[int] | tuple[int, ...]) -> int:
        acc = 0
        for m in members:
            acc |= m
        return nucleus12(self.frame, acc)


def compute_ro12(frame: FMFrame) -> ROAlgebra:
    """Enumerate the nucleus fixpoints (ascending bitmask order)."""
    carrier = tuple(y for y in range(frame.full + 1) if nucleus12(frame, y) == y)
    return ROAlgebra(frame, carrier)


def check_admissible(frame: FMFrame, algebra: ROAlgebra | None = None) -> bool:
    algebra = algebra or compute_ro12(frame)
    return all(algebra.box(y) in algebra for y in algebra.carrier)


def closure_c(frame: FMFrame, algebra: ROAlgebra, y: int) -> int:
    return algebra.closure_c(y)


def black_diamond_ro(frame: FMFrame, algebra: ROAlgebra, y: int) -> int:
    return algebra.bdiamond(y)


# ---------------------------------------------------------------------------
# Models and satisfaction.
# ---------------------------------------------------------------------------

@dataclass
class Valuation:
    """prop_map sends variables to carrier bitmasks, nom_map nominals to worlds."""

    prop_map: Mapping[str, int]
    nom_map: Mapping[str, int]


@dataclass
class Model:
    frame: FMFrame
    valuation: Valuation


def _lookup_prop(model: Model, name: str) -> int:
    try:
        return model.valuation.prop_map[name]
    except KeyError:
        raise UnboundSymbol(f"unbound propositional variable {name!r}") from None


def _lookup_nom(model: Model, name: str) -> int:
    try:
        return model.valuation.nom_map[name]
    except KeyError:
        raise UnboundSymbol(f"unbound nominal {name!r}") from None


def satisfies(model: Model, w: int, f: Formula) -> bool:
    """Clause-by-clause satisfaction at a world (the definitional reading)."""
    frame = model.frame
    if isinstance(f, PropVar):
        return bool(_lookup_prop(model, f.name) >> w & 1)
    if isinstance(f, Bot):
        return False
    if isinstance(f, Top):
        return True
    if isinstance(f, Nominal):
        i = _lookup_nom(model, f.name)
        return all(
            any(frame.leq1[i] >> u & 1 for u in bits(frame.leq2[v]))
            for v in bits(frame.leq1[w])
        )
    if isinstance(f, And):
        return satisfies(model, w, f.left) and satisfies(model, w, f.right)
    if isinstance(f, Or):
        return all(
            any(satisfies(model, u, f.left) or satisfies(model, u, f.right)
                for u in bits(frame.leq2[v]))
            for v in bits(frame.leq1[w])
        )
    if isinstance(f, Implies):
        return all(
            (not satisfies(model, v, f.left)) or satisfies(model, v, f.right)
            for v in bits(frame.leq1[w])
        )
    if isinstance(f, Box):
        return all(satisfies(model, v, f.body) for v in bits(frame.rel[w]))
    if isinstance(f, BlackDiamond):
        return all(
            any(
                any(
                    any(frame.rel[s] >> t & 1 and satisfies(model, s, f.body)
                        for s in range(frame.size))
                    for t in bits(_down1(frame, u))
                )
                for u in bits(frame.leq2[v])
            )
            for v in bits(frame.leq1[w])
        )
    raise TypeError(f"not a formula node: {f!r}")


def _down1(frame: FMFrame, u: int) -> int:
    out = 0
    for t in range(frame.size):
        if frame.leq1[t] >> u & 1:
            out |= 1 << t
    return out


def truth_set(model: Model, f: Formula) -> int:
    """Pointwise satisfaction as a bitmask, computed bottom-up.

    Each connective's set is the pointwise reading of its clause (for the
    quantified clauses this unfolds to interior/closure applications).
    """
    frame = model.frame
    memo: dict[Formula, int] = {}

    def go(g: Formula) -> int:
        cached = memo.get(g)
        if cached is not None:
            return cached
        if isinstance(g, PropVar):
            out = _lookup_prop(model, g.name)
        elif isinstance(g, Bot):
            out = 0
        elif isinstance(g, Top):
            out = frame.full
        elif isinstance(g, Nominal):
            out = nucleus12(frame, frame.leq1[_lookup_nom(model, g.name)])
        elif isinstance(g, And):
            out = go(g.left) & go(g.right)
        elif isinstance(g, Or):
            out = nucleus12(frame, go(g.left) | go(g.right))
        elif isinstance(g, Implies):
            out = interior1(frame, (frame.full & ~go(g.left)) | go(g.right))
        elif isinstance(g, Box):
            out = box_set(frame, go(g.body))
        elif isinstance(g, BlackDiamond):
            out = nucleus12(frame, upset1(frame, r_image(frame, go(g.body))))
        else:
            raise TypeError(f"not a formula node: {g!r}")
        memo[g] = out
        return out

    return go(f)


def truth_set_algebra(model: Model, algebra: ROAlgebra, f: Formula) -> int:
    """Truth set computed by folding the algebra operations (the dual route
    to the satisfaction clauses); asserts closure under every step."""
    if isinstance(f, PropVar):
        out = _lookup_prop(model, f.name)
    elif isinstance(f, Bot):
        out = 0
    elif isinstance(f, Top):
        out = model.frame.full
    elif isinstance(f, Nominal):
        out = algebra.closure_c(1 << _lookup_nom(model, f.name))
    elif isinstance(f, And):
        out = algebra.meet(truth_set_algebra(model, algebra, f.left),
                           truth_set_algebra(model, algebra, f.right))
    elif isinstance(f, Or):
        out = algebra.join(truth_set_algebra(model, algebra, f.left),
                           truth_set_algebra(model, algebra, f.right))
    elif isinstance(f, Implies):
        out = algebra.impl(truth_set_algebra(model, algebra, f.left),
                           truth_set_algebra(model, algebra, f.right))
    elif isinstance(f, Box):
        out = algebra.box(truth_set_algebra(model, algebra, f.body))
    elif isinstance(f, BlackDiamond):
        out = algebra.bdiamond(truth_set_algebra(model, algebra, f.body))
    else:
        raise TypeError(f"not a formula node: {f!r}")
    if out not in algebra:
        raise FrameError(f"operation left the carrier at {f}: {out:b}")
    return out


Checkable = Union[Formula, Inequality, QuasiInequality]


def holds_globally(model: Model, item: Checkable) -> bool:
    if isinstance(item, Formula):
        return truth_set(model, item) == model.frame.full
    if isinstance(item, Inequality):
        return truth_set(model, item.lhs) & ~truth_set(model, item.rhs) == 0
    if isinstance(item, QuasiInequality):
        if all(holds_globally(model, a) for a in item.antecedents):
            return holds_globally(model, item.consequent)
        return True
    raise TypeError(f"not checkable: {item!r}")


def _symbols(item: Checkable) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if isinstance(item, Formula):
        return tuple(sorted(prop_vars(item))), tuple(sorted(nominal_names(item)))
    if isinstance(item, Inequality):
        return (
            tuple(sorted(prop_vars(item.lhs) | prop_vars(item.rhs))),
            tuple(sorted(nominal_names(item.lhs) | nominal_names(item.rhs))),
        )
    if isinstance(item, QuasiInequality):
        return tuple(sorted(quasi_prop_vars(item))), tuple(sorted(quasi_nominal_names(item)))
    raise TypeError(f"not checkable: {item!r}")


def iter_valuations(frame: FMFrame, algebra: ROAlgebra, item: Checkable,
                    budget: int | None = 10 ** 6) -> Iterator[Valuation]:
    """All valuations of the symbols occurring in `item` (refuses over budget)."""
    props, noms = _symbols(item)
    count = len(algebra.carrier) ** len(props) * frame.size ** len(noms)
    if budget is not None and count > budget:
        raise BudgetExceeded(
            f"{count} valuations for {len(props)} variables and {len(noms)} nominals "
            f"exceeds the budget of {budget}"
        )
    import itertools
    for prop_choice in itertools.product(algebra.carrier, repeat=len(props)):
        prop_map = dict(zip(props, prop_choice))
        for nom_choice in itertools.product(range(frame.size), repeat=len(noms)):
            yield Valuation(prop_map, dict(zip(noms, nom_choice)))


def valid(frame: FMFrame, item: Checkable, budget: int | None = 10 ** 6,
          algebra: ROAlgebra | None = None) -> bool:
    """Validity by exhaustive valuation enumeration."""
    algebra = algebra or compute_ro12(frame)
    for val in iter_valuations(frame, algebra, item, budget):
        if not holds_globally(Model(frame, val), item):
            return False
    return True


# ---------------------------------------------------------------------------
# First-order evaluation (Tarskian, worlds as the domain).
# ---------------------------------------------------------------------------

def eval_fo(frame: FMFrame, env: Mapping[str, int], phi: fo.FOFormula,
            predicates: Mapping[str, int] | None = None) -> bool:
    """Evaluate an FO formula; env binds individual symbols to world indices,
    predicates bind predicate symbols to world sets (bitmasks).

    Results are memoized per (subformula, bindings of its free symbols), so
    sentences with deeply nested quantifiers stay cheap on small frames.
    """
    predicates = predicates or {}
    free_of: dict[int, tuple[str, ...]] = {}

    def collect(node: fo.FOFormula) -> frozenset[str]:
        key = id(node)
        if key in free_of:
            return frozenset(free_of[key])
        if isinstance(node, (fo.Equal, fo.NotEqual, fo.Rel)):
            out = frozenset({node.left.name, node.right.name})
        elif isinstance(node, fo.Pred):
            out = frozenset({node.arg.name})
        elif isinstance(node, (fo.Conj, fo.Disj, fo.Impl)):
            out = collect(node.left) | collect(node.right)
        else:
            out = collect(node.body) - {node.var}
        free_of[key] = tuple(sorted(out))
        return out

    collect(phi)
    scope = dict(env)
    memo: dict[tuple[int, tuple[int, ...]], bool] = {}

    def term(t: fo.WorldVar | fo.NominalConst) -> int:
        try:
            return scope[t.name]
        except KeyError:
            raise UnboundSymbol(f"unbound individual symbol {t.name!r}") from None

    def ev(node: fo.FOFormula) -> bool:
        try:
            key = (id(node), tuple(scope[v] for v in free_of[id(node)]))
        except KeyError as exc:
            raise UnboundSymbol(f"unbound individual symbol {exc.args[0]!r}") from None
        cached = memo.get(key)
        if cached is not None:
            return cached
        if isinstance(node, fo.Equal):
            out = term(node.left) == term(node.right)
        elif isinstance(node, fo.NotEqual):
            out = term(node.left) != term(node.right)
        elif isinstance(node, fo.Rel):
            row = {"leq1": frame.leq1, "leq2": frame.leq2, "R": frame.rel}[node.sym]
            out = bool(row[term(node.left)] >> term(node.right) & 1)
        elif isinstance(node, fo.Pred):
            try:
                mask = predicates[node.name]
            except KeyError:
                raise UnboundSymbol(f"unbound predicate {node.name!r}") from None
            out = bool(mask >> term(node.arg) & 1)
        elif isinstance(node, fo.Conj):
            out = ev(node.left) and ev(node.right)
        elif isinstance(node, fo.Disj):
            out = ev(node.left) or ev(node.right)
        elif isinstance(node, fo.Impl):
            out = (not ev(node.left)) or ev(node.right)
        elif isinstance(node, fo.Forall):
            out = True
            had = node.var in scope
            old = scope.get(node.var)
            for w in range(frame.size):
                scope[node.var] = w
                if not ev(node.body):
                    out = False
                    break
            if had:
                scope[node.var] = old
            else:
                scope.pop(node.var, None)
        elif isinstance(node, fo.Exists):
            out = False
            had = node.var in scope
            old = scope.get(node.var)
            for w in range(frame.size):
                scope[node.var] = w
                if ev(node.body):
                    out = True
                    break
            if had:
                scope[node.var] = old
            else:
                scope.pop(node.var, None)
        else:
            raise TypeError(f"not an FO node: {node!r}")
        memo[key] = out
        return out

    return ev(phi)


# ---------------------------------------------------------------------------
# Frame files.
# ---------------------------------------------------------------------------

def _close_reflexive_transitive(n: int, rows: list[int]) -> list[int]:
    for w in range(n):
        rows[w] |= 1 << w
    changed = True
    while changed:
        changed = False
        for w in range(n):
            acc = rows[w]
            for v in bits(rows[w]):
                acc |= rows[v]
            if acc != rows[w]:
                rows[w] = acc
                changed = True
    return rows


def _pairs_to_rows(n: int, pairs: list, index: dict[str, int], which: str) -> list[int]:
    rows = [0] * n
    for pair in pairs:
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise FrameError(f"{which}: expected a pair, got {pair!r}")
        a, b = pair
        if a not in index or b not in index:
            raise FrameError(f"{which}: unknown world in pair {pair!r}")
        rows[index[a]] |= 1 << index[b]
    return rows


def frame_from_dict(data: dict) -> FMFrame:
    """Build and validate a frame from its JSON form.

    leq1/leq2 give generator pairs; the reflexive-transitive closure is
    applied before the axioms are checked.  The first violated axiom is
    reported.
    """
    for key in ("worlds", "leq1", "leq2", "R"):
        if key not in data:
            raise FrameError(f"missing key {key!r}")
    worlds = tuple(data["worlds"])
    if not worlds:
        raise FrameError("frame needs at least one world")
    if len(set(worlds)) != len(worlds):
        raise FrameError("duplicate world names")
    n = len(worlds)
    index = {w: k for k, w in enumerate(worlds)}
    leq1 = _close_reflexive_transitive(n, _pairs_to_rows(n, data["leq1"], index, "leq1"))
    leq2 = _close_reflexive_transitive(n, _pairs_to_rows(n, data["leq2"], index, "leq2"))
    rel = _pairs_to_rows(n, data["R"], index, "R")
    for name, rows in (("leq1", leq1), ("leq2", leq2)):
        for a in range(n):
            for b in bits(rows[a]):
                if a != b and rows[b] >> a & 1:
                    raise FrameError(
                        f"{name} violates antisymmetry: {worlds[a]} and {worlds[b]} are equivalent"
                    )
    for w in range(n):
        if leq2[w] & ~leq1[w]:
            v = next(bits(leq2[w] & ~leq1[w]))
            raise FrameError(f"leq2 is not contained in leq1: ({worlds[w]}, {worlds[v]})")
    frame = FMFrame(worlds, tuple(leq1), tuple(leq2), tuple(rel))
    algebra = compute_ro12(frame)
    for y in algebra.carrier:
        if algebra.box(y) not in algebra:
            members = "{" + ",".join(worlds[i] for i in bits(y)) + "}"
            raise FrameError(f"R is not admissible: box of {members} is not regular open")
    return frame


def frame_to_dict(frame: FMFrame) -> dict:
    def pairs(rows: tuple[int, ...], skip_diagonal: bool) -> list[list[str]]:
        out = []
        for a in range(frame.size):
            for b in bits(rows[a]):
                if skip_diagonal and a == b:
                    continue
                out.append([frame.worlds[a], frame.worlds[b]])
        return out

    return {
        "worlds": list(frame.worlds),
        "leq1": pairs(frame.leq1, True),
        "leq2": pairs(frame.leq2, True),
        "R": pairs(frame.rel, False),
    }


def load_frame(path: str) -> FMFrame:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FrameError(f"invalid JSON in {path}: {exc}") from exc
    return frame_from_dict(data)
