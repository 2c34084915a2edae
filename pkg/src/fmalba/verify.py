"""Frame enumeration and desk-scale verification suites.

Everything here treats the finite-frame quantifiers of the metatheory by
exhaustive enumeration: all labeled frames up to a size bound, all
valuations of the symbols in play.  The suites are the independent oracle
for the engine: crosscheck compares modal validity against the first-order
correspondent frame by frame; rule_soundness_suite replays recorded rule
applications and checks the before/after equivalence at the appropriate
level (per valuation for splitting/residuation/deleting/distribution, per
frame for the approximation and Ackermann rules); algebra_suite grinds the
algebraic laws the rules lean on.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fo
from .alba import AlbaOutput, TraceStep, run_alba
from .fo import correspondent
from .formula import (
    And,
    BOT,
    BlackDiamond,
    Box,
    Formula,
    Implies,
    Inequality,
    Nominal,
    Or,
    PropVar,
    QuasiInequality,
    TOP,
    nominal_names,
    parse_formula,
    print_formula,
    prop_vars,
)
from .frames import (
    FMFrame,
    Model,
    ROAlgebra,
    Valuation,
    bits,
    compute_ro12,
    eval_fo,
    frame_to_dict,
    holds_globally,
    satisfies,
    truth_set,
    valid,
)
from .inductive import classify_inductive

WORLD_NAMES = ("a", "b", "c", "d", "e")

FIXED_CORPUS = (
    "[]p -> p",
    "[]p -> [][]p",
    "p -> []p",
    "([]q & (q -> []p)) -> []p",
    "p -> p",
)


# ---------------------------------------------------------------------------
# Frame enumeration.
# ---------------------------------------------------------------------------

def _is_transitive(rows: tuple[int, ...]) -> bool:
    return all(rows[v] & ~rows[w] == 0 for w in range(len(rows)) for v in bits(rows[w]))


def _is_antisymmetric(rows: tuple[int, ...]) -> bool:
    n = len(rows)
    return not any(w != v and rows[v] >> w & 1 for w in range(n) for v in bits(rows[w]))


@lru_cache(maxsize=None)
def partial_orders(n: int) -> tuple[tuple[int, ...], ...]:
    """All labeled partial orders on n points, as reflexive row masks."""
    if not 1 <= n <= 5:
        raise ValueError(f"point count must be between 1 and 5, got {n}")
    diag = [1 << w for w in range(n)]
    others = [[1 << v for v in range(n) if v != w] for w in range(n)]
    out = []
    for choice in itertools.product(*(range(1 << (n - 1)) for _ in range(n))):
        rows = []
        for w in range(n):
            row = diag[w]
            for k in range(n - 1):
                if choice[w] >> k & 1:
                    row |= others[w][k]
            rows.append(row)
        rows = tuple(rows)
        if _is_antisymmetric(rows) and _is_transitive(rows):
            out.append(rows)
    return tuple(out)


@lru_cache(maxsize=None)
def suborders(rows: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """All partial orders contained in `rows` (they inherit antisymmetry)."""
    n = len(rows)
    strict = [(w, v) for w in range(n) for v in bits(rows[w]) if v != w]
    out = []
    for k in range(len(strict) + 1):
        for combo in itertools.combinations(strict, k):
            sub = [1 << w for w in range(n)]
            for (w, v) in combo:
                sub[w] |= 1 << v
            sub = tuple(sub)
            if _is_transitive(sub):
                out.append(sub)
    return tuple(dict.fromkeys(out))


def _carrier_for(n: int, leq1: tuple[int, ...], leq2: tuple[int, ...]) -> tuple[int, ...]:
    full = (1 << n) - 1
    carrier = []
    for y in range(full + 1):
        c2 = 0
        for w in range(n):
            if leq2[w] & y:
                c2 |= 1 << w
        i1 = 0
        for w in range(n):
            if leq1[w] & ~c2 == 0:
                i1 |= 1 << w
        if i1 == y:
            carrier.append(y)
    return tuple(carrier)


def _permute_rows(rows: tuple[int, ...], perm: tuple[int, ...]) -> tuple[int, ...]:
    n = len(rows)
    out = [0] * n
    for w in range(n):
        row = 0
        for v in bits(rows[w]):
            row |= 1 << perm[v]
        out[perm[w]] = row
    return tuple(out)


def _canonical_key(leq1, leq2, rel) -> tuple:
    n = len(leq1)
    return min(
        (_permute_rows(leq1, p), _permute_rows(leq2, p), _permute_rows(rel, p))
        for p in itertools.permutations(range(n))
    )


def enumerate_frames(n: int, dedup: bool = False):
    """All labeled modal frames on n points, in a fixed deterministic order.

    With dedup=True only one representative per isomorphism class is
    emitted (the one whose encoding is permutation-minimal).
    """
    if not 1 <= n <= 5:
        raise ValueError(f"point count must be between 1 and 5, got {n}")
    worlds = WORLD_NAMES[:n]
    full = (1 << n) - 1
    for leq1 in partial_orders(n):
        for leq2 in suborders(leq1):
            carrier = _carrier_for(n, leq1, leq2)
            members = frozenset(carrier)
            for rel_code in range(1 << (n * n)):
                rel = tuple((rel_code >> (w * n)) & full for w in range(n))
                ok = True
                for y in carrier:
                    box_y = 0
                    for w in range(n):
                        if rel[w] & ~y == 0:
                            box_y |= 1 << w
                    if box_y not in members:
                        ok = False
                        break
                if not ok:
                    continue
                if dedup and (leq1, leq2, rel) != _canonical_key(leq1, leq2, rel):
                    continue
                yield FMFrame(worlds, leq1, leq2, rel)


def count_frames(n: int, dedup: bool = False) -> int:
    return sum(1 for _ in enumerate_frames(n, dedup))


# ---------------------------------------------------------------------------
# Random frames and valuations (for the 4-point samples).
# ---------------------------------------------------------------------------

def _close_transitive(n: int, rows: list[int]) -> tuple[int, ...]:
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
    return tuple(rows)


def sample_frame(rng: random.Random, n: int, attempts: int = 64) -> FMFrame:
    """One random admissible frame on n points (R falls back to empty,
    which is always admissible)."""
    perm = list(range(n))
    rng.shuffle(perm)
    rows = [1 << w for w in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.45:
                rows[perm[a]] |= 1 << perm[b]
    leq1 = _close_transitive(n, rows)
    rows2 = [1 << w for w in range(n)]
    for w in range(n):
        for v in bits(leq1[w]):
            if v != w and rng.random() < 0.5:
                rows2[w] |= 1 << v
    leq2 = _close_transitive(n, rows2)
    worlds = WORLD_NAMES[:n]
    skeleton = FMFrame(worlds, leq1, leq2, tuple([0] * n))
    algebra = compute_ro12(skeleton)
    members = frozenset(algebra.carrier)
    full = (1 << n) - 1
    for _ in range(attempts):
        rel = tuple(
            sum(1 << v for v in range(n) if rng.random() < 0.3) & full for _ in range(n)
        )
        frame = FMFrame(worlds, leq1, leq2, rel)
        if all(
            sum(1 << w for w in range(n) if rel[w] & ~y == 0) in members
            for y in algebra.carrier
        ):
            return frame
    return skeleton


def sample_valuation(rng: random.Random, algebra: ROAlgebra,
                     props: tuple[str, ...], noms: tuple[str, ...]) -> Valuation:
    return Valuation(
        {p: rng.choice(algebra.carrier) for p in props},
        {i: rng.randrange(algebra.frame.size) for i in noms},
    )


# ---------------------------------------------------------------------------
# Inductive-formula corpus.
# ---------------------------------------------------------------------------

def _depth(f: Formula) -> int:
    if isinstance(f, (And, Or, Implies)):
        return 1 + max(_depth(f.left), _depth(f.right))
    if isinstance(f, (Box, BlackDiamond)):
        return 1 + _depth(f.body)
    return 0


def _sample_pos(rng: random.Random, allowed: tuple[str, ...], d: int) -> Formula:
    choices = ["var"] * 4 + ["bot", "top"]
    if d > 0:
        choices += ["box"] * 2 + ["and", "or"]
    kind = rng.choice(choices)
    if kind == "var" and allowed:
        return PropVar(rng.choice(allowed))
    if kind == "bot":
        return BOT
    if kind == "top":
        return TOP
    if kind == "box" and d > 0:
        return Box(_sample_pos(rng, allowed, d - 1))
    if kind in ("and", "or") and d > 0:
        ctor = And if kind == "and" else Or
        return ctor(_sample_pos(rng, allowed, d - 1), _sample_pos(rng, allowed, d - 1))
    return TOP


def _sample_pia(rng: random.Random, chain: tuple[str, ...], main_idx: int, d: int) -> Formula:
    main = chain[main_idx]
    below = chain[:main_idx]
    choices = ["var"] * 3 + ["top"]
    if d > 0:
        choices += ["box"] * 2
        if below:
            choices += ["impl"] * 2
    kind = rng.choice(choices)
    if kind == "var":
        return PropVar(main)
    if kind == "box" and d > 0:
        return Box(_sample_pia(rng, chain, main_idx, d - 1))
    if kind == "impl" and d > 0:
        return Implies(_sample_pos(rng, below, d - 1), _sample_pia(rng, chain, main_idx, d - 1))
    return TOP


def _sample_ant(rng: random.Random, chain: tuple[str, ...], d: int) -> Formula:
    if d > 0 and rng.random() < 0.35:
        ctor = And if rng.random() < 0.7 else Or
        return ctor(_sample_ant(rng, chain, d - 1), _sample_ant(rng, chain, d - 1))
    return _sample_pia(rng, chain, rng.randrange(len(chain)), d)


def _sample_suc(rng: random.Random, chain: tuple[str, ...], d: int) -> Formula:
    roll = rng.random()
    if d > 0 and roll < 0.25:
        return Box(_sample_suc(rng, chain, d - 1))
    if d > 0 and roll < 0.45:
        q = rng.randrange(len(chain))
        return Implies(_sample_pia(rng, chain, q, d - 1), _sample_suc(rng, chain, d - 1))
    if d > 0 and roll < 0.55:
        return And(_sample_suc(rng, chain, d - 1), _sample_suc(rng, chain, d - 1))
    return _sample_pos(rng, chain, d)


def inductive_corpus(seed: int = 0, min_count: int = 20, max_vars: int = 3,
                     max_depth: int = 4) -> list[Formula]:
    """Fixed formulas plus seeded grammar samples, deduplicated, all of
    which classify as inductive."""
    corpus: list[Formula] = [parse_formula(s) for s in FIXED_CORPUS]
    seen = set(corpus)
    rng = random.Random(seed)
    names = ("p", "q", "r")[:max_vars]
    guard = 0
    while len(corpus) < min_count + len(FIXED_CORPUS):
        guard += 1
        if guard > 100_000:
            raise RuntimeError("corpus sampling did not converge")
        k = rng.randint(1, len(names))
        chain = tuple(rng.sample(names, k))
        f = Implies(_sample_ant(rng, chain, 2), _sample_suc(rng, chain, 2))
        if f in seen or _depth(f) > max_depth or len(prop_vars(f)) > max_vars:
            continue
        if not prop_vars(f):
            continue
        if classify_inductive(f) is None:
            continue
        seen.add(f)
        corpus.append(f)
    return corpus


# ---------------------------------------------------------------------------
# Crosscheck: modal validity against the first-order correspondent.
# ---------------------------------------------------------------------------

@dataclass
class CrosscheckReport:
    formula: str
    order: str
    systems: list[str]
    sentence: str
    frames_checked: dict[int, int] = field(default_factory=dict)
    mismatches: list[str] = field(default_factory=list)
    budget_exhausted: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.budget_exhausted

    def to_dict(self) -> dict:
        return {
            "formula": self.formula,
            "order": self.order,
            "systems": self.systems,
            "sentence": self.sentence,
            "frames_checked": {str(k): v for k, v in self.frames_checked.items()},
            "mismatches": self.mismatches,
            "budget_exhausted": self.budget_exhausted,
            "elapsed": self.elapsed,
            "ok": self.ok,
        }


def crosscheck(f: Formula, max_n: int = 3, budget: int | None = 10 ** 6,
               dedup: bool = False) -> CrosscheckReport:
    """Run the engine once, then compare frame validity of the input with
    the truth of its correspondent on every frame up to max_n points."""
    started = time.monotonic()
    omega = classify_inductive(f)
    output = run_alba(f)
    sentence = correspondent(output.systems)
    report = CrosscheckReport(
        formula=print_formula(f),
        order=str(omega) if omega is not None else "none",
        systems=[str(s) for s in output.systems],
        sentence=fo.print_fo(sentence),
    )
    for n in range(1, max_n + 1):
        count = 0
        for frame in enumerate_frames(n, dedup=dedup):
            count += 1
            try:
                modal = valid(frame, f, budget=budget)
            except Exception as exc:
                report.budget_exhausted.append(f"n={n} frame#{count - 1}: {exc}")
                continue
            first_order = eval_fo(frame, {}, sentence)
            if modal != first_order:
                report.mismatches.append(
                    f"n={n} frame#{count - 1} modal={modal} fo={first_order}: {frame_to_dict(frame)}"
                )
        report.frames_checked[n] = count
    report.elapsed = time.monotonic() - started
    return report


# ---------------------------------------------------------------------------
# Per-rule soundness.
# ---------------------------------------------------------------------------

VALUATION_LEVEL_RULES = frozenset(
    {"distribute", "split_ineq", "split", "residuate_ants", "residuate_cons", "delete"}
)
FRAME_LEVEL_RULES = frozenset({"first_approx", "approx", "ackermann"})


def _as_items(state) -> tuple[QuasiInequality | Inequality, ...]:
    if isinstance(state, tuple):
        return state
    return (state,)


def _item_inequalities(item) -> tuple[Inequality, ...]:
    if isinstance(item, Inequality):
        return (item,)
    return item.antecedents + (item.consequent,)


def _tagged_ineq_symbols(ineq: Inequality) -> frozenset[tuple[str, str]]:
    return frozenset(
        {("prop", s) for s in prop_vars(ineq.lhs) | prop_vars(ineq.rhs)}
        | {("nom", s) for s in nominal_names(ineq.lhs) | nominal_names(ineq.rhs)}
    )


@dataclass
class RuleSoundnessReport:
    steps_total: int
    steps_checked: int
    frames_checked: dict[int, int] = field(default_factory=dict)
    mismatches: list[str] = field(default_factory=list)
    budget_exhausted: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.budget_exhausted

    def to_dict(self) -> dict:
        return {
            "steps_total": self.steps_total,
            "steps_checked": self.steps_checked,
            "frames_checked": {str(k): v for k, v in self.frames_checked.items()},
            "mismatches": self.mismatches,
            "budget_exhausted": self.budget_exhausted,
            "elapsed": self.elapsed,
            "ok": self.ok,
        }


class _FrameTables:
    """Per-frame truth tables of inequalities over their own symbols.

    Symbols are ("prop", name) or ("nom", name) pairs, since the two sorts
    have separate namespaces.  A table is a numpy bool array shaped over
    the global symbol order, with singleton axes for symbols the inequality
    does not mention, so tables broadcast against each other; entry =
    global truth under the valuation picked out by the indices (variables
    range over the carrier, nominals over the worlds).
    """

    def __init__(self, frame: FMFrame, symbols: tuple[tuple[str, str], ...]):
        self.frame = frame
        self.algebra = compute_ro12(frame)
        self.symbols = symbols
        self.domains = {
            s: (self.algebra.carrier if s[0] == "prop" else tuple(range(frame.size)))
            for s in symbols
        }
        self._cache: dict[Inequality, np.ndarray] = {}

    def space(self, item_symbols: tuple[tuple[str, str], ...]) -> int:
        size = 1
        for s in item_symbols:
            size *= len(self.domains[s])
        return size

    def ineq_table(self, ineq: Inequality) -> np.ndarray:
        cached = self._cache.get(ineq)
        if cached is not None:
            return cached
        own_set = _tagged_ineq_symbols(ineq)
        own = tuple(s for s in self.symbols if s in own_set)
        shape = tuple(len(self.domains[s]) if s in own else 1 for s in self.symbols)
        flat = []
        for combo in itertools.product(*(self.domains[s] for s in own)):
            prop_map = {}
            nom_map = {}
            for (kind, name), v in zip(own, combo):
                if kind == "prop":
                    prop_map[name] = v
                else:
                    nom_map[name] = v
            model = Model(self.frame, Valuation(prop_map, nom_map))
            flat.append(truth_set(model, ineq.lhs) & ~truth_set(model, ineq.rhs) == 0)
        table = np.array(flat, dtype=bool).reshape(shape)
        self._cache[ineq] = table
        return table

    def item_table(self, item: QuasiInequality | Inequality) -> np.ndarray:
        if isinstance(item, Inequality):
            return self.ineq_table(item)
        cons = self.ineq_table(item.consequent)
        if not item.antecedents:
            return cons
        ants = self.ineq_table(item.antecedents[0])
        for a in item.antecedents[1:]:
            ants = ants & self.ineq_table(a)
        return ~ants | cons

    def side_table(self, items: tuple) -> np.ndarray:
        out = self.item_table(items[0])
        for item in items[1:]:
            out = out & self.item_table(item)
        return out


def collect_trace_steps(corpus: list[Formula]) -> list[TraceStep]:
    """Deduplicated trace steps from running the engine on the corpus."""
    seen = set()
    steps: list[TraceStep] = []
    for f in corpus:
        output: AlbaOutput = run_alba(f)
        for step in output.trace.steps:
            key = (step.rule, step.before, step.after)
            if key not in seen:
                seen.add(key)
                steps.append(step)
    return steps


def rule_soundness_suite(max_n: int = 3, seed: int = 0, min_corpus: int = 20,
                         dedup: bool = True, budget: int = 10 ** 6,
                         corpus: list[Formula] | None = None) -> RuleSoundnessReport:
    started = time.monotonic()
    if corpus is None:
        corpus = inductive_corpus(seed=seed, min_count=min_corpus)
    steps = collect_trace_steps(corpus)

    prepared = []
    all_symbols: set[tuple[str, str]] = set()
    for step in steps:
        before = _as_items(step.before)
        after = _as_items(step.after)
        syms: set[tuple[str, str]] = set()
        for item in before + after:
            for ineq in _item_inequalities(item):
                syms |= _tagged_ineq_symbols(ineq)
        all_symbols |= syms
        level = "valuation" if step.rule in VALUATION_LEVEL_RULES else "frame"
        prepared.append((step, before, after, tuple(sorted(syms)), level))

    symbol_order = tuple(sorted(all_symbols))

    report = RuleSoundnessReport(steps_total=len(steps), steps_checked=len(prepared))
    for n in range(1, max_n + 1):
        count = 0
        for frame in enumerate_frames(n, dedup=dedup):
            count += 1
            tables = _FrameTables(frame, symbol_order)
            for idx, (step, before, after, syms, level) in enumerate(prepared):
                if tables.space(syms) > budget:
                    report.budget_exhausted.append(
                        f"step#{idx} {step.rule}: {tables.space(syms)} valuations exceed {budget}"
                    )
                    continue
                b = tables.side_table(before)
                a = tables.side_table(after)
                if level == "valuation":
                    agree = bool(np.array_equal(*np.broadcast_arrays(b, a)))
                else:
                    agree = bool(b.all()) == bool(a.all())
                if not agree:
                    report.mismatches.append(
                        f"step#{idx} rule={step.rule} level={level} n={n} frame#{count - 1}: "
                        f"{step.before} ==> {step.after}"
                    )
        report.frames_checked[n] = count
    report.elapsed = time.monotonic() - started
    return report


# ---------------------------------------------------------------------------
# Algebraic laws.
# ---------------------------------------------------------------------------

@dataclass
class AlgebraReport:
    frames_checked: dict[str, int] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "frames_checked": self.frames_checked,
            "violations": self.violations,
            "elapsed": self.elapsed,
            "ok": self.ok,
        }


def _upsets1(frame: FMFrame) -> list[int]:
    from .frames import upset1
    return [y for y in range(frame.full + 1) if upset1(frame, y) == y]


def check_algebra_laws(frame: FMFrame, exhaustive_families: bool = True,
                       rng: random.Random | None = None) -> list[str]:
    """All algebraic laws on one frame; returns violation descriptions."""
    from .frames import interior1, nucleus12, r_image, upset1

    violations = []
    algebra = compute_ro12(frame)
    carrier = algebra.carrier
    full = frame.full

    def note(law: str, detail: str) -> None:
        violations.append(f"{law}: {detail} on {frame_to_dict(frame)}")

    ups = _upsets1(frame)
    for u in ups:
        ju = nucleus12(frame, u)
        if u & ~ju:
            note("nucleus-inflationary", f"U={u:b}")
        if nucleus12(frame, ju) != ju:
            note("nucleus-idempotent", f"U={u:b}")
    for u in ups:
        for v in ups:
            if nucleus12(frame, u & v) != nucleus12(frame, u) & nucleus12(frame, v):
                note("nucleus-meet-preserving", f"U={u:b} V={v:b}")
    if nucleus12(frame, full) != full:
        note("nucleus-top", "j(X) != X")

    # The carrier has all set-theoretic meets.
    for y in carrier:
        for z in carrier:
            if (y & z) not in algebra:
                note("carrier-meet-closed", f"Y={y:b} Z={z:b}")

    # Join density: every member is the join of the closures of its points.
    for y in carrier:
        pieces = [algebra.closure_c(1 << x) for x in bits(y)]
        if algebra.join_all(pieces) != y:
            note("join-density", f"Y={y:b}")

    # c is left adjoint to inclusion: c(A) <= Z iff A <= Z, all A, carrier Z.
    for a in range(full + 1):
        ca = algebra.closure_c(a)
        for z in carrier:
            if (ca & ~z == 0) != (a & ~z == 0):
                note("closure-adjunction", f"A={a:b} Z={z:b}")

    # Black diamond is left adjoint to box on the carrier.
    for y in carrier:
        dy = algebra.bdiamond(y)
        for z in carrier:
            if (dy & ~z == 0) != (y & ~algebra.box(z) == 0):
                note("diamond-box-adjunction", f"Y={y:b} Z={z:b}")

    # Meet/implication residuation on the carrier.
    for y in carrier:
        for w in carrier:
            for z in carrier:
                if ((y & w) & ~z == 0) != (y & ~algebra.impl(w, z) == 0):
                    note("residuation", f"Y={y:b} W={w:b} Z={z:b}")

    # Box preserves arbitrary meets of carrier members.
    if exhaustive_families:
        families = []
        for k in range(len(carrier) + 1):
            families.extend(itertools.combinations(carrier, k))
    else:
        assert rng is not None
        families = [()]
        families.extend((m,) for m in carrier)
        families.extend(itertools.combinations(carrier, 2))
        for _ in range(200):
            k = rng.randint(3, max(3, len(carrier)))
            families.append(tuple(rng.sample(carrier, min(k, len(carrier)))))
    for fam in families:
        meet = full
        for m in fam:
            meet &= m
        lhs = algebra.box(meet)
        rhs = full
        for m in fam:
            rhs &= algebra.box(m)
        if lhs != rhs:
            note("complete-multiplicativity", f"family={[f'{m:b}' for m in fam]}")

    return violations


_AGREEMENT_FORMULAS = (
    "p & q", "p | q", "p -> q", "[]p", "[](p -> q) | q",
    "p -> (q -> p)", "[]p & (q | top)", "bot -> p",
)


def check_clause_algebra_agreement(frame: FMFrame) -> list[str]:
    """Truth sets via satisfaction clauses must equal the algebraic fold,
    over every two-variable valuation and a fixed basic formula corpus."""
    import itertools as it

    from .frames import FrameError, truth_set_algebra

    violations = []
    algebra = compute_ro12(frame)
    formulas = [parse_formula(s) for s in _AGREEMENT_FORMULAS]
    for pv, qv in it.product(algebra.carrier, repeat=2):
        model = Model(frame, Valuation({"p": pv, "q": qv}, {}))
        for g in formulas:
            clause = truth_set(model, g)
            try:
                algebraic = truth_set_algebra(model, algebra, g)
            except FrameError as exc:
                violations.append(f"clause-algebra: {exc} on {frame_to_dict(frame)}")
                continue
            if clause != algebraic:
                violations.append(
                    f"clause-algebra: {g} differs ({clause:b} vs {algebraic:b}) "
                    f"on {frame_to_dict(frame)} V(p)={pv:b} V(q)={qv:b}"
                )
    return violations


def algebra_suite(max_n: int = 3, sample_4: int = 100, seed: int = 0,
                  dedup: bool = False) -> AlgebraReport:
    started = time.monotonic()
    report = AlgebraReport()
    for n in range(1, max_n + 1):
        count = 0
        for frame in enumerate_frames(n, dedup=dedup):
            count += 1
            report.violations.extend(check_algebra_laws(frame, exhaustive_families=True))
            # clause/algebra agreement is dearer; exhaustive on tiny frames,
            # strided on three-point ones
            if n <= 2 or count % 40 == 1:
                report.violations.extend(check_clause_algebra_agreement(frame))
        report.frames_checked[str(n)] = count
    if sample_4 > 0:
        rng = random.Random(seed)
        for _ in range(sample_4):
            frame = sample_frame(rng, 4)
            report.violations.extend(
                check_algebra_laws(frame, exhaustive_families=False, rng=rng)
            )
            report.violations.extend(check_clause_algebra_agreement(frame))
        report.frames_checked["4(sampled)"] = sample_4
    report.elapsed = time.monotonic() - started
    return report


# ---------------------------------------------------------------------------
# Translation adequacy.
# ---------------------------------------------------------------------------

@dataclass
class AdequacyReport:
    triples: int = 0
    discrepancies: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.discrepancies

    def to_dict(self) -> dict:
        return {
            "triples": self.triples,
            "discrepancies": self.discrepancies,
            "elapsed": self.elapsed,
            "ok": self.ok,
        }


def _sample_expanded_formula(rng: random.Random, d: int) -> Formula:
    leaves = [PropVar("p"), PropVar("q"), BOT, TOP, Nominal("i0"), Nominal("i1")]
    if d == 0:
        return rng.choice(leaves)
    roll = rng.randrange(9)
    if roll <= 2:
        return rng.choice(leaves)
    if roll == 3:
        return And(_sample_expanded_formula(rng, d - 1), _sample_expanded_formula(rng, d - 1))
    if roll == 4:
        return Or(_sample_expanded_formula(rng, d - 1), _sample_expanded_formula(rng, d - 1))
    if roll == 5:
        return Implies(_sample_expanded_formula(rng, d - 1), _sample_expanded_formula(rng, d - 1))
    if roll in (6, 7):
        return Box(_sample_expanded_formula(rng, d - 1))
    return BlackDiamond(_sample_expanded_formula(rng, d - 1))


def _fo_env_for(model: Model) -> tuple[dict[str, int], dict[str, int]]:
    env = dict(model.valuation.nom_map)
    preds = {fo.pred_name(p): mask for p, mask in model.valuation.prop_map.items()}
    return env, preds


def adequacy_suite(count: int = 500, seed: int = 0, max_model_size: int = 4,
                   depth: int = 3) -> AdequacyReport:
    """Random (item, model, world) checks that satisfaction agrees with the
    translated formula's first-order truth."""
    started = time.monotonic()
    rng = random.Random(seed)
    report = AdequacyReport()
    props = ("p", "q")
    noms = ("i0", "i1")
    while report.triples < count:
        n = rng.randint(1, max_model_size)
        frame = sample_frame(rng, n)
        algebra = compute_ro12(frame)
        val = sample_valuation(rng, algebra, props, noms)
        model = Model(frame, val)
        env, preds = _fo_env_for(model)
        kind = rng.random()
        if kind < 0.6:
            f = _sample_expanded_formula(rng, depth)
            w = rng.randrange(frame.size)
            lhs = satisfies(model, w, f)
            supply = fo.VarSupply(reserved=frozenset(noms))
            x = supply.fresh()
            rhs = eval_fo(frame, {**env, x: w}, fo.st(x, f, supply), preds)
            tag = f"{print_formula(f)} at {frame.worlds[w]}"
        elif kind < 0.85:
            ineq = Inequality(_sample_expanded_formula(rng, depth - 1),
                              _sample_expanded_formula(rng, depth - 1))
            lhs = holds_globally(model, ineq)
            rhs = eval_fo(frame, env, fo.st_inequality(ineq, fo.VarSupply(reserved=frozenset(noms))), preds)
            tag = str(ineq)
        else:
            k = rng.randint(0, 2)
            quasi = QuasiInequality(
                tuple(Inequality(_sample_expanded_formula(rng, depth - 2),
                                 _sample_expanded_formula(rng, depth - 2)) for _ in range(k)),
                Inequality(_sample_expanded_formula(rng, depth - 2),
                           _sample_expanded_formula(rng, depth - 2)),
            )
            lhs = holds_globally(model, quasi)
            rhs = eval_fo(frame, env, fo.st_quasi(quasi, fo.VarSupply(reserved=frozenset(noms))), preds)
            tag = str(quasi)
        report.triples += 1
        if lhs != rhs:
            report.discrepancies.append(
                f"{tag}: satisfies={lhs} fo={rhs} on {frame_to_dict(frame)} "
                f"V={val.prop_map} noms={val.nom_map}"
            )
    report.elapsed = time.monotonic() - started
    return report


# ---------------------------------------------------------------------------
# Success of the engine on the corpus, and the full selftest.
# ---------------------------------------------------------------------------

@dataclass
class SuccessReport:
    formulas: int = 0
    failures: list[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "formulas": self.formulas,
            "failures": self.failures,
            "elapsed": self.elapsed,
            "ok": self.ok,
        }


def success_suite(seed: int = 0, min_corpus: int = 20,
                  corpus: list[Formula] | None = None) -> SuccessReport:
    """Classification and elimination must both succeed, with pure output,
    on every corpus formula."""
    from .alba import AlbaFailure
    from .formula import quasi_prop_vars

    started = time.monotonic()
    if corpus is None:
        corpus = inductive_corpus(seed=seed, min_count=min_corpus)
    report = SuccessReport(formulas=len(corpus))
    for f in corpus:
        if classify_inductive(f) is None:
            report.failures.append(f"not classified inductive: {print_formula(f)}")
            continue
        try:
            out = run_alba(f)
        except AlbaFailure as exc:
            report.failures.append(f"elimination failed on {print_formula(f)}: {exc}")
            continue
        for sys in out.systems:
            if quasi_prop_vars(sys):
                report.failures.append(f"impure output for {print_formula(f)}: {sys}")
    report.elapsed = time.monotonic() - started
    return report


@dataclass
class SelftestReport:
    success: SuccessReport
    algebra: AlgebraReport
    rules: RuleSoundnessReport
    adequacy: AdequacyReport
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.success.ok and self.algebra.ok and self.rules.ok and self.adequacy.ok

    def to_dict(self) -> dict:
        return {
            "success": self.success.to_dict(),
            "algebra": self.algebra.to_dict(),
            "rules": self.rules.to_dict(),
            "adequacy": self.adequacy.to_dict(),
            "elapsed": self.elapsed,
            "ok": self.ok,
        }


def selftest(max_n: int = 3, seed: int = 0, min_corpus: int = 20,
             adequacy_triples: int = 200, sample_4: int = 100) -> SelftestReport:
    started = time.monotonic()
    corpus = inductive_corpus(seed=seed, min_count=min_corpus)
    report = SelftestReport(
        success=success_suite(corpus=corpus),
        algebra=algebra_suite(max_n=max_n, sample_4=sample_4, seed=seed),
        rules=rule_soundness_suite(max_n=max_n, seed=seed, corpus=corpus),
        adequacy=adequacy_suite(count=adequacy_triples, seed=seed),
    )
    report.elapsed = time.monotonic() - started
    return report
