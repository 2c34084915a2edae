"""Membership in the positive/PIA/antecedent/succedent grammars and the
search for a dependence order witnessing that an implication is inductive.

Grammar summary (all over the basic fragment):

    POS_A ::= p (p in A) | bot | top | []POS_A | POS_A & POS_A | POS_A | POS_A
    PIA_p ::= p | bot | top | []PIA_p | POS_{A_p} -> PIA_p
    Ant   ::= PIA_p | Ant & Ant | Ant v Ant
    Suc   ::= POS_all | PIA_q -> Suc | []Suc | Suc & Suc

where A_p is the set of variables strictly below p in the dependence order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .formula import (
    And,
    Bot,
    Box,
    Formula,
    Implies,
    Or,
    PropVar,
    Top,
    is_basic,
    prop_vars,
)

# Main-variable placeholder that can never collide with a parsed identifier;
# its A_p is empty, which is the weakest possible PIA environment.
_NO_MAIN = ""


class TooManyVariables(ValueError):
    """Raised when the order search space (n!) would be too large."""


MAX_CLASSIFY_VARS = 9


@dataclass(frozen=True)
class DependenceOrder:
    """A strict (irreflexive, transitive) order on propositional variables."""

    strict_pairs: frozenset[tuple[str, str]]

    def __post_init__(self):
        for (a, b) in self.strict_pairs:
            if a == b:
                raise ValueError(f"dependence order is not irreflexive: {a} < {a}")
        for (a, b) in self.strict_pairs:
            for (c, d) in self.strict_pairs:
                if b == c and (a, d) not in self.strict_pairs:
                    raise ValueError(f"dependence order is not transitive: missing {a} < {d}")

    @classmethod
    def empty(cls) -> "DependenceOrder":
        return cls(frozenset())

    @classmethod
    def from_chain(cls, chain: tuple[str, ...] | list[str]) -> "DependenceOrder":
        """Total order with chain[0] minimal."""
        pairs = {(chain[i], chain[j]) for i in range(len(chain)) for j in range(i + 1, len(chain))}
        return cls(frozenset(pairs))

    def below(self, p: str) -> frozenset[str]:
        return frozenset(q for (q, r) in self.strict_pairs if r == p)

    def minimal_first(self, names: frozenset[str] | set[str]) -> tuple[str, ...]:
        """Deterministic linearization of `names`, smallest elements first."""
        remaining = set(names)
        out: list[str] = []
        while remaining:
            minimal = sorted(
                v for v in remaining
                if not any((q, v) in self.strict_pairs and q in remaining for q in remaining)
            )
            if not minimal:
                raise ValueError("cycle in dependence order")
            out.append(minimal[0])
            remaining.remove(minimal[0])
        return tuple(out)

    def __str__(self) -> str:
        if not self.strict_pairs:
            return "{}"
        return "{" + ", ".join(f"{a} < {b}" for a, b in sorted(self.strict_pairs)) + "}"


# Membership is memoized on (subformula, grammar environment); formulas are
# frozen and hashable, so repeated subtrees and the order search share work.
@lru_cache(maxsize=65536)
def is_positive(f: Formula, allowed: frozenset[str] | None) -> bool:
    """Membership in POS_A; allowed=None means every variable is permitted."""
    if isinstance(f, PropVar):
        return allowed is None or f.name in allowed
    if isinstance(f, (Bot, Top)):
        return True
    if isinstance(f, Box):
        return is_positive(f.body, allowed)
    if isinstance(f, (And, Or)):
        return is_positive(f.left, allowed) and is_positive(f.right, allowed)
    return False


@lru_cache(maxsize=65536)
def is_pia(f: Formula, p: str, omega: DependenceOrder) -> bool:
    """Membership in PIA_p under the given dependence order."""
    if isinstance(f, PropVar):
        return f.name == p
    if isinstance(f, (Bot, Top)):
        return True
    if isinstance(f, Box):
        return is_pia(f.body, p, omega)
    if isinstance(f, Implies):
        return is_positive(f.left, omega.below(p)) and is_pia(f.right, p, omega)
    return False


def _main_candidates(f: Formula, omega: DependenceOrder) -> list[str]:
    # A successful main variable either occurs in f, or its leaf case is
    # unused and only A_p matters; PIA membership is monotone in A_p, so the
    # right-hand variables of omega plus a blank main cover that case.
    names = set(prop_vars(f)) | {b for (_, b) in omega.strict_pairs}
    return sorted(names) + [_NO_MAIN]


def is_ant(f: Formula, omega: DependenceOrder) -> bool:
    """Membership in the inductive-antecedent grammar."""
    if isinstance(f, (And, Or)):
        if is_ant(f.left, omega) and is_ant(f.right, omega):
            return True
    return any(is_pia(f, p, omega) for p in _main_candidates(f, omega))


def is_suc(f: Formula, omega: DependenceOrder) -> bool:
    """Membership in the inductive-succedent grammar."""
    if is_positive(f, None) and is_basic(f):
        return True
    if isinstance(f, Implies):
        has_pia_antecedent = any(is_pia(f.left, q, omega) for q in _main_candidates(f.left, omega))
        return has_pia_antecedent and is_suc(f.right, omega)
    if isinstance(f, Box):
        return is_suc(f.body, omega)
    if isinstance(f, And):
        return is_suc(f.left, omega) and is_suc(f.right, omega)
    return False


def is_inductive_for(f: Formula, omega: DependenceOrder) -> bool:
    return (
        isinstance(f, Implies)
        and is_basic(f)
        and is_ant(f.left, omega)
        and is_suc(f.right, omega)
    )


def classify_inductive(f: Formula) -> DependenceOrder | None:
    """Search for a dependence order making f inductive.

    Enumerates the strict total orders on the variables of f in
    lexicographic sequence; by monotonicity of the grammars in A_p this is
    complete for strict partial orders as well.  Returns the first witness,
    or None.
    """
    if not isinstance(f, Implies) or not is_basic(f):
        return None
    names = sorted(prop_vars(f))
    if len(names) > MAX_CLASSIFY_VARS:
        raise TooManyVariables(
            f"{len(names)} variables; the total-order search is capped at {MAX_CLASSIFY_VARS}"
        )
    for perm in itertools.permutations(names):
        omega = DependenceOrder.from_chain(perm)
        if is_ant(f.left, omega) and is_suc(f.right, omega):
            return omega
    return None
