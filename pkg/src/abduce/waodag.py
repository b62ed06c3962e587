"""Weighted AND/OR DAGs: truth assignments, explanations, costs.

A graph is a set of nodes with AND/OR labels, directed edges from parents to
children, per-node true/false costs, and a set of evidence nodes that an
explanation must prove.  Zero-in-degree nodes are the hypotheses; they are
freely assignable and their labels are ignored.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Tuple

from .errors import (
    CyclicGraph,
    DanglingEdge,
    DomainMismatch,
    NonFiniteCost,
    NonPositiveDelta,
    NotAnExplanation,
    NotHypothesis,
    OracleTooLarge,
    ParseError,
    UnknownEvidenceNode,
)

AND = "and"
OR = "or"

# A truth assignment is a plain dict mapping every node id to a bool.
TruthAssignment = Dict[str, bool]


class Monotonicity(enum.Enum):
    STRICT = "strict"
    MONOTONIC = "monotonic"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Waodag:
    """Immutable weighted AND/OR DAG.

    ``label`` only matters for nodes with at least one parent; ``evidence``
    nodes must come out true in any explanation.
    """

    nodes: Tuple[str, ...]
    edges: Tuple[Tuple[str, str], ...]
    label: Mapping[str, str]
    cost_true: Mapping[str, float]
    cost_false: Mapping[str, float]
    evidence: FrozenSet[str]

    @staticmethod
    def build(nodes: Iterable[str],
              edges: Iterable[Tuple[str, str]],
              label: Mapping[str, str],
              cost_true: Mapping[str, float],
              cost_false: Mapping[str, float] | None = None,
              evidence: Iterable[str] = ()) -> "Waodag":
        nodes = tuple(nodes)
        cost_false = dict(cost_false or {})
        return Waodag(
            nodes=nodes,
            edges=tuple((p, c) for p, c in edges),
            label={n: v for n, v in label.items()},
            cost_true={n: float(cost_true.get(n, 0.0)) for n in nodes},
            cost_false={n: float(cost_false.get(n, 0.0)) for n in nodes},
            evidence=frozenset(evidence),
        )

    @cached_property
    def parents(self) -> Mapping[str, Tuple[str, ...]]:
        out: Dict[str, List[str]] = {n: [] for n in self.nodes}
        for p, c in self.edges:
            if c in out:
                out[c].append(p)
        return {n: tuple(ps) for n, ps in out.items()}

    @cached_property
    def hypotheses(self) -> FrozenSet[str]:
        return frozenset(n for n in self.nodes if not self.parents[n])

    @cached_property
    def topo_order(self) -> Tuple[str, ...]:
        """Kahn's algorithm; raises CyclicGraph when no order exists."""
        indeg = {n: len(self.parents[n]) for n in self.nodes}
        children: Dict[str, List[str]] = {n: [] for n in self.nodes}
        for p, c in self.edges:
            if p in children:
                children[p].append(c)
        ready = [n for n in self.nodes if indeg[n] == 0]
        order: List[str] = []
        while ready:
            n = ready.pop(0)
            order.append(n)
            for c in children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(self.nodes):
            cyclic = sorted(n for n in self.nodes if indeg[n] > 0)
            raise CyclicGraph(f"cycle through {cyclic}")
        return tuple(order)

    def cost_of(self, node: str, value: bool) -> float:
        return self.cost_true[node] if value else self.cost_false[node]


def validate(w: Waodag) -> None:
    """Check structural invariants; raises a ModelError naming the offender."""
    nodeset = set(w.nodes)
    for p, c in w.edges:
        if p not in nodeset:
            raise DanglingEdge(f"edge references unknown node {p!r}")
        if c not in nodeset:
            raise DanglingEdge(f"edge references unknown node {c!r}")
    for q in w.evidence:
        if q not in nodeset:
            raise UnknownEvidenceNode(repr(q))
    for n in w.nodes:
        for v in (True, False):
            val = w.cost_of(n, v)
            if not math.isfinite(val):
                raise NonFiniteCost(f"cost({n!r}, {v}) = {val!r}")
        if w.parents[n] and w.label.get(n) not in (AND, OR):
            raise ParseError(f"internal node {n!r} has no and/or label")
    w.topo_order  # raises CyclicGraph


def _check_domain(w: Waodag, e: TruthAssignment) -> None:
    if set(e) != set(w.nodes):
        raise DomainMismatch(
            "assignment domain does not match the node set")


def is_valid(w: Waodag, e: TruthAssignment) -> bool:
    """Def-2.2 validity; nodes with no parents are unconstrained."""
    _check_domain(w, e)
    for q in w.nodes:
        ps = w.parents[q]
        if not ps:
            continue
        if w.label[q] == AND:
            want = all(e[p] for p in ps)
        else:
            want = any(e[p] for p in ps)
        if e[q] != want:
            return False
    return True


def is_explanation(w: Waodag, e: TruthAssignment) -> bool:
    _check_domain(w, e)
    return is_valid(w, e) and all(e[q] for q in w.evidence)


def propagate(w: Waodag, hyps: Iterable[str]) -> TruthAssignment:
    """The unique valid assignment whose true hypotheses are exactly ``hyps``."""
    hyps = set(hyps)
    bad = hyps - w.hypotheses
    if bad:
        raise NotHypothesis(f"not hypothesis nodes: {sorted(bad)}")
    e: TruthAssignment = {}
    for q in w.topo_order:
        ps = w.parents[q]
        if not ps:
            e[q] = q in hyps
        elif w.label[q] == AND:
            e[q] = all(e[p] for p in ps)
        else:
            e[q] = any(e[p] for p in ps)
    return e


def cost(w: Waodag, e: TruthAssignment) -> float:
    _check_domain(w, e)
    return sum(w.cost_of(q, e[q]) for q in w.nodes)


def base_and_support(w: Waodag, e: TruthAssignment):
    """Returns (H(e), K(e)): true hypotheses and all true nodes."""
    _check_domain(w, e)
    support = frozenset(q for q in w.nodes if e[q])
    return support & w.hypotheses, support


def monotonicity_class(w: Waodag) -> Monotonicity:
    """Syntactic sufficient test on the per-node cost gaps.

    UNKNOWN does not mean non-monotonic; the test is only sufficient.
    """
    strict = True
    for n in w.nodes:
        gap = w.cost_true[n] - w.cost_false[n]
        if gap < 0:
            return Monotonicity.UNKNOWN
        if gap == 0:
            strict = False
    return Monotonicity.STRICT if strict else Monotonicity.MONOTONIC


def is_cardinal(w: Waodag, e: TruthAssignment) -> bool:
    """No proper subset of the base set yields an explanation.

    Checking the one-removed subsets suffices: propagation is monotone in the
    hypothesis set, so if no maximal proper subset explains, none does.
    """
    if not is_explanation(w, e):
        raise NotAnExplanation("is_cardinal needs an explanation")
    base, _ = base_and_support(w, e)
    for h in base:
        if is_explanation(w, propagate(w, base - {h})):
            return False
    return True


def enumerate_explanations_oracle(w: Waodag, limit: int = 20):
    """All explanations by brute force over hypothesis subsets.

    Sorted by nondecreasing cost; ties broken by the lexicographic order of
    the hypothesis bit vector over the node declaration order.
    """
    hyp_order = [n for n in w.nodes if n in w.hypotheses]
    if len(hyp_order) > limit:
        raise OracleTooLarge(
            f"{len(hyp_order)} hypotheses exceeds oracle limit {limit}")
    found = []
    for mask in range(1 << len(hyp_order)):
        chosen = {h for i, h in enumerate(hyp_order) if mask >> i & 1}
        e = propagate(w, chosen)
        if all(e[q] for q in w.evidence):
            bits = tuple(int(h in chosen) for h in hyp_order)
            found.append((cost(w, e), bits, e))
    found.sort(key=lambda t: (t[0], t[1]))
    return [(e, c) for c, _, e in found]


def perturb_strict(w: Waodag, delta: float) -> Waodag:
    """Raise each non-positive true/false cost gap to exactly ``delta``."""
    if delta <= 0:
        raise NonPositiveDelta(repr(delta))
    new_true = dict(w.cost_true)
    for n in w.nodes:
        if new_true[n] <= w.cost_false[n]:
            new_true[n] = w.cost_false[n] + delta
    return Waodag(w.nodes, w.edges, w.label, new_true, dict(w.cost_false),
                  w.evidence)
