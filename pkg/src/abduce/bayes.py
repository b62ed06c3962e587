"""Discrete Bayesian networks as (variables, conditional probabilities).

A network is described by its random variables, their value ranges, parent
lists, and complete conditional probability tables.  Instantiation-sets are
plain dicts mapping variables to values; completeness means every variable is
covered.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Mapping, Tuple

from .errors import (
    CyclicNetwork,
    IncompleteInstantiation,
    MissingCptEntry,
    OracleTooLarge,
    RowNotNormalized,
    UnknownVariable,
    ValueOutOfRange,
)

NORMALIZATION_TOL = 1e-9

# variable -> value; conflict-freeness is inherent in the dict shape.
InstantiationSet = Dict[str, str]

# CPT key: (variable, value, tuple of parent values in parent-list order)
CptKey = Tuple[str, str, Tuple[str, ...]]


@dataclass(frozen=True)
class BayesianNetwork:
    variables: Tuple[str, ...]
    ranges: Mapping[str, Tuple[str, ...]]
    parents: Mapping[str, Tuple[str, ...]]
    cpt: Mapping[CptKey, float]

    @cached_property
    def topo_order(self) -> Tuple[str, ...]:
        indeg = {v: len(self.parents[v]) for v in self.variables}
        children: Dict[str, list] = {v: [] for v in self.variables}
        for v in self.variables:
            for p in self.parents[v]:
                if p in children:
                    children[p].append(v)
        ready = [v for v in self.variables if indeg[v] == 0]
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
        if len(order) != len(self.variables):
            raise CyclicNetwork(
                f"cycle through {sorted(v for v in self.variables if indeg[v] > 0)}")
        return tuple(order)

    def parent_configs(self, var: str):
        """All parent-value tuples for ``var`` in range product order."""
        return itertools.product(*(self.ranges[p] for p in self.parents[var]))

    def entry_count(self) -> int:
        return sum(len(self.ranges[v]) *
                   math.prod(len(self.ranges[p]) for p in self.parents[v])
                   for v in self.variables)


def validate(b: BayesianNetwork) -> None:
    varset = set(b.variables)
    for v in b.variables:
        if not b.ranges.get(v):
            raise ValueOutOfRange(f"variable {v!r} has an empty range")
        for p in b.parents[v]:
            if p not in varset:
                raise UnknownVariable(f"parent {p!r} of {v!r}")
    b.topo_order  # raises CyclicNetwork
    for v in b.variables:
        for config in b.parent_configs(v):
            total = 0.0
            for a in b.ranges[v]:
                key = (v, a, tuple(config))
                if key not in b.cpt:
                    raise MissingCptEntry(f"P({v}={a} | {config!r})")
                p = b.cpt[key]
                if not (0.0 <= p <= 1.0):
                    raise ValueOutOfRange(f"P({v}={a} | {config!r}) = {p!r}")
                total += p
            if abs(total - 1.0) > NORMALIZATION_TOL:
                raise RowNotNormalized(v, tuple(config), total)
    extra = len(b.cpt) - b.entry_count()
    if extra:
        raise MissingCptEntry(f"{extra} CPT entries reference unknown configurations")


def _check_entries(b: BayesianNetwork, w: InstantiationSet) -> None:
    for var, val in w.items():
        if var not in b.ranges:
            raise UnknownVariable(repr(var))
        if val not in b.ranges[var]:
            raise ValueOutOfRange(f"{var}={val}")


def span(w: InstantiationSet):
    return set(w)


def is_complete(b: BayesianNetwork, w: InstantiationSet) -> bool:
    _check_entries(b, w)
    return set(w) == set(b.variables)


def is_consistent(inner: InstantiationSet, outer: InstantiationSet) -> bool:
    """True iff every entry of ``inner`` appears in ``outer``."""
    return all(outer.get(var) == val for var, val in inner.items())


def probability(b: BayesianNetwork, w: InstantiationSet) -> float:
    """Chain-rule joint of a complete instantiation-set."""
    if not is_complete(b, w):
        raise IncompleteInstantiation(f"span covers only {sorted(w)}")
    prod = 1.0
    logsum = 0.0
    positive = True
    for v in b.variables:
        config = tuple(w[p] for p in b.parents[v])
        p = b.cpt[(v, w[v], config)]
        prod *= p
        if p > 0.0:
            logsum += math.log(p)
        else:
            positive = False
    if prod == 0.0 and positive:
        # all factors positive but the running product underflowed
        return math.exp(logsum)
    return prod


def enumerate_mpe_oracle(b: BayesianNetwork, e: InstantiationSet,
                         limit: int = 1 << 20):
    """All explanations for ``e`` by brute force, most probable first.

    Ties broken lexicographically by value indices over the declared
    variable order.
    """
    _check_entries(b, e)
    total = math.prod(len(b.ranges[v]) for v in b.variables)
    if total > limit:
        raise OracleTooLarge(f"{total} complete instantiation-sets")
    choices = [(e[v],) if v in e else b.ranges[v] for v in b.variables]
    ranked = []
    for combo in itertools.product(*choices):
        w = dict(zip(b.variables, combo))
        key = tuple(b.ranges[v].index(w[v]) for v in b.variables)
        ranked.append((-probability(b, w), key, w))
    ranked.sort(key=lambda t: (t[0], t[1]))
    return [(w, -negp) for negp, _, w in ranked]
