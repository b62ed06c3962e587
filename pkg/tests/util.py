"""Shared helpers for the test suite.

Brute-force enumeration of 0-1 points, tie-aware stream comparison, and
builders for the two worked example models used throughout the tests.
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from abduce import bayes as bn
from abduce import waodag as wd
from abduce.constraints import ConstraintSystem


def tony_graph() -> wd.Waodag:
    """Three ways to explain an unanswered phone call; evidence: no answer."""
    return wd.Waodag.build(
        nodes=["Tony-in", "Tony-sleeping", "Tony-out",
               "phone-disconnected", "phone-noanswer"],
        edges=[("Tony-in", "phone-disconnected"),
               ("Tony-sleeping", "phone-disconnected"),
               ("phone-disconnected", "phone-noanswer"),
               ("Tony-out", "phone-noanswer")],
        label={"phone-disconnected": wd.AND, "phone-noanswer": wd.OR},
        cost_true={"Tony-in": 5, "Tony-sleeping": 4, "Tony-out": 8},
        evidence=["phone-noanswer"],
    )


def three_var_network() -> bn.BayesianNetwork:
    """A, B independent binary roots; C depends on both."""
    t, f = "true", "false"
    cpt = {
        ("A", t, ()): 0.6, ("A", f, ()): 0.4,
        ("B", t, ()): 0.3, ("B", f, ()): 0.7,
        ("C", t, (t, t)): 0.9, ("C", f, (t, t)): 0.1,
        ("C", t, (t, f)): 0.7, ("C", f, (t, f)): 0.3,
        ("C", t, (f, t)): 0.4, ("C", f, (f, t)): 0.6,
        ("C", t, (f, f)): 0.1, ("C", f, (f, f)): 0.9,
    }
    return bn.BayesianNetwork(
        variables=("A", "B", "C"),
        ranges={"A": (t, f), "B": (t, f), "C": (t, f)},
        parents={"A": (), "B": (), "C": ("A", "B")},
        cpt=cpt,
    )


def all_01_points(system: ConstraintSystem,
                  tol: float = 1e-9) -> List[Dict[str, int]]:
    """Every 0-1 assignment satisfying the system, by vectorized brute force."""
    names = list(system.variables)
    n = len(names)
    assert n <= 20, "exhaustive check limited to 2^20 points"
    idx = {x: j for j, x in enumerate(names)}
    count = 1 << n
    bits = (np.arange(count)[:, None] >> np.arange(n)) & 1
    X = bits.astype(float)
    ok = np.ones(count, dtype=bool)
    for row in system.constraints:
        lhs = np.zeros(count)
        for coeff, var in row.terms:
            lhs += coeff * X[:, idx[var]]
        if row.relation == "<=":
            ok &= lhs <= row.rhs + tol
        elif row.relation == ">=":
            ok &= lhs >= row.rhs - tol
        else:
            ok &= np.abs(lhs - row.rhs) <= tol
    return [{names[j]: int(bits[i, j]) for j in range(n)}
            for i in np.flatnonzero(ok)]


def group_stream(pairs: Sequence[Tuple[object, float]],
                 tol: float) -> List[Tuple[float, frozenset]]:
    """Collapse a cost-sorted (key, cost) stream into per-cost-level sets."""
    groups: List[Tuple[float, set]] = []
    for key, c in pairs:
        if groups and abs(c - groups[-1][0]) <= tol:
            groups[-1][1].add(key)
        else:
            groups.append((c, {key}))
    return [(c, frozenset(ks)) for c, ks in groups]


def assert_streams_match(got: Sequence[Tuple[object, float]],
                         want: Sequence[Tuple[object, float]],
                         tol: float) -> None:
    """Equal length, costs pairwise within tol, tie-aware set equality."""
    assert len(got) == len(want), f"{len(got)} solutions, expected {len(want)}"
    for (_, cg), (_, cw) in zip(got, want):
        assert abs(cg - cw) <= tol, f"cost {cg} vs {cw}"
    g_groups = group_stream(got, tol)
    w_groups = group_stream(want, tol)
    assert len(g_groups) == len(w_groups)
    for (cg, kg), (cw, kw) in zip(g_groups, w_groups):
        assert abs(cg - cw) <= tol
        assert kg == kw, f"tie group at cost {cg}: {kg} != {kw}"


def truth_key(e: wd.TruthAssignment) -> frozenset:
    return frozenset(q for q, v in e.items() if v)


def inst_key(w: bn.InstantiationSet) -> Tuple[Tuple[str, str], ...]:
    return tuple(sorted(w.items()))
