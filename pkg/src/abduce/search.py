"""Optimal 0-1 solutions and k-best enumeration via cutting planes.

Branch and bound over the LP relaxation finds optima; the enumeration loops
add one exclusion cut per emitted solution and re-solve, warm-starting the
root from the previous basis.  Three cut scopes: the full variable set, the
hypothesis variables (cardinal mode), and the indicator variables of a
Bayesian encoding (permissible mode).
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import bayes as bn
from . import simplex as sx
from . import waodag as wd
from .constraints import (
    Assignment01,
    BayesEncoding,
    ConstraintSystem,
    LE,
    LinearConstraint,
    WaodagEncoding,
    add_permissibility_constraints,
    default_delta,
    ensure_positive_conditional_costs,
    is_permissible,
    objective,
    satisfies,
    solution_to_instantiation,
)
from .errors import (
    EmptyBaseSet,
    EmptyScope,
    NodeLimitExceeded,
    NotStrictlyMonotonic,
)

ALL = "all"


@dataclass
class BnbConfig:
    int_tol: float = 1e-7
    prune_eps: float = 1e-9
    node_limit: int = 1_000_000
    solution_cap: int = 100_000
    # prefer branching on these variables; the encodings force everything
    # else to integral values once they are fixed
    branch_scope: Optional[Sequence[str]] = None
    # test hook: called with (fixed-variable dict, node LP bound)
    audit: Optional[Callable[[Dict[str, int], float], None]] = None


@dataclass
class RankedSolution:
    rank: int
    assignment: Assignment01
    cost: float
    probability: Optional[float] = None
    instantiation: Optional[bn.InstantiationSet] = None


def exclusion_cut(s: Assignment01, scope: Sequence[str]) -> LinearConstraint:
    """Row excluding exactly the pattern of ``s`` over ``scope``."""
    scope = tuple(scope)
    if not scope:
        raise EmptyScope("exclusion cut over an empty scope")
    terms = tuple((1.0, x) if s[x] else (-1.0, x) for x in scope)
    zeros = sum(1 for x in scope if not s[x])
    return LinearConstraint(terms, LE, float(len(scope) - 1 - zeros))


def cardinal_cut(s: Assignment01, enc: WaodagEncoding) -> LinearConstraint:
    """Row excluding every solution whose base set contains H(s)."""
    hyp_vars = [enc.var_of[q] for q in enc.waodag.nodes
                if q in enc.waodag.hypotheses and s[enc.var_of[q]]]
    if not hyp_vars:
        raise EmptyBaseSet("solution assumes no hypotheses")
    terms = tuple((1.0, v) for v in hyp_vars)
    return LinearConstraint(terms, LE, float(len(hyp_vars) - 1))


def _pick_fractional(x, indices, int_tol: float) -> int:
    """Most fractional variable among ``indices``; ties to the lowest index."""
    frac_j = -1
    frac_score = math.inf
    for j in indices:
        dist = min(abs(x[j]), abs(1.0 - x[j]))
        if dist > int_tol:
            score = abs(x[j] - 0.5)
            if score < frac_score - 1e-12:
                frac_score = score
                frac_j = j
    return frac_j


def _branch_and_bound(system: ConstraintSystem, p: sx.LpProblem,
                      cfg: BnbConfig, warm: Optional[sx.BasisState]):
    """Returns (assignment or None, cost or None, root LpResult)."""
    if cfg.branch_scope is None:
        preferred = None
    else:
        index = p.index
        preferred = [index[v] for v in cfg.branch_scope]
    root = sx.solve(p, warm=warm)
    if root.status != sx.OPTIMAL:
        return None, None, root
    counter = itertools.count()
    heap: List[Tuple[float, int, Dict[int, int], sx.LpResult]] = []
    heapq.heappush(heap, (root.objective, next(counter), {}, root))
    incumbent = None
    inc_cost = math.inf
    nodes = 0
    names = p.names
    while heap:
        bound, _, fixes, res = heapq.heappop(heap)
        if bound >= inc_cost - cfg.prune_eps:
            break
        if cfg.audit is not None:
            cfg.audit({names[j]: v for j, v in fixes.items()}, bound)
        x = res.x
        # rounding heuristic: a feasible integer point tightens pruning early
        rounded = {names[j]: int(round(x[j])) for j in range(len(names))}
        if satisfies(system, rounded, tol=1e-9):
            rcost = objective(system, rounded)
            if rcost < inc_cost - 1e-12:
                incumbent = rounded
                inc_cost = rcost
        scan = preferred if preferred is not None else range(len(names))
        frac_j = _pick_fractional(x, scan, cfg.int_tol)
        if frac_j < 0 and preferred is not None:
            frac_j = _pick_fractional(x, range(len(names)), cfg.int_tol)
        if frac_j < 0:
            s = {names[j]: int(round(x[j])) for j in range(len(names))}
            cost01 = objective(system, s)
            if bound > cost01 + 1e-9:
                raise AssertionError(
                    f"weak duality violated: bound {bound} > cost {cost01}")
            if satisfies(system, s, tol=1e-6) and cost01 < inc_cost - 1e-12:
                incumbent = s
                inc_cost = cost01
            continue
        nodes += 1
        if nodes > cfg.node_limit:
            raise NodeLimitExceeded(f"{nodes} branch-and-bound nodes")
        for v in (0, 1):
            child_fixes = dict(fixes)
            child_fixes[frac_j] = v
            child_p = p
            lower = p.lower.copy()
            upper = p.upper.copy()
            for j, fv in child_fixes.items():
                lower[j] = float(fv)
                upper[j] = float(fv)
            child_p = sx.LpProblem(p.names, p.A, p.rel, p.b, lower, upper,
                                   p.c, p.c0)
            child = sx.solve(child_p, warm=res.basis)
            if child.status != sx.OPTIMAL:
                continue
            if child.objective >= inc_cost - cfg.prune_eps:
                continue
            heapq.heappush(heap, (child.objective, next(counter),
                                  child_fixes, child))
    if incumbent is None:
        return None, None, root
    return incumbent, inc_cost, root


def solve_optimal(system: ConstraintSystem,
                  cfg: Optional[BnbConfig] = None) -> Optional[RankedSolution]:
    """Minimum-cost 0-1 solution, or None when no 0-1 solution exists."""
    cfg = cfg or BnbConfig()
    s, cost01, _ = _branch_and_bound(system, sx.relax(system), cfg, None)
    if s is None:
        return None
    return RankedSolution(1, s, cost01)


def _cut_loop(system: ConstraintSystem, cfg: BnbConfig, k,
              make_cut, finish):
    """Shared enumeration loop: solve, emit, cut, re-solve warm."""
    current = system
    p = sx.relax(system)
    warm = None
    out: List[RankedSolution] = []
    want = math.inf if k == ALL else int(k)
    while len(out) < min(want, cfg.solution_cap):
        s, _, root = _branch_and_bound(current, p, cfg, warm)
        if s is None:
            break
        out.append(finish(len(out) + 1, s))
        try:
            cut = make_cut(s)
        except EmptyBaseSet:
            break
        current = current.extended([cut])
        p = sx.add_row(p, cut)
        warm = root.basis
    return out


def enumerate_best(system: ConstraintSystem, k,
                   cfg: Optional[BnbConfig] = None) -> List[RankedSolution]:
    """The k best 0-1 solutions in cost order; k may be ALL."""
    cfg = cfg or BnbConfig()

    def finish(rank, s):
        return RankedSolution(rank, s, objective(system, s))

    return _cut_loop(system, cfg, k,
                     lambda s: exclusion_cut(s, system.variables), finish)


def enumerate_cardinal(enc: WaodagEncoding, k,
                       cfg: Optional[BnbConfig] = None,
                       delta: Optional[float] = None,
                       auto_perturb: bool = True) -> List[RankedSolution]:
    """The k best cardinal solutions; needs a strictly monotonic graph.

    MONOTONIC graphs are perturbed by ``delta`` for the search when
    ``auto_perturb`` is on; reported costs always use the original costs.
    """
    cfg = cfg or BnbConfig()
    w = enc.waodag
    cls = wd.monotonicity_class(w)
    if cls is wd.Monotonicity.STRICT:
        search_enc = enc
    elif cls is wd.Monotonicity.MONOTONIC and auto_perturb:
        from .constraints import encode_waodag
        d = delta if delta is not None else default_delta(enc.system)
        search_enc = encode_waodag(wd.perturb_strict(w, d), enc.essential)
    else:
        raise NotStrictlyMonotonic(
            f"monotonicity class is {cls.value}; cannot run cardinal cuts")

    if cfg.branch_scope is None:
        cfg = replace(cfg, branch_scope=tuple(
            enc.var_of[q] for q in w.nodes if q in w.hypotheses))

    def finish(rank, s):
        return RankedSolution(rank, s, objective(enc.system, s))

    return _cut_loop(search_enc.system, cfg, k,
                     lambda s: cardinal_cut(s, enc), finish)


def enumerate_permissible(enc: BayesEncoding, k,
                          cfg: Optional[BnbConfig] = None,
                          delta: Optional[float] = None,
                          strict_mode: bool = False) -> List[RankedSolution]:
    """The k most probable explanations for the encoding's evidence.

    Default mode nudges zero-cost conditionals up by ``delta`` so optima are
    permissible; strict mode adds the explicit permissibility rows instead.
    Cuts range over the indicator variables only, so each emitted solution is
    a distinct instantiation-set.
    """
    cfg = cfg or BnbConfig()
    if strict_mode:
        work = add_permissibility_constraints(enc)
    else:
        d = delta if delta is not None else default_delta(enc.system)
        work = ensure_positive_conditional_costs(enc, d)
    scope = enc.delta
    if cfg.branch_scope is None:
        cfg = replace(cfg, branch_scope=scope)

    def finish(rank, s):
        assert is_permissible(enc, s), "optimum is not permissible"
        w = solution_to_instantiation(enc, s)
        return RankedSolution(rank, s, objective(enc.system, s),
                              probability=bn.probability(enc.network, w),
                              instantiation=w)

    return _cut_loop(work.system, cfg, k,
                     lambda s: exclusion_cut(s, scope), finish)
