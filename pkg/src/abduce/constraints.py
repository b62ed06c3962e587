"""Linear 0-1 constraint systems and the two model encoders.

A system is (variables, rows, per-variable true/false costs).  WAODAG graphs
encode with one variable per node and the four AND/OR row shapes plus
optional evidence equalities.  Bayesian networks encode with one indicator
variable per (variable, value) and one conditional variable per CPT entry;
conditional true-costs are negative natural logs of the entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Tuple

from . import bayes as bn
from . import waodag as wd
from .errors import (
    DomainMismatch,
    IncompleteInstantiation,
    NonPositiveDelta,
    NotASolution,
    UnknownVariable,
    ValueOutOfRange,
    ZeroProbabilityRejected,
)

FEASIBILITY_TOL = 1e-9

LE = "<="
GE = ">="
EQ = "="

# variable -> 0/1
Assignment01 = Dict[str, int]


@dataclass(frozen=True)
class LinearConstraint:
    terms: Tuple[Tuple[float, str], ...]
    relation: str  # one of LE, GE, EQ
    rhs: float

    def holds(self, s: Mapping[str, float], tol: float = FEASIBILITY_TOL) -> bool:
        lhs = sum(coeff * s[var] for coeff, var in self.terms)
        if self.relation == LE:
            return lhs <= self.rhs + tol
        if self.relation == GE:
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass(frozen=True)
class ConstraintSystem:
    variables: Tuple[str, ...]
    constraints: Tuple[LinearConstraint, ...]
    psi_true: Mapping[str, float]
    psi_false: Mapping[str, float]

    def extended(self, rows) -> "ConstraintSystem":
        return replace(self, constraints=self.constraints + tuple(rows))


def objective(system: ConstraintSystem, s: Assignment01) -> float:
    """Theta: sum of s(x)*psi(x,true) + (1-s(x))*psi(x,false)."""
    if set(s) != set(system.variables):
        raise DomainMismatch("assignment domain != variable set")
    return sum(s[x] * system.psi_true[x] + (1 - s[x]) * system.psi_false[x]
               for x in system.variables)


def satisfies(system: ConstraintSystem, s: Assignment01,
              tol: float = FEASIBILITY_TOL) -> bool:
    if set(s) != set(system.variables):
        raise DomainMismatch("assignment domain != variable set")
    return all(row.holds(s, tol) for row in system.constraints)


def dump(system: ConstraintSystem) -> str:
    """One row per line: `c1*v1 + c2*v2 REL rhs` (used by golden tests)."""
    lines = []
    for row in system.constraints:
        lhs = " + ".join(f"{coeff:g}*{var}" for coeff, var in row.terms)
        lines.append(f"{lhs} {row.relation} {row.rhs:g}")
    return "\n".join(lines)


# --- WAODAG encoding --------------------------------------------------------

@dataclass(frozen=True)
class WaodagEncoding:
    system: ConstraintSystem
    node_of: Mapping[str, str]   # variable -> node
    var_of: Mapping[str, str]    # node -> variable
    essential: bool
    waodag: wd.Waodag


def encode_waodag(w: wd.Waodag, essential: bool = True) -> WaodagEncoding:
    """One variable per node; AND rows, OR rows, optional evidence rows."""
    wd.validate(w)
    var_of = {q: q for q in w.nodes}
    rows: List[LinearConstraint] = []
    for q in w.nodes:
        ps = w.parents[q]
        if not ps:
            continue
        xq = var_of[q]
        if w.label[q] == wd.AND:
            for p in ps:
                rows.append(LinearConstraint(((1.0, xq), (-1.0, var_of[p])), LE, 0.0))
            terms = tuple((1.0, var_of[p]) for p in ps) + ((-1.0, xq),)
            rows.append(LinearConstraint(terms, LE, float(len(ps) - 1)))
        else:
            terms = tuple((1.0, var_of[p]) for p in ps) + ((-1.0, xq),)
            rows.append(LinearConstraint(terms, GE, 0.0))
            for p in ps:
                rows.append(LinearConstraint(((1.0, xq), (-1.0, var_of[p])), GE, 0.0))
    if essential:
        for q in w.nodes:
            if q in w.evidence:
                rows.append(LinearConstraint(((1.0, var_of[q]),), EQ, 1.0))
    system = ConstraintSystem(
        variables=tuple(var_of[q] for q in w.nodes),
        constraints=tuple(rows),
        psi_true={var_of[q]: w.cost_true[q] for q in w.nodes},
        psi_false={var_of[q]: w.cost_false[q] for q in w.nodes},
    )
    return WaodagEncoding(system, {v: q for q, v in var_of.items()}, var_of,
                          essential, w)


def solution_to_truth(enc: WaodagEncoding, s: Assignment01) -> wd.TruthAssignment:
    if set(s) != set(enc.system.variables):
        raise DomainMismatch("assignment domain != variable set")
    return {enc.node_of[x]: bool(s[x]) for x in enc.system.variables}


def truth_to_solution(enc: WaodagEncoding, e: wd.TruthAssignment) -> Assignment01:
    if set(e) != set(enc.waodag.nodes):
        raise DomainMismatch("assignment domain != node set")
    return {enc.var_of[q]: int(e[q]) for q in enc.waodag.nodes}


# --- Bayesian-network encoding ----------------------------------------------

@dataclass(frozen=True)
class CondVar:
    head_var: str
    head_value: str
    config: Tuple[Tuple[str, str], ...]  # (parent, value) in parent order


@dataclass(frozen=True)
class BayesEncoding:
    system: ConstraintSystem
    network: bn.BayesianNetwork
    indicator_groups: Mapping[str, Tuple[str, ...]]        # Delta(A)
    conditionals: Mapping[str, CondVar]
    upsilon: Mapping[Tuple[str, str], Tuple[str, ...]]     # (A, a) -> group
    evidence: Mapping[str, str] | None = None

    @property
    def delta(self) -> Tuple[str, ...]:
        """All indicator variables, in declaration order."""
        out: List[str] = []
        for v in self.network.variables:
            out.extend(self.indicator_groups[v])
        return tuple(out)


def indicator_name(var: str, value: str) -> str:
    return f"{var}={value}"


def conditional_name(var: str, value: str,
                     config: Tuple[Tuple[str, str], ...]) -> str:
    head = indicator_name(var, value)
    if not config:
        return f"q[{head}]"
    cfg = ",".join(indicator_name(p, v) for p, v in config)
    return f"q[{head}|{cfg}]"


def encode_bayesnet(b: bn.BayesianNetwork, zero_prob: str = "clamp",
                    prob_floor: float = 1e-12) -> BayesEncoding:
    """Indicators with exactly-one rows, conditionals with linking rows.

    ``zero_prob`` decides what happens to CPT entries below ``prob_floor``:
    "clamp" costs them as -ln(prob_floor), "reject" raises.
    """
    bn.validate(b)
    variables: List[str] = []
    rows: List[LinearConstraint] = []
    psi_true: Dict[str, float] = {}
    psi_false: Dict[str, float] = {}
    indicator_groups: Dict[str, Tuple[str, ...]] = {}
    conditionals: Dict[str, CondVar] = {}
    upsilon: Dict[Tuple[str, str], List[str]] = {}

    for v in b.variables:
        group = tuple(indicator_name(v, a) for a in b.ranges[v])
        indicator_groups[v] = group
        for name in group:
            variables.append(name)
            psi_true[name] = 0.0
            psi_false[name] = 0.0
        rows.append(LinearConstraint(
            tuple((1.0, name) for name in group), EQ, 1.0))

    cond_rows: List[LinearConstraint] = []
    for v in b.variables:
        for a in b.ranges[v]:
            upsilon[(v, a)] = []
            for config in b.parent_configs(v):
                config_pairs = tuple(zip(b.parents[v], config))
                name = conditional_name(v, a, config_pairs)
                p = b.cpt[(v, a, tuple(config))]
                if p < prob_floor:
                    if zero_prob == "reject":
                        raise ZeroProbabilityRejected(
                            f"P({v}={a} | {config!r}) = {p!r}")
                    p = prob_floor
                variables.append(name)
                psi_true[name] = -math.log(p)
                psi_false[name] = 0.0
                conditionals[name] = CondVar(v, a, config_pairs)
                upsilon[(v, a)].append(name)
                terms = ((1.0, name), (-1.0, indicator_name(v, a)))
                terms += tuple((-1.0, indicator_name(p_, c_))
                               for p_, c_ in config_pairs)
                cond_rows.append(LinearConstraint(
                    terms, GE, float(-len(config_pairs))))
    rows.extend(cond_rows)

    for v in b.variables:
        for a in b.ranges[v]:
            terms = ((1.0, indicator_name(v, a)),)
            terms += tuple((-1.0, q) for q in upsilon[(v, a)])
            rows.append(LinearConstraint(terms, EQ, 0.0))

    system = ConstraintSystem(tuple(variables), tuple(rows), psi_true, psi_false)
    return BayesEncoding(system, b, indicator_groups, conditionals,
                         {k: tuple(v) for k, v in upsilon.items()})


def apply_evidence(enc: BayesEncoding, e: bn.InstantiationSet) -> BayesEncoding:
    """Pin the evidence indicators to 1; adds exactly |e| equality rows."""
    rows = []
    for var in enc.network.variables:
        if var not in e:
            continue
        val = e[var]
        if val not in enc.network.ranges[var]:
            raise ValueOutOfRange(f"{var}={val}")
        rows.append(LinearConstraint(((1.0, indicator_name(var, val)),), EQ, 1.0))
    unknown = set(e) - set(enc.network.variables)
    if unknown:
        raise UnknownVariable(repr(sorted(unknown)))
    return replace(enc, system=enc.system.extended(rows), evidence=dict(e))


def is_permissible(enc: BayesEncoding, s: Assignment01) -> bool:
    """Every active conditional has its head and full configuration active."""
    if set(s) != set(enc.system.variables):
        raise DomainMismatch("assignment domain != variable set")
    for name, info in enc.conditionals.items():
        if not s[name]:
            continue
        if not s[indicator_name(info.head_var, info.head_value)]:
            return False
        if any(not s[indicator_name(p, v)] for p, v in info.config):
            return False
    return True


def solution_to_instantiation(enc: BayesEncoding,
                              s: Assignment01) -> bn.InstantiationSet:
    w: bn.InstantiationSet = {}
    for var in enc.network.variables:
        active = [a for a in enc.network.ranges[var]
                  if s[indicator_name(var, a)]]
        if len(active) != 1:
            raise NotASolution(
                f"indicator group of {var!r} has {len(active)} active members")
        w[var] = active[0]
    return w


def instantiation_to_solution(enc: BayesEncoding,
                              w: bn.InstantiationSet) -> Assignment01:
    if not bn.is_complete(enc.network, w):
        raise IncompleteInstantiation(f"span covers only {sorted(w)}")
    s: Assignment01 = {}
    for var in enc.network.variables:
        for a in enc.network.ranges[var]:
            s[indicator_name(var, a)] = int(w[var] == a)
    for name, info in enc.conditionals.items():
        s[name] = int(w[info.head_var] == info.head_value and
                      all(w[p] == v for p, v in info.config))
    return s


def default_delta(system: ConstraintSystem) -> float:
    """1e-9 scaled by the largest cost magnitude in the system."""
    biggest = max((abs(v) for m in (system.psi_true, system.psi_false)
                   for v in m.values()), default=0.0)
    return 1e-9 * (1.0 + biggest)


def ensure_positive_conditional_costs(enc: BayesEncoding,
                                      delta: float) -> BayesEncoding:
    """Raise non-positive conditional true-costs to ``delta``.

    Afterwards every optimal 0-1 solution of the system is permissible.
    """
    if delta <= 0:
        raise NonPositiveDelta(repr(delta))
    psi_true = dict(enc.system.psi_true)
    for name in enc.conditionals:
        if psi_true[name] <= 0.0:
            psi_true[name] = delta
    return replace(enc, system=replace(enc.system, psi_true=psi_true))


def add_permissibility_constraints(enc: BayesEncoding) -> BayesEncoding:
    """Strict mode: force each conditional below its head and config indicators."""
    rows = []
    for name, info in enc.conditionals.items():
        rows.append(LinearConstraint(
            ((1.0, name), (-1.0, indicator_name(info.head_var, info.head_value))),
            LE, 0.0))
        for p, v in info.config:
            rows.append(LinearConstraint(
                ((1.0, name), (-1.0, indicator_name(p, v))), LE, 0.0))
    return replace(enc, system=enc.system.extended(rows))
