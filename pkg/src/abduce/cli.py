"""Command-line entry points: `abduce`, `mpe`, and `gen`.

Results are emitted as JSON lines, one per ranked solution, with numbers
formatted to 17 significant digits so identical inputs give byte-identical
output.  Exit codes: 0 success, 1 model or parse error, 2 solver limit.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from typing import Optional

import click

from . import bayes as bn
from . import generate
from . import model_io
from . import search
from . import waodag as wd
from .constraints import (
    apply_evidence,
    dump,
    encode_bayesnet,
    encode_waodag,
    instantiation_to_solution,
    truth_to_solution,
)
from .errors import ModelError, ParseError, SolverLimit


def _jval(obj):
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {_jval(v)}"
                 for k, v in sorted(obj.items()))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_jval(v) for v in obj) + "]"
    return json.dumps(obj)


def emit(record: dict) -> None:
    click.echo(_jval(record))


def _log(msg: str) -> None:
    if os.environ.get("ABDUCE_LOG"):
        click.echo(msg, err=True)


def cli_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except SolverLimit as exc:
            click.echo(f"solver limit: {exc}", err=True)
            sys.exit(2)
        except (ModelError, OSError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


def _parse_k(value: str) -> object:
    if value.lower() == "all":
        return search.ALL
    k = int(value)
    if k < 1:
        raise ParseError("--k must be at least 1, or 'all'")
    return k


def _waodag_record(rank, assignment, cost, w: wd.Waodag) -> dict:
    hyps = sorted(q for q in w.hypotheses if assignment[q])
    return {"rank": rank, "cost": cost, "assignment": dict(assignment),
            "hypotheses": hyps}


# --- abduce -----------------------------------------------------------------

@click.group()
def abduce():
    """Cost-based abduction over weighted AND/OR DAG model files."""


@abduce.command("solve")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@cli_errors
def abduce_solve(model):
    w = model_io.parse_waodag_file(model)
    enc = encode_waodag(w, essential=True)
    best = search.solve_optimal(enc.system)
    if best is None:
        click.echo("no explanation exists", err=True)
        sys.exit(1)
    emit(_waodag_record(1, best.assignment, best.cost, w))


@abduce.command("enumerate")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["all", "cardinal"]), default="all")
@click.option("--k", default="all", help="number of solutions, or 'all'")
@click.option("--delta", type=float, default=None,
              help="cardinal-mode perturbation size")
@cli_errors
def abduce_enumerate(model, mode, k, delta):
    w = model_io.parse_waodag_file(model)
    enc = encode_waodag(w, essential=True)
    want = _parse_k(k)
    if mode == "cardinal":
        ranked = search.enumerate_cardinal(enc, want, delta=delta)
    else:
        ranked = search.enumerate_best(enc.system, want)
    _log(f"emitted {len(ranked)} solutions")
    for r in ranked:
        emit(_waodag_record(r.rank, r.assignment, r.cost, w))


@abduce.command("oracle")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["all", "cardinal"]), default="all")
@click.option("--k", default="all")
@click.option("--limit", type=int, default=20, help="hypothesis-count cap")
@cli_errors
def abduce_oracle(model, mode, k, limit):
    w = model_io.parse_waodag_file(model)
    want = _parse_k(k)
    listed = wd.enumerate_explanations_oracle(w, limit=limit)
    if mode == "cardinal":
        listed = [(e, c) for e, c in listed if wd.is_cardinal(w, e)]
    rank = 0
    for e, c in listed:
        if want is not search.ALL and rank >= want:
            break
        rank += 1
        enc = encode_waodag(w, essential=True)
        emit(_waodag_record(rank, truth_to_solution(enc, e), c, w))


@abduce.command("encode")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--essential/--no-essential", default=True,
              help="include the evidence equality rows")
@cli_errors
def abduce_encode(model, essential):
    w = model_io.parse_waodag_file(model)
    enc = encode_waodag(w, essential=essential)
    click.echo(dump(enc.system))


# --- mpe --------------------------------------------------------------------

def _gather_evidence(b, evidence: Optional[str], evidence_file: Optional[str]):
    merged: bn.InstantiationSet = {}
    if evidence_file:
        with open(evidence_file, "r", encoding="utf-8") as fh:
            for var, val in json.load(fh).items():
                merged[var] = str(val)
    if evidence:
        for var, val in model_io.parse_evidence_spec(evidence, b).items():
            if var in merged and merged[var] != val:
                raise ParseError(f"conflicting evidence for {var!r}")
            merged[var] = val
    for var, val in merged.items():
        if var not in b.ranges:
            raise ParseError(f"evidence for unknown variable {var!r}")
        if val not in b.ranges[var]:
            raise ParseError(f"evidence value {var}={val} not in range")
    return merged


def _mpe_record(rank, r_assignment, cost, prob, inst) -> dict:
    return {"rank": rank, "cost": cost, "probability": prob,
            "assignment": dict(r_assignment), "instantiation": dict(inst)}


@click.group()
def mpe():
    """Belief revision (k-best MPE) over Bayesian-network model files."""


def _mpe_model_options(f):
    f = click.option("--zero-prob", type=click.Choice(["clamp", "reject"]),
                     default="clamp")(f)
    f = click.option("--evidence", default=None,
                     help="comma-separated Var=value pairs")(f)
    f = click.option("--evidence-file",
                     type=click.Path(exists=True, dir_okay=False),
                     default=None)(f)
    return f


@mpe.command("solve")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@_mpe_model_options
@click.option("--delta", type=float, default=None)
@click.option("--strict-permissibility", is_flag=True, default=False)
@cli_errors
def mpe_solve(model, zero_prob, evidence, evidence_file, delta,
              strict_permissibility):
    b = model_io.parse_bayesnet_file(model)
    e = _gather_evidence(b, evidence, evidence_file)
    enc = apply_evidence(encode_bayesnet(b, zero_prob=zero_prob), e)
    ranked = search.enumerate_permissible(enc, 1, delta=delta,
                                          strict_mode=strict_permissibility)
    if not ranked:
        click.echo("no explanation exists", err=True)
        sys.exit(1)
    r = ranked[0]
    emit(_mpe_record(1, r.assignment, r.cost, r.probability, r.instantiation))


@mpe.command("enumerate")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@_mpe_model_options
@click.option("--k", default="all")
@click.option("--delta", type=float, default=None)
@click.option("--strict-permissibility", is_flag=True, default=False)
@cli_errors
def mpe_enumerate(model, zero_prob, evidence, evidence_file, k, delta,
                  strict_permissibility):
    b = model_io.parse_bayesnet_file(model)
    e = _gather_evidence(b, evidence, evidence_file)
    enc = apply_evidence(encode_bayesnet(b, zero_prob=zero_prob), e)
    ranked = search.enumerate_permissible(enc, _parse_k(k), delta=delta,
                                          strict_mode=strict_permissibility)
    _log(f"emitted {len(ranked)} solutions")
    for r in ranked:
        emit(_mpe_record(r.rank, r.assignment, r.cost, r.probability,
                         r.instantiation))


@mpe.command("oracle")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@_mpe_model_options
@click.option("--k", default="all")
@cli_errors
def mpe_oracle(model, zero_prob, evidence, evidence_file, k):
    b = model_io.parse_bayesnet_file(model)
    e = _gather_evidence(b, evidence, evidence_file)
    enc = apply_evidence(encode_bayesnet(b, zero_prob=zero_prob), e)
    want = _parse_k(k)
    rank = 0
    for w, p in bn.enumerate_mpe_oracle(b, e):
        if want is not search.ALL and rank >= want:
            break
        rank += 1
        s = instantiation_to_solution(enc, w)
        from .constraints import objective
        emit(_mpe_record(rank, s, objective(enc.system, s), p, w))


@mpe.command("encode")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@_mpe_model_options
@cli_errors
def mpe_encode(model, zero_prob, evidence, evidence_file):
    b = model_io.parse_bayesnet_file(model)
    e = _gather_evidence(b, evidence, evidence_file)
    enc = apply_evidence(encode_bayesnet(b, zero_prob=zero_prob), e)
    click.echo(dump(enc.system))


# --- gen --------------------------------------------------------------------

@click.group()
def gen():
    """Seeded random model instances, printed as model JSON."""


@gen.command("waodag")
@click.option("--seed", type=int, required=True)
@click.option("--hypotheses", type=int, default=5)
@click.option("--internal", type=int, default=7)
@click.option("--max-cost", type=int, default=10)
@click.option("--strict", is_flag=True, default=False)
@cli_errors
def gen_waodag(seed, hypotheses, internal, max_cost, strict):
    w = generate.random_waodag(seed, hypotheses, internal, max_cost, strict)
    click.echo(_jval(model_io.waodag_to_doc(w)))


@gen.command("bn")
@click.option("--seed", type=int, required=True)
@click.option("--variables", type=int, default=4)
@click.option("--max-range", type=int, default=3)
@click.option("--max-parents", type=int, default=2)
@click.option("--allow-extreme", is_flag=True, default=False,
              help="let CPT entries approach 0 and 1")
@cli_errors
def gen_bn(seed, variables, max_range, max_parents, allow_extreme):
    b = generate.random_bayesnet(seed, variables, max_range, max_parents,
                                 margin=0.0 if allow_extreme else 0.05)
    click.echo(_jval(model_io.bayesnet_to_doc(b)))
