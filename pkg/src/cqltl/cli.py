"""Command-line front end.

Subcommands: check (evaluate one judgment), pnf (print the positive normal
form), difftest (randomized equivalence suites), counterexamples (bounded
search for the relational-only inequivalences). Exit codes: 0 for sat /
all-pass, 1 for unsat / violation-or-missing, 2 for usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .algebra import graph_signature
from .generate import (
    TARGETS,
    Witness,
    default_search_config,
    run_difftest,
    search_counterexample,
)
from .logic import (
    Assignment,
    Context,
    ScopeError,
    SortError,
    Until,
    UntilAll,
    free_vars,
    to_pnf,
)
from .model import LassoTrace, ModelError
from .semantics import EvalError, Evaluator, until_witness_step
from .textio import (
    ModelFile,
    ParseError,
    parse_formula,
    parse_formula_auto,
    parse_model_file,
    serialize_formula,
    serialize_model,
)

_USAGE_ERROR = 2


@dataclass(frozen=True)
class Verdict:
    """The outcome of one judgment query, echoing what was asked."""

    satisfied: bool
    trace: str
    position: int
    assignment: dict[str, str]
    formula: str
    via: str  # qltl | pnf
    witness_step: int | None = None

    def to_json(self) -> str:
        payload = {
            "satisfied": self.satisfied,
            "trace": self.trace,
            "position": self.position,
            "assignment": self.assignment,
            "formula": self.formula,
            "via": self.via,
            "witness_step": self.witness_step,
        }
        return json.dumps(payload, sort_keys=True)

    def human(self) -> str:
        mark = "sat" if self.satisfied else "unsat"
        binds = ", ".join(f"{k}={v}" for k, v in self.assignment.items())
        line = f"{mark}  trace={self.trace} pos={self.position} assign={{{binds}}} via={self.via}"
        if self.witness_step is not None:
            line += f" witness_step={self.witness_step}"
        return line + f"\n      {self.formula}"


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; keep that as a return code so
        # the function is directly testable.
        return int(exc.code or 0)
    try:
        return args.entry(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR
    except (ModelError, EvalError, ScopeError, SortError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqltl",
        description="Quantified linear-time temporal logic over counterpart models.",
    )
    sub = parser.add_subparsers(required=True, metavar="COMMAND")

    check = sub.add_parser("check", help="evaluate a formula on a trace of a model file")
    check.add_argument("model", help="path to a .cqm model file")
    check.add_argument("--trace", help="trace name (optional when the file declares exactly one)")
    check.add_argument("--formula", required=True, help="formula text")
    check.add_argument("--assign", default="", help='assignment, e.g. "x=e0,y=n1" or "x:E=e0"')
    check.add_argument("--pos", type=int, default=0, help="trace position to evaluate at (default 0)")
    check.add_argument("--pnf", action="store_true", help="convert to positive normal form first")
    check.add_argument("--json", action="store_true", help="single-line machine-readable verdict")
    check.set_defaults(entry=_cmd_check)

    pnf = sub.add_parser("pnf", help="print the positive normal form of a formula")
    pnf.add_argument("--formula", required=True, help="formula text (base dialect)")
    pnf.add_argument("--ctx", default="", help='typed context, e.g. "x:E,y:N"')
    pnf.set_defaults(entry=_cmd_pnf)

    diff = sub.add_parser("difftest", help="randomized equivalence suites")
    diff.add_argument("--models", type=int, default=500)
    diff.add_argument("--depth", type=int, default=4)
    diff.add_argument("--seed", type=int, default=0)
    diff.add_argument("--functional", action="store_true",
                      help="functional-relation mode: adds duality and expansion-law checks")
    diff.set_defaults(entry=_cmd_difftest)

    cex = sub.add_parser("counterexamples", help="bounded search for relational-only inequivalences")
    cex.add_argument("--budget", type=int, default=10000, help="candidates per target")
    cex.add_argument("--seed", type=int, default=0)
    cex.add_argument("--out", default="witnesses", help="directory for persisted witnesses")
    cex.set_defaults(entry=_cmd_counterexamples)

    return parser


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------

def _load_model_file(path: str) -> ModelFile:
    return parse_model_file(Path(path).read_text(encoding="utf-8"), filename=path)


def _pick_trace(mf: ModelFile, name: str | None) -> tuple[str, LassoTrace]:
    if name is not None:
        if name not in mf.traces:
            raise ModelError(f"model file declares no trace named {name} "
                             f"(available: {', '.join(sorted(mf.traces)) or 'none'})")
        return name, mf.traces[name]
    if len(mf.traces) == 1:
        return next(iter(mf.traces.items()))
    raise ModelError("--trace is required when the model file declares more than one trace")


def _parse_binding(item: str) -> tuple[str, str | None, str]:
    var, _, elem = item.partition("=")
    if not _ or not elem:
        raise ModelError(f"malformed assignment entry {item!r}; expected var=element")
    var = var.strip()
    elem = elem.strip()
    sort: str | None = None
    if ":" in var:
        var, _, sort = var.partition(":")
        var = var.strip()
        sort = sort.strip()
    return var, sort, elem


def _build_assignment(mf: ModelFile, trace: LassoTrace, pos: int, text: str) -> Assignment:
    world = trace.world_at(pos)
    alg = mf.model.algebra(world)
    entries: list[tuple[str, str]] = []
    values: list[str] = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        var, sort, elem = _parse_binding(item)
        if sort is None:
            hits = [tau for tau in mf.model.signature.sorts if elem in alg.carrier(tau)]
            if not hits:
                raise ModelError(f"element {elem} does not exist in world {world} (position {pos})")
            if len(hits) > 1:
                raise ModelError(
                    f"element {elem} exists at several sorts in {world}; disambiguate with {var}:SORT={elem}"
                )
            sort = hits[0]
        elif elem not in alg.carrier(sort):
            raise ModelError(f"element {elem} is not in the {sort}-carrier of world {world}")
        entries.append((var, sort))
        values.append(elem)
    return Assignment(Context(tuple(entries)), world, tuple(values))


def _cmd_check(args) -> int:
    mf = _load_model_file(args.model)
    trace_name, trace = _pick_trace(mf, args.trace)
    pos = trace.normalize_pos(args.pos)
    mu = _build_assignment(mf, trace, pos, args.assign)
    labels = set(mf.model.labeling.label_names())
    phi, dialect = parse_formula_auto(
        args.formula, mu.context, mf.model.signature, labels=labels, filename="<formula>"
    )
    unbound = free_vars(phi) ^ set(mu.context.names())
    if unbound:
        raise ModelError(
            f"assignment must bind exactly the formula's free variables; mismatch on {sorted(unbound)}"
        )
    ev = Evaluator(trace, max_context=max(8, len(mu.context) + 6))
    if dialect == "pnf":
        satisfied = ev.sat_pnf(pos, mu, phi)
        via = "pnf"
        top = phi
    elif args.pnf:
        top = to_pnf(phi)
        satisfied = ev.sat_pnf(pos, mu, top)
        via = "pnf"
    else:
        satisfied = ev.sat_qltl(pos, mu, phi)
        via = "qltl"
        top = phi
    step = None
    if satisfied and isinstance(top, (Until, UntilAll)):
        flavor = "U" if isinstance(top, Until) else "F"
        step = until_witness_step(flavor, trace, pos, mu, top.left, top.right,
                                  max_context=max(8, len(mu.context) + 6))
    verdict = Verdict(
        satisfied=satisfied,
        trace=trace_name,
        position=pos,
        assignment=mu.as_dict(),
        formula=serialize_formula(phi),
        via=via,
        witness_step=step,
    )
    print(verdict.to_json() if args.json else verdict.human())
    return 0 if satisfied else 1


# ---------------------------------------------------------------------------
# pnf
# ---------------------------------------------------------------------------

def _parse_ctx(text: str, sorts: tuple[str, ...]) -> Context:
    entries = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        var, _, sort = item.partition(":")
        if not _ or not sort.strip():
            raise ModelError(f"malformed context entry {item!r}; expected var:SORT")
        if sort.strip() not in sorts:
            raise ModelError(f"unknown sort {sort.strip()!r} in context entry {item!r}")
        entries.append((var.strip(), sort.strip()))
    return Context(tuple(entries))


def _cmd_pnf(args) -> int:
    sig = graph_signature()
    ctx = _parse_ctx(args.ctx, sig.sorts)
    phi = parse_formula(args.formula, ctx, sig)
    print(serialize_formula(to_pnf(phi)))
    return 0


# ---------------------------------------------------------------------------
# difftest
# ---------------------------------------------------------------------------

def _cmd_difftest(args) -> int:
    summary = run_difftest(
        models=args.models, depth=args.depth, seed=args.seed, functional=args.functional
    )
    mode = "functional" if args.functional else "relational"
    print(f"difftest [{mode}]: {summary.models} models, {summary.checks} checks, "
          f"{len(summary.disagreements)} disagreements")
    if summary.disagreements:
        first = summary.disagreements[0]
        out = Path("difftest_failure.cqm")
        out.write_text(
            serialize_model(first["model"], name="DiffFailure", traces={"sigma": first["trace"]}),
            encoding="utf-8",
        )
        print(f"law violated: {first['law']}")
        print(f"position {first['position']}, assignment {first['assignment'].as_dict()}")
        print(f"formula: {serialize_formula(first['formula'])}")
        print(f"witness model written to {out}")
        return 1
    return 0


# ---------------------------------------------------------------------------
# counterexamples
# ---------------------------------------------------------------------------

def witness_metadata(w: Witness, seed: int, budget: int) -> dict:
    return {
        "target": w.target,
        "kind": w.kind,
        "trace": "sigma",
        "position": w.position,
        "assignment": w.assignment.as_dict(),
        "lhs": serialize_formula(w.lhs),
        "rhs": serialize_formula(w.rhs),
        "lhs_value": w.lhs_value,
        "rhs_value": w.rhs_value,
        "candidate_index": w.candidate_index,
        "seed": seed,
        "budget": budget,
    }


def persist_witness(w: Witness, out_dir: Path, seed: int, budget: int) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{w.target}.cqm").write_text(
        serialize_model(w.model, name="Witness", traces={"sigma": w.trace}), encoding="utf-8"
    )
    (out_dir / f"{w.target}.json").write_text(
        json.dumps(witness_metadata(w, seed, budget), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )


def _cmd_counterexamples(args) -> int:
    cfg = default_search_config(seed=args.seed)
    out_dir = Path(args.out)
    missing = []
    print(f"{'target':18s}  {'found':5s}  {'candidate':9s}  {'pos':3s}  assignment")
    for target in TARGETS:
        witness = search_counterexample(target, cfg, budget=args.budget)
        if witness is None:
            missing.append(target)
            print(f"{target:18s}  {'no':5s}  {'-':9s}  {'-':3s}  -")
            continue
        persist_witness(witness, out_dir, args.seed, args.budget)
        binds = ", ".join(f"{k}={v}" for k, v in witness.assignment.as_dict().items())
        print(f"{target:18s}  {'yes':5s}  {witness.candidate_index:<9d}  {witness.position:<3d}  {binds}")
    if missing:
        print(f"missing witnesses for: {', '.join(missing)}")
        return 1
    print(f"witnesses persisted under {out_dir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
