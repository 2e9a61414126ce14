"""Randomized models, traces, and formulae; bounded counterexample search.

Everything here is deterministic in the seed: identical (seed, config) pairs
reproduce identical structures byte-for-byte after serialization. Model
generation keeps relations structure-preserving by construction: node pairs
are drawn first and edge pairs are admitted only when their endpoint images
are already related.
"""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .algebra import Algebra, PredicateLabeling, RelMorphism, graph_signature, is_functional
from .logic import (
    And,
    App,
    Assignment,
    Context,
    Eq,
    Exists,
    FALSE_PNF,
    Formula,
    Label,
    NegAtom,
    Next,
    NextAll,
    Not,
    Or,
    Then,
    TRUE,
    Until,
    UntilAll,
    Var,
    WUntil,
    to_pnf,
)
from .macros import has_loop, loop_edge, src
from .model import CounterpartModel, LassoTrace, TraceStep
from .semantics import Evaluator

_SEED_SPAN = 2**62


class GenError(ValueError):
    pass


@dataclass(frozen=True)
class GenConfig:
    """Bounds and seed for the random generators."""

    seed: int = 0
    max_worlds: int = 3
    max_elems: int = 3
    max_rels_per_pair: int = 1
    formula_depth: int = 4
    context_size: int = 2
    labels: int = 0
    functional_only: bool = False

    def __post_init__(self) -> None:
        for name in ("max_worlds", "max_elems", "max_rels_per_pair", "formula_depth", "context_size"):
            if getattr(self, name) < 1:
                raise GenError(f"{name} must be at least 1")
        if self.labels < 0:
            raise GenError("labels must be nonnegative")


def label_names(count: int) -> tuple[str, ...]:
    base = ("B", "R")
    return base[:count] + tuple(f"L{i}" for i in range(2, count))


# ---------------------------------------------------------------------------
# Models and traces
# ---------------------------------------------------------------------------

def gen_model(cfg: GenConfig) -> CounterpartModel:
    """A random counterpart model over the graph signature, deterministic in cfg.seed."""
    rng = random.Random(cfg.seed)
    sig = graph_signature()
    n_worlds = rng.randint(1, cfg.max_worlds)
    worlds = tuple(f"w{i}" for i in range(n_worlds))

    algebras: dict[str, Algebra] = {}
    node_count = 0
    edge_count = 0
    for w in worlds:
        nodes = tuple(f"n{node_count + i}" for i in range(rng.randint(0, cfg.max_elems)))
        node_count += len(nodes)
        n_edges = rng.randint(0, cfg.max_elems) if nodes else 0
        edges = tuple(f"e{edge_count + i}" for i in range(n_edges))
        edge_count += len(edges)
        interps = {
            "s": {(e,): rng.choice(nodes) for e in edges},
            "t": {(e,): rng.choice(nodes) for e in edges},
        }
        algebras[w] = Algebra(sig, {"N": nodes, "E": edges}, interps)

    labeling: dict[tuple[str, str], dict[str, frozenset[str]]] = {}
    for name in label_names(cfg.labels):
        per_world = {}
        for w in worlds:
            chosen = frozenset(n for n in algebras[w].carrier("N") if rng.random() < 0.4)
            if chosen:
                per_world[w] = chosen
        if per_world:
            labeling[(name, "N")] = per_world

    atomics: dict[tuple[str, str], dict[str, RelMorphism]] = {}
    rel_counter = 0
    for w1 in worlds:
        for w2 in worlds:
            for _ in range(rng.randint(0, cfg.max_rels_per_pair)):
                rel = gen_relation(rng, algebras[w1], algebras[w2], cfg.functional_only)
                atomics.setdefault((w1, w2), {})[f"C{rel_counter}"] = rel
                rel_counter += 1

    model = CounterpartModel(
        signature=sig,
        worlds=worlds,
        assign=algebras,
        atomics=atomics,
        labeling=PredicateLabeling(labeling),
    )
    if cfg.functional_only:
        for name in model.relation_names():
            assert is_functional(model.relation(name)[0])
    return model


def gen_relation(
    rng: random.Random, source: Algebra, target: Algebra, functional: bool
) -> RelMorphism:
    density = rng.uniform(0.25, 0.8)
    node_pairs: set[tuple[str, str]] = set()
    tgt_nodes = target.carrier("N")
    for a in source.carrier("N"):
        if functional:
            if tgt_nodes and rng.random() < density:
                node_pairs.add((a, rng.choice(tgt_nodes)))
        else:
            for b in tgt_nodes:
                if rng.random() < density:
                    node_pairs.add((a, b))
    edge_pairs: set[tuple[str, str]] = set()
    for e1 in source.carrier("E"):
        s1 = source.apply("s", (e1,))
        t1 = source.apply("t", (e1,))
        admissible = [
            e2
            for e2 in target.carrier("E")
            if (s1, target.apply("s", (e2,))) in node_pairs
            and (t1, target.apply("t", (e2,))) in node_pairs
        ]
        if functional:
            if admissible and rng.random() < density:
                edge_pairs.add((e1, rng.choice(admissible)))
        else:
            for e2 in admissible:
                if rng.random() < density:
                    edge_pairs.add((e1, e2))
    return RelMorphism(source, target, {"N": frozenset(node_pairs), "E": frozenset(edge_pairs)})


def gen_trace(model: CounterpartModel, seed: int, max_steps: int = 8) -> LassoTrace | None:
    """A random lasso over the model's atomic relations; None when no cycle is
    reachable within max_steps."""
    rng = random.Random(seed)
    adjacency: dict[str, list[tuple[str, str]]] = {w: [] for w in model.worlds}
    for name in sorted(model.relation_names()):
        _, w1, w2 = model.relation(name)
        adjacency[w1].append((name, w2))
    starts = [w for w in model.worlds if adjacency[w]]
    if not starts:
        return None
    here = rng.choice(starts)
    walk: list[TraceStep] = []
    for _ in range(max_steps):
        outs = adjacency[here]
        if not outs:
            return None
        rel_name, nxt = rng.choice(outs)
        walk.append(TraceStep(world=here, relation=rel_name))
        for j, st in enumerate(walk):
            if st.world == nxt:
                return LassoTrace(model, tuple(walk[:j]), tuple(walk[j:]))
        here = nxt
    return None


# ---------------------------------------------------------------------------
# Formulae
# ---------------------------------------------------------------------------

def gen_formula(cfg: GenConfig, ctx: Context) -> Formula:
    """A random well-typed minimal-grammar formula of depth <= cfg.formula_depth."""
    rng = random.Random(cfg.seed)
    return _gen_formula(rng, ctx, cfg.formula_depth, cfg)


def _terms_by_sort(ctx: Context) -> dict[str, list]:
    n_terms: list = []
    e_terms: list = []
    for name, sort in ctx.entries:
        if sort == "N":
            n_terms.append(Var(name))
        else:
            e_terms.append(Var(name))
            n_terms.append(App("s", (Var(name),)))
            n_terms.append(App("t", (Var(name),)))
    return {"N": n_terms, "E": e_terms}


def _gen_atom(rng: random.Random, ctx: Context, cfg: GenConfig) -> Formula:
    terms = _terms_by_sort(ctx)
    options = ["true"]
    if terms["N"]:
        options.append("eqN")
        if cfg.labels:
            options.append("label")
    if terms["E"]:
        options.append("eqE")
    kind = rng.choice(options)
    if kind == "true":
        return TRUE
    if kind == "label":
        return Label(rng.choice(label_names(cfg.labels)), rng.choice(terms["N"]))
    sort = "N" if kind == "eqN" else "E"
    return Eq(sort, rng.choice(terms[sort]), rng.choice(terms[sort]))


def _gen_formula(rng: random.Random, ctx: Context, depth: int, cfg: GenConfig) -> Formula:
    if depth <= 0:
        return _gen_atom(rng, ctx, cfg)
    options = ["atom", "not", "or", "next", "until", "wuntil"]
    if len(ctx) < cfg.context_size:
        options.append("exists")
        options.append("exists")  # quantifiers are what make the logic interesting
    kind = rng.choice(options)
    if kind == "atom":
        return _gen_atom(rng, ctx, cfg)
    if kind == "not":
        return Not(_gen_formula(rng, ctx, depth - 1, cfg))
    if kind == "or":
        return Or(_gen_formula(rng, ctx, depth - 1, cfg), _gen_formula(rng, ctx, depth - 1, cfg))
    if kind == "next":
        return Next(_gen_formula(rng, ctx, depth - 1, cfg))
    if kind == "until":
        return Until(_gen_formula(rng, ctx, depth - 1, cfg), _gen_formula(rng, ctx, depth - 1, cfg))
    if kind == "wuntil":
        return WUntil(_gen_formula(rng, ctx, depth - 1, cfg), _gen_formula(rng, ctx, depth - 1, cfg))
    var = f"v{len(ctx)}"
    sort = rng.choice(("N", "E"))
    return Exists(var, sort, _gen_formula(rng, ctx.extended(var, sort), depth - 1, cfg))


# ---------------------------------------------------------------------------
# Counterexample search (relational-only inequivalences)
# ---------------------------------------------------------------------------

TARGETS = (
    "t-u-duality",
    "f-w-duality",
    "u-expansion",
    "w-expansion",
    "f-expansion",
    "t-expansion",
)

_X = Var("x")
_B = Label("B", _X)
_R = Label("R", _X)


def target_formulas(target: str) -> tuple[Formula, Formula, str]:
    """(lhs, rhs, kind) for a search target; kind 'duality' means the claim is
    ¬lhs ⟺ rhs, kind 'equivalence' means lhs ⟺ rhs."""
    not_b_and_not_r = And(NegAtom(_B), NegAtom(_R))
    if target == "t-u-duality":
        return Then(_B, _R), Until(NegAtom(_R), not_b_and_not_r), "duality"
    if target == "f-w-duality":
        return UntilAll(_B, _R), WUntil(NegAtom(_R), not_b_and_not_r), "duality"
    if target == "u-expansion":
        u = Until(_B, _R)
        return u, Or(_R, And(_B, Next(u))), "equivalence"
    if target == "w-expansion":
        w = WUntil(_B, _R)
        return w, Or(_R, And(_B, Next(w))), "equivalence"
    if target == "f-expansion":
        f = UntilAll(_B, _R)
        return f, Or(_R, And(_B, NextAll(f))), "equivalence"
    if target == "t-expansion":
        t = Then(_B, _R)
        return t, Or(_R, And(_B, NextAll(t))), "equivalence"
    raise GenError(f"unknown search target {target!r}; expected one of {', '.join(TARGETS)}")


@dataclass(frozen=True)
class Witness:
    """A model/trace/assignment on which the target claim fails, re-verified."""

    target: str
    kind: str
    model: CounterpartModel
    trace: LassoTrace
    position: int
    assignment: Assignment
    lhs: Formula
    rhs: Formula
    lhs_value: bool
    rhs_value: bool
    candidate_index: int

    def violated(self) -> bool:
        if self.kind == "duality":
            return (not self.lhs_value) != self.rhs_value
        return self.lhs_value != self.rhs_value

    def reverify(self) -> bool:
        """Re-evaluate both sides from scratch and confirm the disagreement."""
        ev = Evaluator(self.trace, max_context=8, memo=False)
        lhs = ev.sat_pnf(self.position, self.assignment, self.lhs)
        rhs = ev.sat_pnf(self.position, self.assignment, self.rhs)
        if lhs != self.lhs_value or rhs != self.rhs_value:
            return False
        return self.violated()


def default_search_config(seed: int = 0) -> GenConfig:
    return GenConfig(
        seed=seed,
        max_worlds=3,
        max_elems=2,
        max_rels_per_pair=2,
        formula_depth=3,
        context_size=1,
        labels=2,
    )


def _threads() -> int:
    raw = os.environ.get("QLTL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _first_found(check, budget: int):
    """Run check(k) for k in range(budget); return the lowest-k non-None result.

    With QLTL_THREADS > 1, candidates are fanned out in chunks; the merge picks
    the smallest candidate index so results match the sequential order.
    """
    workers = _threads()
    if workers <= 1:
        for k in range(budget):
            hit = check(k)
            if hit is not None:
                return hit
        return None
    chunk = 64
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, budget, chunk * workers):
            ranges = [
                range(s, min(s + chunk, budget))
                for s in range(start, min(start + chunk * workers, budget), chunk)
            ]
            results = pool.map(lambda r: [hit for k in r if (hit := check(k)) is not None], ranges)
            found = [hit for sub in results for hit in sub]
            if found:
                return min(found, key=lambda w: w.candidate_index)
    return None


def _candidate_search_model(rng: random.Random, cfg: GenConfig) -> tuple[CounterpartModel, LassoTrace]:
    """A chain-shaped candidate within cfg's bounds: worlds w0 -> w1 -> ... with
    a self-relation closing the lasso on the last world. Chain traces expose
    the multi-step counterpart splits the relational counterexamples need."""
    sig = graph_signature()
    n_worlds = rng.randint(1, cfg.max_worlds)
    worlds = tuple(f"w{i}" for i in range(n_worlds))
    algebras: dict[str, Algebra] = {}
    node_counter = 0
    edge_counter = 0
    for w in worlds:
        nodes = tuple(f"n{node_counter + i}" for i in range(rng.randint(1, cfg.max_elems)))
        node_counter += len(nodes)
        n_edges = rng.randint(0, cfg.max_elems)
        edges = tuple(f"e{edge_counter + i}" for i in range(n_edges))
        edge_counter += len(edges)
        interps = {
            "s": {(e,): rng.choice(nodes) for e in edges},
            "t": {(e,): rng.choice(nodes) for e in edges},
        }
        algebras[w] = Algebra(sig, {"N": nodes, "E": edges}, interps)
    labeling: dict[tuple[str, str], dict[str, frozenset[str]]] = {}
    for name in label_names(max(cfg.labels, 2)):
        per_world = {}
        for w in worlds:
            chosen = frozenset(n for n in algebras[w].carrier("N") if rng.random() < 0.5)
            if chosen:
                per_world[w] = chosen
        if per_world:
            labeling[(name, "N")] = per_world
    atomics: dict[tuple[str, str], dict[str, RelMorphism]] = {}
    steps: list[TraceStep] = []
    for i, w in enumerate(worlds):
        nxt = worlds[i + 1] if i + 1 < n_worlds else w
        rel = gen_relation(rng, algebras[w], algebras[nxt], cfg.functional_only)
        atomics[(w, nxt)] = {f"K{i}": rel}
        steps.append(TraceStep(world=w, relation=f"K{i}"))
    model = CounterpartModel(
        signature=sig,
        worlds=worlds,
        assign=algebras,
        atomics=atomics,
        labeling=PredicateLabeling(labeling),
    )
    trace = LassoTrace(model, prefix=tuple(steps[:-1]), cycle=(steps[-1],))
    return model, trace


def search_counterexample(
    target: str, cfg: GenConfig | None = None, budget: int = 10000
) -> Witness | None:
    """Bounded search for a relational witness falsifying the target claim.

    Samples chain models within cfg's bounds, evaluates both sides for every
    node assignment at every trace position, and returns the first
    disagreement, re-verified by direct evaluation. None when the budget is
    exhausted.
    """
    cfg = cfg or default_search_config()
    lhs, rhs, kind = target_formulas(target)
    base = random.Random(cfg.seed).randrange(_SEED_SPAN)
    ctx = Context((("x", "N"),))

    def check(k: int) -> Witness | None:
        rng = random.Random(base + k)
        model, trace = _candidate_search_model(rng, cfg)
        ev = Evaluator(trace, max_context=4)
        for pos in range(len(trace)):
            world = trace.world_at(pos)
            for node in model.algebra(world).carrier("N"):
                mu = Assignment(ctx, world, (node,))
                lv = ev.sat_pnf(pos, mu, lhs)
                rv = ev.sat_pnf(pos, mu, rhs)
                witness = Witness(target, kind, model, trace, pos, mu, lhs, rhs, lv, rv, k)
                if witness.violated():
                    if not witness.reverify():
                        raise GenError(f"witness for {target} failed re-verification (evaluator bug)")
                    return witness
        return None

    return _first_found(check, budget)


# ---------------------------------------------------------------------------
# Duplication showcase model (next-forall / until-forall judgments)
# ---------------------------------------------------------------------------

def duplication_judgments(trace: LassoTrace) -> list[tuple[str, int, tuple[str, str], str, Formula, bool]]:
    """The seven judgments the duplication showcase must exhibit.

    Each entry is (description, position, (var, sort), element, formula,
    expected). All formulae are in positive normal form.
    """
    x = Var("x")
    hl_x = has_loop(x, pnf=True)
    hl_sx = has_loop(src(x), pnf=True)
    lp = loop_edge(x)
    return [
        ("A hasLoop(x) at n0, step 0", 0, ("x", "N"), "n0", NextAll(hl_x), True),
        ("A hasLoop(x) at n1, step 1", 1, ("x", "N"), "n1", NextAll(hl_x), False),
        ("hasLoop(s(x)) U loop(x) at e1, step 1", 1, ("x", "E"), "e1", Until(hl_sx, lp), True),
        ("hasLoop(s(x)) F loop(x) at e1, step 1", 1, ("x", "E"), "e1", UntilAll(hl_sx, lp), False),
        ("A loop(x) at e5, step 2", 2, ("x", "E"), "e5", NextAll(lp), True),
        ("hasLoop(x) F false at n5, step 2", 2, ("x", "N"), "n5", UntilAll(hl_x, FALSE_PNF), True),
        ("hasLoop(s(x)) T !loop(x) at e4, step 2", 2, ("x", "E"), "e4", Then(hl_sx, NegAtom(lp)), True),
    ]


def check_duplication_judgments(trace: LassoTrace) -> bool:
    ev = Evaluator(trace, max_context=4)
    for _, pos, (var, sort), elem, phi, expected in duplication_judgments(trace):
        world = trace.world_at(pos)
        if elem not in trace.model.algebra(world).carrier(sort):
            return False
        mu = Assignment(Context(((var, sort),)), world, (elem,))
        if ev.sat_pnf(pos, mu, phi) != expected:
            return False
    return True


def _candidate_duplication_model(rng: random.Random) -> tuple[CounterpartModel, LassoTrace]:
    """One structured candidate: three worlds whose carrier sizes place n0, n1,
    e1, e4, e5, n5 where the judgments need them, with loop-biased edges and a
    self-cycle on the last world."""
    sig = graph_signature()
    nodes_split = rng.choice(((1, 2, 3), (1, 3, 2)))
    edges_split = rng.choice(((0, 3, 3), (1, 2, 3), (1, 3, 2)))
    worlds = ("w0", "w1", "w2")
    algebras: dict[str, Algebra] = {}
    node_iter = iter(range(6))
    edge_iter = iter(range(6))
    for w, n_nodes, n_edges in zip(worlds, nodes_split, edges_split):
        nodes = tuple(f"n{next(node_iter)}" for _ in range(n_nodes))
        edges = tuple(f"e{next(edge_iter)}" for _ in range(n_edges))
        interps: dict[str, dict[tuple[str, ...], str]] = {"s": {}, "t": {}}
        for e in edges:
            a = rng.choice(nodes)
            b = a if rng.random() < 0.45 else rng.choice(nodes)
            interps["s"][(e,)] = a
            interps["t"][(e,)] = b
        algebras[w] = Algebra(sig, {"N": nodes, "E": edges}, interps)
    atomics = {
        ("w0", "w1"): {"K0": gen_relation(rng, algebras["w0"], algebras["w1"], False)},
        ("w1", "w2"): {"K1": gen_relation(rng, algebras["w1"], algebras["w2"], False)},
        ("w2", "w2"): {"K2": gen_relation(rng, algebras["w2"], algebras["w2"], False)},
    }
    model = CounterpartModel(signature=sig, worlds=worlds, assign=algebras, atomics=atomics)
    trace = LassoTrace(
        model,
        prefix=(TraceStep("w0", "K0"), TraceStep("w1", "K1")),
        cycle=(TraceStep("w2", "K2"),),
    )
    return model, trace


def search_duplication_model(seed: int = 0, budget: int = 200000) -> tuple[CounterpartModel, LassoTrace, int] | None:
    """Bounded search for a model exhibiting all seven duplication judgments;
    returns (model, trace, candidate index) for the first hit.

    Candidates where the first judgment would hold vacuously (n0 without any
    counterpart) are rejected so the pinned fixture genuinely shows every
    counterpart of n0 carrying a loop.
    """
    base = random.Random(seed).randrange(_SEED_SPAN)
    for k in range(budget):
        rng = random.Random(base + k)
        model, trace = _candidate_duplication_model(rng)
        if not trace.relation_at(0).images("N", "n0"):
            continue
        if check_duplication_judgments(trace):
            return model, trace, k
    return None


# ---------------------------------------------------------------------------
# Differential suites
# ---------------------------------------------------------------------------

@dataclass
class DiffSummary:
    models: int = 0
    checks: int = 0
    law_counts: dict = field(default_factory=dict)
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements


def _assignment_at(rng, trace, pos, ctx: Context) -> Assignment | None:
    """A valuation of ctx at the given position, or None when some sort has an
    empty carrier there."""
    world = trace.world_at(pos)
    alg = trace.model.algebra(world)
    values = []
    for _, sort in ctx.entries:
        carrier = alg.carrier(sort)
        if not carrier:
            return None
        values.append(rng.choice(carrier))
    return Assignment(ctx, world, tuple(values))


def _atomic_pair(rng, ctx, cfg):
    sub = random.Random(rng.randrange(_SEED_SPAN))
    return _gen_atom(sub, ctx, cfg), _gen_atom(sub, ctx, cfg)


def run_difftest(
    models: int = 500,
    depth: int = 4,
    seed: int = 0,
    functional: bool = False,
    formulas_per_model: int = 20,
    positions: tuple[int, ...] = (0, 1, 2),
    max_context: int = 8,
) -> DiffSummary:
    """Randomized equivalence suites.

    Relational mode checks, per (model, formula, position): the PNF
    translation agrees with direct evaluation; the three negation rewrites and
    the next-forall/next duality hold for atomic operands. Functional mode
    additionally checks the strong/weak dualities and the four expansion laws,
    which only hold when every relation is a partial function.
    """
    rng = random.Random(seed)
    summary = DiffSummary()
    attempts = 0
    while summary.models < models and attempts < 50 * max(models, 1):
        attempts += 1
        mcfg = GenConfig(
            seed=rng.randrange(_SEED_SPAN),
            max_worlds=3,
            max_elems=3,
            max_rels_per_pair=2,
            formula_depth=depth,
            context_size=2,
            labels=2,
            functional_only=functional,
        )
        model = gen_model(mcfg)
        trace = gen_trace(model, rng.randrange(_SEED_SPAN))
        if trace is None:
            continue
        summary.models += 1
        ev = Evaluator(trace, max_context=max_context)
        for _ in range(formulas_per_model):
            n_vars = rng.randint(0, mcfg.context_size)
            ctx = Context(tuple((f"u{i}", rng.choice(("N", "E"))) for i in range(n_vars)))
            phi = _gen_formula(random.Random(rng.randrange(_SEED_SPAN)), ctx, depth, mcfg)
            psi1, psi2 = _atomic_pair(rng, ctx, mcfg)
            neg1, neg2 = NegAtom(psi1), NegAtom(psi2)
            fun_pair = None
            if functional:
                fun_pair = (
                    to_pnf(_gen_formula(random.Random(rng.randrange(_SEED_SPAN)), ctx, 2, mcfg)),
                    to_pnf(_gen_formula(random.Random(rng.randrange(_SEED_SPAN)), ctx, 2, mcfg)),
                )
            for pos in positions:
                mu = _assignment_at(rng, trace, pos, ctx)
                if mu is None:
                    continue
                _check(summary, "pnf-translation", model, trace, pos, mu, phi,
                       ev.sat_qltl(pos, mu, phi) == ev.sat_pnf(pos, mu, to_pnf(phi)))
                _check(summary, "neg-next", model, trace, pos, mu, Next(psi1),
                       ev.sat_qltl(pos, mu, Not(Next(psi1))) == ev.sat_pnf(pos, mu, NextAll(neg1)))
                _check(summary, "neg-until", model, trace, pos, mu, Until(psi1, psi2),
                       ev.sat_qltl(pos, mu, Not(Until(psi1, psi2)))
                       == ev.sat_pnf(pos, mu, Then(neg2, And(neg1, neg2))))
                _check(summary, "neg-wuntil", model, trace, pos, mu, WUntil(psi1, psi2),
                       ev.sat_qltl(pos, mu, Not(WUntil(psi1, psi2)))
                       == ev.sat_pnf(pos, mu, UntilAll(neg2, And(neg1, neg2))))
                _check(summary, "nextall-next-duality", model, trace, pos, mu, NextAll(psi1),
                       (not ev.sat_pnf(pos, mu, NextAll(psi1))) == ev.sat_pnf(pos, mu, Next(neg1)))
                if functional:
                    _check(summary, "t-u-duality", model, trace, pos, mu, Then(psi1, psi2),
                           (not ev.sat_pnf(pos, mu, Then(psi1, psi2)))
                           == ev.sat_pnf(pos, mu, Until(neg2, And(neg1, neg2))))
                    _check(summary, "f-w-duality", model, trace, pos, mu, UntilAll(psi1, psi2),
                           (not ev.sat_pnf(pos, mu, UntilAll(psi1, psi2)))
                           == ev.sat_pnf(pos, mu, WUntil(neg2, And(neg1, neg2))))
                    f1, f2 = fun_pair
                    for name, op, nxt in (
                        ("u-expansion", Until, Next),
                        ("w-expansion", WUntil, Next),
                        ("f-expansion", UntilAll, NextAll),
                        ("t-expansion", Then, NextAll),
                    ):
                        whole = op(f1, f2)
                        expanded = Or(f2, And(f1, nxt(whole)))
                        _check(summary, name, model, trace, pos, mu, whole,
                               ev.sat_pnf(pos, mu, whole) == ev.sat_pnf(pos, mu, expanded))
    return summary


def _check(summary, law, model, trace, pos, mu, phi, ok: bool) -> None:
    summary.checks += 1
    summary.law_counts[law] = summary.law_counts.get(law, 0) + 1
    if not ok:
        summary.disagreements.append(
            {"law": law, "model": model, "trace": trace, "position": pos, "assignment": mu, "formula": phi}
        )
