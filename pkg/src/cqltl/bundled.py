"""Access to the model files and search witnesses shipped with the package."""

from __future__ import annotations

import json
from importlib import resources

from .textio import ModelFile, parse_model_file


def fixture_text(name: str) -> str:
    return (resources.files("cqltl") / "fixtures" / name).read_text(encoding="utf-8")


def load_fixture(name: str) -> ModelFile:
    return parse_model_file(fixture_text(name), filename=name)


def running_example() -> ModelFile:
    """Three worlds: triangle, two-cycle, self-loop; merging and deletion."""
    return load_fixture("running_example.cqm")


def single_node_halt() -> ModelFile:
    """One node whose only self-relation is empty (quantifier-elision showcase)."""
    return load_fixture("single_node_halt.cqm")


def duplication_showcase() -> ModelFile:
    """Search-pinned model exhibiting the seven next-forall/until-forall judgments."""
    return load_fixture("duplication.cqm")


def four_worlds_colors() -> ModelFile:
    """Node-only worlds with B/R labels: merging, deletion, and a three-step
    until witness."""
    return load_fixture("four_worlds_colors.cqm")


def witness_names() -> tuple[str, ...]:
    root = resources.files("cqltl") / "fixtures" / "witnesses"
    return tuple(sorted(p.name[: -len(".cqm")] for p in root.iterdir() if p.name.endswith(".cqm")))


def witness_fixture(target: str) -> tuple[ModelFile, dict]:
    root = resources.files("cqltl") / "fixtures" / "witnesses"
    mf = parse_model_file((root / f"{target}.cqm").read_text(encoding="utf-8"), filename=f"{target}.cqm")
    meta = json.loads((root / f"{target}.json").read_text(encoding="utf-8"))
    return mf, meta
