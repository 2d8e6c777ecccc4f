"""
JSON plan files.

::

    {"dims": [d1, ..., dL],
     "label": "...",
     "blocks": [{"parties": [1, 2],
                 "seed": "seed.json" | {state-set} | {plan},
                 "padding": [{"party": 3, "factor": [[re, im], ...]}, ...],
                 "external": "reference"}]}

Parties are 1-based. A string seed is a path relative to the plan file. A
seed object with a ``"blocks"`` key is a nested plan and is composed (and
later certified) recursively. ``"external"`` is optional and marks a seed
whose nonlocality the user vouches for.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

from .constructors import Block, CompositionPlan, compose_general
from .errors import InputError, NonlocalityError
from .states import (
    atomic_write_text,
    dumps_json,
    state_set_from_dict,
    state_set_to_dict,
    vector_from_json,
    vector_to_json,
)


def plan_to_dict(plan: CompositionPlan) -> dict:
    blocks = []
    for block in plan.blocks:
        seed = block.seed
        entry: dict[str, Any] = {
            "parties": [p + 1 for p in block.parties],
            "seed": plan_to_dict(seed.plan) if seed.plan is not None else state_set_to_dict(seed),
            "padding": [{"party": p + 1, "factor": vector_to_json(f)} for p, f in block.padding.items()],
        }
        if block.external is not None:
            entry["external"] = block.external
        blocks.append(entry)
    return {"dims": list(plan.dims), "label": plan.label, "blocks": blocks}


def _load_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _seed_from(raw: Any, base: Path, where: str, depth: int):
    if isinstance(raw, str):
        raw = _load_json(base / raw)
    if not isinstance(raw, dict):
        raise InputError(f"{where}: seed must be a path, a state set or a plan")
    if "blocks" in raw:
        return compose_general(plan_from_dict(raw, base, depth + 1))
    try:
        return state_set_from_dict(raw)
    except InputError as exc:
        raise InputError(f"{where}: {exc}") from exc


def plan_from_dict(data: Any, base: str | os.PathLike = ".", depth: int = 0) -> CompositionPlan:
    if depth > 16:
        raise InputError("plan nesting is too deep")
    base = Path(base)
    if not isinstance(data, dict) or not isinstance(data.get("blocks"), list):
        raise InputError("plan document must be an object with a 'blocks' list")
    dims = data.get("dims")
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise InputError("plan 'dims' must be a list of integers")
    blocks = []
    for bi, raw in enumerate(data["blocks"]):
        where = f"block {bi}"
        if not isinstance(raw, dict):
            raise InputError(f"{where}: expected an object")
        parties = raw.get("parties")
        if not isinstance(parties, list) or not all(isinstance(p, int) for p in parties):
            raise InputError(f"{where}: 'parties' must be a list of 1-based integers")
        if "seed" not in raw:
            raise InputError(f"{where}: missing 'seed'")
        try:
            seed = _seed_from(raw["seed"], base, where, depth)
        except NonlocalityError as exc:
            raise InputError(f"{where}: seed rejected: {exc}") from exc
        padding = {}
        for entry in raw.get("padding", []):
            if not isinstance(entry, dict) or not isinstance(entry.get("party"), int):
                raise InputError(f"{where}: padding entries need an integer 'party'")
            padding[entry["party"] - 1] = vector_from_json(entry.get("factor"), f"{where}, padding")
        external = raw.get("external")
        if external is not None and not isinstance(external, str):
            raise InputError(f"{where}: 'external' must be a string reference")
        blocks.append(Block(tuple(p - 1 for p in parties), seed, padding, external))
    label = data.get("label", "")
    return CompositionPlan(tuple(dims), tuple(blocks), label if isinstance(label, str) else "")


def write_plan(plan: CompositionPlan, path: str | os.PathLike) -> None:
    atomic_write_text(path, dumps_json(plan_to_dict(plan)))


def read_plan(path: str | os.PathLike) -> CompositionPlan:
    path = Path(path)
    return plan_from_dict(_load_json(path), path.parent)
