"""Frame configuration files: schema validation and model construction.

A config is a JSON document with explicit nodes/members/supports/loads,
member grouping with roles and section-pool labels, constraint settings,
optional functioning rules, and optional per-strategy optimizer defaults.
Bundled configs live in framefx/data and carry ``provenance: reconstructed``
where geometry or load magnitudes come from the benchmark literature rather
than a primary source.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .evaluate import VALID_FAMILIES, ConstraintSet
from .fea import DOF_NAMES, FrameModel
from .fx import FunctioningRule
from .sections import BUNDLED_POOLS, load_bundled_pool, load_section_table

__all__ = [
    "ConfigError",
    "BUNDLED_CONFIGS",
    "load_frame_config",
    "validate_frame_config",
    "build_frame",
]

BUNDLED_CONFIGS = {
    "frame-8story-1bay": "frame_8story_1bay.json",
    "frame-15story-3bay": "frame_15story_3bay.json",
    "frame-24story-3bay": "frame_24story_3bay.json",
}

STRATEGY_NAMES = ("none", "ifx", "fx")


class ConfigError(ValueError):
    """Config failed validation; ``problems`` lists field-level diagnostics."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid frame config:\n  " + "\n  ".join(self.problems))


def _check(doc):
    errs = []

    def need(key, types, where=doc, prefix=""):
        if key not in where:
            errs.append(f"{prefix}{key}: missing")
            return None
        val = where[key]
        if not isinstance(val, types):
            errs.append(f"{prefix}{key}: expected {types}, got {type(val).__name__}")
            return None
        return val

    if not isinstance(doc, dict):
        return ["config root must be a JSON object"]

    need("name", str)
    mat = need("material", dict)
    if mat is not None:
        for key in ("elastic_modulus", "yield_stress", "density"):
            v = need(key, (int, float), mat, "material.")
            if v is not None and v <= 0:
                errs.append(f"material.{key}: must be positive, got {v}")

    nodes = need("nodes", list)
    n_nodes = len(nodes) if nodes else 0
    if nodes is not None:
        for i, nd in enumerate(nodes):
            if not (isinstance(nd, list) and len(nd) == 2
                    and all(isinstance(c, (int, float)) for c in nd)):
                errs.append(f"nodes[{i}]: expected [x, y]")

    groups = need("groups", list)
    n_groups = len(groups) if groups else 0
    if groups is not None:
        for i, g in enumerate(groups):
            if not isinstance(g, dict):
                errs.append(f"groups[{i}]: expected object")
                continue
            role = g.get("role")
            if role not in ("beam", "column"):
                errs.append(f"groups[{i}].role: expected beam|column, got {role!r}")
            pool = g.get("pool")
            if not isinstance(pool, str):
                errs.append(f"groups[{i}].pool: expected pool label string")
            elif pool not in BUNDLED_POOLS and not Path(pool).suffix == ".csv":
                errs.append(f"groups[{i}].pool: unknown pool {pool!r} "
                            f"(bundled: {sorted(BUNDLED_POOLS)}, or a .csv path)")

    members = need("members", list)
    if members is not None:
        for i, m in enumerate(members):
            if not (isinstance(m, list) and len(m) == 3
                    and all(isinstance(c, int) for c in m)):
                errs.append(f"members[{i}]: expected [node_a, node_b, group_id]")
                continue
            a, b, g = m
            if not (0 <= a < n_nodes and 0 <= b < n_nodes) or a == b:
                errs.append(f"members[{i}]: node indices ({a}, {b}) invalid")
            if not 0 <= g < n_groups:
                errs.append(f"members[{i}]: group id {g} out of range")

    supports = need("supports", list)
    if supports is not None:
        if not supports:
            errs.append("supports: at least one support required")
        for i, s in enumerate(supports):
            if not isinstance(s, dict) or "node" not in s or "fix" not in s:
                errs.append(f"supports[{i}]: expected {{node, fix}}")
                continue
            if not (isinstance(s["node"], int) and 0 <= s["node"] < n_nodes):
                errs.append(f"supports[{i}].node: invalid index {s['node']!r}")
            if not (isinstance(s["fix"], list)
                    and all(d in DOF_NAMES for d in s["fix"])):
                errs.append(f"supports[{i}].fix: expected subset of {DOF_NAMES}")

    loads = need("loads", list)
    if loads is not None:
        for i, ld in enumerate(loads):
            if not isinstance(ld, dict) or "node" not in ld:
                errs.append(f"loads[{i}]: expected {{node, fx, fy, m}}")
                continue
            if not (isinstance(ld["node"], int) and 0 <= ld["node"] < n_nodes):
                errs.append(f"loads[{i}].node: invalid index {ld['node']!r}")

    levels = need("story_levels", list)
    if levels:
        if levels[0] <= 0 or any(b <= a for a, b in zip(levels, levels[1:])):
            errs.append("story_levels: must be positive and strictly ascending")

    cons = need("constraints", dict)
    if cons is not None:
        fams = cons.get("families")
        if not (isinstance(fams, list) and fams
                and all(f in VALID_FAMILIES for f in fams)):
            errs.append(f"constraints.families: expected non-empty subset of "
                        f"{VALID_FAMILIES}")
        if cons.get("k_mode", "fixed") not in ("fixed", "sway"):
            errs.append(f"constraints.k_mode: expected fixed|sway")

    rules = doc.get("functioning", [])
    if not isinstance(rules, list):
        errs.append("functioning: expected list")
        rules = []
    seen = {}
    for i, rule in enumerate(rules):
        if not isinstance(rule, dict):
            errs.append(f"functioning[{i}]: expected object")
            continue
        gids = rule.get("group_ids")
        hts = rule.get("heights_cm")
        if not (isinstance(gids, list) and all(isinstance(g, int) for g in gids)):
            errs.append(f"functioning[{i}].group_ids: expected list of group ids")
            continue
        if not (isinstance(hts, list) and len(hts) == len(gids)):
            errs.append(f"functioning[{i}].heights_cm: expected one height per group")
            continue
        for g in gids:
            if not 0 <= g < n_groups:
                errs.append(f"functioning[{i}].group_ids: group {g} out of range")
            elif g in seen:
                errs.append(f"functioning[{i}]: group {g} already functioned by "
                            f"rule {seen[g]} (rules must be disjoint)")
            else:
                seen[g] = i
        if hts and (hts[0] != 0 or any(b <= a for a, b in zip(hts, hts[1:]))):
            errs.append(f"functioning[{i}].heights_cm: must start at 0 and ascend")
        pools = {groups[g].get("pool") for g in gids
                 if isinstance(g, int) and 0 <= g < n_groups} if groups else set()
        if len(pools) > 1:
            errs.append(f"functioning[{i}]: all functioned groups must share one "
                        f"pool, got {sorted(pools)}")

    opt = doc.get("optimization")
    if opt is not None:
        if not isinstance(opt, dict):
            errs.append("optimization: expected object")
        else:
            for key in ("population", "max_fe"):
                block = opt.get(key)
                if block is not None and (
                        not isinstance(block, dict)
                        or set(block) - set(STRATEGY_NAMES)
                        or any(not isinstance(v, int) or v <= 0 for v in block.values())):
                    errs.append(f"optimization.{key}: expected positive ints keyed "
                                f"by {STRATEGY_NAMES}")

    if doc.get("second_order", False):
        errs.append("second_order: only first-order analysis is available "
                    "(flag reserved, must be false)")
    return errs


def validate_frame_config(doc) -> list:
    """Return a list of field-level problems (empty when valid)."""
    return _check(doc)


def load_frame_config(source) -> dict:
    """Load and validate a config from a path, bundled name, or dict."""
    if isinstance(source, dict):
        doc = source
    else:
        name = str(source)
        if name in BUNDLED_CONFIGS:
            ref = resources.files("framefx.data").joinpath(BUNDLED_CONFIGS[name])
            doc = json.loads(ref.read_text(encoding="utf-8"))
        else:
            path = Path(name)
            if not path.exists():
                raise ConfigError([f"config file not found: {path}"])
            try:
                doc = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ConfigError([f"not valid JSON: {exc}"]) from None
    errs = _check(doc)
    if errs:
        raise ConfigError(errs)
    return doc


def _load_pool(label):
    if label in BUNDLED_POOLS:
        return load_bundled_pool(label)
    return load_section_table(label, label=label)


def build_frame(doc):
    """Turn a validated config into (FrameModel, per-group pools,
    ConstraintSet, functioning rules, strategy defaults)."""
    mat = doc["material"]
    groups = doc["groups"]
    pool_cache = {}
    pools = []
    for g in groups:
        label = g["pool"]
        if label not in pool_cache:
            pool_cache[label] = _load_pool(label)
        pools.append(pool_cache[label])

    model = FrameModel(
        nodes=tuple((float(x), float(y)) for x, y in doc["nodes"]),
        members=tuple((a, b, g) for a, b, g in doc["members"]),
        supports=tuple((s["node"], tuple(s["fix"])) for s in doc["supports"]),
        loads=tuple((ld["node"], float(ld.get("fx", 0.0)), float(ld.get("fy", 0.0)),
                     float(ld.get("m", 0.0))) for ld in doc["loads"]),
        group_roles=tuple(g["role"] for g in groups),
        story_levels=tuple(float(v) for v in doc.get("story_levels", [])),
        elastic_modulus=float(mat["elastic_modulus"]),
        yield_stress=float(mat["yield_stress"]),
        density=float(mat["density"]),
        group_k_factors=tuple(float(g.get("k_factor", 1.0)) for g in groups),
        name=doc["name"],
    )

    cons = doc["constraints"]
    cs = ConstraintSet(
        families=frozenset(cons["families"]),
        stress_allowable=cons.get("stress_allowable"),
        drift_index_R=cons.get("drift_index"),
        interstory_index_RI=float(cons.get("interstory_index", 1.0 / 300.0)),
        roof_drift_limit_abs=cons.get("roof_drift_limit_abs"),
        k_mode=cons.get("k_mode", "fixed"),
    )

    rules = tuple(
        FunctioningRule(replaced_variable_ids=tuple(r["group_ids"]),
                        heights=tuple(float(h) for h in r["heights_cm"]))
        for r in doc.get("functioning", [])
    )

    opt = doc.get("optimization", {})
    defaults = {
        "population": dict(opt.get("population", {})),
        "max_fe": dict(opt.get("max_fe", {})),
    }
    return model, pools, cs, rules, defaults
