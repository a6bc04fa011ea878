"""JSON document formats and their conversion to and from library objects.

Every document carries ``"schema": "<name>.v1"``.  Documents may nest: a
``coeff.v1`` file embeds a ``fincat.v1`` object under ``category``, a
``family.v1`` embeds a ``group.v1`` under ``group`` and so on.  Nested
objects may omit their own ``schema`` key.
"""

from __future__ import annotations

import json
from fractions import Fraction

import jsonschema

from .errors import ArgumentError, SchemaError, StructuralError
from .fincat import (Chain, FinCat, FiniteGroup, GCat, cyclic_group, dihedral_group,
                     group_from_permutations, poset_category, symmetric_group, trivial_group)
from .shapes import (CubicalSet, Generator, GSimplicialSet, SimplicialSet, generators_from,
                     representable_cube, standard_simplex)

_NAME = {"type": "string", "minLength": 1}
_NAMES = {"type": "array", "items": _NAME}
_INTS = {"type": "array", "items": {"type": "integer"}}
_MATRIX = {"type": "array", "items": _INTS}
_PERM = {"type": "array", "items": {"type": "integer", "minimum": 0}}

GROUP = {
    "type": "object",
    "properties": {
        "schema": {"const": "group.v1"},
        "multiplication": {"type": "array", "minItems": 1, "items": _PERM},
        "generators": {"type": "array", "items": _PERM},
        "named": {"type": "string", "pattern": r"^(trivial|cyclic:\d+|symmetric:\d+|dihedral:\d+)$"},
    },
    "oneOf": [{"required": ["multiplication"]}, {"required": ["generators"]}, {"required": ["named"]}],
}

FINCAT = {
    "type": "object",
    "properties": {
        "schema": {"const": "fincat.v1"},
        "poset": {"type": "integer", "minimum": 0},
        "objects": {"type": "array", "minItems": 1, "items": _NAME},
        "morphisms": {"type": "array", "items": {
            "type": "object",
            "properties": {"id": _NAME, "dom": _NAME, "cod": _NAME, "identity": {"type": "boolean"}},
            "required": ["id", "dom", "cod"], "additionalProperties": False}},
        "composition": {"type": "array", "items": {"type": "array", "items": _NAME, "minItems": 3, "maxItems": 3}},
        "group": GROUP,
        "action": {"type": "array", "items": {
            "type": "object",
            "properties": {"objects": _NAMES, "morphisms": _NAMES},
            "required": ["objects", "morphisms"], "additionalProperties": False}},
    },
    "oneOf": [{"required": ["poset"]}, {"required": ["objects"]}],
    "dependentRequired": {"action": ["group"]},
}

_CHAIN = {
    "oneOf": [
        {"type": "object", "properties": {"object": _NAME}, "required": ["object"], "additionalProperties": False},
        {"type": "array", "minItems": 1, "items": _NAME},
    ]
}

_ABELIAN = {
    "type": "object",
    "properties": {"rank": {"type": "integer", "minimum": 0}, "relations": _MATRIX},
    "required": ["rank"], "additionalProperties": False,
}

COEFF = {
    "type": "object",
    "properties": {
        "schema": {"const": "coeff.v1"},
        "category": FINCAT,
        "kind": {"enum": ["constant", "explicit"]},
        "group": _ABELIAN,
        "action": {"type": "array", "items": _MATRIX},
        "relative": {"type": "array", "items": _NAMES},
        "top": {"type": "integer", "minimum": 0},
        "bound": {"type": "integer", "minimum": 1},
        "values": {"type": "array", "items": {
            "type": "object", "properties": {"chain": _CHAIN, "group": _ABELIAN},
            "required": ["chain", "group"]}},
        "faces": {"type": "array", "items": {
            "type": "object", "properties": {"chain": _CHAIN, "index": {"type": "integer", "minimum": 0},
                                             "matrix": _MATRIX},
            "required": ["chain", "index", "matrix"]}},
        "actions": {"type": "array", "items": {
            "type": "object", "properties": {"element": {"type": "integer", "minimum": 0}, "chain": _CHAIN,
                                             "matrix": _MATRIX},
            "required": ["element", "chain", "matrix"]}},
    },
    "required": ["category", "kind"],
    "allOf": [
        {"if": {"properties": {"kind": {"const": "explicit"}}},
         "then": {"required": ["values", "faces"]}},
    ],
}

OBSTRUCTION = {
    "type": "object",
    "properties": {
        "schema": {"const": "obstruction.v1"},
        "delta": _MATRIX,
        "cochain": _INTS,
        "relations": _MATRIX,
        "coefficients": COEFF,
        "degree": {"type": "integer", "minimum": 0},
        "values": {"type": "array", "items": {
            "type": "object", "properties": {"chain": _CHAIN, "value": _INTS},
            "required": ["chain", "value"]}},
    },
    "oneOf": [{"required": ["delta", "cochain"]}, {"required": ["coefficients", "degree", "values"]}],
}

_LABEL = {}  # free words are arrays of strings; matrix labels are arrays of integer rows

DIAGRAM = {
    "type": "object",
    "properties": {
        "schema": {"const": "diagram.v1"},
        "category": FINCAT,
        "algebra": {"type": "object", "properties": {"kind": {"enum": ["free", "matrix"]},
                                                     "size": {"type": "integer", "minimum": 1}},
                    "required": ["kind"]},
        "level": {"type": "integer", "minimum": 0},
        "edges": {"type": "object", "additionalProperties": _LABEL},
        "cells": {"type": "array", "items": {
            "type": "object",
            "properties": {"morphisms": _NAMES, "word": {"type": "array", "items": {"enum": [0, 1, "*"]}},
                           "label": _LABEL},
            "required": ["morphisms", "word", "label"]}},
    },
    "required": ["category", "algebra", "level"],
}

COMPLEX = {
    "type": "object",
    "properties": {
        "vertices": {"type": "integer", "minimum": 1},
        "simplices": {"type": "array", "items": {"type": "array", "minItems": 1, "items": {"type": "integer"}}},
        "action": {"type": "array", "items": _PERM},
        "subdivide": {"type": "boolean"},
    },
    "required": ["vertices", "simplices", "action"],
}

FAMILY = {
    "type": "object",
    "properties": {
        "schema": {"const": "family.v1"},
        "group": GROUP,
        "subgroups": {"type": "array", "items": _PERM},
        "all": {"const": True},
        "complex": COMPLEX,
        "labels": {"type": "array", "items": {"type": "string"}},
    },
    "required": ["group"],
    "oneOf": [{"required": ["subgroups"]}, {"required": ["all"]}],
}

_MONOMIAL = {
    "type": "object",
    "properties": {"element": {"type": "integer", "minimum": 0}, "perm": _PERM, "exps": _INTS},
    "required": ["element", "perm", "exps"], "additionalProperties": False,
}

REPS = {
    "type": "object",
    "properties": {
        "schema": {"const": "reps.v1"},
        "family": FAMILY,
        "dim": {"type": "integer", "minimum": 1},
        "modulus": {"type": "integer"},
        "reps": {"type": "array", "items": {
            "type": "object", "properties": {"subgroup": _PERM, "images": {"type": "array", "items": _MONOMIAL}},
            "required": ["subgroup", "images"]}},
    },
    "required": ["family", "dim", "modulus", "reps"],
}

PLAN = {
    "type": "object",
    "properties": {
        "schema": {"const": "plan.v1"},
        "bounds": {"type": "array", "minItems": 1, "items": {
            "type": "object",
            "properties": {"key": {"type": "string"},
                           "steps": {"type": "array", "minItems": 1, "items": {
                               "type": "array", "items": {"type": "integer"}, "minItems": 2, "maxItems": 2}}},
            "required": ["key", "steps"]}},
        "n": {"type": "integer", "minimum": 1},
    },
    "required": ["bounds"],
}

SHAPE = {
    "type": "object",
    "properties": {
        "schema": {"const": "shape.v1"},
        "kind": {"enum": ["simplicial", "cubical"]},
        "simplex": {"type": "integer", "minimum": 0},
        "cube": {"type": "integer", "minimum": 0},
        "bound": {"type": "integer", "minimum": 0},
        "levels": {"type": "array", "items": _NAMES},
        "maps": {"type": "array", "items": {
            "type": "array", "minItems": 4, "maxItems": 4,
            "prefixItems": [{"enum": ["d", "s", "d0", "d1", "c"]}, {"type": "integer", "minimum": 0}, _NAME, _NAME]}},
        "group": GROUP,
        "action": {"type": "array", "items": {"type": "array", "items": _NAMES}},
    },
    "required": ["kind"],
    "oneOf": [{"required": ["levels", "maps"]}, {"required": ["simplex"]}, {"required": ["cube"]}],
}

SCHEMAS = {
    "group.v1": GROUP, "fincat.v1": FINCAT, "coeff.v1": COEFF, "obstruction.v1": OBSTRUCTION,
    "diagram.v1": DIAGRAM, "family.v1": FAMILY, "reps.v1": REPS, "plan.v1": PLAN, "shape.v1": SHAPE,
}


def validate(doc, name: str):
    """Check ``doc`` against schema ``name``; raise ``SchemaError`` with a JSON path."""
    if not isinstance(doc, dict):
        raise SchemaError(f"{name}: top level must be an object", "$")
    declared = doc.get("schema")
    if declared is not None and declared != name:
        raise SchemaError(f"expected a {name} document, found {declared}", "$.schema")
    validator = jsonschema.Draft202012Validator(SCHEMAS[name])
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)
        raise SchemaError(f"{name}: {err.message}", where)
    return doc


def load(path: str, name: str):
    """Read and validate a JSON file; returns ``(document, raw bytes)``."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}", path) from None
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from None
    return validate(doc, name), raw


# ---------------------------------------------------------------------------
# groups


def parse_group(doc) -> FiniteGroup:
    if "multiplication" in doc:
        return FiniteGroup(doc["multiplication"])
    if "generators" in doc:
        return group_from_permutations([tuple(g) for g in doc["generators"]])
    kind, _, arg = doc["named"].partition(":")
    builders = {"cyclic": cyclic_group, "symmetric": symmetric_group, "dihedral": dihedral_group}
    if kind == "trivial":
        return trivial_group()
    n = int(arg)
    if n < 1:
        raise ArgumentError(f"{doc['named']}: order parameter must be positive")
    return builders[kind](n)


def dump_group(group: FiniteGroup) -> dict:
    return {"schema": "group.v1", "multiplication": [list(r) for r in group.mult]}


# ---------------------------------------------------------------------------
# categories


class NamedCategory:
    """A ``GCat`` together with the names used in the source document."""

    def __init__(self, gamma: GCat, object_names, morphism_names):
        self.gamma = gamma
        self.object_names = list(object_names)
        self.morphism_names = list(morphism_names)
        self._obj = {n: i for i, n in enumerate(self.object_names)}
        self._mor = {n: i for i, n in enumerate(self.morphism_names)}

    @property
    def base(self) -> FinCat:
        return self.gamma.base

    def obj(self, name) -> int:
        if isinstance(name, int) and not isinstance(name, bool):
            if 0 <= name < len(self.object_names):
                return name
        if name not in self._obj:
            raise SchemaError(f"unknown object {name!r}")
        return self._obj[name]

    def mor(self, name) -> int:
        if name not in self._mor:
            raise SchemaError(f"unknown morphism {name!r}")
        return self._mor[name]

    def chain(self, doc) -> Chain:
        if isinstance(doc, dict):
            return Chain((self.obj(doc["object"]),), ())
        mors = tuple(self.mor(m) for m in doc)
        c = self.base
        for f, g in zip(mors, mors[1:]):
            if c.cod(f) != c.dom(g):
                raise SchemaError(f"chain {doc} is not composable")
        return Chain((c.dom(mors[0]),) + tuple(c.cod(f) for f in mors), mors)

    def chain_doc(self, sigma: Chain):
        if not sigma.morphisms:
            return {"object": self.object_names[sigma.objects[0]]}
        return [self.morphism_names[f] for f in sigma.morphisms]


def parse_fincat(doc) -> NamedCategory:
    group = parse_group(doc["group"]) if "group" in doc else trivial_group()
    if "poset" in doc:
        base = poset_category(doc["poset"])
        onames = [str(i) for i in range(base.n_objects)]
        mnames = [f"{a}<={b}" for a, b in base.morphisms]
    else:
        onames = list(doc["objects"])
        if len(set(onames)) != len(onames):
            raise SchemaError("object names repeat", "$.objects")
        oid = {n: i for i, n in enumerate(onames)}
        mnames, ends, identity = [], [], [None] * len(onames)
        for k, m in enumerate(doc.get("morphisms", [])):
            if m["dom"] not in oid or m["cod"] not in oid:
                raise SchemaError(f"morphism {m['id']} has an unknown endpoint", f"$.morphisms[{k}]")
            if m["id"] in mnames:
                raise SchemaError(f"morphism id {m['id']} repeats", f"$.morphisms[{k}]")
            mnames.append(m["id"])
            ends.append((oid[m["dom"]], oid[m["cod"]]))
            if m.get("identity"):
                if m["dom"] != m["cod"] or identity[oid[m["dom"]]] is not None:
                    raise SchemaError(f"morphism {m['id']} cannot be an identity", f"$.morphisms[{k}]")
                identity[oid[m["dom"]]] = len(ends) - 1
        for x, name in enumerate(onames):
            if identity[x] is None:
                identity[x] = len(ends)
                mnames.append(f"id_{name}")
                ends.append((x, x))
        mid = {n: i for i, n in enumerate(mnames)}
        table = {}
        for f, (d, c) in enumerate(ends):
            table[(identity[c], f)] = f
            table[(f, identity[d])] = f
        for k, (g, f, h) in enumerate(doc.get("composition", [])):
            if g not in mid or f not in mid or h not in mid:
                raise SchemaError("composition names an unknown morphism", f"$.composition[{k}]")
            key = (mid[g], mid[f])
            if key in table and table[key] != mid[h]:
                raise StructuralError(f"composition {g} o {f} is given twice with different values")
            table[key] = mid[h]
        base = FinCat(onames, ends, identity, table, mnames)
    if "action" in doc:
        if len(doc["action"]) != group.order:
            raise SchemaError("action needs one entry per group element", "$.action")
        oid = {n: i for i, n in enumerate(onames)}
        mid = {n: i for i, n in enumerate(mnames)}
        obj_action, mor_action = [], []
        for k, a in enumerate(doc["action"]):
            try:
                obj_action.append([oid[n] for n in a["objects"]])
                mor_action.append([mid[n] for n in a["morphisms"]])
            except KeyError as exc:
                raise SchemaError(f"action names unknown cell {exc.args[0]!r}", f"$.action[{k}]") from None
            if len(obj_action[-1]) != base.n_objects or len(mor_action[-1]) != base.n_morphisms:
                raise SchemaError("action must list an image for every object and morphism", f"$.action[{k}]")
        gamma = GCat(group, base, obj_action, mor_action)
    else:
        gamma = GCat(group, base)
    return NamedCategory(gamma, onames, mnames)


def dump_fincat(gamma: GCat, object_names=None, morphism_names=None) -> dict:
    c = gamma.base
    onames = object_names or [_label(o, i) for i, o in enumerate(c.objects)]
    onames = _unique(onames)
    mnames = _unique(morphism_names or [f"m{i}" for i in range(c.n_morphisms)])
    ident = set(c.identity)
    out = {
        "schema": "fincat.v1",
        "objects": onames,
        "morphisms": [{"id": mnames[m], "dom": onames[d], "cod": onames[cc], **({"identity": True} if m in ident else {})}
                      for m, (d, cc) in enumerate(c.morphisms)],
        "composition": [[mnames[g], mnames[f], mnames[h]] for (g, f), h in sorted(c.composition_table().items())
                        if g not in ident and f not in ident],
    }
    if gamma.group.order > 1:
        out["group"] = dump_group(gamma.group)
        out["action"] = [{"objects": [onames[x] for x in oa], "morphisms": [mnames[m] for m in ma]}
                         for oa, ma in zip(gamma.obj_action, gamma.mor_action)]
    return out


def _label(obj, i):
    if isinstance(obj, str):
        return obj
    return str(obj) if obj is not None else str(i)


def _unique(names):
    seen = {}
    out = []
    for n in names:
        n = str(n)
        if n in seen:
            seen[n] += 1
            n = f"{n}#{seen[n]}"
        else:
            seen[n] = 0
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# shapes


def parse_shape(doc, bound=None):
    """A ``SimplicialSet``, ``GSimplicialSet`` or ``CubicalSet``."""
    kind = doc["kind"]
    if "simplex" in doc:
        if kind != "simplicial":
            raise SchemaError("'simplex' needs kind simplicial", "$.kind")
        return standard_simplex(doc["simplex"], doc.get("bound", bound if bound is not None else doc["simplex"]))
    if "cube" in doc:
        if kind != "cubical":
            raise SchemaError("'cube' needs kind cubical", "$.kind")
        return representable_cube(doc["cube"], doc.get("bound", bound if bound is not None else doc["cube"]))
    levels = doc["levels"]
    index = []
    for n, lv in enumerate(levels):
        if len(set(lv)) != len(lv):
            raise SchemaError(f"cell ids repeat at level {n}", f"$.levels[{n}]")
        index.append({c: i for i, c in enumerate(lv)})
    top = len(levels) - 1

    def look(n, cell, k):
        if not 0 <= n <= top or cell not in index[n]:
            raise SchemaError(f"unknown cell {cell!r} at level {n}", f"$.maps[{k}]")
        return index[n][cell]

    if kind == "simplicial":
        faces = [[]] + [[[None] * len(levels[n]) for _ in range(n + 1)] for n in range(1, top + 1)]
        degens = [[[None] * len(levels[n]) for _ in range(n + 1)] for n in range(top)]
        for k, (op, i, src, dst) in enumerate(doc["maps"]):
            n = _level_of(index, src, k)
            if op == "d" and 1 <= n and i <= n:
                faces[n][i][index[n][src]] = look(n - 1, dst, k)
            elif op == "s" and n < top and i <= n:
                degens[n][i][index[n][src]] = look(n + 1, dst, k)
            else:
                raise SchemaError(f"map {op}_{i} does not apply at level {n}", f"$.maps[{k}]")
        _complete(faces + degens, "simplicial structure map")
        sset = SimplicialSet(levels, faces, degens)
        if "group" in doc:
            group = parse_group(doc["group"])
            if len(doc.get("action", [])) != group.order:
                raise SchemaError("action needs one entry per group element", "$.action")
            action = []
            for k, per in enumerate(doc["action"]):
                if len(per) != top + 1:
                    raise SchemaError("action needs one permutation per level", f"$.action[{k}]")
                action.append([[look(n, c, k) for c in per[n]] for n in range(top + 1)])
            return GSimplicialSet(group, sset, action)
        return sset
    tables = {}
    for m in range(top + 1):
        for g in generators_from(m, top):
            if 0 <= g.target <= top:
                tables[g] = [None] * len(levels[g.target])
    for k, (op, i, src, dst) in enumerate(doc["maps"]):
        n = _level_of(index, src, k)
        if op in ("d0", "d1"):
            g = Generator("d", i, int(op[1]), n - 1)
        elif op in ("s", "c"):
            g = Generator(op, i, 0, n + 1)
        else:
            raise SchemaError(f"map {op} is not a cubical operator", f"$.maps[{k}]")
        if g not in tables:
            raise SchemaError(f"map {op}_{i} does not apply at level {n}", f"$.maps[{k}]")
        tables[g][index[n][src]] = look(g.m, dst, k)
    _complete(tables.values(), "cubical structure map")
    return CubicalSet(levels, tables)


def _level_of(index, cell, k):
    for n, idx in enumerate(index):
        if cell in idx:
            return n
    raise SchemaError(f"unknown cell {cell!r}", f"$.maps[{k}]")


def _complete(tables, what):
    for t in tables:
        for row in (t if t and isinstance(t[0], list) else [t]):
            if any(v is None for v in row):
                raise SchemaError(f"a {what} is missing entries")


def _cell_names(levels):
    """Per-level names; level-qualified so ids never collide across levels.

    Cells that are already distinct strings (a reloaded document) keep their ids.
    """
    flat = [c for lv in levels for c in lv]
    if all(isinstance(c, str) for c in flat) and len(set(flat)) == len(flat):
        return [list(lv) for lv in levels]
    out = []
    for n, lv in enumerate(levels):
        names = [f"{n}:{_cell_text(c)}" for c in lv]
        if len(set(names)) != len(names):
            names = [f"{n}:{i}" for i in range(len(lv))]
        out.append(names)
    return out


def _cell_text(c):
    if isinstance(c, tuple):
        return "(" + ",".join(_cell_text(x) for x in c) + ")"
    if hasattr(c, "table") and hasattr(c, "chain"):
        return f"{c.source}>{c.target}{_cell_text(tuple(c.chain))}{_cell_text(tuple(c.phi.table))}"
    return str(c)


def dump_shape(x) -> dict:
    if isinstance(x, GSimplicialSet):
        out = dump_shape(x.sset)
        names = out["levels"]
        out["group"] = dump_group(x.group)
        out["action"] = [[[names[n][c] for c in perm] for n, perm in enumerate(per)] for per in x.action]
        return out
    names = _cell_names(x.cells)
    maps = []
    if isinstance(x, SimplicialSet):
        for n in range(1, x.bound + 1):
            for i in range(n + 1):
                for c in range(x.size(n)):
                    maps.append(["d", i, names[n][c], names[n - 1][x.faces[n][i][c]]])
        for n in range(x.bound):
            for i in range(n + 1):
                for c in range(x.size(n)):
                    maps.append(["s", i, names[n][c], names[n + 1][x.degens[n][i][c]]])
        kind = "simplicial"
    else:
        for g in sorted(x.tables, key=lambda g: (g.target, g.kind, g.i, g.eps)):
            op = f"d{g.eps}" if g.kind == "d" else g.kind
            for c, y in enumerate(x.tables[g]):
                maps.append([op, g.i, names[g.target][c], names[g.m][y]])
        kind = "cubical"
    return {"schema": "shape.v1", "kind": kind, "levels": names, "maps": maps,
            "nondegenerate": list(x.nondegenerate_counts())}


# ---------------------------------------------------------------------------
# values


def fraction_text(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def jsonable(value):
    """Turn results into plain JSON values; fractions become ``"p/q"`` strings."""
    if isinstance(value, Fraction):
        return fraction_text(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (frozenset, set)):
        return sorted(jsonable(v) for v in value)
    return value
