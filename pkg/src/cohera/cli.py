"""Command-line entry point: ``cohera <group> <command> ...``.

Exit codes: 0 success, 1 usage error, 2 schema or structural error,
3 certified negative answer (the report carries a witness).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from fractions import Fraction

from . import __version__
from . import barspace, bredon, equivariant, fincat, resolutions, shapes
from .errors import ArgumentError, CoheraError, SchemaError
from .schemas import (dump_fincat, dump_shape, fraction_text, jsonable, load, parse_fincat,
                      parse_group, parse_shape)
from .util import rng

REPORT_SCHEMA = "report.v1"
EXIT_OK, EXIT_USAGE, EXIT_STRUCTURAL, EXIT_NEGATIVE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


class Outcome:
    def __init__(self, result, exit_code=EXIT_OK, witness=None, summary=None, inputs=None):
        self.result = result
        self.exit_code = exit_code
        self.witness = witness
        self.summary = summary
        self.inputs = inputs or []


def _digest(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def _input(path, schema):
    doc, raw = load(path, schema)
    return doc, {"path": path, "schema": schema, "sha256": _digest(raw)}


def _params_input(params: dict):
    raw = json.dumps(params, sort_keys=True).encode()
    return {"path": None, "schema": "parameters", "sha256": _digest(raw)}


# ---------------------------------------------------------------------------
# cat


def cmd_cat(args):
    doc, meta = _input(args.file, "fincat.v1")
    named = parse_fincat(doc)
    gamma, c = named.gamma, named.base
    if args.command == "check":
        report = fincat.validate_category(c)
        violations = [str(v) for v in report.violations]
        if report.ok and gamma.group.order > 1:
            violations += [str(v) for v in fincat.validate_gcat(gamma).violations]
        result = {"objects": c.n_objects, "morphisms": c.n_morphisms, "group_order": gamma.group.order,
                  "acyclic": c.is_acyclic() if report.ok else None, "violations": violations}
        return Outcome(result, EXIT_STRUCTURAL if violations else EXIT_OK, inputs=[meta],
                       summary="valid" if not violations else f"{len(violations)} violation(s)")
    if args.command == "grothendieck":
        total = fincat.grothendieck(gamma, op=args.op)
        names = [f"({gamma.group.labels[g]},{named.morphism_names[f]})" for g, f in total.mor_labels]
        out = dump_fincat(fincat.GCat(fincat.trivial_group(), total), named.object_names, names)
        return Outcome(out, inputs=[meta], summary=f"{total.n_objects} objects, {total.n_morphisms} morphisms")
    chains = []
    for m in range(args.dim + 1):
        level = fincat.enumerate_chains(c, m)
        chains.append({"length": m, "count": len(level),
                       "nondegenerate": sum(1 for s in level if not s.is_degenerate(c)),
                       "chains": [named.chain_doc(s) for s in level] if args.list else None})
        if not args.list:
            del chains[-1]["chains"]
    return Outcome({"levels": chains}, inputs=[meta],
                   summary=" ".join(str(lv["count"]) for lv in chains))


# ---------------------------------------------------------------------------
# shape


def cmd_shape(args):
    if args.command == "nerve":
        doc, meta = _input(args.file, "fincat.v1")
        named = parse_fincat(doc)
        k = shapes.nerve(named.base, args.dim)
        if named.gamma.group.order > 1:
            k = _nerve_action(named.gamma, k)
        return Outcome(dump_shape(k), inputs=[meta], summary=_counts(k))
    doc, meta = _input(args.file, "shape.v1")
    x = parse_shape(doc, args.dim)
    if args.command == "sd":
        if isinstance(x, shapes.CubicalSet):
            raise ArgumentError("subdivision needs a simplicial input")
        gx = x if isinstance(x, shapes.GSimplicialSet) else shapes.GSimplicialSet(fincat.trivial_group(), x)
        sd = shapes.sd_category(gx)
        out = dump_fincat(sd)
        return Outcome(out, inputs=[meta], summary=f"{sd.base.n_objects} objects, {sd.base.n_morphisms} morphisms")
    if args.command == "triangulate":
        if not isinstance(x, shapes.CubicalSet):
            raise ArgumentError("triangulation needs a cubical input")
        t = shapes.triangulate(x, args.dim)
        return Outcome(dump_shape(t), inputs=[meta], summary=_counts(t))
    if args.dim is None:
        raise ArgumentError("skeleton needs --dim")
    if isinstance(x, shapes.CubicalSet):
        k = shapes.skeleton_cubical(x, args.dim)
    else:
        base = x.sset if isinstance(x, shapes.GSimplicialSet) else x
        k = shapes.skeleton_simplicial(base, args.dim)
    return Outcome(dump_shape(k), inputs=[meta], summary=_counts(k))


def _nerve_action(gamma, k):
    action = []
    for g in gamma.group.elements:
        per = []
        for n in range(k.bound + 1):
            per.append([k.index(n, _act_nerve_cell(gamma, g, cell)) for cell in k.cells[n]])
        action.append(per)
    return shapes.GSimplicialSet(gamma.group, k, action)


def _act_nerve_cell(gamma, g, cell):
    if isinstance(cell, fincat.Chain):
        return fincat.act_chain(gamma, g, cell)
    return tuple(gamma.mor_action[g][m] for m in cell) if isinstance(cell, tuple) else cell


def _counts(k):
    return "nondegenerate " + "/".join(str(x) for x in k.nondegenerate_counts())


# ---------------------------------------------------------------------------
# w


def cmd_w(args):
    doc, meta = _input(args.file, "fincat.v1")
    named = parse_fincat(doc)
    c = named.base
    a, b = named.obj(_obj_arg(args.source)), named.obj(_obj_arg(args.target))
    if args.command == "compare":
        w = resolutions.WComplex(c)
        top = max(w.chain_dim(a, b), 0) + 1
        tw = shapes.triangulate(w.hom(a, b), top)
        free = resolutions.free_resolution(c, a, b, top)
        left = _pad(tw.nondegenerate_counts(), top + 1)
        right = _pad(free.nondegenerate_counts(), top + 1)
        result = {"from": named.object_names[a], "to": named.object_names[b],
                  "triangulated_w": left, "free_resolution": right, "equal": left == right}
        return Outcome(result, EXIT_OK if left == right else EXIT_NEGATIVE, inputs=[meta],
                       witness=None if left == right else {"triangulated_w": left, "free_resolution": right},
                       summary="/".join(map(str, left)) + (" equal" if left == right else " differ"))
    w = resolutions.WComplex(c, args.dim if args.command == "build" else None)
    if args.command == "skeleton":
        if args.dim is None:
            raise ArgumentError("skeleton needs --dim")
        w = resolutions.enriched_skeleton(w, args.dim)
    hom = w.hom(a, b)
    return Outcome(dump_shape(hom), inputs=[meta], summary=_counts(hom))


def _obj_arg(text):
    return int(text) if text.isdigit() else text


def _pad(counts, length):
    counts = list(counts)[:length]
    return counts + [0] * (length - len(counts))


# ---------------------------------------------------------------------------
# hmap, bar, census


def _parse_barycentric(text):
    try:
        return barspace.barycentric(Fraction(x.strip()) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise ArgumentError(f"cannot read {text!r} as comma-separated rationals") from None


def _point_doc(p: barspace.HPoint):
    return {"r": list(p.r), "gaps": [[fraction_text(x) for x in g] for g in p.gaps],
            "t": [fraction_text(x) for x in p.t]}


def cmd_hmap(args):
    if args.n < 0:
        raise ArgumentError("--n must be >= 0")
    if args.samples < 1:
        raise ArgumentError("--samples must be positive")
    params = {"command": f"hmap {args.command}", "n": args.n, "samples": args.samples,
              "seed": args.seed, "point": args.point}
    meta = _params_input(params)
    stream = rng(args.seed, f"hmap-{args.command}-{args.n}")
    if args.command == "eval":
        if args.point:
            try:
                raw = json.loads(args.point)
            except json.JSONDecodeError:
                raise ArgumentError("--point must be a JSON object with r, gaps and t") from None
            if not isinstance(raw, dict) or not {"r", "gaps", "t"} <= set(raw):
                raise ArgumentError("--point must be a JSON object with r, gaps and t")
            points = [barspace.make_point(raw["r"], raw["gaps"], raw["t"])]
        else:
            points = [barspace.random_hpoint(stream, args.n) for _ in range(args.samples)]
        rows = [{"point": _point_doc(p), "image": [fraction_text(x) for x in barspace.h_eval(args.n, p)]}
                for p in points]
        return Outcome({"n": args.n, "results": rows}, inputs=[meta], summary=f"{len(rows)} point(s) evaluated")
    if args.command == "invert":
        if args.point:
            pts = [_parse_barycentric(args.point)]
            if len(pts[0]) != args.n + 1:
                raise ArgumentError(f"--point needs {args.n + 1} coordinates")
        else:
            pts = [barspace.random_barycentric(stream, args.n) for _ in range(args.samples)]
        rows = [{"point": [fraction_text(x) for x in b], "preimage": _point_doc(barspace.h_invert(b))} for b in pts]
        return Outcome({"n": args.n, "results": rows}, inputs=[meta], summary=f"{len(rows)} point(s) inverted")
    exact = minimal = 0
    failures = []
    for _ in range(args.samples):
        b = barspace.random_barycentric(stream, args.n)
        p = barspace.h_invert(b)
        ok = barspace.h_eval(args.n, p) == b
        least = all(not barspace.region_membership(b, r, args.n)
                    for r in barspace.all_regions(b, args.n) if len(r) < len(p.r))
        exact += ok
        minimal += least
        if not (ok and least) and len(failures) < 5:
            failures.append([fraction_text(x) for x in b])
    result = {"n": args.n, "samples": args.samples, "seed": args.seed, "exact": exact, "minimal": minimal,
              "failures": failures}
    code = EXIT_OK if exact == minimal == args.samples else EXIT_NEGATIVE
    return Outcome(result, code, witness={"points": failures} if failures else None, inputs=[meta],
                   summary=f"{exact}/{args.samples} exact")


def cmd_bar(args):
    doc, meta = _input(args.file, "fincat.v1")
    named = parse_fincat(doc)
    gamma = named.gamma
    left = _set_functor(doc.get("left"), fincat.grothendieck(gamma, op=True))
    right = _set_functor(doc.get("right"), fincat.grothendieck(gamma, op=False))
    bar = barspace.bar_enumerate(left, gamma, right, 0, args.dim)
    levels = []
    for lv, summands in enumerate(bar.summands):
        levels.append({"level": lv, "summands": len(summands), "elements": bar.sset.size(lv),
                       "list": [{"objects": [named.object_names[o] for o in s.objects], "size": s.size}
                                for s in summands]})
    return Outcome({"levels": levels, "nondegenerate": list(bar.sset.nondegenerate_counts())}, inputs=[meta],
                   summary="summands " + "/".join(str(x) for x in bar.summand_counts()))


def _set_functor(entry, total):
    if entry is None:
        return fincat.constant_set_functor(total, 1)
    if not isinstance(entry, dict):
        raise SchemaError("functor must be an object", "$.left")
    if "constant" in entry:
        return fincat.constant_set_functor(total, int(entry["constant"]))
    if "sizes" not in entry or "maps" not in entry:
        raise SchemaError("functor needs 'constant' or both 'sizes' and 'maps'")
    return fincat.SetFunctor(total, entry["sizes"], entry["maps"])


def cmd_census(args):
    meta = _params_input({"command": "census", "k": args.k})
    census = barspace.cube_gluing_census(args.k)
    rows = [{"m": r.m, "injections": r.injections, "binomial": r.binomial,
             "gluing_degrees": sorted(set(r.degrees))} for r in census.rows]
    result = {"k": census.k, "rows": rows, "total": census.total, "expected_total": 2 ** (census.k - 1),
              "ok": census.ok}
    return Outcome(result, EXIT_OK if census.ok else EXIT_NEGATIVE, inputs=[meta],
                   summary=f"total {census.total}, " + ("ok" if census.ok else "mismatch"))


# ---------------------------------------------------------------------------
# bredon


def _abelian(doc):
    return bredon.FGAbelian(doc["rank"], tuple(tuple(r) for r in doc.get("relations", [])))


def _coefficients(doc):
    named = parse_fincat(doc["category"])
    gamma = named.gamma
    top = doc.get("top", 2)
    bound = doc.get("bound", top + 2)
    alpha = [[named.mor(m) for m in part] for part in doc.get("relative", [])]
    if doc["kind"] == "constant":
        group = _abelian(doc["group"]) if "group" in doc else bredon.integers(1)
        action = doc.get("action")
        if action is not None and len(action) != gamma.group.order:
            raise SchemaError("action needs one matrix per group element", "$.action")
        coeff = bredon.constant_system(gamma, group, bound, action)
    else:
        values = {named.chain(v["chain"]): _abelian(v["group"]) for v in doc["values"]}
        faces = {(named.chain(f["chain"]), f["index"]): f["matrix"] for f in doc["faces"]}
        actions = {(a["element"], named.chain(a["chain"])): a["matrix"] for a in doc.get("actions", [])}
        coeff = bredon.table_system(gamma, bound, values, faces, actions)
    return named, alpha, coeff, top


def cmd_bredon(args):
    if args.command == "cohomology":
        doc, meta = _input(args.file, "coeff.v1")
        named, alpha, coeff, top = _coefficients(doc)
        cx = bredon.BredonComplex(named.gamma, alpha, coeff, top)
        groups = [cx.cohomology(n) for n in range(top + 1)]
        result = {"degrees": [{"degree": h.degree, "free_rank": h.free_rank, "torsion": h.torsion,
                               "group": str(h)} for h in groups],
                  "cochain_ranks": [cx.rank(n) for n in range(top + 1)]}
        return Outcome(result, inputs=[meta], summary=", ".join(f"H^{h.degree} = {h}" for h in groups))
    if args.command == "vogt":
        doc, meta = _input(args.file, "diagram.v1")
        return _vogt(doc, meta)
    doc, meta = _input(args.file, "obstruction.v1")
    if "delta" in doc:
        delta = doc["delta"]
        vec = doc["cochain"]
        rels = [list(col) for col in zip(*doc["relations"])] if doc.get("relations") else None
        if any(len(row) != len(delta[0]) for row in delta):
            raise SchemaError("delta rows have different lengths", "$.delta")
        chains = None
    else:
        named, alpha, coeff, _ = _coefficients(doc["coefficients"])
        n = doc["degree"]
        cx = bredon.BredonComplex(named.gamma, alpha, coeff, n + 1 if args.command == "cocycle" else max(n, 1))
        values = {named.chain(v["chain"]): v["value"] for v in doc["values"]}
        o = bredon.cochain_from_values(cx, n, values)
        vec = o.coords
        if args.command == "cocycle":
            delta = cx.coboundary(n)
            rels = cx.degrees[n + 1].relation_coords
        else:
            delta = cx.coboundary(n - 1) if n > 0 else [[] for _ in vec]
            rels = cx.degrees[n].relation_coords
        chains = [named.chain_doc(s) for s in cx.degrees[n].reps]
    if args.command == "cocycle":
        if delta and len(delta[0]) != len(vec):
            raise SchemaError("cochain length does not match delta", "$.cochain")
        ok = bredon.cocycle_check(vec, delta, rels)
        image = bredon.mat_vec(delta, vec) if delta else []
        result = {"cocycle": ok, "coboundary_image": image}
        if chains is not None:
            result["representatives"] = chains
        return Outcome(result, EXIT_OK if ok else EXIT_NEGATIVE, inputs=[meta],
                       witness=None if ok else {"coboundary_image": image},
                       summary="cocycle" if ok else "not a cocycle")
    if len(delta) != len(vec):
        raise SchemaError("delta needs one row per cochain entry", "$.delta")
    res = bredon.is_coboundary(vec, delta, rels)
    result = {"coboundary": res.solvable, "primitive": res.primitive}
    if chains is not None:
        result["representatives"] = chains
    if res.solvable:
        return Outcome(result, inputs=[meta], summary=f"coboundary of {res.primitive}")
    w = res.witness
    witness = {"functional": w.functional, "modulus": w.modulus, "value": w.value, "statement": str(w)}
    return Outcome(result, EXIT_NEGATIVE, witness=witness, inputs=[meta], summary=f"no primitive: {w}")


def _label_from_doc(alg_kind, value):
    if alg_kind == "free":
        if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
            raise SchemaError("free labels are arrays of strings")
        return tuple(value)
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise SchemaError("matrix labels are arrays of integer rows")
    return tuple(tuple(int(x) for x in r) for r in value)


def _vogt(doc, meta):
    named = parse_fincat(doc["category"])
    kind = doc["algebra"]["kind"]
    alg = bredon.FreeComposition() if kind == "free" else bredon.IntegerMatrix(doc["algebra"].get("size", 1))
    cells = {}
    for cell in doc.get("cells", []):
        key = bredon.CellKey(tuple(named.mor(m) for m in cell["morphisms"]), tuple(cell["word"]))
        cells[key] = _label_from_doc(kind, cell["label"])
    if "edges" in doc:
        edges = {named.mor(m): _label_from_doc(kind, v) for m, v in doc["edges"].items()}
        tops = {k.morphisms: v for k, v in cells.items() if all(w == "*" for w in k.word) and len(k.morphisms) > 1}
        diagram = bredon.complete_diagram(named.gamma, doc["level"], edges, tops, alg)
        diagram = diagram.copy_with({**diagram.labels, **cells})
    else:
        diagram = bredon.HomotopyDiagram(named.gamma, doc["level"], cells, alg)
    report = bredon.vogt_check(diagram)
    violations = [{"morphisms": [named.morphism_names[m] for m in v.cell.morphisms], "word": list(v.cell.word),
                   "rule": v.rule, "expected": jsonable(v.expected), "found": jsonable(v.found)}
                  for v in report.violations]
    result = {"cells": len(diagram.labels), "checked": report.checked, "unchecked": report.unchecked,
              "violations": violations}
    return Outcome(result, EXIT_OK if report.ok else EXIT_NEGATIVE, inputs=[meta],
                   witness=violations[0] if violations else None,
                   summary="all equations hold" if report.ok else f"{len(violations)} violation(s)")


# ---------------------------------------------------------------------------
# ef


def _family(doc):
    group = parse_group(doc["group"])
    subs = group.subgroups() if doc.get("all") else [frozenset(s) for s in doc["subgroups"]]
    for s in subs:
        if any(x >= group.order for x in s):
            raise SchemaError(f"subgroup {sorted(s)} names an element outside the group", "$.subgroups")
    return equivariant.SubgroupFamily(group, subs)


def _subgroup_doc(h):
    return sorted(h)


def cmd_ef(args):
    if args.command == "plan":
        doc, meta = _input(args.file, "plan.v1")
        bounds = {b["key"]: [tuple(s) for s in b["steps"]] for b in doc["bounds"]}
        plan = equivariant.join_multiplicity_plan(bounds, doc.get("n"))
        return Outcome({"t": plan}, inputs=[meta], summary="t = " + ", ".join(map(str, plan)))
    if args.command == "compat":
        doc, meta = _input(args.file, "reps.v1")
        family = _family(doc["family"])
        if doc["modulus"] < 1:
            raise ArgumentError("modulus must be positive")
        reps = {}
        for entry in doc["reps"]:
            h = frozenset(entry["subgroup"])
            reps[h] = {img["element"]: equivariant.Monomial(tuple(img["perm"]), tuple(img["exps"]), doc["modulus"])
                       for img in entry["images"]}
        rf = equivariant.RepFamily(doc["dim"], doc["modulus"], reps)
        res = equivariant.compatible_check(rf, family)
        if res.compatible:
            return Outcome({"compatible": True}, inputs=[meta], summary="compatible")
        h, k, g, a = res.witness
        witness = {"H": h, "K": k, "g": g, "h": a,
                   "character_H": list(rf.character(frozenset(h), a)),
                   "character_K": list(rf.character(frozenset(k), family.group.conj(g, a)))}
        return Outcome({"compatible": False}, EXIT_NEGATIVE, witness=witness, inputs=[meta],
                       summary="incompatible")
    doc, meta = _input(args.file, "family.v1")
    family = _family(doc)
    group = family.group
    if args.command == "build":
        ef = equivariant.build_EF(group, family)
        base = ef.gcat.base
        result = {"objects": [{"subgroup": _subgroup_doc(h), "coset": sorted(c)} for h, c in ef.objects],
                  "morphisms": base.n_morphisms, "subgroup_closed": family.subgroup_closed}
        return Outcome(result, inputs=[meta], summary=f"{base.n_objects} objects, {base.n_morphisms} morphisms")
    if args.command == "cosets":
        subs = doc["subgroups"] if "subgroups" in doc else [sorted(h) for h in family.subgroups]
        pairs = []
        pick = lambda idx: [frozenset(subs[idx])] if idx is not None else [frozenset(s) for s in subs]
        for idx in (args.h, args.k):
            if idx is not None and not 0 <= idx < len(subs):
                raise ArgumentError(f"subgroup index {idx} is out of range")
        for h in pick(args.h):
            for k in pick(args.k):
                d = equivariant.double_cosets(group, h, k)
                problems = equivariant.check_decomposition(group, d)
                pairs.append({"H": sorted(h), "K": sorted(k), "normalizer": sorted(d.normalizer),
                              "representatives": d.reps, "coset_representatives": d.cosets,
                              "sizes": [len(b) for b in d.blocks], "problems": problems})
        bad = any(p["problems"] for p in pairs)
        return Outcome({"pairs": pairs}, EXIT_STRUCTURAL if bad else EXIT_OK, inputs=[meta],
                       summary=f"{len(pairs)} pair(s)" + (", partition fails" if bad else ", partitions verified"))
    if "complex" not in doc:
        raise SchemaError("fx needs a 'complex' entry", "$.complex")
    cx = doc["complex"]
    if len(cx["action"]) != group.order:
        raise SchemaError("complex action needs one vertex permutation per element", "$.complex.action")
    if any(sorted(p) != list(range(cx["vertices"])) for p in cx["action"]):
        raise SchemaError("complex action entries must permute the vertices", "$.complex.action")
    if cx.get("subdivide"):
        x = equivariant.face_poset_complex(group, cx["action"], cx["simplices"])
    else:
        x = equivariant.ordered_complex(group, cx["action"], cx["simplices"])
    fx = equivariant.f_X(x, family)
    objs = shapes.sd_objects(x)
    result = {"sd_objects": len(objs), "orbits": len(fx.representatives),
              "representatives": [list(x.sset.cells[objs[r][0]][objs[r][1]]) for r in fx.representatives],
              "images": [{"cell": list(x.sset.cells[n][c]), "subgroup": _subgroup_doc(h), "coset": sorted(cs)}
                         for (n, c), (h, cs) in zip(objs, fx.images)],
              "functor_ok": fx.ok, "problems": fx.report}
    return Outcome(result, EXIT_OK if fx.ok else EXIT_STRUCTURAL, inputs=[meta],
                   summary=f"{len(fx.representatives)} orbit(s), " + ("functorial" if fx.ok else "not functorial"))


# ---------------------------------------------------------------------------
# parser and report emission


def build_parser() -> argparse.ArgumentParser:
    p = Parser(prog="cohera", description="Exact combinatorics of homotopy-coherent equivariant diagrams.")
    p.add_argument("--version", action="version", version=f"cohera {__version__}")
    p.add_argument("--format", choices=["json", "table"], default="table")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings to stderr")
    groups = p.add_subparsers(dest="group", required=True, parser_class=Parser)

    def fmt(sp):
        sp.add_argument("--format", choices=["json", "table"], default=argparse.SUPPRESS)

    cat = groups.add_parser("cat", help="finite categories")
    cat.add_argument("command", choices=["check", "grothendieck", "chains"])
    cat.add_argument("file")
    cat.add_argument("--dim", type=int, default=2)
    cat.add_argument("--op", action="store_true", help="opposite Grothendieck construction")
    cat.add_argument("--list", action="store_true", help="list the chains themselves")
    fmt(cat)

    shp = groups.add_parser("shape", help="simplicial and cubical sets")
    shp.add_argument("command", choices=["nerve", "sd", "triangulate", "skeleton"])
    shp.add_argument("file")
    shp.add_argument("--dim", type=int, default=None)
    fmt(shp)

    w = groups.add_parser("w", help="W-construction hom complexes")
    w.add_argument("command", choices=["build", "skeleton", "compare"])
    w.add_argument("file")
    w.add_argument("--from", dest="source", required=True)
    w.add_argument("--to", dest="target", required=True)
    w.add_argument("--dim", type=int, default=None)
    fmt(w)

    hm = groups.add_parser("hmap", help="coordinates on the classifying simplex")
    hm.add_argument("command", choices=["eval", "invert", "roundtrip"])
    hm.add_argument("--n", type=int, required=True)
    hm.add_argument("--samples", type=int, default=100)
    hm.add_argument("--seed", type=int, default=0)
    hm.add_argument("--point", default=None)
    fmt(hm)

    bar = groups.add_parser("bar", help="two-sided bar construction")
    bar.add_argument("command", choices=["enum"])
    bar.add_argument("file")
    bar.add_argument("--dim", type=int, default=2)
    fmt(bar)

    cen = groups.add_parser("census", help="cube gluing census")
    cen.add_argument("--k", type=int, required=True)
    fmt(cen)

    br = groups.add_parser("bredon", help="Bredon cohomology and obstructions")
    br.add_argument("command", choices=["cohomology", "cocycle", "solve", "vogt"])
    br.add_argument("file")
    fmt(br)

    ef = groups.add_parser("ef", help="families of subgroups and E_F")
    ef.add_argument("command", choices=["build", "fx", "cosets", "compat", "plan"])
    ef.add_argument("file")
    ef.add_argument("--h", type=int, default=None, help="index of H in the file's subgroup list")
    ef.add_argument("--k", type=int, default=None, help="index of K in the file's subgroup list")
    fmt(ef)
    return p


HANDLERS = {"cat": cmd_cat, "shape": cmd_shape, "w": cmd_w, "hmap": cmd_hmap, "bar": cmd_bar,
            "census": cmd_census, "bredon": cmd_bredon, "ef": cmd_ef}


def _report(args, outcome: Outcome) -> dict:
    command = args.group + (f" {args.command}" if getattr(args, "command", None) else "")
    status = {EXIT_OK: "ok", EXIT_NEGATIVE: "negative", EXIT_STRUCTURAL: "structural"}[outcome.exit_code]
    report = {"schema": REPORT_SCHEMA, "version": __version__, "command": command, "status": status,
              "inputs": outcome.inputs, "result": jsonable(outcome.result)}
    if outcome.summary:
        report["summary"] = outcome.summary
    if outcome.witness is not None:
        report["witness"] = jsonable(outcome.witness)
    return report


def _table(report: dict) -> str:
    lines = []
    if "summary" in report:
        lines.append(report["summary"])
    lines.append(f"command: {report['command']}")
    lines.append(f"status: {report['status']}")
    for item in report["inputs"]:
        lines.append(f"input: {item['path'] or '-'} ({item['schema']}) sha256={item['sha256']}")
    result = report["result"]
    if isinstance(result, dict):
        for key, value in result.items():
            lines.append(f"{key}: {_compact(value)}")
    if "witness" in report:
        lines.append(f"witness: {_compact(report['witness'])}")
    return "\n".join(lines)


def _compact(value, limit=400):
    text = value if isinstance(value, str) else json.dumps(value, sort_keys=True, ensure_ascii=False)
    return text if len(text) <= limit else text[:limit] + " ..."


def _error_report(kind, message, location=None):
    out = {"schema": REPORT_SCHEMA, "version": __version__, "status": kind, "error": message}
    if location is not None:
        out["location"] = location
    return out


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:   # --help / --version
        return int(exc.code or 0)
    handler = logging.StreamHandler(stderr)
    handler.setLevel(logging.WARNING if args.verbose else logging.ERROR)
    logging.getLogger("cohera").addHandler(handler)
    try:
        try:
            outcome = HANDLERS[args.group](args)
        except ArgumentError as exc:
            print(f"cohera: {exc}", file=stderr)
            return EXIT_USAGE
        except SchemaError as exc:
            err = _error_report("schema", str(exc), exc.location)
            print(json.dumps(err, sort_keys=True, ensure_ascii=False), file=stderr)
            return EXIT_STRUCTURAL
        except CoheraError as exc:
            err = _error_report(type(exc).__name__, str(exc))
            print(json.dumps(err, sort_keys=True, ensure_ascii=False), file=stderr)
            return EXIT_STRUCTURAL
    finally:
        logging.getLogger("cohera").removeHandler(handler)
    report = _report(args, outcome)
    if args.format == "json":
        print(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False), file=stdout)
    else:
        print(_table(report), file=stdout)
    return outcome.exit_code


def main(argv=None):
    sys.exit(run(argv))

