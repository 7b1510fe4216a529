"""Command-line interface: ``supercoh VERB [options]``."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from . import ahss, classify, emspaces, fixtures, serialize
from .cache import DiskCache
from .groups import FiniteAbelianGroup, GroupError
from .grpcoh import exp_map, integral_cohomology, kx_cohomology, mod2_ring
from .specseq import format_group
from .steenrod import sq, sq_kernel

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_MISMATCH = 0, 2, 3, 4

CAPS = {"ring_degree": 12, "cohomology_degree": 8, "sh_degree": ahss.MAX_DEGREE, "group_order": 64}


class CapExceeded(Exception):
    pass


class Mismatch(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    cache_dir: str | None = None
    fixture_policy: str = "forbid"
    output: str = "table"

    def __post_init__(self) -> None:
        if self.fixture_policy not in ahss.POLICIES:
            raise ValueError(f"fixture policy must be one of {ahss.POLICIES}")
        if self.output not in ("json", "table", "dot"):
            raise ValueError("output format must be json, table or dot")

    def cache(self) -> DiskCache | None:
        return DiskCache(self.cache_dir) if self.cache_dir else None


def _group(text: str, names: str | None = None) -> FiniteAbelianGroup:
    g = FiniteAbelianGroup.parse(text, names)
    if g.order > CAPS["group_order"]:
        raise CapExceeded(f"|G| = {g.order} exceeds the cap {CAPS['group_order']}")
    return g


def _cap(value: int, key: str) -> int:
    if value > CAPS[key]:
        raise CapExceeded(f"{key} {value} exceeds the cap {CAPS[key]}")
    if value < 0:
        raise ValueError("degrees are non-negative")
    return value


def _twist(group: FiniteAbelianGroup, text: str | None):
    if text is None or text.strip() in ("", "0"):
        return None
    return mod2_ring(group).parse(text, degree=2)


def _homs(group: FiniteAbelianGroup, mode: str):
    if mode == "none":
        return ()
    if mode == "reductions":
        return tuple(ahss.mod2_reductions(group))
    if mode == "projections":
        return tuple(ahss.coordinate_projections(group))
    return classify.default_homs(group)


# --- verbs ------------------------------------------------------------------------------------


def cmd_ring(args, cfg: RunConfig):
    g = _group(args.group, args.names)
    top = _cap(args.max_degree, "ring_degree")
    ring = mod2_ring(g)
    data = {
        "group": str(g),
        "generators": [{"name": x.name, "degree": x.degree, "kind": x.kind} for x in ring.generators],
        "dims": ring.dims(top),
        "bases": {str(d): [ring.monomial_name(k) for k in ring.basis(d)] for d in range(top + 1)},
    }
    lines = [f"H^*(B{g}; Z/2), generators: "
             + (", ".join(f"{x.name} (deg {x.degree}, {x.kind})" for x in ring.generators) or "none")]
    for d in range(top + 1):
        lines.append(f"  H^{d}: dim {ring.dim(d)}  " + " ".join(data["bases"][str(d)]))
    return "ring", data, "\n".join(lines) + "\n"


def _presentation_verb(kind: str, fn: Callable):
    def run(args, cfg: RunConfig):
        g = _group(args.group, args.names)
        d = _cap(args.degree, "cohomology_degree")
        pres = fn(g, d)
        divisible = kind == "kx" and d == 0
        text = format_group(pres.orders, divisible)
        data = {"group": str(g), "degree": d, "orders": list(pres.orders), "group_string": text}
        coeff = "k^x" if kind == "kx" else "Z"
        return kind, data, f"H^{d}(B{g}; {coeff}) = {text}\n"

    return run


def cmd_sq(args, cfg: RunConfig):
    g = _group(args.group, args.names)
    ring = mod2_ring(g)
    cls = ring.parse(args.cls, degree=args.degree)
    _cap(cls.degree + args.i, "cohomology_degree")
    out = sq(g, args.i, cls)
    data = {"group": str(g), "i": args.i, "class": str(cls), "value": str(out)}
    if args.kernel:
        data["kernel"] = [str(c) for c in sq_kernel(g, args.i, cls.degree)]
    text = f"Sq^{args.i}({cls}) = {out}\n"
    if args.kernel:
        text += f"ker Sq^{args.i} on H^{cls.degree}: span{{{', '.join(data['kernel'])}}}\n"
    return "sq", data, text


def cmd_ahss_page(args, cfg: RunConfig):
    g = _group(args.group, args.names)
    n = _cap(args.degree, "sh_degree")
    w = _twist(g, args.twist)
    res = ahss.compute_sh(ahss.SuperCohQuery(g, w, n, _homs(g, args.naturality), cfg.fixture_policy))
    page = res.pages[args.page - 2]
    return "ahss-page", page.to_dict(), f"E_{page.r} page for B{g}\n" + page.to_text() + "\n"


def _sh_data(res: ahss.SuperCohResult) -> dict:
    return res.to_dict()


def cmd_sh(args, cfg: RunConfig):
    g = _group(args.group, args.names)
    n = _cap(args.degree, "sh_degree")
    w = _twist(g, args.twist)
    homs = _homs(g, args.naturality)
    key = {"verb": "sh", "group": list(g.factors), "names": list(g.names), "twist": str(w or 0),
           "degree": n, "naturality": args.naturality, "policy": cfg.fixture_policy,
           "fixtures": sorted(fixtures.database())}
    cache = cfg.cache()

    def compute():
        return _sh_data(ahss.compute_sh(ahss.SuperCohQuery(g, w, n, homs, cfg.fixture_policy)))

    data = cache.get_or_compute(key, compute) if cache else compute()
    return "sh", data, _sh_text(data)


def _sh_text(d: dict) -> str:
    tw = "" if d["twist"] == "0" else f"+({d['twist']})"
    lo, hi = d["order_bounds"]
    head = f"SH^{d['degree']}{tw}(B{'+'.join('Z/' + str(f) for f in d['group'])})"
    lines = [f"{head}: status {d['status']}, "
             + (f"order {d['order']}" if d["order"] is not None else f"order in [{lo}, {hi}]")]
    for l in d["filtration"]["layers"]:
        lines.append(f"  layer ({l['i']},{l['j']}): {format_group(l['orders']) if l['exact'] else '?'}"
                     f"  bounds {l['order_bounds']}  {' '.join(l['labels'])}".rstrip())
    if d["alpha_layer"]:
        lines.append("  alpha layer: " + ", ".join(d["alpha_layer"]))
    for k, v in d["d3"].items():
        lines.append(f"  d3 from ({k}): {v.get('status')}")
    for note in d["notes"]:
        lines.append(f"  note: {note}")
    for fx in d["fixtures"]:
        lines.append(f"  fixture {fx['key']}: {fx['citation']}")
    return "\n".join(lines) + "\n"


def cmd_classify(args, cfg: RunConfig):
    g = _group(args.group, args.names)
    policy = cfg.fixture_policy if args.policy is None else args.policy
    homs = _homs(g, args.naturality)
    if args.all_twists:
        by = classify.enumerate_all_twists(g, policy, homs)
    else:
        w = _twist(g, args.twist)
        by = {str(w or 0): classify.enumerate_classifications(g, w, policy, homs)}
    data = {"group": str(g), "twists": {k: [c.to_dict() for c in v] for k, v in by.items()},
            "count": sum(len(v) for v in by.values()),
            "notes": [classify.OUT_NOTE, classify.FILTRATION_CAVEAT]}
    lines = [f"classifications over {g}: {data['count']}"]
    for w, cs in by.items():
        lines.append(f"  twist {w}: {len(cs)}")
        for c in cs:
            a, b, gm = c.triple()
            lines.append(f"    ({a}, {b}, {gm})  [{c.status}]")
        for cit in sorted({x for c in cs for x in c.citations}):
            lines.append(f"    fixture: {cit}")
        gaps = sorted({n for c in cs for n in c.notes if n.startswith("gap")})
        lines.extend(f"    {n}" for n in gaps)
    return "classify", data, "\n".join(lines) + "\n"


def _parse_labels(text: str) -> dict:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        k, _, v = part.partition("=")
        k = k.strip()
        key = tuple(int(x) for x in k.split(":")) if ":" in k else int(k)
        out[key] = v.strip()
    return out


def cmd_hom_grid(args, cfg: RunConfig):
    g = _group(args.group, args.names)
    target = g
    if args.alpha:
        target = classify.invertible_group(mod2_ring(g).parse(args.alpha, degree=2))
    z = None
    if args.z is not None:
        z = tuple(int(x) for x in args.z.split(":")) if ":" in args.z else int(args.z)
    grid = classify.hom_grid(target, z, _parse_labels(args.labels))
    d = grid.to_dict()
    rows = [f"{'':>6}" + "".join(f"{o:>8}" for o in d["objects"])]
    for o, row in zip(d["objects"], d["grid"]):
        rows.append(f"{o:>6}" + "".join(f"{c:>8}" for c in row))
    rows.append(f"support: {', '.join(d['support'])}; pi0 of order {d['pi0_order']}"
                + (f" = {format_group(d['pi0_invariants'])}" if d["pi0_invariants"] is not None else ""))
    return "hom-grid", d, ("\n".join(rows) + "\n", grid.to_dot())


def cmd_brpic(args, cfg: RunConfig):
    t = classify.brpic_table(args.center)
    return "brpic", t.to_dict(), t.to_text() + f"citation: {t.citation}\n"


def cmd_lemma45(args, cfg: RunConfig):
    rels = emspaces.verified_relations() if args.strict else emspaces.RELATIONS
    page = emspaces.serre_e2_lemma45()
    info = emspaces.h5Y(rels)
    checks = emspaces.certify_relations()
    data = {"table": page.to_dict(), "generators": [str(g) for g in info.generators],
            "killed": [[str(s), str(t)] for s, t in info.killed],
            "relations": [{"relation": str(c.relation), "tag": c.relation.tag,
                           "source": c.relation.source, "pullback_check": c.status,
                           **({"witness": c.witness} if c.witness else {})} for c in checks],
            "strict": args.strict}
    lines = ["Serre E2 page, fibre K(Z/2,3), base K(Z/2+Z/2,2)", page.to_text(), ""]
    fx = sorted({e.fixture for e in page.entries.values() if e.fixture})
    lines.extend(f"fixture entry: {f}" for f in fx)
    lines.append("relations:")
    for r in data["relations"]:
        lines.append(f"  {r['relation']}  [{r['tag']}; pullback check: {r['pullback_check']}]"
                     + (f" witness {r['witness']}" if "witness" in r else ""))
    for s, t in info.killed:
        lines.append(f"transgression: {s} -> {t}")
    lines.append(f"H^5(Y; k^x) generators ({len(info.generators)}): "
                 + ", ".join(str(g) for g in info.generators))
    try:
        sig = emspaces.resolve_sigma(relations=rels)
        data["sigma"] = sig.to_dict()
        lines.append("sigma candidates: " + ", ".join(str(c) for c in sig.candidates))
        lines.append(f"orbits under t3 -> t3 + Sq1c2: {len(sig.orbits)}")
    except ArithmeticError as exc:
        data["sigma"] = {"error": str(exc)}
        lines.append(f"sigma: {exc}")
    return "lemma45", data, "\n".join(lines) + "\n"


# --- Appendix A replay --------------------------------------------------------------------------


def reproduce_appendix() -> tuple[list[tuple[str, bool, str]], dict]:
    """Replay the (Z/4)^2 computation; returns (check, ok, detail) triples."""
    g = FiniteAbelianGroup([4, 4])
    ring = mod2_ring(g)
    checks: list[tuple[str, bool, str]] = []

    dims = ring.dims(4)
    checks.append(("mod-2 dims H^0..H^4", dims == [1, 2, 3, 4, 5], str(dims)))
    rows = [list(kx_cohomology(g, d).orders) for d in range(1, 6)]
    want = [[4, 4], [4], [4, 4, 4], [4, 4], [4, 4, 4, 4]]
    checks.append(("k^x row degrees 1..5", rows == want,
                   ", ".join(format_group(r) for r in rows)))
    ker = sq_kernel(g, 2, 2)
    checks.append(("ker Sq^2 on H^2", [str(c) for c in ker] == ["x1y1"],
                   "span{" + ", ".join(map(str, ker)) + "}"))

    e2 = ahss.install_d2_untwisted(ahss.build_super_e2(g, 4), g)
    d2 = e2.differential((3, 1)).matrix
    img = {tuple(sum(r[c] * v for c, v in enumerate(col)) % 4 for r in d2)
           for col in _all_vectors(2, 4)}
    named = [exp_map(g, 5, ring.parse(s)) for s in ("x1x2^2", "y1x2^2", "x1y2^2", "y1y2^2")]
    span = {tuple(sum(c * v[k] for c, v in zip(cs, named)) % 4 for k in range(4))
            for cs in _all_vectors(2, 4)}
    torsion = {v for v in _all_vectors(4, 4) if all(2 * x % 4 == 0 for x in v)}
    checks.append(("d2 image E^{3,1} -> E^{5,0} is the 2-torsion Z/2^4",
                   img == span == torsion, f"|image| = {len(img)}"))

    query = ahss.SuperCohQuery(g, None, 4, tuple(ahss.mod2_reductions(g)), "forbid")
    res = ahss.compute_sh(query)
    sol = res.d3.get((2, 2), {})
    mat = sol.get("matrix")
    forced = mat is not None and not any(any(row) for row in mat)
    checks.append(("d3 on x1y1 forced to 0 by the two reductions", bool(forced) and res.status == "exact",
                   f"status {sol.get('status')}, SH^4 {res.status}"))
    alpha = [str(c) for c in res.alpha_layer]
    checks.append(("x1y1 spans the alpha layer", alpha == ["x1y1"], f"alpha layer {alpha}"))
    for h in ahss.mod2_reductions(g):
        single = ahss.compute_sh(ahss.SuperCohQuery(g, None, 4, (h,), "forbid"))
        checks.append((f"one reduction alone ({h.target}) leaves d3 free", single.status == "bounded",
                       f"status {single.status}"))
    return checks, res.to_dict()


def _all_vectors(mod: int, n: int):
    import itertools

    return itertools.product(range(mod), repeat=n)


def cmd_reproduce_appendix(args, cfg: RunConfig):
    checks, sh = reproduce_appendix()
    lines = [f"[{'ok' if ok else 'FAIL'}] {name}: {detail}" for name, ok, detail in checks]
    data = {"checks": [{"check": n, "ok": ok, "detail": d} for n, ok, d in checks], "sh": sh}
    if not all(ok for _, ok, _ in checks):
        raise Mismatch("\n".join(lines) + "\nreproduction mismatch\n")
    lines.append("d3(x1y1) = 0; SH4 -> H2 nonzero")
    return "reproduce-appendix", data, "\n".join(lines) + "\n"


VERBS = {
    "ring": cmd_ring,
    "integral": _presentation_verb("integral", integral_cohomology),
    "kx": _presentation_verb("kx", kx_cohomology),
    "sq": cmd_sq,
    "ahss-page": cmd_ahss_page,
    "sh": cmd_sh,
    "classify": cmd_classify,
    "hom-grid": cmd_hom_grid,
    "brpic": cmd_brpic,
    "lemma45": cmd_lemma45,
    "reproduce-appendix": cmd_reproduce_appendix,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="supercoh", description=__doc__)
    p.add_argument("--format", dest="output", choices=["json", "table", "dot"], default="table")
    p.add_argument("--cache-dir", default=os.environ.get("SUPERCOH_CACHE"))
    p.add_argument("--fixture-policy", default="forbid", choices=list(ahss.POLICIES))
    sub = p.add_subparsers(dest="verb", required=True)

    def grp(sp, required=True):
        sp.add_argument("--group", required=required, help="cyclic factor orders, e.g. 4,4")
        sp.add_argument("--names", help="generator prefixes per factor, e.g. c,d")

    s = sub.add_parser("ring")
    grp(s)
    s.add_argument("--max-degree", type=int, default=4)
    for verb in ("integral", "kx"):
        s = sub.add_parser(verb)
        grp(s)
        s.add_argument("--degree", type=int, required=True)
    s = sub.add_parser("sq")
    grp(s)
    s.add_argument("--i", type=int, required=True)
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--degree", type=int)
    s.add_argument("--kernel", action="store_true")
    for verb in ("ahss-page", "sh"):
        s = sub.add_parser(verb)
        grp(s)
        s.add_argument("--twist", default="0")
        s.add_argument("--degree", type=int, default=4)
        s.add_argument("--naturality", choices=["auto", "none", "reductions", "projections"], default="auto")
        if verb == "ahss-page":
            s.add_argument("--page", type=int, choices=[2, 3, 4], default=2)
    s = sub.add_parser("classify")
    grp(s)
    s.add_argument("--twist", default="0")
    s.add_argument("--all-twists", action="store_true")
    s.add_argument("--policy", choices=list(ahss.POLICIES), help="defaults to allow")
    s.add_argument("--naturality", choices=["auto", "none", "reductions", "projections"], default="auto")
    s = sub.add_parser("hom-grid")
    grp(s)
    s.add_argument("--alpha", help="build the grid over the extension with this class")
    s.add_argument("--z", help="central element of order 2, e.g. 2 or 0:1 for an extension")
    s.add_argument("--labels", required=True, help="element=label pairs, e.g. 0=SVect,2=Vect")
    s = sub.add_parser("brpic")
    s.add_argument("--center", required=True, choices=sorted(classify.CENTERS))
    s = sub.add_parser("lemma45")
    s.add_argument("--strict", action="store_true", help="drop relations refuted by pullback checks")
    sub.add_parser("reproduce-appendix")
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_INPUT
    if args.verb == "classify" and args.policy is None:
        args.policy = "allow"
    try:
        cfg = RunConfig(args.cache_dir, args.fixture_policy, args.output)
        kind, data, text = VERBS[args.verb](args, cfg)
    except Mismatch as exc:
        out.write(str(exc))
        return EXIT_MISMATCH
    except CapExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    except (GroupError, ValueError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    if cfg.output == "json":
        out.write(serialize.dumps(serialize.envelope(kind, data)))
    elif cfg.output == "dot":
        if not isinstance(text, tuple):
            sys.stderr.write(f"error: {args.verb} has no dot output\n")
            return EXIT_INPUT
        out.write(text[1])
    else:
        out.write(text[0] if isinstance(text, tuple) else text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
