"""Command-line entry point: construct, verify, color, graph, bounds, check.

Artifacts go to stdout (or to files under ``--out``); logs go to stderr.
Exit codes: 0 all verdicts ok, 1 some verdict failed, 2 bad parameters,
3 size cap exceeded.  Nothing is written when a run errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .certificates import Verdict, certificate, digest, dumps
from .coloring import (
    affine_coloring,
    chi_upper_bound,
    merged_coloring,
    projective_coloring,
    ramsey_lower_bound,
)
from .errors import ParameterError, SizeCapError
from .evasive import (
    DEFAULT_POINT_CAP,
    EvasiveVector,
    _eval_parts,
    construct_class,
    construct_partition,
    largest_restricted_class,
    line_restriction_poly,
    restrict_to_subspace,
    solve_slope,
)
from .exports import (
    coloring_document,
    graph_document,
    partition_document,
    points_document,
    read_graph,
    read_points,
)
from .extremal import (
    BipartiteGraph,
    awm_check,
    is_ap_free,
    is_C4_free,
    is_theta3t_free,
    linear_representation,
    lower_bound_parameters,
    projectivize,
    turan_upper_bound,
)
from .geometry import is_maximal_evasive, is_t_line_evasive
from .gf import as_field, make_tower

log = logging.getLogger("linevasive")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    params: dict
    out: Path | None = None
    workers: int = 1
    seed: int = 0
    cap: int = DEFAULT_POINT_CAP


@dataclass
class RunResult:
    """Files to write (name -> text) and which of them goes to stdout without --out."""

    files: dict[str, str] = field(default_factory=dict)
    primary: str = ""
    ok: bool = True

    def add(self, name: str, text: str, primary: bool = False) -> None:
        self.files[name] = text
        if primary or not self.primary:
            self.primary = name


def _require(params: dict, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if params.get(n) is None]
    if missing:
        raise ParameterError(f"missing {', '.join(missing)}")


def _cert(verdict: Verdict, space: dict, fields, cfg: RunConfig, **extra) -> dict:
    return certificate(verdict, space, fields, seed=cfg.seed, **extra)


def _class_header(T, u, size: int, cfg: RunConfig, **extra) -> dict:
    F = T.base
    return {
        "construction": "norm-polynomial-class",
        "field": F.to_json(),
        "p": F.p,
        "e": F.e,
        "q": F.order,
        "t": T.t,
        "u": u,
        "dimension": T.dimension,
        "moduli": [lv.modulus for lv in T.levels],
        "size": size,
        "seed": cfg.seed,
        **extra,
    }


# ---------------------------------------------------------------------------
# pipelines


def run_construct(cfg: RunConfig) -> RunResult:
    p = cfg.params
    _require(p, "q", "t")
    T = make_tower(p["q"], p["t"])
    F, N = T.base, T.dimension
    res = RunResult()
    tag = f"q{F.order}_t{T.t}"
    if p["partition"]:
        part = construct_partition(T, cfg.cap)
        header = _class_header(T, None, F.order ** N, cfg, construction="norm-polynomial-partition")
        res.add(f"partition_{tag}.json", partition_document(header, part.classes, F))
        if p["verify"]:
            stacked = np.concatenate(list(part.classes.values()))
            distinct = len(np.unique(stacked, axis=0))
            expected = F.order ** (N - 1)
            sizes = {str(u): len(c) for u, c in part.classes.items()}
            ok = distinct == len(stacked) == F.order ** N and all(v == expected for v in sizes.values())
            certs = [_cert(Verdict("partition", ok, None, {"sizes": sizes, "distinct_points": distinct}),
                           {"n": N, "q": F.order}, T.levels, cfg)]
            for u, pts in part.classes.items():
                v = is_t_line_evasive(pts, N, F, T.t, cfg.workers, cfg.cap)
                certs.append(_cert(v, {"n": N, "q": F.order}, T.levels, cfg, u=u))
            res.ok = all(c["verdict"] == "ok" for c in certs)
            res.add(f"certificate_{tag}.json", dumps({"certificates": certs}), primary=True)
        return res
    u = p["u"] if p["u"] is not None else 0
    pts = construct_class(T, u, cfg.cap)
    header = _class_header(T, u, len(pts), cfg)
    fmt = p["format"]
    res.add(f"class_{tag}_u{u}.{fmt}", points_document(header, pts, F, fmt))
    if p["verify"]:
        v = is_t_line_evasive(pts, N, F, T.t, cfg.workers, cfg.cap)
        res.ok = v.ok
        res.add(f"certificate_{tag}_u{u}.json",
                dumps(_cert(v, {"n": N, "q": F.order}, T.levels, cfg, u=u)), primary=True)
    return res


def _roundtrip(T, u: int, trials: int, seed: int) -> Verdict:
    """Random (b, f) pairs: the slope from solve_slope must reproduce f."""
    rng = np.random.default_rng(seed)
    F = T.base
    for k in range(trials):
        b = EvasiveVector.from_flat(T, rng.integers(0, F.order, T.dimension))
        f = [F.sub(_eval_parts(T, [x.value for x in b.parts]), u)]
        f += [int(c) for c in rng.integers(0, F.order, T.t)]
        a = solve_slope(T, b, u, f)
        got = [c.value for c in line_restriction_poly(T, a, b, u)]
        if got != f:
            return Verdict("slope-roundtrip", False, {"trial": k, "b": b.flatten(), "f": f, "got": got},
                           {"trials": k + 1})
    return Verdict("slope-roundtrip", True, None, {"trials": trials})


def run_verify(cfg: RunConfig) -> RunResult:
    p = cfg.params
    tower = None
    if p["input"] is not None:
        header, F, pts = read_points(Path(p["input"]).read_text())
        t = p["t"] if p["t"] is not None else header.get("t")
        if t is None:
            raise ParameterError("missing --t and no t in the input header")
        n = pts.shape[1]
        u = header.get("u")
        if header.get("construction") == "norm-polynomial-class" and header.get("t") == t:
            tower = make_tower(F, t)
    else:
        _require(p, "q", "t")
        tower = make_tower(p["q"], p["t"])
        F, t, n = tower.base, tower.t, tower.dimension
        u = p["u"] if p["u"] is not None else 0
        pts = construct_class(tower, u, cfg.cap)
    space = {"n": n, "q": F.order}
    certs = [_cert(is_t_line_evasive(pts, n, F, t, cfg.workers, cfg.cap), space, [F], cfg, u=u)]
    if p["maximal"]:
        sub = as_field(p["sub"]) if p["sub"] is not None else F
        v = is_maximal_evasive(pts, n, F, t, sub, tower=tower, u=u, cap=cfg.cap)
        certs.append(_cert(v, space, [F, sub], cfg, u=u))
    if p["roundtrip"]:
        if tower is None:
            raise ParameterError("--roundtrip needs a norm-polynomial construction")
        certs.append(_cert(_roundtrip(tower, u, p["roundtrip"], cfg.seed), space, tower.levels, cfg, u=u))
    res = RunResult(ok=all(c["verdict"] == "ok" for c in certs))
    res.add("verify.json", dumps({"certificates": certs}))
    return res


def run_color(cfg: RunConfig) -> RunResult:
    p = cfg.params
    _require(p, "n", "q")
    n, q = p["n"], p["q"]
    if p["merged"]:
        col = merged_coloring(n, q)
    elif p["affine"]:
        col = affine_coloring(n, q)
    else:
        col = projective_coloring(n, q)
    kind = "PG" if col.projective else "AG"
    header = {
        "space": {"kind": kind, "n": n, "q": col.q},
        "q": col.q,
        "k": col.num_colors,
        "construction": col.tag,
        "field": col.field.to_json(),
        "seed": cfg.seed,
        **col.meta,
    }
    res = RunResult()
    tag = f"{kind.lower()}{n}_q{col.q}_{col.tag}"
    if p["verify"]:
        v = col.certify(cfg.workers)
        text = dumps(_cert(v, {"kind": kind, "n": n, "q": col.q}, [col.field], cfg,
                           construction=col.tag, colors=col.num_colors))
        header["certificate_digest"] = digest(text)
        res.ok = v.ok
        res.add(f"coloring_{tag}.csv", coloring_document(header, col.colors))
        res.add(f"certificate_{tag}.json", text, primary=True)
    else:
        res.add(f"coloring_{tag}.csv", coloring_document(header, col.colors))
    return res


def _linear_rep_from_params(p: dict, cfg: RunConfig):
    _require(p, "q", "n")
    t = p["t"] if p["t"] is not None else 2
    T = make_tower(p["q"], t)
    n = p["n"]
    if n > T.dimension:
        raise ParameterError(f"n = {n} exceeds the construction dimension {T.dimension}")
    if p["u"] is None:
        u, S = largest_restricted_class(T, n)
    else:
        u = p["u"]
        S = restrict_to_subspace(construct_class(T, u, cfg.cap), n)
    if len(S) == 0:
        raise ParameterError("the restricted class is empty")
    lr = linear_representation(projectivize(S, T.base), n, T.base, cfg.cap)
    return lr, T, u


def _graph_checks(G: BipartiteGraph, theta: int | None, c4: bool, space: dict, fields, cfg) -> list[dict]:
    certs = []
    if c4:
        certs.append(_cert(is_C4_free(G), space, fields, cfg))
    if theta is not None:
        certs.append(_cert(is_theta3t_free(G, theta, exact=True), space, fields, cfg))
    return certs


def run_graph(cfg: RunConfig) -> RunResult:
    p = cfg.params
    if not p["linear_rep"]:
        raise ParameterError("only --linear-rep graphs are available")
    lr, T, u = _linear_rep_from_params(p, cfg)
    G, F = lr.graph, lr.field
    header = {**lr.to_json(), "t": T.t, "u": u, "field": F.to_json(), "seed": cfg.seed,
              "set": lr.set_points.tolist()}
    res = RunResult()
    tag = f"linrep_n{lr.n}_q{F.order}"
    res.add(f"graph_{tag}.txt", graph_document(header, G.edges()))
    if p["verify"]:
        s, q, n = len(lr.set_points), F.order, lr.n
        ld, rd = G.left_degrees(), G.right_degrees()
        facts = {
            "point_vertices": G.left,
            "line_vertices": G.right,
            "point_degrees": sorted(set(ld.tolist())),
            "line_degrees": sorted(set(rd.tolist())),
        }
        ok = (G.left == q ** (n + 1) and G.right == s * q ** n
              and bool(np.all(ld == s)) and bool(np.all(rd == q)))
        space = {"n": n + 1, "q": q}
        certs = [_cert(Verdict("linear-representation-degrees", ok, None, facts), space, [F], cfg)]
        certs += _graph_checks(G, p["theta"] if p["theta"] is not None else 2, True, space, [F], cfg)
        res.ok = all(c["verdict"] == "ok" for c in certs)
        res.add(f"certificate_{tag}.json", dumps({"certificates": certs}), primary=True)
    return res


def run_check(cfg: RunConfig) -> RunResult:
    p = cfg.params
    certs = []
    if p["c4"] or p["theta"] is not None:
        if p["input"] is not None:
            header, edges = read_graph(Path(p["input"]).read_text())
            G = BipartiteGraph.from_edges(int(header["point_vertices"]), int(header["line_vertices"]), edges)
            fields = [as_field(int(header["q"]))] if "q" in header else []
            space = {"n": header.get("n"), "q": header.get("q")}
        else:
            lr, T, _ = _linear_rep_from_params(p, cfg)
            G, fields = lr.graph, [lr.field]
            space = {"n": lr.n + 1, "q": lr.q}
        certs += _graph_checks(G, p["theta"], p["c4"], space, fields, cfg)
    if p["ap_free"]:
        _require(p, "p")
        F = as_field(p["p"])
        if p["input"] is not None and not (p["c4"] or p["theta"] is not None):
            header, G_field, pts = read_points(Path(p["input"]).read_text())
            if G_field.p != F.p:
                raise ParameterError("input field characteristic differs from --p")
            if G_field.e != 1:
                from .evasive import field_reduce
                pts = field_reduce(pts, G_field, F)
            length = p["length"] if p["length"] is not None else int(header.get("t", 2)) + 1
            u = header.get("u")
        else:
            _require(p, "t")
            T = make_tower(F, p["t"])
            u = p["u"] if p["u"] is not None else 0
            pts = construct_class(T, u, cfg.cap)
            length = p["length"] if p["length"] is not None else T.t + 1
        n = pts.shape[1]
        v = is_ap_free(pts, n, F.order, length, cfg.workers)
        certs.append(_cert(v, {"n": n, "q": F.order}, [F], cfg, u=u))
    if p["awm"]:
        _require(p, "trials")
        rng = np.random.default_rng(cfg.seed)
        worst = None
        for k in range(p["trials"]):
            m, n = (int(x) for x in rng.integers(1, p["max_size"] + 1, 2))
            B = rng.integers(0, 2, (m, n)).tolist()
            v = awm_check(B)
            if not v.ok:
                worst = {"trial": k, "matrix": B}
                break
        certs.append(_cert(Verdict("awm-inequality", worst is None, worst,
                                   {"trials": p["trials"], "max_size": p["max_size"]}), {}, [], cfg))
    if not certs:
        raise ParameterError("choose at least one of --c4, --theta, --ap-free, --awm")
    res = RunResult(ok=all(c["verdict"] == "ok" for c in certs))
    res.add("check.json", dumps({"certificates": certs}))
    return res


def run_bounds(cfg: RunConfig) -> RunResult:
    p = cfg.params
    if p["chi"]:
        _require(p, "n", "q")
        doc = chi_upper_bound(p["n"], p["q"]).to_json()
    elif p["ramsey"]:
        _require(p, "k", "q")
        doc = ramsey_lower_bound(p["k"], p["q"]).to_json()
    elif p["turan"]:
        _require(p, "n", "m", "t")
        doc = {"kind": "turan_envelope", **turan_upper_bound(p["n"], p["m"], p["t"]).to_json()}
    else:
        _require(p, "t", "j")
        lb = lower_bound_parameters(p["t"], p["j"])
        doc = {
            "kind": "lower_bound_parameters",
            "t": lb.t,
            "j": lb.j,
            "a": str(lb.a),
            "exponent": str(lb.exponent),
            "line_vertices": f"q^{lb.line_vertices_exp}",
            "point_vertices": f"q^{lb.point_vertices_exp}",
        }
    doc["seed"] = cfg.seed
    res = RunResult()
    res.add("bounds.json", dumps(doc))
    return res


PIPELINES = {
    "construct": run_construct,
    "verify": run_verify,
    "color": run_color,
    "graph": run_graph,
    "bounds": run_bounds,
    "check": run_check,
}


def run(cfg: RunConfig) -> RunResult:
    if cfg.workers < 1:
        raise ParameterError("--workers must be at least 1")
    if cfg.cap < 1:
        raise ParameterError("--cap must be positive")
    return PIPELINES[cfg.subcommand](cfg)


# ---------------------------------------------------------------------------
# argument parsing


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="directory for artifacts (default: primary artifact to stdout)")
    common.add_argument("--workers", type=int, default=1, help="parallel sweep shards")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks, recorded in outputs")
    common.add_argument("--cap", type=int, default=DEFAULT_POINT_CAP, help="size cap on enumerated spaces")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="linevasive", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    c = sub.add_parser("construct", parents=[common], help="norm-polynomial class or partition")
    c.add_argument("--q", type=int)
    c.add_argument("--t", type=int)
    c.add_argument("--u", type=int)
    c.add_argument("--partition", action="store_true", help="all q classes")
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.add_argument("--verify", action="store_true")

    v = sub.add_parser("verify", parents=[common], help="evasiveness, maximality, slope round trip")
    v.add_argument("--q", type=int)
    v.add_argument("--t", type=int)
    v.add_argument("--u", type=int)
    v.add_argument("--input", help="point export to verify instead of a fresh construction")
    v.add_argument("--maximal", action="store_true")
    v.add_argument("--sub", type=int, help="subfield order for maximality (default q)")
    v.add_argument("--roundtrip", type=_positive, metavar="TRIALS")

    col = sub.add_parser("color", parents=[common], help="colorings without monochromatic lines")
    kind = col.add_mutually_exclusive_group()
    kind.add_argument("--projective", action="store_true", help="PG(n, q) (default)")
    kind.add_argument("--affine", action="store_true", help="AG(n, q)")
    col.add_argument("--n", type=int)
    col.add_argument("--q", type=int)
    col.add_argument("--merged", action="store_true", help="merge classes into ceil(q/j) colors")
    col.add_argument("--verify", action="store_true")

    g = sub.add_parser("graph", parents=[common], help="linear representation incidence graph")
    g.add_argument("--linear-rep", action="store_true", required=True)
    g.add_argument("--q", type=int)
    g.add_argument("--n", type=int, help="S lives in PG(n, q)")
    g.add_argument("--t", type=int, help="tower height of the evasive class (default 2)")
    g.add_argument("--u", type=int, help="class value (default: largest restriction)")
    g.add_argument("--theta", type=int, help="theta(3,t) to verify (default 2)")
    g.add_argument("--verify", action="store_true")

    b = sub.add_parser("bounds", parents=[common], help="bound calculators")
    which = b.add_mutually_exclusive_group(required=True)
    which.add_argument("--chi", action="store_true", help="chi(n, q) upper bound")
    which.add_argument("--ramsey", action="store_true", help="R_q(2; k) lower bound")
    which.add_argument("--turan", action="store_true", help="ex(n, m, theta(3,t)) envelope")
    which.add_argument("--lower-params", action="store_true", help="exponents for given t, j")
    b.add_argument("--n", type=float)
    b.add_argument("--m", type=float)
    b.add_argument("--q", type=int)
    b.add_argument("--k", type=int)
    b.add_argument("--t", type=int)
    b.add_argument("--j", type=int)

    ch = sub.add_parser("check", parents=[common], help="graph and set property checks")
    ch.add_argument("--c4", action="store_true")
    ch.add_argument("--theta", type=int, metavar="T")
    ch.add_argument("--ap-free", action="store_true")
    ch.add_argument("--awm", action="store_true", help="random 0/1 matrices against the AWM inequality")
    ch.add_argument("--input", help="graph edge list or point export")
    ch.add_argument("--p", type=int)
    ch.add_argument("--q", type=int)
    ch.add_argument("--n", type=int)
    ch.add_argument("--t", type=int)
    ch.add_argument("--u", type=int)
    ch.add_argument("--length", type=int, help="progression length (default t + 1)")
    ch.add_argument("--trials", type=int, default=1000)
    ch.add_argument("--max-size", type=_positive, default=12)
    return parser


_GLOBAL = {"subcommand", "out", "workers", "seed", "cap", "verbose"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {k: v for k, v in vars(args).items() if k not in _GLOBAL}
    if args.subcommand == "bounds":
        for key in ("n", "m"):
            val = params.get(key)
            if val is not None and float(val).is_integer() and not params["turan"]:
                params[key] = int(val)
    return RunConfig(args.subcommand, params, args.out, args.workers, args.seed, args.cap)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        force=True,
    )
    cfg = config_from_args(args)
    start = time.perf_counter()
    try:
        res = run(cfg)
    except SizeCapError as exc:
        log.error("size cap exceeded: %s", exc)
        return EXIT_CAP
    except (ParameterError, OSError, KeyError, ValueError) as exc:
        log.error("invalid parameters: %s", exc)
        return EXIT_USAGE
    log.info("%s finished in %.2fs verdict=%s", cfg.subcommand, time.perf_counter() - start,
             "ok" if res.ok else "fail")
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        for name, text in res.files.items():
            (cfg.out / name).write_text(text)
            log.info("wrote %s", cfg.out / name)
    else:
        sys.stdout.write(res.files[res.primary])
    return EXIT_OK if res.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
