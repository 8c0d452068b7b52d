"""Command line driver: canonical bases, Hall polynomials, verification, cache.

Exit codes: 0 on success (for ``canonical``/``verify``: certificates hold),
1 when certificates fail, 2 on errors (budget, validation, bad input), in
which case a machine-readable error object is printed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .canonical import CanonicalSolver, latex_table, verify_bundle
from .config import HallcanonError, JobConfig
from .hallalg import HallEngine
from .hallpoly import CacheStore, HallPolyEngine
from .pbw import IndexSystem
from .quiver import from_spec


def _config_from_args(args) -> JobConfig:
    cache_dir = getattr(args, "cache_dir", None) or os.environ.get("HALLCANON_CACHE")
    kwargs = dict(cache_dir=cache_dir)
    if getattr(args, "primes", None):
        kwargs["primes"] = tuple(int(p) for p in args.primes.split(","))
    if getattr(args, "budget_subspaces", None):
        kwargs["budget_subspaces"] = args.budget_subspaces
    if getattr(args, "series_order", None):
        kwargs["series_order"] = args.series_order
    if getattr(args, "threads", None):
        kwargs["threads"] = args.threads
    if getattr(args, "seed", None) is not None:
        kwargs["seed"] = args.seed
    return JobConfig(**kwargs)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_desc(engine: HallEngine, data):
    """Descriptor JSON: a list of [i, l, mult] segments for cyclic quivers,
    else {"cm": [[t, m]...], "cp": [[t, m]...], "homog": [[point, [parts]]...]}
    with point either "inf" or a list of monic-irreducible coefficients."""
    from .fqrep import make_cdesc, mseg_normalize

    if isinstance(data, list):
        return ("m", mseg_normalize([((i, l), m) for i, l, m in data]))
    cm = tuple((int(t), int(m)) for t, m in data.get("cm", []))
    cp = tuple((int(t), int(m)) for t, m in data.get("cp", []))
    homog = []
    for pt, lam in data.get("homog", []):
        point = ("i",) if pt == "inf" else ("f", tuple(int(c) for c in pt))
        homog.append((point, tuple(int(x) for x in lam)))
    return make_cdesc(cm=cm, cp=cp, homog=tuple(homog))


def cmd_canonical(args) -> int:
    cfg = _config_from_args(args)
    quiver = from_spec(args.quiver)
    nu = tuple(int(x) for x in args.dim.split(","))
    engine = HallEngine(quiver, cfg)
    solver = CanonicalSolver(IndexSystem(engine))
    bundle = solver.bundle(nu)
    if args.dump_transition:
        if args.format == "latex":
            from .laurent import LaurentPoly

            lines = [r"\begin{tabular}{lll}", r"index & monomial over N & E over monomials \\"]
            for i, idx in enumerate(bundle["indices"]):
                mon = " + ".join(
                    f"({LaurentPoly.from_json(c).text()})\\,N_{{{j}}}"
                    for j, c in bundle["monomial_over_N"][i]
                )
                eta = " + ".join(
                    f"({LaurentPoly.from_json(c).text()})\\,\\mathfrak{{m}}_{{{j}}}"
                    for j, c in bundle["E_over_monomial"][i]
                )
                lines.append(f"${idx}$ & ${mon}$ & ${eta}$ \\\\")
            lines.append(r"\end{tabular}")
            _emit(args, "\n".join(lines) + "\n")
            return 0
        payload = {
            "indices": bundle["indices"],
            "monomial_over_N": bundle["monomial_over_N"],
            "E_over_monomial": bundle["E_over_monomial"],
            "monomial_over_E": bundle["monomial_over_E"],
        }
        _emit(args, _dump(payload))
        return 0
    if args.format == "latex":
        _emit(args, latex_table(bundle) + "\n")
    else:
        _emit(args, _dump(bundle))
    return 0 if bundle["certificates"]["ok"] else 1


def cmd_hallpoly(args) -> int:
    cfg = _config_from_args(args)
    quiver = from_spec(args.quiver)
    engine = HallEngine(quiver, cfg)
    polyeng = engine.polyeng
    L = _parse_desc(engine, json.loads(args.L))
    M = _parse_desc(engine, json.loads(args.M))
    N = _parse_desc(engine, json.loads(args.N))
    poly = polyeng.hall_polynomial(L, M, N)
    out = {
        "polynomial": poly.text(),
        "coeffs": list(poly.coeffs),
        "samples": [list(s) for s in poly.samples],
        "validations": [list(s) for s in poly.validations],
        "min_q": poly.min_q,
    }
    _emit(args, _dump(out))
    return 0


def cmd_verify(args) -> int:
    with open(args.bundle) as fh:
        bundle = json.load(fh)
    report = verify_bundle(bundle)
    _emit(args, _dump(report))
    return 0 if report["ok"] else 1


def cmd_cache(args) -> int:
    cache_dir = args.cache_dir or os.environ.get("HALLCANON_CACHE")
    if not cache_dir:
        raise HallcanonError("no cache directory (use --cache-dir or HALLCANON_CACHE)")
    store = CacheStore(cache_dir)
    if args.action == "list":
        _emit(args, _dump({"entries": list(store.entries())}))
    elif args.action == "verify":
        report = store.verify()
        _emit(args, _dump({"records": [[p, ok] for p, ok in report]}))
        return 0 if all(ok for _, ok in report) else 1
    elif args.action == "gc":
        removed = store.gc()
        _emit(args, _dump({"removed": removed}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hallcanon",
        description="Exact canonical bases of Hall composition algebras",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--quiver", required=True, help="kronecker | jordan | cyclic:N | an:N[:orient]")
        p.add_argument("--primes", help="comma separated sample prime powers")
        p.add_argument("--budget-subspaces", type=int, dest="budget_subspaces")
        p.add_argument("--series-order", type=int, dest="series_order")
        p.add_argument("--cache-dir", dest="cache_dir")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output to a file instead of stdout")

    pc = sub.add_parser("canonical", help="compute and certify a canonical basis")
    common(pc)
    pc.add_argument("--dim", required=True, help="dimension vector, e.g. 1,1")
    pc.add_argument("--format", choices=("json", "latex"), default="json")
    pc.add_argument(
        "--dump-transition",
        action="store_true",
        help="emit only the monomial/PBW transition matrices",
    )
    pc.set_defaults(fn=cmd_canonical)

    ph = sub.add_parser("hallpoly", help="interpolate one Hall polynomial")
    common(ph)
    ph.add_argument("--L", required=True, help="descriptor JSON for the extension")
    ph.add_argument("--M", required=True, help="descriptor JSON for the quotient")
    ph.add_argument("--N", required=True, help="descriptor JSON for the submodule")
    ph.set_defaults(fn=cmd_hallpoly)

    pv = sub.add_parser("verify", help="re-check a certificate bundle")
    pv.add_argument("--bundle", required=True)
    pv.add_argument("--out")
    pv.set_defaults(fn=cmd_verify)

    pg = sub.add_parser("cache", help="manage the on-disk store")
    pg.add_argument("action", choices=("list", "gc", "verify"))
    pg.add_argument("--cache-dir", dest="cache_dir")
    pg.add_argument("--out")
    pg.set_defaults(fn=cmd_cache)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except HallcanonError as exc:
        sys.stdout.write(_dump({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        sys.stdout.write(_dump({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
