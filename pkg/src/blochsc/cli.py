"""Command-line front end.

Exit codes: 0 on success, 1 when a verification fails, 2 on usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

from . import qresidue, replay
from .algebra import CharacterFq, CharacterQ, FieldError, field_of_order, is_prime, prime_powers_up_to
from .linalg import odd_localize
from .scissors import Flavor, PresentationError, bloch_structure, build_presentation, expected_bloch_order
from .snfcache import ENV_VAR, SnfCache, default_cache_dir

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ("text", "json", "csv")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# output helpers


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, default=str) + "\n"


def _csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(args, payload: dict, rows: Sequence[dict], columns: Sequence[str], text: str) -> None:
    if args.format == "json":
        _emit(args, _dump_json(payload))
    elif args.format == "csv":
        _emit(args, _csv(rows, columns))
    else:
        _emit(args, text if text.endswith("\n") else text + "\n")


def _cache(args) -> Optional[SnfCache]:
    # explicit --cache-dir wins; otherwise the environment variable enables caching
    d = getattr(args, "cache_dir", None) or os.environ.get(ENV_VAR)
    return SnfCache(d) if d else None


# ---------------------------------------------------------------------------
# argument parsing


def parse_chi_q(text: str) -> CharacterQ:
    """``"2,3"`` or ``"-1,5"``: primes of the support, ``-1`` for an odd sign."""
    sign, primes = 1, []
    for tok in (t.strip() for t in text.split(",") if t.strip()):
        try:
            n = int(tok)
        except ValueError:
            raise UsageError(f"--chi: {tok!r} is not an integer")
        if n == -1:
            sign = -1
        elif n > 1 and is_prime(n):
            primes.append(n)
        else:
            raise UsageError(f"--chi: {n} is neither a prime nor -1")
    return CharacterQ.of_support(primes, sign)


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blochsc", description="Scissors congruence groups: structures and replays.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, fmt=True):
        if fmt:
            p.add_argument("--format", choices=FORMATS, default="text")
        p.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("structure", help="structure of a presented group")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--field", type=_positive_int, metavar="Q", help="finite field order")
    src.add_argument("--rational", action="store_true", help="character components over Q")
    p.add_argument("--flavor", default="P", help="P, QP, RP, QRP or RP+")
    p.add_argument("--chi", help="F_q: trivial|quadratic; Q: comma-separated support, -1 for odd sign")
    p.add_argument("--odd-localize", action="store_true")
    p.add_argument("--cache-dir")
    common(p)

    p = sub.add_parser("bloch", help="Bloch groups of finite fields")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--field", type=_positive_int, metavar="Q")
    g.add_argument("--up-to", type=_positive_int, metavar="N")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--cache-dir")
    common(p)

    p = sub.add_parser("verify", help="replay lemma scenarios")
    p.add_argument("--scenario", default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=_positive_int, help="parameter draws per scenario")
    p.add_argument("--height", type=_positive_int)
    p.add_argument("--config", help="JSON scenario config")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall-clock times (not reproducible)")
    p.add_argument("--format", choices=FORMATS, default="json")
    p.add_argument("--out")

    p = sub.add_parser("main-theorem", help="per-prime table with surjectivity witnesses")
    p.add_argument("--primes-up-to", type=int, required=True, metavar="N")
    common(p)

    p = sub.add_parser("torsion3", help="3-torsion basis")
    p.add_argument("--primes-up-to", type=int, required=True, metavar="N")
    common(p)

    p = sub.add_parser("rpbq-report", help="truncated structure formulas over Q")
    p.add_argument("--primes-up-to", type=int, required=True, metavar="N")
    p.add_argument("--no-verify", action="store_true", help="skip computing QP(F_p)")
    common(p)

    p = sub.add_parser("cache", help="inspect or clear the SNF cache")
    p.add_argument("action", choices=("stats", "clear", "path"))
    p.add_argument("--cache-dir")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out")
    return ap


# ---------------------------------------------------------------------------
# commands


def cmd_structure(args) -> int:
    try:
        flavor = Flavor.parse(args.flavor)
    except (ValueError, PresentationError) as e:
        raise UsageError(str(e))
    if args.rational:
        return _structure_rational(args, flavor)
    q = args.field
    try:
        F = field_of_order(q)
    except (FieldError, ValueError) as e:
        raise UsageError(f"--field: {e}")
    chi = None
    if args.chi:
        if args.chi not in ("trivial", "quadratic"):
            raise UsageError("--chi over a finite field must be 'trivial' or 'quadratic'")
        try:
            chi = CharacterFq(F, args.chi)
        except FieldError as e:
            raise UsageError(f"--chi: {e}")
    try:
        G = build_presentation(flavor, F, chi).structure(cache=_cache(args))
    except PresentationError as e:
        raise UsageError(str(e))
    if args.odd_localize:
        G = odd_localize(G)
    payload = {"schema": "blochsc.structure/1", "field": q, "flavor": flavor.value,
               "chi": args.chi or None, "odd_localized": args.odd_localize,
               "structure": str(G), **G.to_dict()}
    _render(args, payload, [payload], ["field", "flavor", "chi", "odd_localized", "structure"], str(G))
    return EXIT_OK


def _structure_rational(args, flavor: Flavor) -> int:
    # Over Q only character components of RP+ tensored with Z[1/2] are available.
    if flavor is not Flavor.RPPLUS:
        raise UsageError("--rational requires --flavor RP+")
    if not args.chi:
        raise UsageError("--rational requires --chi (a nontrivial character)")
    chi = parse_chi_q(args.chi)
    if chi.is_trivial():
        raise UsageError("--rational: the trivial component is not computed here")
    if chi.sign_value == -1:
        G, reason = "0", "chi(-1) = -1 forces 2[x] = 0"
    elif len(chi.support) >= 2:
        G, reason = "0", "support has at least two primes (integer shifts and descent)"
    else:
        (p,) = chi.support
        G = str(odd_localize(qresidue.qp_presentation(p).structure()))
        reason = f"residue map onto QP(F_{p}) tensored with Z[1/2]"
    payload = {"schema": "blochsc.structure/1", "field": "Q", "flavor": flavor.value, "chi": str(chi),
               "odd_localized": True, "structure": G, "reason": reason}
    _render(args, payload, [payload], ["field", "flavor", "chi", "structure", "reason"], G)
    return EXIT_OK


def _bloch_row(job) -> dict:
    q, cache_dir = job
    G = bloch_structure(q, cache=SnfCache(cache_dir) if cache_dir else None)
    exp = expected_bloch_order(q)
    return {"q": q, "structure": str(G), "order": G.order, "expected": exp, "ok": G.order == exp}


def cmd_bloch(args) -> int:
    if args.field is not None:
        qs = [args.field]
        try:
            field_of_order(args.field)
        except (FieldError, ValueError) as e:
            raise UsageError(f"--field: {e}")
    else:
        qs = [q for q in prime_powers_up_to(args.up_to) if q >= 4]
    c = _cache(args)
    rows = _map(_bloch_row, [(q, str(c.directory) if c else None) for q in qs], args.jobs)
    payload = {"schema": "blochsc.bloch/1", "rows": rows}
    text = qresidue.format_table(rows, ["q", "structure", "order", "expected", "ok"])
    _render(args, payload, rows, ["q", "structure", "order", "expected", "ok"], text)
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _run_job(job):
    name, params, timing = job
    return replay.run_scenario(name, params).to_dict(timing=timing)


def _verify_jobs(args) -> List[tuple]:
    base = {"seed": args.seed}
    if args.samples:
        base["draws"] = args.samples
    if args.height:
        base["height"] = args.height
    if args.config:
        try:
            entries = replay.load_config(args.config)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"--config: {e}")
        jobs = []
        for name, params in entries:
            merged = dict(base)
            merged.update(params)
            jobs.append((name, merged))
    elif args.scenario == "all":
        jobs = [(n, dict(base)) for n in replay.SCENARIOS]
    else:
        jobs = [(args.scenario, dict(base))]
    for name, params in jobs:
        if name not in replay.SCENARIOS:
            raise UsageError(f"unknown scenario {name!r}; known: {', '.join(replay.SCENARIOS)}")
        replay._params(params)
    return jobs


def cmd_verify(args) -> int:
    try:
        jobs = _verify_jobs(args)
    except replay.ReplayError as e:
        raise UsageError(str(e))
    try:
        reports = _map(_run_job, [(n, p, args.timing) for n, p in jobs], args.jobs)
    except replay.SamplingError as e:
        raise UsageError(str(e))
    ok = all(r["derivable"] for r in reports)
    payload = {"schema": "blochsc.verify/1", "seed": args.seed, "ok": ok, "scenarios": reports}
    rows = [{"scenario": r["scenario"], "seed": r["seed"], "draws": r["draw_count"],
             "derivable": r["derivable"]} for r in reports]
    lines = [f"{r['scenario']:14s} {'derivable over Z[1/2]' if r['derivable'] else 'NOT derivable'}"
             f"  ({r['draw_count']} draws, seed {r['seed']})" for r in reports]
    _render(args, payload, rows, ["scenario", "seed", "draws", "derivable"], "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAIL


def _need_n(n: int) -> None:
    if n < 2:
        raise UsageError("--primes-up-to must be at least 2")


def cmd_main_theorem(args) -> int:
    _need_n(args.primes_up_to)
    rep = qresidue.main_theorem_report(args.primes_up_to)
    cols = ["prime", "odd_part", "witness_x", "witness_order", "cross_zero", "summand"]
    text = qresidue.format_table(rep["rows"], cols) + f"\nconstant: {rep['constant']}"
    _render(args, rep, rep["rows"], cols, text)
    ok = all(r["cross_zero"] and r["witness_order"] == r["odd_part"] for r in rep["rows"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_torsion3(args) -> int:
    _need_n(args.primes_up_to)
    rep = qresidue.torsion3_report(args.primes_up_to)
    rows = [rep["global"] | {"prime": "-"}] + rep["local"]
    cols = ["prime", "generator", "order"]
    _render(args, rep, rows, cols, qresidue.format_table(rows, cols))
    return EXIT_OK


def cmd_rpbq(args) -> int:
    _need_n(args.primes_up_to)
    rep = qresidue.rpbq_structure_report(args.primes_up_to, verify=not args.no_verify)
    cols = ["prime", "odd_part"] + ([] if args.no_verify else ["computed"])
    text = "\n".join([qresidue.format_table(rep["rows"], cols), f"RP+(Q)[1/2]:   {rep['rpplus_Q']}",
                      f"Laurent:       {rep['laurent']}", f"V: {rep['V']}"])
    _render(args, rep, rep["rows"], cols, text)
    return EXIT_OK


def cmd_cache(args) -> int:
    c = SnfCache(args.cache_dir) if args.cache_dir else SnfCache(default_cache_dir())
    if args.action == "path":
        out = {"directory": str(c.directory)}
    elif args.action == "clear":
        out = {"directory": str(c.directory), "removed": c.clear()}
    else:
        out = c.stats()
    if args.format == "json":
        _emit(args, _dump_json(out))
    else:
        _emit(args, "\n".join(f"{k}: {v}" for k, v in out.items()) + "\n")
    return EXIT_OK


COMMANDS = {
    "structure": cmd_structure,
    "bloch": cmd_bloch,
    "verify": cmd_verify,
    "main-theorem": cmd_main_theorem,
    "torsion3": cmd_torsion3,
    "rpbq-report": cmd_rpbq,
    "cache": cmd_cache,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"blochsc {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
