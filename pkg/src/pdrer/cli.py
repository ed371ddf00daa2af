"""Command-line interface: ``pdrer check | gen | certify``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from .aiger import ParseError, parse_aiger, write_aag, write_aig
from .certify import (
    FormatError,
    certify_safe,
    certify_unsafe,
    eliminate_to_plain,
    read_cex,
    read_invariant,
    write_cex,
    write_invariant,
)
from .engine import EngineConfig, Status, solve
from .generators import gen_buffer_alloc
from .reencode import ReencodeConfig
from .tsys import EncodingError, NoPropertyError, encode_transition_system

EXIT_SAFE = 20
EXIT_UNSAFE = 10
EXIT_UNKNOWN = 30
EXIT_USAGE = 1
EXIT_CERT_FAIL = 2
EXIT_OK = 0

STATS_SCHEMA = 1
TIMING_FIELDS = ("time", "wall_seconds")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2, which means "certification failed" here
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="pdrer", description="PDR model checker with extension-rule re-encoding")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="verify an AIGER model")
    c.add_argument("model")
    c.add_argument("--engine", choices=("pdr", "pdr-er"), default="pdr-er")
    c.add_argument("--delta", type=int, default=None)
    c.add_argument("--no-genev", action="store_true")
    c.add_argument("--no-pushev", action="store_true")
    c.add_argument("--no-impev", action="store_true")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--timeout-seconds", type=float, default=None)
    c.add_argument("--dump-invariant", metavar="PATH")
    c.add_argument("--dump-cex", metavar="PATH")
    c.add_argument("--stats-json", metavar="PATH")
    c.add_argument("--er-max-clusters", type=int, default=None)
    c.add_argument("--er-min-gain", type=int, default=None)
    c.add_argument("--er-template-order", default=None, help="comma-separated, e.g. xor,and,ha")
    c.add_argument("--no-certify", action="store_true", help="skip self-certification of the result")

    g = sub.add_parser("gen", help="generate benchmark circuits")
    gsub = g.add_subparsers(dest="family", required=True, parser_class=_Parser)
    ba = gsub.add_parser("bufferalloc")
    ba.add_argument("--k", type=int, required=True)
    ba.add_argument("-o", "--output", required=True)

    v = sub.add_parser("certify", help="check an invariant or counterexample")
    v.add_argument("--model", required=True)
    grp = v.add_mutually_exclusive_group(required=True)
    grp.add_argument("--invariant")
    grp.add_argument("--cex")
    return p


def _load(path: str):
    data = Path(path).read_bytes()
    return encode_transition_system(parse_aiger(data))


def _config(a: argparse.Namespace) -> EngineConfig:
    er = a.engine == "pdr-er"
    er_flags = [a.no_genev, a.no_pushev, a.no_impev, a.delta is not None, a.er_max_clusters is not None,
                a.er_min_gain is not None, a.er_template_order is not None]
    if not er and any(er_flags):
        raise UsageError("ablation and re-encoding flags require --engine pdr-er")
    if a.delta is not None and a.delta < 1:
        raise UsageError("--delta must be positive")
    rc = ReencodeConfig()
    if a.er_max_clusters is not None:
        rc.max_clusters = a.er_max_clusters
    if a.er_min_gain is not None:
        rc.min_gain = a.er_min_gain
    if a.er_template_order is not None:
        try:
            rc = ReencodeConfig(rc.max_clusters, rc.min_gain, tuple(a.er_template_order.split(",")))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    kw = {}
    if a.delta is not None:
        kw["delta"] = a.delta
    return EngineConfig(
        use_er=er,
        gen_ev=not a.no_genev,
        push_ev=not a.no_pushev,
        imp_ev=not a.no_impev,
        seed=a.seed,
        timeout=a.timeout_seconds,
        reencode=rc,
        **kw,
    )


def stats_record(model: str, engine: str, cfg: EngineConfig, res) -> dict:
    st = res.stats.as_dict()
    timing = st.pop("time")
    return {
        "schema": STATS_SCHEMA,
        "model": Path(model).name,
        "engine": engine,
        "config": {
            "delta": cfg.delta,
            "gen_ev": cfg.gen_ev,
            "push_ev": cfg.push_ev,
            "imp_ev": cfg.imp_ev,
            "seed": cfg.seed,
            "timeout": cfg.timeout,
            "er_max_clusters": cfg.reencode.max_clusters,
            "er_min_gain": cfg.reencode.min_gain,
            "er_template_order": list(cfg.reencode.template_order),
        },
        "result": res.status.value,
        "reason": res.reason,
        "stats": st,
        "time": timing,
    }


def _check(a: argparse.Namespace) -> int:
    cfg = _config(a)
    ts = _load(a.model)
    res = solve(ts, cfg)
    print(res.status.value)
    if res.status is Status.SAFE:
        print(f"invariant {len(res.invariant)} clauses, {res.stats.aux_vars_in_invariant} aux")
        if not a.no_certify:
            cr = certify_safe(ts, res.invariant, res.aux)
            if not cr.ok:
                print(f"internal error: invariant fails {cr.condition}", file=sys.stderr)
                return EXIT_CERT_FAIL
        if a.dump_invariant:
            Path(a.dump_invariant).write_text(write_invariant(ts, res.invariant, res.aux))
    elif res.status is Status.UNSAFE:
        print(f"counterexample length {len(res.path) - 1}")
        if not a.no_certify:
            cr = certify_unsafe(ts, res.path)
            if not cr.ok:
                print(f"internal error: counterexample fails at step {cr.step}", file=sys.stderr)
                return EXIT_CERT_FAIL
        if a.dump_cex:
            Path(a.dump_cex).write_text(write_cex(res.path))
    else:
        print(res.reason)
    if a.stats_json:
        rec = stats_record(a.model, a.engine, cfg, res)
        Path(a.stats_json).write_text(json.dumps(rec, indent=2, sort_keys=True) + "\n")
    return {Status.SAFE: EXIT_SAFE, Status.UNSAFE: EXIT_UNSAFE}.get(res.status, EXIT_UNKNOWN)


def _gen(a: argparse.Namespace) -> int:
    if a.k < 1:
        raise UsageError("--k must be at least 1")
    c = gen_buffer_alloc(a.k)
    out = Path(a.output)
    if out.suffix == ".aig":
        out.write_bytes(write_aig(c))
    else:
        out.write_text(write_aag(c))
    return EXIT_OK


def _certify(a: argparse.Namespace) -> int:
    ts = _load(a.model)
    if a.invariant:
        inv, aux = read_invariant(ts, Path(a.invariant).read_text())
        cr = certify_safe(ts, inv, aux)
        if not cr.ok:
            print(f"FAIL {cr.condition} {cr.reason}".rstrip())
            return EXIT_CERT_FAIL
        if len(aux):
            plain = eliminate_to_plain(inv, aux)
            cr = certify_safe(ts, plain, [])
            if not cr.ok:
                print(f"FAIL plain-{cr.condition}")
                return EXIT_CERT_FAIL
        print("PASS")
        return EXIT_OK
    cr = certify_unsafe(ts, read_cex(Path(a.cex).read_text()))
    if not cr.ok:
        print(f"FAIL {cr.condition} step {cr.step}")
        return EXIT_CERT_FAIL
    print("PASS")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    try:
        a = _parser().parse_args(argv)
    except UsageError as exc:
        print(f"pdrer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING - 10 * a.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        if a.cmd == "check":
            return _check(a)
        if a.cmd == "gen":
            return _gen(a)
        return _certify(a)
    except UsageError as exc:
        print(f"pdrer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, FormatError, NoPropertyError, EncodingError, OSError) as exc:
        print(f"pdrer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
