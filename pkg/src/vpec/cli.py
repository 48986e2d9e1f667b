"""Command-line front end.

Exit codes: 0 success, 1 property violation, 2 infeasible parameters,
3 enumeration budget exceeded, 4 parse error, 5 search exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import bounds, cons_lmds, cons_rep
from .budget import BudgetExceeded, get_budget
from .core import (
    INFINITY,
    CodeTable,
    VpecCodeSpec,
    format_distortion,
    lemma1_counterexample,
    run_adversary,
    table_decoder,
    table_from_dict,
    table_to_dict,
)
from .gf import field_of_order
from .lincode import (
    LinearCode,
    SearchExhausted,
    check_l_mds_order,
    code_from_dict,
    code_to_dict,
    grs_build,
    is_l_mds,
    is_list_decodable,
    is_mds,
    l_mds_radius,
    list_decoding_violation,
    min_distance,
    search_l_mds,
    strong_list_decoding_violation,
)

OK, VIOLATION, INFEASIBLE, BUDGET, PARSE, EXHAUSTED = 0, 1, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code: int, reason: str):
        super().__init__(reason)
        self.code = code
        self.reason = reason


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(PARSE, message)


def parse_rational(text, *, allow_decimal: bool = False) -> Fraction:
    """Parse ``p/q`` or an integer; decimals only when ``allow_decimal``."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip()
    if not allow_decimal and any(c in s for c in ".eE"):
        raise CliError(PARSE, f"{s!r}: give an exact rational p/q, not a decimal")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise CliError(PARSE, f"{s!r} is not a rational number") from None


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_distortion(x)
    if x is INFINITY:
        return "inf"
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_jsonable) + "\n"


def emit(text: str, path: Optional[str]) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_json(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(PARSE, f"cannot read JSON from {path}: {exc}") from None


# -- configuration ------------------------------------------------------------------

DEFAULTS: dict[str, dict[str, Any]] = {
    "bounds": {"n": None, "t": None, "l": [2], "format": "csv"},
    "simulate": {
        "construction": "rep",
        "n": None,
        "t": 1,
        "s": 1,
        "l": 2,
        "q": 2,
        "decoder": "alg2",
        "adversary": "random",
        "trials": 1000,
        "seed": 0,
        "search_seed": 0,
        "max_iters": 1000,
        "code": None,
    },
    "verify": {
        "t": None,
        "d": None,
        "tau": None,
        "list": None,
        "lmds": None,
        "lemma1": False,
        "worst_case": False,
        "list_decodable": False,
        "strong": False,
        "mds": False,
    },
    "search-lmds": {"n": 5, "k": 2, "l": 2, "q": 7, "seed": 0, "max_iters": 1000},
    "decode": {"construction": "rep", "t": 1, "s": 1, "l": 2, "q": 2, "decoder": "alg2", "code": None},
    "figure": {"id": None},
}

# Options that name files rather than parameters; kept out of the echoed config.
IO_KEYS = {"out", "out_dir", "dump", "dump_code", "config", "input", "no_timing", "budget"}


def effective_config(command: str, args: argparse.Namespace) -> dict:
    """Defaults, overridden by the JSON config file, overridden by flags."""
    cfg = dict(DEFAULTS[command])
    if getattr(args, "config", None):
        loaded = _read_json(args.config)
        if not isinstance(loaded, dict):
            raise CliError(PARSE, "config file must hold a JSON object")
        loaded = loaded.get(command, loaded)
        unknown = set(loaded) - set(cfg) - IO_KEYS
        if unknown:
            raise CliError(PARSE, f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("command", "config", "func") or value is None or value is False:
            continue
        cfg[key] = value
    return cfg


def echo(command: str, cfg: dict) -> dict:
    shown = {k: v for k, v in cfg.items() if k not in IO_KEYS}
    shown["command"] = command
    return json.loads(json.dumps(shown, sort_keys=True, default=_jsonable))


def _need(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise CliError(PARSE, f"missing required parameter(s): {', '.join(missing)}")


# -- code loading ---------------------------------------------------------------------


def load_any_code(path: str):
    """A LinearCode or a CodeTable from a JSON file."""
    doc = _read_json(path)
    try:
        if isinstance(doc, dict) and doc.get("format") == "vpec-table":
            return table_from_dict(doc), doc
        if isinstance(doc, dict) and "code" in doc:
            doc = doc["code"]
        return code_from_dict(doc), doc
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(PARSE, f"{path}: malformed code file ({exc})") from None


def _lmds_base(cfg: dict) -> LinearCode:
    N, T, L = int(cfg["n"]), int(cfg["t"]), int(cfg["l"])
    rho = cons_lmds.check_parameters(N, T, L)
    if cfg.get("code"):
        code, _ = load_any_code(cfg["code"])
        if not isinstance(code, LinearCode):
            raise CliError(PARSE, "lmds construction needs a linear base code file")
        return code
    field = field_of_order(int(cfg["q"]))
    params = search_l_mds(field, N, int(rho * N), L, seed=int(cfg["search_seed"]), max_iters=int(cfg["max_iters"]))
    return grs_build(field, N, int(rho * N), params)


def build_spec(cfg: dict) -> tuple[VpecCodeSpec, dict]:
    if cfg["construction"] == "rep":
        code = cons_rep.RepVpecCode(int(cfg["t"]), int(cfg["s"]))
        params = {"N": code.N, "T": code.T, "s": code.s, "q": int(cfg["q"]), "decoder": cfg["decoder"]}
        return cons_rep.vpec_spec(code, int(cfg["q"]), cfg["decoder"]), params
    if cfg["construction"] == "lmds":
        _need(cfg, "n")
        code = cons_lmds.build(_lmds_base(cfg), int(cfg["t"]), int(cfg["l"]))
        params = {
            "N": code.N,
            "T": code.T,
            "L": code.L,
            "q": code.base.q,
            "k": code.k,
            "base": code_to_dict(code.base),
        }
        return cons_lmds.vpec_spec(code), params
    raise CliError(PARSE, f"unknown construction {cfg['construction']!r}")


# -- subcommands ------------------------------------------------------------------------


def cmd_bounds(args) -> int:
    cfg = effective_config("bounds", args)
    _need(cfg, "n", "t")
    N, T = int(cfg["n"]), int(cfg["t"])
    Ls = sorted({int(v) for v in cfg["l"]})
    try:
        curves = bounds.all_curves(N, T, Ls)
    except ValueError as exc:
        raise CliError(INFEASIBLE, str(exc)) from None
    meta = echo("bounds", cfg)
    meta["omitted"] = dict(sorted(curves.omitted.items()))
    ordered = [curves.curves[k] for k in sorted(curves.curves)]
    if cfg["format"] == "json":
        text = bounds.curves_to_json(ordered, meta)
    else:
        text = bounds.curves_to_csv(ordered, "config: " + json.dumps(meta, sort_keys=True))
    emit(text, args.out)
    if N < 2 * T + 1:
        reason = {"error": INFEASIBLE, "reason": f"N={N} < 2T+1={2 * T + 1}: zero distortion unattainable"}
        print(json.dumps(reason), file=sys.stderr)
        return INFEASIBLE
    return OK


def cmd_simulate(args) -> int:
    cfg = effective_config("simulate", args)
    if args.budget is not None:
        os.environ["VPEC_BUDGET"] = str(args.budget)
    spec, params = build_spec(cfg)
    mode = cfg["adversary"]
    if mode not in ("exhaustive", "random", "swap", "mixed"):
        raise CliError(PARSE, f"unknown adversary {mode!r}")
    if args.dump_code:
        table = CodeTable.from_spec(spec)
        emit(dumps(table_to_dict(table, T=spec.T, D=format_distortion(spec.D))), args.dump_code)
    dump_fh = open(args.dump, "w") if args.dump else None
    trace = (lambda rec: dump_fh.write(json.dumps(rec, sort_keys=True) + "\n")) if dump_fh else None
    start = time.perf_counter()
    try:
        report = run_adversary(
            spec, spec.T, mode, seed=int(cfg["seed"]), trials=int(cfg["trials"]), trace=trace
        )
    except BudgetExceeded as exc:
        raise CliError(BUDGET, f"{exc}; rerun with --adversary random") from None
    finally:
        if dump_fh:
            dump_fh.close()
    elapsed = round((time.perf_counter() - start) * 1000, 3)
    violation = report.wrong_symbol_events > 0 or report.worst > spec.D
    doc = {
        "config": echo("simulate", cfg),
        "construction": cfg["construction"],
        "params": params,
        "adversary": mode,
        "trials_or_space_size": report.trials,
        "worst_distortion": format_distortion(report.worst),
        "mean_distortion": format_distortion(report.mean),
        "distortion_budget": format_distortion(spec.D),
        "wrong_symbol_events": report.wrong_symbol_events,
        "max_erasures": report.max_erasures,
        "exhaustive": report.exhaustive,
        "worst_case": report.worst_case,
        "status": "violation" if violation else "ok",
        "elapsed_ms": None if args.no_timing else elapsed,
    }
    emit(dumps(doc), args.out)
    return VIOLATION if violation else OK


def _property(name: str, passed: bool, counterexample=None, **extra) -> dict:
    out = {"property": name, "passed": bool(passed), **extra}
    if counterexample is not None:
        out["counterexample"] = counterexample
    return out


def cmd_verify(args) -> int:
    cfg = effective_config("verify", args)
    code, doc = load_any_code(args.code)
    results = []
    is_table = isinstance(code, CodeTable)
    if cfg["lemma1"] or cfg["worst_case"]:
        if not is_table:
            raise CliError(INFEASIBLE, "Lemma-style checks need a vpec-table code file")
        T = int(cfg["t"] if cfg["t"] is not None else doc.get("T", -1))
        D = parse_rational(cfg["d"] if cfg["d"] is not None else doc.get("D", "none"))
        if T < 0:
            raise CliError(PARSE, "need --t")
        if cfg["lemma1"]:
            bad = lemma1_counterexample(code, T, D)
            results.append(_property("lemma1", bad is None, bad, T=T, D=D))
        if cfg["worst_case"]:
            index = {m: i for i, m in enumerate(code.messages)}
            spec = VpecCodeSpec(
                code.layout, code.k, T, D, lambda m: code.packets_of(index[tuple(m)]), table_decoder(code, T)
            )
            rep = run_adversary(spec, T, "exhaustive")
            ok = rep.wrong_symbol_events == 0 and rep.worst <= D
            results.append(_property("worst_case", ok, None if ok else rep.worst_case, T=T, D=D, worst=rep.worst))
    wants_linear = cfg["list_decodable"] or cfg["strong"] or cfg["lmds"] is not None or cfg["mds"]
    if wants_linear and is_table:
        raise CliError(INFEASIBLE, "list-decoding checks need a linear code file")
    try:
        if cfg["mds"]:
            results.append(_property("mds", is_mds(code), None, d=min_distance(code)))
        if cfg["list_decodable"]:
            _need(cfg, "tau", "list")
            tau, L = int(cfg["tau"]), int(cfg["list"])
            bad = list_decoding_violation(code, tau, L)
            results.append(_property("list_decodable", bad is None, bad, tau=tau, L=L))
        if cfg["strong"]:
            _need(cfg, "tau", "list")
            tau, L = parse_rational(cfg["tau"]), int(cfg["list"])
            bad = strong_list_decoding_violation(code, tau, L)
            results.append(_property("strong_list_decodable", bad is None, bad, tau=tau, L=L))
        if cfg["lmds"] is not None:
            L = int(cfg["lmds"])
            check_l_mds_order(code, L)
            results.append(_property("l_mds", is_l_mds(code, L), None, L=L, tau=l_mds_radius(code.n, code.k, L)))
    except BudgetExceeded:
        raise
    except ValueError as exc:
        raise CliError(INFEASIBLE, f"precondition failed: {exc}") from None
    if not results:
        raise CliError(PARSE, "no property requested")
    passed = all(r["passed"] for r in results)
    emit(dumps({"config": echo("verify", cfg), "results": results, "passed": passed}), args.out)
    return OK if passed else VIOLATION


def cmd_search_lmds(args) -> int:
    cfg = effective_config("search-lmds", args)
    n, k, L, q = (int(cfg[x]) for x in ("n", "k", "l", "q"))
    field = field_of_order(q)
    try:
        params = search_l_mds(field, n, k, L, seed=int(cfg["seed"]), max_iters=int(cfg["max_iters"]))
    except SearchExhausted as exc:
        raise CliError(EXHAUSTED, str(exc)) from None
    except ValueError as exc:
        raise CliError(INFEASIBLE, str(exc)) from None
    code = grs_build(field, n, k, params)
    tau = l_mds_radius(n, k, L)
    transcript = {
        "min_distance": min_distance(code),
        "mds": is_mds(code),
        "l_mds": is_l_mds(code, L),
        "tau": tau,
        "list_decodable_floor_tau": is_list_decodable(code, int(tau), L),
        "lifting_field_ok": q > L * (L + 1) // 2,
    }
    doc = {"config": echo("search-lmds", cfg), "params": params.to_dict(), "code": code_to_dict(code), "verification": transcript}
    emit(dumps(doc), args.out)
    return OK


def cmd_decode(args) -> int:
    cfg = effective_config("decode", args)
    payload = _read_json(args.input)
    try:
        if cfg["construction"] == "rep":
            code = cons_rep.RepVpecCode(int(cfg["t"]), int(cfg["s"]))
            dec = {"alg1": cons_rep.decode_alg1, "alg2": cons_rep.decode_alg2}[cfg["decoder"]]
            out = dec(code, tuple(tuple(p) for p in payload["packets"]))
        elif cfg["construction"] == "lmds":
            _need(cfg, "code")
            base, _ = load_any_code(cfg["code"])
            code = cons_lmds.build(base, int(cfg["t"]), int(cfg["l"]))
            Y = payload["array"] if "array" in payload else cons_lmds.depacketize(payload["packets"])
            out = cons_lmds.decode(code, Y)
        elif cfg["construction"] == "table":
            _need(cfg, "code")
            table, _ = load_any_code(cfg["code"])
            if not isinstance(table, CodeTable):
                raise CliError(PARSE, "table decoding needs a vpec-table code file")
            out = table_decoder(table, int(cfg["t"]))(payload["packets"])
        else:
            raise CliError(PARSE, f"unknown construction {cfg['construction']!r}")
    except (KeyError, TypeError) as exc:
        raise CliError(PARSE, f"malformed input: {exc}") from None
    doc = {"config": echo("decode", cfg), "symbols": out.to_json(), "erasures": out.erasures, "flagged": out.flagged}
    emit(dumps(doc), args.out)
    return OK


FIGURE_PANELS = {
    1: [("fig1_N3_T1", 3, 1), ("fig1_N5_T2", 5, 2)],
    2: [("fig2_N128_T18", 128, 18)],
    3: [("fig3_theta_1_10", Fraction(1, 10)), ("fig3_theta_1_20", Fraction(1, 20))],
}


def figure_panels(fig: int) -> dict[str, tuple[list[bounds.RdCurve], dict]]:
    """Panel name -> (curves, metadata) for one figure."""
    out = {}
    for panel in FIGURE_PANELS[fig]:
        if fig in (1, 2):
            name, N, T = panel
            cs = bounds.all_curves(N, T, (2, 3))
            meta = {"N": N, "T": T, "rate": "per-packet", "omitted": dict(sorted(cs.omitted.items()))}
        else:
            name, theta = panel
            cs = bounds.CurveSet()
            extra = {}
            for L in (2, 3):
                summary = bounds.asymptotic_curves(theta, L)
                for c in summary.curves.curves.values():
                    cs.add(c)
                cs.omitted.update(summary.curves.omitted)
                extra[f"L{L}"] = {
                    "lmds_point": [format_distortion(summary.lmds_point.R), format_distortion(summary.lmds_point.D)],
                    "mds_distortion_at_lmds_rate": format_distortion(summary.mds_at_lmds_rate),
                    "lmds_beats_mds": summary.lmds_beats_mds,
                }
            meta = {"theta": format_distortion(theta), "rate": "overall", "omitted": dict(sorted(cs.omitted.items())), **extra}
        out[name] = ([cs.curves[k] for k in sorted(cs.curves)], meta)
    return out


def cmd_figure(args) -> int:
    cfg = effective_config("figure", args)
    _need(cfg, "id")
    fig = int(cfg["id"])
    if fig not in FIGURE_PANELS:
        raise CliError(PARSE, f"figure id must be 1, 2 or 3, got {fig}")
    out_dir = Path(args.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, (curves, meta) in figure_panels(fig).items():
        header = {"config": echo("figure", cfg), "panel": name, **meta}
        path = out_dir / f"{name}.csv"
        path.write_text(bounds.curves_to_csv(curves, json.dumps(header, sort_keys=True)))
        print(path)
    return OK


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vpec", description="Variable packet-error coding toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, out=True):
        sp.add_argument("--config", help="JSON file of parameters (flags take precedence)")
        if out:
            sp.add_argument("--out", help="output file (default stdout)")

    b = sub.add_parser("bounds", help="converse and achievable rate-distortion curves")
    common(b)
    b.add_argument("--n", type=int)
    b.add_argument("--t", type=int)
    b.add_argument("--l", type=int, action="append", help="list size for the interleaved construction (repeatable)")
    b.add_argument("--format", choices=["csv", "json"])
    b.set_defaults(func=cmd_bounds)

    s = sub.add_parser("simulate", help="run a construction against an adversary")
    common(s)
    s.add_argument("--construction", choices=["rep", "lmds"])
    s.add_argument("--n", type=int)
    s.add_argument("--t", type=int)
    s.add_argument("--s", type=int)
    s.add_argument("--l", type=int)
    s.add_argument("--q", type=int)
    s.add_argument("--decoder", choices=["alg1", "alg2"])
    s.add_argument("--adversary", choices=["exhaustive", "random", "swap", "mixed"])
    s.add_argument("--trials", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--search-seed", type=int, dest="search_seed")
    s.add_argument("--max-iters", type=int, dest="max_iters")
    s.add_argument("--code", help="base linear code file (lmds)")
    s.add_argument("--budget", type=int, help="enumeration budget (overrides VPEC_BUDGET)")
    s.add_argument("--dump", help="write one JSON line per trial")
    s.add_argument("--dump-code", dest="dump_code", help="write the full code table as JSON")
    s.add_argument("--no-timing", action="store_true", dest="no_timing", help="omit elapsed_ms")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="check code properties")
    common(v)
    v.add_argument("code", help="code file: linear code JSON or vpec-table JSON")
    v.add_argument("--t", type=int)
    v.add_argument("--d", help="distortion p/q")
    v.add_argument("--tau", help="radius (p/q for --strong)")
    v.add_argument("--list", type=int, help="list size L")
    v.add_argument("--lemma1", action="store_true")
    v.add_argument("--worst-case", action="store_true", dest="worst_case")
    v.add_argument("--list-decodable", action="store_true", dest="list_decodable")
    v.add_argument("--strong", action="store_true")
    v.add_argument("--mds", action="store_true")
    v.add_argument("--lmds", type=int, help="check the L-MDS property for this L")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("search-lmds", help="random search for an L-MDS GRS code")
    common(m)
    m.add_argument("--n", type=int)
    m.add_argument("--k", type=int)
    m.add_argument("--l", type=int)
    m.add_argument("--q", type=int)
    m.add_argument("--seed", type=int)
    m.add_argument("--max-iters", type=int, dest="max_iters")
    m.set_defaults(func=cmd_search_lmds)

    d = sub.add_parser("decode", help="decode one received packet set")
    common(d)
    d.add_argument("input", help='JSON file with {"packets": [...]} or {"array": [[...]]}')
    d.add_argument("--construction", choices=["rep", "lmds", "table"])
    d.add_argument("--t", type=int)
    d.add_argument("--s", type=int)
    d.add_argument("--l", type=int)
    d.add_argument("--q", type=int)
    d.add_argument("--decoder", choices=["alg1", "alg2"])
    d.add_argument("--code", help="base linear code (lmds) or vpec-table (table)")
    d.set_defaults(func=cmd_decode)

    f = sub.add_parser("figure", help="write the curve data behind a figure, one CSV per panel")
    common(f, out=False)
    f.add_argument("--id", type=int, choices=[1, 2, 3])
    f.add_argument("--out-dir", dest="out_dir")
    f.set_defaults(func=cmd_figure)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(json.dumps({"error": exc.code, "reason": exc.reason}), file=sys.stderr)
        return exc.code
    except BudgetExceeded as exc:
        print(json.dumps({"error": BUDGET, "reason": str(exc), "budget": get_budget()}), file=sys.stderr)
        return BUDGET
    except bounds.Infeasible as exc:
        print(json.dumps({"error": INFEASIBLE, "reason": str(exc)}), file=sys.stderr)
        return INFEASIBLE
    except SearchExhausted as exc:
        print(json.dumps({"error": EXHAUSTED, "reason": str(exc)}), file=sys.stderr)
        return EXHAUSTED
    except ValueError as exc:
        print(json.dumps({"error": INFEASIBLE, "reason": str(exc)}), file=sys.stderr)
        return INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
