"""Command-line front end.

    singhomeo construct --expr "slide(zigzag(pow2:3, stages=2, scale=1/8), 1/4)" --out o/
    singhomeo measure area --in o/expr.json -p Q=1/4,1/2
    singhomeo experiment banach-mycielski --stages 6 --seed 7 --out runs/bm
    singhomeo verify --in o/expr.json
    singhomeo inspect --in o/expr.json

Exit codes: 0 success, 1 a verification or experiment check failed, 2 bad
input (config, parse, missing seed).  Errors go to stderr as one JSON line.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

from . import __version__
from . import experiments as ex
from .cantor import CantorScheme
from .errors import ConfigError, SingHomeoError
from .grammar import parse
from .homeo import HomeoExpr
from .interval_fn import PLFunc
from .rational import is_exact, q
from .report import run_payload, series_csv, write_run
from .serialize import atomic_write, canonical, dumps, read_object, to_envelope
from .verify import describe, verify_object


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _globals() -> argparse.ArgumentParser:
    g = _Parser(add_help=False)
    g.add_argument("--seed", type=int, default=None, help="seed for every random choice")
    g.add_argument("--config", type=Path, default=None, help="INI-style config file")
    g.add_argument("--out", type=Path, default=None, help="output directory")
    g.add_argument("--format", choices=("json", "csv"), default="json", help="stdout format")
    mode = g.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact",
                      help="refuse sampled estimators")
    mode.add_argument("--float", dest="mode", action="store_const", const="float",
                      help="print exact rationals as floats")
    g.add_argument("--jobs", type=int, default=1, help="worker processes")
    g.add_argument("--plot", action="store_true", help="also write plot.svg")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _globals()
    p = _Parser(prog="singhomeo", description="Singular homeomorphisms of cubes.")
    p.add_argument("--version", action="version", version=f"singhomeo {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    c = sub.add_parser("construct", parents=[common], help="build and serialize an object")
    c.add_argument("--expr", required=True, help='e.g. "slide(zigzag(pow2:3), 1/4) o powermap(1.3, 1.7)"')
    c.add_argument("--name", default="expr.json", help="file name inside --out")
    m = sub.add_parser("measure", parents=[common], help="run one estimator")
    m.add_argument("estimator", choices=sorted(ESTIMATORS))
    src = m.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="input", type=Path)
    src.add_argument("--expr")
    m.add_argument("-p", "--param", action="append", default=[], metavar="KEY=VALUE")
    e = sub.add_parser("experiment", parents=[common], help="run a named pipeline")
    e.add_argument("name", choices=sorted(ex.PIPELINES))
    v = sub.add_parser("verify", parents=[common], help="invariant suite for an object file")
    v.add_argument("--in", dest="input", type=Path, required=True)
    i = sub.add_parser("inspect", parents=[common], help="describe an object file")
    i.add_argument("--in", dest="input", type=Path, required=True)
    return p


# config


def read_config(path: Path | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    if path is None:
        return cp
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"bad config file: {exc}") from exc
    return cp


def _section(cp: configparser.ConfigParser, name: str) -> dict:
    return dict(cp[name]) if cp.has_section(name) else {}


def _extra_options(tokens: list[str]) -> dict:
    """``--key value`` / ``--key=value`` pairs left over by argparse."""
    out, i = {}, 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--") or tok == "--":
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
        elif i + 1 < len(tokens) and not tokens[i + 1].startswith("--"):
            val = tokens[i + 1]
            i += 1
        else:
            val = "true"
        out[key] = val
        i += 1
    return out


# output


def _plain(v, mode: str | None):
    if isinstance(v, dict):
        return {k: _plain(x, mode) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x, mode) for x in v]
    if isinstance(v, (bool, type(None))):
        return v
    if is_exact(v) and not isinstance(v, int):
        return float(q(v)) if mode == "float" else str(q(v))
    if mode == "float" and isinstance(v, str) and "/" in v:
        try:
            return float(q(v))
        except ValueError:
            return v
    return v


def _emit(payload, fmt_: str, mode: str | None, csv_text: str | None = None) -> None:
    if fmt_ == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
        return
    sys.stdout.write(canonical(_plain(payload, mode)))


# estimators


def _param_box(text: str):
    sides = [s for s in text.split(";") if s.strip()]
    out = []
    for s in sides:
        lo, hi = s.split(",")
        out.append((q(lo), q(hi)))
    return out[0] if len(out) == 1 else out


def _param_point(text: str) -> list:
    return [float(v) for v in text.split(",")]


def _param_range(text: str) -> range:
    if ".." in text:
        a, b = text.split("..")
        return range(int(a), int(b) + 1)
    return range(int(text), int(text) + 1)


def _need_seed(seed):
    if seed is None:
        raise ConfigError("this estimator samples at random and needs --seed")
    return seed


def _est_length(obj, p, seed):
    from .measure.length import length_analysis

    if not isinstance(obj, PLFunc):
        raise ConfigError("length needs a PL function")
    return length_analysis(obj, int(p.get("n", 4))).to_dict(), True


def _est_area(obj, p, seed):
    from .measure.area import graph_area_pa

    Q = _param_box(p["Q"]) if "Q" in p else None
    return {"area": graph_area_pa(obj, Q)}, True


def _est_area_report(obj, p, seed):
    from .measure.area import area_report

    Q = _param_box(p["Q"]) if "Q" in p else None
    rep = area_report(obj, Q, int(p.get("k", 4)), int(p.get("level", 4)), seed)
    return rep.to_dict(), rep.exact


def _est_cover(obj, p, seed):
    from .measure.area import box_cover_series

    Q = _param_box(p["Q"]) if "Q" in p else None
    rows = box_cover_series(obj, Q, _param_range(p.get("levels", "1..5")))
    return {"series": rows}, all(r.get("certified", True) for r in rows)


def _est_mass(obj, p, seed):
    from .measure.area import mass_distribution_lower

    Q = _param_box(p["Q"]) if "Q" in p else None
    rep = mass_distribution_lower(obj, Q, int(p.get("k", 4)), int(p.get("k_min", 1)), seed=seed,
                                  samples=int(p.get("samples", 10**6)))
    return rep.to_dict(), rep.exact


def _hist(obj, p, seed):
    from .measure.occupation import pushforward_hist, separable_axes

    if not isinstance(obj, HomeoExpr):
        raise ConfigError("histograms need an expression")
    if separable_axes(obj) is None:
        _need_seed(seed)
    return pushforward_hist(obj, int(p.get("k", 6)), seed, int(p.get("samples", 10**6)))


def _est_hist(obj, p, seed):
    h = _hist(obj, p, seed)
    return h.to_dict(cells=p.get("cells", "false") == "true"), h.exact


def _est_score(obj, p, seed):
    from .measure.occupation import singularity_score

    h = _hist(obj, p, seed)
    eps = q(p.get("eps", "1/10"))
    return {"k": h.k, "eps": eps, "score": singularity_score(h, eps), "exact": h.exact}, h.exact


def _est_profile(obj, p, seed):
    from .measure.probes import diff_quotient_profile

    x = _param_point(p["point"]) if "point" in p else [0.5] * obj.d
    rows = diff_quotient_profile(obj, x, _param_range(p.get("n", "1..8")))
    return {"point": x, "rows": [r.to_dict() for r in rows]}, True


def _est_local_ratio(obj, p, seed):
    from .measure.occupation import local_ratio

    x = [q(v) for v in p["point"].split(",")] if "point" in p else [q(1, 2)] * obj.d
    lr = local_ratio(obj, x, q(p.get("r", "1/16")), seed, int(p.get("samples", 200_000)))
    if lr.method == "monte carlo":
        _need_seed(seed)
    return {"value": lr.value, "stderr": lr.stderr, "method": lr.method,
            "box": [[a, b] for a, b in lr.box]}, lr.method == "exact"


def _est_onto(obj, p, seed):
    from .measure.probes import onto_check

    rep = onto_check(obj, float(q(p.get("alpha", "1/16"))), float(q(p.get("beta", "1/4"))),
                     int(p.get("samples", 1000)), _param_point(p["center"]) if "center" in p else None,
                     _need_seed(seed), p.get("method", "inverse"))
    return rep.to_dict(), False


def _est_roundtrip(obj, p, seed):
    import numpy as np

    from .homeo import roundtrip_error

    rng = np.random.default_rng(_need_seed(seed))
    x = rng.random((int(p.get("points", 10_000)), obj.d))
    prec = int(p["prec"]) if "prec" in p else None
    return {"error": roundtrip_error(obj, x, prec), "prec": prec}, False


ESTIMATORS = {
    "length": _est_length,
    "area": _est_area,
    "area-report": _est_area_report,
    "cover": _est_cover,
    "mass": _est_mass,
    "hist": _est_hist,
    "score": _est_score,
    "profile": _est_profile,
    "local-ratio": _est_local_ratio,
    "onto": _est_onto,
    "roundtrip": _est_roundtrip,
}


# commands


def _load(args):
    return read_object(args.input)


def cmd_construct(args, cp) -> int:
    obj = parse(args.expr)
    if not isinstance(obj, (HomeoExpr, PLFunc, CantorScheme)):
        raise ConfigError("the expression does not describe an object that can be stored")
    text = dumps(obj)
    if args.out is not None:
        path = atomic_write(args.out / args.name, text)
        _emit({"written": str(path), "kind": to_envelope(obj)["kind"]}, "json", args.mode)
    else:
        sys.stdout.write(text)
    return 0


def cmd_measure(args, cp) -> int:
    obj = _load(args) if args.input else parse(args.expr)
    params = _section(cp, f"measure.{args.estimator}")
    for item in args.param:
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not KEY=VALUE")
        k, v = item.split("=", 1)
        params[k.strip()] = v.strip()
    seed = args.seed if args.seed is not None else _seed_from(cp)
    try:
        result, exact = ESTIMATORS[args.estimator](obj, params, seed)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, SingHomeoError):
            raise
        raise ConfigError(f"bad estimator parameters: {exc}") from exc
    if args.mode == "exact" and not exact:
        raise ConfigError(f"{args.estimator} did not produce an exact result on this object")
    payload = {"estimator": args.estimator, "params": params, "seed": seed, "exact": exact,
               "result": result}
    if args.out is not None:
        atomic_write(args.out / f"{args.estimator}.json", canonical(_plain(payload, args.mode)))
    _emit(payload, "json", args.mode)
    return 0


def _seed_from(cp) -> int | None:
    raw = cp.get("global", "seed", fallback=None)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"seed must be an integer, got {raw!r}") from exc


def cmd_experiment(args, cp, extra: dict) -> int:
    overrides = _section(cp, args.name)
    overrides.update(extra)
    seed = args.seed if args.seed is not None else _seed_from(cp)
    result = ex.run(args.name, overrides, seed, jobs=max(1, args.jobs))
    csv_text = series_csv(result.series[0]) if result.series else ""
    if args.out is not None:
        write_run(result, args.out, plot=args.plot)
    if args.format == "csv":
        _emit(None, "csv", args.mode, csv_text)
    else:
        payload = run_payload(result)
        _emit(payload, "json", args.mode)
    return 0 if result.passed else 1


def cmd_verify(args, cp) -> int:
    obj = _load(args)
    checks = verify_object(obj)
    payload = {"input": str(args.input), "checks": [c.to_dict() for c in checks],
               "passed": all(c.passed for c in checks)}
    if args.out is not None:
        atomic_write(args.out / "verify.json", canonical(_plain(payload, args.mode)))
    _emit(payload, "json", args.mode)
    return 0 if payload["passed"] else 1


def cmd_inspect(args, cp) -> int:
    text = Path(args.input).read_text(encoding="utf-8") if args.input.exists() else None
    if text is None:
        raise ConfigError(f"no such file {args.input}")
    obj = _load(args)
    env = json.loads(text)
    from .report import content_hash

    info = describe(obj)
    info["file"] = {"path": str(args.input), "format": env["format"], "version": env["version"],
                    "content_hash": content_hash(text), "canonical": dumps(obj) == text}
    info["params"] = env["data"]
    _emit(info, "json", args.mode)
    return 0


def _error(exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit": code}) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        extra_opts = _extra_options(extra)
        if extra_opts and args.command != "experiment":
            raise UsageError(f"unknown options: {', '.join('--' + k for k in extra_opts)}")
        cp = read_config(args.config)
        if args.command == "construct":
            return cmd_construct(args, cp)
        if args.command == "measure":
            return cmd_measure(args, cp)
        if args.command == "experiment":
            return cmd_experiment(args, cp, extra_opts)
        if args.command == "verify":
            return cmd_verify(args, cp)
        return cmd_inspect(args, cp)
    except (SingHomeoError, ValueError) as exc:
        return _error(exc, 2)
    except OSError as exc:
        return _error(exc, 2)
    except Exception as exc:  # noqa: BLE001 - report anything else as JSON too
        return _error(exc, 2)


if __name__ == "__main__":
    sys.exit(main())
