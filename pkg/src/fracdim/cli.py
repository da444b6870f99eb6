"""Command line front end.

Subcommands: ``simulate``, ``estimate``, ``table1``, ``ratios``, ``mse-vs-m``
and ``qq``.  Settings resolve as built-in defaults, then ``--config`` JSON,
then explicit flags.  Every output starts with the resolved configuration
(including the seed) so a run can be regenerated exactly.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__, montecarlo
from .covariance import CovarianceModel, GridSpec
from .errors import ConfigError, FracDimError
from .estimators import estimate
from .fieldgen import build_embedding, sample_field, transform_field
from .fileio import field_to_csv, field_to_raster, read_field, rows_to_csv, to_json
from .increments import parse_increment
from .transforms import parse_transform

log = logging.getLogger("fracdim")

EXIT_IO = 9

TABLE1_COLUMNS = ["alpha", "process", "estimator", "m", "bias", "sd", "mse", "mean_alpha", "R"]
RATIO_COLUMNS = [
    "alpha", "process", "increment", "order", "m", "size", "n", "variance",
    "empirical_ratio", "predicted_ratio", "rate",
]
QQ_COLUMNS = ["theoretical", "ordered"]

DEFAULTS = {
    "alpha": [1.0],
    "c": None,
    "dim": 1,
    "n0": None,
    "margin": None,
    "transform": "identity",
    "increment": None,
    "m": None,
    "scheme": "ols",
    "replications": None,
    "seed": 0,
    "format": None,
    "out": None,
    "jobs": 1,
}

COMMAND_DEFAULTS = {
    "simulate": {"m": 4},
    "estimate": {"m": 4},
    "table1": {
        "alpha": [0.1, 1.0, 1.9],
        "m": 4,
        "replications": 100,
        "transforms": ["identity", "uniform", "exp1", "chisq1", "lognormal:1", "lognormal:4"],
    },
    "ratios": {"alpha": [0.1, 1.0, 1.9], "replications": 500},
    "mse-vs-m": {
        "alpha": [0.1, 0.3, 1.0, 1.7, 1.9],
        "transform": "chisq1",
        "m_values": [2, 4, 6, 8, 10],
        "replications": 100,
    },
    "qq": {"n0": [2000], "m": 10, "scheme": "gls", "increment": "diff1", "replications": 100},
}


def _floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text: str):
    return [int(x) for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with settings; flags override it")
    p.add_argument("--alpha", type=_floats, help="fractal index (comma list for sweeps)")
    p.add_argument("--c", type=float, help="covariance scale (default 1 for d=1, 10 for d=2)")
    p.add_argument("--dim", type=int, choices=(1, 2))
    p.add_argument("--n0", type=_ints, help="points per axis, e.g. 1000 or 100,100")
    p.add_argument("--margin", type=int, help="extra points per side (default m*J)")
    p.add_argument("--transform", help="identity | affine:a,b | uniform | exp1 | chisq1 | lognormal:tau")
    p.add_argument("--increment", help="diff0 | diff1 | square | literal like -1:1,0:-2,1:1")
    p.add_argument("--m", type=int, help="number of dilations in the regression")
    p.add_argument("--scheme", choices=("ols", "gls"))
    p.add_argument("--replications", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", help="csv | json | raster")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--jobs", type=int, help="worker processes for replications")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fracdim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a (transformed) Gaussian field")
    _common(p)
    p.add_argument("--part", choices=("re", "im"), default=None, help="which of the paired samples to emit")

    p = sub.add_parser("estimate", help="estimate alpha from a field file")
    _common(p)
    p.add_argument("input", help="field file written by simulate (CSV or raster)")

    p = sub.add_parser("table1", help="bias/SD/MSE over processes x alpha x estimators")
    _common(p)
    p.add_argument("--transforms", help="comma list of transforms, e.g. identity,exp1,lognormal:4")

    p = sub.add_parser("ratios", help="empirical vs asymptotic variance ratios")
    _common(p)
    p.add_argument("--sizes", type=_ints, help="per-axis sizes, e.g. 1000,2000,4000,10000 or 50,100,500")

    p = sub.add_parser("mse-vs-m", help="MSE as a function of the number of regression points")
    _common(p)
    p.add_argument("--m-values", type=_ints, dest="m_values")

    p = sub.add_parser("qq", help="normal Q-Q points and KS statistic for alpha_hat")
    _common(p)
    return parser


def _split_transforms(text):
    if isinstance(text, list):
        return text
    out, buf = [], ""
    for part in text.split(","):
        if buf:
            buf += "," + part
            out.append(buf)
            buf = ""
        elif part.startswith("affine:"):
            buf = part
        else:
            out.append(part)
    if buf:
        raise ConfigError(f"incomplete affine transform in {text!r}")
    return [t for t in out if t.strip()]


def resolve(args: argparse.Namespace) -> dict:
    """Merge defaults, config file and explicit flags into one settings dict."""
    cfg = dict(DEFAULTS)
    cfg.update(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key == "alpha" and not isinstance(value, list):
                value = [value]
            if key == "n0" and not isinstance(value, list):
                value = [value]
            cfg[key] = value
    for key, value in vars(args).items():
        if key in ("config", "command", "verbose", "input") or value is None:
            continue
        cfg[key] = value
    if "transforms" in cfg:
        cfg["transforms"] = _split_transforms(cfg["transforms"])
    if cfg["n0"] is not None and len(cfg["n0"]) == 2 and args.dim is None:
        cfg["dim"] = 2
    dim = int(cfg["dim"])
    if cfg["n0"] is None:
        if args.command == "ratios":
            cfg["n0"] = [1000] if dim == 1 else [50, 50]
        else:
            cfg["n0"] = [1000] if dim == 1 else [100, 100]
    if len(cfg["n0"]) == 1 and dim == 2:
        cfg["n0"] = cfg["n0"] * 2
    if len(cfg["n0"]) != dim:
        raise ConfigError(f"n0 {cfg['n0']} does not match dim {dim}")
    if cfg["increment"] is None:
        cfg["increment"] = "diff0" if dim == 1 else "square"
    if cfg["m"] is None:
        cfg["m"] = 10 if (args.command == "ratios" and dim == 1) else 4
    if cfg["c"] is None:
        cfg["c"] = CovarianceModel.default(1.0, dim).c
    if args.command == "ratios" and not cfg.get("sizes"):
        cfg["sizes"] = [1000, 2000, 4000, 10000] if dim == 1 else [50, 100, 500]
    return cfg


def _emit(text, cfg, binary=False):
    out = cfg.get("out")
    if out in (None, "-"):
        if binary:
            raise ConfigError("binary output needs --out")
        sys.stdout.write(text)
    elif binary:
        Path(out).write_bytes(text)
    else:
        Path(out).write_text(text)


def _single_alpha(cfg) -> float:
    if len(cfg["alpha"]) != 1:
        raise ConfigError("this command takes a single --alpha")
    return float(cfg["alpha"][0])


def _header(command, cfg) -> dict:
    keep = {k: v for k, v in cfg.items() if k not in ("out", "jobs")}
    return {"command": command, "version": __version__, "config": keep}


def cmd_simulate(cfg, args) -> int:
    alpha = _single_alpha(cfg)
    dim = int(cfg["dim"])
    model = CovarianceModel(alpha, float(cfg["c"]), dim)
    inc = parse_increment(cfg["increment"])
    margin = cfg["margin"] if cfg["margin"] is not None else int(cfg["m"]) * inc.radius
    cfg["margin"] = margin
    grid = GridSpec(tuple(cfg["n0"]), margin)
    g = parse_transform(cfg["transform"])
    emb = build_embedding(model, grid)
    re, im = sample_field(emb, int(cfg["seed"]))
    sample = transform_field(im if getattr(args, "part", None) == "im" else re, g)
    fmt = cfg["format"] or ("csv" if dim == 1 else "raster")
    meta = _header("simulate", cfg)
    meta.update(
        {
            "dim": dim,
            "n0": list(grid.n0),
            "margin": margin,
            "alpha": alpha,
            "c": model.c,
            "seed": int(cfg["seed"]),
            "transform": g.tag,
            "part": sample.part,
            "torus_size": list(emb.torus_size),
            "clamp_count": emb.clamp_count,
        }
    )
    if fmt == "csv":
        _emit(field_to_csv(sample.values, grid, meta), cfg)
    elif fmt in ("raster", "bin", "binary"):
        _emit(field_to_raster(sample.values, grid, meta), cfg, binary=True)
    else:
        raise ConfigError(f"simulate writes csv or raster, not {fmt!r}")
    return 0


def cmd_estimate(cfg, args) -> int:
    values, grid, meta = read_field(args.input)
    inc_text = cfg["increment"]
    if args.increment is None and grid.dim == 2:
        inc_text = "square"
    inc = parse_increment(inc_text)
    c = cfg["c"]
    if args.c is None and "c" in meta:
        c = float(meta["c"])
    elif args.c is None:
        c = CovarianceModel.default(1.0, grid.dim).c
    result = estimate(values, grid, inc, int(cfg["m"]), cfg["scheme"], c=c)
    report = result.to_dict()
    fmt = cfg["format"] or "json"
    used = {"input": str(args.input), "c": c, "increment": inc.to_literal(), "m": int(cfg["m"]), "scheme": cfg["scheme"], "format": fmt}
    header = _header("estimate", used)
    if "seed" in meta:
        header["source_seed"] = meta["seed"]
    if fmt == "json":
        _emit(to_json({**header, "estimate": report}), cfg)
    elif fmt == "csv":
        cols = ["alpha_hat", "dimension_hat", "m", "scheme", "clamped"]
        _emit(rows_to_csv(cols, [report], header), cfg)
    else:
        raise ConfigError(f"estimate writes json or csv, not {fmt!r}")
    return 0


def cmd_table1(cfg, args) -> int:
    transforms = [parse_transform(t) for t in cfg["transforms"]]
    rows = montecarlo.bias_table(
        cfg["alpha"],
        transforms,
        montecarlo.TABLE1_ESTIMATORS,
        n0=tuple(cfg["n0"]),
        m=int(cfg["m"]),
        replications=int(cfg["replications"]),
        seed=int(cfg["seed"]),
        c=float(cfg["c"]),
        jobs=int(cfg["jobs"]),
    )
    _write_table(rows, cfg, "table1")
    return 0


def _write_table(rows, cfg, command):
    header = _header(command, cfg)
    fmt = cfg["format"] or "csv"
    dicts = [r.to_dict() for r in rows]
    if fmt == "csv":
        _emit(rows_to_csv(TABLE1_COLUMNS, dicts, header), cfg)
    elif fmt == "json":
        _emit(to_json({**header, "rows": dicts}), cfg)
    else:
        raise ConfigError(f"{command} writes csv or json, not {fmt!r}")


def cmd_mse_vs_m(cfg, args) -> int:
    rows = montecarlo.mse_vs_m(
        cfg["alpha"],
        parse_transform(cfg["transform"]),
        m_values=tuple(int(m) for m in cfg["m_values"]),
        estimators=montecarlo.TABLE1_ESTIMATORS,
        n0=tuple(cfg["n0"]),
        replications=int(cfg["replications"]),
        seed=int(cfg["seed"]),
        c=float(cfg["c"]),
        jobs=int(cfg["jobs"]),
    )
    _write_table(rows, cfg, "mse-vs-m")
    return 0


def cmd_ratios(cfg, args) -> int:
    inc = parse_increment(cfg["increment"])
    g = parse_transform(cfg["transform"])
    dim = int(cfg["dim"])
    out = []
    for alpha in cfg["alpha"]:
        spec = montecarlo.ExperimentSpec(
            CovarianceModel(float(alpha), float(cfg["c"]), dim),
            tuple(cfg["n0"]),
            inc,
            m=int(cfg["m"]),
            scheme=cfg["scheme"],
            transform=g,
            replications=int(cfg["replications"]),
            seed=int(cfg["seed"]),
            margin=cfg["margin"],
        )
        for row in montecarlo.variance_ratio_report(spec, cfg["sizes"], jobs=int(cfg["jobs"])):
            out.append(
                {
                    "alpha": float(alpha),
                    "process": g.label,
                    "increment": inc.to_literal(),
                    "order": inc.order,
                    "m": int(cfg["m"]),
                    "size": "x".join(str(s) for s in row.size),
                    "n": row.n,
                    "variance": row.variance,
                    "empirical_ratio": row.empirical_ratio,
                    "predicted_ratio": row.predicted_ratio,
                    "rate": row.rate,
                }
            )
    header = _header("ratios", cfg)
    fmt = cfg["format"] or "csv"
    if fmt == "csv":
        _emit(rows_to_csv(RATIO_COLUMNS, out, header), cfg)
    elif fmt == "json":
        _emit(to_json({**header, "rows": out}), cfg)
    else:
        raise ConfigError(f"ratios writes csv or json, not {fmt!r}")
    return 0


def cmd_qq(cfg, args) -> int:
    alpha = _single_alpha(cfg)
    dim = int(cfg["dim"])
    spec = montecarlo.ExperimentSpec(
        CovarianceModel(alpha, float(cfg["c"]), dim),
        tuple(cfg["n0"]),
        parse_increment(cfg["increment"]),
        m=int(cfg["m"]),
        scheme=cfg["scheme"],
        transform=parse_transform(cfg["transform"]),
        replications=int(cfg["replications"]),
        seed=int(cfg["seed"]),
        margin=cfg["margin"],
    )
    alphas = montecarlo.run_experiment(spec, jobs=int(cfg["jobs"]))
    qq = montecarlo.qq_points(alphas)
    D, pval = montecarlo.ks_normality(alphas)
    header = _header("qq", cfg)
    header.update(
        {
            "quartile_line": {"slope": qq.slope, "intercept": qq.intercept},
            "ks": {"statistic": D, "p_value": pval, "note": "asymptotic p-value with estimated mean/SD (anti-conservative)"},
        }
    )
    rows = [{"theoretical": float(t), "ordered": float(o)} for t, o in zip(qq.theoretical, qq.ordered)]
    fmt = cfg["format"] or "csv"
    if fmt == "csv":
        _emit(rows_to_csv(QQ_COLUMNS, rows, header), cfg)
    elif fmt == "json":
        _emit(to_json({**header, "points": rows}), cfg)
    else:
        raise ConfigError(f"qq writes csv or json, not {fmt!r}")
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "table1": cmd_table1,
    "ratios": cmd_ratios,
    "mse-vs-m": cmd_mse_vs_m,
    "qq": cmd_qq,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg, args)
    except FracDimError as exc:
        print(f"fracdim {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"fracdim {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


dispatch = main

if __name__ == "__main__":
    sys.exit(main())
