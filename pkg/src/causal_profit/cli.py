"""Command-line entry point: ``causal-profit {eval,sim-normal,sim-dirichlet,entropy}``.

Exit codes: 0 success, 2 invalid input or config, 3 model fitting did not
converge, 4 file I/O failure.
"""

import argparse
import dataclasses
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from . import io as cpio
from .curves import Normalization, aupc, empirical_profit_curve, uplift_curve
from .errors import ConvergenceError, DomainError
from .information import dirichlet_conditional_entropy, dirichlet_information_ratios
from .numerics import RngStream, sample_dirichlet
from .profit import CostBenefitMatrix
from .sim_dirichlet import DirichletSimConfig, run_outcome_sweep, run_variance_grid
from .sim_normal import NormalSimConfig, run_scale_grid

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4

NORMAL_COLUMNS = ("rep", "scale_c", "mi_ratio", "aupc_uplift", "aupc_predictive",
                  "measured_S0", "measured_S1", "aupc_oracle")
GRID_COLUMNS = ("n_u", "n_p", "win_rate_uplift", "mean_aupc_u", "mean_aupc_p",
                "win_rate_predictive", "winner")
SWEEP_COLUMNS = ("S0", "S1", "uplift_win_ratio", "alpha", "beta", "gamma", "delta")
DEFAULT_SCALE_GRID = (0.01, 0.1, 1.0, 10.0)


def _parse_cb(value):
    try:
        parts = [float(v) for v in str(value).split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid cost-benefit spec {value!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("cost-benefit spec needs 4 values: cb00,cb01,cb10,cb11")
    return CostBenefitMatrix(*parts)


def _positive_float(value):
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if not v > 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"parameter must be positive, got {value}")
    return v


def _seed(value):
    v = int(value)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="causal-profit", description="Causal-profit evaluation and simulations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="uplift and profit curves for a scored dataset")
    ev.add_argument("data", help="CSV with columns y, t, score and optional cb00..cb11")
    ev.add_argument("--cb", type=_parse_cb, default=None, help="constant matrix cb00,cb01,cb10,cb11")
    ev.add_argument("--unitary", action="store_true", help="force the unitary cost-benefit matrix")
    ev.add_argument("--raw", action="store_true", help="write raw curves instead of per-capita")
    ev.add_argument("--out", default=".", help="output directory")

    for name, helptext in (("sim-normal", "normal-feature simulation"),
                           ("sim-dirichlet", "Dirichlet potential-outcome simulation")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("config", nargs="?", default=None, help="TOML config or a run manifest")
        sp.add_argument("--seed", type=_seed, default=None, help="override master_seed")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")
        if name == "sim-dirichlet":
            sp.add_argument("--mode", choices=("grid", "sweep"), default=None)

    en = sub.add_parser("entropy", help="expected conditional entropies under Dir(a, b, c, d)")
    for p in "abcd":
        en.add_argument(p, type=_positive_float)
    return parser


def _build_config(cls, section, extra_keys=()):
    """Instantiate ``cls`` from a mapping, naming unknown or invalid fields."""
    allowed = set(cls.field_names())
    kwargs = {}
    for key, value in section.items():
        if key in extra_keys:
            continue
        if key not in allowed:
            raise cpio.ValidationError(f"unknown config field {key!r}", column=key)
        kwargs[key] = value
    if "cb" in kwargs:
        kwargs["cb"] = _cb_from_config(kwargs["cb"])
    if "proportions" in kwargs:
        kwargs["proportions"] = tuple(kwargs["proportions"])
    for key, value in kwargs.items():
        expected = cls.__dataclass_fields__[key].default
        if isinstance(expected, int) and not isinstance(expected, bool) and isinstance(value, float):
            if value != int(value):
                raise cpio.ValidationError(f"config field {key!r} must be an integer", column=key)
            kwargs[key] = int(value)
    try:
        return cls(**kwargs)
    except DomainError as exc:
        raise cpio.ValidationError(f"invalid config: {exc}") from None
    except TypeError as exc:
        raise cpio.ValidationError(f"invalid config: {exc}") from None


def _cb_from_config(value):
    if isinstance(value, CostBenefitMatrix):
        return value
    if isinstance(value, dict):
        try:
            return CostBenefitMatrix(*(float(value[k]) for k in cpio.CB_COLUMNS))
        except KeyError as exc:
            raise cpio.ValidationError(f"config field 'cb' is missing {exc.args[0]!r}", column="cb") from None
    arr = np.asarray(value, dtype=float)
    if arr.shape == (2, 2):
        return CostBenefitMatrix.from_rows(arr)
    if arr.shape == (4,):
        return CostBenefitMatrix(*arr)
    raise cpio.ValidationError("config field 'cb' must be a 2x2 matrix or cb00..cb11 table", column="cb")


def _config_dict(cfg):
    out = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, CostBenefitMatrix):
            value = dict(zip(cpio.CB_COLUMNS, value.as_flat().tolist()))
        elif isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def _out_dir(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_eval(args):
    cb = CostBenefitMatrix.unitary() if args.unitary else args.cb
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        data = cpio.read_dataset(args.data, cb=cb)
    n_treated = int(data.t.sum())
    if n_treated in (0, len(data.t)):
        print("warning: one treatment arm is empty; curves use the 0/0 convention for it", file=sys.stderr)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)

    norm = Normalization.RAW if args.raw else Normalization.PER_CAPITA
    u_curve = uplift_curve(data)
    p_curve = empirical_profit_curve(data)
    out = _out_dir(args.out)
    paths = []
    for name, curve in (("uplift", u_curve), ("profit", p_curve)):
        c = curve.raw() if norm is Normalization.RAW else curve.per_capita()
        path = out / f"{name}_curve.csv"
        cpio.write_csv(path, ("k", name), zip(c.k.tolist(), c.values.tolist()))
        paths.append(path)
    summary = out / "summary.csv"
    cpio.write_csv(summary, ("metric", "value"), [
        ("n", len(data.t)),
        ("n_treated", n_treated),
        ("aupc_uplift", aupc(u_curve)),
        ("aupc_profit", aupc(p_curve)),
    ])
    paths.append(summary)
    config = {
        "data": str(args.data),
        "data_sha256": cpio.file_digest(args.data),
        "cb": None if cb is None else dict(zip(cpio.CB_COLUMNS, cb.as_flat().tolist())),
        "unitary": bool(args.unitary),
        "normalization": norm.value,
    }
    cpio.write_manifest(out, "eval", config, None, paths)
    return EXIT_OK


def normal_rows_to_records(rows):
    return [(r.rep, r.scale_c, r.mi_ratio, r.aupc_uplift, r.aupc_predictive,
             r.measured_s0, r.measured_s1, r.aupc_oracle) for r in rows]


def cmd_sim_normal(args):
    section = dict(cpio.load_config(args.config))
    section = section.get("normal", section)
    scales = section.get("scale_grid")
    cfg = _build_config(NormalSimConfig, section, extra_keys=("scale_grid",))
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    if scales is None:
        scales = list(DEFAULT_SCALE_GRID) if "scale_c" not in section else [cfg.scale_c]
    try:
        scales = [float(s) for s in scales]
    except (TypeError, ValueError):
        raise cpio.ValidationError("config field 'scale_grid' must be a list of numbers", column="scale_grid") from None
    if not scales or any(not s > 0 for s in scales):
        raise cpio.ValidationError("config field 'scale_grid' must hold positive numbers", column="scale_grid")
    rows = run_scale_grid(cfg, scales, threads=args.threads)
    out = _out_dir(args.out)
    path = cpio.write_csv(out / "sim_normal.csv", NORMAL_COLUMNS, normal_rows_to_records(rows))
    config = _config_dict(cfg)
    config["scale_grid"] = scales
    cpio.write_manifest(out, "sim-normal", config, cfg.master_seed, [path])
    return EXIT_OK


def _int_list(section, key, default):
    values = section.get(key, default)
    try:
        values = [int(v) for v in values]
    except (TypeError, ValueError):
        raise cpio.ValidationError(f"config field {key!r} must be a list of integers", column=key) from None
    if not values or any(v < 1 for v in values):
        raise cpio.ValidationError(f"config field {key!r} must hold integers >= 1", column=key)
    return values


def _sweep_grid(section, cfg):
    if "mu_grid" in section:
        grid = []
        for mu in section["mu_grid"]:
            mu = [float(v) for v in mu]
            if len(mu) != 4 or any(v <= 0 for v in mu):
                raise cpio.ValidationError("config field 'mu_grid' needs positive 4-vectors", column="mu_grid")
            total = sum(mu)
            grid.append(mu if abs(total - 1.0) <= 1e-12 else [v / total for v in mu])
        return grid
    count = int(section.get("sweep_points", 20))
    if count < 1:
        raise cpio.ValidationError("config field 'sweep_points' must be >= 1", column="sweep_points")
    # uniform draws on the simplex
    draws = sample_dirichlet(np.ones(4), RngStream(cfg.master_seed, (2,)), size=count)
    draws = np.maximum(draws, 1e-6)
    return (draws / draws.sum(axis=1, keepdims=True)).tolist()


def cmd_sim_dirichlet(args):
    section = dict(cpio.load_config(args.config))
    section = section.get("dirichlet", section)
    extra = ("mode", "n_u_values", "n_p_values", "mu_grid", "sweep_points")
    cfg = _build_config(DirichletSimConfig, section, extra_keys=extra)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    mode = args.mode or section.get("mode", "grid")
    if mode not in ("grid", "sweep"):
        raise cpio.ValidationError(f"config field 'mode' must be 'grid' or 'sweep', got {mode!r}", column="mode")
    n_u = _int_list(section, "n_u_values", range(1, 51))
    n_p = _int_list(section, "n_p_values", range(1, 51))
    out = _out_dir(args.out)
    config = _config_dict(cfg)
    config.update(mode=mode, n_u_values=n_u, n_p_values=n_p)
    if mode == "grid":
        cells = run_variance_grid(cfg, n_u, n_p, threads=args.threads)
        records = [(c.n_u, c.n_p, c.win_rate_uplift, c.mean_aupc_u, c.mean_aupc_p,
                    c.win_rate_predictive, c.winner) for c in cells]
        path = cpio.write_csv(out / "sim_dirichlet_grid.csv", GRID_COLUMNS, records)
    else:
        grid = _sweep_grid(section, cfg)
        config["mu_grid"] = grid
        rows = run_outcome_sweep(cfg, grid, n_u, n_p, threads=args.threads)
        records = [(r.s0, r.s1, r.uplift_win_ratio, *r.proportions) for r in rows]
        path = cpio.write_csv(out / "sim_dirichlet_sweep.csv", SWEEP_COLUMNS, records)
    cpio.write_manifest(out, "sim-dirichlet", config, cfg.master_seed, [path])
    return EXIT_OK


def cmd_entropy(args):
    m = (args.a, args.b, args.c, args.d)
    report = dirichlet_conditional_entropy(*m)
    ratios = dirichlet_information_ratios(m)
    for name, value in (("joint", report.joint), ("marginal_y0", report.marginal_y0),
                        ("marginal_y1", report.marginal_y1), ("mi_ratio_joint", ratios.joint),
                        ("mi_ratio_y0", ratios.y0), ("mi_ratio_y1", ratios.y1)):
        print(f"{name}\t{cpio.format_value(value)}")
    return EXIT_OK


COMMANDS = {
    "eval": cmd_eval,
    "sim-normal": cmd_sim_normal,
    "sim-dirichlet": cmd_sim_dirichlet,
    "entropy": cmd_entropy,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_VALIDATION
    if getattr(args, "threads", 1) < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[args.command](args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
