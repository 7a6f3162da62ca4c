"""Command-line front end.

Subcommands cover the full workbench: dimension schedules, Monte Carlo
interval entropies with their dynamic-programming brackets, mutual
information sweeps, reduction-sequence bounds with argmin export, channel
singular spectra, rescaling collapses, and the isometry-moment self check.

Conventions shared by every command:

* all randomness flows from ``--seed`` (an integer; runs are reproducible
  byte for byte),
* ``--config FILE`` reads flat ``key = value`` lines (``#`` comments);
  explicit flags override the file, unknown keys are rejected,
* ``--out`` writes a UTF-8 CSV with a header row and RFC-4180 quoting, and
  a one-line summary always goes to stdout,
* entropic quantities are computed in nats and converted when
  ``--units bits`` is given,
* exit codes: 0 success, 2 usage problem, 3 feasibility limit.

The dense-simulation memory cap can be overridden through the
``RANDMERA_MAX_AMPLITUDES`` environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Callable

from . import cutbounds, simulator, spectra, svgplot
from .errors import FeasibilityError, UsageError
from .haar import (
    CANONICAL_CONTRACTIONS,
    MIXED_CONTRACTION,
    fourth_moment_exact,
    fourth_moment_mc,
    moment_constants,
)
from .network import Interval, MeraNetwork, Stage
from .schedule import memory_estimate, schedule_report, solve_schedule

__all__ = ["main"]


# ---------------------------------------------------------------------------
# option table / config merging
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Opt:
    flag: str
    type: Callable
    default: object
    help: str
    required: bool = False
    choices: tuple | None = None

    @property
    def dest(self) -> str:
        return self.flag.lstrip("-").replace("-", "_")


def _interval_arg(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected i:j, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from exc


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _spec_list(text: str) -> tuple[tuple[int, ...], ...]:
    out = []
    for tok in text.split(","):
        if not tok:
            continue
        parts = tok.split(":")
        if len(parts) not in (2, 3):
            raise argparse.ArgumentTypeError(f"expected dA:dB or dA:dB:dE, got {tok!r}")
        try:
            out.append(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"expected integers in {tok!r}") from exc
    if not out:
        raise argparse.ArgumentTypeError("empty spec list")
    return tuple(out)


_SEED = _Opt("--seed", int, 0, "master seed; all randomness derives from it")
_OUT = _Opt("--out", str, None, "write results to this CSV file")
_CONFIG = _Opt("--config", str, None, "flat key = value config file; flags override it")
_UNITS = _Opt("--units", str, "nats", "entropy units", choices=("nats", "bits"))
_LEAF = _Opt("--leaf-dim", int, 2, "leaf site dimension (>= 2)")
_EPS = _Opt("--epsilon", float, None, "per-scale contraction rate (> 0)", required=True)
_TRIALS = _Opt("--trials", int, 200, "number of Monte Carlo trials")
_SVG = _Opt("--svg", str, None, "also write a line plot to this SVG file")


def _cfg_commands() -> dict[str, dict]:
    return {
        "schedule": {
            "help": "solve the level-dimension recursion and report the schedule",
            "opts": [_LEAF, _EPS, _OUT, _SVG, _CONFIG],
        },
        "entropy": {
            "help": "Monte Carlo interval entropies with their DP bracket",
            "opts": [
                _LEAF,
                _EPS,
                _Opt("--interval", _interval_arg, None, "leaf interval i:j (inclusive, modular)", required=True),
                _TRIALS,
                _SEED,
                _UNITS,
                _OUT,
                _CONFIG,
            ],
        },
        "mutual-info": {
            "help": "mutual information of adjacent leaf intervals vs DP brackets",
            "opts": [
                _LEAF,
                _EPS,
                _Opt("--lengths", _int_list, (1, 2, 4), "comma-separated interval lengths"),
                _Opt("--offset", int, 0, "left interval start site"),
                _TRIALS,
                _SEED,
                _UNITS,
                _OUT,
                _CONFIG,
            ],
        },
        "cuts": {
            "help": "reduction-sequence bounds for one interval",
            "opts": [
                _LEAF,
                _EPS,
                _Opt("--interval", _interval_arg, None, "interval i:j on the chosen ring", required=True),
                _Opt("--level", int, None, "ring level (default: leaf level)"),
                _Opt("--stage", str, "after_W", "ring stage", choices=("after_W", "after_V")),
                _Opt("--emit-argmin", str, None, "write the argmin sequence to this JSON file"),
                _UNITS,
                _OUT,
                _CONFIG,
            ],
        },
        "spectra": {
            "help": "singular spectra of the random coarse-graining channel",
            "opts": [
                _Opt("--dA", int, None, "input dimension", required=True),
                _Opt("--dB", int, None, "kept output dimension", required=True),
                _Opt("--dE", int, None, "traced output dimension", required=True),
                _Opt("--seeds", int, 10, "number of independent draws"),
                _SEED,
                _OUT,
                _SVG,
                _CONFIG,
            ],
        },
        "collapse": {
            "help": "rescaled overlay of spectra across sizes",
            "opts": [
                _Opt("--mode", str, None, "rescaling mode", required=True, choices=("sqrt-d", "affine")),
                _Opt("--dims", _int_list, (), "sqrt-d mode: comma-separated d values (d_A=d_B=d_E=d)"),
                _Opt("--specs", _spec_list, (), "affine mode: dA:dB or dA:dB:dE list"),
                _Opt("--y", float, 0.5, "affine mode: ratio fixing d_E for dA:dB pairs"),
                _Opt("--shift", float, 0.706, "affine mode: subtracted constant"),
                _Opt("--alpha", float, 2.0 / 3.0, "affine mode: rescaling exponent"),
                _SEED,
                _OUT,
                _SVG,
                _CONFIG,
            ],
        },
        "moments-check": {
            "help": "Monte Carlo check of the isometry fourth-moment closed forms",
            "opts": [
                _Opt("--d1", int, None, "input dimension", required=True),
                _Opt("--d2", int, None, "output dimension", required=True),
                _Opt("--trials", int, 100_000, "number of sampled isometries"),
                _SEED,
                _OUT,
                _CONFIG,
            ],
        },
    }


_COMMANDS = _cfg_commands()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randmera",
        description="Workbench for random multiscale isometry networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for name, info in _COMMANDS.items():
        p = sub.add_parser(name, help=info["help"])
        for opt in info["opts"]:
            kwargs: dict = {
                "type": opt.type,
                "default": argparse.SUPPRESS,
                "help": opt.help,
            }
            if opt.choices:
                kwargs["choices"] = opt.choices
            p.add_argument(opt.flag, **kwargs)
    return parser


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{line_no}: expected key = value")
                key, val = line.split("=", 1)
                values[key.strip().replace("-", "_")] = val.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    return values


def _merge_options(command: str, explicit: dict) -> dict:
    opts = {o.dest: o for o in _COMMANDS[command]["opts"]}
    merged = {dest: o.default for dest, o in opts.items()}
    config_path = explicit.pop("config", None)
    if config_path is not None:
        for key, raw in _load_config(config_path).items():
            if key not in opts or key == "config":
                raise UsageError(f"unknown config key {key!r} for command {command!r}")
            opt = opts[key]
            try:
                value = opt.type(raw)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"bad config value for {key!r}: {exc}") from exc
            if opt.choices and value not in opt.choices:
                raise UsageError(f"config key {key!r} must be one of {opt.choices}")
            merged[key] = value
    merged.update(explicit)
    for dest, o in opts.items():
        if o.required and merged.get(dest) is None:
            raise UsageError(f"missing required option {o.flag} (flag or config)")
    return merged


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])


def _write_svg(path: str, series, title, x_label, y_label) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(svgplot.line_plot(series, title=title, x_label=x_label, y_label=y_label))


def _unit_factor(units: str) -> float:
    return 1.0 if units == "nats" else 1.0 / math.log(2.0)


def _network(args: dict) -> MeraNetwork:
    return MeraNetwork.build(args["leaf_dim"], args["epsilon"])


def _leaf_interval(network: MeraNetwork, ij: tuple[int, int]) -> Interval:
    n = network.n_leaves
    return Interval(
        level=network.levels, stage=Stage.AFTER_W, i=ij[0] % n, j=ij[1] % n, n_sites=n
    )


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_schedule(args: dict) -> int:
    sched = solve_schedule(args["leaf_dim"], args["epsilon"])
    rows = [list(row) for row in schedule_report(sched)]
    est = memory_estimate(sched)
    if args["out"]:
        _write_csv(args["out"], ["k", "D_k", "Dprime_k", "scale", "ratio"], rows)
    if args["svg"]:
        series = {"log D_k": [(k, math.log(d)) for k, d, _dv, _sc, _r in schedule_report(sched)]}
        _write_svg(args["svg"], series, "dimension schedule", "level", "log dim")
    print(
        f"schedule: levels={sched.levels} sites={sched.n_sites(sched.levels)} "
        f"leaf_dim={sched.leaf_dim} epsilon={sched.epsilon!r} peak_amplitudes={est.peak}"
    )
    return 0


def _cmd_entropy(args: dict) -> int:
    network = _network(args)
    interval = _leaf_interval(network, args["interval"])
    cap = simulator.max_amplitudes_from_env()
    stats = simulator.mc_entropy_stats(network, interval, args["trials"], args["seed"], cap)
    bounds = cutbounds.cut_dp(network, interval)
    f = _unit_factor(args["units"])
    if args["out"]:
        rows = [
            [t, f * float(s), f * float(s2)]
            for t, (s, s2) in enumerate(zip(stats.samples_s, stats.samples_s2))
        ]
        _write_csv(args["out"], ["trial", "entropy_vn", "entropy_renyi2"], rows)
    print(
        f"entropy[{args['interval'][0]}:{args['interval'][1]}] ({args['units']}): "
        f"mean_S={f * stats.mean_s:.6f} mean_S2={f * stats.mean_s2:.6f} "
        f"dp_upper={f * bounds.min_cost:.6f} dp_lse={f * bounds.lse:.6f} "
        f"dp_lower={f * max(0.0, bounds.lower_bound):.6f} trials={args['trials']}"
    )
    return 0


def _cmd_mutual_info(args: dict) -> int:
    network = _network(args)
    n = network.n_leaves
    level, stage = network.levels, Stage.AFTER_W
    pairs = []
    predictions = []
    for length in args["lengths"]:
        if not 1 <= length <= n // 2:
            raise UsageError(f"length {length} not in [1, {n // 2}]")
        left = Interval.of_length(level, stage, args["offset"] % n, length)
        right = Interval.of_length(level, stage, (args["offset"] + length) % n, length)
        pairs.append((left, right))
        predictions.append(cutbounds.mi_prediction(network, left, right))
    cap = simulator.max_amplitudes_from_env()
    mc = simulator.mc_mutual_information(network, pairs, args["trials"], args["seed"], cap)
    f = _unit_factor(args["units"])
    rows = []
    for length, pred, samples in zip(args["lengths"], predictions, mc):
        rows.append(
            [
                length,
                f * pred.i_lower,
                f * pred.i_upper,
                f * samples.mean,
                f * samples.stderr,
            ]
        )
    if args["out"]:
        _write_csv(args["out"], ["length", "i_lower", "i_upper", "mc_mean", "mc_stderr"], rows)
    last = rows[-1]
    print(
        f"mutual-info ({args['units']}): lengths={list(args['lengths'])} trials={args['trials']} "
        f"last: l={last[0]} bracket=[{last[1]:.6f}, {last[2]:.6f}] mc={last[3]:.6f}±{last[4]:.6f}"
    )
    return 0


def _cmd_cuts(args: dict) -> int:
    network = _network(args)
    level = args["level"] if args["level"] is not None else network.levels
    if not 1 <= level <= network.levels:
        raise UsageError(f"level {level} not in [1, {network.levels}]")
    n = network.n_sites(level)
    stage = Stage(args["stage"])
    interval = Interval(
        level=level, stage=stage, i=args["interval"][0] % n, j=args["interval"][1] % n, n_sites=n
    )
    bounds = cutbounds.cut_dp(network, interval)
    f = _unit_factor(args["units"])
    if args["emit_argmin"]:
        with open(args["emit_argmin"], "w", encoding="utf-8") as fh:
            json.dump(bounds.argmin.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args["out"]:
        _write_csv(
            args["out"],
            ["i", "j", "level", "stage", "min_cost", "lse", "lower_bound", "height_of_argmin"],
            [
                [
                    interval.i,
                    interval.j,
                    level,
                    stage.value,
                    f * bounds.min_cost,
                    f * bounds.lse,
                    f * bounds.lower_bound,
                    bounds.height_of_argmin,
                ]
            ],
        )
    print(
        f"cuts[{interval.i}:{interval.j}]@level {level} {stage.value} ({args['units']}): "
        f"min_cost={f * bounds.min_cost:.6f} lse={f * bounds.lse:.6f} "
        f"lower={f * max(0.0, bounds.lower_bound):.6f} height={bounds.height_of_argmin}"
    )
    return 0


def _cmd_spectra(args: dict) -> int:
    if args["seeds"] < 1:
        raise UsageError("--seeds must be positive")
    rows = []
    series = {}
    lam0, lam1, min_gap = [], [], math.inf
    for idx in range(args["seeds"]):
        spec = spectra.SuperOperatorSpec(
            d_A=args["dA"], d_B=args["dB"], d_E=args["dE"], seed=args["seed"] + idx
        )
        values = spectra.singular_spectrum(spec).values
        lam0.append(float(values[0]))
        lam1.append(float(values[1]))
        min_gap = min(min_gap, float(values[0] - values[1]))
        rows.extend([spec.label, spec.seed, i, float(v)] for i, v in enumerate(values))
        series[f"seed {spec.seed}"] = [(i, float(v)) for i, v in enumerate(values)]
    if args["out"]:
        _write_csv(args["out"], ["spec", "seed", "i", "lambda"], rows)
    if args["svg"]:
        _write_svg(args["svg"], series, "singular spectra", "i", "lambda(i)")
    print(
        f"spectra {args['dA']}:{args['dB']}:{args['dE']} over {args['seeds']} seeds: "
        f"mean_lambda0={sum(lam0) / len(lam0):.6f} mean_lambda1={sum(lam1) / len(lam1):.6f} "
        f"min_gap={min_gap:.6f}"
    )
    return 0


def _cmd_collapse(args: dict) -> int:
    mode = args["mode"].replace("-", "_")
    specs = []
    if mode == "sqrt_d":
        if not args["dims"]:
            raise UsageError("sqrt-d mode needs --dims")
        for idx, d in enumerate(args["dims"]):
            specs.append(spectra.SuperOperatorSpec(d_A=d, d_B=d, d_E=d, seed=args["seed"] + idx))
    else:
        if not args["specs"]:
            raise UsageError("affine mode needs --specs")
        for idx, parts in enumerate(args["specs"]):
            if len(parts) == 2:
                d_a, d_b = parts
                d_e = round(d_a / (args["y"] * d_b))
            else:
                d_a, d_b, d_e = parts
            specs.append(spectra.SuperOperatorSpec(d_A=d_a, d_B=d_b, d_E=d_e, seed=args["seed"] + idx))
    rows = spectra.collapse_experiment(specs, mode, shift=args["shift"], alpha=args["alpha"])
    if args["out"]:
        _write_csv(
            args["out"],
            ["spec", "i", "x", "y"],
            [[r.label, r.index, r.x, r.y] for r in rows],
        )
    if args["svg"]:
        series: dict[str, list[tuple[float, float]]] = {}
        for r in rows:
            series.setdefault(r.label, []).append((r.x, r.y))
        _write_svg(args["svg"], series, f"collapse ({args['mode']})", "i / d_B^2", "rescaled lambda")
    first = {}
    for r in rows:
        first.setdefault(r.label, r.y)
    summary = " ".join(f"{label}:y(1)={y:.4f}" for label, y in first.items())
    print(f"collapse mode={args['mode']} curves={len(first)} {summary}")
    return 0


def _cmd_moments_check(args: dict) -> int:
    d1, d2 = args["d1"], args["d2"]
    constants = moment_constants(d1, d2)
    rows = []
    worst = 0.0
    patterns = {**CANONICAL_CONTRACTIONS, "mixed": MIXED_CONTRACTION}
    for idx, (name, contraction) in enumerate(patterns.items()):
        exact = fourth_moment_exact(d1, d2, contraction)
        est = fourth_moment_mc(d1, d2, contraction, args["trials"], (args["seed"], idx))
        dev = abs(est.value - exact)
        ok = dev <= 4.0 * est.stderr + 1e-9
        if est.stderr > 1e-12:
            worst = max(worst, dev / est.stderr)
        rows.append([name, exact, est.value, est.stderr, dev, ok])
    if args["out"]:
        _write_csv(
            args["out"],
            ["contraction", "closed_form", "mc_mean", "mc_stderr", "abs_dev", "within_4se"],
            rows,
        )
    all_ok = all(r[5] for r in rows)
    print(
        f"moments-check d1={d1} d2={d2} trials={args['trials']}: c={constants.c!r} "
        f"c_prime={constants.c_prime!r} max_sigma={worst:.3f} all_within_4se={all_ok}"
    )
    return 0 if all_ok else 1


_DISPATCH = {
    "schedule": _cmd_schedule,
    "entropy": _cmd_entropy,
    "mutual-info": _cmd_mutual_info,
    "cuts": _cmd_cuts,
    "spectra": _cmd_spectra,
    "collapse": _cmd_collapse,
    "moments-check": _cmd_moments_check,
}


def main(argv=None) -> int:
    parser = _build_parser()
    ns = parser.parse_args(argv)
    command = ns.command
    explicit = {k: v for k, v in vars(ns).items() if k != "command"}
    try:
        args = _merge_options(command, explicit)
        return _DISPATCH[command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FeasibilityError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
