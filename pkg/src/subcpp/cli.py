"""Command line entry point: ``subcpp <command> CONFIG [-o OUT] [--seed N] [-v]``.

Commands: inspect, adjustment, zhist, ruin, sweep, trajectory. Every command
reads one YAML config; flags only choose the output path, override the
seed and set verbosity.

Exit codes: 0 success, 2 config error, 3 math precondition error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .errors import (
    ConfigError,
    HeavyTailError,
    InfiniteActivityError,
    InvariantViolation,
    NotNormalizableError,
    NotNormalizedError,
    PreconditionError,
    SubCPPError,
)
from .ruin import (
    adjustment_curves,
    cl_asymptotic_ruin,
    karamata_ruin_asymptotic,
    regular_variation_of,
    solve_adjustment,
)
from .subordinator import CompoundPoissonJumps
from .simulation import mc_ruin, pk_exact_ruin, tail_horizon_sweep, trajectory
from .tabular import format_csv, format_json, write_text_atomic

logger = logging.getLogger("subcpp")

EXIT_OK, EXIT_CONFIG, EXIT_MATH, EXIT_INTERNAL = 0, 2, 3, 4

RUIN_COLUMNS = ["method", "capital", "estimate", "std_error", "n_paths", "horizon", "seed", "status"]
SWEEP_COLUMNS = ["u", "estimate", "std_error", "n_paths", "horizon", "seed"]


class Outputs:
    """Collects every file of a command and writes them only after success."""

    def __init__(self, out: str | None):
        self.out = out
        self.files: list[tuple[Path, str]] = []
        self.stdout: list[str] = []

    def main(self, text: str) -> None:
        if self.out is None:
            self.stdout.append(text)
        else:
            self.files.append((Path(self.out), text))

    def sibling(self, suffix: str, text: str) -> None:
        if self.out is not None:
            p = Path(self.out)
            self.files.append((p.with_name(p.stem + suffix), text))

    def note(self, text: str) -> None:
        # human-readable summary; goes to stderr when stdout carries data
        stream = sys.stderr if self.out is None else sys.stdout
        print(text, file=stream)

    def flush(self) -> None:
        for path, text in self.files:
            write_text_atomic(path, text)
        for text in self.stdout:
            sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_inspect(cfg: cfgmod.ExperimentConfig) -> dict:
    p = cfg.model.claims
    sub = p.sub
    report: dict = {
        "claim_rate": p.rate,
        "effective_rate": p.effective_rate,
        "expected_claims": p.expected_claims(),
        "premium_rate": cfg.model.premium_rate,
        "net_profit": cfg.model.net_profit(),
        "safety_margin": cfg.model.safety_margin,
    }
    w_single, w_cluster = p.z_mixture_weights()
    report["w_single"], report["w_cluster"] = w_single, w_cluster
    try:
        ok, dev = sub.check_time_normalized()
        report["normalization"] = {"ok": ok, "deviation": dev}
    except NotNormalizableError as exc:
        report["normalization"] = {"ok": False, "error": str(exc)}
    tail = p.classify_y_tail()
    report["tail"] = {"class": tail.label, "reason": tail.reason}
    report["mean_z"] = p.mean_z() if math.isfinite(p.expected_claims()) else math.inf
    rv = cfg.regular_variation
    if rv is None and sub.is_heavy_tailed():
        try:
            rv = regular_variation_of(sub)
        except PreconditionError:
            rv = None
    if rv is not None:
        report["regular_variation"] = {"index": -rv.index, "constant": rv.constant}
    return report


def _inspect_text(report: dict) -> str:
    lines = [
        f"effective rate psi(lambda): {report['effective_rate']:.6g} (base rate {report['claim_rate']:.6g})",
        f"mixture weights: single {report['w_single']:.6g}, cluster {report['w_cluster']:.6g}",
        f"time normalized: {report['normalization'].get('ok')}",
        f"tail class: {report['tail']['class']} ({report['tail']['reason']})",
        f"net profit condition: {report['net_profit']} (margin {report['safety_margin']:.6g})",
    ]
    if "regular_variation" in report:
        lines.append(f"regular variation index: {report['regular_variation']['index']:.6g}")
    return "\n".join(lines)


def cmd_adjustment(cfg: cfgmod.ExperimentConfig):
    sec = cfg.section("adjustment")
    lines = cfg.lines
    if "r_grid" not in sec:
        raise ConfigError("adjustment.r_grid", "missing required field", lines.get("adjustment"))
    r_grid = cfgmod.grid(sec["r_grid"], "adjustment.r_grid", lines)
    subs_obj = sec.get("subordinators")
    if subs_obj is None:
        subs = [cfg.model.claims.sub]
    else:
        if not isinstance(subs_obj, list):
            raise ConfigError("adjustment.subordinators", "must be a list", lines.get("adjustment.subordinators"))
        subs = [cfgmod.parse_subordinator(s, f"adjustment.subordinators[{i}]", lines) for i, s in enumerate(subs_obj)]
    base_cls = cfg.model.base_model().claims.classify_y_tail()
    if base_cls.heavy:
        raise HeavyTailError(f"adjustment curves need light-tailed claims ({base_cls.reason})")
    columns, rows, roots = adjustment_curves(cfg.model, subs, r_grid)
    base_root = roots[0][1]
    root_rows = []
    for (label, res, err), sub in zip(roots, [None] + subs):
        normalized = True if sub is None else _normalized(sub)
        if res is not None and base_root is not None and normalized and res.coefficient > base_root.coefficient + 1e-9:
            raise InvariantViolation(f"{label}: root {res.coefficient} exceeds the base root {base_root.coefficient}")
        root_rows.append(
            (
                label,
                _jump_rate(sub),
                None if res is None else res.coefficient,
                None if res is None else res.residual,
                None if res is None else res.asymptotic_prefactor,
                "ok" if err is None else f"error({err})",
            )
        )
    root_cols = ["model", "jump_rate", "root", "residual", "prefactor", "status"]
    return format_csv(columns, rows), format_csv(root_cols, root_rows), root_rows


def _jump_rate(sub):
    if sub is None or not isinstance(sub.jumps, CompoundPoissonJumps):
        return None
    return sub.jumps.rate


def _normalized(sub) -> bool:
    try:
        return sub.check_time_normalized()[0]
    except NotNormalizableError:
        return False


def cmd_zhist(cfg: cfgmod.ExperimentConfig):
    sec = cfg.sections.get("zhist") or {}
    r = cfgmod._Reader(cfg.lines)
    n = r.integer(sec, "n", "zhist", minimum=0, default=100_000)
    seed = cfg.require_seed()
    p = cfg.model.claims
    if not p.sub.finite_activity:
        raise InfiniteActivityError("zhist needs a finite-activity subordinator")
    rng = np.random.default_rng(seed)
    z = p.sample_z(rng, n) if n else np.empty(0)
    x = np.asarray(p.claim_law.sample(rng, n), dtype=float) if n else np.empty(0)
    summary: dict = {"n": n, "seed": seed}
    if n:
        levels = [0.5, 0.9, 0.99]
        summary["quantiles"] = {
            str(q): {"z": float(np.quantile(z, q)), "x": float(np.quantile(x, q))} for q in levels
        }
        summary["mean_z"] = float(z.mean())
        summary["mean_z_theory"] = p.mean_z()
    return format_csv(["z", "x"], zip(z.tolist(), x.tolist())), summary


def cmd_ruin(cfg: cfgmod.ExperimentConfig) -> list[tuple]:
    sec = cfg.section("ruin")
    r = cfgmod._Reader(cfg.lines)
    r.only(sec, ("capital", "horizon", "n_paths", "n_geom", "methods"), "ruin")
    if "capital" in sec:
        capital = cfgmod.grid(sec["capital"], "ruin.capital", cfg.lines)
    else:
        capital = np.array([cfg.model.capital])
    if np.any(capital < 0):
        r.fail("ruin.capital", "capital values must be >= 0")
    methods = sec.get("methods", ["mc", "pk", "cl", "karamata"])
    if not isinstance(methods, list) or any(mm not in ("mc", "pk", "cl", "karamata") for mm in methods):
        r.fail("ruin.methods", "must be a list drawn from mc, pk, cl, karamata")
    horizon = r.number(sec, "horizon", "ruin", positive=True, default=1000.0)
    n_paths = r.integer(sec, "n_paths", "ruin", minimum=100, default=100_000)
    n_geom = r.integer(sec, "n_geom", "ruin", minimum=1, default=1_000_000)
    seed = cfg.require_seed() if ("mc" in methods or "pk" in methods) else cfg.seed
    model = cfg.model
    rows: list[tuple] = []

    if "mc" in methods:
        for u in capital:
            est = mc_ruin(model.with_capital(float(u)), horizon, n_paths, seed, workers=cfg.workers)
            rows.append(("mc", float(u), est.point, est.std_error, n_paths, horizon, seed, "ok"))
    if "pk" in methods:
        try:
            ests = pk_exact_ruin(model, n_geom, seed, capital=list(capital), workers=cfg.workers)
            for est in ests:
                rows.append(("pk", est.capital, est.point, est.std_error, n_geom, est.horizon, seed, "ok"))
        except PreconditionError as exc:
            rows += [("pk", float(u), None, None, None, math.inf, seed, f"error({type(exc).__name__})") for u in capital]
    if "cl" in methods:
        try:
            adj = solve_adjustment(model)
            for u in capital:
                rows.append(("cl", float(u), float(cl_asymptotic_ruin(model, adj, u)), None, None, math.inf, None, "ok"))
        except PreconditionError as exc:
            rows += [("cl", float(u), None, None, None, math.inf, None, f"skipped({_short(exc)})") for u in capital]
    if "karamata" in methods:
        try:
            if not model.claims.sub.is_heavy_tailed():
                raise PreconditionError("subordinator is light-tailed")
            spec = cfg.regular_variation or regular_variation_of(model.claims.sub)
            for u in capital:
                val = float(karamata_ruin_asymptotic(model, spec, u)) if u > 0 else None
                rows.append(("karamata", float(u), val, None, None, math.inf, None, "ok" if u > 0 else "skipped(ZeroCapital)"))
        except (PreconditionError, NotNormalizedError) as exc:
            rows += [("karamata", float(u), None, None, None, math.inf, None, f"skipped({_short(exc)})") for u in capital]
    return rows


def _short(exc: Exception) -> str:
    name = type(exc).__name__
    return "HeavyTail" if name == "HeavyTailError" else ("LightTail" if "light-tailed" in str(exc) else name)


def cmd_sweep(cfg: cfgmod.ExperimentConfig) -> list[tuple]:
    sec = cfg.section("sweep")
    r = cfgmod._Reader(cfg.lines)
    r.only(sec, ("capital", "horizon", "n_paths"), "sweep")
    if "capital" not in sec:
        r.fail("sweep.capital", "missing required field")
    u_grid = cfgmod.grid(sec["capital"], "sweep.capital", cfg.lines)
    if u_grid.size == 0 or np.any(np.diff(u_grid) <= 0) or np.any(u_grid < 0):
        r.fail("sweep.capital", "must be a nonempty strictly increasing grid of nonnegative values")
    horizon = r.number(sec, "horizon", "sweep", positive=True, default=1000.0)
    n_paths = r.integer(sec, "n_paths", "sweep", minimum=100, default=100_000)
    seed = cfg.require_seed()
    ests = tail_horizon_sweep(cfg.model, u_grid, horizon, n_paths, seed, workers=cfg.workers)
    return [(e.capital, e.point, e.std_error, e.n_paths, e.horizon, e.seed) for e in ests]


def cmd_trajectory(cfg: cfgmod.ExperimentConfig) -> list[tuple]:
    sec = cfg.sections.get("trajectory") or {}
    r = cfgmod._Reader(cfg.lines)
    horizon = r.number(sec, "horizon", "trajectory", positive=True, default=10.0)
    seed = cfg.require_seed()
    if not cfg.model.claims.sub.finite_activity:
        raise InfiniteActivityError("trajectory export needs a finite-activity subordinator")
    return trajectory(cfg.model, horizon, np.random.default_rng(seed))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subcpp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("inspect", "adjustment", "zhist", "ruin", "sweep", "trajectory"):
        sp = sub.add_parser(name)
        sp.add_argument("config", help="YAML experiment configuration")
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        sp.add_argument("--seed", type=int, help="override the config seed")
        sp.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    out = Outputs(args.output)
    try:
        cfg = cfgmod.load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed", "must be >= 0")
            cfg.seed = args.seed
        cmd = args.command
        if cmd == "inspect":
            report = cmd_inspect(cfg)
            out.main(format_json(report))
            if args.output is not None:
                out.note(_inspect_text(report))
        elif cmd == "adjustment":
            curve, roots_csv, root_rows = cmd_adjustment(cfg)
            out.main(curve)
            out.sibling(".roots.csv", roots_csv)
            for row in root_rows:
                out.note(f"{row[0]}: root {row[2]} {row[5]}")
        elif cmd == "zhist":
            data, summary = cmd_zhist(cfg)
            out.main(data)
            out.sibling(".summary.json", format_json(summary))
            out.note(format_json(summary).rstrip())
        elif cmd == "ruin":
            out.main(format_csv(RUIN_COLUMNS, cmd_ruin(cfg)))
        elif cmd == "sweep":
            out.main(format_csv(SWEEP_COLUMNS, cmd_sweep(cfg)))
        elif cmd == "trajectory":
            out.main(format_csv(["t", "surplus", "clock"], cmd_trajectory(cfg)))
        out.flush()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PreconditionError, InfiniteActivityError, NotNormalizableError, NotNormalizedError) as exc:
        print(f"precondition error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (InvariantViolation, SubCPPError) as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
