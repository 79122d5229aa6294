"""Command-line driver: ``run``, ``sweep``, ``mnist`` and ``oracle``.

Every command writes ``effective_config.ini`` (the resolved configuration)
next to its CSV outputs. Outputs depend only on the configuration and seed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import metrics, oracle
from .config import Config, ConfigError
from .controller import PrecisionSchedule, ScheduleError, run_parallel_pcm, run_pcm, validate_schedule
from .dataset_io import load_mnist, mnist_paths, synth_mnist_like
from .objectives import BoxDomain, HeavyTailed, SubGaussian, make_hinge, make_l1_quadratic, make_quadratic
from .rng import stream
from .routines import RwtRoutine, SgdRoutine
from .scd import ScdConfig, run_scd


@dataclass
class Problem:
    objective: object
    description: str


def build_objective(cfg: Config, seed: int, cache_dir: Path | None = None) -> Problem:
    o = cfg.objective
    if o.kind in ("quadratic", "l1_quadratic"):
        if o.dim < 1:
            raise ConfigError("[objective] dim must be positive")
        if not o.lo < o.hi:
            raise ConfigError("[objective] needs lo < hi")
        if o.noise == "gaussian":
            noise = SubGaussian(np.array([o.sigma])) if o.sigma > 0 else None
        elif o.noise == "heavy":
            noise = HeavyTailed(o.tail_b, o.noise_scale)
        elif o.noise == "none":
            noise = None
        else:
            raise ConfigError(f"[objective] unknown noise {o.noise!r}")
        dom = BoxDomain.cube(o.dim, o.lo, o.hi)
        c = np.full(o.dim, o.center)
        try:
            if o.kind == "quadratic":
                obj = make_quadratic(c, dom, o.curvature, noise, o.g_max)
            else:
                obj = make_l1_quadratic(c, dom, o.l1, o.curvature, noise, o.g_max)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return Problem(obj, f"{o.kind} d={o.dim}")
    if o.kind == "hinge":
        if not 0 <= o.digit <= 9:
            raise ConfigError(f"[objective] digit must lie in 0..9, got {o.digit}")
        source = o.data
        if source == "auto":
            source = "mnist" if mnist_paths(o.data_dir) is not None else "synth"
        if source == "mnist":
            ds = load_mnist(o.digit, o.limit, seed, o.data_dir)
        elif source == "synth":
            n = o.limit if o.limit is not None else o.synth_n
            ds = synth_mnist_like(n, o.digit, stream(seed, "data"))
        else:
            raise ConfigError(f"[objective] unknown data source {o.data!r}")
        obj = make_hinge(ds, o.reg, g_max=o.g_max)
        res = oracle.cached_hinge_minimizer(obj, cache_dir) if cache_dir is not None else oracle.hinge_dual(obj)
        return Problem(obj.with_minimizer(res.x), f"hinge {source} n={ds.n} digit={o.digit}")
    raise ConfigError(f"[objective] unknown kind {o.kind!r}")


def build_routine(cfg: Config, objective):
    r = cfg.routine
    if r.kind == "sgd":
        return SgdRoutine(r.constant_step, r.termination_scale, record_losses=False)
    if r.kind == "rwt":
        if objective.noise is None or isinstance(objective.noise, HeavyTailed):
            if r.sigma0 is None:
                raise ConfigError("[routine] rwt needs sub-Gaussian noise or an explicit sigma0")
        sigma0 = r.sigma0 if r.sigma0 is not None else objective.noise.spread()
        if not sigma0 > 0:
            raise ConfigError("[routine] rwt needs sigma0 > 0; set it explicitly for noiseless objectives")
        try:
            return RwtRoutine(sigma0, r.p_breve, r.max_depth, record_losses=False)
        except ValueError as exc:
            raise ConfigError(f"[routine] {exc}") from None
    raise ConfigError(f"[routine] unknown kind {r.kind!r}")


def initial_point(cfg: Config, objective, seed: int) -> np.ndarray:
    if cfg.run.init == "center":
        return objective.domain.center()
    if cfg.run.init == "random":
        x = stream(seed, "init").uniform(cfg.run.init_lo, cfg.run.init_hi, objective.dim)
        return objective.domain.project(x)
    raise ConfigError(f"[run] unknown init {cfg.run.init!r}")


def scd_config(cfg: Config) -> ScdConfig:
    s = cfg.scd
    try:
        return ScdConfig(kind=s.step, c1=s.c1, c2=s.c2, a=s.a, b=s.b)
    except ValueError as exc:
        raise ConfigError(f"[scd] {exc}") from None


def schedule_of(cfg: Config, objective) -> PrecisionSchedule:
    s = cfg.schedule
    v = validate_schedule(s.gamma, s.eps0, objective)
    if v is not None:
        raise ScheduleError(v)
    return PrecisionSchedule(s.eps0, s.gamma)


def execute(cfg: Config, problem: Problem, T: int, seed: int, algorithm: str | None = None):
    """One run of the configured (or named) algorithm."""
    obj = problem.objective
    name = algorithm or cfg.algorithm.name
    x0 = initial_point(cfg, obj, seed)
    if name == "scd":
        return run_scd(obj, scd_config(cfg), T, seed, x0=x0)
    if name != "pcm":
        raise ConfigError(f"[algorithm] unknown name {name!r}")
    schedule = schedule_of(cfg, obj)
    routine = build_routine(cfg, obj)
    mu0 = cfg.schedule.mu0
    a = cfg.algorithm
    if a.workers > 1:
        return run_parallel_pcm(
            obj, routine, schedule, T, seed, a.workers, mu0, x0, a.accounting, a.threads, record_iterates=False
        )
    return run_pcm(obj, routine, schedule, T, seed, mu0, x0, record_iterates=False)


def _prepare(args, base: Config) -> Config:
    cfg = cfgmod.load(args.config, base) if args.config else base
    if args.out_dir is not None:
        cfg.output.out_dir = args.out_dir
    if args.seed is not None:
        cfg.run.seed = args.seed
    if args.limit is not None:
        cfg.objective.limit = args.limit
    if args.digit is not None:
        cfg.objective.digit = args.digit
    if args.workers is not None:
        cfg.algorithm.workers = args.workers
    return cfg


def _out(cfg: Config) -> Path:
    out = Path(cfg.output.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "effective_config.ini").write_text(cfgmod.to_ini(cfg), encoding="utf-8")
    return out


def cmd_run(cfg: Config) -> int:
    out = _out(cfg)
    seed = cfg.run.seed
    problem = build_objective(cfg, seed, out)
    run = execute(cfg, problem, cfg.run.horizon, seed)
    series = metrics.pseudo_regret(run)
    if cfg.output.per_step:
        metrics.export_csv(run, out / "steps.csv")
    metrics.export_summary(
        [(cfg.run.horizon, seed, series.final, run.num_iterations, metrics.count_switches(run))], out / "summary.csv"
    )
    final_excess = run.iterate_values[-1] - run.f_star
    print(f"{run.algorithm} on {problem.description}: T={cfg.run.horizon} seed={seed}")
    print(f"K={run.num_iterations} switches={metrics.count_switches(run)}")
    print(f"final_excess={metrics.fmt(final_excess)} regret={metrics.fmt(series.final)}")
    return 0


def cmd_sweep(cfg: Config) -> int:
    grid, seeds = list(cfg.run.horizons), list(cfg.run.seeds)
    if len(seeds) < 5:
        raise ConfigError("[run] a sweep needs at least 5 seeds")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("[run] seeds must be distinct")
    out = _out(cfg)
    rows, per_T = [], {T: [] for T in grid}
    problem = build_objective(cfg, cfg.run.seed, out)
    for seed in seeds:
        for T in grid:
            run = execute(cfg, problem, T, seed)
            reg = metrics.pseudo_regret(run).final
            rows.append((T, seed, reg, run.num_iterations, metrics.count_switches(run)))
            per_T[T].append(reg)
    fit = metrics.fit_log_regret(grid, [float(np.mean(per_T[T])) for T in grid])
    metrics.export_summary(rows, out / "summary.csv")
    _write_pairs(out / "fit.csv", fit.rows())
    print(f"{len(rows)} runs; mean regret by horizon:")
    for T in grid:
        print(f"  T={T} R={metrics.fmt(np.mean(per_T[T]))}")
    for k, v in fit.rows():
        print(f"  {k}={v}")
    return 0


def _write_pairs(path: Path, pairs):
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("key,value\n")
        for k, v in pairs:
            fh.write(f"{k},{v}\n")


def cmd_mnist(cfg: Config) -> int:
    if cfg.objective.kind != "hinge":
        raise ConfigError("[objective] kind must be hinge for the classification experiment")
    out = _out(cfg)
    problem = build_objective(cfg, cfg.run.seed, out)
    T = cfg.run.horizon
    seeds = list(cfg.run.seeds)
    curves = {"pcm": [], "scd": []}
    rows = []
    for seed in seeds:
        pcm = execute(cfg, problem, T, seed, "pcm")
        scd = execute(cfg, problem, T, seed, "scd")
        rp, rs = metrics.pseudo_regret(pcm), metrics.pseudo_regret(scd)
        curves["pcm"].append(rp.values)
        curves["scd"].append(rs.values)
        rows.append((seed, rp.final, rs.final, pcm.num_iterations, scd.num_switches))
    grid = np.unique(np.linspace(1, T, num=min(T, 1000)).round().astype(np.int64))
    pm, ps = metrics.mean_and_se(np.array(curves["pcm"])[:, grid - 1])
    sm, ss = metrics.mean_and_se(np.array(curves["scd"])[:, grid - 1])
    with (out / "regret_curves.csv").open("w", encoding="utf-8", newline="") as fh:
        fh.write("t,pcm_regret,pcm_se,scd_regret,scd_se\n")
        for j, t in enumerate(grid):
            fh.write(f"{t},{metrics.fmt(pm[j])},{metrics.fmt(ps[j])},{metrics.fmt(sm[j])},{metrics.fmt(ss[j])}\n")
    with (out / "per_seed.csv").open("w", encoding="utf-8", newline="") as fh:
        fh.write("seed,pcm_final_regret,scd_final_regret,pcm_K,scd_switches\n")
        for seed, a, b, k, s in rows:
            fh.write(f"{seed},{metrics.fmt(a)},{metrics.fmt(b)},{k},{s}\n")
    wins = sum(a <= b for _, a, b, _, _ in rows)
    print(f"{problem.description}: T={T}, {len(seeds)} seeds")
    print(f"final regret  PCM {metrics.fmt(pm[-1])}  SCD {metrics.fmt(sm[-1])}")
    print(f"PCM at or below SCD in {wins} of {len(seeds)} seeds")
    return 0


def cmd_oracle(cfg: Config) -> int:
    out = _out(cfg)
    problem = build_objective(cfg, cfg.run.seed, None)
    obj = problem.objective
    try:
        res = oracle.solve(obj)
    except oracle.OracleError as exc:
        print(f"oracle failed: {exc}", file=sys.stderr)
        return 3
    extra = {"objective": problem.description}
    if obj.x_star is not None and cfg.objective.kind != "hinge":
        extra["closed_form_distance"] = float(np.linalg.norm(res.x - obj.x_star))
    oracle.save(res, out / "oracle.json", **extra)
    print(f"{problem.description}: f*={metrics.fmt(res.f)} optimality={res.optimality:.3g} ({res.method})")
    return 0


COMMANDS = {"run": cmd_run, "sweep": cmd_sweep, "mnist": cmd_mnist, "oracle": cmd_oracle}


def _digit(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"digit must be an integer, got {text!r}") from None
    if not 0 <= v <= 9:
        raise argparse.ArgumentTypeError(f"digit must lie in 0..9, got {v}")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pcm", description="Progressive coordinate minimization experiments")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "run": "one run; writes steps.csv and summary.csv",
        "sweep": "horizon x seed grid; writes summary.csv and fit.csv",
        "mnist": "PCM vs SCD on one-vs-rest hinge loss; writes regret_curves.csv",
        "oracle": "high-accuracy minimizer; writes oracle.json",
    }
    for name, text in helps.items():
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", help="INI file overriding the defaults")
        s.add_argument("--seed", type=int, help="master seed")
        s.add_argument("--out-dir", help="output directory")
        s.add_argument("--limit", type=_positive, help="keep this many records (uniform subsample)")
        s.add_argument("--digit", type=_digit, help="positive class for one-vs-rest labels")
        s.add_argument("--workers", type=_positive, help="parallel PCM workers")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    base = cfgmod.classification_defaults() if args.command == "mnist" else Config()
    try:
        cfg = _prepare(args, base)
        return COMMANDS[args.command](cfg)
    except ScheduleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
