"""Command-line experiment runner.

Experiments are described by YAML config files with the sections ``model``,
``protocol``, ``task``, ``grid`` (when the task needs one), ``seed`` and
``output``. Bundled recipes live in ``seqsense/recipes`` and can be run by
name, e.g. ``seqsense run fig1``.

Every CSV starts with a ``#`` line carrying the schema version, master seed
and config hash; every JSON output has the same data under ``"meta"``. The
manifest additionally records package versions and wall time.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import logging
import platform
import sys
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy
import yaml

from . import __version__, bayes, checks, fisher, models, optimize, protocol
from .protocol import ProtocolSchedule

log = logging.getLogger("seqsense")

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_BUDGET = 4
EXIT_IO = 5

TASKS = ("fisher", "posterior", "covariance", "optimize-basis", "optimize-timing", "qubit-checks")
MODEL_TYPES = ("heisenberg", "jaynes_cummings", "qubit_toy")


class ConfigError(ValueError):
    pass


class SingularRunError(RuntimeError):
    pass


# --- configuration ------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """Validated experiment description.

    ``model.unknowns`` lists parameter labels in order and
    ``model.true_values`` their true values. Other model keys are constants.
    """

    model: dict
    protocol: dict
    task: dict
    grid: dict = field(default_factory=dict)
    seed: int = 0
    output: str = "runs/out"

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        if not isinstance(d, dict):
            raise ConfigError("config must be a mapping")
        extra = set(d) - {"model", "protocol", "task", "grid", "seed", "output"}
        if extra:
            raise ConfigError(f"unknown config sections: {sorted(extra)}")
        for key in ("model", "task"):
            if not d.get(key):
                raise ConfigError(f"the '{key}' section is missing or empty")
        cfg = cls(
            model=dict(d["model"]),
            protocol=dict(d.get("protocol") or {}),
            task=dict(d["task"]),
            grid=dict(d.get("grid") or {}),
            seed=d.get("seed", 0),
            output=str(d.get("output", "runs/out")),
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return {
            "model": copy.deepcopy(self.model),
            "protocol": copy.deepcopy(self.protocol),
            "task": copy.deepcopy(self.task),
            "grid": copy.deepcopy(self.grid),
            "seed": self.seed,
            "output": self.output,
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    def digest(self) -> str:
        """SHA-256 of the config without its output path."""
        d = self.to_dict()
        d.pop("output")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()

    def validate(self):
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed!r}")
        name = self.task.get("name")
        if name not in TASKS:
            raise ConfigError(f"unknown task {name!r}; expected one of {TASKS}")
        mtype = self.model.get("type")
        if mtype not in MODEL_TYPES:
            raise ConfigError(f"unknown model type {mtype!r}; expected one of {MODEL_TYPES}")
        if (name == "qubit-checks") != (mtype == "qubit_toy"):
            raise ConfigError("the qubit_toy model goes with the qubit-checks task and only with it")
        if mtype == "qubit_toy":
            return
        unknowns = self.model.get("unknowns")
        values = self.model.get("true_values")
        if not unknowns or values is None or len(unknowns) != len(values):
            raise ConfigError("model.unknowns and model.true_values must be non-empty lists of equal length")
        # building the model checks labels, k <= N and the Fock cutoff
        try:
            build_model(self.model, len(unknowns))
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(f"invalid model section: {exc}") from exc
        n_seq_values(self.protocol)
        if name in ("posterior", "covariance"):
            axes = self.grid.get("axes")
            if not axes or len(axes) != len(unknowns):
                raise ConfigError("grid.axes needs one [min, max, count] entry per unknown parameter")


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def recipe_names() -> list[str]:
    files = resources.files("seqsense").joinpath("recipes").iterdir()
    return sorted(f.name[:-5] for f in files if f.name.endswith(".yaml"))


def recipe_path(name: str):
    return resources.files("seqsense").joinpath("recipes", f"{name}.yaml")


def resolve_config(arg: str) -> ExperimentConfig:
    """A path to a YAML file, or the name of a bundled recipe."""
    if Path(arg).is_file():
        return load_config(arg)
    if arg in recipe_names():
        with resources.as_file(recipe_path(arg)) as p:
            return load_config(p)
    raise ConfigError(f"{arg!r} is neither a config file nor a bundled recipe ({', '.join(recipe_names())})")


# --- model and schedule construction --------------------------------------------

_MODEL_KEYS = {
    "heisenberg": {"n_sites", "j", "tau", "measured_site"},
    "jaynes_cummings": {"omega_a", "n_fock", "alpha", "measured_atom", "tau", *models.JC_LABELS},
}


def build_model(section: dict, k: int):
    """Model with the first ``k`` entries of ``unknowns`` as estimation parameters.

    For the chain, dropping trailing unknowns removes their fields. For the
    cavity model they are frozen at their listed true values.
    """
    mtype = section["type"]
    unknowns = list(section["unknowns"])
    values = [float(v) for v in section["true_values"]]
    consts = {key: v for key, v in section.items() if key not in ("type", "unknowns", "true_values")}
    bad = set(consts) - _MODEL_KEYS[mtype]
    if bad:
        raise models.ConfigurationError(f"unknown {mtype} constants: {sorted(bad)}")
    if not 1 <= k <= len(unknowns):
        raise models.ConfigurationError(f"k={k} outside 1..{len(unknowns)}")
    if mtype == "heisenberg":
        expected = [f"B{i + 1}" for i in range(len(unknowns))]
        if unknowns != expected:
            raise models.ConfigurationError(f"heisenberg unknowns must be {expected}, got {unknowns}")
        return models.heisenberg(int(consts["n_sites"]), j=float(consts.get("j", 1.0)), k=k,
                                 tau=consts.get("tau"), measured_site=consts.get("measured_site"))
    params = {lab: float(consts.get(lab, default)) for lab, default in zip(models.JC_LABELS, (0.9, 1.1, 0.1, 0.2))}
    params.update(zip(unknowns, values))
    return models.jaynes_cummings(
        omega_a=float(consts.get("omega_a", 1.0)),
        params=tuple(params[lab] for lab in models.JC_LABELS),
        unknown=tuple(unknowns[:k]),
        n_fock=int(consts.get("n_fock", 30)),
        alpha=complex(consts.get("alpha", 2.0)),
        measured_atom=int(consts.get("measured_atom", 0)),
        tau=consts.get("tau"),
    )


def n_seq_values(section: dict) -> list[int]:
    raw = section.get("n_seq", 1)
    vals = [raw] if isinstance(raw, int) else list(raw)
    if not vals or any(not isinstance(v, int) or v < 1 for v in vals):
        raise ConfigError(f"protocol.n_seq must be a positive integer or a list of them, got {raw!r}")
    return vals


def build_schedule(section: dict, model, n_seq: int) -> ProtocolSchedule:
    """Per-step ``taus``/``bases`` if given (truncated to ``n_seq``), else uniform defaults."""
    taus = section.get("taus")
    if taus is None:
        tau = section.get("tau", model.default_tau)
        taus = [tau] * n_seq
    bases = section.get("bases")
    if bases is None:
        bases = [[0.0, 0.0]] * n_seq
    if len(taus) < n_seq or len(bases) < n_seq:
        raise ConfigError(f"protocol lists fewer than n_seq={n_seq} steps")
    try:
        return ProtocolSchedule(tuple(taus[:n_seq]), protocol.bases_from_angles(bases[:n_seq]))
    except ValueError as exc:
        raise ConfigError(f"invalid protocol: {exc}") from exc


# --- output helpers -------------------------------------------------------------------

def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


class Writer:
    """Writes output files that all carry the seed and config hash."""

    def __init__(self, out_dir: Path, cfg: ExperimentConfig):
        self.out_dir = out_dir
        self.meta = {"schema_version": SCHEMA_VERSION, "seed": cfg.seed, "config_sha256": cfg.digest()}
        self.files: list[str] = []

    def header(self) -> str:
        m = self.meta
        return f"# seqsense schema={m['schema_version']} seed={m['seed']} config_sha256={m['config_sha256']}\n"

    def _write(self, name: str, text: str):
        (self.out_dir / name).write_text(text)
        self.files.append(name)

    def csv(self, name: str, columns, rows):
        buf = io.StringIO()
        buf.write(self.header())
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
        self._write(name, buf.getvalue())

    def raw_csv(self, name: str, text: str):
        self._write(name, text)

    def json(self, name: str, payload: dict):
        self._write(name, json.dumps({"meta": self.meta, **payload}, indent=2, sort_keys=True) + "\n")


def _finite_or_none(x):
    return float(x) if np.isfinite(x) else None


# --- tasks ---------------------------------------------------------------------------------

def task_fisher(cfg: ExperimentConfig, w: Writer, opts):
    task = cfg.task
    n_max = max(n_seq_values(cfg.protocol))
    ns = n_seq_values(cfg.protocol)
    ks = task.get("sweep_k") or [len(cfg.model["unknowns"])]
    on_singular = task.get("on_singular", "report")
    if on_singular not in ("report", "error"):
        raise ConfigError("task.on_singular must be 'report' or 'error'")
    delta = float(task.get("delta", fisher.DEFAULT_DELTA))
    step_check = bool(task.get("step_check", True))
    rows, entries, singular_hits = [], [], []
    for k in ks:
        try:
            model = build_model(cfg.model, int(k))
        except models.ConfigurationError as exc:
            raise ConfigError(str(exc)) from exc
        values = [float(v) for v in cfg.model["true_values"][:k]]
        sched = build_schedule(cfg.protocol, model, n_max)
        prefixes = fisher.model_cfi_prefixes(model, values, sched, delta, step_check)
        for n in ns:
            f = prefixes[n - 1]
            rep = fisher.singularity_report(f)
            trace = fisher.scalar_bound(f)
            if rep.singular:
                singular_hits.append((k, n))
            rows.append([k, n, 2 ** n, rep.rank, rep.singular, rep.outcome_condition_met,
                         "SINGULAR" if rep.singular else trace, fisher.pseudo_trace_inverse(f),
                         f.vanishing_outcome_info, "" if f.fd_step_change is None else f.fd_step_change])
            entries.append({"k": k, "n_seq": n, "schedule": sched.prefix(n).to_dict(),
                            "fisher": f.to_json_dict(), "report": rep.to_json_dict(),
                            "trace_inverse": _finite_or_none(trace)})
            log.info("k=%d n_seq=%d rank=%d Tr[F^-1]=%s", k, n, rep.rank, "SINGULAR" if rep.singular else f"{trace:.6g}")
    w.csv("fisher.csv", ["k", "n_seq", "outcomes", "rank", "singular", "outcome_condition_met",
                         "trace_inverse", "pseudo_trace_inverse", "vanishing_outcome_info", "fd_step_change"], rows)
    w.json("fisher.json", {"entries": entries})
    if on_singular == "error" and singular_hits:
        raise SingularRunError(f"singular Fisher matrix at (k, n_seq) = {singular_hits} and on_singular=error")


def _grid_for(cfg: ExperimentConfig, model) -> bayes.ParameterGrid:
    try:
        return bayes.ParameterGrid(tuple(tuple(a) for a in cfg.grid["axes"]), model.labels)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc


def task_posterior(cfg: ExperimentConfig, w: Writer, opts):
    """Posterior maps from one simulated record per (n_seq, M).

    The record for ``(n_seq, M)`` is drawn with ``default_rng([seed, n_seq, M])``.
    """
    model = build_model(cfg.model, len(cfg.model["unknowns"]))
    truth = np.array(cfg.model["true_values"], dtype=float)
    grid = _grid_for(cfg, model)
    mass = float(cfg.task.get("credible_mass", 0.95))
    summary_rows, entries = [], []
    for n in n_seq_values(cfg.protocol):
        sched = build_schedule(cfg.protocol, model, n)
        table = bayes.distribution_table(model, sched, grid, opts.threads)
        dist = protocol.trajectory_distribution(model, truth, sched)
        for m in cfg.task.get("m_values", [1000]):
            rec = protocol.sample_record(dist, int(m), rng=np.random.default_rng([cfg.seed, n, int(m)]))
            post = bayes.posterior_from_table(table, grid, rec)
            est = bayes.map_estimate(post)
            region = bayes.credible_region(post, mass)
            cell_err = np.abs(np.array(est.values.values) - truth) / grid.spacing
            w.raw_csv(f"posterior_n{n}_M{m}.csv", post.to_csv(w.header()))
            summary_rows.append([n, m, *est.values.values, est.tie, region.cells, region.area,
                                 *region.extent(grid), float(cell_err.max())])
            entries.append({"n_seq": n, "m": int(m), "record": rec.to_json_dict(),
                            "map": list(est.values.values), "map_tie": est.tie,
                            "credible_cells": region.cells, "credible_area": region.area,
                            "credible_extent": region.extent(grid).tolist(),
                            "map_error_cells": float(cell_err.max())})
    labels = list(model.labels)
    w.csv("posterior_summary.csv", ["n_seq", "m", *[f"map_{x}" for x in labels], "map_tie", "credible_cells",
                                    "credible_area", *[f"extent_{x}" for x in labels], "map_error_cells"],
          summary_rows)
    w.json("posterior_summary.json", {"labels": labels, "true_values": truth.tolist(),
                                      "credible_mass": mass, "entries": entries})


def loglog_slope(ms, traces) -> float:
    """Least-squares slope of ``log Tr(Cov)`` against ``log M``; ``nan`` if any trace is zero."""
    t = np.asarray(traces, dtype=float)
    if np.any(t <= 0):
        return float("nan")
    return float(np.polyfit(np.log(np.asarray(ms, dtype=float)), np.log(t), 1)[0])


def task_covariance(cfg: ExperimentConfig, w: Writer, opts):
    model = build_model(cfg.model, len(cfg.model["unknowns"]))
    truth = np.array(cfg.model["true_values"], dtype=float)
    grid = _grid_for(cfg, model)
    mu = int(cfg.task.get("mu", 100))
    ms = [int(m) for m in cfg.task.get("m_values", [100, 1000, 10000])]
    rows, entries, slopes = [], [], {}
    for n in n_seq_values(cfg.protocol):
        sched = build_schedule(cfg.protocol, model, n)
        table = bayes.distribution_table(model, sched, grid, opts.threads)
        traces = []
        for m in ms:
            rep = bayes.covariance_experiment(model, truth, sched, grid, m, mu, cfg.seed, table=table)
            traces.append(rep.trace_cov)
            rows.append([n, m, mu, rep.trace_cov])
            entries.append({"n_seq": n, **rep.to_json_dict()})
            log.info("n_seq=%d M=%d Tr(Cov)=%.4g", n, m, rep.trace_cov)
        slopes[str(n)] = loglog_slope(ms, traces)
    w.csv("covariance.csv", ["n_seq", "m", "mu", "trace_cov"], rows)
    w.json("covariance.json", {"labels": list(model.labels), "true_values": truth.tolist(),
                               "loglog_slopes": {n: _finite_or_none(s) for n, s in slopes.items()},
                               "entries": entries})


def task_optimize_basis(cfg: ExperimentConfig, w: Writer, opts):
    task = cfg.task
    model = build_model(cfg.model, len(cfg.model["unknowns"]))
    values = [float(v) for v in cfg.model["true_values"]]
    budget = opts.budget if opts.budget is not None else int(task.get("budget", optimize.DEFAULT_BUDGET))
    spec = optimize.SearchSpec(samples_per_angle=int(task.get("samples_per_angle", 7)), budget=budget)
    methods = task.get("methods", ["baseline", "greedy", "grid"])
    skip = bool(task.get("skip_over_budget", False))
    tau = cfg.protocol.get("tau")
    rows, entries = [], []
    for n in n_seq_values(cfg.protocol):
        for method in methods:
            status, result = "ok", None
            if method == "baseline":
                sched = ProtocolSchedule.uniform(model.default_tau if tau is None else tau, n)
                obj = optimize.schedule_objective(model, values, sched, spec.delta)
                result = optimize.SearchResult(sched, obj, 1, obj)
            elif method == "greedy":
                if n < 2:
                    status = "not_applicable"
                else:
                    result = optimize.greedy_search_bases(model, values, n, spec, tau)
            elif method == "grid":
                try:
                    result = optimize.grid_search_bases(model, values, n, spec, tau)
                except optimize.BudgetError:
                    if not skip:
                        raise
                    status = "over_budget"
            else:
                raise ConfigError(f"unknown optimisation method {method!r}")
            obj = result.best_objective if result is not None else float("nan")
            shown = "SINGULAR" if result is not None and not result.finite else obj
            rows.append([n, method, status, shown, result.evaluations if result else 0])
            entries.append({"n_seq": n, "method": method, "status": status,
                            "result": None if result is None else result.to_json_dict()})
            log.info("n_seq=%d %s: %s", n, method, status if result is None else f"{obj:.6g}")
    w.csv("optimize_basis.csv", ["n_seq", "method", "status", "objective", "evaluations"], rows)
    w.json("optimize_basis.json", {"budget": budget, "samples_per_angle": spec.samples_per_angle,
                                   "entries": entries})


def task_optimize_timing(cfg: ExperimentConfig, w: Writer, opts):
    task = cfg.task
    model = build_model(cfg.model, len(cfg.model["unknowns"]))
    values = [float(v) for v in cfg.model["true_values"]]
    res = optimize.timing_landscape(model, values, float(task["total_time"]), int(task.get("points", 60)))
    w.raw_csv("timing_landscape.csv", res.landscape_csv(w.header()))
    w.json("timing.json", {**res.to_json_dict(), "total_time": float(task["total_time"]),
                           "points": int(task.get("points", 60)),
                           "feasible_points": int(np.isfinite(res.landscape).sum())})


def task_qubit_checks(cfg: ExperimentConfig, w: Writer, opts):
    res = checks.qubit_checks(cfg.seed, int(cfg.task.get("n_random", 100)), int(cfg.task.get("n_projective", 1000)))
    w.csv("qubit_checks.csv", ["check", "passed", "detail"], [[r.name, r.passed, r.detail] for r in res])
    w.json("qubit_checks.json", {"checks": [r.to_json_dict() for r in res]})
    return all(r.passed for r in res)


TASK_RUNNERS = {
    "fisher": task_fisher,
    "posterior": task_posterior,
    "covariance": task_covariance,
    "optimize-basis": task_optimize_basis,
    "optimize-timing": task_optimize_timing,
    "qubit-checks": task_qubit_checks,
}


def run(cfg: ExperimentConfig, out_dir: Path, threads: int = 1, budget: int | None = None) -> int:
    """Execute ``cfg`` and write outputs plus ``manifest.json`` into ``out_dir``."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        probe = out_dir / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        log.error("output directory %s is not writable: %s", out_dir, exc)
        return EXIT_IO
    writer = Writer(out_dir, cfg)
    opts = argparse.Namespace(threads=threads, budget=budget)
    start = time.perf_counter()
    status = EXIT_OK
    try:
        ok = TASK_RUNNERS[cfg.task["name"]](cfg, writer, opts)
        if ok is False:
            status = EXIT_CHECK_FAILED
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except SingularRunError as exc:
        log.error("%s", exc)
        status = EXIT_SINGULAR
    except optimize.BudgetError as exc:
        log.error("budget exceeded: %s", exc)
        return EXIT_BUDGET
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "config_sha256": cfg.digest(),
        "config": cfg.to_dict(),
        "outputs": writer.files,
        "exit_status": status,
        "versions": {"seqsense": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
                     "pyyaml": yaml.__version__, "python": platform.python_version()},
        "threads": threads,
        "wall_time_s": round(time.perf_counter() - start, 3),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return status


# --- entry point ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqsense",
        description="Multi-parameter sensing with sequential measurements: experiment runner.",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="examples:\n  seqsense list-recipes\n  seqsense run fig1 --out runs/fig1\n"
               "  seqsense run my.yaml --seed 7 --threads 4\n  seqsense verify",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a config file or bundled recipe")
    p_run.add_argument("config", help="path to a YAML config, or a recipe name")
    p_run.add_argument("--seed", type=int, default=None, help="override the config's master seed")
    p_run.add_argument("--out", default=None, help="output directory (default: the config's 'output')")
    p_run.add_argument("--threads", type=int, default=1, help="worker threads for grid tables (default 1)")
    p_run.add_argument("--budget", type=int, default=None,
                       help="candidate cap for exhaustive basis search (overrides the config)")

    p_ver = sub.add_parser("verify", help="run the fast self-checks")
    p_ver.add_argument("--seed", type=int, default=0, help="seed for the random check points (default 0)")
    p_ver.add_argument("--out", default=None, help="also write verify.json here")
    p_ver.add_argument("--rank-rtol", type=float, default=fisher.RANK_RTOL, help=argparse.SUPPRESS)

    sub.add_parser("list-recipes", help="list bundled recipe names")
    return parser


def cmd_verify(args) -> int:
    results = checks.verify_all(args.seed, rank_rtol=args.rank_rtol)
    for r in results:
        print(r.line())
    passed = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    if args.out:
        try:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            payload = {"meta": {"schema_version": SCHEMA_VERSION, "seed": args.seed},
                       "checks": [r.to_json_dict() for r in results], "passed": passed}
            (out / "verify.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        except OSError as exc:
            log.error("cannot write verify report: %s", exc)
            return EXIT_IO
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.command == "list-recipes":
        for name in recipe_names():
            print(name)
        return EXIT_OK
    if args.command == "verify":
        return cmd_verify(args)
    try:
        cfg = resolve_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.validate()
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    out_dir = Path(args.out if args.out is not None else cfg.output)
    return run(cfg, out_dir, args.threads, args.budget)


if __name__ == "__main__":
    sys.exit(main())
