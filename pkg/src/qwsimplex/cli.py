"""``qwsim`` command line.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import classical, ctqw, dtqw, experiments, multistep, verify
from .records import RunRecord

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class ExperimentConfig:
    command: str
    M: int | None = None
    m_list: tuple[int, ...] | None = None
    coin: str = "skw"
    gamma_mode: str = "approx"
    k: int | None = None
    n: int = 0
    steps: int | None = None
    t_max: float | None = None
    dt: float = 0.01
    trials: int = 1000
    seed: int = 0
    steps_per_query: int = 1
    out: str | None = None
    format: str = "csv"
    max_m_fullspace: int = 16
    target: str | None = None
    metric: str = "peak"
    profile: str = "default"

    def validate(self):
        if self.M is not None and (self.M < 2 or (self.command == "multistep" and self.M < 3)):
            raise UsageError(f"--m too small for {self.command}: {self.M}")
        if self.m_list is not None and any(m < 2 for m in self.m_list):
            raise UsageError("--m-list entries must be >= 2")
        for name in ("steps", "trials", "steps_per_query", "k"):
            v = getattr(self, name)
            if v is not None and v < (0 if name == "steps" else 1):
                raise UsageError(f"--{name.replace('_', '-')} out of range: {v}")
        if self.n < 0:
            raise UsageError("--n must be >= 0")
        if not self.dt > 0 or (self.t_max is not None and self.t_max < 0):
            raise UsageError("--dt must be > 0 and --t-max >= 0")
        try:
            experiments.gamma_for(2, self.gamma_mode)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        return self

    def header(self) -> dict:
        """The config fields this command reads, for the output header."""
        d = asdict(self)
        return {f"cfg_{k}": d[k] for k in _HEADER_FIELDS[self.command] if d[k] is not None}


_HEADER_FIELDS = {
    "dtqw": ("command", "M", "coin", "steps"),
    "ctqw": ("command", "M", "gamma_mode", "t_max", "dt"),
    "multistep": ("command", "M", "k", "n", "steps"),
    "classical": ("command", "M", "steps_per_query", "trials", "seed", "steps"),
}


def _m_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--m", dest="M", type=int)
    common.add_argument("--m-list", type=_m_list)
    common.add_argument("--coin", choices=("flip", "skw"), default="skw")
    common.add_argument("--gamma-mode", default="approx", help="exact | approx | value:<x>")
    common.add_argument("--k", type=int)
    common.add_argument("--n", type=int, default=0)
    common.add_argument("--steps", type=int)
    common.add_argument("--t-max", type=float)
    common.add_argument("--dt", type=float, default=0.01)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--steps-per-query", type=int, default=1)
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--max-m-fullspace", type=int, default=16)

    parser = _Parser(prog="qwsim", description="Quantum-walk search on the simplex of complete graphs.")
    parser.add_argument("--version", action="version", version=f"qwsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("dtqw", parents=[common], help="coined walk, 6D subspace (--steps, default 1000)")
    sub.add_parser("ctqw", parents=[common], help="continuous-time walk, 3D subspace (--t-max, default 50)")
    sub.add_parser("multistep", parents=[common], help="U0^k R_w; --steps counts oracle queries (default 40)")
    sub.add_parser("classical", parents=[common], help="Monte Carlo queries-to-find distribution")
    fig = sub.add_parser("figure", parents=[common], help="reproduce a figure's curves into --out (a directory)")
    fig.add_argument("target", choices=experiments.FIGURE_IDS)
    sc = sub.add_parser("scaling", parents=[common], help="query counts over --m-list and fitted exponent")
    sc.add_argument("target", choices=experiments.SCALING_KINDS + ("all",))
    sc.add_argument("--metric", choices=experiments.QUANTUM_METRICS, default="peak",
                    help="quantum query count: first-period peak or first p >= 0.5")
    ver = sub.add_parser("verify", parents=[common], help="closed forms and reductions vs numerical oracles")
    ver.add_argument("--profile", choices=sorted(verify.PROFILES), default="default")
    return parser


def _emit(text: str, out: str | None, stdout) -> None:
    if out is None:
        stdout.write(text)
        return
    path = Path(out)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _record_text(rec: RunRecord, fmt: str) -> str:
    return rec.to_json() if fmt == "json" else rec.to_csv()


def _need_m(cfg: ExperimentConfig) -> int:
    if cfg.M is None:
        raise UsageError(f"{cfg.command} needs --m")
    return cfg.M


def classical_record(M: int, k: int, trials: int, seed: int, max_queries: int | None = None) -> RunRecord:
    """Empirical probability of having found a marked vertex within q queries."""
    results = classical.monte_carlo_trials(M, k, trials, seed)
    summary = classical.summarize(results, M, k, seed)
    q = np.array([r.queries_used for r in results])
    top = int(q.max()) if max_queries is None else max_queries
    grid = np.arange(top + 1)
    cdf = np.searchsorted(np.sort(q), grid, side="right") / trials
    meta = {
        "module": "classical",
        "M": M,
        "steps_per_query": k,
        "trials": trials,
        "seed": seed,
        "mean_queries": summary.mean_queries,
        "stderr_queries": summary.stderr_queries,
        "mean_steps": summary.mean_steps,
        "exact_mean_steps": classical.expected_steps_uniform_unmarked(M),
    }
    # the q-th query (q >= 1) is made after (q-1)*k walk steps
    return RunRecord(grid, cdf, np.maximum(grid - 1, 0) * k, grid, meta)


def _run(cfg: ExperimentConfig, stdout) -> int:
    cmd = cfg.command
    if cmd == "dtqw":
        rec = dtqw.evolve_dtqw(_need_m(cfg), cfg.coin, 1000 if cfg.steps is None else cfg.steps)
    elif cmd == "ctqw":
        M = _need_m(cfg)
        params = ctqw.CtqwParams(M, experiments.gamma_for(M, cfg.gamma_mode),
                                 50.0 if cfg.t_max is None else cfg.t_max, cfg.dt)
        rec = ctqw.evolve_ctqw(params)
        rec.metadata["gamma_mode"] = cfg.gamma_mode
    elif cmd == "multistep":
        params = multistep.MultistepParams(_need_m(cfg), 40 if cfg.steps is None else cfg.steps, cfg.n, cfg.k)
        rec = multistep.run_multistep(params)
    elif cmd == "classical":
        rec = classical_record(_need_m(cfg), cfg.steps_per_query, cfg.trials, cfg.seed, cfg.steps)
    elif cmd == "figure":
        # --steps is walk steps for fig2 and oracle queries for fig4
        paths = experiments.run_figure(cfg.target, cfg.out or "figures", cfg.m_list, cfg.format,
                                       steps=cfg.steps, queries=cfg.steps, t_max=cfg.t_max, dt=cfg.dt,
                                       gamma_mode=cfg.gamma_mode)
        for p in paths:
            stdout.write(f"{p}\n")
        return EXIT_OK
    elif cmd == "scaling":
        return _run_scaling(cfg, stdout)
    else:
        report = verify.verify_all(cfg.max_m_fullspace, cfg.profile)
        text = report.to_json() if cfg.format == "json" else report.to_text()
        _emit(text, cfg.out, stdout)
        if cfg.out is not None and not report.passed:
            stdout.write("failed: " + ", ".join(c.name for c in report.failures) + "\n")
        return EXIT_OK if report.passed else EXIT_VERIFY
    rec.metadata.update(cfg.header())
    rec.metadata["version"] = __version__
    _emit(_record_text(rec, cfg.format), cfg.out, stdout)
    return EXIT_OK


def _run_scaling(cfg: ExperimentConfig, stdout) -> int:
    kinds = experiments.SCALING_KINDS if cfg.target == "all" else (cfg.target,)
    m_list = cfg.m_list or experiments.DEFAULT_SCALING_M
    results = {}
    for kind in kinds:
        res = experiments.run_scaling(kind, m_list, cfg.trials, cfg.seed, cfg.gamma_mode, cfg.dt, cfg.metric)
        results[kind] = res
        if cfg.out is not None:
            out = Path(cfg.out)
            target = out / f"scaling_{kind}.csv" if len(kinds) > 1 else out
            _emit(res.to_csv(), str(target), stdout)
        elif len(kinds) == 1:
            stdout.write(res.to_csv())
        stdout.write(f"{kind}: exponent={res.exponent:.4f} r2={res.r_squared:.4f}\n")
    if len(kinds) > 1:
        stdout.write(experiments.speedup_table(results))
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        fields = {k: v for k, v in vars(args).items() if k in ExperimentConfig.__dataclass_fields__}
        cfg = ExperimentConfig(**fields).validate()
        return _run(cfg, stdout)
    except UsageError as exc:
        stderr.write(f"qwsim: usage error: {exc}\n")
        return EXIT_USAGE
    except ValueError as exc:
        stderr.write(f"qwsim: invalid parameter: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        where = getattr(exc, "filename", None)
        stderr.write(f"qwsim: I/O error{f' at {where}' if where else ''}: {exc.strerror or exc}\n")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
