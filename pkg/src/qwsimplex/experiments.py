"""Figure reproduction and query-scaling sweeps."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import classical, ctqw, dtqw, multistep
from .records import RunRecord, fmt_number

FIGURE_IDS = ("fig2", "fig3", "fig4")
SCALING_KINDS = (
    "classical-k1",
    "classical-sqrt",
    "classical-M",
    "quantum-dtqw",
    "quantum-ctqw",
    "quantum-multistep",
)
DEFAULT_FIGURE_M = (100, 200, 300)
DEFAULT_SCALING_M = (16, 32, 64, 128, 256)
QUANTUM_METRICS = ("peak", "p50")


def gamma_for(M: int, mode: str = "approx") -> float:
    """Jumping rate from a mode string: ``exact``, ``approx`` or ``value:<x>``."""
    if mode == "exact":
        return ctqw.critical_gamma(M)
    if mode == "approx":
        return ctqw.approx_critical_gamma(M)
    if mode.startswith("value:"):
        g = float(mode.split(":", 1)[1])
        if not g > 0:
            raise ValueError(f"gamma must be > 0, got {g}")
        return g
    raise ValueError(f"unknown gamma mode {mode!r}")


def first_period_peak(record: RunRecord, predicted: float) -> tuple[float, float]:
    """Peak within [0, 2*predicted]: the first oscillation period only.

    Later revivals can be marginally higher, so an unbounded argmax would
    pick them instead of the first peak.
    """
    return record.window(2.0 * predicted).peak()


# --- figures -------------------------------------------------------------------

@dataclass
class Curve:
    name: str
    record: RunRecord
    predicted_peak: float | None

    @property
    def peak(self) -> tuple[float, float]:
        if self.predicted_peak is None:
            return self.record.peak()
        return first_period_peak(self.record, self.predicted_peak)


def figure_curves(fig: str, m_list=None, steps: int | None = None, t_max: float | None = None,
                  dt: float = 0.01, queries: int | None = None, gamma_mode: str = "approx") -> list[Curve]:
    if fig not in FIGURE_IDS:
        raise ValueError(f"figure id must be one of {FIGURE_IDS}, got {fig!r}")
    ms = list(m_list) if m_list else list(DEFAULT_FIGURE_M)
    curves = []
    if fig == "fig2":
        n = 1000 if steps is None else steps
        flip = dtqw.evolve_dtqw(ms[0], "flip", n)
        curves.append(Curve(f"fig2_flip_M{ms[0]}", flip, None))
        for M in ms:
            rec = dtqw.evolve_dtqw(M, "skw", n)
            curves.append(Curve(f"fig2_skw_M{M}", rec, dtqw.skw_predicted_runtime(M)))
    elif fig == "fig3":
        tm = 50.0 if t_max is None else t_max
        for M in ms:
            params = ctqw.CtqwParams(M, gamma_for(M, gamma_mode), tm, dt)
            rec = ctqw.evolve_ctqw(params)
            rec.metadata["gamma_mode"] = gamma_mode
            curves.append(Curve(f"fig3_ctqw_M{M}", rec, ctqw.predicted_runtime(M)))
    else:
        q = 40 if queries is None else queries
        for M in ms:
            rec = multistep.run_multistep(multistep.MultistepParams(M, q))
            curves.append(Curve(f"fig4_multistep_M{M}", rec, multistep.predicted_queries(M)))
    for c in curves:
        c.record.metadata = {"figure": fig, "curve": c.name, **c.record.metadata, "version": __version__}
    return curves


def run_figure(fig: str, out, m_list=None, fmt: str = "csv", **kwargs) -> list[Path]:
    """Write one file per curve plus ``<fig>_summary.csv`` of first-period peaks."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    curves = figure_curves(fig, m_list, **kwargs)
    written = []
    for c in curves:
        written.append(c.record.write(out / f"{c.name}.{fmt}", fmt))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["curve", "peak_index", "peak_probability", "predicted_peak_index"])
    for c in curves:
        idx, p = c.peak
        pred = "" if c.predicted_peak is None else fmt_number(c.predicted_peak)
        w.writerow([c.name, fmt_number(idx), fmt_number(p), pred])
    summary = out / f"{fig}_summary.csv"
    summary.write_text(buf.getvalue())
    written.append(summary)
    return written


# --- scaling -------------------------------------------------------------------

@dataclass
class ScalingResult:
    kind: str
    rows: list[dict]
    exponent: float
    r_squared: float
    metadata: dict = field(default_factory=dict)

    @property
    def points(self) -> list[tuple[int, float]]:
        return [(r["M"], r["queries"]) for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        meta = {**self.metadata, "exponent": self.exponent, "r_squared": self.r_squared}
        for k, v in meta.items():
            buf.write(f"# {k}={fmt_number(v) if isinstance(v, float) else v}\n")
        cols = list(self.rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow(["" if r[c] is None else fmt_number(r[c]) for c in cols])
        return buf.getvalue()


def steps_per_query_for(kind: str, M: int) -> int:
    return {
        "classical-k1": 1,
        "classical-sqrt": int(np.ceil(np.sqrt(M))),
        "classical-M": M,
    }[kind]


def _quantum_row(kind: str, M: int, gamma_mode: str, dt: float, metric: str) -> dict:
    if kind == "quantum-dtqw":
        pred = dtqw.skw_predicted_runtime(M)
        rec = dtqw.evolve_dtqw(M, "skw", int(np.ceil(2 * pred)))
        spq = 1
    elif kind == "quantum-ctqw":
        pred = ctqw.predicted_runtime(M)
        rec = ctqw.evolve_ctqw(ctqw.CtqwParams(M, gamma_for(M, gamma_mode), 2 * pred, dt))
        spq = None
    else:
        pred = multistep.predicted_queries(M)
        rec = multistep.run_multistep(multistep.MultistepParams(M, int(np.ceil(2 * pred))))
        spq = rec.ledger.steps_per_query
    idx, p = first_period_peak(rec, pred)
    return {
        "M": M,
        "queries": idx if metric == "peak" else rec.first_crossing(0.5),
        "peak_index": idx,
        "peak_probability": p,
        "first_p50": rec.first_crossing(0.5),
        "first_p90": rec.first_crossing(0.9),
        "steps_per_query": spq,
    }


def run_scaling(kind: str, m_list=DEFAULT_SCALING_M, trials: int = 2000, seed: int = 0,
                gamma_mode: str = "approx", dt: float = 0.01, metric: str = "peak") -> ScalingResult:
    """Query counts per M and the fitted log-log exponent.

    Classical rows are Monte Carlo means. Quantum rows count queries up to
    the first-period peak of the success probability (``metric="peak"``)
    or up to the first p >= 0.5 (``metric="p50"``); both indices and the
    first p >= 0.9 are kept as columns either way.
    """
    if kind not in SCALING_KINDS:
        raise ValueError(f"kind must be one of {SCALING_KINDS}, got {kind!r}")
    if metric not in QUANTUM_METRICS:
        raise ValueError(f"metric must be one of {QUANTUM_METRICS}, got {metric!r}")
    m_list = [int(m) for m in m_list]
    if len(m_list) < 3:
        raise ValueError("scaling needs at least three values of M")
    rows = []
    for M in m_list:
        if kind.startswith("classical"):
            k = steps_per_query_for(kind, M)
            s = classical.monte_carlo_queries(M, k, trials, seed)
            rows.append(
                {
                    "M": M,
                    "queries": s.mean_queries,
                    "stderr": s.stderr_queries,
                    "mean_steps": s.mean_steps,
                    "steps_per_query": k,
                }
            )
        else:
            rows.append(_quantum_row(kind, M, gamma_mode, dt, metric))
    exponent, r2 = classical.scaling_fit([(r["M"], r["queries"]) for r in rows])
    meta = {"kind": kind, "m_list": " ".join(map(str, m_list)), "version": __version__}
    if kind.startswith("classical"):
        meta.update(trials=trials, seed=seed)
    else:
        meta.update(metric=metric)
        if kind == "quantum-ctqw":
            meta.update(gamma_mode=gamma_mode, dt=dt)
    return ScalingResult(kind, rows, exponent, r2, meta)


def speedup_table(results: dict[str, ScalingResult]) -> str:
    """Plain-text exponent table; pairs each quantum walk with its classical
    counterpart at the same steps per query."""
    pairs = [
        ("quantum-dtqw", "classical-k1", "1 step/query"),
        ("quantum-ctqw", "classical-M", "~M steps/query"),
        ("quantum-multistep", "classical-sqrt", "~sqrt(M) steps/query"),
    ]
    lines = [f"{'walk steps per query':<24}{'quantum':>10}{'classical':>11}{'ratio':>8}"]
    for q, c, label in pairs:
        if q in results and c in results:
            eq, ec = results[q].exponent, results[c].exponent
            lines.append(f"{label:<24}{eq:>10.3f}{ec:>11.3f}{ec / eq:>8.2f}")
    return "\n".join(lines) + "\n"
