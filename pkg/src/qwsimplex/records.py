"""Run records, query ledgers and closed-form spectral claims."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CSV_COLUMNS = ("index", "success_probability", "walk_steps", "oracle_queries")


@dataclass(frozen=True)
class QueryLedger:
    oracle_queries: int
    walk_steps: int
    steps_per_query: int

    def __post_init__(self):
        if self.walk_steps != self.oracle_queries * self.steps_per_query:
            raise ValueError(
                f"ledger inconsistent: {self.walk_steps} steps != "
                f"{self.oracle_queries} queries x {self.steps_per_query}"
            )


@dataclass
class RunRecord:
    """Time series of success probability with step/query accounting."""

    index: np.ndarray
    success_probability: np.ndarray
    walk_steps: np.ndarray
    oracle_queries: np.ndarray
    metadata: dict = field(default_factory=dict)
    ledger: QueryLedger | None = None

    def __post_init__(self):
        self.index = np.asarray(self.index)
        self.success_probability = np.asarray(self.success_probability, dtype=float)
        self.walk_steps = np.asarray(self.walk_steps, dtype=np.int64)
        self.oracle_queries = np.asarray(self.oracle_queries)
        n = len(self.index)
        for name in CSV_COLUMNS[1:]:
            if len(getattr(self, name)) != n:
                raise ValueError(f"column {name} has length {len(getattr(self, name))}, expected {n}")
        if n > 1 and np.any(np.diff(self.index) <= 0):
            raise ValueError("index must be strictly increasing")
        p = self.success_probability
        if p.size and (p.min() < -1e-12 or p.max() > 1 + 1e-9):
            raise ValueError("success probability outside [0, 1]")

    def __len__(self) -> int:
        return len(self.index)

    def peak(self) -> tuple[float, float]:
        """(index, probability) at the maximum; earliest index wins ties."""
        i = int(np.argmax(self.success_probability))
        return self.index[i].item(), float(self.success_probability[i])

    def first_crossing(self, threshold: float):
        """First index with probability >= threshold, or None."""
        hits = np.nonzero(self.success_probability >= threshold)[0]
        return self.index[hits[0]].item() if hits.size else None

    def window(self, upto) -> "RunRecord":
        keep = self.index <= upto
        return RunRecord(
            self.index[keep],
            self.success_probability[keep],
            self.walk_steps[keep],
            self.oracle_queries[keep],
            dict(self.metadata),
            self.ledger,
        )

    # --- serialization ---------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key, value in self.metadata.items():
            buf.write(f"# {key}={_meta_str(value)}\n")
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for row in zip(self.index, self.success_probability, self.walk_steps, self.oracle_queries):
            buf.write(",".join(fmt_number(x) for x in row) + "\n")
        return buf.getvalue()

    def to_json(self) -> str:
        payload = {
            "metadata": {k: _meta_json(v) for k, v in self.metadata.items()},
            "columns": list(CSV_COLUMNS),
            "rows": [
                [_json_number(x) for x in row]
                for row in zip(self.index, self.success_probability, self.walk_steps, self.oracle_queries)
            ],
        }
        return json.dumps(payload, indent=1, sort_keys=False) + "\n"

    def write(self, path, fmt: str = "csv") -> Path:
        path = Path(path)
        text = self.to_csv() if fmt == "csv" else self.to_json()
        path.write_text(text)
        return path

    @classmethod
    def from_csv(cls, text: str) -> "RunRecord":
        meta, rows = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif line and not line.startswith("index"):
                rows.append([float(x) for x in line.split(",")])
        arr = np.array(rows).reshape(-1, 4)
        return cls(arr[:, 0], arr[:, 1], arr[:, 2].astype(np.int64), arr[:, 3], meta)


def fmt_number(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.12g}"


def _json_number(x):
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(f"{float(x):.12g}")


def _meta_str(value) -> str:
    if isinstance(value, (list, tuple)):
        return " ".join(_meta_str(v) for v in value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _meta_json(value):
    if isinstance(value, (list, tuple)):
        return [_meta_json(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{value:.12g}")
    return value


@dataclass(frozen=True)
class SpectralPrediction:
    """A closed-form eigenpair (or state) claim evaluated at a given M.

    ``regime`` is ``"exact"`` or ``"large-M"``. Exact claims are held to
    1e-10; large-M ones to ``tolerance`` in whatever sense the consumer
    measures (relative eigenvalue error, eigenvector overlap deficit).
    A ``None`` eigenvalue marks a pure state identity such as
    "initial state ~ combination of eigenvectors".
    """

    label: str
    eigenvalue: complex | None
    eigenvector: np.ndarray | None
    regime: str = "exact"
    tolerance: float = 1e-10

    def normalized_vector(self) -> np.ndarray | None:
        if self.eigenvector is None:
            return None
        v = np.asarray(self.eigenvector, dtype=complex)
        return v / np.linalg.norm(v)


def eigenspace_overlap(vector, system, eigenvalue, cluster_tol: float = 1e-8) -> float:
    """Norm of the projection of a unit ``vector`` onto the numerical
    eigenspace of ``system`` (an EigenSystem) belonging to ``eigenvalue``."""
    vals = system.eigenvalues
    idx = np.nonzero(np.abs(vals - eigenvalue) <= cluster_tol)[0]
    if idx.size == 0:
        idx = np.array([int(np.argmin(np.abs(vals - eigenvalue)))])
    basis = system.eigenvectors[:, idx]
    # orthonormalise the cluster
    q, _ = np.linalg.qr(basis)
    v = np.asarray(vector, dtype=complex)
    v = v / np.linalg.norm(v)
    return float(np.linalg.norm(q.conj().T @ v))


def nearest_eigenvalue_error(system, eigenvalue) -> float:
    return float(np.min(np.abs(system.eigenvalues - eigenvalue)))
