"""Closed forms against numerical oracles, and reductions against brute force.

:func:`verify_all` runs every check and returns a report; each check carries
its measured error and the bound it was held to. A check that raises is
recorded as failed with the exception text, so one broken module does not
hide the others.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import classical, ctqw, dtqw, fullspace, multistep
from .graph import SimplexParams
from .linalg import eig, unitarity_error
from .records import QueryLedger, eigenspace_overlap, nearest_eigenvalue_error

SPECTRUM_M = (3, 5, 10, 50, 100)
LARGE_M = 100
SIGMA_M = (100, 200, 300)
FULLSPACE_M = (3, 8, 16, 32)


@dataclass(frozen=True)
class Tolerances:
    spectral: float = 1e-10
    gap_relative: float = 0.15
    perturbation_overlap: float = 0.99
    sigma_relative: float = 0.25
    sigma_overlap: float = 0.95
    subspace: float = 1e-8
    hitting_relative: float = 1e-9
    lumping_sigmas: float = 3.0
    unitarity: float = 1e-12
    dtqw_steps: int = 500
    multistep_queries: int = 12
    ctqw_samples: int = 8
    lumping_steps: int = 2_000_000


PROFILES = {
    "default": Tolerances(),
    # shorter full-space runs, same bounds
    "quick": Tolerances(dtqw_steps=100, multistep_queries=4, ctqw_samples=3, lumping_steps=400_000),
}


@dataclass
class Check:
    name: str
    measured: float
    bound: float
    passed: bool
    detail: str = ""


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    profile: str = "default"
    max_m_fullspace: int = 16

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 2

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_text(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [f"# qwsimplex {__version__} verify profile={self.profile} max_m_fullspace={self.max_m_fullspace}"]
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            line = f"{tag}  {c.name:<{width}}  measured={c.measured:.3e}  bound={c.bound:.3e}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line)
        n_fail = len(self.failures)
        lines.append(f"{len(self.checks) - n_fail}/{len(self.checks)} checks passed")
        if n_fail:
            lines.append("failed: " + ", ".join(c.name for c in self.failures))
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        def clean(c: Check) -> dict:
            d = asdict(c)
            d["measured"] = d["measured"] if np.isfinite(d["measured"]) else str(d["measured"])
            return d

        doc = {
            "version": __version__,
            "profile": self.profile,
            "max_m_fullspace": self.max_m_fullspace,
            "passed": self.passed,
            "checks": [clean(c) for c in self.checks],
        }
        return json.dumps(doc, indent=2) + "\n"


class _Runner:
    def __init__(self):
        self.checks: list[Check] = []

    def add(self, name: str, measured: float, bound: float, detail: str = "", at_least: bool = False):
        measured = float(measured)
        ok = measured >= bound if at_least else measured <= bound
        self.checks.append(Check(name, measured, bound, bool(ok and np.isfinite(measured)), detail))

    def guard(self, name: str, fn):
        """Run ``fn``; an exception becomes a failed check called ``name``."""
        try:
            fn()
        except Exception as exc:  # noqa: BLE001 - any failure must be reported, not raised
            self.checks.append(Check(name, float("nan"), float("nan"), False, f"{type(exc).__name__}: {exc}"))


# --- spectra -------------------------------------------------------------------

def _exact_spectrum_error(matrix, preds) -> float:
    system = eig(matrix)
    worst = 0.0
    for p in preds:
        if p.regime != "exact" or p.eigenvalue is None:
            continue
        worst = max(worst, nearest_eigenvalue_error(system, p.eigenvalue))
        v = p.normalized_vector()
        if v is not None:
            worst = max(worst, float(np.linalg.norm(matrix @ v - p.eigenvalue * v)))
    return worst


def _large_m_deficit(matrix, preds, state_target) -> tuple[float, float, str]:
    """Worst (overlap deficit - tolerance) over large-M claims, as (deficit, tol, label)."""
    system = eig(matrix)
    worst = (-np.inf, 0.0, "")
    for p in preds:
        if p.regime != "large-M":
            continue
        v = p.normalized_vector()
        if p.eigenvalue is None:
            overlap = abs(np.vdot(v, state_target))
        else:
            overlap = eigenspace_overlap(v, system, p.eigenvalue)
        deficit = 1.0 - overlap
        if deficit - p.tolerance > worst[0] - worst[1]:
            worst = (deficit, p.tolerance, p.label)
    return worst


def _spectral_checks(run: _Runner, tol: Tolerances, u0_builder):
    families = {
        "flip": (lambda M: dtqw.build_search_operator(M, "flip"), lambda M: dtqw.spectrum_closed_form(M, "flip"),
                 dtqw.initial_state),
        "skw": (lambda M: dtqw.build_search_operator(M, "skw"), lambda M: dtqw.spectrum_closed_form(M, "skw"),
                dtqw.initial_state),
        "U0": (u0_builder, multistep.u0_spectrum_closed_form, lambda M: np.eye(6, dtype=complex)[0]),
    }
    for fam, (build, closed, target) in families.items():
        for M in SPECTRUM_M:
            run.guard(
                f"spectrum/{fam}/M={M}",
                lambda: run.add(f"spectrum/{fam}/M={M}", _exact_spectrum_error(build(M), closed(M)), tol.spectral,
                                "closed-form eigenvalues and eigenvector residuals"),
            )

        def large(fam=fam, build=build, closed=closed, target=target):
            deficit, bound, label = _large_m_deficit(build(LARGE_M), closed(LARGE_M), target(LARGE_M))
            run.add(f"large-M/{fam}/M={LARGE_M}", deficit, bound, f"worst claim: {label}")

        run.guard(f"large-M/{fam}/M={LARGE_M}", large)


def _ctqw_perturbation_checks(run: _Runner, tol: Tolerances):
    M = LARGE_M
    gamma = ctqw.critical_gamma(M)

    def critical():
        h0 = ctqw.leading_order_hamiltonian(M, gamma)
        run.add("ctqw/critical-gamma-degeneracy", abs(h0[0, 0] - ctqw.leading_order_eigenpairs(M, gamma)[2].eigenvalue),
                tol.spectral, "H0 |a> level equals the r-like level at gamma_c")

    def h0_pairs():
        h0 = ctqw.leading_order_hamiltonian(M, gamma)
        run.add("ctqw/H0-eigenpairs", _exact_spectrum_error(h0, ctqw.leading_order_eigenpairs(M, gamma)), tol.spectral)

    def pair():
        system = eig(ctqw.build_hamiltonian(M, gamma), kind="hermitian")
        low = np.sort(system.eigenvalues.real)[:2]
        gap = low[1] - low[0]
        target = ctqw.predicted_gap(M)
        run.add("ctqw/gap-vs-2/sqrtM", abs(gap - target) / target, tol.gap_relative,
                f"gap={gap:.6f} predicted={target:.6f}")
        preds = [p for p in ctqw.perturbation_predictions(M, gamma) if p.regime == "large-M"]
        overlaps = [eigenspace_overlap(p.normalized_vector(), system, v) for p, v in zip(preds, low)]
        run.add("ctqw/(r+-a)/sqrt2-overlap", min(overlaps), tol.perturbation_overlap,
                "overlaps " + " ".join(f"{o:.5f}" for o in overlaps), at_least=True)
        err = max(abs(p.eigenvalue - v) for p, v in zip(preds, low))
        run.add("ctqw/(r+-a)/sqrt2-energy", err, 2.0 / M, "vs -M-1 -+ 1/sqrt(M)")

    run.guard("ctqw/critical-gamma-degeneracy", critical)
    run.guard("ctqw/H0-eigenpairs", h0_pairs)
    run.guard("ctqw/perturbation", pair)


def _sigma_checks(run: _Runner, tol: Tolerances):
    for M in SIGMA_M:
        def one(M=M):
            k = multistep.choose_k(M)
            system = eig(multistep.multistep_operator(M, k), kind="unitary")
            plus, minus = multistep.predicted_sigma_eigenpairs(M, k)[:2]
            lam = system.eigenvalues[np.argmin(np.abs(system.eigenvalues - plus.eigenvalue))]
            measured = abs(np.sin(np.angle(lam)))
            target = multistep.sigma_sine(M)
            run.add(f"sigma/phase/M={M}", abs(measured - target) / target, tol.sigma_relative,
                    f"|sin sigma|={measured:.6f} vs 2/sqrt(M)={target:.6f} (k={k})")
            ov = min(eigenspace_overlap(p.normalized_vector(), system, p.eigenvalue, cluster_tol=1e-6)
                     for p in (plus, minus))
            run.add(f"sigma/vector/M={M}", ov, tol.sigma_overlap, "(-+i|aa>+|cc>)/sqrt2", at_least=True)

        run.guard(f"sigma/M={M}", one)


# --- reductions ----------------------------------------------------------------

def _subspace_checks(run: _Runner, tol: Tolerances, max_m: int):
    for M in [m for m in FULLSPACE_M if m <= max_m]:
        params = SimplexParams(M)
        for coin in ("flip", "skw"):
            def dt(coin=coin, M=M, params=params):
                reduced, residual = fullspace.run_full_dtqw(params, coin, tol.dtqw_steps)
                ref = dtqw.trajectory(dtqw.build_search_operator(M, coin), dtqw.initial_state(M), tol.dtqw_steps)
                err = float(np.max(np.abs(reduced - ref)))
                run.add(f"subspace/dtqw-{coin}/M={M}", max(err, float(residual.max())), tol.subspace,
                        f"component={err:.2e} residual={residual.max():.2e} steps={tol.dtqw_steps}")

            run.guard(f"subspace/dtqw-{coin}/M={M}", dt)

        if M >= 3:
            def ms(M=M, params=params):
                k = multistep.choose_k(M)
                q = tol.multistep_queries
                reduced, residual = fullspace.run_full_multistep(params, k, q)
                ref = dtqw.trajectory(multistep.multistep_operator(M, k), dtqw.initial_state(M), q)
                err = float(np.max(np.abs(reduced - ref)))
                run.add(f"subspace/multistep/M={M}", max(err, float(residual.max())), tol.subspace,
                        f"component={err:.2e} residual={residual.max():.2e} k={k}")

            run.guard(f"subspace/multistep/M={M}", ms)

        def ct(M=M, params=params):
            gamma = ctqw.approx_critical_gamma(M)
            times = np.linspace(0.0, 4 * np.pi * np.sqrt(M), tol.ctqw_samples)
            reduced, residual = fullspace.run_full_ctqw(params, gamma, times, tol=tol.subspace * 1e-2)
            ref = ctqw.HermitianPropagator(ctqw.build_hamiltonian(M, gamma)).trajectory(times, ctqw.initial_state(M))
            err = float(np.max(np.abs(reduced - ref)))
            run.add(f"subspace/ctqw/M={M}", max(err, float(residual.max())), tol.subspace,
                    f"component={err:.2e} residual={residual.max():.2e}")

        run.guard(f"subspace/ctqw/M={M}", ct)


def _classical_checks(run: _Runner, tol: Tolerances):
    for M in (2, 10, 100):
        def hit(M=M):
            h_b, h_c = classical.exact_hitting_steps(M)
            err = max(abs(h_b - M * M) / (M * M), abs(h_c - (M * M + M)) / (M * M + M))
            run.add(f"classical/hitting/M={M}", err, tol.hitting_relative, f"h_b={h_b:.6f} h_c={h_c:.6f}")

        run.guard(f"classical/hitting/M={M}", hit)

    def lumping():
        M = 10
        counts = classical.empirical_class_transitions(M, tol.lumping_steps, seed=12345)
        expected = classical.LumpedChain(M).matrix.copy()
        # the lumped chain absorbs at a; the free walk leaves a via the one external edge
        expected[0] = [(M - 1.0) / M, 1.0 / M, 0.0]
        worst = 0.0
        for row in range(3):
            n = counts[row].sum()
            freq = counts[row] / n
            for col in range(3):
                e = expected[row, col]
                if e == 0.0:
                    # forbidden move: any occurrence is a wiring error
                    z = np.inf if counts[row, col] else 0.0
                else:
                    z = abs(freq[col] - e) / np.sqrt(e * (1 - e) / n)
                worst = max(worst, float(z))
        run.add("classical/lumping", worst, tol.lumping_sigmas, "class transition frequencies, in standard errors")

    run.guard("classical/lumping", lumping)


def _invariant_checks(run: _Runner, tol: Tolerances):
    def unitarity():
        worst = 0.0
        for M in SPECTRUM_M:
            for coin in ("flip", "skw"):
                worst = max(worst, unitarity_error(dtqw.build_search_operator(M, coin)))
            worst = max(worst, unitarity_error(multistep.multistep_operator(M, multistep.choose_k(M))))
        run.add("invariants/unitarity", worst, tol.unitarity)

    def norms():
        worst = 0.0
        for M in (10, 100):
            for coin in ("flip", "skw"):
                traj = dtqw.trajectory(dtqw.build_search_operator(M, coin), dtqw.initial_state(M), 200)
                worst = max(worst, float(np.max(np.abs(np.linalg.norm(traj, axis=1) - 1))))
            prop = ctqw.HermitianPropagator(ctqw.build_hamiltonian(M, ctqw.critical_gamma(M)))
            traj = prop.trajectory(np.linspace(0, 50, 51), ctqw.initial_state(M))
            worst = max(worst, float(np.max(np.abs(np.linalg.norm(traj, axis=1) - 1))))
        run.add("invariants/norm", worst, tol.subspace)

    def ledger():
        bad = 0
        for M in (10, 100, 300):
            rec = multistep.run_multistep(multistep.MultistepParams(M, 20))
            k = rec.ledger.steps_per_query
            bad += int(np.any(rec.walk_steps != k * rec.oracle_queries))
            bad += int(np.any(rec.success_probability > 1 + 1e-9))
            try:
                QueryLedger(3, 3 * k + 1, k)
                bad += 1
            except ValueError:
                pass
        run.add("invariants/ledger", bad, 0, "walk_steps == k * oracle_queries; p <= 1")

    run.guard("invariants/unitarity", unitarity)
    run.guard("invariants/norm", norms)
    run.guard("invariants/ledger", ledger)


def verify_all(max_m_fullspace: int = 16, profile="default", u0_builder=dtqw.build_u0) -> VerificationReport:
    """Run every check. ``u0_builder`` is injectable so a corrupted U0 can be
    shown to fail the spectrum check."""
    if isinstance(profile, str):
        if profile not in PROFILES:
            raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}")
        name, tol = profile, PROFILES[profile]
    else:
        name, tol = "custom", profile
    run = _Runner()
    _spectral_checks(run, tol, u0_builder)
    _ctqw_perturbation_checks(run, tol)
    _sigma_checks(run, tol)
    _subspace_checks(run, tol, int(max_m_fullspace))
    _classical_checks(run, tol)
    _invariant_checks(run, tol)
    return VerificationReport(run.checks, name, int(max_m_fullspace))
