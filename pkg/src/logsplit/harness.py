"""Convergence experiments, property suites, and report assembly.

The sweep protocol: a measure-time label t is realised on each step
grid as the nearest step m = round(t / tau), so the coarse run and the
reference are always compared at the same actual time m tau (the
reference step size divides every sweep tau).  Rows keep the nominal
label; the fitted order is insensitive to the sub-step label offset.

Errors follow E(tau, t) = ||u_ref(., m tau) - u_tau(., m tau)|| / norm
with norm = ||u0||_{H^s} for the rough families and 1 for the
closed-form comparison, computed in coefficient space after zero
padding the coarse field to the reference cutoff.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import initdata, nonlinear, propagator, spectral, splitting, storage

log = logging.getLogger("logsplit")

REFERENCE_MARGIN = 8  # tau_ref must be at least this much finer than min(taus)


class PropertyViolation(AssertionError):
    """A randomized inequality check failed; carries the witness."""

    def __init__(self, report: nonlinear.CheckReport, samples: int):
        self.report = report
        self.samples = samples
        super().__init__(
            f"{report.label}: lhs {report.lhs!r} exceeded bound {report.bound!r} "
            f"(slack {report.slack!r}, margin {report.margin!r}, witness {report.witness!r}, "
            f"{samples} samples)"
        )


@dataclass(frozen=True)
class ReferenceSpec:
    """Reference solution: closed form, or a fine numeric run."""

    kind: str  # "exact" | "numeric"
    tau: float | None = None
    modes: int | None = None

    def __post_init__(self):
        if self.kind not in ("exact", "numeric"):
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if self.kind == "numeric":
            if not self.tau or self.tau <= 0 or not self.modes or self.modes < 1:
                raise ValueError("numeric reference needs tau > 0 and modes >= 1")


@dataclass(frozen=True)
class SweepSpec:
    lam: float
    taus: tuple
    final_time: float
    reference: ReferenceSpec
    measure_times: tuple = (0.4, 0.7, 1.0)
    fixed_modes: int | None = None  # None: N(tau) = floor(1 / sqrt(tau))
    oversample: int = 4
    eps: float = 0.0

    def __post_init__(self):
        taus = tuple(float(t) for t in self.taus)
        if not taus:
            raise ValueError("empty tau sweep")
        if any(t <= 0 for t in taus) or any(a <= b for a, b in zip(taus, taus[1:])):
            raise ValueError("taus must be positive and strictly decreasing")
        object.__setattr__(self, "taus", taus)
        times = tuple(float(t) for t in self.measure_times)
        if not times or any(not 0.0 < t <= self.final_time for t in times):
            raise ValueError("measure times must lie in (0, final_time]")
        object.__setattr__(self, "measure_times", times)
        for tau in taus:
            steps = {int(round(t / tau)) for t in times}
            if len(steps) < len(times):
                raise ValueError(f"measure times collide on the tau={tau} step grid")
            if 0 in steps:
                raise ValueError(f"a measure time rounds to step 0 at tau={tau}")
        if self.reference.kind == "numeric":
            if self.reference.tau * REFERENCE_MARGIN > min(taus) * (1.0 + 1e-12):
                raise ValueError(
                    f"reference tau {self.reference.tau} must be <= min(taus)/{REFERENCE_MARGIN}"
                )
            for tau in taus:
                ratio = tau / self.reference.tau
                if abs(ratio - round(ratio)) > 1e-9:
                    raise ValueError(f"tau {tau} is not a multiple of the reference tau")
            if self.fixed_modes is not None and self.reference.modes < self.fixed_modes:
                raise ValueError("reference cutoff below the sweep cutoff")

    def modes_for(self, tau: float) -> int:
        if self.fixed_modes is not None:
            return self.fixed_modes
        return int(np.floor(1.0 / np.sqrt(tau)))

    def actual_times(self, tau: float) -> dict:
        """nominal label -> realised snapshot time on this step grid."""
        return {t: round(t / tau) * tau for t in self.measure_times}


@dataclass(frozen=True)
class ErrorRow:
    tau: float
    modes: int
    t: float  # nominal label
    err: float
    mass_drift: float


@dataclass(frozen=True)
class ErrorTable:
    rows: tuple
    normalization: float

    def at_time(self, t: float) -> list:
        return [r for r in self.rows if r.t == t]

    def csv_rows(self):
        return ((r.tau, r.modes, r.t, r.err, r.mass_drift) for r in self.rows)


@dataclass(frozen=True)
class OrderFit:
    t: float
    slope: float
    intercept: float
    r_squared: float


def fit_order(table, t: float) -> OrderFit:
    """Least-squares line through (ln tau, ln err) at one measure time."""
    rows = table.at_time(t) if isinstance(table, ErrorTable) else [r for r in table if r.t == t]
    kept = [r for r in rows if r.err > 0.0]
    for r in rows:
        if r.err == 0.0:
            log.warning("fit_order: dropping zero-error row tau=%r t=%r", r.tau, r.t)
    if len(kept) < 3:
        raise ValueError(f"need >= 3 positive-error rows at t={t}, have {len(kept)}")
    x = np.log([r.tau for r in kept])
    y = np.log([r.err for r in kept])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = y - np.mean(y)
    denom = float(total @ total)
    r2 = 1.0 if denom == 0.0 else 1.0 - float(resid @ resid) / denom
    return OrderFit(t, float(slope), float(intercept), r2)


@dataclass(frozen=True)
class MassReport:
    max_rel_drift: float
    monotone_ok: bool


def mass_report(traj: splitting.Trajectory) -> MassReport:
    m = traj.mass_values
    drift = float(np.max(np.abs(m / m[0] - 1.0)))
    monotone = bool(np.all(m[1:] <= m[:-1] * (1.0 + splitting.MASS_STEP_TOL)))
    return MassReport(drift, monotone)


def _snapshot_near(traj: splitting.Trajectory, when: float, tol: float) -> splitting.Snapshot:
    for snap in traj.snapshots:
        if abs(snap.step * traj.config.tau - when) <= tol:
            return snap
    raise KeyError(f"no snapshot near t={when!r} in trajectory (tau={traj.config.tau})")


def error_against_reference(
    coarse: splitting.Trajectory, ref: splitting.Trajectory, t: float, normalization: float = 1.0
) -> float:
    """Normalized L2 gap at label t, compared at the realised step time."""
    if normalization <= 0.0:
        raise ValueError("normalization must be positive")
    snap = coarse.snapshot_at(t)
    when = snap.step * coarse.config.tau
    ref_snap = _snapshot_near(ref, when, ref.config.tau / 2)
    n_ref = ref.config.modes
    if coarse.config.modes > n_ref:
        raise ValueError("coarse run carries more modes than the reference")
    padded = spectral.zero_pad(snap.field.coeffs, n_ref)
    diff = padded.coeffs - ref_snap.field.coeffs
    return float(np.sqrt(spectral.TORUS_PERIOD) * np.linalg.norm(diff) / normalization)


def error_against_exact(coarse: splitting.Trajectory, evaluator_factory, t: float) -> float:
    """Raw L2 gap against a closed-form solution at the realised time."""
    snap = coarse.snapshot_at(t)
    when = snap.step * coarse.config.tau
    grid = snap.field.grid
    vals = evaluator_factory(when)(grid.axis_nodes)
    exact = spectral.forward(spectral.PhysicalField(grid, vals), modes=grid.modes)
    diff = snap.field.coeffs - exact.coeffs
    return float(np.sqrt(spectral.TORUS_PERIOD) * np.linalg.norm(diff))


def _run_point(args):
    """Worker: one splitting run; returns plain arrays for pickling."""
    lam, tau, final_time, modes, oversample, eps, labels, coeffs = args
    cfg = splitting.SolverConfig(
        lam=lam,
        tau=tau,
        final_time=final_time,
        modes=modes,
        oversample=oversample,
        eps=eps,
        snapshot_times=tuple(labels),
    )
    traj = splitting.run(cfg, coeffs)
    snaps = {s.time: (s.step, s.field.coeffs) for s in traj.snapshots}
    return tau, modes, snaps, traj.mass_values


def _rebuild_trajectory(cfg: splitting.SolverConfig, snaps: dict, mass: np.ndarray) -> splitting.Trajectory:
    grid = cfg.grid()
    snapshots = tuple(
        splitting.Snapshot(step, label, spectral.SpectralField(grid, coeffs))
        for label, (step, coeffs) in sorted(snaps.items())
    )
    final = splitting.SolverState(cfg.steps, cfg.final_time, snapshots[-1].field, float(mass[-1]))
    return splitting.Trajectory(
        config=cfg,
        final=final,
        snapshots=snapshots,
        mass_steps=np.arange(mass.size, dtype=np.int64),
        mass_values=mass,
    )


def reference_solution(
    coeffs,
    *,
    lam: float,
    final_time: float,
    tau: float,
    modes: int,
    snapshot_times: tuple,
    oversample: int = 4,
    eps: float = 0.0,
    cache_directory=None,
) -> splitting.Trajectory:
    """Fine-grid trajectory with snapshots, cached and checksummed.

    A corrupt or stale cache entry recomputes (with a logged warning)
    rather than failing; the payload digest guards the arrays.
    """
    arr, cutoff, _ = spectral._as_coeffs(coeffs)
    scalars = json.dumps(
        {
            "lam": lam,
            "T": final_time,
            "tau": tau,
            "N": modes,
            "q": oversample,
            "eps": eps,
            "times": sorted(float(t) for t in snapshot_times),
        },
        sort_keys=True,
    )
    key = storage._payload_digest({"u0": arr, "meta": np.frombuffer(scalars.encode(), dtype=np.uint8)})
    cfg = splitting.SolverConfig(
        lam=lam,
        tau=tau,
        final_time=final_time,
        modes=modes,
        oversample=oversample,
        eps=eps,
        snapshot_times=tuple(snapshot_times),
    )
    cached = storage.cache_load(key, cache_directory)
    if cached is not None:
        snaps = {
            float(t): (int(s), c)
            for t, s, c in zip(cached["times"], cached["steps"], cached["coeffs"])
        }
        return _rebuild_trajectory(cfg, snaps, cached["mass"])
    traj = splitting.run(cfg, arr)
    order = sorted(traj.snapshots, key=lambda s: s.time)
    storage.cache_store(
        key,
        {
            "times": np.array([s.time for s in order]),
            "steps": np.array([s.step for s in order], dtype=np.int64),
            "coeffs": np.array([s.field.coeffs for s in order]),
            "mass": traj.mass_values,
        },
        cache_directory,
    )
    return traj


def run_sweep(
    data: initdata.InitialData,
    spec: SweepSpec,
    *,
    workers: int = 1,
    cache_directory=None,
) -> ErrorTable:
    """Full tau sweep against the configured reference."""
    jobs = [
        (
            spec.lam,
            tau,
            spec.final_time,
            spec.modes_for(tau),
            spec.oversample,
            spec.eps,
            spec.measure_times,
            np.asarray(data.coeffs, dtype=np.complex128),
        )
        for tau in spec.taus
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]

    if spec.reference.kind == "numeric":
        union = sorted({when for tau in spec.taus for when in spec.actual_times(tau).values()})
        ref = reference_solution(
            data.coeffs,
            lam=spec.lam,
            final_time=spec.final_time,
            tau=spec.reference.tau,
            modes=spec.reference.modes,
            snapshot_times=tuple(union),
            oversample=spec.oversample,
            eps=spec.eps,
            cache_directory=cache_directory,
        )
        normalization = data.hs_norm
    else:
        if data.evaluator is None:
            raise ValueError("exact reference needs initial data with an evaluator")
        ref = None
        normalization = 1.0

    params = data.evaluator.params if data.evaluator is not None else None
    rows = []
    for tau, modes, snaps, mass in results:
        grid = spectral.TorusGrid.for_modes(modes, 1, spec.oversample)
        for label in spec.measure_times:
            step, coeffs = snaps[label]
            when = step * tau
            if ref is not None:
                padded = spectral.zero_pad(coeffs, ref.config.modes)
                target = _snapshot_near(ref, when, ref.config.tau / 2).field.coeffs
                err = float(
                    np.sqrt(spectral.TORUS_PERIOD)
                    * np.linalg.norm(padded.coeffs - target)
                    / normalization
                )
            else:
                vals = initdata.GaussonEvaluator(params, when)(grid.axis_nodes)
                exact = spectral.forward(spectral.PhysicalField(grid, vals), modes=modes)
                err = float(np.sqrt(spectral.TORUS_PERIOD) * np.linalg.norm(coeffs - exact.coeffs))
            drift = float(np.max(np.abs(mass[: step + 1] / mass[0] - 1.0)))
            rows.append(ErrorRow(tau, modes, label, err, drift))
    rows.sort(key=lambda r: (-r.tau, r.t))
    return ErrorTable(tuple(rows), normalization)


def monotone_refinement_ok(table: ErrorTable, noise_band: float = 0.05) -> bool:
    """Errors non-increasing as tau shrinks, within a relative band."""
    for t in sorted({r.t for r in table.rows}):
        errs = [r.err for r in sorted(table.at_time(t), key=lambda r: -r.tau)]
        for a, b in zip(errs, errs[1:]):
            if b > a * (1.0 + noise_band):
                return False
    return True


@dataclass(frozen=True)
class PropertyResult:
    inequality: str
    samples: int
    worst_margin: float


def _wide_scalars(rng, n, corners=True):
    mag = 10.0 ** rng.uniform(-300.0, 3.0, n)
    mag[rng.random(n) < 0.02] = 0.0
    z = mag * np.exp(1j * rng.uniform(-np.pi, np.pi, n))
    if corners and n:
        fixed = np.array([0.0, 1e-300, 1e-15, 1e-15, 1e-300, 0.0])
        z = np.concatenate([z, fixed * np.exp(1j * rng.uniform(-np.pi, np.pi, fixed.size))])
    return z


def _field_pair(rng, modes=24, oversample=8):
    k = np.arange(-modes, modes + 1)
    p = rng.uniform(0.6, 2.0)
    base = (rng.standard_normal(2 * modes + 1) + 1j * rng.standard_normal(2 * modes + 1)) / (
        1.0 + np.abs(k)
    ) ** p
    bump = 10.0 ** rng.uniform(-3, 0) * (
        rng.standard_normal(2 * modes + 1) + 1j * rng.standard_normal(2 * modes + 1)
    ) / (1.0 + np.abs(k)) ** p
    grid = spectral.TorusGrid.for_modes(modes, 1, oversample)
    u = spectral.synthesize(spectral.SpectralField(grid, base))
    v = spectral.synthesize(spectral.SpectralField(grid, base + bump))
    return u, v


def _gather(results, label, report, samples):
    if not report.holds:
        raise PropertyViolation(report, samples)
    prev = results.get(label)
    if prev is None:
        results[label] = PropertyResult(label, samples, report.margin)
    else:
        results[label] = PropertyResult(
            label, prev.samples + samples, min(report.margin, prev.worst_margin)
        )


def property_suite(
    seed: int,
    scalar_pairs: int = 10**5,
    fields: int = 10**3,
    eps: float = 1e-3,
    bound_scale: float = 1.0,
) -> list:
    """All randomized inequality sweeps; raises PropertyViolation on any failure.

    bound_scale < 1 shrinks every bound and exists so the failure path
    itself can be exercised end to end (checker self-test).
    """
    rng = np.random.Generator(np.random.Philox(seed))
    results: dict = {}

    if scalar_pairs > 0:
        z1 = _wide_scalars(rng, scalar_pairs)
        z2 = _wide_scalars(rng, scalar_pairs)
        n = z1.size
        _gather(results, "reg_gap", nonlinear.reg_gap_check(z1, eps, bound_scale), n)
        _gather(
            results,
            "reg_pair_lipschitz",
            nonlinear.reg_pair_lipschitz_check(z1, z2, eps, bound_scale),
            n,
        )
        _gather(results, "pair_lipschitz", nonlinear.pair_lipschitz_check(z1, z2, eps, bound_scale), n)
        _gather(results, "imag_monotonicity", nonlinear.imag_monotonicity_check(z1, z2, bound_scale), n)
        for t, lam in ((0.1, -1.0), (1.0, -16.0)):
            _gather(
                results,
                "flow_pointwise_lipschitz",
                nonlinear.flow_pointwise_lipschitz_check(z1, z2, t, lam, bound_scale),
                n,
            )
            _gather(
                results,
                "reg_flow_gap",
                nonlinear.reg_flow_gap_check(z1, t, lam, eps, bound_scale),
                n,
            )

    if fields > 0:
        for _ in range(fields):
            u, v = _field_pair(rng)
            t = float(rng.uniform(0.0, 1.0))
            lam = float(-(10.0 ** rng.uniform(-1, 1.3)))
            _gather(results, "flow_l2_lipschitz", nonlinear.flow_l2_lipschitz_check(u, v, t, lam, bound_scale), 1)
            _gather(results, "upsilon_l2", nonlinear.upsilon_l2_check(u, v, eps, bound_scale), 1)
            _gather(
                results,
                "reg_flow_gradient",
                nonlinear.reg_flow_gradient_check(u, t, lam, eps, bound_scale),
                1,
            )
            f = spectral.forward(u)
            rep = spectral.inverse_inequality_check(f)
            scaled = bound_scale * rep.bound
            ineq = nonlinear.CheckReport(
                "inverse_inequality",
                rep.linf,
                scaled,
                1e-12 * max(1.0, scaled),
                rep.linf <= scaled + 1e-12 * max(1.0, scaled),
            )
            _gather(results, "inverse_inequality", ineq, 1)

            # projection rows need content above the cutoff
            s = float(rng.uniform(0.1, 1.0))
            small = max(2, int(rng.integers(2, 12)))
            proj = spectral.project(f, small)
            tail = f.coeffs.copy()
            c = f.grid.modes
            tail[c - small : c + small + 1] = 0.0
            tail_norm = float(np.sqrt(spectral.TORUS_PERIOD) * np.linalg.norm(tail))
            bound = bound_scale * small ** (-s) * spectral.hs_seminorm(f, s)
            _gather(
                results,
                "projection_error",
                nonlinear.CheckReport(
                    "projection_error",
                    tail_norm,
                    bound,
                    1e-12 * max(1.0, bound),
                    tail_norm <= bound + 1e-12 * max(1.0, bound),
                ),
                1,
            )
            half = spectral.hs_seminorm(spectral.SpectralField(f.grid, tail), s / 2)
            bound_h = bound_scale * small ** (-s / 2) * spectral.hs_seminorm(f, s)
            _gather(
                results,
                "projection_error_half",
                nonlinear.CheckReport(
                    "projection_error_half",
                    half,
                    bound_h,
                    1e-12 * max(1.0, bound_h),
                    half <= bound_h + 1e-12 * max(1.0, bound_h),
                ),
                1,
            )
            lhs = spectral.hs_seminorm(proj, s)
            bnd = bound_scale * spectral.hs_seminorm(f, s)
            _gather(
                results,
                "projection_contraction",
                nonlinear.CheckReport(
                    "projection_contraction",
                    lhs,
                    bnd,
                    1e-12 * max(1.0, bnd),
                    lhs <= bnd + 1e-12 * max(1.0, bnd),
                ),
                1,
            )

    return sorted(results.values(), key=lambda r: r.inequality)


def shift_bounds_suite(
    seed: int,
    *,
    per_side: int = 100,
    ts: tuple = (1e-3, 1e-2),
    c0: float = 0.1,
    kmax: int = 128,
) -> list:
    """Two-sided free-flow shift rows: random fields for the upper bound,
    window-supported fields for the lower; any violated row raises."""
    rng = np.random.Generator(np.random.Philox(seed))
    rows = []
    rs = (0.2, 0.5, 0.8, 1.0, 1.5, 2.0)
    grid = spectral.TorusGrid.for_modes(kmax)
    k = np.arange(-kmax, kmax + 1)

    for i in range(per_side):
        t = ts[i % len(ts)]
        r = rs[i % len(rs)]
        p = rng.uniform(0.6, 1.5)
        c = (rng.standard_normal(2 * kmax + 1) + 1j * rng.standard_normal(2 * kmax + 1)) / (
            1.0 + np.abs(k)
        ) ** p
        c[kmax] = 0.0
        rows.append(propagator.shift_bounds_row(spectral.SpectralField(grid, c), t, r, c0))

    for i in range(per_side):
        t = ts[i % len(ts)]
        r = rs[i % len(rs)]
        window = propagator.build_phase_window(c0, t)
        members = window.member_magnitudes(kmax)
        if members.size == 0:
            raise ValueError(f"window empty at t={t}, kmax={kmax}")
        c = np.zeros(2 * kmax + 1, dtype=np.complex128)
        amp = rng.standard_normal(members.size) + 1j * rng.standard_normal(members.size)
        c[kmax + members] = amp
        c[kmax - members] = rng.standard_normal(members.size) + 1j * rng.standard_normal(members.size)
        rows.append(propagator.shift_bounds_row(spectral.SpectralField(grid, c), t, r, c0))

    for row in rows:
        if not row.holds:
            raise PropertyViolation(
                nonlinear.CheckReport(
                    "shift_two_sided",
                    row.err,
                    row.upper,
                    1e-12 * max(1.0, row.upper),
                    False,
                    (row.r, row.t, row.lower),
                ),
                len(rows),
            )
    return rows
