"""Initial data families and their membership certificates.

Three families drive the experiments:

  * gausson: the closed-form solitary solution.  With a = -lam (1 - ln b^2)
    and integer drift zeta, u = b exp{i (zeta x - (a + zeta^2) t)
    + (lam/2)(x - 2 zeta t)^2} solves the equation exactly on the line,
    and its periodisation is spectrally indistinguishable from it while
    the bump stays away from the boundary (|u| at |x| = pi is
    b e^{lam pi^2 / 2}, about 5e-35 for lam = -16).

  * random_hs: u_k = a_k |k|^{-(s + beta)} with a_k uniform in the
    complex unit square and u_0 = 0.  Membership in H^s is quantified
    by sum (1 + k^2)^s |u_k|^2 <= 2^{s+1} / (2 beta - 1); the sampled
    sum sits far inside (|a_k|^2 averages 2/3, so truncated sums are
    bounded by roughly 2^{s+2} zeta(2 beta), still under the
    certificate for the scales used here).

  * power_singular: u0 = |x|^gamma e^{i ell x}, whose coefficients are
    shifted cosine moments c_m = (1/pi) int_0^pi x^gamma cos(m x) dx.
    Rescaling y = m x turns all of them into one cumulative integral
    G(Y) = int_0^Y y^gamma cos y dy sampled at Y = m pi, so the whole
    list costs one pass regardless of the cutoff, and dividing by
    pi m^{1+gamma} keeps accumulated rounding out of the small modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral
from .nonlinear import CheckReport

COEFF_REL_TOL = 1e-10


@dataclass(frozen=True)
class GaussonParams:
    lam: float
    b: float = 1.0
    zeta: int = 0

    def __post_init__(self):
        if self.lam >= 0.0:
            raise ValueError("the solitary profile needs lam < 0")
        if self.b <= 0.0:
            raise ValueError("amplitude b must be positive")
        if self.zeta != int(self.zeta):
            raise ValueError("drift zeta must be an integer for periodicity")
        object.__setattr__(self, "zeta", int(self.zeta))

    @property
    def a(self) -> float:
        # phase rate making the residual vanish identically (d = 1)
        return -self.lam * (1.0 - np.log(self.b**2))

    @property
    def boundary_magnitude(self) -> float:
        """|u(+-pi, 0)|, the periodisation defect scale."""
        return self.b * np.exp(0.5 * self.lam * np.pi**2)


def gausson_values(params: GaussonParams, x, t: float = 0.0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    shift = x - 2.0 * params.zeta * t
    phase = params.zeta * x - (params.a + params.zeta**2) * t
    return params.b * np.exp(1j * phase + 0.5 * params.lam * shift**2)


class GaussonEvaluator:
    """Picklable nodal evaluator at a fixed time."""

    def __init__(self, params: GaussonParams, t: float = 0.0):
        self.params = params
        self.t = float(t)

    def __call__(self, x) -> np.ndarray:
        return gausson_values(self.params, x, self.t)


def gausson_coeffs(params: GaussonParams, modes: int, oversample: int = 4) -> spectral.SpectralField:
    grid = spectral.TorusGrid.for_modes(modes, 1, oversample)
    vals = gausson_values(params, grid.axis_nodes)
    return spectral.forward(spectral.PhysicalField(grid, vals), modes=modes)


def gausson_residual(
    params: GaussonParams, modes: int = 200, oversample: int = 4, t: float = 0.0
) -> float:
    """Grid sup norm of i u_t + u_xx - lam u ln|u|^2 for the closed form.

    u_t is analytic and u_xx is the spectral derivative of the cutoff-N
    projection (the profile's modes beyond any reasonable cutoff
    underflow, while differentiating the raw grid transform would
    amplify its rounding floor by the square of the grid's top mode).
    The result is limited by the periodisation defect and rounding;
    anything above ~1e-10 means the closed form is wrong.
    """
    grid = spectral.TorusGrid.for_modes(modes, 1, oversample)
    x = grid.axis_nodes
    u = gausson_values(params, x, t)
    shift = x - 2.0 * params.zeta * t
    u_t = u * (-1j * (params.a + params.zeta**2) - 2.0 * params.zeta * params.lam * shift)
    c = spectral.forward(spectral.PhysicalField(grid, u), modes=modes)
    k = np.arange(-modes, modes + 1)
    curved = spectral.SpectralField(grid, -(k.astype(float) ** 2) * c.coeffs)
    u_xx = spectral.synthesize(curved).values
    log_sq = 2.0 * np.log(np.abs(u))  # |u| > 0 everywhere for b > 0
    residual = 1j * u_t + u_xx - params.lam * u * log_sq
    return float(np.max(np.abs(residual)))


@dataclass(frozen=True)
class RandomHsParams:
    s: float
    beta: float
    cutoff: int
    seed: int

    def __post_init__(self):
        if not 0.0 < self.s <= 1.0:
            raise ValueError("the rough family targets 0 < s <= 1")
        if self.beta <= 0.5:
            raise ValueError("beta > 1/2 is what makes the H^s sum finite")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")


def random_hs_coeffs(params: RandomHsParams) -> np.ndarray:
    """Centred coefficient list, |k| <= cutoff, zero mean mode.

    Philox keeps the stream stable across platforms; draw order is all
    real parts for k = -K..K, then all imaginary parts.
    """
    rng = np.random.Generator(np.random.Philox(params.seed))
    n = 2 * params.cutoff + 1
    re = 2.0 * rng.random(n) - 1.0
    im = 2.0 * rng.random(n) - 1.0
    k = np.arange(-params.cutoff, params.cutoff + 1, dtype=float)
    decay = np.abs(k) ** (params.s + params.beta)
    decay[params.cutoff] = 1.0
    coeffs = (re + 1j * im) / decay
    coeffs[params.cutoff] = 0.0
    return coeffs


def hs_membership_check(coeffs: np.ndarray, params: RandomHsParams) -> CheckReport:
    """sum (1+k^2)^s |u_k|^2 <= 2^{s+1} / (2 beta - 1), dimensionless."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    k = np.arange(-(coeffs.size // 2), coeffs.size // 2 + 1)
    lhs = float(np.sum((1.0 + k.astype(float) ** 2) ** params.s * np.abs(coeffs) ** 2))
    bound = 2.0 ** (params.s + 1.0) / (2.0 * params.beta - 1.0)
    slack = 1e-12 * max(1.0, bound)
    return CheckReport("hs_membership", lhs, bound, slack, lhs <= bound + slack)


@dataclass(frozen=True)
class PowerSingularParams:
    gamma: float
    ell: int
    cutoff: int

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.ell != int(self.ell):
            raise ValueError("the modulation ell must be an integer")
        if self.cutoff < abs(self.ell) + 1:
            raise ValueError("cutoff must be >= |ell| + 1")
        object.__setattr__(self, "ell", int(self.ell))


def _cosine_moments_once(gamma: float, m_max: int, quad: spectral.QuadratureSpec) -> np.ndarray:
    """c_m = (1/pi) int_0^pi x^gamma cos(m x) dx for m = 0..m_max.

    G(m pi) is accumulated with one Gauss panel per half-oscillation
    [(m-1) pi, m pi]; the head G(pi) uses v = y^{1+gamma} to remove the
    algebraic endpoint behaviour, on panels graded toward 0.
    """
    alpha = 1.0 + gamma

    def head_integrand(v):
        return np.cos(v ** (1.0 / alpha))

    v_top = np.pi**alpha
    graded = v_top * (0.5 ** np.arange(quad.levels - 1, -1, -1))
    breaks = np.concatenate(([0.0], graded))
    head = float(np.sum(spectral._panel_integrals(breaks, head_integrand, quad.points))) / alpha

    out = np.empty(m_max + 1)
    out[0] = np.pi**gamma / alpha
    if m_max >= 1:
        cuts = np.pi * np.arange(1, m_max + 1, dtype=float)

        def tail_integrand(y):
            return y**gamma * np.cos(y)

        if m_max >= 2:
            increments = spectral._panel_integrals(cuts, tail_integrand, quad.points)
            g = head + np.concatenate(([0.0], np.cumsum(increments)))
        else:
            g = np.array([head])
        m = np.arange(1, m_max + 1, dtype=float)
        out[1:] = g / (np.pi * m**alpha)
    return out


def power_cosine_moments(
    gamma: float, m_max: int, quad: spectral.QuadratureSpec | None = None
) -> np.ndarray:
    """Self-checked cosine moments of x^gamma; see _cosine_moments_once.

    The refinement comparison is absolute per mode, floored at
    1e-3 max|c| -- a pure relative target is unattainable where a
    moment vanishes exactly (gamma = 1 kills every even mode).
    """
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    quad = quad or spectral.QuadratureSpec(rel_tol=COEFF_REL_TOL)
    coarse = _cosine_moments_once(gamma, m_max, quad)
    fine = _cosine_moments_once(gamma, m_max, quad.refined())
    scale = np.maximum(np.abs(fine), 1e-3 * np.max(np.abs(fine)))
    err = np.abs(coarse - fine) / scale
    worst = int(np.argmax(err))
    if err[worst] > quad.rel_tol:
        raise spectral.QuadratureError(
            f"cosine-moment quadrature reached {err[worst]:.3e} at mode {worst}, "
            f"target {quad.rel_tol:.1e} (gamma={gamma})"
        )
    return coarse


def power_singular_coeffs(
    params: PowerSingularParams, quad: spectral.QuadratureSpec | None = None
) -> np.ndarray:
    """Centred coefficients of |x|^gamma e^{i ell x}: u_k = c_{|k - ell|}."""
    moments = power_cosine_moments(params.gamma, params.cutoff + abs(params.ell), quad)
    k = np.arange(-params.cutoff, params.cutoff + 1)
    return moments[np.abs(k - params.ell)].astype(np.complex128)


def gagliardo_bound_check(
    coeffs: np.ndarray, params: PowerSingularParams, s: float
) -> CheckReport:
    """Translation-form double integral against the closed-form budget.

    For the pure power |x|^gamma, |u(y+x) - u(y)| <= |x|^gamma gives

        integral <= (2 pi)^{2(gamma-s)+1} / ((gamma-s)(2(gamma-s)+1)),

    requiring s < gamma.  The modulated data is checked against the
    same constant; the margin observed in practice is an order of
    magnitude.
    """
    if not 0.0 < s < params.gamma:
        raise ValueError(f"the budget needs 0 < s < gamma, got s={s}, gamma={params.gamma}")
    lhs = spectral.gagliardo_form(np.asarray(coeffs, dtype=np.complex128), s)
    rho = params.gamma - s
    bound = spectral.TORUS_PERIOD ** (2.0 * rho + 1.0) / (rho * (2.0 * rho + 1.0))
    slack = 1e-12 * max(1.0, bound)
    return CheckReport("gagliardo_budget", lhs, bound, slack, lhs <= bound + slack)


@dataclass(frozen=True)
class InitialData:
    """Coefficient data plus the metadata the harness reports.

    hs_index is the Sobolev order driving the expected convergence rate
    (capped at 1, the scheme's maximal regime); hs_norm is the H^s norm
    of the truncated list, which for the borderline families grows
    logarithmically with the cutoff and is recorded as-is.
    """

    family: str
    coeffs: np.ndarray
    hs_index: float
    hs_norm: float
    params: dict
    evaluator: object = None


def make_gausson(lam: float, b: float = 1.0, zeta: int = 0, modes: int = 200) -> InitialData:
    params = GaussonParams(lam=lam, b=b, zeta=zeta)
    coeffs = gausson_coeffs(params, modes).coeffs
    return InitialData(
        family="gausson",
        coeffs=coeffs,
        hs_index=1.0,
        hs_norm=spectral.hs_norm(coeffs, 1.0),
        params={"lam": lam, "b": b, "zeta": zeta, "modes": modes},
        evaluator=GaussonEvaluator(params),
    )


def make_random_hs(s: float, beta: float, cutoff: int, seed: int) -> InitialData:
    params = RandomHsParams(s=s, beta=beta, cutoff=cutoff, seed=seed)
    coeffs = random_hs_coeffs(params)
    report = hs_membership_check(coeffs, params)
    if not report.holds:
        raise ValueError(f"sampled data escaped its H^s certificate: {report}")
    return InitialData(
        family="random_hs",
        coeffs=coeffs,
        hs_index=s,
        hs_norm=spectral.hs_norm(coeffs, s),
        params={"s": s, "beta": beta, "cutoff": cutoff, "seed": seed},
    )


def make_power_singular(gamma: float, ell: int, cutoff: int) -> InitialData:
    params = PowerSingularParams(gamma=gamma, ell=ell, cutoff=cutoff)
    coeffs = power_singular_coeffs(params)
    s = min(gamma + 0.5, 1.0)
    return InitialData(
        family="power_singular",
        coeffs=coeffs,
        hs_index=s,
        hs_norm=spectral.hs_norm(coeffs, s),
        params={"gamma": gamma, "ell": ell, "cutoff": cutoff},
    )
