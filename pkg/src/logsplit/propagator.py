"""Free Schrodinger propagator and its shift-error bounds.

The linear subflow is diagonal in Fourier space, multiplying mode k by
exp(-i |k|^2 t).  The L^2 distance it travels in time t obeys two-sided
estimates: with e_k = 2 |sin(|k|^2 t / 2)|,

    ||e^{i t Lap} v - v||^2 = |T|^d sum_k e_k^2 |v_k|^2,

and since e_k <= |k|^2 t pointwise,

    ||e^{i t Lap} v - v|| <= 2^{1 - r/2} t^{r/2} |v|_{H^r},   0 <= r <= 2.

A matching lower bound holds on the band of modes where sin(|k|^2 t/2)
is comparable to its argument: for 0 < c0 < 1 and 0 < t < 1 the window

    2 arcsin(c0) / t <= |k|^2 <= 2 sinc_inverse(c0) / t

guarantees e_k >= 2 c0 min(1, |k|^2 t / 2) >= c0 (|k|^2 t)^{r/2} ... the
report below evaluates the exact mode sum against both closed-form
bounds for batches of fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import spectral


def free_flow(field: spectral.SpectralField, t: float) -> spectral.SpectralField:
    """exp(i t Lap): multiply mode k by exp(-i |k|^2 t)."""
    k2 = spectral.sq_modes(field.grid.modes, field.grid.dim)
    phase = np.exp(-1j * t * k2)
    return spectral.SpectralField(field.grid, field.coeffs * phase)


def shift_error(field: spectral.SpectralField, t: float) -> float:
    """Exact ||e^{i t Lap} v - v||: mode sum of 4 sin^2(|k|^2 t / 2)."""
    k2 = spectral.sq_modes(field.grid.modes, field.grid.dim)
    weights = 4.0 * np.sin(0.5 * t * k2) ** 2
    total = float(np.sum(weights * np.abs(field.coeffs) ** 2))
    d = field.grid.dim
    return float(spectral.TORUS_PERIOD ** (0.5 * d) * np.sqrt(total))


def shift_upper_bound(field: spectral.SpectralField, t: float, r: float) -> float:
    """2^{1-r/2} t^{r/2} |v|_{H^r}, valid for 0 <= r <= 2, t >= 0."""
    if not 0.0 <= r <= 2.0:
        raise ValueError(f"order {r} outside [0, 2]")
    if t < 0.0:
        raise ValueError("t must be >= 0")
    return 2.0 ** (1.0 - 0.5 * r) * t ** (0.5 * r) * spectral.hs_seminorm(field, r)


def sinc_inverse(c: float, tol: float = 1e-12) -> float:
    """The solution y in (1, pi) of sin(y)/y = c, for 0 < c < sin 1.

    sin(y)/y decreases from sin 1 to 0 on (1, pi); plain bisection.
    The domain cap at sin 1 is what the windowed lower bound needs
    (it keeps sin >= c0 across the whole window), so tighter c0 are
    rejected here rather than downstream.
    """
    if not 0.0 < c < np.sin(1.0):
        raise ValueError(f"sinc_inverse needs 0 < c < sin(1), got {c}")
    lo, hi = 1.0, np.pi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if np.sin(mid) / mid > c:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PhaseWindow:
    """Squared-mode band on which |sin(|k|^2 t/2)| >= c0 |k|^2 t / 2."""

    c0: float
    t: float
    sq_lo: float
    sq_hi: float

    def member_sq_modes(self, modes: int, dim: int = 1) -> np.ndarray:
        """Boolean mask over the centred cube of |k|^2 in the window."""
        k2 = spectral.sq_modes(modes, dim)
        return (k2 >= self.sq_lo) & (k2 <= self.sq_hi)

    def member_magnitudes(self, kmax: int) -> np.ndarray:
        """Positive |k| <= kmax with |k|^2 in the window; may be empty."""
        k = np.arange(1, kmax + 1)
        return k[(k * k >= self.sq_lo) & (k * k <= self.sq_hi)]


def build_phase_window(c0: float, t: float) -> PhaseWindow:
    """Window 2 arcsin(c0)/t <= |k|^2 <= 2 sinc_inverse(c0)/t.

    Inside it, 2|sin(|k|^2 t/2)| is squeezed between 2 c0 and
    c0 |k|^2 t, giving the lower shift bound.  Requires 0 < t < 1;
    the window length in |k|^2 scales like 1/t and may still contain
    no integer squares (an empty member set, not an error).
    """
    if not 0.0 < t < 1.0:
        raise ValueError(f"the window bound needs 0 < t < 1, got {t}")
    lo = 2.0 * np.arcsin(c0) / t
    hi = 2.0 * sinc_inverse(c0) / t  # also validates c0
    return PhaseWindow(c0, t, lo, hi)


def shift_lower_bound(field: spectral.SpectralField, window: PhaseWindow, r: float) -> float:
    """Windowed lower bound on the shift error.

    On the window, theta_k = |k|^2 t / 2 lies in [arcsin(c0),
    sinc_inverse(c0)], where both sin(theta) >= c0 theta (sinc is
    decreasing there) and sin(theta) >= c0 (needs sinc_inverse(c0) >= 1,
    i.e. c0 <= sin 1, so the right endpoint value c0*sinc_inverse(c0)
    stays above c0).  Interpolating the two with exponents (r/2, 1-r/2),

        e_k = 2 sin(theta_k) >= 2^{1-r/2} c0 (|k|^2 t)^{r/2},

    and summing over window modes gives the returned value

        2^{1-r/2} c0 t^{r/2} |T|^{d/2} ( sum_win |k|^{2r} |v_k|^2 )^{1/2}.
    """
    if not 0.0 <= r <= 2.0:
        raise ValueError(f"order {r} outside [0, 2]")
    if window.c0 > np.sin(1.0):
        raise ValueError("the interpolated lower bound needs c0 <= sin(1)")
    mask = window.member_sq_modes(field.grid.modes, field.grid.dim)
    k2 = spectral.sq_modes(field.grid.modes, field.grid.dim)
    w = np.where(mask, k2.astype(float), 0.0) ** r
    w = np.where(mask, w, 0.0)
    partial = float(np.sum(w * np.abs(field.coeffs) ** 2))
    d = field.grid.dim
    return float(
        2.0 ** (1.0 - 0.5 * r)
        * window.c0
        * window.t ** (0.5 * r)
        * spectral.TORUS_PERIOD ** (0.5 * d)
        * np.sqrt(partial)
    )


@dataclass(frozen=True)
class ShiftBoundsRow:
    """One field/time sample of the two-sided shift estimate."""

    r: float
    t: float
    c0: float
    err: float
    upper: float
    lower: float

    @property
    def holds(self) -> bool:
        slack = 1e-12 * max(1.0, self.upper)
        return self.lower <= self.err + slack and self.err <= self.upper + slack


def shift_bounds_row(
    field: spectral.SpectralField, t: float, r: float, c0: float
) -> ShiftBoundsRow:
    """Evaluate exact shift error against both closed-form bounds."""
    window = build_phase_window(c0, t)
    return ShiftBoundsRow(
        r=r,
        t=t,
        c0=c0,
        err=shift_error(field, t),
        upper=shift_upper_bound(field, t, r),
        lower=shift_lower_bound(field, window, r),
    )
