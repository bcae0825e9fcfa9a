"""Fourier spectral toolbox on the periodic torus [-pi, pi)^d.

Conventions.  A function u on T^d = [-pi, pi)^d is expanded as

    u(x) = sum_k u_k e^{i k.x},      u_k = |T|^{-d} int_{T^d} u e^{-i k.x} dx,

with |T| = 2 pi, and a resolution-N field keeps the centred cube
K_N = {k : |k_j| <= N}.  Nodal values live on the uniform grid
x_j = -pi + 2 pi j / M with M >= 2N+1 points per dimension; the discrete
transform below is the trapezoidal approximation of the coefficient
integral and is exact for trigonometric polynomials of degree <= M-N-1.

Norms are frequency-side sums,

    ||u||^2       = |T|^d sum   |u_k|^2,
    ||u||_{H^s}^2 = |T|^d sum   (1+|k|^2)^s |u_k|^2,
    |u|_{H^s}^2   = |T|^d sum'  |k|^{2s} |u_k|^2     (zero mode excluded),

and for d=1, 0 < s < 1 the translation form of the Gagliardo double
integral factorises over modes:

    int_T int_T |u(y+x) - u(y)|^2 / |x|^{1+2s} dy dx
        = |T| sum' |u_n|^2 B_n(s),
    B_n(s) = 4 int_T sin^2(n x/2) / |x|^{1+2s} dx.

The kernel weights B_n are computed by singularity-graded composite
Gauss panels after substituting away the integrable |x|^{1-2s} endpoint
weight; see mode_kernel_weights.
"""

from __future__ import annotations

import functools
import struct
from dataclasses import dataclass

import numpy as np

TORUS_PERIOD = 2.0 * np.pi

COEFF_MAGIC = b"LOGSP1"
_COEFF_HEADER = struct.Struct("<6sqqQdd")  # magic, dim, cutoff, seed, s, beta


class QuadratureError(RuntimeError):
    """A singular quadrature missed its accuracy target."""


def next_pow2(n: int) -> int:
    """Smallest power of two >= n."""
    if n < 1:
        raise ValueError("next_pow2 requires a positive argument")
    return 1 << (int(n) - 1).bit_length()


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass(frozen=True)
class TorusGrid:
    """Uniform nodal grid on [-pi, pi)^d paired with a mode cutoff N.

    nodes_per_dim is the quadrature resolution M; M >= 2N+1 keeps the
    retained modes alias-free.
    """

    dim: int
    modes: int
    nodes_per_dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.modes < 1:
            raise ValueError("modes must be >= 1")
        if self.nodes_per_dim < 2 * self.modes + 1:
            raise ValueError(
                f"need nodes_per_dim >= 2N+1 = {2 * self.modes + 1}, "
                f"got {self.nodes_per_dim}"
            )

    @classmethod
    def for_modes(cls, modes: int, dim: int = 1, oversample: int = 1) -> "TorusGrid":
        """Grid with M = smallest power of two >= oversample*(2N+1)."""
        if oversample < 1:
            raise ValueError("oversample must be >= 1")
        return cls(dim, modes, next_pow2(oversample * (2 * modes + 1)))

    @property
    def axis_nodes(self) -> np.ndarray:
        """Per-axis nodes x_j = -pi + 2 pi j / M."""
        m = self.nodes_per_dim
        return -np.pi + TORUS_PERIOD * np.arange(m) / m

    def nodes(self) -> np.ndarray:
        """All nodes; shape (M,) for d=1, else (M,)*d + (d,)."""
        if self.dim == 1:
            return self.axis_nodes
        axes = np.meshgrid(*([self.axis_nodes] * self.dim), indexing="ij")
        return np.stack(axes, axis=-1)


@dataclass(frozen=True)
class SpectralField:
    """Coefficients on the centred cube K_N, indexed k+N per dimension."""

    grid: TorusGrid
    coeffs: np.ndarray

    def __post_init__(self):
        want = (2 * self.grid.modes + 1,) * self.grid.dim
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.shape != want:
            raise ValueError(f"coefficient shape {arr.shape} != {want}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("non-finite coefficient")
        object.__setattr__(self, "coeffs", arr)


@dataclass(frozen=True)
class PhysicalField:
    """Nodal values over the full grid."""

    grid: TorusGrid
    values: np.ndarray

    def __post_init__(self):
        want = (self.grid.nodes_per_dim,) * self.grid.dim
        arr = np.asarray(self.values, dtype=np.complex128)
        if arr.shape != want:
            raise ValueError(f"value shape {arr.shape} != {want}")
        bad = ~np.isfinite(arr)
        if bad.any():
            where = tuple(int(i) for i in np.argwhere(bad)[0])
            raise ValueError(f"non-finite value at node {where}")
        object.__setattr__(self, "values", arr)


@functools.lru_cache(maxsize=64)
def _mode_bins(nodes_per_dim: int, modes: int) -> np.ndarray:
    bins = np.arange(-modes, modes + 1) % nodes_per_dim
    bins.flags.writeable = False
    return bins


@functools.lru_cache(maxsize=64)
def _mode_signs(modes: int, dim: int) -> np.ndarray:
    # e^{+-i k pi} = (-1)^k, the node-offset phase for x_0 = -pi.
    axis = np.where(np.arange(-modes, modes + 1) % 2 == 0, 1.0, -1.0)
    out = axis
    for _ in range(dim - 1):
        out = np.multiply.outer(out, axis)
    out.flags.writeable = False
    return out


@functools.lru_cache(maxsize=64)
def sq_modes(modes: int, dim: int = 1) -> np.ndarray:
    """|k|^2 as an integer array over the centred cube."""
    axis = np.arange(-modes, modes + 1) ** 2
    out = axis
    for _ in range(dim - 1):
        out = np.add.outer(out, axis)
    out.flags.writeable = False
    return out


def forward(field: PhysicalField, modes: int | None = None) -> SpectralField:
    """Discrete coefficients on K_N from nodal values (trapezoidal rule).

    Exact for trigonometric polynomials of degree <= M-N-1; higher modes
    alias according to the discrete transform.
    """
    grid = field.grid
    n = grid.modes if modes is None else int(modes)
    if 2 * n + 1 > grid.nodes_per_dim:
        raise ValueError(f"cutoff {n} needs M >= {2 * n + 1}, grid has {grid.nodes_per_dim}")
    m = grid.nodes_per_dim
    c = np.fft.fftn(field.values) / float(m**grid.dim)
    bins = _mode_bins(m, n)
    window = c[np.ix_(*([bins] * grid.dim))]
    out = window * _mode_signs(n, grid.dim)
    return SpectralField(TorusGrid(grid.dim, n, m), out)


def synthesize(field: SpectralField, oversample: int | None = None) -> PhysicalField:
    """Nodal values of the trigonometric polynomial.

    With oversample=None the field's own grid resolution is used;
    otherwise the target grid is TorusGrid.for_modes(N, d, oversample).
    """
    grid = field.grid
    if oversample is not None:
        grid = TorusGrid.for_modes(field.grid.modes, field.grid.dim, oversample)
    m, n, dim = grid.nodes_per_dim, grid.modes, grid.dim
    buf = np.zeros((m,) * dim, dtype=np.complex128)
    bins = _mode_bins(m, n)
    buf[np.ix_(*([bins] * dim))] = field.coeffs * _mode_signs(n, dim)
    values = np.fft.ifftn(buf) * float(m**dim)
    return PhysicalField(grid, values)


def _as_coeffs(source) -> tuple[np.ndarray, int, int]:
    """(coeffs, N, dim) from a SpectralField or a centred 1-d list."""
    if isinstance(source, SpectralField):
        return source.coeffs, source.grid.modes, source.grid.dim
    arr = np.asarray(source, dtype=np.complex128)
    if arr.ndim != 1 or arr.size % 2 == 0 or arr.size < 3:
        raise ValueError("expected a centred coefficient list of odd length >= 3")
    return arr, (arr.size - 1) // 2, 1


def project(source, modes: int) -> SpectralField:
    """Truncate to the centred cube K_N (the projection Pi_N); idempotent."""
    coeffs, cutoff, dim = _as_coeffs(source)
    n = int(modes)
    if n < 1:
        raise ValueError("modes must be >= 1")
    if cutoff < n:
        raise ValueError(f"cannot project cutoff {cutoff} up to {n}")
    sl = (slice(cutoff - n, cutoff + n + 1),) * dim
    out = coeffs[sl]
    if isinstance(source, SpectralField):
        grid = TorusGrid(dim, n, source.grid.nodes_per_dim)
    else:
        grid = TorusGrid.for_modes(n, dim)
    return SpectralField(grid, out.copy())


def zero_pad(source, modes: int) -> SpectralField:
    """Embed into a larger cube K_N (right inverse of project)."""
    coeffs, cutoff, dim = _as_coeffs(source)
    n = int(modes)
    if n < cutoff:
        raise ValueError(f"cannot pad cutoff {cutoff} down to {n}")
    out = np.zeros((2 * n + 1,) * dim, dtype=np.complex128)
    sl = (slice(n - cutoff, n + cutoff + 1),) * dim
    out[sl] = coeffs
    return SpectralField(TorusGrid.for_modes(n, dim), out)


def l2_norm(field) -> float:
    """|T|^{d/2} (sum |u_k|^2)^{1/2}; nodal fields use the grid quadrature."""
    if isinstance(field, PhysicalField):
        d = field.grid.dim
        scale = (TORUS_PERIOD / field.grid.nodes_per_dim) ** (0.5 * d)
        return float(scale * np.linalg.norm(field.values.ravel()))
    coeffs, _, dim = _as_coeffs(field)
    return float(TORUS_PERIOD ** (0.5 * dim) * np.linalg.norm(coeffs.ravel()))


def _check_sobolev_index(s: float) -> float:
    s = float(s)
    if not 0.0 <= s <= 2.0:
        raise ValueError(f"Sobolev index {s} outside [0, 2]")
    return s


def hs_norm(source, s: float) -> float:
    """|T|^{d/2} (sum (1+|k|^2)^s |u_k|^2)^{1/2}."""
    s = _check_sobolev_index(s)
    coeffs, n, dim = _as_coeffs(source)
    w = (1.0 + sq_modes(n, dim)) ** s
    total = float(np.sum(w * np.abs(coeffs) ** 2))
    return float(TORUS_PERIOD ** (0.5 * dim) * np.sqrt(total))


def hs_seminorm(source, s: float) -> float:
    """|T|^{d/2} (sum_{k != 0} |k|^{2s} |u_k|^2)^{1/2}."""
    s = _check_sobolev_index(s)
    coeffs, n, dim = _as_coeffs(source)
    k2 = sq_modes(n, dim)
    w = np.where(k2 > 0, k2.astype(float), 1.0) ** s
    w = np.where(k2 > 0, w, 0.0)
    total = float(np.sum(w * np.abs(coeffs) ** 2))
    return float(TORUS_PERIOD ** (0.5 * dim) * np.sqrt(total))


@functools.lru_cache(maxsize=16)
def _interp_sq_modes(nodes_per_dim: int, dim: int) -> np.ndarray:
    axis = (np.fft.fftfreq(nodes_per_dim) * nodes_per_dim).astype(np.int64) ** 2
    out = axis
    for _ in range(dim - 1):
        out = np.add.outer(out, axis)
    out.flags.writeable = False
    return out


def nodal_hs_seminorm(field: PhysicalField, s: float) -> float:
    """H^s seminorm of the full M-mode trigonometric interpolant.

    Unlike hs_seminorm this keeps every grid-resolvable mode, so it
    approximates the continuum seminorm of a non-band-limited function
    up to aliasing of the unresolved tail.
    """
    s = _check_sobolev_index(s)
    m, dim = field.grid.nodes_per_dim, field.grid.dim
    c = np.fft.fftn(field.values) / float(m**dim)
    k2 = _interp_sq_modes(m, dim)
    w = np.where(k2 > 0, k2.astype(float), 1.0) ** s
    w = np.where(k2 > 0, w, 0.0)
    total = float(np.sum(w * np.abs(c) ** 2))
    return float(TORUS_PERIOD ** (0.5 * dim) * np.sqrt(total))


@dataclass(frozen=True)
class QuadratureSpec:
    """Singular-quadrature controls for the kernel weights B_n."""

    levels: int = 40      # graded panels toward the singular end, ratio 1/2
    points: int = 16      # Gauss-Legendre nodes per panel
    rel_tol: float = 1e-8

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(self.levels + 20, self.points + 8, self.rel_tol)


def _gauss_rule(points: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(points)


def _panel_integrals(breaks: np.ndarray, f, points: int) -> np.ndarray:
    """Gauss-Legendre integral of f over each [breaks[i], breaks[i+1]]."""
    x, w = _gauss_rule(points)
    a = breaks[:-1, None]
    b = breaks[1:, None]
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    vals = f(nodes)
    return np.sum(0.5 * (b - a) * w[None, :] * vals, axis=1)


def _kernel_weights_once(n_max: int, s: float, quad: QuadratureSpec) -> np.ndarray:
    """B_n(s) for n = 1..n_max at one quadrature resolution.

    Rescaling y = n x / 2 gives B_n = 8 (n/2)^{2s} J(n pi / 2) with
    J(Y) = int_0^Y sin^2(y) y^{-1-2s} dy, so one cumulative pass serves
    every n.  The singular head J(pi/2) is integrated after v = y^{2-2s}
    (removing the y^{1-2s} endpoint weight) on panels graded toward 0;
    each smooth increment [j pi/2, (j+1) pi/2] spans half an oscillation
    period and takes a single panel.
    """
    beta = 2.0 - 2.0 * s

    def head_integrand(v):
        y = v ** (1.0 / beta)
        return np.sinc(y / np.pi) ** 2

    v_top = (0.5 * np.pi) ** beta
    graded = v_top * (0.5 ** np.arange(quad.levels - 1, -1, -1))
    breaks = np.concatenate(([0.0], graded))
    head = float(np.sum(_panel_integrals(breaks, head_integrand, quad.points))) / beta

    n = np.arange(1, n_max + 1, dtype=float)
    if n_max > 1:
        cuts = 0.5 * np.pi * np.arange(1, n_max + 1, dtype=float)

        def tail_integrand(y):
            return np.sin(y) ** 2 * y ** (-1.0 - 2.0 * s)

        increments = _panel_integrals(cuts, tail_integrand, quad.points)
        j_cum = head + np.concatenate(([0.0], np.cumsum(increments)))
    else:
        j_cum = np.array([head])
    return 8.0 * (0.5 * n) ** (2.0 * s) * j_cum


def mode_kernel_weights(
    n_max: int, s: float, quad: QuadratureSpec | None = None
) -> np.ndarray:
    """B_n(s) = 4 int_T sin^2(n x/2) |x|^{-1-2s} dx for n = 1..n_max.

    The integrand behaves like |x|^{1-2s} near 0 (integrable for
    0 < s < 1).  Raises QuadratureError when the graded rule and its
    refinement disagree beyond quad.rel_tol.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"kernel weights need 0 < s < 1, got {s}")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    quad = quad or QuadratureSpec()
    coarse = _kernel_weights_once(n_max, s, quad)
    fine = _kernel_weights_once(n_max, s, quad.refined())
    achieved = float(np.max(np.abs(coarse - fine) / np.abs(fine)))
    if achieved > quad.rel_tol:
        raise QuadratureError(
            f"kernel-weight quadrature reached {achieved:.3e}, "
            f"target {quad.rel_tol:.1e} (s={s}, n_max={n_max})"
        )
    return coarse


def gagliardo_form(source, s: float, quad: QuadratureSpec | None = None) -> float:
    """Translation-form Gagliardo double integral (squared seminorm), d=1.

    Returns |T| sum_{n != 0} |u_n|^2 B_n(s), i.e. the value of
    int_T int_T |u(y+x)-u(y)|^2 / |x|^{1+2s} dy dx.
    """
    if not 0.0 < float(s) < 1.0:
        raise ValueError(f"gagliardo_form needs 0 < s < 1, got {s}")
    coeffs, n, dim = _as_coeffs(source)
    if dim != 1:
        raise ValueError("gagliardo_form is implemented for d=1 only")
    sq = np.abs(coeffs) ** 2
    pair = sq[n + 1 :] + sq[n - 1 :: -1]  # |u_n|^2 + |u_{-n}|^2, n = 1..N
    if not np.any(pair > 0.0):
        return 0.0
    weights = mode_kernel_weights(n, float(s), quad)
    return float(TORUS_PERIOD * np.sum(weights * pair))


def equivalence_ratio_range(
    n_max: int, s: float, quad: QuadratureSpec | None = None
) -> tuple[float, float]:
    """(min, max) of B_n(s) |n|^{-2s} over n = 1..n_max.

    Per-mode ratio of the Gagliardo form to the squared frequency-side
    seminorm; two-sided boundedness is the norm-equivalence statement.
    """
    weights = mode_kernel_weights(n_max, s, quad)
    n = np.arange(1, n_max + 1, dtype=float)
    ratio = weights / n ** (2.0 * s)
    return float(ratio.min()), float(ratio.max())


@dataclass(frozen=True)
class InverseInequalityReport:
    linf: float
    l2: float
    bound: float
    holds: bool


def inverse_inequality_check(
    field: SpectralField, oversample: int = 8
) -> InverseInequalityReport:
    """Check ||u||_inf <= ((2N+1)/|T|)^{d/2} ||u|| on an oversampled grid.

    The sup norm is approximated by the grid maximum (oversample >= 8),
    which can only understate the left side.
    """
    if oversample < 8:
        raise ValueError("inverse-inequality checks need oversample >= 8")
    phys = synthesize(field, oversample=oversample)
    linf = float(np.max(np.abs(phys.values)))
    l2 = l2_norm(field)
    d = field.grid.dim
    bound = ((2 * field.grid.modes + 1) / TORUS_PERIOD) ** (0.5 * d) * l2
    holds = linf <= bound * (1.0 + 1e-12)
    return InverseInequalityReport(linf, l2, bound, holds)


@dataclass(frozen=True)
class CoefficientFile:
    """Parsed coefficient artifact: a centred list plus generation metadata."""

    coeffs: np.ndarray
    dim: int
    cutoff: int
    seed: int
    s: float
    beta: float


def write_coeff_file(
    path, coeffs, *, seed: int = 0, s: float = 0.0, beta: float = 0.0
) -> None:
    """Binary coefficient artifact: LOGSP1 header + interleaved re/im floats.

    Header fields (little endian): magic, dim, cutoff K, RNG seed,
    s, beta; payload is (re, im) float64 pairs for k = -K..K.
    """
    arr, cutoff, dim = _as_coeffs(coeffs)
    payload = np.empty(2 * arr.size, dtype="<f8")
    payload[0::2] = arr.real
    payload[1::2] = arr.imag
    header = _COEFF_HEADER.pack(COEFF_MAGIC, dim, cutoff, int(seed) & (2**64 - 1), float(s), float(beta))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_coeff_file(path) -> CoefficientFile:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _COEFF_HEADER.size:
        raise ValueError(f"{path}: truncated coefficient file")
    magic, dim, cutoff, seed, s, beta = _COEFF_HEADER.unpack_from(raw)
    if magic != COEFF_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if dim != 1:
        raise ValueError(f"{path}: only d=1 coefficient files are supported, got d={dim}")
    count = 2 * cutoff + 1
    body = raw[_COEFF_HEADER.size :]
    if len(body) != 16 * count:
        raise ValueError(f"{path}: payload holds {len(body)} bytes, expected {16 * count}")
    flat = np.frombuffer(body, dtype="<f8")
    coeffs = flat[0::2] + 1j * flat[1::2]
    if not np.all(np.isfinite(flat)):
        raise ValueError(f"{path}: non-finite coefficient")
    return CoefficientFile(coeffs, int(dim), int(cutoff), int(seed), float(s), float(beta))


def write_coeff_csv(path, coeffs) -> None:
    """Inspection export: rows k, re, im with round-trip float formatting."""
    arr, cutoff, _ = _as_coeffs(coeffs)
    ks = np.arange(-cutoff, cutoff + 1)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("k,re,im\n")
        for k, c in zip(ks, arr):
            fh.write(f"{k},{_fmt(c.real)},{_fmt(c.imag)}\n")
