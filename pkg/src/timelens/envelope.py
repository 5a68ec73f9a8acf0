"""Sampled complex envelopes, their spectra, constructors, and metrics.

Conventions:
    * Time axis in ps; angular frequency axis in rad/ps (offset from the
      carrier, co-moving frame — absolute carrier phase and group delay are
      not tracked).
    * Envelope samples have units ps^(-1/2) so that energy = sum(|a|^2) * dt
      is dimensionless.
    * ``to_frequency``/``to_time`` form a unitary pair:
      A(w) = (1/sqrt(2*pi)) * integral a(t) exp(-i w t) dt and back, so
      Parseval holds exactly in the discrete approximation:
      sum(|a|^2) dt == sum(|A|^2) dw.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    DegenerateInputError,
    InsufficientSupportError,
    WindowOverflowError,
)
from .grid import TimeGrid

LN2 = float(np.log(2.0))

#: Amplitude threshold (relative to peak) below which boundary samples are
#: considered leakage-free. Shared by the wrap-around checks.
BOUNDARY_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SampledEnvelope:
    """Complex field envelope sampled on a uniform time grid.

    Attributes:
        grid: the shared time grid.
        samples: complex amplitudes per grid point, shape (n_samples,).
        carrier_wavelength_nm: metadata label for the optical carrier; may be
            None for carrier-agnostic waveforms (e.g. pump envelopes).
    """

    grid: TimeGrid
    samples: np.ndarray
    carrier_wavelength_nm: float | None = None

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.n_samples,):
            raise ValueError(
                f"samples shape {samples.shape} does not match grid "
                f"({self.grid.n_samples},)"
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def with_samples(self, samples: np.ndarray) -> "SampledEnvelope":
        """Same grid and carrier, new sample values."""
        return SampledEnvelope(self.grid, samples, self.carrier_wavelength_nm)

    def with_carrier(self, carrier_wavelength_nm: float | None) -> "SampledEnvelope":
        return SampledEnvelope(self.grid, self.samples, carrier_wavelength_nm)


@dataclass(frozen=True)
class SpectralEnvelope:
    """Complex spectral envelope on the grid-conjugate frequency axis.

    The originating :class:`TimeGrid` is retained so the inverse transform is
    exact; ``omegas`` are angular-frequency offsets from the carrier in
    rad/ps.
    """

    grid: TimeGrid
    samples: np.ndarray
    carrier_wavelength_nm: float | None = None

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.complex128)
        if samples.shape != (self.grid.n_samples,):
            raise ValueError(
                f"samples shape {samples.shape} does not match grid "
                f"({self.grid.n_samples},)"
            )
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def omegas(self) -> np.ndarray:
        return self.grid.omegas

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def with_samples(self, samples: np.ndarray) -> "SpectralEnvelope":
        return SpectralEnvelope(self.grid, samples, self.carrier_wavelength_nm)


AnyEnvelope = Union[SampledEnvelope, SpectralEnvelope]


def _alternating_signs(n: int) -> np.ndarray:
    """(-1)**k for k = 0..n-1; re-centers the FFT so that index n//2 is
    zero frequency on the centered axis."""
    signs = np.ones(n)
    signs[1::2] = -1.0
    return signs


def to_frequency(env: SampledEnvelope) -> SpectralEnvelope:
    """Unitary transform to the carrier-relative angular-frequency domain.

    A(w_n) = (dt/sqrt(2*pi)) * sum_k a(t_k) exp(-i w_n t_k), evaluated via a
    single FFT with the phase factors required by the centered axes (t_0 may
    be nonzero and w runs over (k - n/2) * dw).
    """
    grid = env.grid
    n = grid.n_samples
    signs = _alternating_signs(n)
    spectrum = np.fft.fft(env.samples * signs)
    spectrum *= grid.dt / np.sqrt(2.0 * np.pi)
    spectrum *= np.exp(-1j * grid.omegas * grid.t0)
    return SpectralEnvelope(grid, spectrum, env.carrier_wavelength_nm)


def to_time(spec: SpectralEnvelope) -> SampledEnvelope:
    """Inverse of :func:`to_frequency` (exact round trip)."""
    grid = spec.grid
    n = grid.n_samples
    signs = _alternating_signs(n)
    work = spec.samples * np.exp(1j * grid.omegas * grid.t0)
    samples = np.fft.ifft(work) * signs
    samples *= n * grid.domega / np.sqrt(2.0 * np.pi)
    return SampledEnvelope(grid, samples, spec.carrier_wavelength_nm)


def gaussian_pulse(
    grid: TimeGrid,
    fwhm: float,
    center: float = 0.0,
    amplitude: complex = 1.0,
    carrier_wavelength_nm: float | None = None,
) -> SampledEnvelope:
    """Gaussian envelope amplitude * exp(-2*ln2*((t-center)/fwhm)^2).

    ``fwhm`` is the intensity full width at half maximum in ps.

    Raises:
        WindowOverflowError: if the 4*fwhm extent around ``center`` does not
            fit the grid window.
    """
    if not (fwhm > 0.0 and np.isfinite(fwhm)):
        raise ValueError(f"fwhm must be positive, got {fwhm!r}")
    if not grid.contains(center - 2.0 * fwhm, center + 2.0 * fwhm):
        raise WindowOverflowError(
            f"gaussian pulse (fwhm={fwhm} ps, center={center} ps) needs a "
            f"4*fwhm extent; grid window is [{grid.t0}, "
            f"{grid.t0 + (grid.n_samples - 1) * grid.dt}] ps"
        )
    t = grid.times
    samples = amplitude * np.exp(-2.0 * LN2 * ((t - center) / fwhm) ** 2)
    return SampledEnvelope(grid, samples, carrier_wavelength_nm)


def time_bin_pulse(
    grid: TimeGrid,
    bin_fwhm: float,
    separation: float,
    relative_phase: float = 0.0,
    carrier_wavelength_nm: float | None = None,
) -> SampledEnvelope:
    """Two-bin coherent waveform: early and late Gaussian bins.

    a(t) = 1/2 * g(t + separation/2) + 1/2 * e^{i relative_phase} *
    g(t - separation/2) with g a unit-peak Gaussian of intensity FWHM
    ``bin_fwhm``.  ``separation`` is the early-to-late peak distance in ps;
    the total pattern width between outermost half-maximum crossings is
    separation + bin_fwhm.
    """
    if not (bin_fwhm > 0.0 and np.isfinite(bin_fwhm)):
        raise ValueError(f"bin_fwhm must be positive, got {bin_fwhm!r}")
    if separation < 0.0:
        raise ValueError(f"separation must be nonnegative, got {separation!r}")
    half = 0.5 * separation
    if not grid.contains(-half - 2.0 * bin_fwhm, half + 2.0 * bin_fwhm):
        raise WindowOverflowError(
            f"time-bin pulse (bin_fwhm={bin_fwhm} ps, separation={separation} "
            "ps) exceeds the grid window"
        )
    t = grid.times
    early = np.exp(-2.0 * LN2 * ((t + half) / bin_fwhm) ** 2)
    late = np.exp(-2.0 * LN2 * ((t - half) / bin_fwhm) ** 2)
    samples = 0.5 * early + 0.5 * np.exp(1j * relative_phase) * late
    return SampledEnvelope(grid, samples, carrier_wavelength_nm)


def _axis_and_step(env: AnyEnvelope) -> tuple[np.ndarray, float]:
    if isinstance(env, SampledEnvelope):
        return env.times, env.grid.dt
    return env.omegas, env.grid.domega


def fwhm(env: AnyEnvelope) -> float:
    """Intensity full width at half maximum, by linear interpolation.

    Multi-lobe profiles use the dominant lobe: the width is measured between
    the first half-maximum crossings walking outward from the global
    intensity peak.

    Raises:
        DegenerateInputError: all-zero envelope or no half-maximum crossing
            inside the window.
    """
    axis, _ = _axis_and_step(env)
    intensity = env.intensity
    peak_index = int(np.argmax(intensity))
    peak = intensity[peak_index]
    if peak == 0.0:
        raise DegenerateInputError("fwhm of an all-zero envelope is undefined")
    half = 0.5 * peak

    def crossing(direction: int) -> float:
        i = peak_index
        while 0 <= i + direction < len(intensity):
            j = i + direction
            if intensity[j] < half:
                # linear interpolation between samples i (>= half) and j (< half)
                frac = (intensity[i] - half) / (intensity[i] - intensity[j])
                return axis[i] + frac * (axis[j] - axis[i])
            i = j
        raise DegenerateInputError(
            "no half-maximum crossing inside the window; profile too wide"
        )

    return crossing(+1) - crossing(-1)


def energy(env: AnyEnvelope) -> float:
    """L2 norm: sum(|a|^2) * step (dimensionless for time-domain envelopes)."""
    _, step = _axis_and_step(env)
    return float(np.sum(env.intensity) * step)


def overlap(a: AnyEnvelope, b: AnyEnvelope) -> complex:
    """Normalized inner product sum(conj(a)*b)*step / sqrt(Ea*Eb).

    |overlap| == 1 iff the envelopes are proportional.  Both arguments must
    share the same grid and domain.

    Raises:
        DegenerateInputError: either envelope has zero energy.
    """
    if type(a) is not type(b) or a.grid != b.grid:
        raise ValueError("overlap requires two envelopes on the same grid and domain")
    _, step = _axis_and_step(a)
    ea = energy(a)
    eb = energy(b)
    if ea == 0.0 or eb == 0.0:
        raise DegenerateInputError("overlap with a zero-energy envelope is undefined")
    inner = np.sum(np.conjugate(a.samples) * b.samples) * step
    return complex(inner / np.sqrt(ea * eb))


def intensity_overlap(a: AnyEnvelope, b: AnyEnvelope) -> float:
    """Normalized correlation of the two intensity profiles (phase-blind).

    sum(Ia*Ib) / sqrt(sum(Ia^2)*sum(Ib^2)); equals 1 iff the intensity
    profiles are proportional.
    """
    if type(a) is not type(b) or a.grid != b.grid:
        raise ValueError(
            "intensity_overlap requires two envelopes on the same grid and domain"
        )
    ia = a.intensity
    ib = b.intensity
    na = float(np.sum(ia * ia))
    nb = float(np.sum(ib * ib))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError(
            "intensity overlap with a zero-energy envelope is undefined"
        )
    return float(np.sum(ia * ib) / np.sqrt(na * nb))


#: Intensity floor (relative to peak) below which samples are excluded from
#: phase fits, keeping the unwrap away from noise-dominated branches.
PHASE_FIT_INTENSITY_FLOOR = 0.01


def _phase_fit_block(
    env: SampledEnvelope, window_fwhm_fraction: float
) -> tuple[np.ndarray, np.ndarray]:
    """Times and unwrapped phases of the contiguous qualifying samples around
    the intensity peak (inside the fit window and above the intensity floor)."""
    intensity = env.intensity
    peak_index = int(np.argmax(intensity))
    peak = intensity[peak_index]
    if peak == 0.0:
        raise DegenerateInputError("phase fit of an all-zero envelope is undefined")
    width = fwhm(env)
    t = env.times
    center = t[peak_index]
    half_window = 0.5 * window_fwhm_fraction * width
    floor = PHASE_FIT_INTENSITY_FLOOR * peak

    ok = (np.abs(t - center) <= half_window) & (intensity >= floor)
    # contiguous run containing the peak, so the unwrap never jumps lobes
    lo = peak_index
    while lo - 1 >= 0 and ok[lo - 1]:
        lo -= 1
    hi = peak_index
    while hi + 1 < len(ok) and ok[hi + 1]:
        hi += 1
    if hi - lo + 1 < 8:
        raise InsufficientSupportError(
            f"only {hi - lo + 1} samples qualify for the phase fit "
            "(need at least 8); widen the window or refine the grid"
        )
    block = slice(lo, hi + 1)
    phases = np.unwrap(np.angle(env.samples[block]))
    return t[block], phases


def phase_fit_quadratic(
    env: SampledEnvelope, window_fwhm_fraction: float = 1.0
) -> tuple[float, float]:
    """Least-squares quadratic fit of the unwrapped temporal phase.

    Fits arg(a(t)) to c0 + c1*t + c2*t^2 over the central window (width =
    ``window_fwhm_fraction`` times the intensity FWHM, centered on the peak),
    using only samples above 1% of peak intensity.

    Returns:
        (c2, rms_residual): curvature in rad/ps^2 and the RMS fit residual in
        radians.

    Raises:
        InsufficientSupportError: fewer than 8 samples qualify.
        DegenerateInputError: all-zero envelope.
    """
    times, phases = _phase_fit_block(env, window_fwhm_fraction)
    tau = times - times[len(times) // 2]  # centered abscissa for conditioning
    coeffs = np.polynomial.polynomial.polyfit(tau, phases, deg=2)
    fit = np.polynomial.polynomial.polyval(tau, coeffs)
    rms = float(np.sqrt(np.mean((phases - fit) ** 2)))
    return float(coeffs[2]), rms  # the t^2 coefficient is shift-invariant


def phase_rms(
    env: SampledEnvelope,
    window_fwhm_fraction: float = 1.0,
    detrend_degree: int = 1,
) -> float:
    """RMS deviation of the unwrapped phase from a low-order trend.

    With the default ``detrend_degree=1`` a constant (global phase) and a
    linear term (carrier-frequency offset) are removed first, so the result
    measures genuine phase structure — curvature and above — across the
    central window.  Sample selection matches :func:`phase_fit_quadratic`.
    """
    if detrend_degree not in (0, 1):
        raise ValueError("detrend_degree must be 0 or 1")
    times, phases = _phase_fit_block(env, window_fwhm_fraction)
    tau = times - times[len(times) // 2]
    coeffs = np.polynomial.polynomial.polyfit(tau, phases, deg=detrend_degree)
    fit = np.polynomial.polynomial.polyval(tau, coeffs)
    return float(np.sqrt(np.mean((phases - fit) ** 2)))


def boundary_leakage(env: AnyEnvelope) -> float:
    """max(|a[0]|, |a[-1]|) / max|a|; zero for an all-zero envelope."""
    mags = np.abs(env.samples)
    peak = float(mags.max())
    if peak == 0.0:
        return 0.0
    return float(max(mags[0], mags[-1]) / peak)


def shifted(env: SampledEnvelope, delay: float) -> SampledEnvelope:
    """a(t - delay), via an exact spectral phase ramp.

    Raises:
        WindowOverflowError: the shifted waveform would leak across the
            window boundary (checked against :data:`BOUNDARY_TOLERANCE`).
    """
    if delay == 0.0:
        return env
    # The spectral shift is circular, so a large delay can wrap the waveform
    # back into the interior where boundary leakage alone would not flag it;
    # require the shifted support to fit the window outright.
    mags = np.abs(env.samples)
    peak = float(mags.max())
    if peak > 0.0:
        significant = np.nonzero(mags > BOUNDARY_TOLERANCE * peak)[0]
        t = env.times
        lo = t[significant[0]] + delay
        hi = t[significant[-1]] + delay
        if not env.grid.contains(lo, hi):
            raise WindowOverflowError(
                f"time shift by {delay} ps pushes the waveform support "
                f"[{lo:.6g}, {hi:.6g}] ps outside the window"
            )
    spec = to_frequency(env)
    out = to_time(spec.with_samples(spec.samples * np.exp(-1j * spec.omegas * delay)))
    if boundary_leakage(out) > BOUNDARY_TOLERANCE:
        raise WindowOverflowError(
            f"time shift by {delay} ps pushes the waveform across the window "
            "boundary"
        )
    return out


def magnified_copy(env: SampledEnvelope, magnification: float) -> SampledEnvelope:
    """Analytically magnified copy a(t/M)/sqrt(|M|) on the same grid.

    The reference waveform an ideal imaging system should produce: stretched
    by M (time-reversed for M < 0) with energy preserved.  Evaluated by cubic
    interpolation of the input samples; points mapping outside the original
    window are zero.
    """
    if magnification == 0.0 or not np.isfinite(magnification):
        raise ValueError(f"magnification must be nonzero, got {magnification!r}")
    t = env.times
    source_t = t / magnification
    spline_re = CubicSpline(t, env.samples.real, extrapolate=False)
    spline_im = CubicSpline(t, env.samples.imag, extrapolate=False)
    values = spline_re(source_t) + 1j * spline_im(source_t)
    values = np.nan_to_num(values, nan=0.0)
    return env.with_samples(values / np.sqrt(abs(magnification)))
