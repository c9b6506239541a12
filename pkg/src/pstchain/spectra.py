"""Energy spectra compatible with perfect state transfer (PST).

A mirror-symmetric chain supports PST exactly when all consecutive eigenvalue
gaps are odd multiples of a common base pi/t_pst.  This module generates the
two parametrized spectrum families used throughout the package, snaps
almost-commensurate spectra onto an exact odd-multiple grid, and extracts the
transfer time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGapsError, NotCommensurateError

CENTER = "center"
BOUNDARY = "boundary"
FAMILIES = (CENTER, BOUNDARY)

#: Relative tolerance for deciding that a gap ratio is an odd integer.
GAP_ODDNESS_RTOL = 1e-9
#: Scan resolution (relative to the smallest gap) of the readjustment search.
BASE_SEARCH_TOLERANCE = 1e-4
# Largest odd divisor of the smallest gap tried before giving up in pst_time.
_MAX_BASE_DIVISOR = 9999


@dataclass(frozen=True)
class SpectrumSpec:
    """Parameters selecting one member of the spectrum families.

    The `center` family anchors the power law at the middle of the spectrum,
    sgn(x)|x|**exponent; the `boundary` family anchors it at the spectrum
    edges.  `amplitude` sets the overall energy scale before any later
    normalization of the coupling pattern.
    """

    n_sites: int
    family: str
    exponent: float
    amplitude: float = 1.0

    def __post_init__(self):
        if self.n_sites < 3 or self.n_sites % 2 == 0:
            raise ValueError(
                f"n_sites must be an odd integer >= 3, got {self.n_sites}"
            )
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not self.exponent > 0:
            raise ValueError(f"exponent must be positive, got {self.exponent}")
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")


@dataclass(frozen=True)
class Spectrum:
    """Strictly increasing, antisymmetric set of chain eigenfrequencies."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size < 2:
            raise ValueError("spectrum must be a 1-D array with at least 2 values")
        if not np.all(np.diff(vals) > 0):
            raise ValueError("spectrum values must be strictly increasing")
        scale = float(np.max(np.abs(vals)))
        if np.max(np.abs(vals + vals[::-1])) > 1e-12 * scale:
            raise ValueError("spectrum must be antisymmetric about zero")
        if vals.size % 2 == 1 and vals[vals.size // 2] != 0.0:
            raise ValueError("odd-length spectrum must have an exact zero center value")

    @property
    def n_sites(self) -> int:
        return self.values.size

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.values)

    @property
    def omega_max(self) -> float:
        return float(self.values[-1])

    def scaled(self, factor: float) -> "Spectrum":
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return Spectrum(self.values * factor)


@dataclass(frozen=True)
class PstTiming:
    """First transfer time together with the odd gap multipliers.

    Every consecutive gap equals odd_multipliers[k] * pi / t_pst, and the
    multipliers carry no common structure that would allow a larger base
    (their gcd is 1, so t_pst is the first PST time).
    """

    t_pst: float
    odd_multipliers: np.ndarray

    def __post_init__(self):
        mult = np.array(self.odd_multipliers, dtype=int)
        mult.setflags(write=False)
        object.__setattr__(self, "odd_multipliers", mult)
        if not self.t_pst > 0:
            raise ValueError("t_pst must be positive")
        if mult.ndim != 1 or np.any(mult <= 0) or np.any(mult % 2 == 0):
            raise ValueError("multipliers must be positive odd integers")

    @property
    def base_gap(self) -> float:
        return float(np.pi / self.t_pst)


def generate_spectrum(spec: SpectrumSpec) -> Spectrum:
    """Evaluate the requested spectrum family.

    With c = (N+1)/2 the center index (1-based) and x = k - c:
      center:    omega = A * sgn(x) * |x|**alpha
      boundary:  omega = A * sgn(x) * (c**alpha - (c - |x|)**alpha)
    Both are antisymmetric by construction; for integer alpha the gaps are
    already odd integer multiples of A.
    """
    n = spec.n_sites
    half = (n - 1) // 2
    x = np.arange(1, half + 1, dtype=float)
    if spec.family == CENTER:
        upper = spec.amplitude * x ** spec.exponent
    else:
        anchor = (n + 1) / 2
        upper = spec.amplitude * (anchor ** spec.exponent - (anchor - x) ** spec.exponent)
    values = np.concatenate([-upper[::-1], [0.0], upper])
    return Spectrum(values)


def pst_time(spectrum: Spectrum, tolerance: float = GAP_ODDNESS_RTOL) -> PstTiming:
    """Find the largest base making every gap an odd multiple of it.

    Any admissible base divides the smallest gap by an odd integer, so the
    search enumerates odd divisors of the smallest gap in increasing order
    (decreasing base) and returns the first one for which every gap ratio is
    an odd integer within `tolerance` (relative).  Transfer then recurs at
    all odd multiples of the returned t_pst.
    """
    gaps = spectrum.gaps
    g_min = float(gaps.min())
    divisors = np.arange(1, _MAX_BASE_DIVISOR + 1, 2, dtype=float)
    ratios = gaps[None, :] * (divisors[:, None] / g_min)
    nearest_odd = 2.0 * np.floor(ratios / 2.0) + 1.0
    admissible = np.abs(ratios - nearest_odd) <= tolerance * ratios
    rows = np.nonzero(admissible.all(axis=1))[0]
    if rows.size == 0:
        raise NotCommensurateError(
            "gap ratios are not ratios of odd integers within tolerance "
            f"{tolerance:g}; the spectrum does not support PST"
        )
    best = int(rows[0])
    base = g_min / divisors[best]
    return PstTiming(
        t_pst=float(np.pi / base),
        odd_multipliers=nearest_odd[best].astype(int),
    )


def commensurate_adjust(
    spectrum: Spectrum,
    base_search_tolerance: float = BASE_SEARCH_TOLERANCE,
) -> tuple[Spectrum, PstTiming]:
    """Minimally readjust a spectrum so that it satisfies the PST condition.

    If the input is already commensurate within the oddness tolerance, its
    gaps are merely snapped to exact odd multiples of the detected base.
    Otherwise a candidate base is scanned over [g_min/3, g_min] at resolution
    `base_search_tolerance * g_min`; for each candidate every gap ratio is
    rounded to the nearest odd integer (ties up) and the candidate with the
    smallest summed squared relative gap deviation wins.  The output spectrum
    is rebuilt antisymmetrically from the center outward, so the PST
    condition holds exactly afterward.
    """
    gaps = spectrum.gaps
    g_min = float(gaps.min())
    g_max = float(gaps.max())
    if g_min < base_search_tolerance * g_max:
        raise DegenerateGapsError(
            f"smallest gap {g_min:g} is below {base_search_tolerance:g} x largest "
            f"gap {g_max:g}; cannot resolve a common base"
        )

    try:
        timing = pst_time(spectrum)
        return _snap(timing.odd_multipliers, timing.base_gap, spectrum.n_sites), timing
    except NotCommensurateError:
        pass

    n_candidates = int(round((2.0 / 3.0) / base_search_tolerance)) + 1
    bases = np.linspace(g_min / 3.0, g_min, n_candidates)
    ratios = gaps[None, :] / bases[:, None]
    nearest_odd = 2.0 * np.floor(ratios / 2.0) + 1.0
    scores = (((ratios - nearest_odd) / ratios) ** 2).sum(axis=1)
    best = int(np.argmin(scores))

    snapped = _snap(nearest_odd[best].astype(int), float(bases[best]), spectrum.n_sites)
    # Re-derive the timing from the snapped gaps: the rounded multipliers may
    # share a common odd factor, in which case the true base is larger.
    timing = pst_time(snapped)
    return snapped, timing


def max_relative_change(original: Spectrum, adjusted: Spectrum) -> float:
    """Largest value change between two spectra, relative to the energy scale."""
    if original.n_sites != adjusted.n_sites:
        raise ValueError("spectra differ in length")
    scale = max(original.omega_max, adjusted.omega_max)
    return float(np.max(np.abs(adjusted.values - original.values)) / scale)


def _snap(multipliers: np.ndarray, base: float, n_values: int) -> Spectrum:
    """Rebuild an antisymmetric spectrum from exact odd-multiple gaps."""
    m = np.asarray(multipliers, dtype=float)
    if m.size != n_values - 1:
        raise ValueError("need one multiplier per gap")
    if n_values % 2:
        center = (n_values - 1) // 2
        upper = base * np.cumsum(m[center:])
        values = np.concatenate([-upper[::-1], [0.0], upper])
    else:
        central = n_values // 2 - 1
        first = 0.5 * base * m[central]
        upper = first + np.concatenate([[0.0], base * np.cumsum(m[central + 1:])])
        values = np.concatenate([-upper[::-1], upper])
    return Spectrum(values)
