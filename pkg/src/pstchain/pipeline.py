"""End-to-end chain design: spectrum -> commensuration -> couplings.

The standard workflow generates a spectrum family member at unit amplitude,
snaps it commensurate if needed, solves the inverse eigenvalue problem, and
then rescales spectrum and couplings jointly so that the largest coupling is
exactly 1 (times rescale inversely).
"""

from __future__ import annotations

from dataclasses import dataclass

from .analysis import speed_ratio
from .inverse_eigen import CouplingSet, reconstruct_couplings, verify_reconstruction
from .spectra import (
    BASE_SEARCH_TOLERANCE,
    BOUNDARY,
    CENTER,
    PstTiming,
    Spectrum,
    SpectrumSpec,
    commensurate_adjust,
    generate_spectrum,
    max_relative_change,
)

#: The five spectrum shapes studied throughout: (family, exponent).
STANDARD_FAMILIES = {
    "linear": (CENTER, 1.0),
    "quadratic": (CENTER, 2.0),
    "sqrt_boundary": (BOUNDARY, 0.5),
    "sqrt_center": (CENTER, 0.5),
    "quadratic_boundary": (BOUNDARY, 2.0),
}


@dataclass(frozen=True)
class DesignedChain:
    """A fully designed transfer chain and its headline figures of merit."""

    spec: SpectrumSpec
    spectrum: Spectrum
    couplings: CouplingSet
    timing: PstTiming
    max_adjustment: float
    residual: float
    gamma: float

    @property
    def n_sites(self) -> int:
        return self.spec.n_sites

    @property
    def t_pst(self) -> float:
        return self.timing.t_pst


def design_chain(
    n_sites: int,
    family: str,
    exponent: float,
    amplitude: float = 1.0,
    normalize: bool = True,
    base_search_tolerance: float = BASE_SEARCH_TOLERANCE,
) -> DesignedChain:
    """Design a PST chain for one spectrum family member.

    With normalize=True (the default) the returned couplings satisfy
    max_i J_i = 1 exactly and the spectrum and transfer time are rescaled
    consistently.
    """
    spec = SpectrumSpec(
        n_sites=n_sites, family=family, exponent=exponent, amplitude=amplitude
    )
    raw = generate_spectrum(spec)
    spectrum, timing = commensurate_adjust(raw, base_search_tolerance)
    adjustment = max_relative_change(raw, spectrum)
    couplings = reconstruct_couplings(spectrum)
    if normalize:
        scale = couplings.j_max
        couplings = couplings.scaled(1.0 / scale)
        spectrum = spectrum.scaled(1.0 / scale)
        timing = PstTiming(
            t_pst=timing.t_pst * scale, odd_multipliers=timing.odd_multipliers
        )
    residual = verify_reconstruction(couplings, spectrum)
    gamma = speed_ratio(timing.t_pst, n_sites, couplings.j_max)
    return DesignedChain(
        spec=spec,
        spectrum=spectrum,
        couplings=couplings,
        timing=timing,
        max_adjustment=adjustment,
        residual=residual,
        gamma=gamma,
    )


def design_standard(name: str, n_sites: int, **kwargs) -> DesignedChain:
    """Design one of the five standard families by name."""
    if name not in STANDARD_FAMILIES:
        raise ValueError(
            f"unknown family name {name!r}; choose from {sorted(STANDARD_FAMILIES)}"
        )
    family, exponent = STANDARD_FAMILIES[name]
    return design_chain(n_sites, family, exponent, **kwargs)
