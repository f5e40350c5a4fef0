"""Astigmatic beams and localized packets of the wave and KGF equations."""

__version__ = "0.1.0"

from .lcfield import LogComplexField, SpacetimePoint
from .gamma import (GammaCurve, GammaAt, validate_gamma0, make_curve,
                    stigmatic_curve, build_general_astigmatic, gamma_at,
                    gamma_large_beta, principal_axes, sqrt_det_gamma)
from .specfun import (BesselResult, bessel_k, bessel_k_half_integer,
                      macdonald_integral_oracle)
from .solutions import (BeamParams, PacketParams, theta, phi_beam, phi_packet,
                        u_beam, u_packet, u_packet_2d_radial, packet_phase,
                        eikonal_residual, transport_residual)
from .asymptotics import (PacketCharacteristics, EnvelopeSummary, Regime,
                          packet_characteristics, regime_classify,
                          envelope_small_time, envelope_large_time,
                          validity_conditions, design_parameters,
                          empirical_envelope_fit)
from .spectral import (WaveVector, FourierImage, fourier_image,
                       inverse_ft_oracle, superposition_oracle, zeta_ft_oracle,
                       stationary_phase_large_t, saddle_point_small_t)
from .verify import ResidualReport, fd_residual, residual_scan, convergence_order

__all__ = [
    "LogComplexField", "SpacetimePoint",
    "GammaCurve", "GammaAt", "validate_gamma0", "make_curve", "stigmatic_curve",
    "build_general_astigmatic", "gamma_at", "gamma_large_beta", "principal_axes",
    "sqrt_det_gamma",
    "BesselResult", "bessel_k", "bessel_k_half_integer", "macdonald_integral_oracle",
    "BeamParams", "PacketParams", "theta", "phi_beam", "phi_packet", "u_beam",
    "u_packet", "u_packet_2d_radial", "packet_phase", "eikonal_residual",
    "transport_residual",
    "PacketCharacteristics", "EnvelopeSummary", "Regime", "packet_characteristics",
    "regime_classify", "envelope_small_time", "envelope_large_time",
    "validity_conditions", "design_parameters", "empirical_envelope_fit",
    "WaveVector", "FourierImage", "fourier_image", "inverse_ft_oracle",
    "superposition_oracle", "zeta_ft_oracle", "stationary_phase_large_t",
    "saddle_point_small_t",
    "ResidualReport", "fd_residual", "residual_scan", "convergence_order",
]
