r"""Closed-form evaluation of the four localized solution families.

Families (d transverse dimensions, light-cone variables alpha = z - t,
beta = z + t, theta = alpha + (r, Gamma(beta) r)):

wave beam      phi_b = c_b sqrt(det Gamma) exp(i eta theta)
wave packet    phi_p = c_p sqrt(det Gamma) s^nu K_nu(s),
               s = 2 kappa gamma (1 - i theta/gamma)^(1/2)
KGF beam       u_b  = C_b sqrt(det Gamma) exp(i m S_b),
               S_b = theta eta / m - beta m / (4 eta)
KGF packet     u_p  = C_p sqrt(det Gamma) (S_p/(tau + i beta))^mu K_mu(m S_p),
               S_p = ((gamma - i theta)(tau + i beta))^(1/2), Re S_p > 0

All evaluators return `LogComplexField` and accept points whose entries are
equal-shaped arrays, evaluating the whole batch in one numpy pass.

Amplitude conventions: the free constant is ``c_b``; the derived constants

    c_p = 2 (2 kappa^2 gamma)^-nu c_b
    C_b = c_b exp(-eps_m m^2/(4 eta) + i pi/4) sqrt(pi/eta)
    C_p = 2^(mu+1) sqrt(pi) exp(i pi/4) c_b / m^mu

are applied internally so that the superposition identities tying the four
families together hold exactly with no fitted factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantBreach, ParameterError
from .gamma import GammaCurve, gamma_matrix, log_sqrt_det_gamma
from .lcfield import LogComplexField, SpacetimePoint
from .specfun import log_bessel_k

_HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class BeamParams:
    """Parameters of the beam families (wave and KGF)."""

    eta: float
    curve: GammaCurve
    c_b: complex = 1.0
    m: float = 0.0
    eps_m: float = 1.0

    def __post_init__(self):
        if self.eta <= 0:
            raise ParameterError("eta must be positive")
        if self.m < 0:
            raise ParameterError("m must be nonnegative")
        if self.m > 0 and self.eps_m <= 0:
            raise ParameterError("eps_m must be positive for the KGF beam")

    @property
    def big_c_b(self) -> complex:
        """C_b constant of the KGF beam, derived from c_b."""
        return (self.c_b * np.exp(-self.eps_m * self.m ** 2 / (4.0 * self.eta))
                * np.exp(0.25j * np.pi) * np.sqrt(np.pi / self.eta))


@dataclass(frozen=True)
class PacketParams:
    """Parameters of the packet families.

    ``mu`` is the Macdonald order of the KGF packet (= nu + 1/2 with nu the
    family superscript); the wave-equation packet of the same parameter set
    has order ``nu = mu - 1/2``.  For m > 0 the derived scale is
    ``tau = 4 gamma kappa^2 / m^2 + eps_m``.
    """

    mu: float
    gamma: float
    kappa: float
    curve: GammaCurve
    m: float = 0.0
    eps_m: float = 1.0
    c_b: complex = 1.0
    allow_backward: bool = False

    def __post_init__(self):
        if self.gamma <= 0:
            raise ParameterError("gamma must be positive")
        if self.kappa <= 0:
            raise ParameterError("kappa must be positive")
        if self.m < 0:
            raise ParameterError("m must be nonnegative")
        if self.m > 0:
            if self.eps_m <= 0:
                raise ParameterError("eps_m must be positive when m > 0")
            if self.tau <= self.gamma and not self.allow_backward:
                raise ParameterError(
                    "tau <= gamma gives a backward/stationary packet; "
                    "set allow_backward=True to force it")

    @property
    def nu(self) -> float:
        return self.mu - 0.5

    @property
    def tau(self) -> float:
        if self.m == 0:
            raise ParameterError("tau is defined only for m > 0")
        return 4.0 * self.gamma * self.kappa ** 2 / self.m ** 2 + self.eps_m

    @property
    def c_p(self) -> complex:
        """Wave-packet constant (for the order nu = mu - 1/2 family)."""
        return 2.0 * (2.0 * self.kappa ** 2 * self.gamma) ** (-self.nu) * self.c_b

    @property
    def big_c_p(self) -> complex:
        """KGF packet constant C_p."""
        if self.m == 0:
            raise ParameterError("C_p is defined only for m > 0")
        return (2.0 ** (self.mu + 1.0) * np.sqrt(np.pi) * np.exp(0.25j * np.pi)
                * self.c_b / self.m ** self.mu)

    def with_wave_order(self, nu: float) -> "PacketParams":
        """Same parameters with the wave-packet order set to ``nu``."""
        return PacketParams(mu=nu + 0.5, gamma=self.gamma, kappa=self.kappa,
                            curve=self.curve, m=self.m, eps_m=self.eps_m,
                            c_b=self.c_b, allow_backward=self.allow_backward)


def theta(point: SpacetimePoint, curve: GammaCurve):
    """Eikonal theta = alpha + (r_perp, Gamma(beta) r_perp); Im theta >= 0."""
    beta = np.asarray(point.beta, dtype=float)
    g = gamma_matrix(curve, beta)
    r = np.asarray(point.r_perp, dtype=float)
    quad = np.einsum("...i,...ij,...j->...", r, g, r)
    return np.asarray(point.alpha) + quad


def _log_field(log_abs, phase) -> LogComplexField:
    log_abs = np.asarray(log_abs)
    phase = np.asarray(phase)
    if log_abs.ndim == 0:
        return LogComplexField(float(log_abs), float(phase))
    return LogComplexField(log_abs, phase)


def phi_beam(point: SpacetimePoint, params: BeamParams) -> LogComplexField:
    """Astigmatic Gaussian beam of the wave equation."""
    th = theta(point, params.curve)
    la, ph = log_sqrt_det_gamma(params.curve, np.asarray(point.beta, float))
    c = complex(params.c_b)
    log_abs = np.log(abs(c)) + la - params.eta * np.imag(th)
    phase = np.angle(c) + ph + params.eta * np.real(th)
    return _log_field(log_abs, phase)


def u_beam(point: SpacetimePoint, params: BeamParams) -> LogComplexField:
    """Gaussian beam (focus wave mode) of the KGF equation, m > 0."""
    if params.m <= 0:
        raise ParameterError("u_beam requires m > 0; use phi_beam for m = 0")
    th = theta(point, params.curve)
    beta = np.asarray(point.beta, dtype=float)
    la, ph = log_sqrt_det_gamma(params.curve, beta)
    s_b = th * (params.eta / params.m) - beta * (params.m / (4.0 * params.eta))
    cb = params.big_c_b
    log_abs = np.log(abs(cb)) + la - params.m * np.imag(s_b)
    phase = np.angle(cb) + ph + params.m * np.real(s_b)
    return _log_field(log_abs, phase)


def packet_phase(point: SpacetimePoint, params: PacketParams):
    """Complex packet phase S_p with Re S_p > 0 (KGF, m > 0).

    Returned as (S_p, log(gamma - i theta), log(tau + i beta)); the factor
    logs carry the principal branch, which is also the branch of S_p because
    both factors stay in the right half-plane.
    """
    th = theta(point, params.curve)
    beta = np.asarray(point.beta, dtype=float)
    w1 = params.gamma - 1j * th
    w2 = params.tau + 1j * beta
    if np.any(np.real(w1) <= 0) or np.any(np.real(w2) <= 0):
        raise InvariantBreach(
            "gamma - i*theta or tau + i*beta left the right half-plane; "
            "Gamma0 positivity must have been violated")
    log_w1 = np.log(w1)
    log_w2 = np.log(w2)
    s_p = np.exp(0.5 * (log_w1 + log_w2))
    if np.any(np.real(s_p) <= 0):
        raise InvariantBreach("Re S_p <= 0 encountered")
    return s_p, log_w1, log_w2


def phi_packet(point: SpacetimePoint, params: PacketParams) -> LogComplexField:
    """Particle-like wave-equation packet, order nu = mu - 1/2 (m = 0 branch)."""
    th = theta(point, params.curve)
    beta = np.asarray(point.beta, dtype=float)
    la, ph = log_sqrt_det_gamma(params.curve, beta)
    w = 1.0 - 1j * th / params.gamma
    if np.any(np.real(w) <= 0):
        raise InvariantBreach("1 - i*theta/gamma left the right half-plane")
    log_s = np.log(2.0 * params.kappa * params.gamma) + 0.5 * np.log(w)
    s = np.exp(log_s)
    nu = params.nu
    log_k, _, _ = log_bessel_k(nu, s)
    cp = complex(params.c_p)
    total = np.log(abs(cp)) + 1j * np.angle(cp) + (la + 1j * ph) \
        + nu * log_s + log_k
    return _log_field(np.real(total), np.imag(total))


def u_packet(point: SpacetimePoint, params: PacketParams) -> LogComplexField:
    """Particle-like KGF packet of Macdonald order mu (m > 0)."""
    if params.m <= 0:
        raise ParameterError("u_packet requires m > 0; use phi_packet for m = 0")
    beta = np.asarray(point.beta, dtype=float)
    la, ph = log_sqrt_det_gamma(params.curve, beta)
    s_p, log_w1, log_w2 = packet_phase(point, params)
    # (S_p/(tau+i beta))^mu with principal logs; arg of the ratio stays in
    # (-pi, pi) because both factors live in the right half-plane
    log_ratio = 0.5 * (log_w1 - log_w2)
    log_k, _, _ = log_bessel_k(params.mu, params.m * s_p)
    cp = params.big_c_p
    total = np.log(abs(cp)) + 1j * np.angle(cp) + (la + 1j * ph) \
        + params.mu * log_ratio + log_k
    return _log_field(np.real(total), np.imag(total))


def u_packet_2d_radial(s_p, c3: complex = 1.0, m: float = 1.0):
    """Two-dimensional radial special case c3 * exp(-m S_p)/S_p.

    Depends on the single variable S_p (Re S_p > 0); equals the mu = -1/2
    packet in d = 1 with the stigmatic eps = tau curve up to a constant.
    """
    s_p = np.asarray(s_p, dtype=complex)
    if np.any(np.real(s_p) <= 0):
        raise InvariantBreach("u_packet_2d_radial requires Re S_p > 0")
    return c3 * np.exp(-m * s_p) / s_p


# ---------------------------------------------------------------------------
# finite-difference residual checks of the phase and transport relations

def _phase_value(kind: str, point: SpacetimePoint, params):
    if kind == "we_theta":
        return theta(point, params.curve)
    if kind == "we_s":
        th = theta(point, params.curve)
        w = 1.0 - 1j * th / params.gamma
        return 2.0 * params.kappa * params.gamma * np.exp(0.5 * np.log(w))
    if kind == "kgf_Sb":
        th = theta(point, params.curve)
        beta = np.asarray(point.beta, dtype=float)
        return th * (params.eta / params.m) - beta * (params.m / (4.0 * params.eta))
    if kind == "kgf_Sp":
        s_p, _, _ = packet_phase(point, params)
        return s_p
    raise ParameterError(f"unknown phase kind {kind!r}")


# sigma in (d_t S)^2 - (grad S)^2 = sigma.  S_p enters the solution as
# exp(-m S_p) = exp(i m (i S_p)), so the ray phase is i S_p and S_p itself
# satisfies the eikonal relation with sigma = -1.
_EIKONAL_SIGMA = {"we_theta": 0.0, "we_s": 0.0, "kgf_Sb": 1.0, "kgf_Sp": -1.0}


def characteristic_length(params) -> float:
    """Scale used to pick finite-difference steps."""
    if isinstance(params, PacketParams) and params.m > 0:
        p = params.m * np.sqrt(params.gamma * params.tau)
        return float(np.sqrt(params.gamma * params.tau) / p)
    if isinstance(params, PacketParams):
        return float(min(params.gamma, 1.0 / params.kappa))
    return float(1.0 / params.eta)


def eikonal_residual(phase_kind: str, point: SpacetimePoint, params,
                     h: float | None = None) -> float:
    """Central-difference residual of the eikonal relation for one phase.

    Returns |(d_t S)^2 - (grad S)^2 - sigma| / (|d_t S|^2 + 1) with sigma
    0 (wave equation), +1 (S_b) or -1 (S_p); O(h^2) for valid inputs.
    """
    sigma = _EIKONAL_SIGMA[phase_kind]
    if h is None:
        h = max(1e-6, 1e-4 * characteristic_length(params))
    f = lambda pt: _phase_value(phase_kind, pt, params)
    d = point.dim
    dt = (f(point.shifted(dt=h)) - f(point.shifted(dt=-h))) / (2 * h)
    dz = (f(point.shifted(dz=h)) - f(point.shifted(dz=-h))) / (2 * h)
    grad2 = dz ** 2
    for j in range(d):
        e = np.zeros(d)
        e[j] = h
        dr = (f(point.shifted(dr=e)) - f(point.shifted(dr=-e))) / (2 * h)
        grad2 = grad2 + dr ** 2
    res = dt ** 2 - grad2 - sigma
    return float(np.abs(res) / (np.abs(dt) ** 2 + 1.0))


def transport_residual(point: SpacetimePoint, curve: GammaCurve,
                       h: float | None = None,
                       freeze_g_at: float | None = None) -> tuple:
    """Residuals of the two transport relations for g = sqrt(det Gamma).

    First relation: 2[(d_t theta)(d_t g) - <grad theta, grad g>] + g box(theta)
    (the factor 2 makes the ray ansatz g(beta) f(theta) solve the wave
    equation; verified by the negative control below).  Second relation:
    (d_t g)^2 - (grad g)^2.  Both normalized, both O(h^2) for valid inputs.

    ``freeze_g_at`` evaluates g at a fixed beta (an invalid input) as a
    negative control; the first residual is then O(1).
    """
    if h is None:
        h = 1e-4

    def g_of(pt):
        b = np.asarray(freeze_g_at if freeze_g_at is not None else pt.beta, float)
        la, ph = log_sqrt_det_gamma(curve, b)
        return np.exp(la + 1j * ph)

    th_of = lambda pt: theta(pt, curve)
    d = point.dim

    def derivs(f):
        c = f(point)
        dt = (f(point.shifted(dt=h)) - f(point.shifted(dt=-h))) / (2 * h)
        dz = (f(point.shifted(dz=h)) - f(point.shifted(dz=-h))) / (2 * h)
        dr = []
        lap = (f(point.shifted(dt=h)) - 2 * c + f(point.shifted(dt=-h))) / h ** 2 \
            - (f(point.shifted(dz=h)) - 2 * c + f(point.shifted(dz=-h))) / h ** 2
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            dr.append((f(point.shifted(dr=e)) - f(point.shifted(dr=-e))) / (2 * h))
            lap = lap - (f(point.shifted(dr=e)) - 2 * c + f(point.shifted(dr=-e))) / h ** 2
        return c, dt, dz, np.array(dr), lap

    g, g_t, g_z, g_r, _ = derivs(g_of)
    th, th_t, th_z, th_r, box_th = derivs(th_of)

    inner = th_t * g_t - th_z * g_z - np.sum(th_r * g_r)
    r1 = 2.0 * inner + g * box_th
    scale1 = np.abs(g * box_th) + np.abs(inner) + 1e-30
    r2 = g_t ** 2 - g_z ** 2 - np.sum(g_r ** 2)
    scale2 = np.abs(g_t) ** 2 + np.abs(g_z) ** 2 + 1e-30
    return float(np.abs(r1) / scale1), float(np.abs(r2) / scale2)
