"""Complex symmetric Gamma(beta) matrix calculus.

The transverse quadratic phase of every solution family is governed by a
complex symmetric d x d matrix evolving along the light-cone coordinate
``beta`` by the Bernoulli flow

    Gamma(beta) = Gamma0 (E + beta Gamma0)^-1 ,

with ``Im Gamma0`` positive definite.  This module provides construction and
validation of ``Gamma0``, evaluation of the flow, a branch-continuous
``sqrt(det Gamma(beta))``, the constant argument offset ``delta_gamma``
between that square root and the anchored ``sqrt(det(-i Gamma))``, and the
principal-axes decomposition used for astigmatism diagnostics.

Branch convention
-----------------
``sqrt(det Gamma)`` is fixed to the principal square root at ``beta = 0`` and
continued in ``beta`` without phase jumps.  The continuation is evaluated in
closed form: with ``lam_j`` the eigenvalues of ``Gamma0`` (all in the upper
half-plane), every factor ``1 + beta*lam_j`` of ``det(E + beta Gamma0)``
stays in a single half-plane for real ``beta``, so its principal argument is
already continuous and no winding can occur.  An explicit adaptive marching
continuation is kept as a cross-check oracle (`sqrt_det_marching`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, EvaluationError, ParameterError

_SYM_TOL = 1e-12
_COND_LIMIT = 1e14


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of `validate_gamma0`."""

    ok: bool
    dim: int
    symmetry_defect: float
    im_eigenvalues: np.ndarray
    messages: tuple = ()


@dataclass(frozen=True)
class GammaCurve:
    """Immutable initial matrix Gamma0 together with branch-tracking state.

    Attributes
    ----------
    gamma0 : (d, d) complex ndarray
        Symmetric initial matrix with positive definite imaginary part.
    dim : int
        Transverse dimension d.
    branch_anchor : float
        Phase of the principal ``sqrt(det Gamma0)`` (radians); the branch of
        ``sqrt(det Gamma(beta))`` is continued from this anchor.
    localization_ok : bool
        For curves built by `build_general_astigmatic`, whether the
        two-dimensional localization inequality held; True otherwise.
    """

    gamma0: np.ndarray
    dim: int
    branch_anchor: float
    localization_ok: bool = True
    # cached spectral data of gamma0 (eigenvalues; arg det; delta_gamma)
    _eigvals: np.ndarray = field(default=None, repr=False)
    _arg_det0: float = field(default=0.0, repr=False)
    _delta_gamma: float = field(default=0.0, repr=False)

    @property
    def delta_gamma(self) -> float:
        """Constant offset arg sqrt(det Gamma) - arg sqrt(det(-i Gamma))."""
        return self._delta_gamma

    def gamma0_inv(self) -> np.ndarray:
        return np.linalg.inv(self.gamma0)


def symmetry_defect(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat - mat.T))) if mat.size else 0.0


def validate_gamma0(gamma0) -> ValidationReport:
    """Validate a candidate initial matrix.

    Passes iff the matrix is symmetric within 1e-12 (relative to its largest
    entry) and the real symmetric matrix ``Im gamma0`` is positive definite.

    Parameters
    ----------
    gamma0 : array_like
        Square complex matrix.

    Returns
    -------
    ValidationReport
        Symmetry defect, eigenvalues of ``Im gamma0`` and overall verdict.
    """
    mat = np.asarray(gamma0, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError(f"gamma0 must be a square matrix, got shape {mat.shape}")
    d = mat.shape[0]
    scale = max(np.max(np.abs(mat)), 1e-300)
    defect = symmetry_defect(mat)
    im_eigs = np.linalg.eigvalsh(mat.imag)
    msgs = []
    ok = True
    if defect > _SYM_TOL * scale:
        ok = False
        msgs.append(f"asymmetric: max|G - G^T| = {defect:.3e} exceeds tolerance")
    pd_floor = 1e-14 * np.linalg.norm(mat.imag, 2)
    if im_eigs.min() <= pd_floor:
        ok = False
        msgs.append(f"Im gamma0 not positive definite: min eigenvalue {im_eigs.min():.3e}")
    return ValidationReport(ok=ok, dim=d, symmetry_defect=defect,
                            im_eigenvalues=im_eigs, messages=tuple(msgs))


def make_curve(gamma0, localization_ok: bool = True) -> GammaCurve:
    """Build a `GammaCurve` from a validated Gamma0 matrix."""
    mat = np.array(gamma0, dtype=complex)
    report = validate_gamma0(mat)
    if not report.ok:
        raise ParameterError("invalid Gamma0: " + "; ".join(report.messages))
    mat = 0.5 * (mat + mat.T)
    mat.setflags(write=False)
    lam = np.linalg.eigvals(mat)
    arg_det0 = float(np.angle(np.linalg.det(mat)))
    # delta_gamma = arg sqrt(det G0) - arg sqrt(det(-i G0)); the second branch
    # is anchored by summing per-eigenvalue principal arguments of -i*lam,
    # each of which lies in the right half-plane.
    arg_det_mi = float(np.sum(np.angle(-1j * lam)))
    delta = 0.5 * arg_det0 - 0.5 * arg_det_mi
    return GammaCurve(gamma0=mat, dim=mat.shape[0], branch_anchor=0.5 * arg_det0,
                      localization_ok=localization_ok, _eigvals=lam,
                      _arg_det0=arg_det0, _delta_gamma=delta)


def stigmatic_curve(eps: float, dim: int = 2) -> GammaCurve:
    """Axisymmetric curve Gamma0 = (i/eps) E."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    return make_curve(1j / eps * np.eye(dim))


def localization_inequality(z1, eps1, z2, eps2, phi) -> tuple:
    """Two-dimensional localization inequality for a complex rotation angle.

    Returns (lhs, rhs, satisfied) of
    ``cosh^2(2 Im phi) ((z2-z1)^2 + (eps2-eps1)^2) < (z2-z1)^2 + (eps2+eps1)^2``.
    """
    lhs = np.cosh(2.0 * np.imag(phi)) ** 2 * ((z2 - z1) ** 2 + (eps2 - eps1) ** 2)
    rhs = (z2 - z1) ** 2 + (eps2 + eps1) ** 2
    return float(lhs), float(rhs), bool(lhs < rhs)


def build_general_astigmatic(z1: float, eps1: float, z2: float, eps2: float,
                             phi: complex) -> GammaCurve:
    """General astigmatic 2x2 Gamma0 from a (possibly complex) rotation.

    The matrix is ``U L U^-1`` evaluated at beta = 0, with U the rotation by
    ``phi`` and ``L = diag(1/(beta - z_j - i eps_j))``.  A complex ``phi``
    makes the principal axes of the localization ellipse rotate with beta
    (general astigmatism); the construction also records whether the
    localization inequality holds.

    Parameters
    ----------
    z1, z2 : float
        Waist positions of the two principal directions.
    eps1, eps2 : float
        Positive waist parameters.
    phi : complex
        Rotation angle; imaginary part switches on general astigmatism.

    Returns
    -------
    GammaCurve
        With ``localization_ok`` recording the inequality verdict.
    """
    if eps1 <= 0 or eps2 <= 0:
        raise ParameterError("eps1 and eps2 must be positive")
    phi = complex(phi)
    c, s = np.cos(phi), np.sin(phi)
    u = np.array([[c, -s], [s, c]], dtype=complex)
    lam = np.diag([-1.0 / (z1 + 1j * eps1), -1.0 / (z2 + 1j * eps2)])
    gamma0 = u @ lam @ u.T  # U^-1 = U^T for a rotation, complex angle included
    _, _, ok = localization_inequality(z1, eps1, z2, eps2, phi)
    return make_curve(gamma0, localization_ok=ok)


@dataclass(frozen=True)
class GammaAt:
    """Gamma(beta) together with its branch-continuous determinant root."""

    beta: float | np.ndarray
    matrix: np.ndarray
    sqrt_det: complex | np.ndarray
    delta_gamma: float


def _unwrapped_arg_factors(curve: GammaCurve, beta):
    """Continuous arg det(E + beta*Gamma0) as a sum of principal arguments."""
    b = np.asarray(beta, dtype=float)
    lam = curve._eigvals
    return np.sum(np.angle(1.0 + b[..., None] * lam), axis=-1)


def sqrt_det_gamma(curve: GammaCurve, beta):
    """Branch-continuous sqrt(det Gamma(beta)), principal at beta = 0.

    Modulus and the principal phase come from an accurate determinant; the
    2*pi branch correction comes from the winding-free eigenvalue sum, so
    eigenvalue noise cannot flip the branch.
    """
    b = np.asarray(beta, dtype=float)
    m = np.eye(curve.dim) + b[..., None, None] * curve.gamma0
    sign_m, logabs_m = np.linalg.slogdet(m)
    # det Gamma = det Gamma0 / det(E + beta Gamma0)
    det0 = np.linalg.det(curve.gamma0)
    log_abs = np.log(np.abs(det0)) - logabs_m
    arg_principal = np.angle(det0 * np.conj(sign_m))
    arg_continuous = curve._arg_det0 - _unwrapped_arg_factors(curve, b)
    k = np.round((arg_continuous - arg_principal) / (2.0 * np.pi))
    arg = arg_principal + 2.0 * np.pi * k
    out = np.exp(0.5 * log_abs + 0.5j * arg)
    return out if out.ndim else complex(out)


def log_sqrt_det_gamma(curve: GammaCurve, beta):
    """log of `sqrt_det_gamma` as (log modulus, continuous phase)."""
    b = np.asarray(beta, dtype=float)
    m = np.eye(curve.dim) + b[..., None, None] * curve.gamma0
    sign_m, logabs_m = np.linalg.slogdet(m)
    det0 = np.linalg.det(curve.gamma0)
    log_abs = np.log(np.abs(det0)) - logabs_m
    arg_principal = np.angle(det0 * np.conj(sign_m))
    arg_continuous = curve._arg_det0 - _unwrapped_arg_factors(curve, b)
    k = np.round((arg_continuous - arg_principal) / (2.0 * np.pi))
    return 0.5 * log_abs, 0.5 * (arg_principal + 2.0 * np.pi * k)


def gamma_matrix(curve: GammaCurve, beta):
    """Gamma(beta) = Gamma0 (E + beta Gamma0)^-1, vectorized over beta."""
    b = np.asarray(beta, dtype=float)
    m = np.eye(curve.dim) + b[..., None, None] * curve.gamma0
    rhs = np.broadcast_to(curve.gamma0, m.shape)
    mat = np.linalg.solve(m, rhs)
    mat = 0.5 * (mat + np.swapaxes(mat, -1, -2))
    if not np.all(np.isfinite(mat)):
        raise EvaluationError("E + beta*Gamma0 numerically singular")
    return mat


def gamma_at(curve: GammaCurve, beta) -> GammaAt:
    """Evaluate the flow at ``beta`` (scalar or array).

    For scalar ``beta`` the resolvent conditioning and the positive
    definiteness of ``Im Gamma`` are checked explicitly; array evaluation
    trusts the validated curve and reports only non-finite results.
    """
    b = np.asarray(beta, dtype=float)
    if b.ndim == 0:
        m = np.eye(curve.dim) + float(b) * curve.gamma0
        if np.linalg.cond(m) > _COND_LIMIT:
            raise EvaluationError(
                f"E + beta*Gamma0 ill-conditioned at beta={float(b)!r}; "
                "Gamma0 invariant breached")
        mat = np.linalg.solve(m, curve.gamma0)
        mat = 0.5 * (mat + mat.T)
        im_min = np.linalg.eigvalsh(mat.imag).min()
        if im_min <= 0:
            raise EvaluationError(
                f"Im Gamma(beta) lost positive definiteness at beta={float(b)!r}")
        sd = sqrt_det_gamma(curve, float(b))
        return GammaAt(beta=float(b), matrix=mat, sqrt_det=sd,
                       delta_gamma=curve.delta_gamma)
    mat = gamma_matrix(curve, b)
    sd = sqrt_det_gamma(curve, b)
    return GammaAt(beta=b, matrix=mat, sqrt_det=sd, delta_gamma=curve.delta_gamma)


def gamma_large_beta(curve: GammaCurve, beta):
    """Two-term large-beta expansion beta^-1 E - beta^-2 Gamma0^-1.

    Oracle for asymptotics tests only; error is O(beta^-3).
    """
    b = np.asarray(beta, dtype=float)
    if np.any(b == 0.0):
        raise DomainError("beta must be nonzero for the large-beta expansion")
    eye = np.eye(curve.dim)
    g0inv = curve.gamma0_inv()
    return (1.0 / b)[..., None, None] * eye - (1.0 / b ** 2)[..., None, None] * g0inv


def sqrt_det_marching(curve: GammaCurve, beta: float, max_steps: int = 100000):
    """Adaptive-step continuation of sqrt(det Gamma) from beta = 0.

    Reference implementation of the branch tracking: marches from 0 to
    ``beta``, halving the step until the phase of det(E + beta*Gamma0)
    changes by less than pi/4 between consecutive samples.  Used to
    cross-check `sqrt_det_gamma`.
    """
    target = float(beta)
    det_of = lambda b: np.linalg.det(np.eye(curve.dim) + b * curve.gamma0)

    pos = 0.0
    arg = 0.0        # continuous arg det(E + b Gamma0), starts at 0
    val = 1.0 + 0j   # det at current position
    step = target if target != 0.0 else 0.0
    steps = 0
    while pos != target:
        if steps > max_steps:
            raise EvaluationError("branch marching failed to reach target beta")
        nxt = pos + step
        # do not overshoot
        if (target - pos) * (target - nxt) < 0:
            nxt = target
        new_val = det_of(nxt)
        dphi = np.angle(new_val / val)
        if abs(dphi) >= np.pi / 4 and abs(nxt - pos) > 1e-300:
            step *= 0.5
            steps += 1
            continue
        arg += dphi
        val = new_val
        pos = nxt
        step *= 2.0
        if abs(step) > abs(target - pos) and pos != target:
            step = target - pos
        steps += 1
    det0 = np.linalg.det(curve.gamma0)
    log_abs = 0.5 * (np.log(np.abs(det0)) - np.log(np.abs(val)))
    phase = 0.5 * (curve._arg_det0 - arg)
    return np.exp(log_abs + 1j * phase)


def principal_axes(matrix) -> tuple:
    """Major-axis angle and sorted widths of a positive definite 2x2 form.

    Parameters
    ----------
    matrix : (2, 2) array_like
        Real symmetric positive definite matrix (typically Im Gamma(beta)).

    Returns
    -------
    (angle, widths)
        ``angle`` of the major axis (eigenvector of the largest eigenvalue)
        in (-pi/2, pi/2], ``widths`` the eigenvalue pair sorted descending.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.shape != (2, 2):
        raise DomainError("principal_axes expects a 2x2 matrix")
    if abs(mat[0, 1] - mat[1, 0]) > 1e-12 * max(1.0, np.abs(mat).max()):
        raise DomainError("principal_axes expects a symmetric matrix")
    evals, evecs = np.linalg.eigh(mat)
    if evals.min() <= 0:
        raise DomainError("matrix is not positive definite")
    major = evecs[:, 1]  # eigh sorts ascending
    angle = np.arctan2(major[1], major[0])
    if angle <= -np.pi / 2:
        angle += np.pi
    elif angle > np.pi / 2:
        angle -= np.pi
    return float(angle), (float(evals[1]), float(evals[0]))


def spectral_norm(matrix) -> float:
    """Largest singular value; the matrix norm used in regime conditions."""
    return float(np.linalg.norm(np.asarray(matrix), 2))
