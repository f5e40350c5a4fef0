"""Log-complex field values and space-time points.

Field magnitudes in this package routinely reach ``exp(-25000)``, far below
the smallest positive double.  Every field evaluator therefore returns a
:class:`LogComplexField` carrying ``log|u|`` and ``arg u`` separately; the
linear ``value`` is materialized only when it is representable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# |log_abs| below which exp() is safe and the linear value is meaningful.
_REPRESENTABLE = 300.0


@dataclass(frozen=True)
class LogComplexField:
    """A complex field value ``exp(log_abs + 1j*phase)``.

    Both fields may be scalars or numpy arrays of a common shape.  ``phase``
    is in radians and is only defined modulo 2*pi; no global unwrapping is
    implied between separate evaluations.
    """

    log_abs: np.ndarray | float
    phase: np.ndarray | float

    @classmethod
    def from_value(cls, value) -> "LogComplexField":
        value = np.asarray(value, dtype=complex)
        out = cls(np.log(np.abs(value)), np.angle(value))
        return out

    @classmethod
    def from_log(cls, log_value) -> "LogComplexField":
        log_value = np.asarray(log_value, dtype=complex)
        return cls(log_value.real, log_value.imag)

    @property
    def log_value(self):
        return self.log_abs + 1j * np.asarray(self.phase)

    @property
    def value(self):
        """Linear complex value; overflows to inf/0 outside the safe range."""
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.log_abs) * np.exp(1j * np.asarray(self.phase))

    @property
    def representable(self):
        return np.abs(self.log_abs) < _REPRESENTABLE

    def __mul__(self, other: "LogComplexField") -> "LogComplexField":
        return LogComplexField(self.log_abs + other.log_abs,
                               np.asarray(self.phase) + np.asarray(other.phase))

    def __truediv__(self, other: "LogComplexField") -> "LogComplexField":
        return LogComplexField(self.log_abs - other.log_abs,
                               np.asarray(self.phase) - np.asarray(other.phase))

    def scaled(self, factor: complex) -> "LogComplexField":
        """Multiply by an ordinary (representable) complex constant."""
        factor = complex(factor)
        return LogComplexField(self.log_abs + np.log(abs(factor)),
                               np.asarray(self.phase) + np.angle(factor))


@dataclass(frozen=True)
class SpacetimePoint:
    """Event (t, z, r_perp) with light-cone variables alpha, beta.

    ``r_perp`` holds the d transverse coordinates.  All entries may also be
    equal-shaped numpy arrays, in which case derived quantities broadcast.
    """

    t: float
    z: float
    r_perp: tuple | np.ndarray

    def __post_init__(self):
        rp = np.asarray(self.r_perp, dtype=float)
        object.__setattr__(self, "r_perp", rp)

    @property
    def alpha(self):
        return np.asarray(self.z) - np.asarray(self.t)

    @property
    def beta(self):
        return np.asarray(self.z) + np.asarray(self.t)

    @property
    def dim(self) -> int:
        """Number of transverse coordinates d."""
        return self.r_perp.shape[-1]

    def shifted(self, dt=0.0, dz=0.0, dr=None) -> "SpacetimePoint":
        rp = self.r_perp if dr is None else self.r_perp + np.asarray(dr)
        return SpacetimePoint(np.asarray(self.t) + dt, np.asarray(self.z) + dz, rp)
