"""Background metrics: Minkowski and spatially flat FRW in Cartesian comoving
coordinates ``(t, x, y, z)`` with signature ``(-, +, +, +)``.

The line element handled here is

    ds^2 = -c^2 dt^2 + a(t)^2 (dx^2 + dy^2 + dz^2),

with ``a(t) = 1`` for Minkowski.  All geometric quantities (inverse metric,
volume factor ``sqrt(-g)``, Christoffel symbols, Riemann components) come
from closed forms; nothing here is differentiated numerically.  The unit
tests cross-check the closed forms against finite differences of the metric.

Conventions:

* ``Gamma[lam, mu, nu]`` is ``Gamma^lam_{mu nu}``.
* ``Riemann[lam, mu, nu, rho]`` is ``R^lam_{mu nu rho}`` with
  ``R^lam_{mu nu rho} = d_nu Gamma^lam_{mu rho} - d_rho Gamma^lam_{mu nu}
  + Gamma^lam_{nu s} Gamma^s_{mu rho} - Gamma^lam_{rho s} Gamma^s_{mu nu}``.
* A metric contraction of two covectors ``k`` is
  ``k.k = g^{mu nu} k_mu k_nu``; negative means timelike, zero null,
  positive spacelike.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "ScaleFactor",
    "MetricSpec",
    "metric_diag",
    "inverse_metric_diag",
    "volume_factor",
    "christoffel",
    "riemann",
    "metric_at",
    "inverse_metric_at",
    "christoffel_at",
    "riemann_at",
    "riemann_lowered_at",
]


@dataclass(frozen=True)
class ScaleFactor:
    """Closed-form scale factor ``a(t)`` with derivatives and ``int dt / a``.

    Three models are supported:

    * ``constant``:     ``a(t) = a0``
    * ``exponential``:  ``a(t) = exp(H t)``
    * ``power_law``:    ``a(t) = (t / t0)**p``, valid only for ``t > 0``

    ``integral_inv`` returns an antiderivative of ``1 / a(t)`` (the conformal
    time up to an additive constant), used by traveling-wave phases of the
    form ``k x - k v int dt / a``.
    """

    model: str
    a0: float = 1.0
    H: float = 0.0
    p: float = 0.0
    t0: float = 1.0

    _MODELS = ("constant", "exponential", "power_law")

    def __post_init__(self):
        if self.model not in self._MODELS:
            raise ValueError(f"scale factor model must be one of {self._MODELS}, "
                             f"got {self.model!r}")
        if self.model == "constant" and not self.a0 > 0.0:
            raise ValueError(f"constant scale factor needs a0 > 0, got {self.a0}")
        if self.model == "power_law" and not self.t0 > 0.0:
            raise ValueError(f"power-law scale factor needs t0 > 0, got {self.t0}")

    @classmethod
    def constant(cls, a0=1.0):
        return cls(model="constant", a0=float(a0))

    @classmethod
    def exponential(cls, H):
        return cls(model="exponential", H=float(H))

    @classmethod
    def power_law(cls, p, t0=1.0):
        return cls(model="power_law", p=float(p), t0=float(t0))

    def _check_chart(self, t):
        if self.model == "power_law" and np.any(np.asarray(t) <= 0.0):
            raise DomainError(
                "power-law scale factor is only defined on the chart t > 0")

    def a(self, t):
        """Scale factor ``a(t)``."""
        self._check_chart(t)
        t = np.asarray(t, dtype=np.float64)
        if self.model == "constant":
            return np.full_like(t, self.a0)
        if self.model == "exponential":
            return np.exp(self.H * t)
        return (t / self.t0) ** self.p

    def a_dot(self, t):
        """First time derivative ``da/dt``."""
        self._check_chart(t)
        t = np.asarray(t, dtype=np.float64)
        if self.model == "constant":
            return np.zeros_like(t)
        if self.model == "exponential":
            return self.H * np.exp(self.H * t)
        return (self.p / self.t0) * (t / self.t0) ** (self.p - 1.0)

    def a_ddot(self, t):
        """Second time derivative ``d^2 a / dt^2``."""
        self._check_chart(t)
        t = np.asarray(t, dtype=np.float64)
        if self.model == "constant":
            return np.zeros_like(t)
        if self.model == "exponential":
            return self.H * self.H * np.exp(self.H * t)
        return (self.p * (self.p - 1.0) / self.t0 ** 2) * (t / self.t0) ** (self.p - 2.0)

    def integral_inv(self, t):
        """An antiderivative of ``1 / a(t)`` evaluated at ``t``.

        constant:     ``t / a0``
        exponential:  ``-exp(-H t) / H``  (``t`` when ``H == 0``)
        power law:    ``t0**p t**(1-p) / (1-p)``  (``t0 ln t`` when ``p == 1``)
        """
        self._check_chart(t)
        t = np.asarray(t, dtype=np.float64)
        if self.model == "constant":
            return t / self.a0
        if self.model == "exponential":
            if self.H == 0.0:
                return t.copy()
            return -np.exp(-self.H * t) / self.H
        if self.p == 1.0:
            return self.t0 * np.log(t)
        return self.t0 ** self.p * t ** (1.0 - self.p) / (1.0 - self.p)


@dataclass(frozen=True)
class MetricSpec:
    """A background metric: ``minkowski`` or spatially flat ``frw``."""

    kind: str
    c: float = 1.0
    scale_factor: ScaleFactor = field(default_factory=lambda: ScaleFactor.constant())

    _KINDS = ("minkowski", "frw")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"metric kind must be one of {self._KINDS}, "
                             f"got {self.kind!r}")
        if not (self.c > 0.0 and math.isfinite(self.c)):
            raise ValueError(f"wave speed c must be positive and finite, got {self.c}")
        if self.kind == "minkowski" and self.scale_factor != ScaleFactor.constant():
            raise ValueError("a Minkowski metric cannot carry a scale factor")

    @classmethod
    def minkowski(cls, c=1.0):
        return cls(kind="minkowski", c=float(c))

    @classmethod
    def frw(cls, scale_factor, c=1.0):
        return cls(kind="frw", c=float(c), scale_factor=scale_factor)

    @property
    def is_flat(self):
        """True when curvature vanishes identically (Minkowski or constant a)."""
        return self.kind == "minkowski" or self.scale_factor.model == "constant"

    def scale(self, t):
        """``a(t)`` as an array broadcast against ``t`` (ones for Minkowski)."""
        if self.kind == "minkowski":
            return np.ones_like(np.asarray(t, dtype=np.float64))
        return self.scale_factor.a(t)


def metric_diag(m: MetricSpec, t):
    """Diagonal ``(g_tt, g_xx, g_yy, g_zz)`` as arrays broadcast against ``t``.

    ``g_tt = -c^2`` and ``g_ii = a(t)^2``.
    """
    t = np.asarray(t, dtype=np.float64)
    a2 = m.scale(t) ** 2
    gtt = np.full_like(t, -m.c * m.c)
    return (gtt, a2, a2.copy(), a2.copy())


def inverse_metric_diag(m: MetricSpec, t):
    """Diagonal ``(g^tt, g^xx, g^yy, g^zz)`` as arrays broadcast against ``t``."""
    t = np.asarray(t, dtype=np.float64)
    inv_a2 = 1.0 / m.scale(t) ** 2
    gtt = np.full_like(t, -1.0 / (m.c * m.c))
    return (gtt, inv_a2, inv_a2.copy(), inv_a2.copy())


def volume_factor(m: MetricSpec, t):
    """``sqrt(-det g) = c a(t)^3`` as an array broadcast against ``t``."""
    t = np.asarray(t, dtype=np.float64)
    return m.c * m.scale(t) ** 3


def christoffel(m: MetricSpec, t):
    """All nonzero Christoffel symbols at times ``t``.

    Returns ``(gamma_t_ii, gamma_i_ti)`` where

    * ``gamma_t_ii = Gamma^t_{xx} = Gamma^t_{yy} = Gamma^t_{zz} = a a' / c^2``
    * ``gamma_i_ti = Gamma^x_{tx} = Gamma^y_{ty} = Gamma^z_{tz} = a' / a``

    Both vanish identically for Minkowski (returned as exact zeros).
    """
    t = np.asarray(t, dtype=np.float64)
    if m.kind == "minkowski":
        z = np.zeros_like(t)
        return (z, z.copy())
    a = m.scale_factor.a(t)
    a_dot = m.scale_factor.a_dot(t)
    return (a * a_dot / (m.c * m.c), a_dot / a)


def riemann(m: MetricSpec, t):
    """Independent nonzero Riemann components ``R^lam_{mu nu rho}`` at ``t``.

    Returns ``(r_titi, r_itit, r_ijij)`` where for distinct spatial ``i, j``:

    * ``r_titi = R^t_{i t i} = a a'' / c^2``
    * ``r_itit = R^i_{t i t} = -a'' / a``
    * ``r_ijij = R^i_{j i j} = (a')^2 / c^2``

    All components vanish identically for Minkowski (exact zeros).
    """
    t = np.asarray(t, dtype=np.float64)
    if m.kind == "minkowski":
        z = np.zeros_like(t)
        return (z, z.copy(), z.copy())
    a = m.scale_factor.a(t)
    a_dot = m.scale_factor.a_dot(t)
    a_ddot = m.scale_factor.a_ddot(t)
    c2 = m.c * m.c
    return (a * a_ddot / c2, -a_ddot / a, a_dot * a_dot / c2)


def _t_of(point):
    point = np.asarray(point, dtype=np.float64)
    if point.shape != (4,):
        raise ValueError(f"a spacetime point needs 4 coordinates, got shape {point.shape}")
    return float(point[0])


def metric_at(m: MetricSpec, point):
    """Full ``(4, 4)`` metric matrix at one spacetime point ``(t, x, y, z)``."""
    t = _t_of(point)
    return np.diag([d.item() for d in metric_diag(m, t)])


def inverse_metric_at(m: MetricSpec, point):
    """Full ``(4, 4)`` inverse metric matrix at one spacetime point."""
    t = _t_of(point)
    return np.diag([d.item() for d in inverse_metric_diag(m, t)])


def christoffel_at(m: MetricSpec, point):
    """Full ``(4, 4, 4)`` array ``Gamma^lam_{mu nu}`` at one spacetime point."""
    t = _t_of(point)
    g_t_ii, g_i_ti = christoffel(m, t)
    out = np.zeros((4, 4, 4))
    for i in (1, 2, 3):
        out[0, i, i] = g_t_ii
        out[i, 0, i] = g_i_ti
        out[i, i, 0] = g_i_ti
    return out


def riemann_at(m: MetricSpec, point):
    """Full ``(4, 4, 4, 4)`` array ``R^lam_{mu nu rho}`` at one spacetime point."""
    t = _t_of(point)
    r_titi, r_itit, r_ijij = riemann(m, t)
    out = np.zeros((4, 4, 4, 4))
    for i in (1, 2, 3):
        out[0, i, 0, i] = r_titi
        out[0, i, i, 0] = -r_titi
        out[i, 0, i, 0] = r_itit
        out[i, 0, 0, i] = -r_itit
        for j in (1, 2, 3):
            if j != i:
                out[i, j, i, j] = r_ijij
                out[i, j, j, i] = -r_ijij
    return out


def riemann_lowered_at(m: MetricSpec, point):
    """Fully lowered ``R_{lam mu nu rho}`` at one spacetime point."""
    t = _t_of(point)
    g = metric_diag(m, t)
    up = riemann_at(m, point)
    out = up.copy()
    for lam in range(4):
        out[lam] = g[lam] * up[lam]
    return out
