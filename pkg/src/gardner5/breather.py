"""Closed-form breather of the 5th-order Gardner equation.

The breather is a two-phase solution built from a carrier phase
y1 = x + delta5*t + x1 and an envelope phase y2 = x + gamma5*t + x2:

    B(t, x) = 2 d/dx [ arctan(G(t,x) / F(t,x)) ] = 2 M / N

with

    G = (beta*sqrt(alpha^2+beta^2) / (alpha*sqrt(Delta))) * sin(alpha*y1)
        - 2*mu*beta*exp(beta*y2) / Delta,
    F = cosh(beta*y2)
        - 2*mu*beta*(alpha*cos(alpha*y1) - beta*sin(alpha*y1))
          / (alpha*sqrt(alpha^2+beta^2)*sqrt(Delta)),
    M = Gx*F - Fx*G,   N = F^2 + G^2,   Delta = alpha^2 + beta^2 - 4*mu^2 > 0.

Two genuinely independent evaluation paths are provided: the rational form
2M/N evaluated pointwise, and spectral differentiation of the sampled phase
2*arctan(G/F).  All hyperbolic quantities are rescaled by exp(-|beta*y2|) so
that evaluation stays finite for |beta*y2| up to ~1e4 (the raw cosh overflows
near 710).

Note: the spatial integral of B equals 2*arctan(-4*mu*beta/Delta).  It
vanishes only in the mu = 0 limit (the 5th-order mKdV breather).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fourier import Grid, SampledField, derivative

# Largest exponent kept in unscaled G/F output; e^600 is still far from
# double overflow even after products with O(10) coefficients.
GF_EXP_LIMIT = 600.0


class ParameterError(ValueError):
    """Breather parameters violate a validity constraint."""


@dataclass(frozen=True)
class BreatherParams:
    """Validated parameter tuple (alpha, beta, mu, x1, x2).

    alpha, beta > 0 are the carrier frequency and the amplitude parameter,
    mu >= 0 the background parameter (mu = 0 is the 5th-order mKdV limit),
    x1, x2 the carrier/envelope phase shifts.  Requires
    Delta = alpha^2 + beta^2 - 4 mu^2 > 0.
    """

    alpha: float
    beta: float
    mu: float
    x1: float = 0.0
    x2: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "beta", "mu", "x1", "x2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
        if self.alpha <= 0:
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.beta <= 0:
            raise ParameterError(f"beta must be > 0, got {self.beta}")
        if self.mu < 0:
            raise ParameterError(f"mu must be >= 0, got {self.mu}")
        if self.delta <= 0:
            raise ParameterError(
                f"Delta = alpha^2 + beta^2 - 4 mu^2 = {self.delta} must be > 0"
            )

    @property
    def delta(self) -> float:
        """Discriminant Delta = alpha^2 + beta^2 - 4 mu^2."""
        return self.alpha**2 + self.beta**2 - 4.0 * self.mu**2


class Velocities(NamedTuple):
    delta5: float   # carrier phase speed: y1 = x + delta5*t + x1
    gamma5: float   # envelope phase speed: y2 = x + gamma5*t + x2


def validate_params(alpha, beta, mu, x1=0.0, x2=0.0) -> BreatherParams:
    """Validate raw reals into BreatherParams (see class docstring)."""
    return BreatherParams(float(alpha), float(beta), float(mu), float(x1), float(x2))


def velocities(params: BreatherParams) -> Velocities:
    """Exact polynomial phase velocities of the two breather phases."""
    a2, b2, m2 = params.alpha**2, params.beta**2, params.mu**2
    d5 = -a2**2 + 10 * a2 * b2 - 5 * b2**2 + 10 * (a2 - 3 * b2) * m2 - 30 * m2**2
    g5 = -b2**2 + 10 * a2 * b2 - 5 * a2**2 + 10 * (3 * a2 - b2) * m2 - 30 * m2**2
    return Velocities(d5, g5)


def envelope_center(params: BreatherParams, t: float) -> float:
    """x at which the envelope phase y2 vanishes (sech peak location)."""
    return -velocities(params).gamma5 * t - params.x2


def _phases(params, t, x):
    d5, g5 = velocities(params)
    y1 = x + d5 * t + params.x1
    y2 = x + g5 * t + params.x2
    return params.alpha * y1, params.beta * y2


def _scaled_parts(params, t, x):
    """G, F, Gx, Fx all rescaled by exp(-|beta*y2|), plus |beta*y2|.

    The common rescaling cancels in any quotient (B = 2M/N, arctan(G/F)),
    which is what makes evaluation at |beta*y2| ~ 1e4 possible.
    """
    al, be, mu = params.alpha, params.beta, params.mu
    a, z = _phases(params, t, np.asarray(x, dtype=float))
    az = np.abs(z)
    em = np.exp(z - az)        # e^{z} / e^{|z|}
    ep = np.exp(-z - az)       # e^{-z} / e^{|z|}
    unit = np.exp(-az)         # 1 / e^{|z|}
    ch = 0.5 * (em + ep)
    sh = 0.5 * (em - ep)
    sab = math.sqrt(al**2 + be**2)
    sD = math.sqrt(params.delta)
    c1 = be * sab / (al * sD)
    c2 = 2.0 * mu * be / params.delta
    c3 = 2.0 * mu * be / (al * sab * sD)
    sin_a, cos_a = np.sin(a), np.cos(a)
    G = c1 * sin_a * unit - c2 * em
    F = ch - c3 * (al * cos_a - be * sin_a) * unit
    Gx = c1 * al * cos_a * unit - c2 * be * em
    Fx = be * sh + c3 * al * (al * sin_a + be * cos_a) * unit
    return G, F, Gx, Fx, az


def eval_GF(params: BreatherParams, t, x):
    """Evaluate (G, F) with an overflow guard.

    Returns (G, F, log_scale): the true values are G*exp(log_scale) and
    F*exp(log_scale).  log_scale is 0 wherever |beta*y2| <= 600, so the
    returned values are then exact; beyond that the common rescaling keeps
    them finite while preserving the quotient G/F.
    """
    G, F, _, _, az = _scaled_parts(params, t, x)
    keep = np.minimum(az, GF_EXP_LIMIT)
    scale = np.exp(keep)
    return G * scale, F * scale, az - keep


def eval_rational(params: BreatherParams, t, x):
    """Breather values via the rational form 2M/N.  Vectorized in x."""
    G, F, Gx, Fx, _ = _scaled_parts(params, t, x)
    N = F * F + G * G
    if np.min(N) <= 1e-300:
        raise ParameterError(
            "denominator N = F^2 + G^2 vanished; parameters outside the "
            "validated range (Delta > 0 should prevent this)"
        )
    return 2.0 * (Gx * F - Fx * G) / N


def eval_arctan_derivative(params: BreatherParams, t: float, grid: Grid,
                           edge_tol: float = 1e-10) -> SampledField:
    """Breather via spectral differentiation of the sampled phase.

    Samples the continuous branch of 2*arctan(G/F) on the grid (arctan2 plus
    unwrapping), removes the linear ramp between the two asymptotic edge
    constants (they differ by 2*arctan(-4 mu beta / Delta) for mu > 0), and
    differentiates spectrally.  Independent of eval_rational.

    Raises EdgeDecayError (via a ValueError subclass) when the phase is not
    flat at the window edges, i.e. the envelope has not decayed on the grid.
    """
    x = grid.nodes
    G, F, _, _, _ = _scaled_parts(params, t, x)
    A = 2.0 * np.unwrap(np.arctan2(G, F))
    h = grid.spacing
    # Edge-flatness diagnostic from A itself (keeps this path independent of
    # the rational form): finite-difference slope at the edges vs the peak.
    slopes = np.abs(np.diff(A)) / h
    peak = np.max(slopes)
    m = max(4, grid.points // 256)
    edge = max(np.max(slopes[:m]), np.max(slopes[-m:]))
    if peak > 0 and edge > edge_tol * peak:
        raise GridTooNarrowError(
            f"envelope not decayed at window edges: edge/peak slope ratio "
            f"{edge / peak:.2e} exceeds {edge_tol:.1e}; widen the grid"
        )
    a_left = np.mean(A[:m])
    a_right = np.mean(A[-m:])
    jump = a_right - a_left
    ramp = jump * (x - x[0]) / grid.length
    periodic = SampledField(grid, A - ramp)
    dA = derivative(periodic, 1, edge_check=False)
    return SampledField(grid, dA.values + jump / grid.length)


class GridTooNarrowError(ValueError):
    """Evaluation window too narrow for spectral differentiation."""


def eval_approx(params: BreatherParams, t, x):
    """Large-alpha approximation 2 beta cos(alpha(x+delta5 t)) sech(beta(x+gamma5 t)).

    Equals sqrt(2) Re[exp(i alpha(x+delta5 t)) Q_beta(x+gamma5 t)].  Phase
    shifts x1, x2 are not part of this form.  Intended regime beta/alpha << 1
    but evaluable everywhere.
    """
    d5, g5 = velocities(params)
    x = np.asarray(x, dtype=float)
    env = params.beta * (x + g5 * t)
    out = 2.0 * params.beta * np.cos(params.alpha * (x + d5 * t)) / np.cosh(
        np.minimum(np.abs(env), GF_EXP_LIMIT)
    )
    # beyond the cosh guard the envelope is < 1e-260; flush to zero
    return np.where(np.abs(env) > GF_EXP_LIMIT, 0.0, out)


def sech_profile(beta: float, xi):
    """Rescaled ground state Q_beta(xi) = beta * sqrt(2) * sech(beta * xi).

    Q(xi) = sqrt(2) sech(xi) solves Q'' - Q + Q^3 = 0.
    """
    if beta <= 0:
        raise ParameterError(f"beta must be > 0, got {beta}")
    return beta * math.sqrt(2.0) / np.cosh(beta * np.asarray(xi, dtype=float))


def breather_integral(params: BreatherParams) -> float:
    """Closed-form spatial integral of B: 2*arctan(-4 mu beta / Delta).

    Zero exactly when mu = 0; negative for mu > 0.
    """
    return 2.0 * math.atan2(-4.0 * params.mu * params.beta, params.delta)


def sample_breather(params: BreatherParams, t: float, grid: Grid) -> SampledField:
    """Rational-form breather sampled on a grid."""
    return SampledField(grid, eval_rational(params, t, grid.nodes))
