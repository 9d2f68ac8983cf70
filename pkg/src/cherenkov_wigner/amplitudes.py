"""Tree-level helicity amplitudes for photon emission by an electron in a
medium: small Wigner d-functions, the four contributing partial amplitudes,
|M|^2, and the amplitude phase with its momentum gradients.

The partial-amplitude structure is hard-enumerated: exactly the four
(sigma, sigma', sigma_gamma) combinations obeying sigma = sigma' + sigma_gamma
contribute.  Partial amplitudes are real but signed; the overall coupling
g(lambda, lambda') is folded into the phase only through its sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import numerics
from .kinematics import EmissionGeometry, Momentum3

__all__ = [
    "ALPHA_EM",
    "HelicityConfig",
    "AmplitudeValue",
    "DegeneratePhase",
    "PhaseWrapFailure",
    "wigner_d_half",
    "wigner_d_one",
    "coupling",
    "helicity_amplitude",
    "amplitude_complex",
    "summed_mod_squared",
    "phase_gradient",
    "combined_phase_gradient",
]

ALPHA_EM = 1.0 / 137.035999084

_TWO_PI = 2.0 * math.pi


class DegeneratePhase(ArithmeticError):
    """Both phase sums vanish; the amplitude phase is undefined."""


class PhaseWrapFailure(ArithmeticError):
    """Phase unwrapping ambiguous within the differentiation step."""


@dataclass(frozen=True)
class HelicityConfig:
    lambda_e: float = 0.5
    lambda_prime: float = 0.5
    lambda_gamma: int = 1

    def __post_init__(self):
        if self.lambda_e not in (0.5, -0.5) or self.lambda_prime not in (0.5, -0.5):
            raise ValueError("electron helicities must be +-1/2")
        if self.lambda_gamma not in (1, -1):
            raise ValueError("photon helicity must be +-1")


@dataclass(frozen=True)
class AmplitudeValue:
    """|M|^2 (coupling included) and the amplitude phase in (-pi, pi]."""

    mod_squared: float
    phase: float
    degenerate: bool = False


def wigner_d_half(sigma: float, lam: float, theta: float) -> float:
    """d^(1/2)_{sigma lambda}(theta) = delta_{sigma lambda} cos(theta/2)
    - 2 sigma delta_{sigma,-lambda} sin(theta/2)."""
    if sigma not in (0.5, -0.5) or lam not in (0.5, -0.5):
        raise ValueError("spin-1/2 projections must be +-1/2")
    if sigma == lam:
        return math.cos(0.5 * theta)
    return -2.0 * sigma * math.sin(0.5 * theta)


def wigner_d_one(sigma: int, lam: int, theta: float) -> float:
    """Spin-1 entries needed here: d^1_{11} = cos^2(theta/2),
    d^1_{-11} = sin^2(theta/2), d^1_{0 lambda} = (lambda/sqrt2) sin(theta),
    extended to lambda = -1 by d^1_{sigma,-lambda} = d^1_{-sigma,lambda}."""
    if sigma not in (1, 0, -1) or lam not in (1, -1):
        raise ValueError("sigma in {0,+-1}, lambda in {+-1}")
    if sigma == 0:
        return lam / math.sqrt(2.0) * math.sin(theta)
    if sigma == lam:
        return math.cos(0.5 * theta) ** 2
    return math.sin(0.5 * theta) ** 2


def coupling(epsilon: float, epsilon_prime: float, lambda_e: float,
             lambda_prime: float) -> float:
    """g = sqrt(4 pi alpha) (2 lam sqrt(eps-1) sqrt(eps'+1)
    + 2 lam' sqrt(eps'-1) sqrt(eps+1)); real, possibly negative."""
    return math.sqrt(4.0 * math.pi * ALPHA_EM) * (
        2.0 * lambda_e * math.sqrt(max(epsilon - 1.0, 0.0))
        * math.sqrt(epsilon_prime + 1.0)
        + 2.0 * lambda_prime * math.sqrt(max(epsilon_prime - 1.0, 0.0))
        * math.sqrt(epsilon + 1.0))


def _partial_terms(theta, phi, theta_p, phi_p, theta_k, phi_k,
                   lambda_e, lambda_prime, lambda_gamma):
    """The four signed partial amplitudes and their azimuthal phases,
    ordered (1/2,-1/2,1), (1/2,1/2,0), (-1/2,1/2,-1), (-1/2,-1/2,0)."""
    sqrt2 = math.sqrt(2.0)
    m1 = (sqrt2 * wigner_d_half(0.5, lambda_e, theta)
          * wigner_d_half(-0.5, lambda_prime, theta_p)
          * wigner_d_one(1, lambda_gamma, theta_k))
    z1 = -0.5 * (phi + phi_p) + phi_k
    m2 = (-wigner_d_half(0.5, lambda_e, theta)
          * wigner_d_half(0.5, lambda_prime, theta_p)
          * wigner_d_one(0, lambda_gamma, theta_k))
    z2 = 0.5 * (phi_p - phi)
    m3 = (-sqrt2 * wigner_d_half(-0.5, lambda_e, theta)
          * wigner_d_half(0.5, lambda_prime, theta_p)
          * wigner_d_one(-1, lambda_gamma, theta_k))
    z3 = -z1
    m4 = (wigner_d_half(-0.5, lambda_e, theta)
          * wigner_d_half(-0.5, lambda_prime, theta_p)
          * wigner_d_one(0, lambda_gamma, theta_k))
    z4 = -z2
    return (m1, m2, m3, m4), (z1, z2, z3, z4)


def _geometry_terms(geom: EmissionGeometry, h: HelicityConfig):
    # half-integer phases are double-valued under 2*pi relabeling of a
    # single azimuth; anchor all azimuths within pi of phi_k (the
    # triangle-point convention) so that zeta is continuous and mirror
    # configurations give exactly opposite phases
    phi_k = geom.k.phi
    phi = phi_k + math.remainder(geom.p.phi - phi_k, _TWO_PI)
    phi_p = phi_k + math.remainder(geom.p_prime.phi - phi_k, _TWO_PI)
    return _partial_terms(geom.p.theta, phi,
                          geom.p_prime.theta, phi_p,
                          geom.k.theta, phi_k,
                          h.lambda_e, h.lambda_prime, h.lambda_gamma)


def _wrap(phase: float) -> float:
    """Wrap into (-pi, pi]."""
    w = math.remainder(phase, _TWO_PI)
    return w if w != -math.pi else math.pi


def helicity_amplitude(geom: EmissionGeometry,
                       h: HelicityConfig | None = None) -> AmplitudeValue:
    """|M|^2 from the four-term coherent expansion (squares plus the six
    cosine cross terms) and the phase from the two-argument arctangent of
    the partial sine/cosine sums, with the coupling sign folded in as 0/pi.
    """
    h = h or HelicityConfig(geom.lambda_e, geom.lambda_prime, geom.lambda_gamma)
    ms, zs = _geometry_terms(geom, h)
    g = coupling(geom.epsilon, geom.epsilon_prime, h.lambda_e, h.lambda_prime)
    mod2 = sum(m * m for m in ms)
    for i in range(4):
        for j in range(i + 1, 4):
            mod2 += 2.0 * ms[i] * ms[j] * math.cos(zs[i] - zs[j])
    mod2 = max(mod2, 0.0) * g * g
    s_sin = sum(m * math.sin(z) for m, z in zip(ms, zs))
    s_cos = sum(m * math.cos(z) for m, z in zip(ms, zs))
    scale = max(sum(abs(m) for m in ms), 1e-300)
    if math.hypot(s_sin, s_cos) < 1e-15 * scale or scale <= 1e-300:
        return AmplitudeValue(mod2, 0.0, degenerate=True)
    phase = math.atan2(s_sin, s_cos)
    if g < 0:
        phase = _wrap(phase + math.pi)
    return AmplitudeValue(mod2, phase, degenerate=False)


def amplitude_complex(geom: EmissionGeometry,
                      h: HelicityConfig | None = None) -> complex:
    """Coherent sum g * sum_i M_i exp(i zeta_i); cross-check route for the
    cosine expansion used by ``helicity_amplitude``."""
    h = h or HelicityConfig(geom.lambda_e, geom.lambda_prime, geom.lambda_gamma)
    ms, zs = _geometry_terms(geom, h)
    g = coupling(geom.epsilon, geom.epsilon_prime, h.lambda_e, h.lambda_prime)
    return g * sum(m * complex(math.cos(z), math.sin(z))
                   for m, z in zip(ms, zs))


def summed_mod_squared(geom: EmissionGeometry, lambda_e: float | None = None,
                       lambda_prime: float | None = None) -> float:
    """Sum of |M|^2 over the photon helicity at fixed electron helicities."""
    le = geom.lambda_e if lambda_e is None else lambda_e
    lp = geom.lambda_prime if lambda_prime is None else lambda_prime
    return sum(helicity_amplitude(geom, HelicityConfig(le, lp, lg)).mod_squared
               for lg in (1, -1))


def _transverse_scale(geom: EmissionGeometry) -> float:
    """Characteristic momentum scale of the amplitude-phase variation:
    the smallest non-vanishing transverse magnitude."""
    candidates = [x for x in (geom.k.perp, geom.p.perp, geom.p_prime.perp)
                  if x > 0.0]
    return min(candidates) if candidates else geom.k.mag


def _zeta_at(p_arr, k_arr, omega, h) -> tuple[float, bool]:
    p = Momentum3.from_array(p_arr)
    k = Momentum3.from_array(k_arr)
    geom = EmissionGeometry(p, p - k, k, omega,
                            h.lambda_e, h.lambda_prime, h.lambda_gamma)
    amp = helicity_amplitude(geom, h)
    return amp.phase, amp.degenerate


def phase_gradient(geom: EmissionGeometry, h: HelicityConfig | None = None,
                   spec: numerics.DiffSpec | None = None):
    """Gradients of the amplitude phase with respect to p (at fixed k) and
    k (at fixed p), the final electron p' = p - k varying accordingly.

    Their sum is the fixed-p' joint gradient entering the arrival-time
    shift.  The phase is unwrapped across +-pi relative to the central
    configuration before differencing.
    """
    h = h or HelicityConfig(geom.lambda_e, geom.lambda_prime, geom.lambda_gamma)
    # displacements are parameterized in units of the transverse scale, so
    # the phase varies on an O(1) scale; a 1e-4 step balances evaluation
    # noise against truncation there
    spec = spec or numerics.DiffSpec(base_step=1e-4)
    p0 = geom.p.as_array()
    k0 = geom.k.as_array()
    zeta0, degenerate = _zeta_at(p0, k0, geom.omega, h)
    if degenerate:
        raise DegeneratePhase("amplitude phase undefined at this geometry")
    scale = _transverse_scale(geom)

    def unwrapped(p_arr, k_arr):
        z, _ = _zeta_at(p_arr, k_arr, geom.omega, h)
        dz = math.remainder(z - zeta0, _TWO_PI)
        if abs(dz) > 1.5:
            raise PhaseWrapFailure(
                f"phase jumped by {dz} within one differentiation step")
        return zeta0 + dz

    grad_p = np.empty(3)
    grad_k = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = scale

        def fp(u, e=e):
            return unwrapped(p0 + u * e, k0)

        def fk(u, e=e):
            return unwrapped(p0, k0 + u * e)

        grad_p[i] = numerics.differentiate(fp, 0.0, spec) / scale
        grad_k[i] = numerics.differentiate(fk, 0.0, spec) / scale
    return grad_p, grad_k


def combined_phase_gradient(geom: EmissionGeometry,
                            h: HelicityConfig | None = None,
                            spec: numerics.DiffSpec | None = None) -> np.ndarray:
    """(d/dp + d/dk) of the amplitude phase at fixed final electron."""
    grad_p, grad_k = phase_gradient(geom, h, spec)
    return grad_p + grad_k
