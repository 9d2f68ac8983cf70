"""Closed-form phase-space observables of the emitted photon field:
spreading (diffraction) times and their singular angles, Gouy phases,
correlation radii, flash duration, arrival time and its quantum shift,
and formation lengths, in both weak-dispersion and dispersive variants.

The central object is the pair of complex coefficients

    eta(t') = 1/(2 sigma^2) + (i t'/4) a,     chi(t') = (i t'/4) b,

with a = |u_k|/|k| - 1/eps and b = 1/eps - xi |u_k|/|k|; every closed form
below (G, Gouy phase, correlation exponent) is algebra on (eta, chi) and
the velocity pair (u_p, u_k).  The weak-dispersion branch is the same
algebra with the dispersion parameters D and E set to zero.

1/t_d is stored instead of t_d: the singular angles are then ordinary
zeros instead of poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntFlag
from typing import Callable, Optional

import numpy as np

from . import amplitudes
from .kinematics import ElectronPacket, EmissionGeometry
from .medium import MediumModel

__all__ = [
    "SpreadTimes",
    "EtaChi",
    "CorrelationGeometry",
    "FlashStats",
    "FormationLengths",
    "PhaseSpaceKernel",
    "WkbFlags",
    "NoSingularAngles",
    "MachConeDegenerate",
    "CollinearVelocities",
    "dispersion_coefficients",
    "spreading_times",
    "spread_times_at_angle",
    "singular_angles",
    "singular_width_approx",
    "gouy_phase",
    "correlation_geometry",
    "flash_stats",
    "formation_lengths",
    "wkb_flags",
]


class NoSingularAngles(ValueError):
    """The spreading time has no poles (Cherenkov condition not met)."""


class MachConeDegenerate(ZeroDivisionError):
    """u_p = u_k; the correlation exponent is degenerate."""


class CollinearVelocities(ZeroDivisionError):
    """[u_p x u_k] = 0; temporal localization is absent."""


class WkbFlags(IntFlag):
    NONE = 0
    SMALL_ANGLE = 1       # theta_k below 1/gamma
    TURNING_POINT = 2     # |u_p - u_k| within 10 sigma
    QUAD_NONCONVERGED = 4
    DEGENERATE_PHASE = 8


@dataclass(frozen=True)
class SpreadTimes:
    """Diffraction times in Compton-time units.

    ``inv_t_d`` is 1/t_d (zero at the singular angles); ``tau_d`` stores the
    spreading-mixing time as a signed square root, i.e. tau_d_sq =
    sign(tau_d) * tau_d^2, since only tau_d^2 (which can be negative) enters
    the correlation radius.
    """

    inv_t_d: float
    t_d_tilde: float
    tau_d: float
    dispersive: bool = False

    @property
    def t_d(self) -> float:
        return 1.0 / self.inv_t_d if self.inv_t_d != 0.0 else math.inf

    @property
    def tau_d_sq(self) -> float:
        return math.copysign(self.tau_d * self.tau_d, self.tau_d)


@dataclass(frozen=True)
class EtaChi:
    """The complex coefficient pair of the master-integrand Gaussian as
    functions of the formation time t'; Re eta(t') = 1/(2 sigma^2) > 0
    always."""

    eta: Callable
    chi: Callable


@dataclass(frozen=True)
class CorrelationGeometry:
    """Directional correlation scales at (R_hat, t'): the exponent of the
    master integrand is -R^2/R_eff^2 + i R^2/R_im^2 (the imaginary term is
    signed, hence 1/R_im^2 is stored)."""

    R: np.ndarray
    u_p: np.ndarray
    u_k: np.ndarray
    R_eff: float
    R_im_sq_inverse: float
    sigma_perp_t: float


@dataclass(frozen=True)
class FlashStats:
    """Flash duration, arrival-probability peak, and its quantum shift."""

    sigma_t: float
    t_0: float
    delta_t: float
    l_0: np.ndarray


@dataclass(frozen=True)
class FormationLengths:
    l_f: float
    l_cl: float

    @property
    def inv_l_f(self) -> float:
        return 1.0 / self.l_f if self.l_f not in (0.0,) and math.isfinite(self.l_f) \
            else (0.0 if math.isinf(self.l_f) else math.inf)

    @property
    def inv_l_cl(self) -> float:
        return 0.0 if math.isinf(self.l_cl) else 1.0 / self.l_cl


def dispersion_coefficients(n: float, omega: float, epsilon: float,
                            d_param: float = 0.0, e_param: float = 0.0):
    """(a, b, |u_k|) for a medium with local dispersion strengths D, E:

        |u_k| = 1/(n (1+D)),   a = |u_k|/|k| - 1/eps,
        b = 1/eps - xi |u_k|/|k|,   xi = E + n^2 (1 + 4 D + D^2),

    reducing at D = E = 0 to a = 1/(omega n^2) - 1/eps, b = 1/eps - 1/omega.
    """
    one_plus_d = 1.0 + d_param
    if abs(n * one_plus_d) < 1e-12:
        raise ZeroDivisionError("n (1 + D) vanished; group velocity degenerate")
    uk_mag = 1.0 / (n * one_plus_d)
    uk_over_k = uk_mag / (n * omega)
    xi = e_param + n * n * (1.0 + d_param * (4.0 + d_param))
    a = uk_over_k - 1.0 / epsilon
    b = 1.0 / epsilon - xi * uk_over_k
    return a, b, uk_mag


def _resolve_branch(medium: MediumModel, omega: float,
                    dispersive: Optional[bool]):
    d, e = 0.0, 0.0
    params = medium.dispersion_params(omega)
    if dispersive is None:
        from .medium import WEAK_DISPERSION_THRESHOLD as thr
        dispersive = (abs(params.d_param) >= thr or abs(params.e_param) >= thr)
    if dispersive:
        d, e = params.d_param, params.e_param
    return dispersive, d, e


def _spread_from_coeffs(a: float, b: float, sigma: float, cc: float,
                        dd: float, dispersive: bool) -> SpreadTimes:
    """SpreadTimes from the (a, b) pair and the velocity invariants
    cc = (u_p - u_k)^2, dd = [u_p x u_k]^2."""
    if cc < 1e-28:
        raise MachConeDegenerate("|u_p - u_k| ~ 0: WKB turning point")
    half_s2 = 0.5 * sigma * sigma
    inv_t_d = half_s2 * (a + b * dd / cc)
    t_d_tilde = (1.0 / (half_s2 * a)) if a != 0.0 else math.inf
    inv_tilde = half_s2 * a
    inv_tau_sq = half_s2 * b * (inv_t_d + inv_tilde)
    if inv_tau_sq == 0.0:
        tau_d = math.inf
    else:
        tau_sq = 1.0 / inv_tau_sq
        tau_d = math.copysign(math.sqrt(abs(tau_sq)), tau_sq)
    return SpreadTimes(inv_t_d, t_d_tilde, tau_d, dispersive)


def _velocities(geom: EmissionGeometry, uk_mag: float):
    u_p = geom.p.as_array() / geom.epsilon
    k_hat = geom.k.as_array() / geom.k.mag
    u_k = uk_mag * k_hat
    return u_p, u_k


def spreading_times(geom: EmissionGeometry, packet: ElectronPacket,
                    medium: MediumModel,
                    dispersive: Optional[bool] = None) -> SpreadTimes:
    """Diffraction times for the geometry's velocity pair.

    The branch is selected automatically from the medium's dispersion
    strengths unless ``dispersive`` forces it; singular angles show up as
    inv_t_d = 0, never as overflow.
    """
    dispersive, d, e = _resolve_branch(medium, geom.omega, dispersive)
    n = medium.index(geom.omega)[0]
    a, b, uk_mag = dispersion_coefficients(n, geom.omega, geom.epsilon, d, e)
    u_p, u_k = _velocities(geom, uk_mag)
    diff = u_p - u_k
    cross = np.cross(u_p, u_k)
    return _spread_from_coeffs(a, b, packet.sigma, float(diff @ diff),
                               float(cross @ cross), dispersive)


def spread_times_at_angle(beta: float, n: float, omega: float, epsilon: float,
                          sigma: float, theta: float, d_param: float = 0.0,
                          e_param: float = 0.0) -> SpreadTimes:
    """Parametric form with the z axis along the electron momentum and the
    photon at polar angle theta; used for angle sweeps and root searches.

    Evaluated in extended precision: near the Cherenkov angle the two terms
    of 1/t_d cancel to ~6 digits, which plain doubles cannot afford.
    """
    ld = np.longdouble
    n_l, beta_l = ld(n), ld(beta)
    one_plus_d = ld(1.0) + ld(d_param)
    if abs(float(n_l * one_plus_d)) < 1e-12:
        raise ZeroDivisionError("n (1 + D) vanished; group velocity degenerate")
    uk = ld(1.0) / (n_l * one_plus_d)
    uk_over_k = uk / (n_l * ld(omega))
    xi = ld(e_param) + n_l * n_l * (ld(1.0) + ld(d_param) * (ld(4.0) + ld(d_param)))
    a = uk_over_k - ld(1.0) / ld(epsilon)
    b = ld(1.0) / ld(epsilon) - xi * uk_over_k
    cos_t = np.cos(ld(theta))
    sin_t = np.sin(ld(theta))
    cc = uk * uk + beta_l * beta_l - ld(2.0) * beta_l * uk * cos_t
    dd = (beta_l * uk * sin_t) ** 2
    if float(cc) < 1e-28:
        raise MachConeDegenerate("|u_p - u_k| ~ 0: WKB turning point")
    half_s2 = ld(0.5) * ld(sigma) * ld(sigma)
    inv_t_d = float(half_s2 * (a + b * dd / cc))
    inv_tilde = half_s2 * a
    t_d_tilde = float(ld(1.0) / inv_tilde) if float(a) != 0.0 else math.inf
    inv_tau_sq = float(half_s2 * b * (ld(inv_t_d) + inv_tilde))
    if inv_tau_sq == 0.0:
        tau_d = math.inf
    else:
        tau_sq = 1.0 / inv_tau_sq
        tau_d = math.copysign(math.sqrt(abs(tau_sq)), tau_sq)
    return SpreadTimes(inv_t_d, t_d_tilde, tau_d,
                       dispersive=(d_param != 0.0 or e_param != 0.0))


def singular_angles(beta: float, n: float, omega: float, epsilon: float):
    """Exact poles of the spreading time: the two roots of the quadratic in
    cos(theta) where aC + bD = 0.  Returns (theta_lo, theta_hi, width); the
    poles exist only under the Cherenkov condition beta*n > 1."""
    if beta * n <= 1.0:
        raise NoSingularAngles(f"beta*n = {beta * n} <= 1: spreading time "
                               "finite at all angles")
    r = omega / epsilon
    lead = 1.0 - n * n * r
    disc = lead * lead - (1.0 - r) * (
        1.0 - n * n * r * (1.0 - beta * beta + (n * beta) ** 2))
    if disc < 0.0:
        raise NoSingularAngles("no real singular angles at this frequency")
    base = 1.0 / (beta * n * (1.0 - r))
    cos_lo = min(1.0, base * (lead + math.sqrt(disc)))
    cos_hi = max(-1.0, base * (lead - math.sqrt(disc)))
    theta_lo = math.acos(cos_lo)
    theta_hi = math.acos(cos_hi)
    return theta_lo, theta_hi, theta_hi - theta_lo


def singular_width_approx(beta: float, n: float, omega: float,
                          epsilon: float) -> float:
    """Leading-order angular width between the singular points,
    2 sqrt(omega/eps) sqrt(n^2 - 1)."""
    return 2.0 * math.sqrt(omega / epsilon) * math.sqrt(n * n - 1.0)


def gouy_phase(t_prime, spread: SpreadTimes):
    """g(t') = arctan(t'/t_d) + arctan(t'/t_d~); odd and continuous in t',
    with a negative first partial phase wherever t_d < 0."""
    t = np.asarray(t_prime, dtype=float)
    g = np.arctan(t * spread.inv_t_d) + np.arctan(t / spread.t_d_tilde)
    return float(g) if np.ndim(t_prime) == 0 else g


class PhaseSpaceKernel:
    """Velocity pair, (a, b) coefficients and packet width bundled with the
    complex eta/chi algebra of the master integrand.

    The exponent is linear in the two direction scalars
    A = |R x (u_p - u_k)|^2 and B = (R . [u_p x u_k])^2, so the
    t'-dependent coefficient arrays can be shared across map nodes.
    """

    def __init__(self, u_p: np.ndarray, u_k: np.ndarray, a: float, b: float,
                 sigma: float, delta_eps: float = 0.0, dispersive: bool = False):
        self.u_p = np.asarray(u_p, dtype=float)
        self.u_k = np.asarray(u_k, dtype=float)
        self.a = a
        self.b = b
        self.sigma = sigma
        self.delta_eps = delta_eps
        self.diff = self.u_p - self.u_k
        self.cross = np.cross(self.u_p, self.u_k)
        self.cc = float(self.diff @ self.diff)
        self.dd = float(self.cross @ self.cross)
        if self.cc < 1e-28:
            raise MachConeDegenerate("|u_p - u_k| ~ 0: WKB turning point")
        self.spread = _spread_from_coeffs(a, b, sigma, self.cc, self.dd,
                                          dispersive)

    @classmethod
    def from_geometry(cls, geom: EmissionGeometry, packet: ElectronPacket,
                      medium: MediumModel,
                      dispersive: Optional[bool] = None) -> "PhaseSpaceKernel":
        dispersive, d, e = _resolve_branch(medium, geom.omega, dispersive)
        n = medium.index(geom.omega)[0]
        a, b, uk_mag = dispersion_coefficients(n, geom.omega, geom.epsilon,
                                               d, e)
        u_p, u_k = _velocities(geom, uk_mag)
        delta_eps = geom.epsilon - geom.epsilon_prime - geom.omega
        return cls(u_p, u_k, a, b, packet.sigma, delta_eps, dispersive)

    # complex eta/chi route -------------------------------------------------

    def eta(self, t):
        return 1.0 / (2.0 * self.sigma ** 2) + 0.25j * np.asarray(t) * self.a

    def chi(self, t):
        return 0.25j * np.asarray(t) * self.b

    def eta_chi(self) -> EtaChi:
        return EtaChi(self.eta, self.chi)

    def direction_factors(self, R: np.ndarray):
        """A = |R x (u_p - u_k)|^2 and B = (R . [u_p x u_k])^2."""
        R = np.asarray(R, dtype=float)
        cr = np.cross(R, self.diff)
        return float(cr @ cr), float(R @ self.cross) ** 2

    def exponent_coefficients(self, t):
        """Complex (cA, cB) with exponent(t, R) = cA A + cB B."""
        eta = self.eta(t)
        denom = eta * self.cc + self.chi(t) * self.dd
        return -0.5 / denom, -0.5 * self.chi(t) / (eta * denom)

    def exponent_complex(self, t, R: np.ndarray):
        """-(eta A + chi B) / (2 eta (eta C + chi D)); real part is
        -R^2/R_eff^2, imaginary part +R^2/R_im^2."""
        A, B = self.direction_factors(R)
        cA, cB = self.exponent_coefficients(t)
        return cA * A + cB * B

    def prefactor_complex(self, t):
        """1/sqrt(eta (eta C + chi D)) = exp(-i g/2)/G; both factors lie in
        the right half-plane, so the principal square root is continuous."""
        eta = self.eta(t)
        return 1.0 / np.sqrt(eta * (eta * self.cc + self.chi(t) * self.dd))

    # explicit split (independent evaluation route) -------------------------

    def sigma_perp_sq(self, t):
        t = np.asarray(t, dtype=float)
        return (1.0 + (t * self.spread.inv_t_d) ** 2) / self.sigma ** 2

    def big_g(self, t):
        """G(t') = |u_p - u_k|/(2 sigma^2) [(1 + (t/t_d)^2)(1 + (t/t~)^2)]^(1/4)."""
        t = np.asarray(t, dtype=float)
        x2 = (t * self.spread.inv_t_d) ** 2
        y2 = (t / self.spread.t_d_tilde) ** 2
        return (math.sqrt(self.cc) / (2.0 * self.sigma ** 2)
                * ((1.0 + x2) * (1.0 + y2)) ** 0.25)

    def gouy(self, t):
        return gouy_phase(t, self.spread)

    def exponent_split(self, t, R: np.ndarray):
        """(real, imaginary) parts of the exponent from the explicit
        spreading-time split; dual route to ``exponent_complex``."""
        A, B = self.direction_factors(R)
        t = np.asarray(t, dtype=float)
        inv_td = self.spread.inv_t_d
        tilde = self.spread.t_d_tilde
        sp2 = self.sigma_perp_sq(t)
        a_over = A / self.cc
        b_over = B / self.cc
        y2 = (t / tilde) ** 2
        inv_tau_sq = (0.5 * self.sigma ** 2 * self.b
                      * (inv_td + 0.5 * self.sigma ** 2 * self.a))
        re = -(a_over + t * t * inv_tau_sq / (1.0 + y2) * b_over) / sp2
        im = (t / sp2) * (inv_td * a_over
                          - 0.5 * self.sigma ** 2 * self.b
                          * (1.0 - t * t * inv_td / tilde) / (1.0 + y2)
                          * b_over)
        return re, im

    # flash-statistics geometry ---------------------------------------------

    def sigma_t(self, t) -> float:
        if self.dd < 1e-28:
            raise CollinearVelocities("[u_p x u_k] = 0: flash duration "
                                      "undefined")
        return float(np.sqrt(self.sigma_perp_sq(t) / 2.0 * self.cc / self.dd))

    def l_0(self) -> np.ndarray:
        if self.dd < 1e-28:
            raise CollinearVelocities("[u_p x u_k] = 0")
        return np.cross(self.diff, -self.cross) / self.dd


def correlation_geometry(geom: EmissionGeometry, packet: ElectronPacket,
                         medium: MediumModel, R, t_prime: float,
                         dispersive: Optional[bool] = None) -> CorrelationGeometry:
    """Correlation radius and imaginary-radius curvature along R at t'.

    Both scale factors are per unit |R|^2, so only the direction of R
    matters; R must be non-zero.
    """
    R = np.asarray(R, dtype=float)
    r2 = float(R @ R)
    if r2 == 0.0:
        raise ValueError("R must be non-zero (direction defines the scales)")
    kernel = PhaseSpaceKernel.from_geometry(geom, packet, medium, dispersive)
    if kernel.cc < 1e-28:
        raise MachConeDegenerate("|u_p - u_k| ~ 0")
    exponent = complex(kernel.exponent_complex(float(t_prime), R))
    re_unit = exponent.real / r2
    im_unit = exponent.imag / r2
    r_eff = math.inf if re_unit >= 0.0 else 1.0 / math.sqrt(-re_unit)
    return CorrelationGeometry(
        R=R, u_p=kernel.u_p, u_k=kernel.u_k, R_eff=r_eff,
        R_im_sq_inverse=im_unit,
        sigma_perp_t=float(np.sqrt(kernel.sigma_perp_sq(float(t_prime)))))


def flash_stats(geom: EmissionGeometry, packet: ElectronPacket,
                medium: MediumModel, r, t_prime: float,
                dispersive: Optional[bool] = None,
                diff_spec=None) -> FlashStats:
    """Flash duration sigma_t(t'), the detection-probability peak time
    t_0 = (r + Phi) . l_0 and the quantum shift Delta t = Phi . l_0, where
    Phi combines the amplitude-phase gradient and the packet-phase gradient.
    """
    kernel = PhaseSpaceKernel.from_geometry(geom, packet, medium, dispersive)
    sigma_t = kernel.sigma_t(float(t_prime))
    l0 = kernel.l_0()
    phi_vec = amplitudes.combined_phase_gradient(geom, spec=diff_spec)
    phi_vec = phi_vec + packet.phase_gradient(geom.p.as_array(), diff_spec)
    r = np.asarray(r, dtype=float)
    delta_t = float(l0 @ phi_vec)
    t_0 = float(l0 @ (r + phi_vec))
    return FlashStats(sigma_t=sigma_t, t_0=t_0, delta_t=delta_t, l_0=l0)


def formation_lengths(geom: EmissionGeometry, packet: ElectronPacket,
                      medium: MediumModel,
                      dispersive: Optional[bool] = None) -> FormationLengths:
    """Quantum formation length L_f = beta t_d (signed) and the classical
    one L_cl = (2/(omega n)) / |cos(theta) - 1/(beta n)|."""
    spread = spreading_times(geom, packet, medium, dispersive)
    beta = geom.beta
    l_f = beta * spread.t_d
    n = medium.index(geom.omega)[0]
    cos_theta = (geom.p.dot(geom.k)) / (geom.p.mag * geom.k.mag)
    mismatch = abs(cos_theta - 1.0 / (beta * n))
    l_cl = math.inf if mismatch == 0.0 else 2.0 / (geom.omega * n * mismatch)
    return FormationLengths(l_f=l_f, l_cl=l_cl)


def wkb_flags(geom: EmissionGeometry, packet: ElectronPacket,
              medium: MediumModel,
              dispersive: Optional[bool] = None) -> WkbFlags:
    """Validity guards: the paraxial treatment degrades for emission angles
    below 1/gamma and near the turning point |u_p - u_k| -> 0."""
    flags = WkbFlags.NONE
    theta_k = math.acos(max(-1.0, min(1.0,
        geom.p.dot(geom.k) / (geom.p.mag * geom.k.mag))))
    if theta_k < 1.0 / geom.epsilon:
        flags |= WkbFlags.SMALL_ANGLE
    dispersive, d, e = _resolve_branch(medium, geom.omega, dispersive)
    n = medium.index(geom.omega)[0]
    _, _, uk_mag = dispersion_coefficients(n, geom.omega, geom.epsilon, d, e)
    u_p, u_k = _velocities(geom, uk_mag)
    if float(np.linalg.norm(u_p - u_k)) < 10.0 * packet.sigma:
        flags |= WkbFlags.TURNING_POINT
    return flags
