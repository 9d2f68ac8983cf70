import math
from pathlib import Path

import pytest

from cherenkov_wigner.kinematics import (ElectronPacket, Momentum3,
                                         momentum_magnitude,
                                         triangle_geometry,
                                         triangle_rules_hold)
from cherenkov_wigner.medium import ConstantMedium
from cherenkov_wigner.wignerfield import EmissionScenario

DATA_DIR = Path(__file__).resolve().parents[1] / "data"
ICE_TABLE = DATA_DIR / "ice_refractive_index.csv"


def balance_scenario(beta=0.99, n=1.4, omega=1e-5, sigma=1e-5,
                     theta_frac=1.0, t_out=1e6, phi_k=0.5 * math.pi,
                     lambda_gamma=None):
    """Momentum-balance scenario with theta_k at a multiple of the classical
    Cherenkov angle; the packet mean momentum defines the z axis."""
    theta_ch = math.acos(1.0 / (beta * n))
    mean = Momentum3(0.0, 0.0, momentum_magnitude(beta))
    packet = ElectronPacket(mean, sigma)
    return EmissionScenario(packet=packet, medium=ConstantMedium(n),
                            omega=omega, theta_k=theta_frac * theta_ch,
                            phi_k=phi_k, t_out=t_out,
                            lambda_gamma=lambda_gamma)


def triangle_from_beta(beta, n, omega, p_perp, theta_k, pp_ratio=0.99,
                       phi_k=0.5 * math.pi, branch=1, lambda_gamma=1,
                       sigma=None):
    """Transverse-triangle geometry with the initial electron speed fixed:
    p_z from |p| = beta*gamma, p' = p - k exactly.  Returns (geom, packet)
    or None when the triangle cannot close."""
    kmag = n * omega
    k_perp = kmag * math.sin(theta_k)
    pp_perp = pp_ratio * p_perp
    if not triangle_rules_hold(p_perp, pp_perp, k_perp):
        return None
    p_mag = momentum_magnitude(beta)
    if p_mag <= p_perp:
        return None
    pp_z = math.sqrt(p_mag ** 2 - p_perp ** 2) - kmag * math.cos(theta_k)
    geom = triangle_geometry(p_perp, pp_perp, pp_z, omega, n, theta_k, phi_k,
                             branch, lambda_gamma=lambda_gamma)
    packet = ElectronPacket(geom.p, sigma if sigma is not None else p_perp)
    return geom, packet


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240817)
