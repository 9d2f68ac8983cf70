"""Refractive-index models with frequency derivatives and the dimensionless
dispersion-strength parameters.

Three model variants: constant n, analytic n(omega) with its derivatives,
and tabulated samples interpolated by a natural cubic spline (C^2, so the
second derivative feeding the dispersive spreading time is continuous).
Frequencies are in m_e units throughout; the table loader converts from eV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "MediumModel",
    "ConstantMedium",
    "AnalyticMedium",
    "TabulatedMedium",
    "DispersionParams",
    "OutOfDomain",
    "DegenerateGroupVelocity",
    "TableFormatError",
    "index",
    "dispersion_params",
    "group_velocity",
    "omega_hessian_factor",
    "weak_dispersion_check",
    "load_index_table",
    "EV_PER_ME",
]

EV_PER_ME = 510998.95  # electron rest energy in eV

WEAK_DISPERSION_THRESHOLD = 0.01


class OutOfDomain(ValueError):
    """Frequency outside the model's valid domain."""


class DegenerateGroupVelocity(ZeroDivisionError):
    """n(omega)(1 + D) vanished; group velocity undefined."""


class TableFormatError(ValueError):
    """Malformed refractive-index table."""


@dataclass(frozen=True)
class DispersionParams:
    """Dimensionless dispersion strengths D = omega n'/n and
    E = n omega^2 n'' at a given frequency."""

    d_param: float
    e_param: float
    omega: float


class MediumModel:
    """Base class; subclasses implement index(omega) -> (n, n', n'')."""

    def index(self, omega: float) -> Tuple[float, float, float]:
        raise NotImplementedError

    def domain(self) -> Tuple[float, float]:
        """Valid frequency range (open-ended by default)."""
        return (0.0, math.inf)

    def dispersion_params(self, omega: float) -> DispersionParams:
        n, n1, n2 = self.index(omega)
        return DispersionParams(omega * n1 / n, n * omega * omega * n2, omega)

    def hessian_factor(self, omega: float) -> float:
        """xi = n w^2 n'' + (n' w)^2 + n^2 + 4 n n' w, the anisotropy factor
        of the photon frequency Hessian."""
        n, n1, n2 = self.index(omega)
        return n * omega ** 2 * n2 + (n1 * omega) ** 2 + n ** 2 + 4 * n * n1 * omega

    def group_velocity(self, k_direction: np.ndarray, omega: float) -> np.ndarray:
        """u_k = k_hat / (n (1 + D)); reduces to k_hat/n without dispersion."""
        n, n1, _ = self.index(omega)
        denom = n * (1.0 + omega * n1 / n)
        if abs(denom) < 1e-12:
            raise DegenerateGroupVelocity(f"n(1 + D) = {denom} at omega={omega}")
        k_hat = np.asarray(k_direction, dtype=float)
        return k_hat / denom

    def weak_dispersion_check(
            self, omega: float,
            threshold: float = WEAK_DISPERSION_THRESHOLD) -> Tuple[float, bool]:
        """Returns (|D|, flag) with flag true iff |D| < threshold (strict)."""
        d = abs(self.dispersion_params(omega).d_param)
        return d, d < threshold


class ConstantMedium(MediumModel):
    """Dispersionless medium with fixed refractive index."""

    def __init__(self, n: float):
        if n <= 0:
            raise ValueError("refractive index must be positive")
        self.n = float(n)

    def index(self, omega: float) -> Tuple[float, float, float]:
        return (self.n, 0.0, 0.0)

    def __repr__(self):
        return f"ConstantMedium(n={self.n})"


class AnalyticMedium(MediumModel):
    """Medium defined by callables n(omega), n'(omega), n''(omega)."""

    def __init__(self, n: Callable, n_prime: Callable, n_double_prime: Callable,
                 domain: Tuple[float, float] = (0.0, math.inf)):
        self._n = n
        self._n1 = n_prime
        self._n2 = n_double_prime
        self._domain = domain

    @classmethod
    def from_dispersion_params(cls, n0: float, omega0: float, d_param: float,
                               e_param: float = 0.0) -> "AnalyticMedium":
        """Local quadratic model matching (n, D, E) at omega0."""
        n1 = d_param * n0 / omega0
        n2 = e_param / (n0 * omega0 ** 2)
        return cls(lambda w: n0 + n1 * (w - omega0) + 0.5 * n2 * (w - omega0) ** 2,
                   lambda w: n1 + n2 * (w - omega0),
                   lambda w: n2)

    def domain(self):
        return self._domain

    def index(self, omega: float) -> Tuple[float, float, float]:
        lo, hi = self._domain
        if not (lo <= omega <= hi):
            raise OutOfDomain(f"omega={omega} outside [{lo}, {hi}]")
        n = float(self._n(omega))
        if n <= 0:
            raise OutOfDomain(f"n({omega}) = {n} <= 0")
        return n, float(self._n1(omega)), float(self._n2(omega))


class TabulatedMedium(MediumModel):
    """Natural cubic spline through sampled (omega_i, n_i) pairs.

    Samples must be strictly increasing in omega, with at least 4 points.
    """

    def __init__(self, omegas, ns):
        omegas = np.asarray(omegas, dtype=float)
        ns = np.asarray(ns, dtype=float)
        if omegas.ndim != 1 or omegas.shape != ns.shape:
            raise TableFormatError("omega and n arrays must be 1-D, same length")
        if len(omegas) < 4:
            raise TableFormatError("need at least 4 samples")
        if np.any(np.diff(omegas) <= 0):
            raise TableFormatError("omega samples must be strictly increasing")
        if np.any(ns <= 0):
            raise TableFormatError("refractive index must be positive")
        self.omegas = omegas
        self.ns = ns
        self._spline = CubicSpline(omegas, ns, bc_type="natural")
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)

    def domain(self):
        return (float(self.omegas[0]), float(self.omegas[-1]))

    def index(self, omega: float) -> Tuple[float, float, float]:
        lo, hi = self.domain()
        if not (lo <= omega <= hi):
            raise OutOfDomain(f"omega={omega} outside table range [{lo}, {hi}]")
        n = float(self._spline(omega))
        if n <= 0:
            raise OutOfDomain(f"interpolated n({omega}) = {n} <= 0")
        return n, float(self._d1(omega)), float(self._d2(omega))


def load_index_table(path) -> TabulatedMedium:
    """Load a refractive-index table: UTF-8 text, '#' comment lines, data
    rows "omega_eV,n".  Frequencies are converted to m_e units."""
    path = Path(path)
    omegas = []
    ns = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise TableFormatError(
                    f"{path}:{lineno}: expected 'omega_eV,n', got {raw!r}")
            try:
                w_ev = float(parts[0])
                n = float(parts[1])
            except ValueError as exc:
                raise TableFormatError(f"{path}:{lineno}: {exc}") from None
            omegas.append(w_ev / EV_PER_ME)
            ns.append(n)
    if len(omegas) < 4:
        raise TableFormatError(f"{path}: need at least 4 data rows")
    diffs = np.diff(omegas)
    if np.any(diffs <= 0):
        bad = int(np.argmax(diffs <= 0)) + 2
        raise TableFormatError(f"{path}: data row {bad}: omega not increasing")
    return TabulatedMedium(omegas, ns)


# free-function mirrors of the model methods

def index(model: MediumModel, omega: float) -> Tuple[float, float, float]:
    return model.index(omega)


def dispersion_params(model: MediumModel, omega: float) -> DispersionParams:
    return model.dispersion_params(omega)


def group_velocity(model: MediumModel, k_direction, omega: float) -> np.ndarray:
    return model.group_velocity(k_direction, omega)


def omega_hessian_factor(model: MediumModel, omega: float) -> float:
    return model.hessian_factor(omega)


def weak_dispersion_check(model: MediumModel, omega: float,
                          threshold: float = WEAK_DISPERSION_THRESHOLD):
    return model.weak_dispersion_check(omega, threshold)
