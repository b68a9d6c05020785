"""Counter-current gas/solid heat transfer in the reduction zone.

The bed is a one-dimensional column with z measured downward from the
top (z = 0) to the gas inlet at the bottom (z = L).  Gas rises, solids
descend.  With C_g and C_s the heat-capacity flows (W/K):

    C_g dT_g/dz = h_p a S (T_g - T_s) + h_w pi D (T_g - T_amb)
    C_s dT_s/dz = h_p a S (T_g - T_s)

where a = 6 (1 - eps) / d_p is the specific pellet surface.  Gas enters at
the bottom (T_g(L) fixed) and ore at the top (T_s(0) fixed), so the
problem is solved by shooting on T_g(0).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .thermo import R, PropertyTable, Species, default_properties, mixture_cp, mixture_molar_mass


class KineticsError(ValueError):
    pass


class ConvergenceError(KineticsError):
    def __init__(self, msg, residual):
        super().__init__(msg)
        self.residual = residual


class StiffProfileError(KineticsError):
    pass


@dataclass(frozen=True)
class BedSpec:
    porosity: float  # -
    d_p: float  # pellet diameter, m
    area: float  # cross-section S, m2
    diameter: float  # inner diameter D, m
    length: float  # zone length L, m
    gas_flow: float  # volumetric flow G, m3/s
    rho: float  # gas density, kg/m3
    mu: float  # gas viscosity, Pa s
    k: float  # gas conductivity, W/(m K)
    c_gas: float  # gas specific heat, J/(kg K)
    solids_flow: float  # W, kg/s
    c_solid: float  # J/(kg K)
    h_w: float  # wall coefficient, W/(m2 K)

    def __post_init__(self):
        if not 0.0 < self.porosity < 1.0:
            raise KineticsError(f"porosity {self.porosity} outside (0, 1)")
        for name in ("d_p", "area", "diameter", "length", "rho", "mu", "k", "c_gas", "c_solid"):
            if getattr(self, name) <= 0:
                raise KineticsError(f"bed parameter {name} must be positive")
        for name in ("gas_flow", "solids_flow", "h_w"):
            if getattr(self, name) < 0:
                raise KineticsError(f"bed parameter {name} must be non-negative")

    @property
    def velocity(self) -> float:
        """Superficial gas velocity u = G/S."""
        return self.gas_flow / self.area

    @property
    def specific_surface(self) -> float:
        return 6.0 * (1.0 - self.porosity) / self.d_p


@dataclass(frozen=True)
class Transport:
    re_p: float
    pr: float
    h_p: float


def transport_numbers(bed: BedSpec) -> Transport:
    re = bed.rho * bed.velocity * bed.d_p / bed.mu
    pr = bed.c_gas * bed.mu / bed.k
    h_p = bed.k / bed.d_p * (2.0 + 0.39 * re ** 0.5 * pr ** 0.33)
    return Transport(re, pr, h_p)


@dataclass
class TemperatureProfile:
    z: list[float]
    t_gas: list[float]
    t_solid: list[float]
    residual: float = 0.0
    iterations: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def t_topgas(self) -> float:
        return self.t_gas[0]

    @property
    def t_dri(self) -> float:
        return self.t_solid[-1]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["z", "T_gas", "T_solid"])
            for row in zip(self.z, self.t_gas, self.t_solid):
                w.writerow([f"{v:.6f}" for v in row])


def _coefficients(bed: BedSpec, h_p: float):
    c_g = bed.gas_flow * bed.rho * bed.c_gas
    c_s = bed.solids_flow * bed.c_solid
    ua = h_p * bed.specific_surface * bed.area  # W/(K m)
    uw = bed.h_w * math.pi * bed.diameter  # W/(K m)
    return c_g, c_s, ua, uw


def rk4_step_matrix(a: np.ndarray, b: np.ndarray, h: float) -> np.ndarray:
    """Homogeneous 3x3 map of one classical RK4 step for y' = a y + b.

    For an autonomous affine system the four RK4 stages collapse to the
    truncated exponential series of the augmented matrix, so applying this
    map is the RK4 step itself, not an approximation of it.
    """
    aug = np.zeros((3, 3))
    aug[:2, :2] = a
    aug[:2, 2] = b
    ha = h * aug
    m = np.eye(3)
    term = np.eye(3)
    for k in range(1, 5):
        term = term @ ha / k
        m = m + term
    return m


def _march(m: np.ndarray, y0, steps: int):
    ys = [y0]
    y = np.array([y0[0], y0[1], 1.0])
    for _ in range(steps):
        y = m @ y
        ys.append((float(y[0]), float(y[1])))
    if not all(math.isfinite(v) for v in ys[-1]):
        raise StiffProfileError("profile diverged; reduce the step size")
    return ys


def _secant(resid, x0, x1, tol, max_iter):
    f0, f1 = resid(x0), resid(x1)
    it = 2
    x, f = (x0, f0) if abs(f0) < abs(f1) else (x1, f1)
    while abs(f) >= tol:
        if it >= max_iter:
            raise ConvergenceError(f"shooting did not converge in {max_iter} iterations", f)
        if f1 == f0:
            raise ConvergenceError("secant update stalled", f)
        x = x1 - f1 * (x1 - x0) / (f1 - f0)
        f = resid(x)
        it += 1
        x0, f0, x1, f1 = x1, f1, x, f
    return x, abs(f), it


def _stiffness_rate(bed: BedSpec, h_p: float) -> float:
    c_g, c_s, ua, uw = _coefficients(bed, h_p)
    return ua * (1.0 / c_g + 1.0 / c_s) + uw / c_g


def stable_steps(bed: BedSpec, steps: int = 400, limit: float = 2.5) -> int:
    """Smallest step count >= *steps* keeping h*lambda within the RK4 limit."""
    rate = _stiffness_rate(bed, transport_numbers(bed).h_p)
    return max(steps, math.ceil(rate * bed.length / limit))


@dataclass
class _Shot:
    top: tuple  # (T_gas, T_solid) at z = 0
    bottom: tuple  # (T_gas, T_solid) at z = L
    residual: float
    iterations: int
    step: np.ndarray  # one-step map in the marching direction
    upward: bool
    meta: dict


def _shoot(bed, t_gas_bottom, t_solid_top, t_ambient, steps, tol, max_iter, h_p) -> _Shot:
    """Single shooting with secant updates.

    The unknown is normally the top gas temperature, marched downward.  When
    the bed has a fast gas-side mode growing downward (gas heat flow much
    smaller than the exchange), that march amplifies round-off beyond the
    boundary tolerance; the shot then runs upward from the gas inlet on the
    unknown DRI temperature instead, along which the fast mode decays.
    """
    if t_gas_bottom <= t_solid_top:
        raise KineticsError("gas must enter hotter than the ore")
    if steps < 1:
        raise KineticsError("need at least one integration step")
    if h_p is None:
        h_p = transport_numbers(bed).h_p
    c_g, c_s, ua, uw = _coefficients(bed, h_p)
    if c_g <= 0 or c_s <= 0:
        raise KineticsError("gas and solids heat-capacity flows must be positive")
    h = bed.length / steps
    # RK4 is stable for h*lambda up to about 2.78 on the real axis
    stiffness = _stiffness_rate(bed, h_p) * h
    if stiffness > 2.5:
        raise StiffProfileError(
            f"step {h:.4g} m too coarse for the exchange length; h*lambda = {stiffness:.3g}")
    a = np.array([[(ua + uw) / c_g, -ua / c_g], [ua / c_s, -ua / c_s]])
    b = np.array([-uw * t_ambient / c_g, 0.0])
    lam = np.linalg.eigvals(a).real
    upward = lam.max() > -lam.min()
    m = rk4_step_matrix(a, b, -h if upward else h)
    m_total = np.linalg.matrix_power(m, steps)
    lo, hi = t_solid_top, t_gas_bottom
    if upward:
        def resid(t_dri):
            return float(m_total[1] @ np.array([t_gas_bottom, t_dri, 1.0])) - t_solid_top
        x, res, it = _secant(resid, lo, hi, tol, max_iter)
        bottom = (t_gas_bottom, x)
        top = (float(m_total[0] @ np.array([t_gas_bottom, x, 1.0])), t_solid_top)
    else:
        def resid(t_top):
            return float(m_total[0] @ np.array([t_top, t_solid_top, 1.0])) - t_gas_bottom
        x, res, it = _secant(resid, lo, hi, tol, max_iter)
        top = (x, t_solid_top)
        bottom = (t_gas_bottom, float(m_total[1] @ np.array([x, t_solid_top, 1.0])))
    meta = dict(c_gas=c_g, c_solid=c_s, ua=ua, uw=uw, h_p=h_p, t_ambient=t_ambient, h=h,
                direction="up" if upward else "down")
    return _Shot(top, bottom, res, it, m, upward, meta)


def profile_endpoints(bed: BedSpec, t_gas_bottom: float, t_solid_top: float,
                      t_ambient: float, steps: int = 400, tol: float = 0.1,
                      max_iter: int = 100, h_p: float | None = None) -> tuple[float, float]:
    """(T_topgas, T_DRI) of the converged profile without materialising the grid."""
    shot = _shoot(bed, t_gas_bottom, t_solid_top, t_ambient, steps, tol, max_iter, h_p)
    return shot.top[0], shot.bottom[1]


def solve_profile(bed: BedSpec, t_gas_bottom: float, t_solid_top: float, t_ambient: float,
                  steps: int = 400, tol: float = 0.1, max_iter: int = 100,
                  h_p: float | None = None) -> TemperatureProfile:
    """Shoot until both boundary temperatures are met within *tol*."""
    shot = _shoot(bed, t_gas_bottom, t_solid_top, t_ambient, steps, tol, max_iter, h_p)
    meta = dict(shot.meta)
    h = meta.pop("h")
    if shot.upward:
        ys = _march(shot.step, shot.bottom, steps)[::-1]
        residual = abs(ys[0][1] - t_solid_top)
    else:
        ys = _march(shot.step, shot.top, steps)
        residual = abs(ys[-1][0] - t_gas_bottom)
    if residual >= tol:
        raise ConvergenceError("marched profile misses the far boundary", residual)
    z = [i * h for i in range(steps + 1)]
    prof = TemperatureProfile(z, [y[0] for y in ys], [y[1] for y in ys], residual,
                              shot.iterations)
    prof.meta.update(meta)
    return prof


def enthalpy_balance(prof: TemperatureProfile) -> tuple[float, float]:
    """(gas enthalpy loss, solid gain + wall loss), both in W.

    The wall term is integrated with the composite Simpson rule (trapezoid
    when the grid has an odd number of intervals).
    """
    m = prof.meta
    gas = m["c_gas"] * (prof.t_gas[-1] - prof.t_gas[0])
    solid = m["c_solid"] * (prof.t_solid[-1] - prof.t_solid[0])
    f = [m["uw"] * (tg - m["t_ambient"]) for tg in prof.t_gas]
    n = len(f) - 1
    h = prof.z[1] - prof.z[0] if n else 0.0
    if n % 2 == 0 and n > 0:
        wall = h / 3.0 * (f[0] + f[-1] + 4 * sum(f[1:-1:2]) + 2 * sum(f[2:-1:2]))
    else:
        wall = h * (sum(f) - 0.5 * (f[0] + f[-1]))
    return gas, solid + wall


# -- reducing-gas transport properties --------------------------------------

# power-law fits mu = a (T/298)^b, k = c (T/298)^d
_TRANSPORT_FITS = {
    Species.H2: (8.9e-6, 0.68, 0.182, 0.78),
    Species.CO: (1.76e-5, 0.70, 0.025, 0.80),
}


def gas_viscosity(T: float, composition=None) -> float:
    """Mole-weighted viscosity of an H2/CO gas, Pa s."""
    comp = composition or {Species.H2: 1.0}
    return sum(x * _TRANSPORT_FITS[Species(sp)][0] * (T / 298.0) ** _TRANSPORT_FITS[Species(sp)][1]
               for sp, x in comp.items())


def gas_conductivity(T: float, composition=None) -> float:
    """Mole-weighted thermal conductivity of an H2/CO gas, W/(m K)."""
    comp = composition or {Species.H2: 1.0}
    return sum(x * _TRANSPORT_FITS[Species(sp)][2] * (T / 298.0) ** _TRANSPORT_FITS[Species(sp)][3]
               for sp, x in comp.items())


@dataclass(frozen=True)
class BedGeometry:
    porosity: float = 0.5
    d_p: float = 0.012
    diameter: float = 2.5
    length: float = 8.0
    h_w: float = 600.0
    production: float = 100.0  # t DRI per hour
    pressure: float = 8e5  # Pa


def build_bed(geom: BedGeometry, gas_moles: float, composition, solids_kg: float,
              c_solid: float, m_dri: float, t_gas: float, t_solid: float,
              props: PropertyTable | None = None) -> BedSpec:
    """BedSpec for a batch scaled to the plant production rate.

    Gas properties are evaluated at the film temperature, the mean of the
    two inlet temperatures.
    """
    props = props or default_properties()
    scale = geom.production * 1000.0 / 3600.0 / m_dri  # batches per second
    t_film = 0.5 * (t_gas + t_solid)
    mw = mixture_molar_mass(composition, props)
    rho = geom.pressure * mw / (R * t_film)
    mdot = gas_moles * scale * mw
    area = math.pi * geom.diameter ** 2 / 4.0
    return BedSpec(
        porosity=geom.porosity, d_p=geom.d_p, area=area, diameter=geom.diameter,
        length=geom.length, gas_flow=mdot / rho, rho=rho,
        mu=gas_viscosity(t_film, composition), k=gas_conductivity(t_film, composition),
        c_gas=mixture_cp(composition, props) / mw,
        solids_flow=solids_kg * scale, c_solid=c_solid, h_w=geom.h_w)
