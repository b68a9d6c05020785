"""Efficiency indices and the carbon-cost penalty."""
from __future__ import annotations

from dataclasses import dataclass

J_PER_KWH = 3.6e6


class UndefinedEfficiencyError(ZeroDivisionError):
    pass


class CarbonConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CarbonBlock:
    c_dri: float = 0.0  # actual emissions, t CO2
    c_base: float = 1.6  # allowance, t CO2
    p_co2: float = 120.0  # CNY/t
    m_cp: float = 0.5  # production energy price, CNY per q_c
    q_c: float = J_PER_KWH  # energy quantity priced by m_cp, J
    theta: float = 1.2
    nu: float = 1.5

    def __post_init__(self):
        for name in ("c_dri", "c_base", "p_co2", "m_cp", "q_c"):
            if getattr(self, name) < 0:
                raise CarbonConfigError(f"{name} must be non-negative")
        if self.theta < 1.0 or self.nu < self.theta:
            raise CarbonConfigError(f"penalties need 1 <= theta <= nu, got {self.theta}, {self.nu}")
        if self.q_c == 0 or self.m_cp == 0:
            raise CarbonConfigError("energy price must be positive")

    @property
    def m_energy(self) -> float:
        """Energy price, CNY/J."""
        return self.m_cp / self.q_c


@dataclass(frozen=True)
class CarbonEquivalent:
    phi_ce: float  # J
    ce: float
    cet: float  # J


def penalty_ratio(x: float, theta: float = 1.2, nu: float = 1.5) -> float:
    """Allowance-normalised emissions with the stepped penalty multipliers."""
    if x <= 1.0:
        return x
    if x <= 1.2:
        return x * theta
    return x * nu


def carbon_equivalent(block: CarbonBlock, penalty: bool = True) -> CarbonEquivalent:
    if block.c_base == 0:
        if block.c_dri > 0:
            raise CarbonConfigError("zero allowance with non-zero emissions")
        return CarbonEquivalent(0.0, 0.0, 0.0)
    phi = block.c_base * block.p_co2 / block.m_energy
    x = block.c_dri / block.c_base
    ce = penalty_ratio(x, block.theta, block.nu) if penalty else x
    return CarbonEquivalent(phi, ce, phi * ce)


def _ratio(num: float, den: float, what: str) -> float:
    if den == 0:
        raise UndefinedEfficiencyError(f"{what}: zero input")
    return num / den


def hydrogen_utilization(n1: float, n2: float) -> float:
    return _ratio(n1, n1 + n2, "hydrogen utilization")


@dataclass(frozen=True)
class Aggregates:
    w_in: float
    w_out: float
    ex_in: float
    ex_out: float
    w_vin: float
    w_vout: float


def energy_efficiency(agg: Aggregates) -> tuple[float, float]:
    """(virtual efficiency, actual efficiency EE)."""
    return _ratio(agg.w_vout, agg.w_vin, "virtual efficiency"), _ratio(agg.w_out, agg.w_in, "EE")


def exergy_efficiency(agg: Aggregates) -> float:
    return _ratio(agg.ex_out, agg.ex_in, "EXE")


def energy_carbon_efficiency(agg: Aggregates, block: CarbonBlock, penalty: bool = True) -> float:
    cet = carbon_equivalent(block, penalty).cet
    return _ratio(agg.w_out - cet, agg.w_in, "EC")


@dataclass(frozen=True)
class EfficiencyReport:
    eta_ven: float
    ee: float
    exe: float
    ec: float
    eta_h2: float
    ce: float
    cet: float


def efficiency_report(agg: Aggregates, block: CarbonBlock, n1: float, n2: float,
                      penalty: bool = True) -> EfficiencyReport:
    ven, ee = energy_efficiency(agg)
    eq = carbon_equivalent(block, penalty)
    return EfficiencyReport(ven, ee, exergy_efficiency(agg),
                            _ratio(agg.w_out - eq.cet, agg.w_in, "EC"),
                            hydrogen_utilization(n1, n2), eq.ce, eq.cet)
