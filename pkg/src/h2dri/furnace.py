"""Reduction stoichiometry, lumped shaft-furnace heat balance and furnace ledgers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ledger import ComponentReport
from .thermo import (R, GasStream, PropertyTable, Species, default_properties,
                     gas_chemical_energy, gas_physical_energy, gas_physical_exergy,
                     mixture_cp, thermal_exergy_factor)


class FurnaceConfigError(ValueError):
    pass


class InfeasibleBalanceError(ValueError):
    """The circulating gas needed to close the heat balance would be negative."""

    def __init__(self, msg, deficit):
        super().__init__(msg)
        self.deficit = deficit


@dataclass(frozen=True)
class FurnaceParams:
    w_fe: float = 0.92  # total iron mass fraction of the DRI
    eta_fe: float = 0.94  # metallization / conversion per pass
    eta1: float = 0.15  # furnace heat-loss ratio
    eta2: float = 0.03  # dust heat-loss ratio
    dust_fraction: float = 0.02  # dust mass / ore mass
    c_ore: float = 800.0  # J/(kg K)
    c_dri: float = 400.0  # J/(kg K)
    c_dust: float = 800.0  # J/(kg K)
    t_ore: float | None = None  # ore inlet temperature, None -> T0
    water_factor: float = 0.5  # product-gas moles per mole of reduction gas
    # chemical energy credited to each mole of metallic Fe in the DRI (J/mol)
    fe_chemical: float = 1.5e5


@dataclass(frozen=True)
class Stoichiometry:
    m_dri: float
    fe_total: float  # mol
    fe_metal: float  # mol
    feo: float  # mol of residual FeO
    gangue_kg: float
    stoich_gas: float  # mol of reducing gas for complete reduction
    n1: float  # mol of reducing gas actually consumed
    n1_h2: float
    n1_co: float
    water: float  # mol H2O formed
    co2: float  # mol CO2 formed
    fe2o3: float  # mol Fe2O3 in the ore
    ore_kg: float

    @property
    def co_share(self) -> float:
        return self.n1_co / self.n1 if self.n1 else 0.0


def stoichiometry(m_dri: float, w_fe: float, co_share: float = 0.0, eta_fe: float = 1.0,
                  props: PropertyTable | None = None) -> Stoichiometry:
    """Gas demand and ore burden for *m_dri* kg of DRI.

    The overall reaction 1/2 Fe2O3 + 3/2 X -> Fe + 3/2 XO consumes 3/2 mol of
    reducing gas per mol Fe; *eta_fe* scales the consumption to the metallized
    fraction.  Unreduced iron leaves as FeO; the DRI balance is gangue.
    """
    props = props or default_properties()
    if not 0.0 < w_fe <= 1.0:
        raise FurnaceConfigError(f"iron fraction w_fe={w_fe} outside (0, 1]")
    if not 0.0 <= co_share <= 1.0:
        raise FurnaceConfigError(f"CO share {co_share} outside [0, 1]")
    if not 0.0 < eta_fe <= 1.0:
        raise FurnaceConfigError(f"conversion eta_fe={eta_fe} outside (0, 1]")
    if m_dri < 0:
        raise FurnaceConfigError("negative DRI mass")
    m_fe = props[Species.Fe].molar_mass
    fe_total = m_dri * w_fe / m_fe
    fe_metal = eta_fe * fe_total
    feo = fe_total - fe_metal
    gangue = m_dri - fe_metal * m_fe - feo * props[Species.FeO].molar_mass
    if gangue < -1e-9 * max(1.0, m_dri):
        raise FurnaceConfigError(
            f"w_fe={w_fe} with eta_fe={eta_fe} leaves no room for residual FeO")
    gangue = max(gangue, 0.0)
    n1 = 1.5 * fe_metal
    fe2o3 = fe_total / 2.0
    return Stoichiometry(
        m_dri=m_dri, fe_total=fe_total, fe_metal=fe_metal, feo=feo, gangue_kg=gangue,
        stoich_gas=1.5 * fe_total, n1=n1, n1_h2=n1 * (1 - co_share), n1_co=n1 * co_share,
        water=n1 * (1 - co_share), co2=n1 * co_share, fe2o3=fe2o3,
        ore_kg=fe2o3 * props[Species.Fe2O3].molar_mass + gangue)


def gas_composition(co_share: float) -> dict[Species, float]:
    if co_share <= 0:
        return {Species.H2: 1.0}
    if co_share >= 1:
        return {Species.CO: 1.0}
    return {Species.H2: 1.0 - co_share, Species.CO: co_share}


@dataclass
class FurnaceBalance:
    stoich: Stoichiometry
    composition: dict
    n1: float
    n2: float
    t_in: float
    t_out: float
    t_dri: float
    w_gas_in: float
    w_ore_in: float
    w_reaction: float
    w_dri: float
    w_circ: float
    w_loss: float
    w_dust: float
    w_offgas: float
    terms: dict = field(default_factory=dict)

    @property
    def total_in(self) -> float:
        return self.w_gas_in + self.w_ore_in

    @property
    def total_out(self) -> float:
        return math.fsum([self.w_reaction, self.w_dri, self.w_circ, self.w_loss,
                          self.w_dust, self.w_offgas])

    @property
    def residual(self) -> float:
        return (self.total_in - self.total_out) / self.total_in

    @property
    def eta_h2(self) -> float:
        return self.n1 / (self.n1 + self.n2)


def _offgas_heat(st: Stoichiometry, t_out: float, params: FurnaceParams,
                 props: PropertyTable) -> float:
    f = params.water_factor
    dt = t_out - props.t0
    return (props[Species.H2O].cp_ideal * f * st.n1_h2 + props[Species.CO2].cp_ideal * f * st.n1_co) * dt


def _balance_terms(st: Stoichiometry, comp, n2, t_in, t_out, t_dri, params, props):
    t0 = props.t0
    cp = mixture_cp(comp, props)
    t_ore = t0 if params.t_ore is None else params.t_ore
    w_gas = (st.n1 + n2) * cp * (t_in - t0)
    w_ore = st.ore_kg * params.c_ore * (t_ore - t0)
    dh = (props.reduction_enthalpy(Species.H2) * (1 - st.co_share)
          + props.reduction_enthalpy(Species.CO) * st.co_share)
    w_rxn = params.eta_fe * st.fe_total * dh
    w_dri = st.m_dri * params.c_dri * (t_dri - t0)
    w_circ = n2 * cp * (t_out - t0)
    w_dust = params.eta2 * params.dust_fraction * st.ore_kg * params.c_dust * (t_out - t0)
    w_off = _offgas_heat(st, t_out, params, props)
    w_loss = params.eta1 * (w_gas + w_ore)
    return dict(w_gas_in=w_gas, w_ore_in=w_ore, w_reaction=w_rxn, w_dri=w_dri,
                w_circ=w_circ, w_loss=w_loss, w_dust=w_dust, w_offgas=w_off)


def heat_balance_solve(t_in: float, t_out: float, t_dri: float, st: Stoichiometry,
                       params: FurnaceParams = FurnaceParams(),
                       props: PropertyTable | None = None) -> FurnaceBalance:
    """Circulating gas n2 that closes the furnace heat balance.

    The furnace loss is taken as eta1 of the total heat input, which equals
    eta1 of the total output once the balance closes; the balance is then
    linear in n2.
    """
    props = props or default_properties()
    if not 1023.0 - 1e-6 <= t_in <= 1273.15 + 1e-6:
        raise FurnaceConfigError(f"gas inlet {t_in} K outside [1023, 1273.15] K")
    comp = gas_composition(st.co_share)
    base = _balance_terms(st, comp, 0.0, t_in, t_out, t_dri, params, props)
    per_n2_in = mixture_cp(comp, props) * (t_in - props.t0) * (1 - params.eta1)
    per_n2_out = mixture_cp(comp, props) * (t_out - props.t0)
    demand = (base["w_reaction"] + base["w_dri"] + base["w_dust"] + base["w_offgas"]
              - (1 - params.eta1) * (base["w_gas_in"] + base["w_ore_in"]))
    slope = per_n2_in - per_n2_out
    if slope <= 0:
        raise InfeasibleBalanceError(
            f"gas leaving at {t_out:.1f} K carries more heat than it brings at {t_in:.1f} K",
            demand)
    n2 = demand / slope
    if n2 < 0:
        raise InfeasibleBalanceError(
            f"reduction gas alone over-supplies the furnace by {-demand:.4g} J "
            f"(circulating gas would be {n2:.4g} mol)", demand)
    terms = _balance_terms(st, comp, n2, t_in, t_out, t_dri, params, props)
    return FurnaceBalance(st, comp, st.n1, n2, t_in, t_out, t_dri, terms=terms, **terms)


@dataclass(frozen=True)
class FurnaceStreams:
    gas_in: GasStream
    circulating: GasStream  # unreacted gas leaving with the top gas
    water: float
    co2: float


def furnace_streams(bal: FurnaceBalance, params: FurnaceParams) -> FurnaceStreams:
    f = params.water_factor
    gas_in = GasStream(bal.n1 + bal.n2, bal.composition, bal.t_in)
    circ = GasStream(bal.n2, bal.composition, bal.t_out)
    return FurnaceStreams(gas_in, circ, f * bal.stoich.n1_h2, f * bal.stoich.n1_co)


def water_chemical(props: PropertyTable) -> float:
    """Chemical term of H2O built from its formation Gibbs energy and element exergies."""
    return (props[Species.H2O].dg + props[Species.H2].ex + 0.5 * props[Species.O2].ex)


def hematite_chemical(props: PropertyTable) -> float:
    """Chemical term of Fe2O3 from its formation Gibbs energy and element exergies."""
    return (props[Species.Fe2O3].dg + 2 * props[Species.Fe].ex + 1.5 * props[Species.O2].ex)


def _mixing(moles) -> float:
    total = sum(moles)
    return sum(n * math.log(n / total) for n in moles if n > 0) if total > 0 else 0.0


def furnace_ledgers(bal: FurnaceBalance, params: FurnaceParams = FurnaceParams(),
                    props: PropertyTable | None = None) -> ComponentReport:
    """Energy and exergy ledgers of the shaft furnace for a solved balance."""
    props = props or default_properties()
    st, t0 = bal.stoich, props.t0
    t_ore = t0 if params.t_ore is None else params.t_ore
    streams = furnace_streams(bal, params)
    gas_in, circ = streams.gas_in, streams.circulating
    h2o, co2 = streams.water, streams.co2
    n_gangue = st.gangue_kg / props[Species.GANGUE].molar_mass
    n_gangue_ore = (st.ore_kg - st.fe2o3 * props[Species.Fe2O3].molar_mass) / props[Species.GANGUE].molar_mass

    rep = ComponentReport("shaft furnace")
    e, x = rep.energy, rep.exergy

    ore_ch = st.fe2o3 * hematite_chemical(props)
    e.add_in("ore physical", st.ore_kg * params.c_ore * (t_ore - t0))
    e.add_in("ore chemical", ore_ch)
    e.add_in("gas physical", gas_physical_energy(gas_in, props))
    e.add_in("gas chemical", gas_chemical_energy(gas_in, props))

    dri_ch = st.fe_metal * params.fe_chemical
    e.add_out("DRI physical", st.m_dri * params.c_dri * (bal.t_dri - t0))
    e.add_out("DRI chemical", dri_ch)
    e.add_out("circulating gas physical", gas_physical_energy(circ, props))
    e.add_out("circulating gas chemical", gas_chemical_energy(circ, props))
    dt_out = bal.t_out - t0
    e.add_out("water physical", props[Species.H2O].cp_ideal * h2o * dt_out)
    e.add_out("water chemical", h2o * water_chemical(props))
    if co2 > 0:
        e.add_out("CO2 physical", props[Species.CO2].cp_ideal * co2 * dt_out)
        e.add_out("CO2 chemical", co2 * props[Species.CO2].ex)

    x.add_in("ore physical", st.ore_kg * params.c_ore * thermal_exergy_factor(t_ore, t0))
    x.add_in("ore chemical", ore_ch + R * t0 * _mixing([st.fe2o3, n_gangue_ore]))
    x.add_in("gas physical", gas_physical_exergy(gas_in.with_state(P=props.p0), props))
    x.add_in("gas chemical", gas_chemical_energy(gas_in, props))

    x.add_out("DRI physical", st.m_dri * params.c_dri * thermal_exergy_factor(bal.t_dri, t0))
    x.add_out("DRI chemical", dri_ch + R * t0 * _mixing([st.fe_metal, st.feo, n_gangue]))
    x.add_out("circulating gas physical", gas_physical_exergy(circ.with_state(P=props.p0), props))
    x.add_out("circulating gas chemical", gas_chemical_energy(circ, props))
    top_total = circ.n + h2o + co2
    ft = thermal_exergy_factor(bal.t_out, t0)
    x.add_out("water physical", props[Species.H2O].cp_ideal * h2o * ft)
    x.add_out("water chemical",
              h2o * (water_chemical(props) + R * t0 * math.log(h2o / top_total)) if h2o > 0 else 0.0)
    if co2 > 0:
        x.add_out("CO2 physical", props[Species.CO2].cp_ideal * co2 * ft)
        x.add_out("CO2 chemical", co2 * (props[Species.CO2].ex + R * t0 * math.log(co2 / top_total)))
    rep.aux.update(n1=bal.n1, n2=bal.n2, t_in=bal.t_in, t_out=bal.t_out, t_dri=bal.t_dri)
    return rep


def co_reaction_heat(st: Stoichiometry, params: FurnaceParams,
                     props: PropertyTable | None = None) -> float:
    """Heat released (J, positive) by reducing the ore with the CO share of the gas."""
    props = props or default_properties()
    return -params.eta_fe * st.fe_total * st.co_share * props.reduction_enthalpy(Species.CO)
