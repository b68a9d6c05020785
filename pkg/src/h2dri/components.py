"""Energy/exergy models of the process units around the shaft furnace.

Every unit returns a :class:`~h2dri.ledger.ComponentReport` whose energy
ledger obeys first-law bookkeeping (inputs - outputs = the unit's loss) and
whose exergy ledger never creates exergy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .ledger import ComponentReport
from .thermo import (FARADAY, P0, R, GasStream, PropertyTable, Species,
                     default_properties, gas_chemical_energy,
                     gas_chemical_exergy, mixture_cp_ideal,
                     mixture_gamma, thermal_exergy_factor)

H2_OUTLET_T = 371.15  # K, alkaline stacks deliver hydrogen at 98 C
THERMONEUTRAL_V = 1.481  # V
MAX_STAGE_RATIO = 5.0
CO2_MOLAR_MASS = 0.0440095


class ConfigurationError(ValueError):
    pass


class InvalidStageError(ValueError):
    pass


class ConstraintViolation(ValueError):
    pass


class InfeasibleExchangeError(ValueError):
    pass


class StoreDepletedError(ValueError):
    pass


class InfeasibleCycleError(ValueError):
    pass


@dataclass(frozen=True)
class StageSpec:
    """One compression or expansion stage.

    ``ratio`` is P_out/P_in for compression and P_in/P_out for expansion.
    """

    ratio: float
    efficiency: float

    def __post_init__(self):
        if not 0.0 < self.efficiency <= 1.0:
            raise InvalidStageError(f"isentropic efficiency {self.efficiency} outside (0, 1]")
        if self.ratio < 1.0:
            raise InvalidStageError(f"stage ratio {self.ratio} below 1")


# -- electrolyzer -----------------------------------------------------------

def electrolyzer(n_cells: int, v_cell: float, current: float, dt: float,
                 props: PropertyTable | None = None, t_out: float = H2_OUTLET_T,
                 p_out: float = P0, v_thermoneutral: float = THERMONEUTRAL_V):
    """Alkaline electrolyzer stack operated for *dt* seconds.

    Returns ``(report, hydrogen)`` where hydrogen leaves hot at *t_out*.
    """
    props = props or default_properties()
    if min(n_cells, v_cell, current, dt) <= 0:
        raise ConfigurationError("electrolyzer inputs must be positive")
    if v_cell < v_thermoneutral:
        raise ConfigurationError(
            f"cell voltage {v_cell} V below thermoneutral {v_thermoneutral} V")
    h2 = props[Species.H2]
    w_in = n_cells * v_cell * current * dt
    n_h2 = current * dt * n_cells / (2.0 * FARADAY)
    sensible = n_h2 * h2.cp * (t_out - props.t0)

    rep = ComponentReport("electrolyzer")
    rep.energy.add_in("electricity", w_in)
    rep.energy.add_out("hydrogen chemical", h2.lhv * n_h2)
    rep.energy.add_out("hydrogen sensible", sensible)
    rep.exergy.add_in("electricity", w_in)
    rep.exergy.add_out("hydrogen chemical", h2.lhv * n_h2)
    rep.exergy.add_out("hydrogen thermal", n_h2 * h2.cp * thermal_exergy_factor(t_out, props.t0))
    rep.aux.update(n_h2=n_h2, t_out=t_out, v_cell=v_cell)
    return rep, GasStream.pure(Species.H2, n_h2, t_out, p_out)


def electrolyzer_for_hydrogen(n_h2: float, v_cell: float, props: PropertyTable | None = None,
                              n_cells: int = 100, dt: float = 3600.0, **kw):
    """Electrolyzer whose current is sized to deliver *n_h2* moles in *dt*."""
    current = n_h2 * 2.0 * FARADAY / (n_cells * dt)
    return electrolyzer(n_cells, v_cell, current, dt, props, **kw)


# -- compressor and expander trains ----------------------------------------

@dataclass
class TrainResult:
    report: ComponentReport
    outlet: GasStream
    stage_heat: list[float] = field(default_factory=list)

    @property
    def work(self) -> float:
        return self.report.energy.total_in


def compressor_train(inlet: GasStream, stages: list[StageSpec],
                     props: PropertyTable | None = None) -> TrainResult:
    """Multistage compression with intercooling back to the inlet temperature.

    Each stage's compression heat is returned in ``stage_heat`` so it can be
    credited to a thermal store.
    """
    props = props or default_properties()
    if not stages:
        raise InvalidStageError("compressor train needs at least one stage")
    for st in stages:
        if st.ratio <= 1.0:
            raise InvalidStageError(f"compression ratio {st.ratio} must exceed 1")
        if st.ratio > MAX_STAGE_RATIO:
            raise ConstraintViolation(
                f"stage ratio {st.ratio} exceeds the per-stage limit {MAX_STAGE_RATIO}")
    cp = mixture_cp_ideal(inlet.composition, props)
    k = (mixture_gamma(inlet.composition, props) - 1.0) / mixture_gamma(inlet.composition, props)
    n, t0 = inlet.n, props.t0

    rep = ComponentReport("compressor")
    works, t_outs, heats = [], [], []
    p = inlet.P
    ex_out = 0.0
    for st in stages:
        t_in = inlet.T
        lift = (st.ratio ** k - 1.0) / st.efficiency
        t_out = t_in * (1.0 + lift)
        w = cp * n * t_in * lift
        ex_out += n * cp * (t_out - t_in) - t0 * (n * cp * math.log(t_out / t_in)
                                                   - n * R * math.log(st.ratio))
        works.append(w)
        t_outs.append(t_out)
        heats.append(n * cp * (t_out - t_in))
        p *= st.ratio
    w_total = math.fsum(works)
    rep.energy.add_in("electricity", w_total)
    rep.energy.add_out("compression work", w_total)
    rep.exergy.add_in("electricity", w_total)
    rep.exergy.add_out("hydrogen exergy gain", ex_out)
    rep.aux.update(stage_work=works, stage_t_out=t_outs, p_out=p)
    return TrainResult(rep, inlet.with_state(P=p), heats)


def expander_train(inlet: GasStream, stages: list[StageSpec],
                   props: PropertyTable | None = None, p_min: float = 1e5) -> TrainResult:
    """Multistage expansion without reheat; the cold outlet feeds the ORC condenser."""
    props = props or default_properties()
    p_final = inlet.P
    for st in stages:
        p_final /= st.ratio
    if p_final < p_min * (1 - 1e-12):
        raise ConfigurationError(f"expansion to {p_final:.4g} Pa falls below {p_min:.4g} Pa")
    gamma = mixture_gamma(inlet.composition, props)
    cp = mixture_cp_ideal(inlet.composition, props)
    n, t0 = inlet.n, props.t0

    rep = ComponentReport("expander")
    works, t_outs, ex_in = [], [], 0.0
    t = inlet.T
    for st in stages:
        drop = (1.0 - st.ratio ** ((1.0 - gamma) / gamma)) * st.efficiency
        w = cp * n * t * drop
        t_out = t * (1.0 - drop)
        ex_in += n * cp * (t - t_out) - t0 * (n * cp * math.log(t / t_out)
                                              - n * R * math.log(st.ratio))
        works.append(w)
        t_outs.append(t_out)
        t = t_out
    w_total = math.fsum(works)
    rep.energy.add_in("hydrogen pressure energy", w_total)
    rep.energy.add_out("electricity", w_total)
    rep.exergy.add_in("hydrogen pressure exergy", ex_in)
    rep.exergy.add_out("electricity", w_total)
    rep.aux.update(stage_work=works, stage_t_out=t_outs, p_out=p_final)
    return TrainResult(rep, inlet.with_state(T=t, P=p_final))


# -- thermal storage --------------------------------------------------------

def thermal_store_charge(hot: GasStream, t_gas_out: float, c_f: float, m_f: float,
                         t_f_in: float, recovery: float = 0.85,
                         props: PropertyTable | None = None) -> ComponentReport:
    """Cool a gas stream from hot.T to *t_gas_out* into a storage fluid."""
    props = props or default_properties()
    if hot.T < t_f_in:
        raise InfeasibleExchangeError(
            f"gas inlet {hot.T:.2f} K is colder than the fluid inlet {t_f_in:.2f} K")
    rep = ComponentReport("thermal store charge")
    if hot.T == t_gas_out or hot.n == 0:
        rep.aux.update(t_f_out=t_f_in, m_f=m_f)
        return rep
    cp = mixture_cp_ideal(hot.composition, props)
    w_in = cp * hot.n * (hot.T - t_gas_out)
    w_out = recovery * w_in
    t_f_out = t_f_in + w_out / (m_f * c_f)
    if t_f_out > hot.T + 1e-9 or t_f_in > t_gas_out + 1e-9:
        raise InfeasibleExchangeError(
            f"temperature crossover: fluid {t_f_in:.2f}->{t_f_out:.2f} K against "
            f"gas {hot.T:.2f}->{t_gas_out:.2f} K")
    t0 = props.t0
    rep.energy.add_in("gas sensible heat", w_in)
    rep.energy.add_out("stored heat", w_out)
    rep.exergy.add_in("gas thermal exergy",
                      w_in - cp * hot.n * t0 * math.log(hot.T / t_gas_out))
    rep.exergy.add_out("stored exergy",
                       m_f * c_f * (t_f_out - t_f_in) - m_f * t0 * c_f * math.log(t_f_out / t_f_in))
    rep.aux.update(t_f_out=t_f_out, m_f=m_f)
    return rep


def thermal_store_discharge(cold: GasStream, t_target: float, c_f: float,
                            t_f_in: float, t_f_out: float,
                            props: PropertyTable | None = None) -> ComponentReport:
    """Heat a gas stream to *t_target* with stored fluid cooling t_f_in -> t_f_out."""
    props = props or default_properties()
    rep = ComponentReport("thermal store discharge")
    if cold.n == 0 or t_target <= cold.T:
        rep.aux.update(m_f=0.0)
        return rep
    if t_target > t_f_in + 1e-9 or cold.T > t_f_out + 1e-9:
        raise InfeasibleExchangeError(
            f"temperature crossover: fluid {t_f_in:.2f}->{t_f_out:.2f} K against "
            f"gas {cold.T:.2f}->{t_target:.2f} K")
    cp = mixture_cp_ideal(cold.composition, props)
    duty = cp * cold.n * (t_target - cold.T)
    m_f = duty / (c_f * (t_f_in - t_f_out))
    t0 = props.t0
    rep.energy.add_in("stored heat", duty)
    rep.energy.add_out("gas sensible heat", duty)
    rep.exergy.add_in("stored exergy",
                      m_f * c_f * (t_f_in - t_f_out) - m_f * t0 * c_f * math.log(t_f_in / t_f_out))
    rep.exergy.add_out("gas thermal exergy",
                       duty - cp * cold.n * t0 * math.log(t_target / cold.T))
    rep.aux.update(m_f=m_f)
    return rep


@dataclass
class ThermalStore:
    """Sensible-heat store whose fluid cycles between t_cold and t_hot.

    Holds the per-batch heat inventory; charging credits ``recovery`` of
    the gas-side duty, discharging and drawing are lossless.
    """

    name: str
    c_f: float
    t_hot: float
    t_cold: float
    recovery: float = 0.85
    inventory: float = 0.0
    charged: float = 0.0
    props: PropertyTable | None = None

    def __post_init__(self):
        if self.t_hot <= self.t_cold:
            raise ConfigurationError(f"{self.name}: t_hot must exceed t_cold")

    def _fluid_exergy(self, q: float) -> float:
        t0 = (self.props or default_properties()).t0
        m = q / (self.c_f * (self.t_hot - self.t_cold))
        return q - m * self.c_f * t0 * math.log(self.t_hot / self.t_cold)

    def charge(self, hot: GasStream, t_gas_out: float) -> ComponentReport:
        props = self.props or default_properties()
        if hot.n == 0 or hot.T <= t_gas_out:
            return ComponentReport(f"{self.name} charge")
        q = self.recovery * mixture_cp_ideal(hot.composition, props) * hot.n * (hot.T - t_gas_out)
        m_f = q / (self.c_f * (self.t_hot - self.t_cold))
        rep = thermal_store_charge(hot, t_gas_out, self.c_f, m_f, self.t_cold,
                                   self.recovery, props)
        rep.component = f"{self.name} charge"
        self.inventory += rep.energy.total_out
        self.charged += rep.energy.total_out
        return rep

    def charge_heat(self, q: float, label: str = "heat") -> ComponentReport:
        """Charge a heat duty already delivered at or above t_hot (e.g. intercoolers)."""
        rep = ComponentReport(f"{self.name} charge")
        if q <= 0:
            return rep
        stored = self.recovery * q
        rep.energy.add_in(label, q)
        rep.energy.add_out("stored heat", stored)
        rep.exergy.add_in(label, q)
        rep.exergy.add_out("stored exergy", self._fluid_exergy(stored))
        self.inventory += stored
        self.charged += stored
        return rep

    def _withdraw(self, q: float) -> None:
        tol = 1e-9 * max(1.0, self.charged)
        if q > self.inventory + tol:
            raise StoreDepletedError(
                f"{self.name}: requested {q:.6g} J but only {self.inventory:.6g} J stored")
        self.inventory = max(0.0, self.inventory - q)

    def draw(self, q: float) -> float:
        """Withdraw heat *q* (J) as hot fluid; returns the fluid exergy released."""
        if q <= 0:
            return 0.0
        self._withdraw(q)
        return self._fluid_exergy(q)

    def discharge(self, cold: GasStream, t_target: float) -> ComponentReport:
        props = self.props or default_properties()
        rep = thermal_store_discharge(cold, t_target, self.c_f, self.t_hot, self.t_cold, props)
        rep.component = f"{self.name} discharge"
        self._withdraw(rep.energy.total_in)
        return rep


# -- organic Rankine cycle --------------------------------------------------

@dataclass(frozen=True)
class OrcState:
    """Corner temperatures of the sensible-heat ORC (3 = 4, pump neglected)."""

    m_r32: float
    c_r32: float
    t1: float  # evaporator outlet / expander inlet
    t2: float  # expander outlet
    t4: float  # condensate / evaporator inlet

    def __post_init__(self):
        if not self.t1 > self.t2 > self.t4:
            raise ConfigurationError(
                f"ORC state points need T1 > T2 > T4, got {self.t1}, {self.t2}, {self.t4}")

    @property
    def efficiency(self) -> float:
        return (self.t1 - self.t2) / (self.t1 - self.t4)


@dataclass
class OrcResult:
    report: ComponentReport
    state: OrcState
    electricity: float
    condenser_heat: float


def orc_cycle(heat_sources: dict, sink: GasStream, t1: float, t2: float, t4: float,
              c_r32: float = 1800.0, t_sink_return: float | None = None,
              props: PropertyTable | None = None) -> OrcResult:
    """Run the ORC on the given evaporator duties.

    *heat_sources* maps source label ("store", "ambient") to duty in J.  The
    condenser rejects heat into *sink*, which may warm at most to
    *t_sink_return* (default T0).
    """
    props = props or default_properties()
    t_ret = props.t0 if t_sink_return is None else t_sink_return
    q_eva = math.fsum(heat_sources.values())
    if any(q < 0 for q in heat_sources.values()):
        raise ConfigurationError("negative ORC heat source")
    if q_eva > 0 and sink.T >= t4:
        raise InfeasibleCycleError(
            f"condenser sink at {sink.T:.2f} K is not colder than condensing point {t4:.2f} K")
    m = q_eva / (c_r32 * (t1 - t4))
    state = OrcState(m, c_r32, t1, t2, t4)
    w = m * c_r32 * (t1 - t2)
    q_cond = m * c_r32 * (t2 - t4)
    capacity = sink.n * mixture_cp_ideal(sink.composition, props) * (t_ret - sink.T)
    if q_cond > capacity * (1 + 1e-9) + 1e-9:
        raise InfeasibleCycleError(
            f"condenser duty {q_cond:.6g} J exceeds sink capacity {capacity:.6g} J")

    rep = ComponentReport("orc")
    for label, q in heat_sources.items():
        rep.energy.add_in(f"{label} heat", q)
    rep.energy.add_out("electricity", w)
    ex_exp_out = m * c_r32 * (t1 - t2) - m * c_r32 * t2 * math.log(t1 / t2)
    rep.exergy.add_in("evaporator heat", q_eva)
    rep.exergy.add_out("expander exergy", ex_exp_out)
    rep.aux.update(
        evaporator={"in": q_eva, "out": m * c_r32 * (t1 - t4),
                    "ex_out": m * c_r32 * (t1 - t4) - m * c_r32 * t4 * math.log(t1 / t4)},
        expander={"in": w, "out": w, "ex_in": w, "ex_out": ex_exp_out},
        condenser_heat=q_cond,
        sink_t_out=sink.T + (q_cond / (capacity / (t_ret - sink.T)) if capacity > 0 else 0.0),
    )
    return OrcResult(rep, state, w, q_cond)


def size_orc_to_sink(sink: GasStream, store_available: float, t1: float, t2: float,
                     t4: float, c_r32: float = 1800.0, store_fraction: float = 1.0,
                     t_sink_return: float | None = None,
                     props: PropertyTable | None = None) -> OrcResult:
    """ORC sized so its condenser warms *sink* back to *t_sink_return*.

    The store supplies up to ``store_fraction`` of its available heat and the
    ambient air supplies the rest of the evaporator duty.
    """
    props = props or default_properties()
    t_ret = props.t0 if t_sink_return is None else t_sink_return
    q_cond = sink.n * mixture_cp_ideal(sink.composition, props) * max(0.0, t_ret - sink.T)
    q_eva = q_cond * (t1 - t4) / (t2 - t4)
    from_store = min(q_eva, store_fraction * max(0.0, store_available))
    return orc_cycle({"store": from_store, "ambient": q_eva - from_store}, sink,
                     t1, t2, t4, c_r32, t_ret, props)


# -- heaters ----------------------------------------------------------------

PLASMA_RANGE = (1023.15 - 50.0, 1273.15 + 50.0)


def plasma_heat(inlet: GasStream, t_target: float, eta: float = 0.95, re1: float = 0.05,
                props: PropertyTable | None = None, t_range=PLASMA_RANGE):
    """Electric plasma heating of *inlet* to *t_target*; returns (report, outlet)."""
    props = props or default_properties()
    rep = ComponentReport("plasma")
    if t_target <= inlet.T or inlet.n == 0:
        return rep, inlet
    if not t_range[0] <= t_target <= t_range[1]:
        raise ConfigurationError(f"plasma target {t_target} K outside {t_range}")
    cp = mixture_cp_ideal(inlet.composition, props)
    duty = inlet.n * cp * (t_target - inlet.T)
    w_in = duty / eta
    w_out = w_in * eta
    rep.energy.add_in("electricity", w_in)
    rep.energy.add_out("gas sensible heat", w_out)
    rep.exergy.add_in("electricity", (1.0 - re1) * w_out)
    rep.exergy.add_out("gas thermal exergy",
                       inlet.n * cp * ((t_target - inlet.T)
                                       - props.t0 * math.log(t_target / inlet.T)))
    rep.aux.update(duty=duty)
    return rep, inlet.with_state(T=t_target)


def carbon_moles(moles: dict) -> float:
    """Carbon atoms (mol) in a species->moles map; each becomes one CO2 when burned."""
    carbon = {Species.CO: 1, Species.CO2: 1, Species.CH4: 1}
    return sum(carbon.get(Species(sp), 0) * n for sp, n in moles.items())


def combustion_co2_kg(moles: dict) -> float:
    return carbon_moles(moles) * CO2_MOLAR_MASS


@dataclass
class CombustionResult:
    report: ComponentReport
    outlet: GasStream
    fuel_moles: float
    co2_kg: float
    co_heat: float  # heat released by the fuel's CO fraction, J


def combustion_furnace(gas: GasStream, t_target: float, eta: float = 0.85,
                       fuel: str = "coke-oven-gas",
                       props: PropertyTable | None = None) -> CombustionResult:
    """Indirect fired heater burning *fuel* to bring *gas* to *t_target*."""
    props = props or default_properties()
    comp = props.mixture(fuel)
    rep = ComponentReport("combustion furnace")
    if t_target <= gas.T or gas.n == 0:
        return CombustionResult(rep, gas, 0.0, 0.0, 0.0)
    cp = mixture_cp_ideal(gas.composition, props)
    duty = gas.n * cp * (t_target - gas.T)
    fuel_stream = GasStream(1.0, comp, props.t0)
    lhv = gas_chemical_energy(fuel_stream, props)
    n_fuel = duty / (lhv * eta)
    fuel_stream = fuel_stream.with_state(n=n_fuel)
    co2 = combustion_co2_kg({sp: n_fuel * x for sp, x in comp.items()})
    rep.energy.add_in("fuel chemical", n_fuel * lhv)
    rep.energy.add_out("gas sensible heat", duty)
    rep.exergy.add_in("fuel chemical", gas_chemical_exergy(fuel_stream, props))
    rep.exergy.add_out("gas thermal exergy",
                       duty - gas.n * cp * props.t0 * math.log(t_target / gas.T))
    co_heat = n_fuel * comp.get(Species.CO, 0.0) * props[Species.CO].lhv
    rep.aux.update(duty=duty, fuel_lhv=lhv, co2_kg=co2, co_heat=co_heat)
    return CombustionResult(rep, gas.with_state(T=t_target), n_fuel, co2, co_heat)

