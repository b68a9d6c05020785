"""Scenario assembly: closes the circulation loop and aggregates the ledgers."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

from . import components as cmp
from .furnace import (FurnaceBalance, FurnaceParams, Stoichiometry, co_reaction_heat,
                      furnace_ledgers, gas_composition, heat_balance_solve, stoichiometry)
from .furnace import InfeasibleBalanceError
from .kinetics import (BedGeometry, TemperatureProfile, build_bed, profile_endpoints,
                       solve_profile, stable_steps)
from .ledger import ComponentReport
from .metrics import Aggregates, CarbonBlock, EfficiencyReport, efficiency_report
from .thermo import FARADAY, GasStream, PropertyTable, Species, default_properties

KINDS = ("zero-carbon", "traditional-64", "traditional-82", "zero-carbon-grid")
CO_SHARE = {"zero-carbon": 0.0, "zero-carbon-grid": 0.0,
            "traditional-64": 0.4, "traditional-82": 0.2}
T_MIN, T_MAX = 1023.15, 1273.15
J_PER_MWH = 3.6e9


class ScenarioError(RuntimeError):
    def __init__(self, msg, trajectory=()):
        super().__init__(msg)
        self.trajectory = list(trajectory)


@dataclass(frozen=True)
class PlantParams:
    storage_pressure: float = 20e6
    furnace_pressure: float = 8e5
    reduction_ratios: tuple = (2.56, 2.56, 2.56)
    reduction_efficiencies: tuple = (0.915, 0.915, 0.915)
    circle_ratios: tuple = (3.4, 3.4, 3.4)
    circle_efficiencies: tuple = (0.918, 0.918, 0.918)
    expander_ratios: tuple = (2.85, 2.85, 3.0)
    expander_efficiencies: tuple = (0.9, 0.9, 0.9)
    v_cell: float = 2.25
    n_cells: int = 100
    electrolysis_time: float = 3600.0
    t_electrolyzer: float = cmp.H2_OUTLET_T
    eta_pla: float = 0.95
    re1: float = 0.05
    recovery: float = 0.85
    c_store: float = 4186.0  # storage fluid, J/(kg K)
    lt_store_hot: float = 363.15
    ht_store_hot: float = 573.15
    ht_pinch: float = 10.0
    orc_t1: float = 393.0
    orc_t2: float = 262.0
    orc_t4: float = 243.0
    c_r32: float = 1800.0
    orc_store_fraction: float = 1.0
    eta_comb: float = 0.85
    fuel: str = "coke-oven-gas"
    scale_electrolyzer: bool = True  # weight electrolysis by the reduction share

    def stages(self, which: str) -> list[cmp.StageSpec]:
        ratios = getattr(self, f"{which}_ratios")
        effs = getattr(self, f"{which}_efficiencies")
        if len(ratios) != len(effs):
            raise cmp.ConfigurationError(f"{which}: ratio and efficiency lists differ in length")
        return [cmp.StageSpec(r, e) for r, e in zip(ratios, effs)]


@dataclass(frozen=True)
class SolverParams:
    damping: float = 0.5
    rtol: float = 1e-6
    max_iter: int = 200
    kinetics_steps: int = 400
    n2_guess: float | None = None  # mol; None starts from the fixed-temperature balance


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str = "zero-carbon"
    batch_kg: float = 1000.0
    t_in: float = 1273.15
    co_share: float | None = None  # None -> scenario default
    furnace: FurnaceParams = FurnaceParams()
    plant: PlantParams = PlantParams()
    bed: BedGeometry = BedGeometry()
    carbon: CarbonBlock = CarbonBlock()
    grid_factor: float = 0.57  # t CO2 / MWh
    solver: SolverParams = SolverParams()
    waste_heat: bool = True
    penalty: bool = True
    props: PropertyTable | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise cmp.ConfigurationError(f"unknown scenario {self.kind!r}; expected one of {KINDS}")
        if not T_MIN - 1e-6 <= self.t_in <= T_MAX + 1e-6:
            raise cmp.ConfigurationError(
                f"reduction-gas temperature {self.t_in} K outside [{T_MIN}, {T_MAX}] K")
        if self.batch_kg <= 0:
            raise cmp.ConfigurationError("DRI batch must be positive")

    @property
    def share(self) -> float:
        return CO_SHARE[self.kind] if self.co_share is None else self.co_share

    @property
    def traditional(self) -> bool:
        return self.kind.startswith("traditional")

    def with_(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class SystemReport:
    config: ScenarioConfig
    stoich: Stoichiometry
    balance: FurnaceBalance
    profile: TemperatureProfile
    components: dict[str, ComponentReport]
    aggregates: Aggregates
    terms: dict[str, list]
    efficiency: EfficiencyReport
    co2_t: float
    co_heat: float
    declared_losses: dict[str, float]
    trajectory: list[float] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def n1(self) -> float:
        return self.balance.n1

    @property
    def n2(self) -> float:
        return self.balance.n2

    @property
    def t_topgas(self) -> float:
        return self.balance.t_out

    @property
    def t_dri(self) -> float:
        return self.balance.t_dri

    @property
    def total_gas(self) -> float:
        return self.n1 + self.n2

    @property
    def closure_residual(self) -> float:
        """Relative gap of sum(inputs) - sum(outputs) - sum(declared losses)."""
        w_in = math.fsum(r.energy.total_in for r in self.components.values())
        w_out = math.fsum(r.energy.total_out for r in self.components.values())
        return (w_in - w_out - math.fsum(self.declared_losses.values())) / w_in


# -- circulation fixed point ------------------------------------------------

def _bed(cfg, st, comp, n_total, props):
    fp = cfg.furnace
    t_ore = props.t0 if fp.t_ore is None else fp.t_ore
    bed = build_bed(cfg.bed, n_total, comp, st.ore_kg, fp.c_ore, cfg.batch_kg,
                    cfg.t_in, t_ore, props)
    return bed, t_ore


def _profile(cfg, st, comp, n_total, props):
    bed, t_ore = _bed(cfg, st, comp, n_total, props)
    return solve_profile(bed, cfg.t_in, t_ore, props.t0, steps=cfg.solver.kinetics_steps)


def circulation_map(cfg: ScenarioConfig, st: Stoichiometry, n2: float,
                    props: PropertyTable | None = None) -> FurnaceBalance:
    """One pass of the loop: bed temperatures for n1 + n2, then the balance."""
    props = props or cfg.props or default_properties()
    bed, t_ore = _bed(cfg, st, gas_composition(st.co_share), st.n1 + n2, props)
    # trial flows far below the fixed point can be stiffer than the final profile
    t_top, t_dri = profile_endpoints(bed, cfg.t_in, t_ore, props.t0,
                                     steps=stable_steps(bed, cfg.solver.kinetics_steps))
    return heat_balance_solve(cfg.t_in, t_top, t_dri, st, cfg.furnace, props)


def close_circulation(cfg: ScenarioConfig, st: Stoichiometry, props: PropertyTable):
    """Damped fixed point on n2 coupling the bed profile and the heat balance.

    A trial flow whose top gas leaves too hot for the balance to close is
    halved; this only happens on the way in from an oversized guess.
    """
    comp = gas_composition(st.co_share)
    sv = cfg.solver
    n2 = sv.n2_guess
    if n2 is None:
        # full cooling of the top gas: a lower bound below the stable root
        t_ore = props.t0 if cfg.furnace.t_ore is None else cfg.furnace.t_ore
        n2 = heat_balance_solve(cfg.t_in, t_ore, cfg.t_in, st, cfg.furnace, props).n2
    if n2 <= 0:
        raise ScenarioError("initial circulating flow must be positive", [n2])
    traj = [n2]
    resid = math.inf
    for _ in range(sv.max_iter):
        try:
            target = circulation_map(cfg, st, n2, props).n2
        except InfeasibleBalanceError:
            n2 *= 0.5
            traj.append(n2)
            continue
        resid = abs(target - n2) / max(target, 1e-300)
        if resid < sv.rtol:
            prof = _profile(cfg, st, comp, st.n1 + target, props)
            bal = heat_balance_solve(cfg.t_in, prof.t_topgas, prof.t_dri, st, cfg.furnace, props)
            traj.append(bal.n2)
            return bal, prof, traj
        n2 = (1.0 - sv.damping) * n2 + sv.damping * target
        traj.append(n2)
    raise ScenarioError(
        f"circulation did not converge in {sv.max_iter} iterations "
        f"(last relative change {resid:.3g})", traj)


# -- train evaluation -------------------------------------------------------

def _discharge_report(store: cmp.ThermalStore) -> ComponentReport:
    """Deliver the whole inventory of *store* to an external heat user."""
    q = store.inventory
    rep = ComponentReport(f"{store.name} discharge")
    ex = store.draw(q)
    rep.energy.add_in("stored heat", q)
    rep.energy.add_out("delivered heat", q)
    rep.exergy.add_in("stored exergy", ex)
    rep.exergy.add_out("delivered exergy", ex)
    return rep


def _top_gas(bal: FurnaceBalance, fp: FurnaceParams) -> GasStream:
    moles = {sp: bal.n2 * x for sp, x in bal.composition.items()}
    moles[Species.H2O] = fp.water_factor * bal.stoich.n1_h2
    moles[Species.CO2] = fp.water_factor * bal.stoich.n1_co
    total = sum(moles.values())
    comp = {sp: n / total for sp, n in moles.items() if n > 0}
    # renormalise against rounding so the stream invariant holds exactly
    s = math.fsum(comp.values())
    comp = {sp: x / s for sp, x in comp.items()}
    return GasStream(total, comp, bal.t_out)


def _electrolyzer_loss(rep: ComponentReport, props: PropertyTable) -> float:
    n, v, t = rep.aux["n_h2"], rep.aux["v_cell"], rep.aux["t_out"]
    h2 = props[Species.H2]
    return n * (2.0 * FARADAY * v - h2.lhv - h2.cp * (t - props.t0))


def solve_scenario(cfg: ScenarioConfig) -> SystemReport:
    props = cfg.props or default_properties()
    pl, fp = cfg.plant, cfg.furnace
    t0 = props.t0
    for sp, sign in ((Species.H2, 1), (Species.CO, -1)):
        if sign * props.reduction_enthalpy(sp) <= 0:
            raise cmp.ConfigurationError(
                f"reduction enthalpy for {sp.value} has the wrong sign "
                "(H2 route must be endothermic, CO route exothermic)")
    st = stoichiometry(cfg.batch_kg, fp.w_fe, cfg.share, fp.eta_fe, props)
    bal, prof, traj = close_circulation(cfg, st, props)
    comp = bal.composition
    n1, n2 = bal.n1, bal.n2
    reps: dict[str, ComponentReport] = {}
    losses: dict[str, float] = {}

    def add(key, rep, loss):
        rep.component = key
        reps[key] = rep
        losses[key] = loss

    # the store fluid cannot be charged hotter than the top gas minus the pinch
    ht_hot = min(pl.ht_store_hot, bal.t_out - pl.ht_pinch)
    ht = cmp.ThermalStore("high-temperature store", pl.c_store, max(ht_hot, t0 + 1.0), t0,
                          pl.recovery, props=props)
    circ = cmp.compressor_train(
        GasStream(n2, comp, t0, pl.storage_pressure / math.prod(pl.circle_ratios)),
        pl.stages("circle"), props)
    add("circle compressor", circ.report, 0.0)
    extras = {}
    co_heat = 0.0

    if not cfg.traditional:
        lt = cmp.ThermalStore("low-temperature store", pl.c_store, pl.lt_store_hot, t0,
                              pl.recovery, props=props)
        p_el = pl.storage_pressure / math.prod(pl.reduction_ratios)
        el, h2 = cmp.electrolyzer_for_hydrogen(n1, pl.v_cell, props, pl.n_cells,
                                               pl.electrolysis_time, t_out=pl.t_electrolyzer,
                                               p_out=p_el)
        add("electrolyzer", el, _electrolyzer_loss(el, props))
        hx = lt.charge(h2, t0)
        add("electrolyzer heat recovery", hx, (1 - pl.recovery) * hx.energy.total_in)
        red = cmp.compressor_train(h2.with_state(T=t0), pl.stages("reduction"), props)
        add("reduction compressor", red.report, 0.0)
        for key, tr in (("reduction intercooling", red), ("circle intercooling", circ)):
            q = math.fsum(tr.stage_heat)
            rep = lt.charge_heat(q, "compression heat")
            add(key, rep, (1 - pl.recovery) * q)
        stored = GasStream(n1 + n2, comp, t0, pl.storage_pressure)
        exp = cmp.expander_train(stored, pl.stages("expander"), props)
        add("expander", exp.report, 0.0)
        orc = cmp.size_orc_to_sink(exp.outlet, lt.inventory, pl.orc_t1, pl.orc_t2, pl.orc_t4,
                                   pl.c_r32, pl.orc_store_fraction, t0, props)
        store_duty = orc.report.energy.get("store heat")
        lt.draw(store_duty)
        add("orc", orc.report, orc.condenser_heat)
        losses["low-temperature store residue"] = lt.inventory
        pla, hot = cmp.plasma_heat(exp.outlet.with_state(T=t0), cfg.t_in, pl.eta_pla, pl.re1, props)
        add("plasma", pla, (1 - pl.eta_pla) * pla.energy.total_in)
        extras.update(expander=exp.work, orc=orc.electricity, orc_state=orc.state,
                      condenser_heat=orc.condenser_heat, lt_charged=lt.charged)
    else:
        gas = GasStream(n1 + n2, comp, t0, pl.furnace_pressure)
        comb = cmp.combustion_furnace(gas, cfg.t_in, pl.eta_comb, pl.fuel, props)
        add("combustion furnace", comb.report,
            comb.report.aux.get("duty", 0.0) * (1 / pl.eta_comb - 1))
        co_heat = co_reaction_heat(st, fp, props) + comb.co_heat
        extras.update(fuel_moles=comb.fuel_moles, fuel_co2_kg=comb.co2_kg,
                      co_reaction_heat=co_reaction_heat(st, fp, props),
                      co_combustion_heat=comb.co_heat)

    fur = furnace_ledgers(bal, fp, props)
    add("shaft furnace", fur, fur.energy_loss)
    top = _top_gas(bal, fp)
    if ht_hot > t0:
        hx_top = ht.charge(top, t0)
    else:  # top gas too close to ambient to charge the store
        hx_top = ComponentReport("high-temperature store charge")
    add("top-gas heat recovery", hx_top, (1 - pl.recovery) * hx_top.energy.total_in)
    add("high-temperature store discharge", _discharge_report(ht), 0.0)
    extras.update(topgas_heat=hx_top.energy.total_in, topgas_recovered=ht.charged)

    agg, terms = aggregate_system_ledgers(reps, n1, n2, cfg)
    # emissions
    if cfg.traditional:
        co2_t = (st.n1_co * props[Species.CO2].molar_mass + extras["fuel_co2_kg"]) / 1000.0
    elif cfg.kind == "zero-carbon-grid":
        electricity = math.fsum(v for k, _, v in terms["electricity"])
        co2_t = electricity / J_PER_MWH * cfg.grid_factor
    else:
        co2_t = 0.0
    block = dataclasses.replace(cfg.carbon, c_dri=co2_t)
    eff = efficiency_report(agg, block, n1, n2, cfg.penalty)
    return SystemReport(cfg, st, bal, prof, reps, agg, terms, eff, co2_t, co_heat,
                        losses, traj, extras)


def aggregate_system_ledgers(reps: dict[str, ComponentReport], n1: float, n2: float,
                             cfg: ScenarioConfig) -> tuple[Aggregates, dict[str, list]]:
    """System inputs/outputs, each term traced to one component ledger entry.

    Returns the aggregates and a map from aggregate name to the list of
    (component, label, value) terms that compose it.
    """
    share = n1 / (n1 + n2)
    fur = reps["shaft furnace"]
    terms: dict[str, list] = {k: [] for k in
                              ("w_in", "w_out", "ex_in", "ex_out", "w_vin", "w_vout", "electricity")}

    def term(agg, comp, label, value, scale=1.0):
        terms[agg].append((comp, label, value * scale))

    def both(comp, label, energy_scale=1.0, vscale=1.0, side="in"):
        rep = reps[comp]
        e = rep.energy.get(label)
        term(f"w_{side}", comp, label, e, energy_scale)
        term(f"w_v{side}", comp, label, e, vscale)

    if not cfg.traditional:
        el = reps["electrolyzer"]
        w_el = el.energy.get("electricity")
        # the physical stack makes only n1; the virtual index charges the whole inventory
        virt = 1.0 / share if cfg.plant.scale_electrolyzer else 1.0
        term("w_in", "electrolyzer", "electricity", w_el)
        term("w_vin", "electrolyzer", "electricity", w_el, virt)
        term("ex_in", "electrolyzer", "electricity", el.exergy.get("electricity"))
        term("electricity", "electrolyzer", "electricity", w_el)
        for comp in ("reduction compressor", "circle compressor", "plasma"):
            both(comp, "electricity")
            term("ex_in", comp, "electricity", reps[comp].exergy.get("electricity"))
            term("electricity", comp, "electricity", reps[comp].energy.get("electricity"))
        if cfg.waste_heat:
            for comp, label, xlabel in (("expander", "electricity", "electricity"),
                                        ("orc", "electricity", "expander exergy"),
                                        ("high-temperature store discharge", "delivered heat",
                                         "delivered exergy")):
                both(comp, label, side="out")
                term("ex_out", comp, xlabel, reps[comp].exergy.get(xlabel))
    else:
        gas_ch = fur.energy.get("gas chemical")
        circ_ch = fur.energy.get("circulating gas chemical")
        term("w_in", "shaft furnace", "gas chemical", gas_ch - circ_ch)
        term("w_vin", "shaft furnace", "gas chemical", gas_ch)
        term("ex_in", "shaft furnace", "gas chemical",
             fur.exergy.get("gas chemical") - fur.exergy.get("circulating gas chemical"))
        comb = reps["combustion furnace"]
        both("combustion furnace", "fuel chemical")
        term("ex_in", "combustion furnace", "fuel chemical", comb.exergy.get("fuel chemical"))
        both("circle compressor", "electricity")
        term("ex_in", "circle compressor", "electricity",
             reps["circle compressor"].exergy.get("electricity"))
        term("electricity", "circle compressor", "electricity",
             reps["circle compressor"].energy.get("electricity"))
        if cfg.waste_heat:
            comp = "high-temperature store discharge"
            both(comp, "delivered heat", side="out")
            term("ex_out", comp, "delivered exergy", reps[comp].exergy.get("delivered exergy"))

    for label in ("ore physical", "ore chemical"):
        both("shaft furnace", label)
        term("ex_in", "shaft furnace", label, fur.exergy.get(label))
    for label in ("DRI physical", "DRI chemical", "water chemical", "CO2 chemical"):
        if fur.energy.get(label) == 0 and label.startswith("CO2"):
            continue
        both("shaft furnace", label, side="out")
        term("ex_out", "shaft furnace", label, fur.exergy.get(label))
    term("w_vout", "shaft furnace", "circulating gas chemical",
         fur.energy.get("circulating gas chemical"))

    sums = {k: math.fsum(v for _, _, v in lst) for k, lst in terms.items()}
    agg = Aggregates(sums["w_in"], sums["w_out"], sums["ex_in"], sums["ex_out"],
                     sums["w_vin"], sums["w_vout"])
    return agg, terms
