import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h2dri import components as cmp
from h2dri.components import StageSpec
from h2dri.thermo import P0, T0, GasStream, Species, default_properties, gas_chemical_energy

H2 = Species.H2
CP_H2 = 1.41 / 0.41 * 8.314


def h2(n=1.0, T=T0, P=P0):
    return GasStream.pure(H2, n, T, P)


class TestElectrolyzer:
    def test_electric_input(self, props):
        rep, _ = cmp.electrolyzer(100, 2.0, 1000.0, 3600.0, props)
        assert rep.energy.total_in == pytest.approx(7.2e8, rel=1e-12)

    @pytest.mark.parametrize("v", [1.5, 1.9, 2.25, 3.0])
    def test_exergy_input_equals_electricity(self, props, v):
        rep, _ = cmp.electrolyzer(10, v, 250.0, 60.0, props)
        assert rep.exergy.total_in == rep.energy.total_in

    def test_dissipation(self, props):
        rep, gas = cmp.electrolyzer(100, 2.0, 1000.0, 3600.0, props)
        assert rep.energy.total_out < rep.energy.total_in
        assert gas.n == pytest.approx(100 * 1000.0 * 3600.0 / (2 * 96485.33212))

    def test_below_thermoneutral_rejected(self, props):
        with pytest.raises(cmp.ConfigurationError):
            cmp.electrolyzer(100, 1.4, 1000.0, 3600.0, props)

    def test_sized_for_hydrogen(self, props):
        rep, gas = cmp.electrolyzer_for_hydrogen(1234.5, 2.0, props)
        assert gas.n == pytest.approx(1234.5, rel=1e-12)


class TestCompressor:
    def test_outlet_temperature(self, props):
        tr = cmp.compressor_train(h2(), [StageSpec(2.56, 0.915)], props)
        assert tr.report.aux["stage_t_out"][0] == pytest.approx(400.4, abs=0.05)

    def test_unit_ratio_rejected(self, props):
        with pytest.raises(cmp.InvalidStageError):
            cmp.compressor_train(h2(), [StageSpec(1.0, 0.9)], props)

    def test_stage_limit(self, props):
        with pytest.raises(cmp.ConstraintViolation):
            cmp.compressor_train(h2(), [StageSpec(5.5, 0.9)], props)

    def test_bad_efficiency(self):
        with pytest.raises(cmp.InvalidStageError):
            StageSpec(2.0, 1.2)

    def test_table_trains_reach_storage_pressure(self, props):
        red = cmp.compressor_train(h2(P=20e6 / 2.56 ** 3), [StageSpec(2.56, 0.915)] * 3, props)
        circ = cmp.compressor_train(h2(P=20e6 / 3.4 ** 3), [StageSpec(3.4, 0.918)] * 3, props)
        assert red.outlet.P == pytest.approx(20e6)
        assert circ.outlet.P == pytest.approx(20e6)
        assert 2.56 ** 3 == pytest.approx(16.8, abs=0.05)
        assert 3.4 ** 3 == pytest.approx(39.3, abs=0.05)

    def test_outlet_temperature_monotone(self, props):
        def t_out(r, eta):
            return cmp.compressor_train(h2(), [StageSpec(r, eta)], props).report.aux["stage_t_out"][0]
        ratios = [1.5, 2.0, 3.0, 4.0, 5.0]
        assert all(t_out(a, 0.9) < t_out(b, 0.9) for a, b in zip(ratios, ratios[1:]))
        etas = [0.6, 0.7, 0.8, 0.9, 1.0]
        assert all(t_out(3.0, a) > t_out(3.0, b) for a, b in zip(etas, etas[1:]))

    def test_energy_closure_exact(self, props):
        tr = cmp.compressor_train(h2(10.0), [StageSpec(3.4, 0.918)] * 3, props)
        assert tr.report.energy_loss == 0.0

    @pytest.mark.parametrize("n_stages,r", [(2, 2.2), (3, 1.7)])
    def test_intercooling_saves_work(self, props, n_stages, r):
        multi = cmp.compressor_train(h2(), [StageSpec(r, 0.9)] * n_stages, props).work
        single = cmp.compressor_train(h2(), [StageSpec(r ** n_stages, 0.9)], props).work
        assert multi <= single

    def test_stage_heat_equals_work(self, props):
        # intercooling back to the inlet temperature rejects the whole stage work
        tr = cmp.compressor_train(h2(3.0), [StageSpec(2.56, 0.915)] * 3, props)
        assert math.fsum(tr.stage_heat) == pytest.approx(tr.work, rel=1e-12)


class TestExpander:
    def test_single_stage_work(self, props):
        tr = cmp.expander_train(h2(P=2.85e5), [StageSpec(2.85, 0.9)], props)
        expected = CP_H2 * 298 * (1 - 2.85 ** (-0.41 / 1.41)) * 0.9
        assert tr.work == pytest.approx(expected, rel=1e-12)
        assert tr.work == pytest.approx(2.01e3, rel=5e-3)

    def test_unit_ratio_is_idle(self, props):
        tr = cmp.expander_train(h2(P=2e5), [StageSpec(1.0, 0.9)], props)
        assert tr.work == 0.0
        assert tr.outlet.T == T0

    def test_exergy_out_is_work(self, props):
        tr = cmp.expander_train(h2(5.0, P=20e6), [StageSpec(2.85, 0.9), StageSpec(2.85, 0.9),
                                                  StageSpec(3.0, 0.9)], props)
        assert tr.report.exergy.total_out == tr.work
        assert tr.report.energy_loss == 0.0

    def test_below_one_bar_rejected(self, props):
        with pytest.raises(cmp.ConfigurationError):
            cmp.expander_train(h2(P=P0), [StageSpec(2.0, 0.9)], props)

    def test_work_grows_with_ratio(self, props):
        works = [cmp.expander_train(h2(P=20e6), [StageSpec(r, 0.9)], props).work
                 for r in (1.5, 2.0, 3.0, 4.0)]
        assert works == sorted(works) and len(set(works)) == 4


class TestThermalStore:
    def test_charge_duty(self, props):
        rep = cmp.thermal_store_charge(h2(10.0, 398.0), 308.0, 4186.0, 1.0, T0, props=props)
        assert rep.energy.total_in == pytest.approx(CP_H2 * 10 * 90, rel=1e-12)
        assert rep.energy.total_in == pytest.approx(2.573e4, rel=1e-3)
        assert rep.exergy.total_out < rep.energy.total_out

    def test_equal_temperatures_transfer_nothing(self, props):
        rep = cmp.thermal_store_charge(h2(10.0, 350.0), 350.0, 4186.0, 1.0, T0, props=props)
        assert rep.energy.total_in == 0.0 and not rep.energy

    def test_crossover_rejected(self, props):
        with pytest.raises(cmp.InfeasibleExchangeError):
            cmp.thermal_store_charge(h2(10.0, 398.0), 308.0, 4186.0, 1e-4, T0, props=props)

    def test_discharge_duty(self, props):
        duty = 100 * 4186.0 * 50.0
        cold = h2(duty / (CP_H2 * 50.0), 300.0)
        rep = cmp.thermal_store_discharge(cold, 350.0, 4186.0, 363.0, 313.0, props)
        assert rep.energy.total_in == pytest.approx(2.093e7, rel=1e-3)
        assert rep.aux["m_f"] == pytest.approx(100.0, rel=1e-12)

    def test_zero_duty_discharge(self, props):
        rep = cmp.thermal_store_discharge(h2(5.0, 320.0), 320.0, 4186.0, 363.0, 313.0, props)
        assert not rep.energy and not rep.exergy

    def test_store_round_trip(self, props):
        store = cmp.ThermalStore("s", 4186.0, 363.15, T0, props=props)
        rep = store.charge(h2(50.0, 400.0), T0)
        assert rep.energy.total_out == pytest.approx(0.85 * rep.energy.total_in)
        store.draw(0.85 * rep.energy.total_in)
        assert store.inventory == pytest.approx(0.0, abs=1e-9)

    def test_overdraw(self, props):
        store = cmp.ThermalStore("s", 4186.0, 363.15, T0, props=props)
        store.charge_heat(100.0)
        with pytest.raises(cmp.StoreDepletedError):
            store.draw(1000.0)


class TestOrc:
    def test_zero_heat(self, props):
        res = cmp.orc_cycle({"store": 0.0}, h2(10.0, 200.0), 393.0, 262.0, 243.0, props=props)
        assert res.electricity == 0.0

    @pytest.mark.parametrize("t1,t2,t4", [(393.0, 262.0, 243.0), (400.0, 350.0, 250.0)])
    def test_efficiency_identity(self, props, t1, t2, t4):
        res = cmp.orc_cycle({"store": 3e5, "ambient": 1e5}, h2(1e4, 150.0), t1, t2, t4,
                            props=props)
        assert res.electricity / 4e5 == pytest.approx((t1 - t2) / (t1 - t4), rel=1e-12)
        assert res.report.energy_loss == pytest.approx(res.condenser_heat, rel=1e-12)

    def test_warm_sink_rejected(self, props):
        with pytest.raises(cmp.InfeasibleCycleError):
            cmp.orc_cycle({"store": 1e5}, h2(10.0, 250.0), 393.0, 262.0, 243.0, props=props)

    def test_state_ordering(self):
        with pytest.raises(cmp.ConfigurationError):
            cmp.OrcState(1.0, 1800.0, 300.0, 320.0, 250.0)

    def test_sized_to_sink_returns_it_to_ambient(self, props):
        sink = h2(100.0, 150.0)
        res = cmp.size_orc_to_sink(sink, 1e5, 393.0, 262.0, 243.0, props=props)
        assert res.report.aux["sink_t_out"] == pytest.approx(T0)
        assert res.report.energy.get("store heat") == pytest.approx(1e5)


class TestPlasma:
    def test_no_heating_needed(self, props):
        rep, out = cmp.plasma_heat(h2(1.0, 1273.0), 1273.0, props=props)
        assert not rep.energy and out.T == 1273.0

    def test_heating_duty(self, props):
        rep, out = cmp.plasma_heat(h2(), 1273.0, props=props)
        assert rep.aux["duty"] == pytest.approx(CP_H2 * 975.0, rel=1e-12)
        assert rep.aux["duty"] == pytest.approx(2.788e4, rel=1e-3)
        assert rep.energy.total_in == pytest.approx(2.935e4, rel=1e-3)
        assert out.T == 1273.0

    @given(st.floats(0.5, 1.0), st.floats(1000.0, 1300.0))
    def test_output_ratio_is_eta(self, eta, T):
        rep, _ = cmp.plasma_heat(h2(3.0), T, eta=eta)
        assert rep.energy.total_out / rep.energy.total_in == pytest.approx(eta, rel=1e-14)

    def test_target_out_of_range(self, props):
        with pytest.raises(cmp.ConfigurationError):
            cmp.plasma_heat(h2(), 1500.0, props=props)


class TestCombustion:
    def test_zero_duty(self, props):
        res = cmp.combustion_furnace(h2(1.0, 1200.0), 1100.0, props=props)
        assert res.fuel_moles == 0.0 and res.co2_kg == 0.0

    def test_co_to_co2(self):
        assert cmp.combustion_co2_kg({Species.CO: 1.0}) == pytest.approx(0.044, rel=1e-3)

    def test_fuel_for_duty(self, props):
        cp = props[H2].cp_ideal
        gas = h2(1e9 / (cp * (1273.15 - T0)))
        res = cmp.combustion_furnace(gas, 1273.15, 0.85, props=props)
        lhv = gas_chemical_energy(GasStream(1.0, props.mixture("coke-oven-gas"), T0), props)
        assert res.fuel_moles == pytest.approx(1e9 / (0.85 * lhv), rel=1e-12)
        assert res.report.energy_loss == pytest.approx(1e9 * (1 / 0.85 - 1), rel=1e-9)


def _random_reports(rng, n):
    """Yield component reports over randomly drawn valid inputs."""
    props = default_properties()
    for _ in range(n):
        k = rng.integers(7)
        T = rng.uniform(300.0, 1200.0)
        nmol = rng.uniform(0.1, 1e3)
        if k == 0:
            yield cmp.electrolyzer(int(rng.integers(1, 200)), rng.uniform(1.481, 3.0),
                                   rng.uniform(1.0, 5e3), rng.uniform(1.0, 7200.0), props)[0]
        elif k == 1:
            stages = [StageSpec(rng.uniform(1.01, 5.0), rng.uniform(0.5, 1.0))
                      for _ in range(rng.integers(1, 4))]
            yield cmp.compressor_train(h2(nmol, T), stages, props).report
        elif k == 2:
            stages = [StageSpec(rng.uniform(1.0, 3.0), rng.uniform(0.5, 1.0))
                      for _ in range(rng.integers(1, 4))]
            yield cmp.expander_train(h2(nmol, T, 30e6), stages, props).report
        elif k == 3:
            t_out = rng.uniform(T0, T)
            yield cmp.thermal_store_charge(h2(nmol, T), t_out, 4186.0, 1e4, T0, props=props)
        elif k == 4:
            t_cold = rng.uniform(250.0, 360.0)
            yield cmp.thermal_store_discharge(h2(nmol, t_cold), rng.uniform(t_cold, 362.0),
                                              4186.0, 363.0, t_cold, props)
        elif k == 5:
            yield cmp.plasma_heat(h2(nmol, T), rng.uniform(max(T, 1000.0), 1320.0), props=props)[0]
        else:
            yield cmp.combustion_furnace(GasStream(nmol, {H2: 0.6, Species.CO: 0.4}, T),
                                         rng.uniform(T, 1300.0), props=props).report


class TestSecondLaw:
    def test_exergy_destruction_non_negative(self):
        rng = np.random.default_rng(7)
        for rep in _random_reports(rng, 1000):
            assert rep.exergy_destruction >= -1e-9 * max(1.0, rep.exergy.total_in), rep.component

    @settings(max_examples=100, deadline=None)
    @given(st.floats(1.0, 2e4), st.floats(100.0, 400.0))
    def test_orc(self, q, t_sink):
        sink = h2(1e6, min(t_sink, 242.0))
        res = cmp.orc_cycle({"store": q}, sink, 393.0, 262.0, 243.0)
        assert res.report.exergy_destruction >= 0.0
