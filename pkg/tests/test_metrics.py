import pytest
from hypothesis import given
from hypothesis import strategies as st

from h2dri.metrics import (J_PER_KWH, Aggregates, CarbonBlock, CarbonConfigError,
                           UndefinedEfficiencyError, carbon_equivalent, efficiency_report,
                           energy_carbon_efficiency, energy_efficiency, exergy_efficiency,
                           hydrogen_utilization, penalty_ratio)

AGG = Aggregates(w_in=1e9, w_out=4e8, ex_in=9e8, ex_out=2.5e8, w_vin=2e9, w_vout=1.2e9)


def block(x, **kw):
    return CarbonBlock(c_dri=1.6 * x, c_base=1.6, **kw)


class TestEfficiencies:
    def test_identity(self):
        agg = Aggregates(5.0, 5.0, 3.0, 3.0, 7.0, 7.0)
        assert energy_efficiency(agg) == (1.0, 1.0)
        assert exergy_efficiency(agg) == 1.0

    def test_dead_state_outputs(self):
        assert exergy_efficiency(Aggregates(1.0, 0.0, 1.0, 0.0, 1.0, 0.0)) == 0.0

    def test_zero_input(self):
        with pytest.raises(UndefinedEfficiencyError):
            energy_efficiency(Aggregates(0.0, 1.0, 1.0, 1.0, 1.0, 1.0))
        with pytest.raises(UndefinedEfficiencyError):
            exergy_efficiency(Aggregates(1.0, 1.0, 0.0, 1.0, 1.0, 1.0))

    def test_hydrogen_utilization(self):
        assert hydrogen_utilization(10.0, 0.0) == 1.0
        assert hydrogen_utilization(3.0, 3.0) == 0.5
        with pytest.raises(UndefinedEfficiencyError):
            hydrogen_utilization(0.0, 0.0)


class TestPenalty:
    @pytest.mark.parametrize("x,expected", [
        (0.999, 0.999), (1.0, 1.0), (1.001, 1.001 * 1.2), (1.2, 1.2 * 1.2),
        (1.201, 1.201 * 1.5)])
    def test_branch_selection(self, x, expected):
        assert penalty_ratio(x, 1.2, 1.5) == expected
        assert carbon_equivalent(block(x)).ce == pytest.approx(expected, rel=1e-12)

    def test_first_branch(self):
        assert carbon_equivalent(block(0.8)).ce == pytest.approx(0.8)

    def test_heavy_emitter(self):
        assert penalty_ratio(1.3, 1.2, 1.5) == pytest.approx(1.95)

    def test_penalty_off(self):
        assert carbon_equivalent(block(1.3), penalty=False).ce == pytest.approx(1.3)

    @given(st.floats(0.0, 3.0), st.floats(0.0, 3.0))
    def test_non_decreasing(self, a, b):
        lo, hi = sorted((a, b))
        assert penalty_ratio(lo) <= penalty_ratio(hi)

    def test_right_continuous_away_from_breakpoints(self):
        for x in (0.5, 1.1, 1.5):
            assert penalty_ratio(x + 1e-12) == pytest.approx(penalty_ratio(x), rel=1e-9)


class TestCarbonEquivalent:
    def test_zero_emissions(self):
        eq = carbon_equivalent(CarbonBlock())
        assert eq.ce == 0.0 and eq.cet == 0.0
        assert energy_carbon_efficiency(AGG, CarbonBlock()) == energy_efficiency(AGG)[1]

    def test_energy_price(self):
        assert CarbonBlock().m_energy == pytest.approx(1.389e-7, rel=1e-3)
        assert CarbonBlock().m_energy == 0.5 / J_PER_KWH

    def test_phi(self):
        b = block(0.5)
        eq = carbon_equivalent(b)
        assert eq.phi_ce == pytest.approx(1.6 * 120.0 / (0.5 / 3.6e6))
        assert eq.cet == pytest.approx(eq.phi_ce * 0.5)

    @given(st.floats(0.01, 3.0), st.floats(0.1, 10.0))
    def test_price_scaling(self, x, k):
        base = block(x)
        scaled = block(x, p_co2=120.0 * k)
        assert carbon_equivalent(scaled).cet == pytest.approx(k * carbon_equivalent(base).cet)
        if k > 1:
            assert energy_carbon_efficiency(AGG, scaled) < energy_carbon_efficiency(AGG, base)

    @given(st.just(0.0) | st.floats(1e-6, 3.0))
    def test_ec_never_above_ee(self, x):
        ec = energy_carbon_efficiency(AGG, block(x))
        ee = energy_efficiency(AGG)[1]
        assert ec <= ee
        assert (ec == ee) == (x == 0.0)

    def test_zero_allowance(self):
        with pytest.raises(CarbonConfigError):
            carbon_equivalent(CarbonBlock(c_dri=1.0, c_base=0.0))

    @pytest.mark.parametrize("kw", [dict(theta=0.9), dict(theta=1.3, nu=1.2), dict(p_co2=-1.0)])
    def test_invalid_block(self, kw):
        with pytest.raises(CarbonConfigError):
            CarbonBlock(**kw)

    def test_ec_may_go_negative(self):
        assert energy_carbon_efficiency(AGG, block(3.0, p_co2=1e4)) < 0


def test_report():
    rep = efficiency_report(AGG, block(0.5), 1.0, 3.0)
    assert rep.eta_ven == pytest.approx(0.6) and rep.ee == pytest.approx(0.4)
    assert rep.exe == pytest.approx(2.5 / 9) and rep.eta_h2 == 0.25
    assert rep.ec == pytest.approx((4e8 - rep.cet) / 1e9)
