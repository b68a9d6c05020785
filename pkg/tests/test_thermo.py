import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h2dri.thermo import (P0, R, T0, GasStream, PropertyMissingError, Species,
                          default_properties,
                          gas_chemical_energy, gas_chemical_exergy, gas_physical_energy,
                          gas_physical_exergy, load_properties, parse_property_text,
                          thermal_exergy_factor)

H2 = Species.H2


class TestPhysicalEnergy:
    """Sensible energy measured from the dead state."""

    def test_dead_state_is_zero(self, props):
        assert gas_physical_energy(GasStream.pure(H2, 1.0, T0), props) == 0.0

    def test_one_mole_h2_at_398(self, props):
        expected = 1.41 / 0.41 * 8.314 * 100.0
        got = gas_physical_energy(GasStream.pure(H2, 1.0, 398.0), props)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(2.859e3, rel=1e-3)

    def test_linear_in_moles(self, props):
        one = gas_physical_energy(GasStream.pure(H2, 1.0, 900.0), props)
        assert gas_physical_energy(GasStream.pure(H2, 7.5, 900.0), props) == pytest.approx(7.5 * one)


class TestPhysicalExergy:
    def test_dead_state_is_zero(self, props):
        s = GasStream(3.0, {H2: 0.6, Species.CO: 0.4}, T0, P0)
        assert gas_physical_exergy(s, props) == 0.0

    def test_one_mole_h2_at_398(self, props):
        # closed form; the rounded reference value of 4.00e2 is within 2 %
        expected = 1.41 / 0.41 * 8.314 * (100.0 - 298.0 * math.log(398.0 / 298.0))
        got = gas_physical_exergy(GasStream.pure(H2, 1.0, 398.0), props)
        assert got == pytest.approx(expected, rel=1e-12)
        assert got == pytest.approx(4.00e2, rel=0.02)

    @pytest.mark.parametrize("T", np.linspace(200.0, 1400.0, 20))
    def test_positive_away_from_dead_state(self, props, T):
        ex = gas_physical_exergy(GasStream.pure(H2, 1.0, T), props)
        assert ex > 0.0

    @pytest.mark.parametrize("T", np.linspace(300.0, 1400.0, 20))
    def test_exergy_below_energy_above_t0(self, props, T):
        s = GasStream.pure(H2, 2.0, T)
        assert gas_physical_exergy(s, props) < gas_physical_energy(s, props)

    def test_pressure_term(self, props):
        s = GasStream.pure(H2, 1.0, T0, 10 * P0)
        assert gas_physical_exergy(s, props) == pytest.approx(R * T0 * math.log(10.0))

    def test_non_positive_temperature_rejected(self):
        with pytest.raises(ValueError):
            thermal_exergy_factor(0.0)


class TestChemical:
    def test_lhv_h2(self, props):
        assert gas_chemical_energy(GasStream.pure(H2, 1.0, T0), props) == pytest.approx(2.418e5)

    def test_water_has_no_chemical_energy(self, props):
        assert gas_chemical_energy(GasStream.pure(Species.H2O, 5.0, 400.0), props) == 0.0

    def test_linearity_of_blend(self, props):
        s = GasStream(10.0, {H2: 0.6, Species.CO: 0.4}, T0)
        expected = 6 * props[H2].lhv + 4 * props[Species.CO].lhv
        assert gas_chemical_energy(s, props) == pytest.approx(expected, rel=1e-12)

    def test_pure_species_exergy(self, props):
        s = GasStream.pure(Species.CO, 2.5, T0)
        assert gas_chemical_exergy(s, props) == pytest.approx(2.5 * props[Species.CO].ex, rel=1e-14)

    def test_equimolar_mixing_term(self, props):
        s = GasStream(1.0, {H2: 0.5, Species.CO: 0.5}, T0)
        mean = 0.5 * (props[H2].ex + props[Species.CO].ex)
        delta = gas_chemical_exergy(s, props) - mean
        assert delta == pytest.approx(8.314 * 298 * math.log(0.5), rel=1e-12)
        assert delta == pytest.approx(-1.717e3, rel=1e-3)

    def test_zero_fraction_species_skipped(self, props):
        s = GasStream(1.0, {H2: 1.0, Species.CO: 0.0}, T0)
        assert gas_chemical_exergy(s, props) == pytest.approx(props[H2].ex)

    @given(st.floats(0.01, 0.99))
    def test_mixing_term_never_positive(self, x):
        s = GasStream(1.0, {H2: x, Species.H2O: 1.0 - x}, T0)
        p = default_properties()
        standard = x * p[H2].ex + (1 - x) * p[Species.H2O].ex
        assert gas_chemical_exergy(s, p) <= standard + 1e-9


class TestAdditivity:
    """Merging two streams at equal state adds energy and exergy."""

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 0.99), st.floats(0.1, 100.0), st.floats(250.0, 1400.0))
    def test_split_merge(self, frac, n, T):
        p = default_properties()
        comp = {H2: 0.7, Species.CO: 0.3}
        whole = GasStream(n, comp, T, 2 * P0)
        a, b = whole.with_state(n=frac * n), whole.with_state(n=(1 - frac) * n)
        for fn in (gas_physical_energy, gas_physical_exergy, gas_chemical_energy,
                   gas_chemical_exergy):
            assert fn(a, p) + fn(b, p) == pytest.approx(fn(whole, p), rel=1e-10, abs=1e-9)


class TestPropertyTable:
    def test_total_over_species(self, props):
        for sp in Species:
            assert props[sp].molar_mass > 0

    def test_lookup_is_deterministic(self, props):
        assert load_properties() == load_properties()

    def test_unknown_species(self, props):
        with pytest.raises(PropertyMissingError):
            props["unobtainium"]

    def test_missing_record_rejected(self):
        with pytest.raises(PropertyMissingError):
            parse_property_text("H2, 0.002, 29.2, 1.41, 241.8e3, 0, 236.1e3\n")

    def test_bad_line_is_located(self):
        with pytest.raises(ValueError, match="<text>:2"):
            parse_property_text("# header\nH2, 0.002, 29.2\n")

    def test_reaction_signs(self, props):
        assert props.reduction_enthalpy(H2) > 0
        assert props.reduction_enthalpy(Species.CO) < 0

    def test_replace_copies(self, props):
        hot = props.replace(H2, cp=30.0)
        assert hot[H2].cp == 30.0 and props[H2].cp == 29.2


class TestStreams:
    def test_fractions_must_sum_to_one(self):
        with pytest.raises(ValueError):
            GasStream(1.0, {H2: 0.5}, 300.0)

    def test_negative_moles_rejected(self):
        with pytest.raises(ValueError):
            GasStream.pure(H2, -1.0, 300.0)
