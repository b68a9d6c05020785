"""Property data and stream-level energy/exergy primitives.

All quantities are SI: moles, kilograms, kelvin, pascal, joules.  Energies
and exergies are measured from the dead state (T0, P0).
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

R = 8.314  # J/(mol K)
T0 = 298.0  # K
P0 = 101325.0  # Pa
FARADAY = 96485.33212  # C/mol


class PropertyMissingError(KeyError):
    """A species (or mixture) has no record in the property table."""


class Species(str, enum.Enum):
    H2 = "H2"
    CO = "CO"
    H2O = "H2O"
    CO2 = "CO2"
    O2 = "O2"
    N2 = "N2"
    CH4 = "CH4"
    Fe2O3 = "Fe2O3"
    Fe = "Fe"
    FeO = "FeO"
    Fe3O4 = "Fe3O4"
    GANGUE = "ore-gangue"
    R32 = "working-fluid-R32"

    @classmethod
    def parse(cls, name: str) -> "Species":
        try:
            return cls(name.strip())
        except ValueError:
            raise PropertyMissingError(f"unknown species {name!r}") from None


COMBUSTIBLES = (Species.H2, Species.CO, Species.CH4)


@dataclass(frozen=True)
class PropertyRecord:
    molar_mass: float
    cp: float
    gamma: float | None
    lhv: float
    dg: float
    ex: float

    @property
    def cp_ideal(self) -> float:
        """gamma/(gamma-1)*R, the ideal-gas cp implied by the heat-capacity ratio."""
        if self.gamma is None:
            raise ValueError("heat-capacity ratio undefined for a condensed phase")
        return self.gamma / (self.gamma - 1.0) * R


@dataclass(frozen=True)
class PropertyTable:
    records: Mapping[Species, PropertyRecord]
    mixtures: Mapping[str, Mapping[Species, float]] = field(default_factory=dict)
    # reduction enthalpy (J/mol Fe) keyed by reducing gas
    reaction_enthalpy: Mapping[Species, float] = field(default_factory=dict)
    t0: float = T0
    p0: float = P0

    def __post_init__(self):
        missing = [s.value for s in Species if s not in self.records]
        if missing:
            raise PropertyMissingError(f"no property record for: {', '.join(missing)}")
        for sp, rec in self.records.items():
            if rec.molar_mass <= 0 or rec.cp <= 0:
                raise ValueError(f"{sp.value}: molar mass and cp must be positive")
            if rec.gamma is not None and rec.gamma <= 1.0:
                raise ValueError(f"{sp.value}: gamma must exceed 1")

    def __getitem__(self, sp: Species) -> PropertyRecord:
        try:
            return self.records[Species(sp)]
        except (KeyError, ValueError):
            raise PropertyMissingError(f"no property record for {sp!r}") from None

    def reduction_enthalpy(self, reductant: Species) -> float:
        try:
            return self.reaction_enthalpy[Species(reductant)]
        except KeyError:
            raise PropertyMissingError(f"no reduction enthalpy for {reductant!r}") from None

    def mixture(self, name: str) -> dict[Species, float]:
        try:
            return dict(self.mixtures[name])
        except KeyError:
            raise PropertyMissingError(f"no mixture named {name!r}") from None

    def replace(self, species: Species, **changes) -> "PropertyTable":
        """Copy of the table with fields of one record overridden."""
        recs = dict(self.records)
        recs[species] = dataclasses.replace(recs[species], **changes)
        return dataclasses.replace(self, records=recs)


def _num(tok: str) -> float | None:
    tok = tok.strip()
    return None if tok == "-" else float(tok)


def parse_property_text(text: str, source: str = "<text>") -> PropertyTable:
    records: dict[Species, PropertyRecord] = {}
    mixtures: dict[str, dict[Species, float]] = {}
    reactions: dict[Species, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("@mixture"):
                name, _, body = line[len("@mixture"):].partition(":")
                comp = {}
                for item in body.split(","):
                    sp, _, frac = item.partition("=")
                    comp[Species.parse(sp)] = float(frac)
                if abs(sum(comp.values()) - 1.0) > 1e-9:
                    raise ValueError("mixture fractions must sum to 1")
                mixtures[name.strip()] = comp
                continue
            if line.startswith("@reaction"):
                sp, _, val = line[len("@reaction"):].partition(":")
                reactions[Species.parse(sp)] = float(val)
                continue
            cols = [c.strip() for c in line.split(",")]
            if len(cols) != 7:
                raise ValueError(f"expected 7 columns, got {len(cols)}")
            sp = Species.parse(cols[0])
            m, cp, gamma, lhv, dg, ex = (_num(c) for c in cols[1:])
            if None in (m, cp, lhv, dg, ex):
                raise ValueError("only gamma may be '-'")
            records[sp] = PropertyRecord(m, cp, gamma, lhv, dg, ex)
        except (ValueError, PropertyMissingError) as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
    return PropertyTable(records, mixtures, reactions)


def load_properties(path=None) -> PropertyTable:
    """Read a property file; the bundled snapshot when *path* is None."""
    if path is None:
        text = resources.files("h2dri").joinpath("data/properties.dat").read_text()
        return parse_property_text(text, "properties.dat")
    with open(path, encoding="utf-8") as fh:
        return parse_property_text(fh.read(), str(path))


_DEFAULT: PropertyTable | None = None


def default_properties() -> PropertyTable:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_properties()
    return _DEFAULT


@dataclass(frozen=True)
class GasStream:
    """Ideal-gas stream: n mol per batch of a mixture at (T, P)."""

    n: float
    composition: Mapping[Species, float]
    T: float
    P: float = P0

    def __post_init__(self):
        comp = {Species(k): float(v) for k, v in self.composition.items()}
        object.__setattr__(self, "composition", comp)
        if self.n < 0:
            raise ValueError(f"negative molar amount {self.n}")
        if self.T <= 0 or self.P <= 0:
            raise ValueError(f"non-positive state T={self.T}, P={self.P}")
        if any(x < 0 for x in comp.values()):
            raise ValueError("negative mole fraction")
        if abs(sum(comp.values()) - 1.0) > 1e-12:
            raise ValueError(f"mole fractions sum to {sum(comp.values())!r}")

    @classmethod
    def pure(cls, species: Species, n: float, T: float, P: float = P0) -> "GasStream":
        return cls(n, {species: 1.0}, T, P)

    def with_state(self, T: float | None = None, P: float | None = None,
                   n: float | None = None) -> "GasStream":
        return GasStream(self.n if n is None else n, self.composition,
                         self.T if T is None else T, self.P if P is None else P)

    def moles(self, species: Species) -> float:
        return self.n * self.composition.get(species, 0.0)


@dataclass(frozen=True)
class SolidStream:
    """Solid stream: m kg per batch with mass fractions by species."""

    m: float
    fractions: Mapping[Species, float]
    T: float = T0

    def __post_init__(self):
        fr = {Species(k): float(v) for k, v in self.fractions.items()}
        object.__setattr__(self, "fractions", fr)
        if self.m < 0:
            raise ValueError(f"negative mass {self.m}")
        if self.T <= 0:
            raise ValueError(f"non-positive temperature {self.T}")
        if any(not 0.0 <= w <= 1.0 for w in fr.values()):
            raise ValueError("mass fraction outside [0, 1]")
        if fr and abs(sum(fr.values()) - 1.0) > 1e-9:
            raise ValueError(f"mass fractions sum to {sum(fr.values())!r}")

    def moles(self, species: Species, props: PropertyTable) -> float:
        return self.m * self.fractions.get(species, 0.0) / props[species].molar_mass


def mixture_cp_ideal(composition: Mapping[Species, float], props: PropertyTable) -> float:
    """Mole-weighted gamma/(gamma-1)*R of a gas mixture, J/(mol K)."""
    return sum(x * props[sp].cp_ideal for sp, x in composition.items() if x > 0)


def mixture_cp(composition: Mapping[Species, float], props: PropertyTable) -> float:
    """Mole-weighted tabulated cp of a mixture, J/(mol K)."""
    return sum(x * props[sp].cp for sp, x in composition.items() if x > 0)


def mixture_gamma(composition: Mapping[Species, float], props: PropertyTable) -> float:
    cp = mixture_cp_ideal(composition, props)
    return cp / (cp - R)


def mixture_molar_mass(composition: Mapping[Species, float], props: PropertyTable) -> float:
    return sum(x * props[sp].molar_mass for sp, x in composition.items())


def thermal_exergy_factor(T: float, t0: float = T0) -> float:
    """T - T0 - T0 ln(T/T0): exergy of sensible heat per unit heat capacity."""
    if T <= 0:
        raise ValueError(f"non-positive temperature {T}")
    return T - t0 - t0 * math.log(T / t0)


def gas_physical_energy(s: GasStream, props: PropertyTable | None = None) -> float:
    props = props or default_properties()
    return s.n * mixture_cp_ideal(s.composition, props) * (s.T - props.t0)


def gas_physical_exergy(s: GasStream, props: PropertyTable | None = None) -> float:
    props = props or default_properties()
    ex = s.n * mixture_cp_ideal(s.composition, props) * thermal_exergy_factor(s.T, props.t0)
    if s.P != props.p0:
        ex += s.n * R * props.t0 * math.log(s.P / props.p0)
    return ex


def gas_chemical_energy(s: GasStream, props: PropertyTable | None = None) -> float:
    props = props or default_properties()
    return s.n * sum(x * props[sp].lhv for sp, x in s.composition.items())


def gas_chemical_exergy(s: GasStream, props: PropertyTable | None = None) -> float:
    props = props or default_properties()
    standard = sum(x * props[sp].ex for sp, x in s.composition.items())
    # x ln x -> 0 as x -> 0
    mixing = sum(x * math.log(x) for x in s.composition.values() if x > 0)
    return s.n * (standard + R * props.t0 * mixing)
