"""Command-line front end: scenario sweeps to CSV and run comparison.

    h2dri run --scenario all --out results/
    h2dri diff results/results.csv other/results.csv --threshold 1e-9
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import math
import os
import re
import sys
import typing
from dataclasses import dataclass, field

from .components import ConfigurationError
from .flowsheet import (T_MAX, T_MIN, PlantParams, ScenarioConfig, SolverParams,
                        SystemReport, solve_scenario)
from .furnace import FurnaceParams
from .kinetics import BedGeometry, KineticsError
from .metrics import CarbonBlock
from .thermo import load_properties

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_DIFF = 0, 1, 2, 3

SCENARIOS = {
    "zero-carbon": "zero-carbon",
    "trad-64": "traditional-64",
    "trad-82": "traditional-82",
    "grid": "zero-carbon-grid",
}

COLUMNS = ["scenario", "T_in_K", "n1_mol", "n2_mol", "eta_H2", "T_topgas_K", "T_DRI_K",
           "W_in_J", "W_out_J", "EX_in_J", "EX_out_J", "CO2_t", "CET_J", "EE", "EXE", "EC",
           "eta_ven"]

# config section -> (dataclass, attribute on ScenarioConfig or None for top level)
SECTIONS = {
    "scenario": (ScenarioConfig, None),
    "furnace": (FurnaceParams, "furnace"),
    "plant": (PlantParams, "plant"),
    "bed": (BedGeometry, "bed"),
    "carbon": (CarbonBlock, "carbon"),
    "solver": (SolverParams, "solver"),
}
_SCENARIO_KEYS = ("batch_kg", "co_share", "grid_factor", "properties")


class ConfigError(ValueError):
    def __init__(self, msg, path=None, line=None):
        where = f"{path}:{line}: " if path and line else (f"{path}: " if path else "")
        super().__init__(where + msg)
        self.line = line


def _fmt(v: float) -> str:
    return "nan" if not math.isfinite(v) else format(v, ".12g")


@dataclass
class SweepSpec:
    scenarios: list[str]
    temperatures: list[float]
    out_dir: str = "."
    waste_heat: bool = True
    penalty: bool = True
    dump_profiles: bool = False

    def __post_init__(self):
        for s in self.scenarios:
            if s not in SCENARIOS:
                raise ConfigError(f"unknown scenario {s!r}")
        ts = self.temperatures
        if not ts:
            raise ConfigError("empty temperature grid")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ConfigError("temperature grid must be strictly increasing")
        if ts[0] < T_MIN - 1e-6 or ts[-1] > T_MAX + 1e-6:
            raise ConfigError(f"temperature grid leaves [{T_MIN}, {T_MAX}] K")


def parse_range(text: str) -> list[float]:
    """'LO:HI:STEP' -> inclusive grid; HI is kept when it lands on the step."""
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"bad --t-range {text!r}; expected LO:HI:STEP") from None
    if step <= 0 or hi < lo:
        raise ConfigError(f"bad --t-range {text!r}; need LO <= HI and STEP > 0")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


# -- config file --------------------------------------------------------------

def _key_lines(text: str) -> dict[tuple[str, str], int]:
    lines, section = {}, None
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s[0] in "#;":
            continue
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            section = m.group(1).strip().lower()
            lines.setdefault((section, ""), i)
            continue
        m = re.match(r"([^=:]+)[=:]", s)
        if m and section is not None:
            lines.setdefault((section, m.group(1).strip().lower()), i)
    return lines


def _convert(raw: str, tp, default):
    raw = raw.strip()
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if raw.lower() == "none" and (default is None or type(None) in args):
        return None
    if tp is bool or isinstance(default, bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if tp is int or isinstance(default, int):
        return int(raw)
    if tp is tuple or isinstance(default, tuple) or origin is tuple:
        return tuple(float(x) for x in raw.split(",") if x.strip())
    if tp is str or isinstance(default, str):
        return raw
    return float(raw)


def _field_types(cls):
    hints = typing.get_type_hints(cls)
    return {f.name: (hints.get(f.name), f.default) for f in dataclasses.fields(cls)}


def load_config(path: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Apply an INI file onto *base*.  Unknown sections or keys are errors."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str.lower
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(exc.message.splitlines()[0] if hasattr(exc, "message") else str(exc),
                          path, line) from None
    where = _key_lines(text)
    cfg = base or ScenarioConfig()
    top: dict = {}
    for section in cp.sections():
        sec = section.lower()
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]", path, where.get((sec, "")))
        cls, attr = SECTIONS[sec]
        types = _field_types(cls)
        changes = {}
        for key, raw in cp.items(section):
            line = where.get((sec, key))
            if attr is None and key not in _SCENARIO_KEYS:
                raise ConfigError(f"unknown key {key!r} in [{section}]", path, line)
            if key == "properties":
                try:
                    changes["props"] = load_properties(raw.strip())
                except (OSError, ValueError) as exc:
                    raise ConfigError(f"property file: {exc}", path, line) from None
                continue
            if key not in types:
                raise ConfigError(f"unknown key {key!r} in [{section}]", path, line)
            tp, default = types[key]
            try:
                changes[key] = _convert(raw, tp, default)
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}", path, line) from None
        try:
            if attr is None:
                top.update(changes)
            else:
                top[attr] = dataclasses.replace(getattr(cfg, attr), **changes)
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{section}]: {exc}", path, where.get((sec, ""))) from None
    try:
        return cfg.with_(**top)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), path) from None


# -- sweep ------------------------------------------------------------------

@dataclass
class Cell:
    scenario: str
    t_in: float
    report: SystemReport | None = None
    error: str = ""
    no_waste_heat: SystemReport | None = None
    extra: dict = field(default_factory=dict)


def _row(cell: Cell) -> list[str]:
    if cell.report is None:
        return [cell.scenario, _fmt(cell.t_in)] + ["nan"] * (len(COLUMNS) - 2)
    r = cell.report
    a, e = r.aggregates, r.efficiency
    vals = [r.n1, r.n2, e.eta_h2, r.t_topgas, r.t_dri, a.w_in, a.w_out, a.ex_in, a.ex_out,
            r.co2_t, e.cet, e.ee, e.exe, e.ec, e.eta_ven]
    return [cell.scenario, _fmt(cell.t_in)] + [_fmt(v) for v in vals]


def run_sweep(spec: SweepSpec, base: ScenarioConfig) -> list[Cell]:
    cells = []
    for name in spec.scenarios:
        for t in spec.temperatures:
            cfg = base.with_(kind=SCENARIOS[name], t_in=t, waste_heat=spec.waste_heat,
                             penalty=spec.penalty)
            cell = Cell(name, t)
            try:
                cell.report = solve_scenario(cfg)
                if name == "zero-carbon" and spec.waste_heat:
                    cell.no_waste_heat = solve_scenario(cfg.with_(waste_heat=False))
            except (RuntimeError, ArithmeticError, KineticsError, ValueError) as exc:
                if isinstance(exc, ConfigurationError):
                    raise
                cell.error = f"{type(exc).__name__}: {exc}"
            cells.append(cell)
    return cells


def _write(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _ok(cells, name):
    return [c for c in cells if c.scenario == name and c.report is not None]


def write_outputs(cells: list[Cell], spec: SweepSpec) -> list[str]:
    out = spec.out_dir
    os.makedirs(out, exist_ok=True)
    written = [os.path.join(out, "results.csv")]
    _write(written[0], COLUMNS, (_row(c) for c in cells))

    failed = [c for c in cells if c.report is None]
    if failed:
        p = os.path.join(out, "failures.csv")
        _write(p, ["scenario", "T_in_K", "error"], ([c.scenario, _fmt(c.t_in), c.error]
                                                    for c in failed))
        written.append(p)

    def fig(name, header, rows):
        rows = list(rows)
        if rows:
            p = os.path.join(out, name)
            _write(p, header, rows)
            written.append(p)

    zc = _ok(cells, "zero-carbon")
    fig("fig3_kinetics.csv", ["scenario", "T_in_K", "T_topgas_K", "T_DRI_K"],
        ([c.scenario, _fmt(c.t_in), _fmt(c.report.t_topgas), _fmt(c.report.t_dri)]
         for c in cells if c.report is not None))
    fig("fig5_zero_carbon.csv", ["T_in_K", "EE", "EXE", "EC", "eta_ven", "eta_H2"],
        ([_fmt(c.t_in)] + [_fmt(v) for v in (c.report.efficiency.ee, c.report.efficiency.exe,
                                              c.report.efficiency.ec, c.report.efficiency.eta_ven,
                                              c.report.efficiency.eta_h2)] for c in zc))
    for key, label in (("ee", "fig8_ee_compare.csv"), ("exe", "fig9_exe_compare.csv"),
                       ("ec", "fig10_ec_compare.csv")):
        fig(label, ["scenario", "T_in_K", key.upper()],
            ([c.scenario, _fmt(c.t_in), _fmt(getattr(c.report.efficiency, key))]
             for c in cells if c.report is not None and c.scenario != "grid"))
    fig("fig11_co_heat_vs_cet.csv", ["scenario", "T_in_K", "CO_heat_J", "CET_J", "CO2_t"],
        ([c.scenario, _fmt(c.t_in), _fmt(c.report.co_heat), _fmt(c.report.efficiency.cet),
          _fmt(c.report.co2_t)]
         for c in cells if c.report is not None and c.scenario.startswith("trad")))
    fig("fig13_waste_heat.csv", ["T_in_K", "EE_with_recovery", "EE_without_recovery"],
        ([_fmt(c.t_in), _fmt(c.report.efficiency.ee), _fmt(c.no_waste_heat.efficiency.ee)]
         for c in zc if c.no_waste_heat is not None))
    fig("fig14_orc_expander.csv", ["T_in_K", "ORC_J", "expander_J", "other_output_J"],
        ([_fmt(c.t_in), _fmt(c.report.extras["orc"]), _fmt(c.report.extras["expander"]),
          _fmt(c.report.aggregates.w_out - c.report.extras["orc"] - c.report.extras["expander"])]
         for c in zc if spec.waste_heat))
    fig("fig15_orc_vs_topgas.csv", ["T_in_K", "ORC_plus_expander_J", "topgas_recovered_J"],
        ([_fmt(c.t_in), _fmt(c.report.extras["orc"] + c.report.extras["expander"]),
          _fmt(c.report.extras["topgas_recovered"])] for c in zc if spec.waste_heat))
    fig("fig16_grid.csv", ["T_in_K", "EE", "EC", "CO2_t", "CET_J"],
        ([_fmt(c.t_in), _fmt(c.report.efficiency.ee), _fmt(c.report.efficiency.ec),
          _fmt(c.report.co2_t), _fmt(c.report.efficiency.cet)] for c in _ok(cells, "grid")))

    if spec.dump_profiles:
        pdir = os.path.join(out, "profiles")
        os.makedirs(pdir, exist_ok=True)
        for c in cells:
            if c.report is not None:
                p = os.path.join(pdir, f"{c.scenario}_{c.t_in:.2f}K.csv")
                c.report.profile.write_csv(p)
                written.append(p)
    return written


# -- diff -------------------------------------------------------------------

def _read_results(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError("empty results file", path)
    return rows[0], rows[1:]


def diff_results(path_a: str, path_b: str):
    """Per-cell (scenario, T, column, a, b, abs delta, rel delta) for numeric columns."""
    ha, ra = _read_results(path_a)
    hb, rb = _read_results(path_b)
    if ha != hb:
        raise ConfigError(f"column headers differ between {path_a} and {path_b}")
    if [r[:2] for r in ra] != [r[:2] for r in rb]:
        raise ConfigError(f"scenario/temperature grids differ between {path_a} and {path_b}")
    out = []
    for xa, xb in zip(ra, rb):
        for col, va, vb in zip(ha[2:], xa[2:], xb[2:]):
            a, b = float(va), float(vb)
            if math.isnan(a) and math.isnan(b):
                d, rel = 0.0, 0.0
            else:
                d = abs(a - b)
                scale = max(abs(a), abs(b))
                rel = d / scale if scale > 0 else 0.0
            out.append((xa[0], xa[1], col, a, b, d, rel))
    return out


# -- entry point --------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="h2dri", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="sweep scenarios over reduction-gas temperatures")
    r.add_argument("--config", help="INI file overriding scenario parameters")
    r.add_argument("--scenario", default="all", choices=[*SCENARIOS, "all"])
    g = r.add_mutually_exclusive_group()
    g.add_argument("--t", type=float, help="single reduction-gas temperature, K")
    g.add_argument("--t-range", default=f"{T_MIN}:{T_MAX}:25",
                   help="LO:HI:STEP in K (default %(default)s)")
    r.add_argument("--batch-kg", type=float, help="DRI batch size, kg")
    r.add_argument("--no-waste-heat", action="store_true",
                   help="drop expander, ORC and top-gas recovery from the outputs")
    r.add_argument("--no-penalty", action="store_true", help="disable the emissions penalty steps")
    r.add_argument("--dump-profiles", action="store_true", help="write bed temperature profiles")
    r.add_argument("--out", default=".", help="output directory")

    d = sub.add_parser("diff", help="compare two results.csv files")
    d.add_argument("a")
    d.add_argument("b")
    d.add_argument("--threshold", type=float, default=None,
                   help="fail when any absolute delta exceeds this")
    d.add_argument("--rel-threshold", type=float, default=None,
                   help="fail when any relative delta exceeds this")
    d.add_argument("--all", action="store_true", help="print unchanged cells too")
    return ap


def _cmd_run(args) -> int:
    base = ScenarioConfig()
    if args.config:
        base = load_config(args.config, base)
    if args.batch_kg is not None:
        base = base.with_(batch_kg=args.batch_kg)
    temps = [args.t] if args.t is not None else parse_range(args.t_range)
    names = list(SCENARIOS) if args.scenario == "all" else [args.scenario]
    spec = SweepSpec(names, temps, args.out, not args.no_waste_heat, not args.no_penalty,
                     args.dump_profiles)
    cells = run_sweep(spec, base)
    for p in write_outputs(cells, spec):
        print(f"wrote {p}")
    failed = [c for c in cells if c.report is None]
    for c in failed:
        print(f"FAILED {c.scenario} at {c.t_in:.2f} K: {c.error}", file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


def _cmd_diff(args) -> int:
    rows = diff_results(args.a, args.b)
    worst_abs = max((r[5] for r in rows), default=0.0)
    worst_rel = max((r[6] for r in rows), default=0.0)
    print("scenario,T_in_K,column,a,b,abs_delta,rel_delta")
    for s, t, col, a, b, d, rel in rows:
        if args.all or d > 0:
            print(f"{s},{t},{col},{_fmt(a)},{_fmt(b)},{_fmt(d)},{_fmt(rel)}")
    print(f"# max abs delta {_fmt(worst_abs)}, max rel delta {_fmt(worst_rel)}", file=sys.stderr)
    if args.threshold is not None and worst_abs > args.threshold:
        return EXIT_DIFF
    if args.rel_threshold is not None and worst_rel > args.rel_threshold:
        return EXIT_DIFF
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_diff(args)
    except (ConfigError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
