"""Parameter-sweep experiments for the eight numerical examples.

A config is a TOML document with the blocks ``[channel]`` (mean CNRs, either
``<name>_db`` or linear ``<name>``, scalar or two-element list), ``[pu]``,
``[su]``, ``[ee]``, ``[signal]`` (fixed SU parameters for the bound check),
``[sweep]``, ``[montecarlo]`` and ``[output]``.  Anything omitted falls back to
the scenario defaults returned by ``default_config``.
"""

from __future__ import annotations

import copy
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import ChannelMeans, EeConfig, PuConfig, SignalParams, SuConfig, db_to_linear
from .design_acsi import algorithm_I, algorithm_II
from .design_idlcsi import (avg_ee_acsi, avg_ee_dl, idl_decision_function, idl_signal_params,
                            power_saving_probability, pu_outage_dl, su_outage_dl_average)
from .montecarlo import (SeedSpec, empirical_dl_metrics, empirical_ee_acsi, empirical_pu_outage,
                         empirical_su_outage)
from .outage import pu_outage_exact_numeric, pu_outage_upper_bound

WORKERS_ENV = "IGS_UNDERLAY_WORKERS"
STREAMS_PER_POINT = 8
CHANNEL_FIELDS = ("gamma_p", "gamma_s", "i_p", "i_s", "upsilon_p")
PAIR_CHANNEL_FIELDS = ("gamma_p", "i_p", "i_s", "upsilon_p")


class ConfigError(ValueError):
    def __init__(self, diagnostics: Sequence["Diagnostic"]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    unit: str = "linear"

    @property
    def column(self) -> str:
        name = self.variable.split(".")[-1]
        return f"{name}_db" if self.unit == "db" else name

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class McSpec:
    enabled: bool = True
    n: int = 10**6
    seed: int = 0


@dataclass
class ExperimentConfig:
    scenario: str
    params: Dict[str, Dict[str, Any]]
    sweep: SweepSpec
    montecarlo: McSpec = field(default_factory=McSpec)
    output: Optional[str] = None


@dataclass(frozen=True)
class Models:
    means: ChannelMeans
    pu: PuConfig
    su: SuConfig
    ee: EeConfig
    signal: SignalParams
    node: int


# -- scenario evaluators ----------------------------------------------------

def _seed(mc: McSpec, point: int, k: int) -> SeedSpec:
    return SeedSpec(mc.seed, point * STREAMS_PER_POINT + k)


def _bound_check(m: Models, mc: Optional[McSpec], point: int) -> List[float]:
    row = [pu_outage_exact_numeric(m.signal, m.means, m.pu, m.node),
           pu_outage_upper_bound(m.signal, m.means, m.pu, m.node)]
    if mc:
        est = empirical_pu_outage(m.signal, m.means, m.pu, m.node, mc.n, _seed(mc, point, 0))
        row += [est.estimate, est.std_err]
    return row


def _acsi(m: Models, mc: Optional[McSpec], point: int) -> List[float]:
    prop = algorithm_I(m.pu, m.su, m.means)
    imp = algorithm_II(m.pu, m.su, m.means)
    row = [prop.params.p_s, prop.su_outage, imp.params.p_s, imp.params.c_x, imp.su_outage]
    if mc:
        for k, out in enumerate((prop, imp)):
            est = empirical_su_outage(out.params, m.means, m.pu, m.su, mc.n, _seed(mc, point, k))
            row += [est.estimate, est.std_err]
    return row


def _idl_outage(m: Models, mc: Optional[McSpec], point: int) -> List[float]:
    row = []
    for mode, design in (("proper", algorithm_I), ("improper", algorithm_II)):
        out = design(m.pu, m.su, m.means)
        sig, _ = idl_signal_params(m.pu, m.su, m.means, mode)
        row += [out.su_outage, su_outage_dl_average(sig, m.means, m.pu, m.su)]
    if mc:
        for k, mode in enumerate(("proper", "improper")):
            dec = idl_decision_function(m.pu, m.su, m.means, mode)
            est = empirical_dl_metrics(dec, m.means, m.pu, m.su, m.ee, mc.n, _seed(mc, point, k))
            row += [est.su_outage.estimate, est.su_outage.std_err]
    return row


def _dl_design(m: Models) -> Tuple[SignalParams, bool]:
    return idl_signal_params(m.pu, m.su, m.means, "improper")


def _power_saving(m: Models, mc: Optional[McSpec], point: int) -> List[float]:
    sig, feasible = _dl_design(m)
    saving = power_saving_probability(sig, m.means, m.su) if feasible else 1.0
    row = [sig.p_s, sig.c_x, saving]
    if mc:
        dec = idl_decision_function(m.pu, m.su, m.means, "improper")
        est = empirical_dl_metrics(dec, m.means, m.pu, m.su, m.ee, mc.n, _seed(mc, point, 0))
        row += [est.p_saving.estimate, est.p_saving.std_err]
    return row


def _energy_efficiency(m: Models, mc: Optional[McSpec], point: int) -> List[float]:
    sig, feasible = _dl_design(m)
    if feasible:
        row = [sig.p_s, sig.c_x, avg_ee_acsi(sig, m.means, m.pu, m.su, m.ee),
               avg_ee_dl(sig, m.means, m.pu, m.su, m.ee)]
    else:
        row = [sig.p_s, sig.c_x, math.nan, math.nan]
    if mc:
        if feasible:
            acsi = empirical_ee_acsi(sig, m.means, m.pu, m.su, m.ee, mc.n, _seed(mc, point, 0))
            dec = idl_decision_function(m.pu, m.su, m.means, "improper")
            dl = empirical_dl_metrics(dec, m.means, m.pu, m.su, m.ee, mc.n, _seed(mc, point, 1)).avg_ee
            row += [acsi.estimate, acsi.std_err, dl.estimate, dl.std_err]
        else:
            row += [math.nan] * 4
    return row


def _pu_protection(m: Models, mc: Optional[McSpec], point: int) -> List[float]:
    sig, feasible = _dl_design(m)
    row = []
    for i in (1, 2):
        acsi = pu_outage_exact_numeric(sig, m.means, m.pu, i)
        dl = pu_outage_dl(sig, m.means, m.pu, m.su, i) if feasible else acsi
        row += [acsi, dl]
    if mc:
        dec = idl_decision_function(m.pu, m.su, m.means, "improper")
        est = empirical_dl_metrics(dec, m.means, m.pu, m.su, m.ee, mc.n, _seed(mc, point, 0))
        for e in est.pu_outage:
            row += [e.estimate, e.std_err]
    return row


@dataclass(frozen=True)
class Scenario:
    name: str
    evaluate: Callable[[Models, Optional[McSpec], int], List[float]]
    columns: Tuple[str, ...]
    mc_columns: Tuple[str, ...]
    sweep: SweepSpec
    overrides: Dict[str, Dict[str, Any]] = field(default_factory=dict)


_ACSI_COLS = ("proper_p_s", "proper_outage", "improper_p_s", "improper_c_x", "improper_outage")
_ACSI_MC = ("mc_proper_outage", "mc_proper_stderr", "mc_improper_outage", "mc_improper_stderr")

SCENARIOS: Dict[str, Scenario] = {s.name: s for s in (
    Scenario("bound-check", _bound_check, ("exact", "upper_bound"), ("mc_estimate", "mc_stderr"),
             SweepSpec("channel.gamma_p", 15.0, 35.0, 11, "db")),
    Scenario("acsi-sweep", _acsi, _ACSI_COLS, _ACSI_MC,
             SweepSpec("channel.gamma_s", 0.0, 30.0, 16, "db")),
    Scenario("rate-sweep", _acsi, _ACSI_COLS, _ACSI_MC,
             SweepSpec("su.r0_s", 0.25, 3.0, 12)),
    Scenario("rsi-sweep", _acsi, _ACSI_COLS, _ACSI_MC,
             SweepSpec("channel.upsilon_p", 0.0, 20.0, 11, "db")),
    Scenario("idl-outage", _idl_outage,
             ("acsi_proper_outage", "idl_proper_outage", "acsi_improper_outage", "idl_improper_outage"),
             ("mc_idl_proper_outage", "mc_idl_proper_stderr", "mc_idl_improper_outage",
              "mc_idl_improper_stderr"),
             SweepSpec("channel.gamma_s", 0.0, 30.0, 16, "db")),
    Scenario("power-saving", _power_saving, ("p_s", "c_x", "p_saving"),
             ("mc_p_saving", "mc_stderr"),
             SweepSpec("channel.gamma_s", 0.0, 30.0, 16, "db")),
    Scenario("energy-efficiency", _energy_efficiency, ("p_s", "c_x", "ee_acsi", "ee_dl"),
             ("mc_ee_acsi", "mc_ee_acsi_stderr", "mc_ee_dl", "mc_ee_dl_stderr"),
             SweepSpec("su.r0_s", 0.25, 3.0, 12)),
    Scenario("pu-protection", _pu_protection,
             ("pu1_outage_acsi", "pu1_outage_dl", "pu2_outage_acsi", "pu2_outage_dl"),
             ("mc_pu1_outage_dl", "mc_pu1_stderr", "mc_pu2_outage_dl", "mc_pu2_stderr"),
             SweepSpec("channel.gamma_s", 0.0, 30.0, 16, "db")),
)}


def base_params() -> Dict[str, Dict[str, Any]]:
    """Reference operating point, in the units used by config files."""
    return {
        "channel": {"gamma_p_db": 25.0, "gamma_s_db": 20.0, "i_p_db": 3.0, "i_s_db": 13.0,
                    "upsilon_p_db": 5.0},
        "pu": {"p": 1.0, "r0_p": 0.5, "o_p": 0.01},
        "su": {"p_s_max": 1.0, "r0_s": 0.5},
        "ee": {"kappa_pa": 5.0, "p_c": 1.0},
        "signal": {"c_x": 0.5, "node": 1},
    }


def default_config(scenario: str) -> ExperimentConfig:
    if scenario not in SCENARIOS:
        raise ConfigError([Diagnostic("scenario", f"unknown scenario {scenario!r}")])
    return ExperimentConfig(scenario, base_params(), SCENARIOS[scenario].sweep)


# -- parsing and validation -------------------------------------------------

def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_value(v, ok: Callable[[float], bool], pair: bool) -> bool:
    if pair and isinstance(v, list):
        return len(v) == 2 and all(_is_number(x) and ok(x) for x in v)
    return _is_number(v) and ok(v)


_POSITIVE = (lambda x: x > 0, "must be positive")
_NON_NEG = (lambda x: x >= 0, "must be non-negative")
_ANY = (lambda x: True, "must be a finite number")
_FIELD_RULES = {
    "pu.p": (_POSITIVE, True), "pu.r0_p": (_POSITIVE, True),
    "pu.o_p": ((lambda x: 0 < x < 1, "must lie strictly between 0 and 1"), True),
    "su.p_s_max": (_POSITIVE, False), "su.r0_s": (_NON_NEG, False),
    "ee.kappa_pa": (_POSITIVE, False), "ee.p_c": (_NON_NEG, False),
    "signal.c_x": ((lambda x: 0 <= x <= 1, "must lie in [0, 1]"), False),
    "signal.p_s": (_NON_NEG, False),
    "signal.node": ((lambda x: x in (1, 2), "must be 1 or 2"), False),
}
for _f in CHANNEL_FIELDS:
    _pair = _f in PAIR_CHANNEL_FIELDS
    _FIELD_RULES[f"channel.{_f}_db"] = (_ANY, _pair)
    _FIELD_RULES[f"channel.{_f}"] = (_NON_NEG if _f == "upsilon_p" else _POSITIVE, _pair)


def _sweep_target(sweep: SweepSpec) -> str:
    return sweep.variable + ("_db" if sweep.unit == "db" else "")


def _field_diagnostic(path: str, value) -> Optional[Diagnostic]:
    (ok, msg), pair = _FIELD_RULES[path]
    if not _check_value(value, ok, pair):
        shape = "a number or a two-element list" if pair else "a number"
        return Diagnostic(path, f"{msg} ({shape}), got {value!r}")
    return None


def validate(config: ExperimentConfig) -> List[Diagnostic]:
    """All problems that would stop ``run``; empty when the config is usable."""
    diags: List[Diagnostic] = []
    if config.scenario not in SCENARIOS:
        diags.append(Diagnostic("scenario", f"unknown scenario {config.scenario!r}; "
                                            f"expected one of {sorted(SCENARIOS)}"))
    for section, block in config.params.items():
        for key, value in block.items():
            path = f"{section}.{key}"
            if path not in _FIELD_RULES:
                diags.append(Diagnostic(path, "unknown field"))
                continue
            d = _field_diagnostic(path, value)
            if d:
                diags.append(d)
    channel = config.params.get("channel", {})
    for f in CHANNEL_FIELDS:
        if f in channel and f"{f}_db" in channel:
            diags.append(Diagnostic(f"channel.{f}", f"give either {f} or {f}_db, not both"))

    sw = config.sweep
    target = _sweep_target(sw)
    if sw.unit not in ("db", "linear"):
        diags.append(Diagnostic("sweep.unit", f"must be 'db' or 'linear', got {sw.unit!r}"))
    elif sw.unit == "db" and not sw.variable.startswith("channel."):
        diags.append(Diagnostic("sweep.unit", "dB sweeps apply to channel fields only"))
    elif target not in _FIELD_RULES or target.startswith("signal.node"):
        diags.append(Diagnostic("sweep.variable", f"no sweepable field {sw.variable!r}"))
    else:
        for key in ("start", "stop"):
            value = getattr(sw, key)
            d = _field_diagnostic(target, value)
            if d:
                diags.append(Diagnostic(f"sweep.{key}", d.message))
    if not (isinstance(sw.points, int) and not isinstance(sw.points, bool) and sw.points >= 2):
        diags.append(Diagnostic("sweep.points", f"must be an integer >= 2, got {sw.points!r}"))

    mc = config.montecarlo
    if not isinstance(mc.enabled, bool):
        diags.append(Diagnostic("montecarlo.enabled", f"must be true or false, got {mc.enabled!r}"))
    if not (isinstance(mc.n, int) and not isinstance(mc.n, bool) and mc.n >= 1):
        diags.append(Diagnostic("montecarlo.n", f"must be a positive integer, got {mc.n!r}"))
    if not (isinstance(mc.seed, int) and not isinstance(mc.seed, bool) and 0 <= mc.seed < 2**64):
        diags.append(Diagnostic("montecarlo.seed", f"must be an unsigned 64-bit integer, got {mc.seed!r}"))
    if config.output is not None and not isinstance(config.output, str):
        diags.append(Diagnostic("output.path", f"must be a string, got {config.output!r}"))

    if not diags:
        # cross-field constraints only show up once the models are built
        for key, value in (("start", sw.start), ("stop", sw.stop)):
            try:
                build_models(config.params, sw, value)
            except ValueError as exc:
                diags.append(Diagnostic(f"sweep.{key}", str(exc)))
    return diags


_SECTIONS = ("channel", "pu", "su", "ee", "signal")


def config_from_dict(data: Dict[str, Any], scenario: Optional[str] = None) -> ExperimentConfig:
    """Overlay a parsed TOML document on the scenario defaults.

    Structural problems raise ConfigError; value problems are left to ``validate``.
    """
    diags = []
    name = scenario or data.get("scenario")
    if name is None:
        raise ConfigError([Diagnostic("scenario", "no scenario given")])
    if scenario and data.get("scenario", scenario) != scenario:
        diags.append(Diagnostic("scenario", f"config names {data['scenario']!r} but {scenario!r} was requested"))
    config = default_config(name)
    params = copy.deepcopy(config.params)
    known = set(_SECTIONS) | {"scenario", "sweep", "montecarlo", "output"}
    for key in data:
        if key not in known:
            diags.append(Diagnostic(key, "unknown section"))
    for section in _SECTIONS:
        block = data.get(section, {})
        if not isinstance(block, dict):
            diags.append(Diagnostic(section, "must be a table"))
            continue
        if section == "channel":
            # a user key replaces the default in either unit
            for key in block:
                base = key[:-3] if key.endswith("_db") else key
                params["channel"].pop(base, None)
                params["channel"].pop(f"{base}_db", None)
        params[section].update(block)

    sweep_data = data.get("sweep", {})
    mc_data = data.get("montecarlo", {})
    out_data = data.get("output", {})
    for key, block, allowed in (("sweep", sweep_data, {"variable", "start", "stop", "points", "unit"}),
                                ("montecarlo", mc_data, {"enabled", "n", "seed"}),
                                ("output", out_data, {"path"})):
        if not isinstance(block, dict):
            diags.append(Diagnostic(key, "must be a table"))
            continue
        for k in block:
            if k not in allowed:
                diags.append(Diagnostic(f"{key}.{k}", "unknown field"))
    if diags:
        raise ConfigError(diags)

    d = config.sweep
    sweep = SweepSpec(
        variable=sweep_data.get("variable", d.variable),
        start=sweep_data.get("start", d.start),
        stop=sweep_data.get("stop", d.stop),
        points=sweep_data.get("points", d.points),
        unit=sweep_data.get("unit", d.unit if "variable" not in sweep_data else "linear"),
    )
    mc = McSpec(enabled=mc_data.get("enabled", True), n=mc_data.get("n", McSpec.n),
                seed=mc_data.get("seed", McSpec.seed))
    return ExperimentConfig(name, params, sweep, mc, out_data.get("path"))


def load_config(path: str, scenario: Optional[str] = None) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError([Diagnostic("config", f"cannot read {path}: {exc.strerror}")]) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([Diagnostic("config", f"not valid TOML: {exc}")]) from exc
    return config_from_dict(data, scenario)


# -- execution --------------------------------------------------------------

def _channel_value(channel: Dict[str, Any], name: str):
    if f"{name}_db" in channel:
        v = channel[f"{name}_db"]
        return [db_to_linear(x) for x in v] if isinstance(v, list) else db_to_linear(v)
    return channel[name]


def build_models(params: Dict[str, Dict[str, Any]], sweep: Optional[SweepSpec] = None,
                 value: Optional[float] = None) -> Models:
    """Linear-unit domain objects for one sweep point."""
    params = copy.deepcopy(params)
    if sweep is not None:
        section, key = sweep.variable.split(".", 1)
        if section == "channel":
            params["channel"].pop(key, None)
            params["channel"].pop(f"{key}_db", None)
        params[section][key + ("_db" if sweep.unit == "db" else "")] = float(value)
    ch = params["channel"]
    means = ChannelMeans(*(_channel_value(ch, f) for f in CHANNEL_FIELDS))
    pu = PuConfig(**params["pu"])
    su = SuConfig(**params["su"])
    ee = EeConfig(**params["ee"])
    sig_block = params["signal"]
    signal = SignalParams(float(sig_block.get("p_s", su.p_s_max)), float(sig_block.get("c_x", 0.0)))
    return Models(means, pu, su, ee, signal, int(sig_block.get("node", 1)))


def columns(config: ExperimentConfig, with_mc: bool) -> List[str]:
    sc = SCENARIOS[config.scenario]
    return [config.sweep.column, *sc.columns, *(sc.mc_columns if with_mc else ())]


def _evaluate_point(args) -> List[float]:
    scenario, params, sweep, value, mc, index = args
    models = build_models(params, sweep, value)
    return [float(value), *SCENARIOS[scenario].evaluate(models, mc, index)]


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_rows(config: ExperimentConfig) -> Tuple[List[str], List[List[float]]]:
    """Evaluate every sweep point; rows come back in sweep order."""
    diags = validate(config)
    if diags:
        raise ConfigError(diags)
    mc = config.montecarlo if config.montecarlo.enabled else None
    jobs = [(config.scenario, config.params, config.sweep, v, mc, k)
            for k, v in enumerate(config.sweep.values())]
    workers = min(_workers(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_evaluate_point, jobs))
    else:
        rows = [_evaluate_point(j) for j in jobs]
    return columns(config, mc is not None), rows


def format_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format(v, ".17g") for v in row])
    return buf.getvalue()


def run(config: ExperimentConfig, out: Optional[str] = None) -> str:
    """Run the sweep and write the CSV to ``out`` (or the config's output path).

    Returns the CSV text.  Without any output path nothing is written.
    """
    header, rows = run_rows(config)
    text = format_csv(header, rows)
    path = out or config.output
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text
