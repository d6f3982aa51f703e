"""Scenario description, config-file IO, presets and the market-size scaling map."""

from __future__ import annotations

import configparser
import math
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources

import numpy as np

from . import _kernels as K
from ._io import atomic_write_text
from .demand import BASS, CONSTANT, DemandProcess, peak_time
from .errors import ConfigError, ValidationError
from .fluid import EFFICIENT, INEFFICIENT, MarketState, SwarmParams
from .market import EconParams

REGIMES = ("inefficient-bass", "inefficient-constant", "efficient-bass", "efficient-constant")


@dataclass(frozen=True)
class Scenario:
    demand: DemandProcess
    legal: SwarmParams
    illicit: SwarmParams
    econ: EconParams
    horizon: float = 40.0
    dt: float = 0.01
    recording_interval: float = 0.1
    initial_state: MarketState = field(default_factory=MarketState)
    y_floor: float = 1.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValidationError(f"dt must be > 0, got {self.dt}")
        if not self.horizon >= 10 * self.dt:
            raise ValidationError(f"horizon must be >= 10*dt, got {self.horizon}")
        if not self.recording_interval >= self.dt:
            raise ValidationError("recording_interval must be >= dt")
        if not (self.y_floor > 0 and math.isfinite(self.y_floor)):
            raise ValidationError(f"y_floor must be finite and > 0, got {self.y_floor}")
        if self.illicit.server_capacity != 0:
            raise ValidationError("illicit server_capacity must be 0")
        self.initial_state.check(self.demand.market_size)

    @property
    def market_size(self) -> float:
        return self.demand.market_size

    def packed(self) -> np.ndarray:
        """Flat parameter vector consumed by the compiled kernels."""
        P = np.zeros(K.N_PARAMS)
        d = self.demand
        if d.kind == BASS:
            P[K.DEMAND_KIND] = K.BASS
            P[K.P_INNOV] = d.params.p_innov
            P[K.Q_IMIT] = d.params.q_imit
            P[K.MARKET] = d.params.market_size
        else:
            P[K.DEMAND_KIND] = K.CONSTANT
            P[K.CONST_RATE] = d.rate
            P[K.MARKET] = d.total
        for base, sw in ((K.LEGAL, self.legal), (K.ILLICIT, self.illicit)):
            P[base + K.MU] = sw.peer_upload
            P[base + K.ETA] = sw.downloader_upload_factor
            P[base + K.CAP] = sw.download_cap
            P[base + K.SERVER] = sw.server_capacity
            P[base + K.GAMMA] = sw.seed_departure_rate
            P[base + K.ENABLED] = 1.0 if sw.enabled else 0.0
        e = self.econ
        P[K.PRICE] = e.price
        P[K.DELTA] = e.share_fraction
        P[K.ALPHA] = e.delay_sensitivity
        P[K.TAU] = e.choice_temperature
        P[K.RHO_LEGAL] = e.base_seed_prob_legal
        P[K.RHO_ILLICIT] = e.base_seed_prob_illicit
        P[K.RHO_ROGUE] = e.rogue_base_prob
        P[K.KAPPA] = e.reward_response
        P[K.KAPPA_ROGUE] = e.rogue_response
        P[K.Y_FLOOR] = self.y_floor
        return P

    def with_share(self, delta: float) -> Scenario:
        return replace(self, econ=replace(self.econ, share_fraction=delta))

    def with_econ(self, **changes) -> Scenario:
        return replace(self, econ=replace(self.econ, **changes))


# --- config file ---------------------------------------------------------------

_REQ = object()

_SWARM_KEYS = {
    "peer_upload": (float, _REQ),
    "seed_departure_rate": (float, _REQ),
    "efficiency_mode": (str, EFFICIENT),
    "download_cap": (float, math.inf),
    "server_capacity": (float, 0.0),
    "enabled": (bool, True),
}
_ECON_KEYS = {f.name: (float, _REQ if f.name == "price" else f.default) for f in fields(EconParams)}
_SCHEMA = {
    "demand": {
        "kind": (str, _REQ),
        "p_innov": (float, None),
        "q_imit": (float, None),
        "market_size": (float, None),
        "rate": (float, None),
        "total": (float, None),
    },
    "legal": _SWARM_KEYS,
    "illicit": _SWARM_KEYS,
    "econ": _ECON_KEYS,
    "run": {
        "horizon": (float, 40.0),
        "dt": (float, 0.01),
        "recording_interval": (float, 0.1),
        "y_floor": (float, 1.0),
    },
    "initial": {f.name: (float, 0.0) for f in fields(MarketState)},
}
_DEMAND_KEYS = {BASS: ("p_innov", "q_imit", "market_size"), CONSTANT: ("rate", "total")}


def _line_of(text, section, key=None):
    lines = text.splitlines()
    in_sec = False
    for i, raw in enumerate(lines, 1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            in_sec = s[1:-1].strip() == section
            if in_sec and key is None:
                return i
            continue
        if in_sec and key is not None:
            k = s.split("=", 1)[0].split(":", 1)[0].strip()
            if k == key:
                return i
    return None


def _where(text, section, key=None):
    line = _line_of(text, section, key)
    loc = f"[{section}]" + (f" {key}" if key else "")
    return f"{loc} (line {line})" if line else loc


def _convert(text, section, key, typ, raw):
    try:
        if typ is float:
            return float(raw)
        if typ is bool:
            low = raw.strip().lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        return raw.strip()
    except ValueError:
        raise ConfigError(
            f"{_where(text, section, key)}: cannot parse {raw!r} as {typ.__name__}"
        ) from None


def parse_scenario(text: str) -> Scenario:
    """Build and validate a Scenario from config-file text."""
    cp = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#", ";"), default_section="__none__"
    )
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"parse error: {exc}") from None
    for sec in cp.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section {_where(text, sec)}")
    values = {}
    for sec, schema in _SCHEMA.items():
        got = dict(cp[sec]) if cp.has_section(sec) else {}
        for key in got:
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in {_where(text, sec, key)}")
        vals = {}
        for key, (typ, default) in schema.items():
            if key in got:
                vals[key] = _convert(text, sec, key, typ, got[key])
            elif default is _REQ:
                raise ConfigError(f"missing required key {key!r} in [{sec}]")
            elif default is not None:
                vals[key] = default
        values[sec] = vals

    dem = values["demand"]
    kind = dem.pop("kind")
    if kind not in _DEMAND_KEYS:
        raise ConfigError(f"{_where(text, 'demand', 'kind')}: unknown demand kind {kind!r}")
    for key in dem:
        if key not in _DEMAND_KEYS[kind]:
            raise ConfigError(f"{_where(text, 'demand', key)}: not valid for {kind} demand")

    def build(sec, fn, **kw):
        try:
            return fn(**kw)
        except ValidationError as exc:
            raise ValidationError(f"[{sec}] {exc}") from None

    if kind == BASS:
        for key in _DEMAND_KEYS[BASS]:
            if key not in dem:
                raise ConfigError(f"missing required key {key!r} in [demand]")
        demand = build("demand", DemandProcess.bass, **dem)
    else:
        if "rate" not in dem:
            raise ConfigError("missing required key 'rate' in [demand]")
        demand = build("demand", DemandProcess.constant, **dem)
    legal = build("legal", SwarmParams, **values["legal"])
    illicit = build("illicit", SwarmParams, **values["illicit"])
    econ = build("econ", EconParams, **values["econ"])
    initial = MarketState(**values["initial"])
    return build(
        "run",
        Scenario,
        demand=demand,
        legal=legal,
        illicit=illicit,
        econ=econ,
        initial_state=initial,
        **values["run"],
    )


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc}") from None
    return parse_scenario(text)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(float(v))
    return str(v)


def scenario_text(scn: Scenario) -> str:
    """Serialize ``scn`` so that ``parse_scenario`` reproduces it exactly."""
    out = ["[demand]", f"kind = {scn.demand.kind}"]
    if scn.demand.kind == BASS:
        for k, v in asdict(scn.demand.params).items():
            out.append(f"{k} = {_fmt(float(v))}")
    else:
        out.append(f"rate = {_fmt(float(scn.demand.rate))}")
        out.append(f"total = {_fmt(float(scn.demand.total))}")
    for name in ("legal", "illicit", "econ"):
        out += ["", f"[{name}]"]
        for k, v in asdict(getattr(scn, name)).items():
            out.append(f"{k} = {_fmt(v)}")
    out += ["", "[run]"]
    for k in ("horizon", "dt", "recording_interval", "y_floor"):
        out.append(f"{k} = {_fmt(float(getattr(scn, k)))}")
    out += ["", "[initial]"]
    for k, v in asdict(scn.initial_state).items():
        out.append(f"{k} = {_fmt(float(v))}")
    return "\n".join(out) + "\n"


def dump_scenario(scn: Scenario, path) -> None:
    atomic_write_text(path, scenario_text(scn))


def default_scenario_text() -> str:
    return resources.files("revshare").joinpath("data/default.cfg").read_text()


def default_scenario() -> Scenario:
    """The shipped competitive efficient-Bass scenario."""
    return parse_scenario(default_scenario_text())


# --- scaling map and regimes ---------------------------------------------------


def scale_scenario(scn: Scenario, market_size: float) -> Scenario:
    """Rescale extensive parameters to a new market size.

    Market size, server capacity and the seed floor scale linearly; for a
    constant process the rate and the arrival cap scale too.  Rates, prices
    and the initial state are left unchanged, so a fixed initial leak of
    illicit seeds becomes relatively smaller in larger markets.
    """
    m0 = scn.market_size
    if not math.isfinite(m0):
        raise ValidationError("cannot scale a scenario with unbounded demand")
    c = market_size / m0
    d = scn.demand
    if d.kind == BASS:
        demand = DemandProcess.bass(d.params.p_innov, d.params.q_imit, market_size)
    else:
        demand = DemandProcess.constant(d.rate * c, market_size)
    return replace(
        scn,
        demand=demand,
        legal=replace(scn.legal, server_capacity=scn.legal.server_capacity * c),
        y_floor=scn.y_floor * c,
    )


def parse_regime(regime: str) -> tuple[str, str]:
    if regime not in REGIMES:
        raise ValueError(f"unknown regime {regime!r}; expected one of {', '.join(REGIMES)}")
    mode, kind = regime.split("-")
    return mode, kind


def regime_scenario(template: Scenario, regime: str, market_size: float) -> Scenario:
    """Template with both swarms in the regime's efficiency mode and demand kind,
    scaled to ``market_size``.

    A constant regime built from a Bass template spreads the market evenly over
    twice the Bass peak time: ``rate = M / (2 * peak_time)``, capped at ``M``.
    """
    mode, kind = parse_regime(regime)
    scn = replace(
        template,
        legal=replace(template.legal, efficiency_mode=mode),
        illicit=replace(template.illicit, efficiency_mode=mode),
    )
    d = scn.demand
    if kind == CONSTANT and d.kind == BASS:
        m = d.params.market_size
        scn = replace(scn, demand=DemandProcess.constant(m / (2 * peak_time(d.params)), m))
    elif kind == BASS and d.kind == CONSTANT:
        raise ValidationError("a bass regime needs a bass template scenario")
    return scale_scenario(scn, market_size)


__all__ = [
    "REGIMES",
    "Scenario",
    "default_scenario",
    "dump_scenario",
    "load_scenario",
    "parse_scenario",
    "regime_scenario",
    "scale_scenario",
    "scenario_text",
    "EFFICIENT",
    "INEFFICIENT",
]
