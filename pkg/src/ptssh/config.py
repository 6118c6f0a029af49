"""Experiment configuration: file format, validation, and round-tripping.

Configs are flat key-value text with one section per concern.  All floats
are serialized with ``repr``, the shortest representation that round-trips
double precision, so parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field, fields

from .lattice import HybridChainSpec
from .scatter import PotentialStack

COMMANDS = ("spectrum", "edge-states", "band-sweep", "quench", "scatter-sweep")

# preset that chains the other experiments into one output tree
PRESET_COMMAND = "full-suite"
EMIT_FORMATS = ("csv", "json", "svg")
OUTPUT_DIR_ENV = "PTSSH_OUT_DIR"


class ConfigError(ValueError):
    """Invalid configuration file or parameter set."""


@dataclass
class BandGrid:
    v_min: float = 0.0
    v_max: float = 0.8
    v_step: float = 0.05

    def __post_init__(self):
        if self.v_step <= 0:
            raise ConfigError(f"v_step must be > 0, got {self.v_step}")
        if self.v_max < self.v_min:
            raise ConfigError("v_max must be >= v_min")

    def values(self) -> list[float]:
        n = round((self.v_max - self.v_min) / self.v_step) + 1
        return [round(self.v_min + i * self.v_step, 12) for i in range(n)]


@dataclass
class EnergyGrid:
    e_min: float = 0.02
    e_max: float = 5.0
    e_count: int = 400

    def __post_init__(self):
        if not (0 < self.e_min < self.e_max):
            raise ConfigError("need 0 < e_min < e_max")
        if self.e_count < 2:
            raise ConfigError("e_count must be >= 2")


@dataclass
class QuenchParams:
    v_post: float = 0.5
    initial_side: str = "both"
    t_max: float = 0.0
    n_time_steps: int = 600

    def __post_init__(self):
        if self.initial_side not in ("left", "right", "both"):
            raise ConfigError(
                f"initial_side must be left, right, or both, got {self.initial_side!r}"
            )


@dataclass
class EdgeParams:
    energy_tol: float = 1e-6
    n_edge: int = 10


@dataclass
class ScatterParams:
    n_blocks: int = 10
    l_a: float = 6.0
    l_b: float = 10.0
    u_re: float = -0.3
    u_im: float = 0.1

    def stack(self) -> PotentialStack:
        return PotentialStack.alternating(
            n_blocks=self.n_blocks, l_a=self.l_a, l_b=self.l_b,
            u_re=self.u_re, u_im=self.u_im,
        )


@dataclass
class ExperimentConfig:
    command: str
    chain: HybridChainSpec | None = None
    band_grid: BandGrid = field(default_factory=BandGrid)
    quench: QuenchParams = field(default_factory=QuenchParams)
    edge: EdgeParams = field(default_factory=EdgeParams)
    scatter: ScatterParams = field(default_factory=ScatterParams)
    energy_grid: EnergyGrid = field(default_factory=EnergyGrid)
    output_dir: str = "out"
    emit: tuple[str, ...] = ("csv", "json", "svg")
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS + (PRESET_COMMAND,):
            raise ConfigError(f"unknown command {self.command!r}; choose from "
                              f"{COMMANDS + (PRESET_COMMAND,)}")
        bad = [f for f in self.emit if f not in EMIT_FORMATS]
        if bad or not self.emit:
            raise ConfigError(f"emit must be a nonempty subset of {EMIT_FORMATS}")
        if self.command != "scatter-sweep" and self.chain is None:
            raise ConfigError(f"command {self.command!r} requires a [chain] section")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def resolve_output_dir(self, cli_out: str | None = None) -> str:
        """Output directory precedence: CLI flag, env var, config, default."""
        if cli_out:
            return cli_out
        env = os.environ.get(OUTPUT_DIR_ENV, "").strip()
        if env:
            return env
        return self.output_dir


def _coerce(raw: str, kind: type):
    if kind is bool:
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean from {raw!r}")
    return kind(raw)


def _fill_dataclass(cls, section: configparser.SectionProxy, label: str):
    kwargs = {}
    known = {f.name: f.type for f in fields(cls)}
    for key, raw in section.items():
        if key not in known:
            raise ConfigError(f"unknown key {key!r} in [{label}]")
        ann = known[key]
        kind = {"int": int, "float": float, "str": str, "bool": bool}.get(str(ann), str)
        try:
            kwargs[key] = _coerce(raw, kind)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r} in [{label}]: {raw!r}") from exc
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid [{label}] section: {exc}") from exc


def _chain_from_section(section: configparser.SectionProxy) -> HybridChainSpec:
    kinds = {"n_sites": int, "v": float, "w": float, "u_re": float,
             "u_im": float, "pt_first_site": int, "pt_last_site": int}
    kwargs = {}
    for key, raw in section.items():
        if key not in kinds:
            raise ConfigError(f"unknown key {key!r} in [chain]")
        try:
            kwargs[key] = _coerce(raw, kinds[key])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key!r} in [chain]: {raw!r}") from exc
    missing = {"n_sites", "v", "w"} - set(kwargs)
    if missing:
        raise ConfigError(f"[chain] is missing required keys: {sorted(missing)}")
    try:
        return HybridChainSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"invalid [chain] section: {exc}") from exc


def parse_config(text_or_path: str, command: str | None = None,
                 from_path: bool = True) -> ExperimentConfig:
    """Parse a config file (or literal text) into an ExperimentConfig.

    ``command`` overrides any command stored in the file, so the CLI
    subcommand is authoritative.
    """
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        if from_path:
            with open(text_or_path, "r", encoding="utf-8") as fh:
                parser.read_file(fh)
        else:
            parser.read_string(text_or_path)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    known = ("experiment", "chain", "band_sweep", "quench", "edge_states",
             "scatter", "energy_grid", "output")
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}]")
    for key in parser["experiment"] if parser.has_section("experiment") else ():
        if key != "command":
            raise ConfigError(f"unknown key {key!r} in [experiment]")

    if command is None:
        if not parser.has_option("experiment", "command"):
            raise ConfigError("no command given and none found in [experiment]")
        command = parser.get("experiment", "command")

    kwargs = {"command": command}
    if parser.has_section("chain"):
        kwargs["chain"] = _chain_from_section(parser["chain"])
    if parser.has_section("band_sweep"):
        kwargs["band_grid"] = _fill_dataclass(BandGrid, parser["band_sweep"], "band_sweep")
    if parser.has_section("quench"):
        kwargs["quench"] = _fill_dataclass(QuenchParams, parser["quench"], "quench")
    if parser.has_section("edge_states"):
        kwargs["edge"] = _fill_dataclass(EdgeParams, parser["edge_states"], "edge_states")
    if parser.has_section("scatter"):
        kwargs["scatter"] = _fill_dataclass(ScatterParams, parser["scatter"], "scatter")
    if parser.has_section("energy_grid"):
        kwargs["energy_grid"] = _fill_dataclass(EnergyGrid, parser["energy_grid"], "energy_grid")
    if parser.has_section("output"):
        out = parser["output"]
        for key in out:
            if key == "output_dir":
                kwargs["output_dir"] = out[key]
            elif key == "emit":
                parts = tuple(p.strip() for p in out[key].split(",") if p.strip())
                kwargs["emit"] = parts
            elif key == "threads":
                kwargs["threads"] = _coerce(out[key], int)
            else:
                raise ConfigError(f"unknown key {key!r} in [output]")
    return ExperimentConfig(**kwargs)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(config: ExperimentConfig) -> str:
    """Render a config back to its file format, bit-exactly re-parseable."""
    out = io.StringIO()

    def section(name: str, pairs):
        out.write(f"[{name}]\n")
        for key, value in pairs:
            out.write(f"{key} = {_format_value(value)}\n")
        out.write("\n")

    section("experiment", [("command", config.command)])
    if config.chain is not None:
        c = config.chain
        section("chain", [(f.name, getattr(c, f.name)) for f in fields(c)])
    section("band_sweep", [(f.name, getattr(config.band_grid, f.name))
                           for f in fields(config.band_grid)])
    section("quench", [(f.name, getattr(config.quench, f.name))
                       for f in fields(config.quench)])
    section("edge_states", [(f.name, getattr(config.edge, f.name))
                            for f in fields(config.edge)])
    section("scatter", [(f.name, getattr(config.scatter, f.name))
                        for f in fields(config.scatter)])
    section("energy_grid", [(f.name, getattr(config.energy_grid, f.name))
                            for f in fields(config.energy_grid)])
    section("output", [("output_dir", config.output_dir),
                       ("emit", ",".join(config.emit)),
                       ("threads", config.threads)])
    return out.getvalue()
