"""Experiment configuration as sectioned INI text.

Every key has a default, so an empty file is a valid configuration (the
10-dimensional reference quadratic with PCM-SGD). ``to_ini`` writes the fully
resolved configuration, and parsing that output gives back an equal object.
Optional values are written as ``none``.
"""

from __future__ import annotations

import configparser
import dataclasses
import io
import typing
from dataclasses import dataclass, field, fields


@dataclass
class ObjectiveSection:
    kind: str = "quadratic"  # quadratic | l1_quadratic | hinge
    dim: int = 10
    center: float = 0.3
    curvature: float = 1.0
    l1: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    noise: str = "gaussian"  # gaussian | heavy | none
    sigma: float = 0.1
    tail_b: float = 1.5
    noise_scale: float = 0.1
    g_max: float | None = None
    # hinge
    reg: float = 1.2e-2
    data: str = "auto"  # auto | mnist | synth
    data_dir: str | None = None
    digit: int = 0
    limit: int | None = None
    synth_n: int = 2000


@dataclass
class AlgorithmSection:
    name: str = "pcm"  # pcm | scd
    workers: int = 1
    accounting: str = "work"  # work | wallclock
    threads: int = 1


@dataclass
class ScheduleSection:
    eps0: float = 0.5
    gamma: float = 0.95
    mu0: float | None = None  # None: eps0 / (1 - gamma)


@dataclass
class RoutineSection:
    kind: str = "sgd"  # sgd | rwt
    constant_step: bool = False
    termination_scale: float | None = None
    sigma0: float | None = None  # None: largest coordinate noise scale
    p_breve: float = 0.1
    max_depth: int = 48


@dataclass
class ScdSection:
    step: str = "piecewise"  # piecewise | harmonic
    c1: float = 5.0
    c2: float = 10_000.0
    a: float = 1.0
    b: float = 0.0


@dataclass
class RunSection:
    horizon: int = 32_768
    seed: int = 0
    seeds: list[int] = field(default_factory=lambda: list(range(5)))
    horizons: list[int] = field(default_factory=lambda: [4096, 8192, 16384, 32768])
    init: str = "center"  # center | random
    init_lo: float = -0.5
    init_hi: float = 0.5
    compare_scd: bool = False


@dataclass
class OutputSection:
    out_dir: str = "out"
    per_step: bool = True


@dataclass
class Config:
    objective: ObjectiveSection = field(default_factory=ObjectiveSection)
    algorithm: AlgorithmSection = field(default_factory=AlgorithmSection)
    schedule: ScheduleSection = field(default_factory=ScheduleSection)
    routine: RoutineSection = field(default_factory=RoutineSection)
    scd: ScdSection = field(default_factory=ScdSection)
    run: RunSection = field(default_factory=RunSection)
    output: OutputSection = field(default_factory=OutputSection)


class ConfigError(ValueError):
    pass


def classification_defaults() -> Config:
    """Hyperparameters of the one-vs-rest hinge-loss experiment."""
    return Config(
        objective=ObjectiveSection(kind="hinge", reg=1.2e-2, digit=0, noise="none"),
        algorithm=AlgorithmSection(name="pcm"),
        schedule=ScheduleSection(eps0=0.1, gamma=0.99999, mu0=0.2),
        routine=RoutineSection(kind="sgd", constant_step=True, termination_scale=0.5),
        scd=ScdSection(step="piecewise", c1=5.0, c2=10_000.0),
        run=RunSection(horizon=785_000, seeds=list(range(10)), init="random", compare_scd=True),
        output=OutputSection(out_dir="out-classification", per_step=False),
    )


def _render(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ", ".join(_render(x) for x in v)
    return str(v)


def _convert(text: str, tp, where: str):
    text = text.strip()
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if args and type(None) in args:
        if text.lower() in ("none", ""):
            return None
        tp = next(a for a in args if a is not type(None))
        origin, args = typing.get_origin(tp), typing.get_args(tp)
    try:
        if origin is list:
            return [_convert(p, args[0], where) for p in text.split(",") if p.strip()]
        if tp is bool:
            low = text.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(text)
        if tp is int:
            return int(text)
        if tp is float:
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{where}: cannot read {text!r} as {getattr(tp, '__name__', tp)}") from None


def _hints(cls):
    return typing.get_type_hints(cls)


def update(cfg: Config, text: str) -> Config:
    """Overlay INI ``text`` on ``cfg`` (returns a new object)."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    cfg = dataclasses.replace(cfg, **{f.name: dataclasses.replace(getattr(cfg, f.name)) for f in fields(cfg)})
    sections = {f.name: f for f in fields(cfg)}
    for name in parser.sections():
        if name not in sections:
            raise ConfigError(f"unknown section [{name}]")
        sec = getattr(cfg, name)
        hints = _hints(type(sec))
        for key, raw in parser.items(name):
            if key not in hints:
                raise ConfigError(f"unknown key {key!r} in [{name}]")
            setattr(sec, key, _convert(raw, hints[key], f"[{name}] {key}"))
    return cfg


def parse(text: str, base: Config | None = None) -> Config:
    return update(base if base is not None else Config(), text)


def load(path, base: Config | None = None) -> Config:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), base)


def to_ini(cfg: Config) -> str:
    out = io.StringIO()
    for f in fields(cfg):
        sec = getattr(cfg, f.name)
        out.write(f"[{f.name}]\n")
        for sf in fields(sec):
            out.write(f"{sf.name} = {_render(getattr(sec, sf.name))}\n")
        out.write("\n")
    return out.getvalue()
