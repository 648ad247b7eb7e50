"""INI configuration for the command-line front end.

Sections and keys (units in brackets)::

    [turbulence]
    preset = p1            ; optional, fills alpha and beta
    alpha = 2.296
    beta = 2
    rho = 0.596
    omega = 1.3265
    b0 = 0.1079
    phase = 1.5707963      ; [rad]

    [pointing]
    xi = 1                 ; "inf" for no pointing error
    A0 = 1
    aperture_radius = 0.1  ; [m], with beam_waist replaces A0
    beam_waist = 2.5       ; [m]

    [detection]
    mode = imdd            ; het | imdd (or r = 1 | 2)
    I_l = 1

    [geometry]             ; optional, only reported
    length = 1000          ; [m]
    wavelength = 785e-9    ; [m]
    cn2 = 1.2e-13          ; [m^-2/3]
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .channel import (PRESETS, DetectionMode, LinkGeometry, MalagaParams, PointingError)

__all__ = ["ConfigError", "LinkConfig", "load_config", "parse_mode"]

KNOWN = {
    "turbulence": {"preset", "alpha", "beta", "rho", "omega", "b0", "phase"},
    "pointing": {"xi", "a0", "aperture_radius", "beam_waist"},
    "detection": {"mode", "r", "i_l"},
    "geometry": {"length", "wavelength", "cn2"},
}


class ConfigError(ValueError):
    pass


def parse_mode(text) -> DetectionMode:
    t = str(text).strip().lower()
    if t in ("het", "heterodyne", "1"):
        return DetectionMode.HETERODYNE
    if t in ("imdd", "im/dd", "2"):
        return DetectionMode.IMDD
    raise ValueError(f"unknown detection mode {text!r} (use het or imdd)")


@dataclass
class LinkConfig:
    """Channel settings gathered from a config file and command-line flags."""

    alpha: float = 2.296
    beta: int = 2
    rho: float = 0.596
    omega: float = 1.3265
    b0: float = 0.1079
    phase: float = math.pi / 2
    xi: float = 1.0
    A0: float = 1.0
    aperture_radius: Optional[float] = None
    beam_waist: Optional[float] = None
    mode: DetectionMode = DetectionMode.IMDD
    I_l: float = 1.0
    geometry: Optional[LinkGeometry] = None
    preset: Optional[str] = None
    sources: dict = field(default_factory=dict)

    def params(self) -> MalagaParams:
        return MalagaParams(self.alpha, self.beta, self.rho, self.omega, self.b0, self.phase)

    def pointing(self) -> PointingError:
        if self.aperture_radius is not None and self.beam_waist is not None:
            return PointingError.from_geometry(self.xi, self.aperture_radius, self.beam_waist)
        return PointingError(self.xi, self.A0)

    def apply_preset(self, name: str) -> None:
        key = name.lower()
        if key not in PRESETS:
            raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        self.alpha, self.beta = PRESETS[key]
        self.preset = key


def _line_of(text: str, section: str, key: str) -> int:
    """Line number of ``key`` inside ``[section]`` (0 if not found)."""
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]", s)
        if m:
            cur = m.group(1).strip().lower()
            continue
        if cur == section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return i
    return 0


def load_config(path, base: Optional[LinkConfig] = None) -> LinkConfig:
    """Read an INI file into a :class:`LinkConfig`.

    Errors name the file, line, section and key.
    """
    cfg = base or LinkConfig()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    def fail(section, key, msg):
        line = _line_of(text, section, key)
        where = f"{path}:{line}" if line else str(path)
        raise ConfigError(f"{where}: [{section}] {key}: {msg}")

    for section in cp.sections():
        sec = section.lower()
        if sec not in KNOWN:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key in cp[section]:
            if key not in KNOWN[sec]:
                fail(sec, key, "unknown key")

    def num(section, key, cast=float):
        raw = cp[section][key]
        try:
            v = cast(raw)
        except ValueError:
            fail(section, key, f"expected a number, got {raw!r}")
        cfg.sources[f"{section}.{key}"] = str(path)
        return v

    def has(section, key):
        return cp.has_section(section) and cp.has_option(section, key)

    if has("turbulence", "preset"):
        try:
            cfg.apply_preset(cp["turbulence"]["preset"])
        except ValueError as exc:
            fail("turbulence", "preset", str(exc))
    for key in ("alpha", "rho", "omega", "b0", "phase"):
        if has("turbulence", key):
            setattr(cfg, key, num("turbulence", key))
    if has("turbulence", "beta"):
        b = num("turbulence", "beta")
        if b != int(b) or b < 1:
            fail("turbulence", "beta", "must be a natural number")
        cfg.beta = int(b)
    if has("pointing", "xi"):
        cfg.xi = num("pointing", "xi")
    if has("pointing", "a0"):
        cfg.A0 = num("pointing", "a0")
    for key in ("aperture_radius", "beam_waist"):
        if has("pointing", key):
            setattr(cfg, key, num("pointing", key))
    for key in ("mode", "r"):
        if has("detection", key):
            try:
                cfg.mode = parse_mode(cp["detection"][key])
            except ValueError as exc:
                fail("detection", key, str(exc))
    if has("detection", "i_l"):
        cfg.I_l = num("detection", "i_l")
    if cp.has_section("geometry"):
        vals = {}
        for key in ("length", "wavelength", "cn2"):
            if not has("geometry", key):
                fail("geometry", key, "missing")
            vals[key] = num("geometry", key)
        try:
            cfg.geometry = LinkGeometry(vals["length"], vals["wavelength"], vals["cn2"])
        except ValueError as exc:
            fail("geometry", "length", str(exc))
    return cfg
