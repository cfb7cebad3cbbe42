"""Scenario files: flat ``key = value`` text with one section per concern.

Example::

    [scenario]
    name = ellipse-gage-hamilton

    [geometry]
    shape = ellipse
    a = 2
    b = 1
    N = 256

    [flow]
    t_end = 5

    [analysis]
    horizon = 0.8

Sections and keys are fixed; anything unknown is rejected with its line
number. Point lists are written ``x y; x y; ...`` and Fourier coefficients
``k a [b]; ...``.
"""

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import GeometryError, ScenarioError
from .flow import FlowConfig, initial_state
from .geometry import build
from .geometry.build import _PARAMS, SHAPES, _normalize

F0_CHOICES = ("H", "support")

_FLOW_KEYS = {
    "t_end": float, "c_stab": float, "c_diff": float, "step_safety": float,
    "H_cap": float, "H_cap_factor": float, "remesh": bool, "remesh_ratio": float,
    "snapshot_dt": float, "snapshot_H_ratio": float, "check_simple": bool, "max_steps": int,
}
_ANALYSIS_KEYS = {
    "interior": bool, "exterior": bool, "enclosure": bool, "pinching": bool, "radii": bool,
    "pruned": bool, "slack": float, "horizon": float, "f0": str, "delta_grid": "floats",
    "svg": bool, "svg_every": int, "snapshots": bool,
}
_VERIFY_KEYS = {"suite": str, "tolerance_scale": float}
_SCENARIO_KEYS = {"name": str, "output": str}
_GEOMETRY_COMMON = {"shape": str, "N": int, "M": int}

SECTIONS = ("scenario", "geometry", "flow", "analysis", "verify")


@dataclass
class Scenario:
    name: str
    geometry: dict
    t_end: float
    flow: dict = field(default_factory=dict)
    interior: bool = True
    exterior: bool = True
    enclosure: bool = True
    pinching: bool = True
    radii: bool = True
    pruned: bool = True
    slack: float = 1e-3
    horizon: float = 1.0
    f0: Optional[str] = None
    delta_grid: tuple = ()
    svg: bool = True
    svg_every: int = 1
    snapshots: bool = True
    suite: Optional[str] = None
    tolerance_scale: float = 1.0
    output: Optional[str] = None
    source: Optional[str] = None

    def __post_init__(self):
        if not self.t_end >= 0:
            raise ScenarioError("t_end must be >= 0", key="flow.t_end", source=self.source)
        if not 0 < self.horizon <= 1:
            raise ScenarioError("horizon must lie in (0, 1]", key="analysis.horizon", source=self.source)
        if not self.slack >= 0:
            raise ScenarioError("slack must be >= 0", key="analysis.slack", source=self.source)
        if self.svg_every < 1:
            raise ScenarioError("svg_every must be >= 1", key="analysis.svg_every", source=self.source)
        if not self.tolerance_scale > 0:
            raise ScenarioError("tolerance_scale must be positive", key="verify.tolerance_scale",
                                source=self.source)
        if self.f0 is not None and self.f0 not in F0_CHOICES and not self.f0.startswith("constant:"):
            raise ScenarioError(f"f0 must be one of {', '.join(F0_CHOICES)} or constant:<c>",
                                key="analysis.f0", source=self.source)
        try:
            self.flow_config()
        except ValueError as exc:
            raise ScenarioError(str(exc), key="flow", source=self.source) from None

    @property
    def f_mode(self):
        return self.f0 is not None

    def flow_config(self):
        return FlowConfig(**self.flow)

    def build_geometry(self):
        return build(self.geometry)

    def initial_f(self, geometry):
        if self.f0 is None:
            return None
        F = geometry.fields()
        if self.f0 == "H":
            return F.H.copy()
        if self.f0 == "support":
            X = geometry.profile if geometry.kind == "axisym" else geometry.vertices
            return np.einsum("ij,ij->i", X, F.normal)
        c = float(self.f0.split(":", 1)[1])
        return np.full(geometry.N, c)

    def initial_state(self):
        g = self.build_geometry()
        return initial_state(g, self.initial_f(g))


def _locate(text, section, key=None):
    """Line number (1-based) of a section header or of a key inside a section."""
    current = None
    for n, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return n
            continue
        if key is not None and current == section and s and s[0] not in "#;":
            k = re.split(r"[=:]", s, maxsplit=1)[0].strip()
            if k == key:
                return n
    return None


def _convert(kind, raw):
    raw = raw.strip()
    if kind is bool:
        low = raw.lower()
        if low in ("true", "yes", "on", "1"):
            return True
        if low in ("false", "no", "off", "0"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind == "floats":
        return tuple(float(v) for v in re.split(r"[,\s]+", raw) if v)
    if kind is str:
        return raw
    if raw.lower() in ("none", ""):
        return None
    if kind is int:
        v = float(raw)
        if not v.is_integer():
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(v)
    return kind(raw)


def _rows(raw, width):
    rows = []
    for part in raw.split(";"):
        vals = [float(v) for v in part.replace(",", " ").split()]
        if not vals:
            continue
        if len(vals) not in width:
            raise ValueError(f"expected {' or '.join(map(str, width))} numbers per entry, got {part.strip()!r}")
        rows.append(tuple(vals))
    if not rows:
        raise ValueError("empty list")
    return rows


def _geometry(section, text, source):
    out = {}
    shape = section.get("shape")
    if shape is None:
        raise ScenarioError("missing key", line=_locate(text, "geometry"), key="geometry.shape",
                            source=source)
    shape = shape.strip()
    if shape not in SHAPES:
        raise ScenarioError(f"unknown shape {shape!r}; expected one of {', '.join(SHAPES)}",
                            line=_locate(text, "geometry", "shape"), key="geometry.shape", source=source)
    allowed = set(_GEOMETRY_COMMON) | set(_PARAMS[shape])
    for key, raw in section.items():
        line = _locate(text, "geometry", key)
        if key not in allowed:
            raise ScenarioError(f"unknown key for shape {shape!r} (allowed: {', '.join(sorted(allowed))})",
                                line=line, key=f"geometry.{key}", source=source)
        try:
            if key == "shape":
                continue
            if key in ("N", "M"):
                v = _convert(int, raw)
                if v is None or v < 3:
                    raise ValueError("must be an integer >= 3")
            elif key == "points":
                v = _rows(raw, (2,))
            elif key == "coefficients":
                v = tuple((int(r[0]),) + r[1:] for r in _rows(raw, (2, 3)))
            elif key == "topology":
                v = raw.strip()
                if v not in ("sphere", "torus"):
                    raise ValueError("topology must be sphere or torus")
            else:
                v = float(raw)
                if key in ("R", "a", "b", "c", "R0", "r0") and not v > 0:
                    raise ValueError("must be positive")
        except ValueError as exc:
            raise ScenarioError(str(exc), line=line, key=f"geometry.{key}", source=source) from None
        out[key] = v
    out["shape"] = shape
    try:
        _normalize(out, {})
    except GeometryError as exc:
        raise ScenarioError(str(exc), line=_locate(text, "geometry"), key="geometry",
                            source=source) from None
    return out


def _section(parser, name, keys, text, source):
    out = {}
    if not parser.has_section(name):
        return out
    for key, raw in parser.items(name):
        line = _locate(text, name, key)
        if key not in keys:
            raise ScenarioError(f"unknown key (allowed: {', '.join(sorted(keys))})",
                                line=line, key=f"{name}.{key}", source=source)
        try:
            out[key] = _convert(keys[key], raw)
        except ValueError as exc:
            raise ScenarioError(str(exc), line=line, key=f"{name}.{key}", source=source) from None
    return out


def parse_scenario(text, source=None):
    """Parse scenario text; every error names the line and key involved."""
    parser = configparser.ConfigParser(strict=True, interpolation=None,
                                       inline_comment_prefixes=("#", ";"), default_section="\0")
    parser.optionxform = str
    try:
        parser.read_string(text, source=source or "<scenario>")
    except configparser.DuplicateOptionError as exc:
        raise ScenarioError("duplicate key", line=exc.lineno, key=f"{exc.section}.{exc.option}",
                            source=source) from None
    except configparser.DuplicateSectionError as exc:
        raise ScenarioError("duplicate section", line=exc.lineno, key=exc.section, source=source) from None
    except configparser.MissingSectionHeaderError as exc:
        raise ScenarioError("content before the first [section]", line=exc.lineno, source=source) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ScenarioError("malformed line (expected key = value)", line=line, source=source) from None
    for name in parser.sections():
        if name not in SECTIONS:
            raise ScenarioError(f"unknown section (allowed: {', '.join(SECTIONS)})",
                                line=_locate(text, name), key=name, source=source)
    if not parser.has_section("geometry"):
        raise ScenarioError("missing [geometry] section", source=source)
    geometry = _geometry(dict(parser.items("geometry")), text, source)
    head = _section(parser, "scenario", _SCENARIO_KEYS, text, source)
    flow = _section(parser, "flow", _FLOW_KEYS, text, source)
    analysis = _section(parser, "analysis", _ANALYSIS_KEYS, text, source)
    verify = _section(parser, "verify", _VERIFY_KEYS, text, source)
    if "t_end" not in flow or flow["t_end"] is None:
        raise ScenarioError("missing key", line=_locate(text, "flow"), key="flow.t_end", source=source)
    t_end = flow.pop("t_end")
    suite = verify.get("suite")
    if suite is not None and suite.lower() == "none":
        suite = None
    name = head.get("name") or (Path(source).stem if source else "scenario")
    return Scenario(name=name, geometry=geometry, t_end=t_end, flow=flow, suite=suite,
                    tolerance_scale=verify.get("tolerance_scale", 1.0), output=head.get("output"),
                    source=source, **analysis)


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file ({exc.strerror})", source=str(path)) from None
    return parse_scenario(text, source=str(path))
