"""JSON experiment configuration.

Example::

    {
      "net": {"uniform": {"N": 2, "M": 2}, "domain": [[0, 1], [0, 1]]},
      "surface": "alpha",
      "f": {"builtin": "sinsin"},
      "L": {"kind": "multiplication", "t": "1 + x*(1-x)*y*(1-y)"},
      "alpha": 0.3,
      "solver": {"grid_res": 257, "tol": 1e-10},
      "analysis": {"bounds": true, "lp": [1, 2]},
      "output": {"dir": "out", "formats": ["csv", "pgm", "obj"]}
    }

``net`` may instead give explicit knots ``{"xs": [...], "ys": [...]}``.
``f`` is ``{"builtin": name}``, ``{"expr": "..."}`` or ``{"file": "field.csv"}``.
``L`` kinds: ``multiplication`` (``t``), ``composition`` (``map``: two
expressions) and ``bernstein`` (``m``, ``n``).  ``alpha`` is a number or an
expression.  A bilinear surface replaces ``f``/``L``/``alpha`` by
``"bilinear": {"z": [[...]], "s": 0.5}`` with ``z[i][j]`` at ``(x_i, y_j)``.
Relative file paths are resolved against the config file's directory.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .bilinear import BilinearData
from .errors import FractalSurfError, IoError, ParseError, ValidationError
from .expressions import Expression, ExpressionError
from .io import FORMATS, load_csv
from .net import Net, build_net, uniform_net
from .operators import (PerturbOperator, ScaleFunction, bernstein_operator, composition_operator,
                        multiplication_operator, scale_function)

BUILTINS = {
    "sinsin": "sin(pi*x)*sin(pi*y)",
    "cosprod": "cos(pi*x)*cos(pi*y)",
    "gaussian": "exp(-((x-0.5)^2 + (y-0.5)^2)/0.1)",
    "peaks": "x*y*(1-x)*(1-y)*16",
    "plane": "x + y",
}

SOLVER_DEFAULTS = {"grid_res": 257, "tol": 1e-10, "max_iter": None, "engine": "grid"}


@dataclass
class ExperimentConfig:
    net: Net
    surface: str
    solver: dict
    analysis: dict
    output: dict
    f: Optional[Callable] = None
    f_spec: Any = None
    operator: Optional[PerturbOperator] = None
    alpha: Optional[ScaleFunction] = None
    alpha_spec: Any = None
    bilinear: Optional[BilinearData] = None
    base_dir: Path = field(default_factory=Path.cwd)
    raw: dict = field(default_factory=dict)

    def build(self):
        """Construct the configured surface."""
        from .alpha import build_alpha_surface
        from .bilinear import build_bilinear_fis

        s = self.solver
        if self.surface == "bilinear":
            return build_bilinear_fis(self.bilinear, self.net, grid_res=s["grid_res"], tol=s["tol"],
                                      max_iter=s["max_iter"], engine=s["engine"])
        return build_alpha_surface(self.f, self.operator, self.alpha, self.net, grid_res=s["grid_res"],
                                   tol=s["tol"], max_iter=s["max_iter"], engine=s["engine"])

    def describe(self) -> dict:
        out = {"surface": self.surface, "net": {"xs": list(self.net.xs), "ys": list(self.net.ys)},
               "solver": dict(self.solver)}
        if self.surface == "alpha":
            out.update(f=self.f_spec, L=self.operator.describe(), alpha=self.alpha_spec,
                       alpha_norm=self.alpha.sup_norm)
        return out


def _require(mapping, key, path):
    if not isinstance(mapping, dict):
        raise ValidationError("expected an object", path)
    if key not in mapping:
        raise ValidationError(f"missing required key {key!r}", path)
    return mapping[key]


def _number(value, path, integer=False, positive=False):
    ok = isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)
    if ok and integer:
        ok = float(value).is_integer()
    if not ok:
        raise ValidationError(f"expected {'an integer' if integer else 'a number'}, got {value!r}", path)
    if positive and value <= 0:
        raise ValidationError(f"must be positive, got {value!r}", path)
    return int(value) if integer else float(value)


def _expr(value, path) -> Expression:
    try:
        return Expression(value)
    except ExpressionError as exc:
        raise ValidationError(str(exc), path) from None


def _domain(spec, path):
    if spec is None:
        return ((0.0, 1.0), (0.0, 1.0))
    try:
        (x0, x1), (y0, y1) = spec
        dom = ((float(x0), float(x1)), (float(y0), float(y1)))
    except (TypeError, ValueError):
        raise ValidationError("domain must be [[x0, x1], [y0, y1]]", path) from None
    if not (dom[0][0] < dom[0][1] and dom[1][0] < dom[1][1]):
        raise ValidationError("domain intervals must be increasing", path)
    return dom


def _net(spec) -> Net:
    if not isinstance(spec, dict):
        raise ValidationError("expected an object with 'uniform' or 'xs'/'ys'", "net")
    try:
        if "uniform" in spec:
            u = spec["uniform"]
            N = _number(_require(u, "N", "net.uniform"), "net.uniform.N", integer=True)
            M = _number(u.get("M", N), "net.uniform.M", integer=True)
            return uniform_net(N, M, _domain(spec.get("domain"), "net.domain"))
        if "xs" not in spec or "ys" not in spec:
            raise ValidationError("give either 'uniform' or both knot lists 'xs' and 'ys'", "net")
        return build_net(spec["xs"], spec["ys"])
    except ValidationError:
        raise
    except (FractalSurfError, TypeError, ValueError) as exc:
        raise ValidationError(str(exc), "net") from None


def _f(spec, base: Path, net: Net):
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValidationError("expected exactly one of 'builtin', 'expr', 'file'", "f")
    (kind, value), = spec.items()
    if kind == "builtin":
        if value not in BUILTINS:
            raise ValidationError(f"unknown builtin {value!r}; choose from {sorted(BUILTINS)}", "f.builtin")
        return Expression(BUILTINS[value])
    if kind == "expr":
        return _expr(value, "f.expr")
    if kind == "file":
        try:
            fld = load_csv(base / value)
        except IoError as exc:
            raise ValidationError(str(exc), "f.file") from None
        (x0, x1), (y0, y1) = net.domain
        if fld.xs[0] > x0 or fld.xs[-1] < x1 or fld.ys[0] > y0 or fld.ys[-1] < y1:
            raise ValidationError("sampled field does not cover the net domain", "f.file")
        return fld
    raise ValidationError(f"unknown f kind {kind!r}", "f")


def _operator(spec, net: Net) -> PerturbOperator:
    kind = _require(spec, "kind", "L")
    dom = net.domain
    try:
        if kind == "multiplication":
            return multiplication_operator(_expr(_require(spec, "t", "L"), "L.t"), dom)
        if kind == "composition":
            mp = _require(spec, "map", "L")
            if not isinstance(mp, list) or len(mp) != 2:
                raise ValidationError("expected two expressions", "L.map")
            ex, ey = _expr(mp[0], "L.map[0]"), _expr(mp[1], "L.map[1]")
            return composition_operator(lambda x, y: (ex(x, y), ey(x, y)), dom)
        if kind == "bernstein":
            m = _number(_require(spec, "m", "L"), "L.m", integer=True)
            n = _number(spec.get("n", m), "L.n", integer=True)
            return bernstein_operator(m, n, dom)
    except ValidationError:
        raise
    except FractalSurfError as exc:
        raise ValidationError(str(exc), "L") from None
    raise ValidationError(f"unknown operator kind {kind!r}", "L.kind")


def _alpha(spec, net: Net) -> ScaleFunction:
    value = _expr(spec, "alpha") if isinstance(spec, str) else _number(spec, "alpha")
    try:
        return scale_function(value, net.domain)
    except FractalSurfError as exc:
        raise ValidationError(str(exc), "alpha") from None


def _lattice(value, path, shape):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("expected a number or nested lists of numbers", path) from None
    if arr.ndim == 0:
        arr = np.full(shape, float(arr))
    if arr.shape != shape:
        raise ValidationError(f"expected shape {shape}, got {arr.shape}", path)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("values must be finite", path)
    return arr


def _bilinear(spec, net: Net) -> BilinearData:
    shape = (net.N + 1, net.M + 1)
    z = _lattice(_require(spec, "z", "bilinear"), "bilinear.z", shape)
    s = _lattice(_require(spec, "s", "bilinear"), "bilinear.s", shape)
    if np.any(np.abs(s) >= 1):
        raise ValidationError("scaling values must satisfy |s| < 1", "bilinear.s")
    return BilinearData(z, s)


def _solver(spec) -> dict:
    spec = {} if spec is None else spec
    if not isinstance(spec, dict):
        raise ValidationError("expected an object", "solver")
    unknown = set(spec) - set(SOLVER_DEFAULTS)
    if unknown:
        raise ValidationError(f"unknown keys {sorted(unknown)}", "solver")
    out = {**SOLVER_DEFAULTS, **spec}
    out["grid_res"] = _number(out["grid_res"], "solver.grid_res", integer=True, positive=True)
    if out["grid_res"] < 3:
        raise ValidationError("grid_res must be at least 3", "solver.grid_res")
    out["tol"] = _number(out["tol"], "solver.tol", positive=True)
    if out["max_iter"] is not None:
        out["max_iter"] = _number(out["max_iter"], "solver.max_iter", integer=True, positive=True)
    if out["engine"] not in ("grid", "trace"):
        raise ValidationError("engine must be 'grid' or 'trace'", "solver.engine")
    return out


def _output(spec, base: Path) -> dict:
    spec = {} if spec is None else dict(spec)
    formats = spec.get("formats", list(FORMATS))
    if not isinstance(formats, list) or any(f not in FORMATS for f in formats):
        raise ValidationError(f"formats must be a list drawn from {list(FORMATS)}", "output.formats")
    out = {"dir": base / spec.get("dir", "."), "stem": spec.get("stem", "surface"), "formats": formats,
           "report": base / spec["report"] if spec.get("report") else None,
           "grid_res": spec.get("grid_res")}
    if out["grid_res"] is not None:
        out["grid_res"] = _number(out["grid_res"], "output.grid_res", integer=True, positive=True)
    return out


def parse_config(raw: dict, base_dir=None) -> ExperimentConfig:
    """Validate a decoded JSON document."""
    base = Path(base_dir) if base_dir is not None else Path.cwd()
    if not isinstance(raw, dict):
        raise ValidationError("top level must be an object", "$")
    net = _net(_require(raw, "net", "$") if "net" in raw else None)
    surface = raw.get("surface", "alpha")
    if surface not in ("alpha", "bilinear"):
        raise ValidationError("must be 'alpha' or 'bilinear'", "surface")
    analysis = raw.get("analysis", {})
    if not isinstance(analysis, dict):
        raise ValidationError("expected an object", "analysis")
    cfg = ExperimentConfig(net=net, surface=surface, solver=_solver(raw.get("solver")), analysis=analysis,
                           output=_output(raw.get("output"), base), base_dir=base, raw=raw)
    if surface == "bilinear":
        cfg.bilinear = _bilinear(_require(raw, "bilinear", "$"), net)
    else:
        cfg.f_spec = _require(raw, "f", "$")
        cfg.f = _f(cfg.f_spec, base, net)
        cfg.operator = _operator(_require(raw, "L", "$"), net)
        cfg.alpha_spec = _require(raw, "alpha", "$")
        cfg.alpha = _alpha(cfg.alpha_spec, net)
    return cfg


def load_config(path) -> ExperimentConfig:
    """Read and validate a JSON config file.

    Raises
    ------
    ParseError
        If the file is unreadable, not UTF-8 or not valid JSON.
    ValidationError
        If a value is missing or inadmissible; ``field`` names its path.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read config: {exc}", str(path)) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", str(path)) from None
    return parse_config(raw, path.parent)
