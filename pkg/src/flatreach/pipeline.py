"""End-to-end check of the reach and curvature bounds on flat norm minimizers.

minimize -> extract boundary -> per component: resample, curvature, reach.
A component passes when its curvature is at most 1.1 lambda and its reach at
least 0.9 C_hat / lambda (both factors configurable).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from . import __version__
from .bound import optimize_c
from .exceptions import ParameterError
from .flatnorm import extract_boundary, flat_norm_value, minimize_l1tv
from .geometry import ClosedCurve, GridMask, estimate_curvature, resample_arclength
from .io import read_pgm, read_polygon
from .reach import reach_bruteforce, reach_federer
from .shapes import rasterize

REACH_METHODS = ("federer", "bruteforce", "both")
SIG_DIGITS = 12


@dataclass(frozen=True)
class PipelineConfig:
    """Settings of one verification run.

    ``curvature_window``, ``resample_step`` and ``pair_separation`` are in
    units of 1/lambda. Pairs closer than ``pair_separation`` along a component
    are left to the curvature cap: a double normal on a curve of curvature at
    most lambda spans an arc of at least pi/lambda, so only pixel-scale kinks
    are excluded. On grids coarser than spacing 0.05/lambda the curvature
    window is held at ``min_window_pixels`` pixels, its value at that
    resolution, so it never shrinks to the pixel scale.
    ``spacing`` only applies to polygon inputs (default: diameter / 256).
    ``seed`` is echoed into the report; the run itself draws no random numbers.
    """

    input_path: str
    lam: float
    input_kind: str | None = None
    stencil: int = 16
    smoothing_passes: int = 2
    reach_method: str = "federer"
    output_report: str | None = None
    output_svg: str | None = None
    seed: int = 0
    spacing: float | None = None
    curvature_factor: float = 1.1
    reach_factor: float = 0.9
    curvature_window: float = 1.0
    resample_step: float = 0.1
    pair_separation: float = 2.0
    min_window_pixels: float = 20.0

    def __post_init__(self):
        if not str(self.input_path):
            raise ParameterError("input path is empty")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ParameterError(f"lambda must be positive and finite, got {self.lam}")
        if self.reach_method not in REACH_METHODS:
            raise ParameterError(f"reach_method must be one of {REACH_METHODS}")
        if self.smoothing_passes < 0:
            raise ParameterError("smoothing_passes must be >= 0")
        if self.spacing is not None and not self.spacing > 0:
            raise ParameterError("spacing must be positive")

    @property
    def kind(self) -> str:
        if self.input_kind is not None:
            return self.input_kind
        return "polygon_json" if str(self.input_path).lower().endswith(".json") else "mask_pgm"


@dataclass
class ComponentRecord:
    component_id: int
    perimeter: float
    max_curvature: float
    reach_value: float
    reach_kind: str
    curvature_ok: bool
    reach_ok: bool


@dataclass
class VerifyReport:
    lam: float
    c_hat: float
    threshold: float
    energies: dict
    components: list
    overall: str
    config_echo: dict
    # geometry for plotting, not serialized
    input_curves: list
    minimizer_curves: list
    witnesses: list

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "c_hat": self.c_hat,
            "threshold": self.threshold,
            "energies": self.energies,
            "components": [asdict(c) for c in self.components],
            "overall": self.overall,
            "tool_version": __version__,
            "config_echo": self.config_echo,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _round(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.generic):
        return _round(obj.item())
    return str(obj)


def dumps(doc) -> str:
    """JSON with insertion-ordered keys and reals rounded to 12 significant digits."""
    return json.dumps(_round(doc), indent=2) + "\n"


def worker_count() -> int:
    env = os.environ.get("FLATREACH_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ParameterError(f"FLATREACH_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise ParameterError("FLATREACH_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


def load_shape(path, kind: str) -> GridMask | ClosedCurve:
    """Read a mask (``mask_pgm``) or a closed polygon (``polygon_json``)."""
    if kind == "mask_pgm":
        return read_pgm(path)
    if kind == "polygon_json":
        return read_polygon(path)
    raise ParameterError(f"unknown input kind {kind!r}")


def load_mask(config: PipelineConfig) -> GridMask:
    shape = load_shape(config.input_path, config.kind)
    if isinstance(shape, ClosedCurve):
        spacing = config.spacing if config.spacing is not None else shape.extent / 256
        return rasterize(shape, spacing)
    return shape


def _prepare(curve: ClosedCurve, config: PipelineConfig, spacing: float) -> tuple[ClosedCurve, float, float]:
    # resample at a step tied to 1/lambda, but keep enough vertices on small loops
    step = min(config.resample_step / config.lam, curve.perimeter / 16)
    c = resample_arclength(curve, step)
    window = max(config.curvature_window / config.lam, config.min_window_pixels * spacing)
    window = max(min(window, c.perimeter / 4), 2 * c.mean_spacing)
    separation = min(config.pair_separation / config.lam, c.perimeter / 4)
    return c, window, separation


def _own_reach(curve: ClosedCurve, window: float, separation: float, method: str, grid_step: float):
    ests = []
    if method in ("federer", "both"):
        ests.append(reach_federer(curve, window=window, min_separation=separation))
    if method in ("bruteforce", "both"):
        ests.append(reach_bruteforce(curve, grid_step))
    return min(ests, key=lambda e: e.value)


def _gaps(curves) -> list[tuple[float, tuple | None]]:
    # half the distance from each component to the nearest other component
    trees = [cKDTree(c.vertices) for c in curves]
    out = []
    for k, c in enumerate(curves):
        best, pair = math.inf, None
        for j, t in enumerate(trees):
            if j == k:
                continue
            d, idx = t.query(c.vertices)
            i = int(np.argmin(d))
            if d[i] < best:
                best, pair = float(d[i]), (c.vertices[i], curves[j].vertices[idx[i]])
        out.append((best / 2, pair))
    return out


def run_verify(config: PipelineConfig) -> VerifyReport:
    """Minimize, measure every boundary component, and assemble the report."""
    mask = load_mask(config)
    lam = float(config.lam)
    c_hat, _ = optimize_c()
    threshold = c_hat / lam

    result = minimize_l1tv(mask, lam, config.stencil, config.smoothing_passes)
    omega = result.omega
    _, _, e_input = flat_norm_value(omega, omega, lam, config.smoothing_passes)
    energies = {"input": e_input, "minimizer": result.energy, "empty": lam * omega.area}

    curves = extract_boundary(result.sigma, config.smoothing_passes)
    prepared = [_prepare(c, config, omega.spacing) for c in curves]
    grid_step = 0.01 / lam

    def measure(item):
        c, window, separation = item
        kappa = float(estimate_curvature(c, window).max())
        return kappa, _own_reach(c, window, separation, config.reach_method, grid_step)

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        measured = list(pool.map(measure, prepared))
    gaps = _gaps([c for c, _, _ in prepared]) if len(prepared) > 1 else [(math.inf, None)] * len(prepared)

    records, witnesses = [], []
    for k, ((c, _, _), (kappa, est), (gap, pair)) in enumerate(zip(prepared, measured, gaps)):
        if gap < est.value:
            value, kind, wit = gap, "bottleneck", pair
        else:
            value, kind, wit = est.value, est.kind, est.witness
        records.append(
            ComponentRecord(
                component_id=k,
                perimeter=c.perimeter,
                max_curvature=kappa,
                reach_value=value,
                reach_kind=kind,
                curvature_ok=kappa <= config.curvature_factor * lam,
                reach_ok=value >= config.reach_factor * threshold,
            )
        )
        witnesses.append(None if wit is None else (tuple(map(float, wit[0])), tuple(map(float, wit[1]))))

    if not records:
        overall = "vacuous"
    elif all(r.curvature_ok and r.reach_ok for r in records):
        overall = "pass"
    else:
        overall = "fail"
    echo = {k: v for k, v in asdict(config).items()}
    echo["input_kind"] = config.kind
    report = VerifyReport(
        lam=lam,
        c_hat=c_hat,
        threshold=threshold,
        energies=energies,
        components=records,
        overall=overall,
        config_echo=echo,
        input_curves=extract_boundary(omega, config.smoothing_passes),
        minimizer_curves=curves,
        witnesses=witnesses,
    )
    if config.output_report:
        Path(config.output_report).write_text(report.to_json())
    if config.output_svg:
        from .svg import emit_svg

        emit_svg(config.output_svg, report.input_curves, report.minimizer_curves, witnesses)
    return report
