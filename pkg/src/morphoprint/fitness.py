"""Structural-consistency and formal-complexity scoring of a layer stack.

Printability asks whether each deposited path is carried by the layer below
it and whether every outline is wide enough to stand; complexity rewards
rough, angularly diverse outlines over smooth convex ones. Both reduce a
whole FormHistory to a scalar in a weighted overall fitness.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.spatial import cKDTree

from . import config
from .errors import DegenerateGeometryError, MorphoprintError
from .geometry import (
    convex_hull,
    interior_angles,
    min_diameter,
    point_segment_distances,
    polygon_perimeter,
    quartile_dispersion,
)
from .history import FormHistory


@dataclass(frozen=True)
class FitnessParams:
    min_width: float = 10.0      # narrowest printable outline width, env units
    layer_height_mm: float = 0.2
    convexity_weight: float = 0.5   # balance of roughness vs angle dispersion in C
    weight_printability: float = 0.5
    weight_complexity: float = 0.5

    def __post_init__(self):
        config.require(self.min_width > 0, "fitness.min_width", "must be > 0")
        config.require(self.layer_height_mm > 0, "fitness.layer_height_mm", "must be > 0")
        config.require(0.0 <= self.convexity_weight <= 1.0,
                       "fitness.convexity_weight", "must lie in [0, 1]")
        for name in ("weight_printability", "weight_complexity"):
            config.require(0.0 <= getattr(self, name) <= 1.0,
                           f"fitness.{name}", "must lie in [0, 1]")
        config.require(abs(self.weight_printability + self.weight_complexity - 1.0) < 1e-9,
                       "fitness.weight_printability", "weights must sum to 1")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict, path: str = "fitness") -> "FitnessParams":
        return config.from_mapping(cls, data, path)

    @classmethod
    def from_file(cls, path) -> "FitnessParams":
        return cls.from_dict(config.load_json(path))


@dataclass
class LayerScore:
    layer: int
    printability: float
    convexity: float
    dispersion: float
    min_diameter_factor: float


@dataclass
class FitnessReport:
    printability: float
    complexity: float
    convexity: float      # colony-level mean outline convexity
    dispersion: float     # colony-level mean angle dispersion
    fitness: float
    per_layer: list = field(default_factory=list)
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "printability": self.printability,
            "complexity": self.complexity,
            "convexity": self.convexity,
            "dispersion": self.dispersion,
            "fitness": self.fitness,
            "degenerate": self.degenerate,
            "per_layer": [asdict(ls) for ls in self.per_layer],
        }


REPORT_SCHEMA = {
    "type": "object",
    "required": ["printability", "complexity", "convexity", "dispersion",
                 "fitness", "degenerate", "per_layer"],
    "additionalProperties": False,
    "properties": {
        "printability": {"type": "number", "minimum": 0, "maximum": 1},
        "complexity": {"type": "number", "minimum": 0},
        "convexity": {"type": "number", "minimum": 0, "maximum": 1},
        "dispersion": {"type": "number", "minimum": 0, "maximum": 1},
        "fitness": {"type": "number"},
        "degenerate": {"type": "boolean"},
        "per_layer": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["layer", "printability", "convexity", "dispersion",
                             "min_diameter_factor"],
                "additionalProperties": False,
                "properties": {
                    "layer": {"type": "integer", "minimum": 0},
                    "printability": {"type": "number", "minimum": 0, "maximum": 1},
                    "convexity": {"type": "number", "minimum": 0, "maximum": 1},
                    "dispersion": {"type": "number", "minimum": 0, "maximum": 1},
                    "min_diameter_factor": {"type": "number", "minimum": 0, "maximum": 1},
                },
            },
        },
    },
}


# --- pointwise pieces ---------------------------------------------------------


def diameter_factor(d_min: float, threshold: float) -> float:
    """1 for outlines at least `threshold` wide, linear falloff below."""
    if threshold <= 0:
        raise ValueError("threshold must be > 0")
    if d_min >= threshold:
        return 1.0
    return max(d_min, 0.0) / threshold


def support_score(point, prev_layer, layer_height: float) -> float:
    """How well one point rests on the previous layer's paths, in [0, 1].

    Full support within one layer height of the nearest path below, linear
    falloff to zero at two layer heights (the 45-degree overhang rule). An
    empty previous layer is the build plate, which supports everything.
    """
    if layer_height <= 0:
        raise ValueError("layer_height must be > 0")
    polys = [np.asarray(p, dtype=float) for p in prev_layer if len(p)]
    if not polys:
        return 1.0
    starts = np.concatenate([p for p in polys], axis=0)
    ends = np.concatenate([np.roll(p, -1, axis=0) for p in polys], axis=0)
    d = float(point_segment_distances(np.asarray(point, float)[None, :], starts, ends).min())
    return _score_from_distance(np.array([d]), layer_height)[0]


def _score_from_distance(d: np.ndarray, h: float) -> np.ndarray:
    return np.where(d <= h, 1.0, np.where(d <= 2.0 * h, 2.0 - d / h, 0.0))


def edge_support_ratio(start_score: float, mid_score: float, end_score: float,
                       dia_factor: float) -> float:
    """Supported fraction of one edge, midpoint counted double, width-scaled."""
    return dia_factor * (start_score + 2.0 * mid_score + end_score) / 4.0


# --- full-history measures ---------------------------------------------------


def convexity(polygon) -> float:
    """Hull perimeter over outline perimeter; 1 for convex, lower for rough."""
    perimeter = polygon_perimeter(polygon)
    if perimeter <= 0.0:
        raise DegenerateGeometryError("outline has zero perimeter")
    hull = convex_hull(polygon)
    return min(polygon_perimeter(hull) / perimeter, 1.0)


def angle_dispersion(polygons) -> float:
    """Quartile coefficient of dispersion of turning angles, pooled."""
    angles = np.concatenate([interior_angles(p) for p in polygons])
    if angles.size < 4:
        raise DegenerateGeometryError("need at least 4 angles for quartiles")
    return quartile_dispersion(angles)


def _support_scores_for_layer(layer, prev_layer, h: float) -> list:
    """Per-outline (vertex_scores, midpoint_scores) against the layer below.

    Scores are exact: a KD-tree over the previous layer's segment midpoints
    prunes every segment that provably cannot come within the 2h support
    cutoff, and true point-to-segment distances decide the rest.
    """
    if prev_layer is None:
        return [(np.ones(len(p)), np.ones(len(p))) for p in layer]
    starts = np.concatenate([np.asarray(p, float) for p in prev_layer], axis=0)
    ends = np.concatenate([np.roll(np.asarray(p, float), -1, axis=0)
                           for p in prev_layer], axis=0)
    seg_mid = 0.5 * (starts + ends)
    seg_half = 0.5 * np.hypot(*(ends - starts).T)
    tree = cKDTree(seg_mid)
    radius = 2.0 * h + float(seg_half.max()) + 1e-9
    out = []
    for poly in layer:
        pts = np.asarray(poly, dtype=float)
        mids = 0.5 * (pts + np.roll(pts, -1, axis=0))
        query = np.concatenate([pts, mids], axis=0)
        groups = tree.query_ball_point(query, r=radius)
        counts = np.fromiter((len(g) for g in groups), dtype=int, count=len(groups))
        dmin = np.full(len(query), np.inf)
        hit = counts > 0
        if hit.any():
            flat = np.concatenate([g for g in groups if g]).astype(int)
            rows = np.repeat(np.flatnonzero(hit), counts[hit])
            d = _point_to_segment_flat(query[rows], starts[flat], ends[flat])
            boundaries = np.r_[0, np.cumsum(counts[hit])]
            dmin[hit] = np.minimum.reduceat(d, boundaries[:-1])
        scores = _score_from_distance(dmin, h)
        out.append((scores[:len(pts)], scores[len(pts):]))
    return out


def _point_to_segment_flat(p, a, b) -> np.ndarray:
    ab = b - a
    ab_len2 = np.einsum("nd,nd->n", ab, ab)
    t = np.einsum("nd,nd->n", p - a, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(ab_len2 > 0.0, t / np.where(ab_len2 > 0.0, ab_len2, 1.0), 0.0)
    closest = a + np.clip(t, 0.0, 1.0)[:, None] * ab
    diff = p - closest
    return np.sqrt(np.einsum("nd,nd->n", diff, diff))


def _pool_printability(weighted: float, total_length: float) -> float:
    if total_length <= 0.0:
        raise DegenerateGeometryError("form has zero total edge length")
    return weighted / total_length


def printability(history: FormHistory, params: FitnessParams) -> float:
    """Length-weighted supported fraction over every edge of every layer."""
    return _evaluate_layers(history, params)[0]


def complexity(history: FormHistory, params: FitnessParams) -> float:
    """Weighted roughness-plus-dispersion score; higher is busier."""
    _, comp, _, _, _ = _evaluate_layers(history, params)
    return comp


def evaluate(history: FormHistory, params: FitnessParams) -> FitnessReport:
    """Score a history; degenerate forms yield a flagged minimal report."""
    try:
        print_score, comp, conv, disp, per_layer = _evaluate_layers(history, params)
    except (DegenerateGeometryError, MorphoprintError):
        return FitnessReport(printability=0.0, complexity=0.0, convexity=1.0,
                             dispersion=0.0, fitness=0.0, per_layer=[],
                             degenerate=True)
    fitness = (params.weight_printability * print_score
               + params.weight_complexity * comp)
    return FitnessReport(printability=print_score, complexity=comp, convexity=conv,
                         dispersion=disp, fitness=fitness, per_layer=per_layer)


def _evaluate_layers(history: FormHistory, params: FitnessParams):
    if history.n_layers < 1:
        raise DegenerateGeometryError("history has no layers")
    h = params.layer_height_mm / history.units_to_mm  # support cutoff, env units
    weighted_sum = 0.0
    length_sum = 0.0
    conv_vals: list[float] = []
    disp_vals: list[float] = []
    per_layer: list[LayerScore] = []
    prev = None
    for index, layer in enumerate(history.layers):
        outlines = [np.asarray(p, float) for p in layer if len(p) >= 3]
        if not outlines:
            prev = None
            continue
        scores = _support_scores_for_layer(outlines, prev, h)
        layer_weighted = 0.0
        layer_length = 0.0
        layer_factor = 1.0
        layer_conv: list[float] = []
        layer_disp: list[float] = []
        for poly, (v_scores, m_scores) in zip(outlines, scores):
            try:
                width = min_diameter(poly)
                factor = diameter_factor(width, params.min_width)
                conv = convexity(poly)
                angles = interior_angles(poly)
            except DegenerateGeometryError:
                continue
            lengths = np.hypot(*(np.roll(poly, -1, axis=0) - poly).T)
            ratios = factor * (v_scores + 2.0 * m_scores + np.roll(v_scores, -1)) / 4.0
            layer_weighted += float(ratios @ lengths)
            layer_length += float(lengths.sum())
            layer_factor = min(layer_factor, factor)
            layer_conv.append(conv)
            layer_disp.append(quartile_dispersion(angles))
        weighted_sum += layer_weighted
        length_sum += layer_length
        conv_vals.extend(layer_conv)
        disp_vals.extend(layer_disp)
        if layer_length > 0.0:
            per_layer.append(LayerScore(
                layer=index,
                printability=layer_weighted / layer_length,
                convexity=float(np.mean(layer_conv)) if layer_conv else 1.0,
                dispersion=float(np.mean(layer_disp)) if layer_disp else 0.0,
                min_diameter_factor=layer_factor,
            ))
        prev = outlines
    print_score = _pool_printability(weighted_sum, length_sum)
    if not conv_vals:
        raise DegenerateGeometryError("no scoreable outlines in history")
    conv = float(np.mean(conv_vals))
    disp = float(np.mean(disp_vals))
    comp = (params.convexity_weight * (1.0 - conv)
            + (1.0 - params.convexity_weight) * disp)
    return print_score, comp, conv, disp, per_layer
