"""Exact 2D geometry kernels: hulls, widths, distances, turning angles.

All functions take and return float64 numpy arrays. Closed polylines are
stored without a repeated last vertex; the closing edge is implicit.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull as _QHull
from scipy.spatial import QhullError

from .errors import DegenerateGeometryError


def as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) point array, got shape {pts.shape}")
    return pts


def convex_hull(points) -> np.ndarray:
    """Counterclockwise convex hull with no duplicate or collinear vertices.

    Backed by Qhull for speed, then cleaned so that every remaining vertex
    makes a strict left turn. Raises DegenerateGeometryError when the input
    has no 2D extent (fewer than 3 distinct points, or all collinear).
    """
    pts = as_points(points)
    if len(np.unique(pts, axis=0)) < 3:
        raise DegenerateGeometryError("hull needs at least 3 distinct points")
    try:
        hull = pts[_QHull(pts).vertices]  # CCW order in 2D
    except QhullError as exc:
        raise DegenerateGeometryError("all points are collinear") from exc
    # drop any residual collinear or repeated vertices
    while len(hull) >= 3:
        prev = np.roll(hull, 1, axis=0)
        nxt = np.roll(hull, -1, axis=0)
        cross = ((hull[:, 0] - prev[:, 0]) * (nxt[:, 1] - prev[:, 1])
                 - (hull[:, 1] - prev[:, 1]) * (nxt[:, 0] - prev[:, 0]))
        keep = cross > 0.0
        if keep.all():
            break
        hull = hull[keep]
    if len(hull) < 3:
        raise DegenerateGeometryError("all points are collinear")
    return hull


def min_diameter(polygon) -> float:
    """Smallest distance between parallel supporting lines of the hull.

    The minimum width of a convex polygon is attained with one of the lines
    flush against a hull edge, so it suffices to scan hull edges and take the
    farthest vertex from each edge's line. Degenerate input yields 0.
    """
    pts = as_points(polygon)
    try:
        hull = convex_hull(pts)
    except DegenerateGeometryError:
        return 0.0
    edges = np.roll(hull, -1, axis=0) - hull
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    # distance of every vertex from every edge's supporting line
    rel = hull[None, :, :] - hull[:, None, :]  # (edge, vertex, 2)
    cross = edges[:, None, 0] * rel[:, :, 1] - edges[:, None, 1] * rel[:, :, 0]
    widths = np.abs(cross).max(axis=1) / lengths
    return float(widths.min())


def polygon_perimeter(polygon) -> float:
    """Total length of a closed polyline (closing edge included)."""
    pts = as_points(polygon)
    seg = np.roll(pts, -1, axis=0) - pts
    return float(np.hypot(seg[:, 0], seg[:, 1]).sum())


def polygon_area(polygon) -> float:
    """Signed shoelace area; positive for counterclockwise rings."""
    pts = as_points(polygon)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    return float(0.5 * np.sum(x * yn - xn * y))


def point_segment_distances(points, seg_starts, seg_ends) -> np.ndarray:
    """Distance from each point to each segment; returns a (P, S) matrix."""
    p = as_points(points)[:, None, :]
    a = as_points(seg_starts)[None, :, :]
    b = as_points(seg_ends)[None, :, :]
    ab = b - a
    ab_len2 = np.einsum("psd,psd->ps", ab, ab)
    t = np.einsum("psd,psd->ps", p - a, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(ab_len2 > 0.0, t / ab_len2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, :, None] * ab
    diff = p - closest
    return np.sqrt(np.einsum("psd,psd->ps", diff, diff))


def interior_angles(polygon) -> np.ndarray:
    """Interior turning angle at every vertex of a closed polyline, degrees.

    Traversal is normalised to counterclockwise (by signed area) so the
    result does not depend on ring orientation. Values lie in [0, 360);
    reflex vertices exceed 180. Zero-length edges are dropped first.
    """
    pts = as_points(polygon)
    keep = np.any(pts != np.roll(pts, 1, axis=0), axis=1)
    pts = pts[keep]
    if len(pts) < 3:
        raise DegenerateGeometryError("polygon has fewer than 3 distinct vertices")
    if polygon_area(pts) < 0:
        pts = pts[::-1]
    e = np.roll(pts, -1, axis=0) - pts  # edge i: v_i -> v_{i+1}
    prev = np.roll(e, 1, axis=0)
    turn = np.degrees(np.arctan2(
        prev[:, 0] * e[:, 1] - prev[:, 1] * e[:, 0],
        np.einsum("id,id->i", prev, e),
    ))
    return np.mod(180.0 - turn, 360.0)


def quartile_dispersion(values) -> float:
    """Quartile coefficient of dispersion (Q3 - Q1) / (Q3 + Q1).

    Quartiles use inclusive linear interpolation at positions (n - 1) * q.
    Returns 0 when Q3 + Q1 == 0.
    """
    vals = np.asarray(values, dtype=float)
    if vals.size < 2:
        return 0.0
    q1, q3 = np.percentile(vals, [25.0, 75.0], method="linear")
    denom = q3 + q1
    if denom == 0.0:
        return 0.0
    return float((q3 - q1) / denom)
