"""Nutrient field: a coarse concentration grid fed by point sources.

The 600x600-unit environment is discretised into a 15x15 tile grid. Each
step the concentration diffuses (explicit 5-point stencil, reflecting
boundaries), decays, and is topped up by a fixed number of sources. A
source that has emitted its full capacity is respawned at a random tile.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SimParams


@dataclass
class Source:
    tile: tuple          # (ix, iy)
    rate: float          # nutrient units per step
    capacity: float      # lifetime emission budget
    emitted: float = 0.0

    @property
    def exhausted(self) -> bool:
        return self.emitted >= self.capacity - 1e-12

    def to_dict(self) -> dict:
        return {"tile": list(self.tile), "rate": self.rate,
                "capacity": self.capacity, "emitted": self.emitted}


class NutrientField:
    """Mutable grid state plus the active sources feeding it."""

    def __init__(self, params: SimParams, rng: np.random.Generator):
        self.params = params
        n = params.grid_tiles
        self.grid = np.zeros((n, n), dtype=float)
        self.sources = [self._spawn(rng) for _ in range(params.n_sources)]

    def _spawn(self, rng: np.random.Generator) -> Source:
        n = self.params.grid_tiles
        ix = int(rng.integers(0, n))
        iy = int(rng.integers(0, n))
        capacity = float(rng.uniform(self.params.source_capacity_low,
                                     self.params.source_capacity_high))
        return Source(tile=(ix, iy), rate=self.params.source_rate, capacity=capacity)

    def total(self) -> float:
        return float(self.grid.sum())

    def update(self, rng: np.random.Generator) -> None:
        """One timestep: diffuse + decay, emit, respawn exhausted sources."""
        p = self.params
        padded = np.pad(self.grid, 1, mode="edge")  # reflecting = no-flux walls
        lap = (padded[:-2, 1:-1] + padded[2:, 1:-1] + padded[1:-1, :-2]
               + padded[1:-1, 2:] - 4.0 * self.grid)
        self.grid = np.maximum(
            self.grid + p.dt * (p.nutrient_diffusion**2 * lap - p.nutrient_decay), 0.0)
        for i, src in enumerate(self.sources):
            amount = min(src.rate, src.capacity - src.emitted)
            if amount > 0.0:
                self.grid[src.tile] += amount
                src.emitted += amount
            if src.exhausted:
                self.sources[i] = self._spawn(rng)

    # --- sampling helpers -------------------------------------------------

    def tile_of(self, positions: np.ndarray) -> tuple:
        """Tile indices (clamped) containing each position; (ix, iy) arrays."""
        n = self.params.grid_tiles
        idx = np.floor(positions / self.params.tile_size).astype(int)
        idx = np.clip(idx, 0, n - 1)
        return idx[:, 0], idx[:, 1]

    def absorb(self, positions: np.ndarray, cap: float) -> np.ndarray:
        """Draw up to `cap` nutrient units per cell from each containing tile.

        Cells are served in array order; cells sharing a tile see it already
        depleted by earlier ones. Returns the units absorbed per cell.
        """
        ix, iy = self.tile_of(positions)
        flat = ix * self.params.grid_tiles + iy
        conc = self.grid.ravel()[flat]
        absorbed = np.zeros(len(positions))
        hot = np.flatnonzero(conc > 0.0)
        if hot.size == 0:
            return absorbed
        # rank of each cell within its tile, preserving array order
        order = np.argsort(flat[hot], kind="stable")
        sorted_flat = flat[hot][order]
        starts = np.flatnonzero(np.r_[True, sorted_flat[1:] != sorted_flat[:-1]])
        ranks = np.arange(hot.size) - np.repeat(starts, np.diff(np.r_[starts, hot.size]))
        take = np.clip(conc[hot][order] - ranks * cap, 0.0, cap)
        absorbed[hot[order]] = take
        np.subtract.at(self.grid.ravel(), sorted_flat, take)
        return absorbed

    def interpolate(self, positions: np.ndarray) -> np.ndarray:
        """Bilinear concentration at arbitrary positions (tile-centre lattice)."""
        vals, _ = self._bilinear(positions)
        return vals

    def gradient(self, positions: np.ndarray) -> np.ndarray:
        """Gradient of the bilinear interpolant at each position, (n, 2)."""
        _, grad = self._bilinear(positions)
        return grad

    def _bilinear(self, positions: np.ndarray):
        n = self.params.grid_tiles
        ts = self.params.tile_size
        u = positions / ts - 0.5  # lattice coordinates of tile centres
        i0 = np.clip(np.floor(u).astype(int), 0, n - 2)
        f = np.clip(u - i0, 0.0, 1.0)
        fx, fy = f[:, 0], f[:, 1]
        g = self.grid
        n00 = g[i0[:, 0], i0[:, 1]]
        n10 = g[i0[:, 0] + 1, i0[:, 1]]
        n01 = g[i0[:, 0], i0[:, 1] + 1]
        n11 = g[i0[:, 0] + 1, i0[:, 1] + 1]
        vals = (n00 * (1 - fx) * (1 - fy) + n10 * fx * (1 - fy)
                + n01 * (1 - fx) * fy + n11 * fx * fy)
        ddx = ((n10 - n00) * (1 - fy) + (n11 - n01) * fy) / ts
        ddy = ((n01 - n00) * (1 - fx) + (n11 - n10) * fx) / ts
        return vals, np.stack([ddx, ddy], axis=1)

    def any_within(self, positions: np.ndarray, radius: float) -> np.ndarray:
        """True per position if any positive tile centre lies within radius."""
        hot = np.argwhere(self.grid > 0.0)
        if hot.size == 0:
            return np.zeros(len(positions), dtype=bool)
        centres = (hot + 0.5) * self.params.tile_size
        diff = positions[:, None, :] - centres[None, :, :]
        d2 = np.einsum("ptd,ptd->pt", diff, diff)
        return (d2 <= radius * radius).any(axis=1)

    def to_dict(self) -> dict:
        return {"grid": self.grid.tolist(),
                "sources": [s.to_dict() for s in self.sources]}
