"""A closed ring of spring-connected cells.

State is held in parallel numpy arrays ordered around the ring; edge i
connects cell i to cell (i + 1) mod n, so the ring is closed by
construction. Cells carry a persistent id so that a marked split pair can
survive insertions and deletions elsewhere in the ring.
"""
from __future__ import annotations

import numpy as np

from .genome import Genome
from .params import SimParams

MIN_RING = 3  # a closed loop needs at least three cells


class Organism:
    __slots__ = ("pos", "vel", "energy", "ids", "rest", "pending")

    def __init__(self, pos, vel, energy, ids, rest=None, pending=None):
        self.pos = np.asarray(pos, dtype=float)
        self.vel = np.asarray(vel, dtype=float)
        self.energy = np.asarray(energy, dtype=float)
        self.ids = np.asarray(ids, dtype=np.int64)
        self.rest = np.zeros(len(self.pos)) if rest is None else np.asarray(rest, dtype=float)
        self.pending = pending  # (id_anchor, id_split) while a split is in progress

    # --- basic quantities ---------------------------------------------------

    @property
    def n_cells(self) -> int:
        return len(self.pos)

    def total_energy(self) -> float:
        return float(self.energy.sum())

    def masses(self, params: SimParams) -> np.ndarray:
        return params.mass_floor + params.mass_per_energy * self.energy

    def edge_vectors(self) -> np.ndarray:
        return np.roll(self.pos, -1, axis=0) - self.pos

    def edge_lengths(self) -> np.ndarray:
        e = self.edge_vectors()
        return np.hypot(e[:, 0], e[:, 1])

    def polyline(self) -> np.ndarray:
        """Snapshot of the ring as a closed polyline (implicit closing edge)."""
        return self.pos.copy()

    def copy(self) -> "Organism":
        return Organism(self.pos.copy(), self.vel.copy(), self.energy.copy(),
                        self.ids.copy(), self.rest.copy(), self.pending)

    def index_of(self, cell_id: int):
        hits = np.flatnonzero(self.ids == cell_id)
        return int(hits[0]) if hits.size else None

    # --- per-step physics and energy ops -------------------------------------

    def update_rest_lengths(self, params: SimParams) -> None:
        """Edge rest length tracks the energy of its endpoints (sqrt law)."""
        pair = self.energy + np.roll(self.energy, -1)
        self.rest = params.rest_length_scale * np.sqrt(
            np.maximum(pair, params.rest_energy_floor))

    def spring_forces(self, genome: Genome, params: SimParams) -> np.ndarray:
        """Hooke forces from every edge; stretched edges pull endpoints together."""
        k = params.spring_scale * genome.stiffness
        e = self.edge_vectors()
        lengths = np.hypot(e[:, 0], e[:, 1])
        safe = np.where(lengths > 0.0, lengths, 1.0)
        # force on the tail of edge i, directed along the edge
        pull = k * (lengths - self.rest) / safe
        pull = np.where(lengths > 0.0, pull, 0.0)  # coincident endpoints: undefined axis
        f_edge = pull[:, None] * e
        forces = f_edge.copy()
        forces -= np.roll(f_edge, 1, axis=0)  # reaction on each head
        return forces

    def diffuse_energy(self, params: SimParams) -> None:
        """Move energy across each edge from the higher- to lower-energy cell.

        Transfers are computed from a snapshot, then applied atomically. The
        receiver gains (rate * donor_energy - loss * edge_length); a transfer
        whose receiver gain would be negative is skipped entirely.
        """
        if params.energy_diffusion == 0.0:
            return
        snapshot = self.energy
        nxt = np.roll(snapshot, -1)
        d = self.edge_lengths()
        donated = params.energy_diffusion * np.maximum(snapshot, nxt)
        gain = donated - params.transfer_loss * d
        forward = snapshot > nxt          # donor is the edge tail
        backward = nxt > snapshot         # donor is the edge head
        live = gain > 0.0
        delta = np.zeros_like(snapshot)
        fwd = forward & live
        bwd = backward & live
        # tail -> head transfers
        np.add.at(delta, np.flatnonzero(fwd), -donated[fwd])
        np.add.at(delta, (np.flatnonzero(fwd) + 1) % self.n_cells, gain[fwd])
        # head -> tail transfers
        np.add.at(delta, (np.flatnonzero(bwd) + 1) % self.n_cells, -donated[bwd])
        np.add.at(delta, np.flatnonzero(bwd), gain[bwd])
        self.energy = snapshot + delta

    # --- condition-action rules ----------------------------------------------

    def apply_rules(self, genome: Genome, params: SimParams, next_id: int,
                    allow_divide: bool = True):
        """Remove dead cells, then divide over-full ones.

        Both rules act on one snapshot of the energies: a cell at zero energy
        dies (with its leading edge); a surviving cell at or above the genome
        capacity splits into two half-energy cells at the same spot. Returns
        (alive, next_id); a ring reduced below three cells dies entirely.
        """
        dead = self.energy <= 0.0
        if dead.any():
            keep = ~dead
            if keep.sum() < MIN_RING:
                return False, next_id
            self.pos = self.pos[keep]
            self.vel = self.vel[keep]
            self.energy = self.energy[keep]
            self.ids = self.ids[keep]

        if allow_divide:
            dividing = self.energy >= genome.energy_capacity
            if dividing.any():
                idx = np.flatnonzero(dividing)
                n_new = idx.size
                self.energy[idx] *= 0.5  # parent keeps half, child gets half
                insert_at = idx + 1
                self.pos = np.insert(self.pos, insert_at, self.pos[idx], axis=0)
                self.vel = np.insert(self.vel, insert_at, self.vel[idx], axis=0)
                self.energy = np.insert(self.energy, insert_at, self.energy[idx])
                new_ids = np.arange(next_id, next_id + n_new, dtype=np.int64)
                self.ids = np.insert(self.ids, insert_at, new_ids)
                next_id += n_new

        self.energy = np.clip(self.energy, 0.0, genome.energy_capacity)
        self.update_rest_lengths(params)
        return True, next_id

    # --- organism splitting ----------------------------------------------------

    def find_split_pair(self, split_ratio: float):
        """Locate the anchor (highest-energy cell) and the split partner.

        Walks the ring from the anchor along leading edges, accumulating
        energy until the running fraction of the organism total reaches the
        genome's split ratio. Returns (index_anchor, index_split) or None if
        either resulting ring would be degenerate.
        """
        n = self.n_cells
        total = self.total_energy()
        if total <= 0.0:
            return None
        a = int(np.argmax(self.energy))
        acc = 0.0
        b = a
        for _ in range(n):
            b = (b + 1) % n
            acc += self.energy[b]
            if acc / total >= split_ratio:
                break
        if b == a:
            b = (a + 1) % n
        size_ab = (b - a) % n + 1
        size_ba = (a - b) % n + 1
        if size_ab < MIN_RING or size_ba < MIN_RING:
            return None
        return a, b

    def split(self, a: int, b: int, params: SimParams, next_id: int):
        """Cut the ring at cells a and b into two independent rings.

        Both cut cells are duplicated: ring one keeps the arc a..b, ring two
        the arc b..a, so the total cell count grows by exactly two. Returns
        (ring_one, ring_two, next_id).
        """
        n = self.n_cells
        arc1 = np.arange(a, a + (b - a) % n + 1) % n
        arc2 = np.arange(b, b + (a - b) % n + 1) % n

        def build(arc, fresh_ends):
            ids = self.ids[arc].copy()
            nonlocal next_id
            if fresh_ends:  # re-id the duplicated endpoints in the second ring
                ids[0] = next_id
                ids[-1] = next_id + 1
                next_id += 2
            org = Organism(self.pos[arc].copy(), self.vel[arc].copy(),
                           self.energy[arc].copy(), ids)
            org.update_rest_lengths(params)
            return org

        first = build(arc1, fresh_ends=False)
        second = build(arc2, fresh_ends=True)
        return first, second, next_id


def seed_ring(params: SimParams) -> Organism:
    """The initial circular organism, centred on the build plate."""
    n = int(np.floor(2.0 * np.pi * params.init_radius / (2.0 * params.init_energy)))
    n = max(n, MIN_RING)
    theta = 2.0 * np.pi * np.arange(n) / n
    centre = params.env_size / 2.0
    pos = np.stack([centre + params.init_radius * np.cos(theta),
                    centre + params.init_radius * np.sin(theta)], axis=1)
    org = Organism(pos, np.zeros_like(pos), np.full(n, params.init_energy),
                   np.arange(n, dtype=np.int64))
    org.update_rest_lengths(params)
    return org
