"""Colony simulation: grow rings of cells in a nutrient field, step by step.

The update order inside one timestep is fixed:

  1. nutrient field update (diffuse, decay, emit, respawn)
  2. per-cell nutrient absorption and perception
  3. energy bookkeeping (upkeep cost, absorbed gain)
  4. energy diffusion along edges
  5. cell rules: die, then divide
  6. organism-split progress: mark pairs, cut rings whose pair has closed in
  7. force accumulation: repulsion, springs, nutrient pull, split attraction
  8. damped integration with a per-step speed limit
  9. rest-length refresh
 10. layer snapshot

Running the same genome, parameters and seed twice gives bit-identical
results; the only randomness is the seeded nutrient source placement.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .genome import Genome
from .history import FormHistory
from .nutrients import NutrientField
from .organism import MIN_RING, Organism, seed_ring
from .params import SimParams
from .rng import make_rng


@dataclass(frozen=True)
class AblationFlags:
    """Switches that disable one model component each, for contribution studies."""

    no_energy: bool = False    # skip upkeep loss and energy diffusion
    no_division: bool = False  # disable cell division and organism splitting
    no_meta: bool = False      # no nutrient absorption or perception at all
    no_physics: bool = False   # skip force integration; cells stay put

    @classmethod
    def from_names(cls, names) -> "AblationFlags":
        valid = {"no_energy", "no_division", "no_meta", "no_physics"}
        names = set(names)
        unknown = names - valid
        if unknown:
            raise ValueError(f"unknown ablation flag: {sorted(unknown)[0]}")
        return cls(**{n: True for n in names})


FULL_MODEL = AblationFlags()


def repulsion_force(d, params: SimParams):
    """Signed repulsion along the centre-to-centre axis at separation d.

    Negative inside the repulsion radius (the applied world-space push has
    magnitude |value| and points away from the neighbour), zero outside.
    Separations at or below the distance clamp are treated as the clamp.
    """
    d = np.maximum(np.asarray(d, dtype=float), params.min_distance)
    inside = d <= params.repulsion_radius
    value = params.repulsion_strength * (-1.0 / d**2 + 1.0 / params.repulsion_radius**2)
    return np.where(inside, value, 0.0)


class Colony:
    """Live simulation state: organisms, field, clock and RNG stream."""

    def __init__(self, genome: Genome, params: SimParams, env_seed: int,
                 flags: AblationFlags = FULL_MODEL):
        self.genome = genome
        self.params = params
        self.env_seed = int(env_seed)
        self.flags = flags
        self.rng = make_rng(self.env_seed)
        self.field = NutrientField(params, self.rng)
        first = seed_ring(params)
        self.organisms: list[Organism] = [first]
        self.next_id = int(first.ids.max()) + 1
        self.clock = 0

    # --- queries ---------------------------------------------------------

    @property
    def alive(self) -> bool:
        return len(self.organisms) > 0

    def total_energy(self) -> float:
        return sum(org.total_energy() for org in self.organisms)

    def snapshot_layer(self) -> list:
        return [org.polyline() for org in self.organisms]

    def all_positions(self) -> np.ndarray:
        if not self.organisms:
            return np.zeros((0, 2))
        return np.concatenate([org.pos for org in self.organisms], axis=0)

    # --- one timestep ------------------------------------------------------

    def step(self) -> list:
        """Advance one timestep and return the emitted layer."""
        p = self.params
        g = self.genome
        flags = self.flags

        # 1. nutrient field
        self.field.update(self.rng)

        # 2. absorption and perception (shared by the energy cost and the force)
        absorbed, nutrient_forces, force_mags = self._metabolise()

        # 3.-5. energy update and cell rules, per organism
        survivors = []
        for org, gained, fmag in zip(self.organisms, absorbed, force_mags):
            if not flags.no_energy:
                upkeep = (p.cost_of_living
                          + g.metabolism * (g.energy_capacity
                                            + p.movement_cost * fmag / g.drag**2))
                org.energy = org.energy - upkeep
            org.energy = org.energy + gained * g.metabolism
            if not flags.no_energy:
                org.diffuse_energy(p)
            alive, self.next_id = org.apply_rules(
                g, p, self.next_id, allow_divide=not flags.no_division)
            if alive:
                survivors.append(org)
        self.organisms = survivors

        # 6. organism splits
        if not flags.no_division:
            self._progress_splits()

        # 7.-8. forces and integration
        if not flags.no_physics and self.organisms:
            forces = self._accumulate_forces(nutrient_forces)
            self._integrate(forces)

        # 9. rest lengths track the new energies
        for org in self.organisms:
            org.update_rest_lengths(p)

        self.clock += 1
        # 10. emitted layer
        return self.snapshot_layer()

    # --- internals --------------------------------------------------------

    def _metabolise(self):
        """Absorb nutrients and compute perception forces for every organism.

        Returns per-organism arrays of absorbed units, force vectors and
        force magnitudes. With metabolism ablated, everything is zero.
        """
        p = self.params
        absorbed, forces, mags = [], [], []
        if self.flags.no_meta or not self.organisms:
            for org in self.organisms:
                absorbed.append(np.zeros(org.n_cells))
                forces.append(np.zeros((org.n_cells, 2)))
                mags.append(np.zeros(org.n_cells))
            return absorbed, forces, mags
        counts = [org.n_cells for org in self.organisms]
        pos = np.concatenate([org.pos for org in self.organisms], axis=0)
        taken = self.field.absorb(pos, p.absorb_cap)
        sensing = self.field.any_within(pos, p.sense_radius)
        grad = self.field.gradient(pos)
        norm = np.hypot(grad[:, 0], grad[:, 1])
        energies = np.concatenate([org.energy for org in self.organisms])
        active = sensing & (norm > 0.0) & (energies > 0.0)
        mag = np.where(active, p.nutrient_force * np.maximum(energies, 0.0), 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = np.where(norm[:, None] > 0.0, grad / norm[:, None], 0.0)
        fvec = mag[:, None] * direction
        offset = 0
        for n in counts:
            absorbed.append(taken[offset:offset + n])
            forces.append(fvec[offset:offset + n])
            mags.append(mag[offset:offset + n])
            offset += n
        return absorbed, forces, mags

    def _progress_splits(self) -> None:
        """Mark over-threshold organisms and cut rings whose pair closed in."""
        p = self.params
        result: list[Organism] = []
        for org in self.organisms:
            if org.pending is not None:
                ia = org.index_of(org.pending[0])
                ib = org.index_of(org.pending[1])
                if ia is None or ib is None or ia == ib:
                    org.pending = None  # a marked cell died; abort
                else:
                    gap = float(np.linalg.norm(org.pos[ia] - org.pos[ib]))
                    if gap <= 2.0 * p.repulsion_radius:
                        size_ab = (ib - ia) % org.n_cells + 1
                        size_ba = (ia - ib) % org.n_cells + 1
                        org.pending = None
                        if size_ab >= MIN_RING and size_ba >= MIN_RING:
                            first, second, self.next_id = org.split(ia, ib, p, self.next_id)
                            result.extend([first, second])
                            continue
            if org.pending is None and org.total_energy() > p.org_split_energy:
                pair = org.find_split_pair(self.genome.split_ratio)
                if pair is not None:
                    org.pending = (int(org.ids[pair[0]]), int(org.ids[pair[1]]))
            result.append(org)
        self.organisms = result

    def _accumulate_forces(self, nutrient_forces) -> list:
        """Sum repulsion, spring, nutrient and split-attraction forces."""
        p = self.params
        counts = [org.n_cells for org in self.organisms]
        offsets = np.cumsum([0] + counts)
        pos = np.concatenate([org.pos for org in self.organisms], axis=0)
        total = np.zeros_like(pos)

        # short-range repulsion between every pair of cells in the colony
        pairs = cKDTree(pos).query_pairs(p.repulsion_radius, output_type="ndarray")
        if len(pairs):
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
            diff = pos[pairs[:, 0]] - pos[pairs[:, 1]]
            d = np.maximum(np.hypot(diff[:, 0], diff[:, 1]), p.min_distance)
            magnitude = np.abs(repulsion_force(d, p))
            push = (magnitude / d)[:, None] * diff  # directed away from the partner
            np.add.at(total, pairs[:, 0], push)
            np.add.at(total, pairs[:, 1], -push)

        for org, start, fvec in zip(self.organisms, offsets[:-1], nutrient_forces):
            segment = slice(start, start + org.n_cells)
            total[segment] += org.spring_forces(self.genome, p)
            total[segment] += fvec
            if org.pending is not None:
                ia = org.index_of(org.pending[0])
                ib = org.index_of(org.pending[1])
                if ia is not None and ib is not None and ia != ib:
                    axis = org.pos[ib] - org.pos[ia]
                    gap = float(np.linalg.norm(axis))
                    if gap > 0.0:
                        pull = p.split_attraction * axis / gap
                        total[start + ia] += pull
                        total[start + ib] -= pull
        return [total[offsets[i]:offsets[i + 1]] for i in range(len(counts))]

    def _integrate(self, forces) -> None:
        """Semi-implicit Euler with a speed cap and post-move viscous damping."""
        p = self.params
        for org, force in zip(self.organisms, forces):
            m = org.masses(p)[:, None]
            vel = org.vel + force / m * p.dt
            speed = np.hypot(vel[:, 0], vel[:, 1])
            over = speed > p.speed_limit
            if over.any():
                vel[over] *= (p.speed_limit / speed[over])[:, None]
            org.pos = org.pos + vel * p.dt
            damping = 1.0 - np.clip((self.genome.drag + p.drag_floor) * m, 0.0, 1.0)
            org.vel = vel * damping


def init_colony(genome: Genome, params: SimParams, env_seed: int,
                flags: AblationFlags = FULL_MODEL) -> Colony:
    """Seed a colony: one circular organism plus freshly placed sources."""
    return Colony(genome, params, env_seed, flags)


def grow(genome: Genome, params: SimParams, env_seed: int, n_steps: int,
         flags: AblationFlags = FULL_MODEL,
         layer_height_mm: float = 0.2, units_to_mm: float = 0.35) -> FormHistory:
    """Run the developmental simulation and return the captured layer stack.

    Emits exactly one layer per simulated timestep, starting with the seeded
    circle, so ``n_steps`` layers come out of an ``n_steps``-step run (the
    degenerate zero-step call still captures the seed). A colony that dies
    out ends the stack early at its last live layer.
    """
    if n_steps > params.max_steps:
        raise ValueError(f"n_steps {n_steps} exceeds the {params.max_steps}-layer cap")
    colony = init_colony(genome, params, env_seed, flags)
    layers = [colony.snapshot_layer()]
    for _ in range(1, n_steps):
        layer = colony.step()
        if not colony.alive:
            break
        layers.append(layer)
    return FormHistory(layers=layers, layer_height_mm=layer_height_mm,
                       units_to_mm=units_to_mm)
