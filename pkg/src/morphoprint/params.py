"""Simulation constants for the developmental environment.

Everything here is configuration, not genetics: the values are shared by
every individual in a run and can be overridden from a JSON document.
Energy rules are applied once per timestep; `dt` scales kinematics and the
nutrient diffusion update.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict

from . import config


@dataclass(frozen=True)
class SimParams:
    # physics
    repulsion_radius: float = 3.0       # cells push each other apart inside this range
    repulsion_strength: float = 1.0
    spring_scale: float = 1.0           # multiplies the genome's stiffness allele
    split_attraction: float = 5.0       # pull between a marked organism-split pair
    drag_floor: float = 0.0             # additive damping, normally 0 (genome drag rules)
    speed_limit: float = 1.5            # per-step displacement cap, env units
    min_distance: float = 1e-3          # repulsion distance clamp, avoids 1/0
    dt: float = 1.0
    # mass and rest-length laws
    mass_per_energy: float = 1.0        # mass = mass_floor + mass_per_energy * energy
    mass_floor: float = 0.1
    rest_length_scale: float = 3.2      # rest = scale * sqrt(energy_tail + energy_head)
    rest_energy_floor: float = 1e-3     # used when both endpoint energies are zero
    # energy economy
    init_energy: float = 5.0            # every seeded cell starts here
    cost_of_living: float = 1e-3
    movement_cost: float = 0.1          # scales nutrient-chasing upkeep
    energy_diffusion: float = 0.1       # fraction of donor energy moved per edge
    transfer_loss: float = 0.4          # energy lost per unit edge length in transfer
    absorb_cap: float = 1.0             # max nutrient units a cell can draw per step
    # nutrient perception
    nutrient_force: float = 0.05        # force magnitude per unit of cell energy
    sense_radius: float = 40.0
    # environment and field
    env_size: float = 600.0
    grid_tiles: int = 15
    n_sources: int = 5
    source_rate: float = 0.1            # nutrient units emitted per source per step
    source_capacity_low: float = 5.0
    source_capacity_high: float = 10.0
    nutrient_diffusion: float = 0.5
    nutrient_decay: float = 0.005
    # seeding
    init_radius: float = 100.0
    max_steps: int = 1000

    @property
    def org_split_energy(self) -> float:
        """Organism-level division threshold, pinned at 10x the seed energy."""
        return 10.0 * self.init_energy

    @property
    def tile_size(self) -> float:
        return self.env_size / self.grid_tiles

    def __post_init__(self):
        positive = (
            "repulsion_radius", "repulsion_strength", "spring_scale", "speed_limit",
            "min_distance", "dt", "mass_per_energy", "mass_floor", "rest_length_scale",
            "rest_energy_floor", "init_energy", "absorb_cap", "sense_radius", "env_size",
            "source_rate", "source_capacity_low", "init_radius",
        )
        nonnegative = (
            "split_attraction", "drag_floor", "cost_of_living", "movement_cost",
            "energy_diffusion", "transfer_loss", "nutrient_force", "nutrient_diffusion",
            "nutrient_decay",
        )
        for name in positive:
            config.require(getattr(self, name) > 0, f"params.{name}", "must be > 0")
        for name in nonnegative:
            config.require(getattr(self, name) >= 0, f"params.{name}", "must be >= 0")
        config.require(self.grid_tiles >= 3, "params.grid_tiles", "must be >= 3")
        config.require(self.n_sources >= 1, "params.n_sources", "must be >= 1")
        config.require(self.max_steps >= 1, "params.max_steps", "must be >= 1")
        config.require(
            self.source_capacity_high >= self.source_capacity_low,
            "params.source_capacity_high", "must be >= source_capacity_low",
        )
        # explicit-stencil stability for the nutrient update
        stable = self.nutrient_diffusion**2 * self.dt <= 0.25 + 1e-12
        config.require(stable, "params.nutrient_diffusion",
                       "diffusion unstable: need nutrient_diffusion^2 * dt <= 0.25")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict, path: str = "params") -> "SimParams":
        return config.from_mapping(cls, data, path)

    @classmethod
    def from_file(cls, path) -> "SimParams":
        return cls.from_dict(config.load_json(path))
