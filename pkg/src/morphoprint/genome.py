"""The five evolvable alleles that parameterise colony development.

A colony shares one genome. The alleles control how cells turn nutrients
into energy, how hard the medium damps their motion, how much energy a
cell can store before dividing, how stiff the connecting springs are, and
where an over-energised organism pinches itself in two.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import config
from .errors import ConfigError

ALLELE_ORDER = ("metabolism", "drag", "energy_capacity", "stiffness", "split_ratio")


@dataclass(frozen=True)
class Genome:
    metabolism: float       # energy gained per absorbed nutrient unit; also scales upkeep
    drag: float             # damping coefficient per unit of cell mass
    energy_capacity: float  # storage cap; reaching it triggers cell division
    stiffness: float        # edge spring coefficient
    split_ratio: float      # energy fraction walked off when an organism splits

    def __post_init__(self):
        config.require(self.metabolism >= 0, "genome.metabolism", "must be >= 0")
        config.require(self.drag > 0, "genome.drag", "must be > 0")
        config.require(self.energy_capacity > 0, "genome.energy_capacity", "must be > 0")
        config.require(self.stiffness > 0, "genome.stiffness", "must be > 0")
        config.require(0 < self.split_ratio < 1, "genome.split_ratio", "must lie in (0, 1)")

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in ALLELE_ORDER}

    @classmethod
    def from_dict(cls, data: dict, path: str = "genome") -> "Genome":
        return config.from_mapping(cls, data, path)

    @classmethod
    def from_file(cls, path) -> "Genome":
        return cls.from_dict(config.load_json(path))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in ALLELE_ORDER])

    @classmethod
    def from_array(cls, values) -> "Genome":
        vals = np.asarray(values, dtype=float)
        if vals.shape != (len(ALLELE_ORDER),):
            raise ValueError(f"expected {len(ALLELE_ORDER)} alleles, got shape {vals.shape}")
        return cls(**dict(zip(ALLELE_ORDER, map(float, vals))))


@dataclass(frozen=True)
class SearchBox:
    """Per-allele [low, high] bounds for sampling and clamping genomes."""

    metabolism: tuple = (0.0, 0.02)
    drag: tuple = (0.02, 1.0)
    energy_capacity: tuple = (2.0, 8.0)
    stiffness: tuple = (0.1, 5.0)
    split_ratio: tuple = (0.1, 0.9)

    def __post_init__(self):
        for name in ALLELE_ORDER:
            lo, hi = getattr(self, name)
            config.require(lo < hi, f"search_box.{name}", "low bound must be below high")

    def lows(self) -> np.ndarray:
        return np.array([getattr(self, name)[0] for name in ALLELE_ORDER])

    def highs(self) -> np.ndarray:
        return np.array([getattr(self, name)[1] for name in ALLELE_ORDER])

    def sample(self, rng: np.random.Generator) -> Genome:
        return Genome.from_array(rng.uniform(self.lows(), self.highs()))

    def clamp(self, values) -> np.ndarray:
        return np.clip(np.asarray(values, dtype=float), self.lows(), self.highs())

    def normalize(self, genome: Genome) -> np.ndarray:
        """Affinely map alleles into the unit box the optimizer works in."""
        lo, hi = self.lows(), self.highs()
        return (genome.as_array() - lo) / (hi - lo)

    def denormalize(self, unit_values) -> Genome:
        lo, hi = self.lows(), self.highs()
        vals = lo + np.clip(np.asarray(unit_values, dtype=float), 0.0, 1.0) * (hi - lo)
        return Genome.from_array(vals)

    def to_dict(self) -> dict:
        return {name: list(getattr(self, name)) for name in ALLELE_ORDER}

    @classmethod
    def from_dict(cls, data: dict, path: str = "search_box") -> "SearchBox":
        if not isinstance(data, dict):
            raise ConfigError(path, "expected a JSON object")
        unknown = set(data) - set(ALLELE_ORDER)
        if unknown:
            raise ConfigError(f"{path}.{sorted(unknown)[0]}", "unknown key")
        kwargs = {}
        for name, bounds in data.items():
            if (not isinstance(bounds, (list, tuple)) or len(bounds) != 2
                    or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in bounds)):
                raise ConfigError(f"{path}.{name}", "expected [low, high]")
            kwargs[name] = (float(bounds[0]), float(bounds[1]))
        return cls(**kwargs)


DEFAULT_SEARCH_BOX = SearchBox()

assert tuple(f.name for f in fields(Genome)) == ALLELE_ORDER
