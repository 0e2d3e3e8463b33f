"""The captured layer stack: one list of closed outlines per timestep.

Stacked at a fixed layer height, the outlines are the 3D form; every other
part of the pipeline (fitness, export) consumes this structure. Outlines
are stored in environment units without a repeated closing vertex.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

FORMAT_VERSION = 1
MAX_LAYERS = 1000  # printer ceiling: 20 cm at 0.2 mm per layer


@dataclass
class FormHistory:
    layers: list = field(default_factory=list)  # [step][organism] -> (n, 2) array
    layer_height_mm: float = 0.2
    units_to_mm: float = 0.35

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    def height_mm(self) -> float:
        return self.n_layers * self.layer_height_mm

    @property
    def layer_height_units(self) -> float:
        """Layer height expressed in environment units."""
        return self.layer_height_mm / self.units_to_mm

    def validate(self) -> None:
        if self.n_layers > MAX_LAYERS:
            raise ConfigError("history.layers", f"layer count exceeds the {MAX_LAYERS}-layer cap")
        for i, layer in enumerate(self.layers):
            for j, poly in enumerate(layer):
                pts = np.asarray(poly)
                if pts.ndim != 2 or pts.shape[1] != 2 or len(np.unique(pts, axis=0)) < 3:
                    raise ConfigError(f"history.layers[{i}][{j}]",
                                      "outline needs at least 3 distinct vertices")

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "layer_height_mm": self.layer_height_mm,
            "units_to_mm": self.units_to_mm,
            "layers": [[np.asarray(p).tolist() for p in layer] for layer in self.layers],
        }

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def from_dict(cls, data: dict) -> "FormHistory":
        if not isinstance(data, dict):
            raise ConfigError("history", "expected a JSON object")
        version = data.get("version")
        if version != FORMAT_VERSION:
            raise ConfigError("history.version", f"unsupported version {version!r}")
        known = {"version", "layer_height_mm", "units_to_mm", "layers"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"history.{sorted(unknown)[0]}", "unknown key")
        try:
            layers = [[np.asarray(poly, dtype=float).reshape(-1, 2) for poly in layer]
                      for layer in data["layers"]]
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError("history.layers", f"malformed layer data: {exc}") from exc
        hist = cls(layers=layers,
                   layer_height_mm=float(data.get("layer_height_mm", 0.2)),
                   units_to_mm=float(data.get("units_to_mm", 0.35)))
        hist.validate()
        return hist

    @classmethod
    def load(cls, path: str | Path) -> "FormHistory":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(str(path), "file not found") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)
