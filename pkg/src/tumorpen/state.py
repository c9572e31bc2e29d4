"""All evolving fields at one time level."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .grid import Grid, all_finite

SCALAR_FIELDS = ("P", "Q", "D", "C", "phi")
VECTOR_FIELDS = ("v", "m")


@dataclass
class State:
    grid: Grid
    t: float
    P: np.ndarray
    Q: np.ndarray
    D: np.ndarray
    C: np.ndarray
    v: np.ndarray
    m: np.ndarray
    phi: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid, phi=None, t: float = 0.0) -> "State":
        return cls(
            grid=grid,
            t=t,
            P=grid.zeros(),
            Q=grid.zeros(),
            D=grid.zeros(),
            C=grid.zeros(),
            v=grid.zeros_vector(),
            m=grid.zeros_vector(),
            phi=grid.zeros() + 1.0 if phi is None else np.array(phi, dtype=float),
        )

    @property
    def rho(self) -> np.ndarray:
        return self.P + self.Q + self.D

    def copy(self) -> "State":
        arrays = {f.name: getattr(self, f.name).copy() for f in fields(self) if isinstance(getattr(self, f.name), np.ndarray)}
        return replace(self, **arrays)

    def is_finite(self) -> bool:
        return all_finite(*(getattr(self, name) for name in SCALAR_FIELDS + VECTOR_FIELDS))

    def named_fields(self) -> dict[str, np.ndarray]:
        """Flat name -> scalar array view; vector components get a numeric suffix."""
        out = {name: getattr(self, name) for name in ("P", "Q", "D", "C")}
        for name in VECTOR_FIELDS:
            for k in range(self.grid.dim):
                out[f"{name}{k}"] = getattr(self, name)[k]
        out["phi"] = self.phi
        return out
