"""Sampled one-parameter families of configurations of a fixed surface."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import EmbeddedPolyhedron, distance_matrix
from .surface import SimplicialSurface


@dataclass
class FlexPath:
    surface: SimplicialSurface
    params: np.ndarray
    configs: list  # one (v, 3) coordinate array per sample
    label: str = "r"
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.configs)

    def polyhedron(self, i: int) -> EmbeddedPolyhedron:
        return EmbeddedPolyhedron(self.surface, self.configs[i])

    def polyhedra(self):
        return [self.polyhedron(i) for i in range(len(self))]

    def edge_length_table(self) -> np.ndarray:
        e = np.array(self.surface.edges)
        c = np.asarray(self.configs)
        return np.linalg.norm(c[:, e[:, 0]] - c[:, e[:, 1]], axis=-1)

    def edge_drift(self) -> float:
        """Largest absolute deviation of any edge length from its value at the first sample."""
        L = self.edge_length_table()
        return float(np.max(np.abs(L - L[0])))

    def max_step(self) -> float:
        c = np.asarray(self.configs)
        if len(c) < 2:
            return 0.0
        return float(np.max(np.linalg.norm(np.diff(c, axis=0), axis=-1)))

    def congruent_pairs(self, tol: float) -> list[tuple[int, int]]:
        """Index pairs of samples whose labeled distance matrices agree within ``tol``."""
        D = np.array([distance_matrix(c).ravel() for c in self.configs])
        pairs = []
        for i in range(len(D) - 1):
            diff = np.max(np.abs(D[i + 1:] - D[i]), axis=1)
            pairs.extend((i, i + 1 + j) for j in np.flatnonzero(diff <= tol))
        return pairs
