"""Hexagonal cell layout, energy-sharing neighbors and interferer sets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# axial-coordinate steps to the six adjacent hexagons
_AXIAL_DIRECTIONS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))


@dataclass(frozen=True)
class Layout:
    """Finite flat-top hexagonal grid centred on site 0 at the origin."""

    cell_radius: float
    positions: np.ndarray  # (N, 2) metres
    tiers: np.ndarray  # (N,) ring index, 0 for the centre site
    _neighbors: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def n_sites(self) -> int:
        return len(self.positions)

    @property
    def site_ids(self) -> list[int]:
        return list(range(self.n_sites))

    @property
    def sites(self) -> list[tuple[int, float, float]]:
        return [(i, float(x), float(y)) for i, (x, y) in enumerate(self.positions)]

    def tier_of(self, site_id: int) -> int:
        self._check(site_id)
        return int(self.tiers[site_id])

    def distances_from(self, site_id: int) -> np.ndarray:
        self._check(site_id)
        return np.hypot(*(self.positions - self.positions[site_id]).T)

    def _check(self, site_id: int) -> None:
        if not 0 <= site_id < self.n_sites:
            raise KeyError(f"unknown site_id {site_id}")


def _axial_ring_coords(tiers: int) -> list[tuple[int, int, int]]:
    coords = [(0, 0, 0)]
    for k in range(1, tiers + 1):
        q, r = -k, k  # start at direction 4 scaled by k
        for dq, dr in _AXIAL_DIRECTIONS:
            for _ in range(k):
                coords.append((q, r, k))
                q, r = q + dq, r + dr
    return coords


def build_hex_layout(cell_radius: float, tiers: int = 2) -> Layout:
    """Build the centre cell plus ``tiers`` surrounding rings.

    Site ids are assigned ring by ring, so ids 1..6 are always the first tier.
    """
    if not cell_radius > 0:
        raise ValueError("cell_radius must be positive")
    if tiers not in (1, 2):
        raise ValueError(f"tiers must be 1 or 2, got {tiers}")

    coords = _axial_ring_coords(tiers)
    positions = np.array(
        [
            (1.5 * cell_radius * q, math.sqrt(3.0) * cell_radius * (r + q / 2.0))
            for q, r, _ in coords
        ]
    )
    ring = np.array([k for _, _, k in coords])

    spacing = math.sqrt(3.0) * cell_radius
    tol = 1e-6 * cell_radius
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    adjacent = np.abs(dist - spacing) <= tol
    neighbors = tuple(tuple(int(j) for j in np.flatnonzero(row)) for row in adjacent)
    return Layout(cell_radius, positions, ring, neighbors)


def first_tier_neighbors(layout: Layout, site_id: int) -> list[int]:
    """Sites one hexagon away; boundary sites of the finite grid get fewer than 6."""
    layout._check(site_id)
    return list(layout._neighbors[site_id])


def interferer_set(layout: Layout, site_id: int = 0) -> list[int]:
    """Every other site, nearest first (ties by ascending id)."""
    d = layout.distances_from(site_id)
    order = np.lexsort((np.arange(layout.n_sites), np.round(d / layout.cell_radius, 9)))
    return [int(i) for i in order if i != site_id]


def sample_in_hexagons(
    layout: Layout, site_ids: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Uniform points inside the hexagon of each entry of ``site_ids``.

    Each hexagon is split into six equilateral triangles; a triangle is picked
    uniformly and a point drawn uniformly inside it.
    """
    site_ids = np.asarray(site_ids, dtype=int)
    n = site_ids.size
    tri = rng.integers(0, 6, size=n)
    u = rng.random((n, 2))
    flip = u.sum(axis=1) > 1.0
    u[flip] = 1.0 - u[flip]
    a0 = tri * (np.pi / 3.0)
    a1 = a0 + np.pi / 3.0
    R = layout.cell_radius
    v0 = np.stack([np.cos(a0), np.sin(a0)], axis=1) * R
    v1 = np.stack([np.cos(a1), np.sin(a1)], axis=1) * R
    offsets = u[:, :1] * v0 + u[:, 1:] * v1
    return layout.positions[site_ids] + offsets
