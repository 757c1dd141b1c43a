"""Axial coordinate geometry checked against graph-search ground truth."""

from __future__ import annotations

import random

import pytest

import oracles
from warhex.hexgrid import (
    DIRECTIONS,
    HexCoord,
    disk,
    distance,
    fractional_distance,
    neighbor,
    radial_target,
    ring,
    round_to_hex,
)


def test_direction_table():
    assert DIRECTIONS == (
        HexCoord(1, 0),
        HexCoord(1, -1),
        HexCoord(0, -1),
        HexCoord(-1, 0),
        HexCoord(-1, 1),
        HexCoord(0, 1),
    )


def test_neighbor_applies_offset():
    assert neighbor(HexCoord(2, 3), 0) == HexCoord(3, 3)
    assert neighbor(HexCoord(2, 3), 4) == HexCoord(1, 4)
    with pytest.raises(IndexError):
        neighbor(HexCoord(0, 0), 6)


def test_distance_matches_bfs_exhaustively():
    """Closed-form distance equals shortest path length for all pairs in radius 8."""
    center = (0, 0)
    cells = [(q, r) for q in range(-8, 9) for r in range(-8, 9)]
    for cell in cells:
        expected = oracles.bfs_distance(center, cell, limit=20)
        assert distance(HexCoord(*center), HexCoord(*cell)) == expected


def test_distance_properties():
    rng = random.Random(7)
    for _ in range(200):
        a = HexCoord(rng.randint(-20, 20), rng.randint(-20, 20))
        b = HexCoord(rng.randint(-20, 20), rng.randint(-20, 20))
        c = HexCoord(rng.randint(-20, 20), rng.randint(-20, 20))
        assert distance(a, b) == distance(b, a)
        assert distance(a, b) >= 0
        assert distance(a, c) <= distance(a, b) + distance(b, c)
        assert (distance(a, b) == 0) == (a == b)


def test_ring_size_and_membership():
    center = HexCoord(3, -2)
    for radius in range(1, 7):
        cells = ring(center, radius)
        assert len(cells) == 6 * radius
        assert len(set(cells)) == len(cells)
        assert all(distance(center, c) == radius for c in cells)


def test_ring_starts_east_and_walks_the_stated_directions():
    center = HexCoord(0, 0)
    cells = ring(center, 2)
    assert cells[0] == HexCoord(2, 0)
    # Each consecutive pair differs by a unit direction; the walk uses
    # directions 2,3,4,5,0,1, each taken `radius` times.
    walk = []
    for a, b in zip(cells, cells[1:]):
        step = HexCoord(b.q - a.q, b.r - a.r)
        walk.append(DIRECTIONS.index(step))
    assert walk == [2, 2, 3, 3, 4, 4, 5, 5, 0, 0, 1]


def test_ring_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        ring(HexCoord(0, 0), 0)


def test_disk_size_closed_form():
    center = HexCoord(1, 1)
    for radius in range(1, 7):
        cells = disk(center, radius)
        assert len(cells) == 1 + 3 * radius * (radius + 1)
        assert cells[0] == center
        assert len(set(cells)) == len(cells)
    assert disk(center, 0) == [center]


def test_disk_orders_by_ring():
    center = HexCoord(0, 0)
    cells = disk(center, 3)
    radii = [distance(center, c) for c in cells]
    assert radii == sorted(radii)


def test_radial_target_is_nearest_ring_cell():
    """Exhaustive argmin over the ring, ties to the smallest ring index."""
    rng = random.Random(11)
    center = HexCoord(0, 0)
    for _ in range(300):
        radius = rng.randint(1, 4)
        far = HexCoord(rng.randint(-15, 15), rng.randint(-15, 15))
        if distance(center, far) <= radius:
            continue
        cells = ring(center, radius)
        dists = [distance(far, c) for c in cells]
        best = min(dists)
        expected = cells[dists.index(best)]
        assert radial_target(center, far, radius) == expected


def test_radial_target_rejects_near_points():
    with pytest.raises(ValueError):
        radial_target(HexCoord(0, 0), HexCoord(1, 0), 2)


def test_round_to_hex_fixed_points_and_nearest():
    rng = random.Random(3)
    for _ in range(100):
        h = HexCoord(rng.randint(-10, 10), rng.randint(-10, 10))
        assert round_to_hex(float(h.q), float(h.r)) == h
    # Small perturbations stay on the same hex.
    for _ in range(100):
        h = HexCoord(rng.randint(-10, 10), rng.randint(-10, 10))
        assert round_to_hex(h.q + 0.2, h.r - 0.2) == h


def test_fractional_distance_extends_integer_metric():
    rng = random.Random(5)
    for _ in range(100):
        a = HexCoord(rng.randint(-10, 10), rng.randint(-10, 10))
        b = HexCoord(rng.randint(-10, 10), rng.randint(-10, 10))
        assert fractional_distance(a, b) == pytest.approx(distance(a, b))
