"""Axial hex-coordinate geometry: distance, rings, disks, radial binning.

All board positions are axial (q, r) pairs. The six neighbor directions are
fixed in a canonical index order so that every tie-break in the rest of the
codebase ("lowest direction index") is well defined.
"""

from __future__ import annotations

from typing import NamedTuple


class HexCoord(NamedTuple):
    q: int
    r: int


# Canonical neighbor offsets, index 0..5.
DIRECTIONS: tuple[HexCoord, ...] = (
    HexCoord(1, 0),
    HexCoord(1, -1),
    HexCoord(0, -1),
    HexCoord(-1, 0),
    HexCoord(-1, 1),
    HexCoord(0, 1),
)

# Ring tracing starts at center + radius * DIRECTIONS[0] and walks the
# perimeter in this direction order.
_RING_WALK = (2, 3, 4, 5, 0, 1)


def neighbor(pos: HexCoord, direction: int) -> HexCoord:
    dq, dr = DIRECTIONS[direction]
    return HexCoord(pos[0] + dq, pos[1] + dr)


def distance(a: HexCoord, b: HexCoord) -> int:
    """Hex metric between two axial coordinates."""
    dq = a[0] - b[0]
    dr = a[1] - b[1]
    return (abs(dq) + abs(dr) + abs(dq + dr)) // 2


def ring(center: HexCoord, radius: int) -> list[HexCoord]:
    """The 6*radius cells at exactly `radius` hexes from center.

    Enumeration starts at center + (radius, 0) and walks `radius` steps in
    each direction of the canonical walk order.
    """
    if radius < 1:
        raise ValueError(f"ring radius must be >= 1, got {radius}")
    cells = []
    cur = HexCoord(center[0] + radius, center[1])
    for d in _RING_WALK:
        for _ in range(radius):
            cells.append(cur)
            cur = neighbor(cur, d)
    return cells


def disk(center: HexCoord, radius: int) -> list[HexCoord]:
    """Center followed by ring(1)..ring(radius); 1 + 3*radius*(radius+1) cells.

    This ordering is the canonical cell ordering used by observation vectors.
    """
    if radius < 0:
        raise ValueError(f"disk radius must be >= 0, got {radius}")
    cells = [HexCoord(center[0], center[1])]
    for r in range(1, radius + 1):
        cells.extend(ring(center, r))
    return cells


def radial_target(center: HexCoord, far: HexCoord, radius: int) -> HexCoord:
    """The ring(center, radius) cell nearest to `far`.

    Ties break to the smallest ring enumeration index. Used to bin distant
    content into a fixed-size local window.
    """
    if distance(center, far) <= radius:
        raise ValueError(
            f"radial_target requires distance(center, far) > radius "
            f"({center} -> {far} is within {radius})"
        )
    best = None
    best_d = None
    for cell in ring(center, radius):
        d = distance(cell, far)
        if best_d is None or d < best_d:
            best, best_d = cell, d
    return best


def round_to_hex(qf: float, rf: float) -> HexCoord:
    """Nearest hex to fractional axial coordinates (cube rounding)."""
    sf = -qf - rf
    q, r, s = round(qf), round(rf), round(sf)
    dq, dr, ds = abs(q - qf), abs(r - rf), abs(s - sf)
    if dq > dr and dq > ds:
        q = -r - s
    elif dr > ds:
        r = -q - s
    return HexCoord(int(q), int(r))


def fractional_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Hex metric extended to fractional axial coordinates (for centroids)."""
    dq = a[0] - b[0]
    dr = a[1] - b[1]
    return (abs(dq) + abs(dr) + abs(dq + dr)) / 2.0
