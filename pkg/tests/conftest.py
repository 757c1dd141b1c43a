"""Shared scenario builders for the test suite."""

from __future__ import annotations

import random

import pytest


def flat_scenario(
    width: int,
    height: int,
    units: list[dict],
    objectives: list[dict] | None = None,
    max_turns: int = 10,
    terrain: list[str] | None = None,
    deterministic: bool = True,
    name: str = "test",
) -> dict:
    doc = {
        "name": name,
        "width": width,
        "height": height,
        "max_turns": max_turns,
        "terrain": terrain or ["c" * width for _ in range(height)],
        "units": units,
        "combat": {"deterministic": deterministic},
    }
    if objectives:
        doc["objectives"] = objectives
    return doc


def unit(uid: int, faction: str, q: int, r: int, strength: int = 100, kind: str = "infantry") -> dict:
    return {"id": uid, "faction": faction, "kind": kind, "strength": strength, "q": q, "r": r}


def objective(q: int, r: int, value: int) -> dict:
    return {"q": q, "r": r, "value": value}


def random_scenario(rng: random.Random) -> dict:
    """Small fuzzed scenario: random terrain, 1-4 units per side, 0-2 objectives."""
    width = rng.randint(4, 8)
    height = rng.randint(4, 8)
    terrain = [
        "".join(rng.choice("cccrruw") for _ in range(width)) for _ in range(height)
    ]
    open_cells = [
        (q, r)
        for r in range(height)
        for q in range(width)
        if terrain[r][q] != "w"
    ]
    # Guarantee enough dry land to place everyone.
    while len(open_cells) < 10:
        r = rng.randrange(height)
        q = rng.randrange(width)
        if terrain[r][q] == "w":
            terrain[r] = terrain[r][:q] + "c" + terrain[r][q + 1 :]
            open_cells.append((q, r))

    rng.shuffle(open_cells)
    units = []
    uid = 1
    for faction in ("blue", "red"):
        for _ in range(rng.randint(1, 4)):
            q, r = open_cells.pop()
            units.append(unit(uid, faction, q, r, strength=rng.randint(10, 100)))
            uid += 1
    objectives = [
        {"q": c[0], "r": c[1], "value": rng.randint(1, 3)}
        for c in (open_cells.pop(), open_cells.pop())[: rng.randint(0, 2)]
    ]
    return flat_scenario(
        width,
        height,
        units,
        objectives=objectives,
        max_turns=rng.randint(4, 10),
        terrain=terrain,
        deterministic=rng.random() < 0.5,
        name="fuzz",
    )


@pytest.fixture
def duel() -> dict:
    """1v1 on open ground with a central objective."""
    return flat_scenario(
        5,
        5,
        [unit(1, "blue", 0, 2), unit(2, "red", 4, 2, strength=60)],
        objectives=[{"q": 2, "r": 2, "value": 2}],
        max_turns=15,
    )


@pytest.fixture
def toy_1v1() -> dict:
    """Enumerably small kill map: passive red dies to one full-strength hit."""
    return flat_scenario(
        4,
        1,
        [unit(1, "blue", 0, 0), unit(2, "red", 2, 0, strength=40)],
        max_turns=8,
    )
