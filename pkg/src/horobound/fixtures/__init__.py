"""Bundled example documents (spaces and trees of spaces)."""
from __future__ import annotations

from pathlib import Path

HERE = Path(__file__).resolve().parent


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture; ``name`` may omit the ``.json`` suffix."""
    p = HERE / (name if name.endswith(".json") else f"{name}.json")
    if not p.exists():
        raise FileNotFoundError(f"no bundled fixture {name!r}; have {sorted(x.stem for x in HERE.glob('*.json'))}")
    return p


def names() -> list[str]:
    return sorted(x.stem for x in HERE.glob("*.json"))
