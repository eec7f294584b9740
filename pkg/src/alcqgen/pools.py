"""Term pools: the two fixed vocabularies datasets are generated from."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownPool


@dataclass(frozen=True)
class Pool:
    name: str
    kind: str  # "people" | "things" — drives someone/something phrasing
    concepts: tuple[str, ...]
    roles: tuple[str, ...]
    individuals: tuple[str, ...]


POOL_A = Pool(
    name="A",
    kind="people",
    concepts=(
        "red", "blue", "green", "kind", "nice", "big", "cold",
        "young", "round", "rough", "orange", "smart", "quiet", "furry",
    ),
    roles=("likes", "loves", "eats", "chases", "admires"),
    individuals=("Anne", "Bob", "Charlie", "Dave", "Erin", "Fiona", "Gary", "Harry"),
)

POOL_B = Pool(
    name="B",
    kind="people",
    concepts=(
        "ambitious", "confident", "creative", "determined",
        "enthusiastic", "innovative", "logical", "persevering",
    ),
    roles=(
        "admires", "consults", "guides", "instructs",
        "leads", "mentors", "supervises", "supports",
    ),
    individuals=(
        "Ioanna", "Dimitrios", "Eleni", "Maria",
        "Manolis", "Angelos", "Panos", "Anna",
    ),
)

_POOLS = {"A": POOL_A, "B": POOL_B}


def load_pool(name: str) -> Pool:
    try:
        return _POOLS[name]
    except KeyError:
        raise UnknownPool(f"no pool named {name!r}; choose A or B") from None
