"""Finite relational structures."""

from __future__ import annotations

from typing import Iterable, Mapping


class StructureError(ValueError):
    pass


class RelStructure:
    """A finite structure over the universe ``0 .. n-1``.

    Every element ``i`` gets the constant ``a{i+1}``.  The identity relation
    ``=`` and the empty unary relation ``empty`` are always present.
    """

    def __init__(
        self,
        universe_size: int,
        relations: Mapping[str, tuple[int, Iterable]] = (),
        constants: Mapping[str, int] = (),
    ):
        if universe_size < 1:
            raise StructureError("universe must have at least one element")
        self.universe_size = n = universe_size
        self.constants = {f"a{i + 1}": i for i in range(n)}
        for name, e in dict(constants).items():
            if not 0 <= e < n:
                raise StructureError(f"constant {name} denotes {e}, outside 0..{n - 1}")
            self.constants[name] = e
        self.relations: dict = {}
        for name, (k, tuples) in dict(relations).items():
            if name in ("=", "empty"):
                raise StructureError(f"relation {name!r} is built in")
            ts = frozenset(tuple(t) for t in tuples)
            for t in ts:
                if len(t) != k:
                    raise StructureError(f"relation {name} has arity {k}, got tuple {t}")
                if any(not 0 <= v < n for v in t):
                    raise StructureError(f"relation {name}: tuple {t} leaves the universe")
            self.relations[name] = (k, ts)
        self.relations["="] = (2, frozenset((i, i) for i in range(n)))
        self.relations["empty"] = (1, frozenset())

    @property
    def universe(self) -> range:
        return range(self.universe_size)

    def arity(self, name: str) -> int:
        try:
            return self.relations[name][0]
        except KeyError:
            raise StructureError(f"unknown relation {name!r}") from None

    def holds(self, name: str, *elems: int) -> bool:
        return tuple(elems) in self.relations[name][1]

    def __getitem__(self, name: str) -> frozenset:
        return self.relations[name][1]

    def element(self, const: str) -> int:
        try:
            return self.constants[const]
        except KeyError:
            raise StructureError(f"unknown constant {const!r}") from None

    def __eq__(self, other):
        return (
            isinstance(other, RelStructure)
            and self.universe_size == other.universe_size
            and self.constants == other.constants
            and self.relations == other.relations
        )

    def __repr__(self):
        rels = ", ".join(f"{k}/{v[0]}" for k, v in sorted(self.relations.items()))
        return f"RelStructure(n={self.universe_size}, {rels})"
