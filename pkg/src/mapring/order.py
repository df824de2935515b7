"""Monomial orders on exponent tuples."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

GREVLEX = "graded-reverse-lexicographic"
ELIMINATION = "lexicographic-elimination"
_KINDS = (GREVLEX, ELIMINATION)


@dataclass(frozen=True)
class MonomialOrder:
    """A monomial order described by its kind and a generator priority.

    ``priority`` lists generator indices from most to least significant; ``None``
    means declaration order. For the elimination kind the first ``eliminate``
    entries of the priority form a block that is compared first (grevlex inside
    each block), so any monomial touching that block is larger than every
    monomial free of it.
    """

    kind: str = GREVLEX
    priority: tuple[int, ...] | None = None
    eliminate: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown monomial order kind {self.kind!r}")
        if self.priority is not None:
            object.__setattr__(self, "priority", tuple(int(i) for i in self.priority))
            if sorted(self.priority) != list(range(len(self.priority))):
                raise ValueError("priority must be a permutation of generator indices")
        if self.eliminate < 0:
            raise ValueError("eliminate must be nonnegative")
        if self.kind == GREVLEX and self.eliminate:
            raise ValueError("graded order takes no eliminated block")

    def resolved_priority(self, nvars: int) -> tuple[int, ...]:
        if self.priority is None:
            return tuple(range(nvars))
        if len(self.priority) != nvars:
            raise ValueError(f"order priority has {len(self.priority)} entries, ring has {nvars} generators")
        return self.priority

    def key(self, weights: Sequence[int]) -> Callable[[tuple[int, ...]], tuple]:
        """Sort key: larger key means larger monomial."""
        if any(w <= 0 for w in weights):
            raise ValueError("monomial orders need positive generator degrees")
        prio = self.resolved_priority(len(weights))
        if self.kind == GREVLEX:
            return _block_key([prio], weights)
        if self.eliminate > len(prio):
            raise ValueError("eliminated block larger than the ring")
        return _block_key([prio[: self.eliminate], prio[self.eliminate:]], weights)

    def to_json(self, names: Sequence[str]) -> dict:
        prio = self.resolved_priority(len(names))
        out = {"kind": self.kind, "priority": [names[i] for i in prio]}
        if self.kind == ELIMINATION:
            out["eliminate"] = self.eliminate
        return out

    @classmethod
    def from_json(cls, data: dict, names: Sequence[str]) -> "MonomialOrder":
        index = {n: i for i, n in enumerate(names)}
        prio = data.get("priority")
        priority = None if prio is None else tuple(index[n] for n in prio)
        if priority == tuple(range(len(names))):
            priority = None  # declaration order
        return cls(data.get("kind", GREVLEX), priority, int(data.get("eliminate", 0)))


def _block_key(blocks, weights):
    blocks = [tuple(b) for b in blocks if b]
    wts = tuple(weights)

    if len(blocks) == 1:
        (block,) = blocks
        rev = block[::-1]

        def key(e):
            return (sum(w * x for w, x in zip(wts, e)),) + tuple(-e[i] for i in rev)

        return key

    def key(e):
        parts = []
        for block in blocks:
            parts.append(sum(wts[i] * e[i] for i in block))
            parts.extend(-e[i] for i in reversed(block))
        return tuple(parts)

    return key


DEFAULT_ORDER = MonomialOrder()
