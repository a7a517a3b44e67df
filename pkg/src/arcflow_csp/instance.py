"""Problem instances for the 0-1 cutting stock problem.

An :class:`Instance` holds the roll capacity and an ordered list of item
types. Several types may share a width (they come from distinct rectangles
in the bar relaxation of a 2D packing problem), so types are never merged.

Text format::

    <m> <W>
    <w_1> <b_1>
    ...
    <w_m> <b_m>

Lines starting with ``#`` are comments.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

MASK64 = (1 << 64) - 1


class InstanceError(ValueError):
    """Raised for malformed or invalid instance data."""


@dataclass(frozen=True)
class Item:
    width: int
    demand: int
    original_index: int = 0


@dataclass(frozen=True)
class Instance:
    capacity: int
    items: tuple[Item, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.capacity < 1:
            raise InstanceError(f"capacity must be positive, got {self.capacity}")
        object.__setattr__(self, "items", tuple(self.items))
        for it in self.items:
            if it.width < 1:
                raise InstanceError(f"width must be positive, got {it.width}")
            if it.width > self.capacity:
                raise InstanceError(f"width {it.width} exceeds capacity {self.capacity}")
            if it.demand < 1:
                raise InstanceError(f"demand must be positive, got {it.demand}")

    @classmethod
    def from_pairs(cls, capacity: int, pairs: Iterable[tuple[int, int]]) -> "Instance":
        return cls(capacity, tuple(Item(w, b, k) for k, (w, b) in enumerate(pairs)))

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def widths(self) -> list[int]:
        return [it.width for it in self.items]

    @property
    def demands(self) -> list[int]:
        return [it.demand for it in self.items]

    def pairs(self) -> list[tuple[int, int]]:
        return [(it.width, it.demand) for it in self.items]

    def sorted_items(self) -> list[Item]:
        """Items by decreasing width, ties by original position."""
        return sorted(self.items, key=lambda it: (-it.width, it.original_index))

    def lower_bound(self) -> int:
        """max(max_i b_i, ceil(sum w_i b_i / W)); 0 for an empty instance."""
        if not self.items:
            return 0
        area = sum(it.width * it.demand for it in self.items)
        return max(max(self.demands), -(-area // self.capacity))


def parse_instance(text: str) -> Instance:
    """Parse the text format; errors carry the 1-based line number."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if len(toks) != 2:
            raise InstanceError(f"expected 2 tokens at line {lineno}, got {len(toks)}")
        try:
            a, b = int(toks[0]), int(toks[1])
        except ValueError:
            raise InstanceError(f"malformed token at line {lineno}: {line!r}") from None
        rows.append((lineno, a, b))
    if not rows:
        raise InstanceError("empty instance")
    (_, m, capacity), body = rows[0], rows[1:]
    if m < 0:
        raise InstanceError(f"negative item count at line {rows[0][0]}")
    if capacity < 1:
        raise InstanceError(f"capacity must be positive at line {rows[0][0]}")
    if len(body) != m:
        raise InstanceError(f"header declares {m} items but {len(body)} item lines follow")
    items = []
    for k, (lineno, w, b) in enumerate(body):
        if w <= 0:
            raise InstanceError(f"width must be positive at line {lineno}")
        if w > capacity:
            raise InstanceError(f"width exceeds capacity at line {lineno}")
        if b <= 0:
            raise InstanceError(f"demand must be positive at line {lineno}")
        items.append(Item(w, b, k))
    return Instance(capacity, tuple(items))


def serialize_instance(inst: Instance) -> str:
    lines = [f"{inst.m} {inst.capacity}"]
    lines += [f"{it.width} {it.demand}" for it in inst.items]
    return "\n".join(lines) + "\n"


def read_instance(path) -> Instance:
    with open(path) as fh:
        return parse_instance(fh.read())


def write_instance(inst: Instance, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(serialize_instance(inst))


class Rng:
    """splitmix64; identical seeds give identical streams everywhere."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: int, hi: int) -> int:
        return lo + self.next() % (hi - lo + 1)


# class -> (W, width range, demand range); classes 7-10 use the mixed ranges below
CLASSES = {
    1: (10, (1, 10), (1, 10)),
    2: (30, (1, 10), (1, 10)),
    3: (40, (1, 35), (1, 35)),
    4: (100, (1, 35), (1, 35)),
    5: (100, (1, 100), (1, 100)),
    6: (300, (1, 100), (1, 100)),
    7: (100, (66, 100), (1, 50)),
    8: (100, (1, 50), (66, 100)),
    9: (100, (50, 100), (50, 100)),
    10: (100, (1, 50), (1, 50)),
}
MIXED_CLASSES = (7, 8, 9, 10)


def class_item_types(class_id: int, n_items: int) -> list[int]:
    """Range type (a class id in 7..10) used for each generated item.

    ceil(0.7 n) items come from the class's own ranges; the rest cycle
    through the other three mixed classes in increasing order.
    """
    if class_id not in MIXED_CLASSES:
        return [class_id] * n_items
    own = -(-7 * n_items // 10)
    others = [c for c in MIXED_CLASSES if c != class_id]
    return [class_id] * own + [others[k % 3] for k in range(n_items - own)]


def generate_class(class_id: int, n_items: int, seed: int) -> Instance:
    if class_id not in CLASSES:
        raise InstanceError(f"invalid class id {class_id}; expected 1..10")
    if n_items < 1:
        raise InstanceError("n_items must be positive")
    rng = Rng(seed)
    capacity = CLASSES[class_id][0]
    pairs = []
    for t in class_item_types(class_id, n_items):
        _, (wlo, whi), (blo, bhi) = CLASSES[t]
        w = rng.uniform(wlo, whi)
        b = rng.uniform(blo, bhi)
        pairs.append((w, b))
    return Instance.from_pairs(capacity, pairs)


def bar_relaxation(strip_width: int, rectangles: Sequence[tuple[int, int]]) -> Instance:
    """One item type per rectangle: width stays, height becomes the demand."""
    for k, (w, h) in enumerate(rectangles):
        if w > strip_width:
            raise InstanceError(f"rectangle {k} of width {w} is wider than the strip ({strip_width})")
        if h < 1 or w < 1:
            raise InstanceError(f"rectangle {k} has non-positive size ({w}, {h})")
    return Instance.from_pairs(strip_width, rectangles)
