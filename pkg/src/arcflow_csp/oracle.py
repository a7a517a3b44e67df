"""Brute-force ground truth for small instances.

Deliberately independent of the graph and LP code: patterns are plain
subset enumeration and the optimum is a memoized search over residual
demands.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .instance import Instance


class OracleGuardError(ValueError):
    pass


def enumerate_all_patterns(inst: Instance, max_items: int = 20) -> set[frozenset[int]]:
    """All subsets of item indices whose widths fit in one roll, empty set included."""
    if inst.m > max_items:
        raise OracleGuardError(f"{inst.m} items exceed the enumeration guard of {max_items}")
    w, W = inst.widths, inst.capacity
    out = set()
    for r in range(inst.m + 1):
        for combo in combinations(range(inst.m), r):
            if sum(w[k] for k in combo) <= W:
                out.add(frozenset(combo))
    return out


def exact_solve_small(inst: Instance) -> int:
    """Minimum number of rolls covering all demands with binary patterns."""
    if inst.m > 10 or sum(inst.demands) > 60:
        raise OracleGuardError("instance too large for the exact oracle (m <= 10, sum b <= 60)")
    w, W = inst.widths, inst.capacity
    patterns = sorted((p for p in enumerate_all_patterns(inst) if p),
                      key=lambda p: (-sum(w[k] for k in p), sorted(p)))

    def bound(res):
        if not any(res):
            return 0
        area = sum(w[k] * r for k, r in enumerate(res))
        return max(max(res), -(-area // W))

    @lru_cache(maxsize=None)
    def best(res: tuple[int, ...]) -> int:
        if not any(res):
            return 0
        # some roll must hold one unit of the first item still in demand
        first = next(k for k, r in enumerate(res) if r > 0)
        lb = bound(res)
        result = None
        for p in patterns:
            if first not in p or any(res[k] == 0 for k in p):
                continue
            nxt = tuple(r - 1 if k in p else r for k, r in enumerate(res))
            val = 1 + best(nxt)
            if result is None or val < result:
                result = val
                if result == lb:
                    break
        return result

    return best(tuple(inst.demands))
