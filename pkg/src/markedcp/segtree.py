from __future__ import annotations

import math


class RangeAddExtremaTree:
    """Segment tree over ``n`` floats with range add and range max / min.

    Bottom-up layout padded to a power of two. Pending additions stay in
    ``_lazy`` at internal nodes and are never pushed down: a node stores the
    extremum of its subtree including its own pending add, so the root holds
    the global extrema at all times.
    """

    def __init__(self, n: int, initial: float = 0.0):
        if n < 1:
            raise ValueError("tree needs at least one leaf")
        self.n = n
        size = 1 << max(0, math.ceil(math.log2(n)))
        self.size = size
        inf = math.inf
        self._max = [-inf] * (2 * size)
        self._min = [inf] * (2 * size)
        self._lazy = [0.0] * size
        for i in range(n):
            self._max[size + i] = initial
            self._min[size + i] = initial
        for p in range(size - 1, 0, -1):
            self._max[p] = max(self._max[2 * p], self._max[2 * p + 1])
            self._min[p] = min(self._min[2 * p], self._min[2 * p + 1])

    def _apply(self, p: int, value: float) -> None:
        self._max[p] += value
        self._min[p] += value
        if p < self.size:
            self._lazy[p] += value

    def _rebuild(self, p: int) -> None:
        mx, mn, lz = self._max, self._min, self._lazy
        while p > 1:
            p >>= 1
            a, b = mx[2 * p], mx[2 * p + 1]
            mx[p] = (a if a > b else b) + lz[p]
            a, b = mn[2 * p], mn[2 * p + 1]
            mn[p] = (a if a < b else b) + lz[p]

    def add(self, left: int, right: int, value: float) -> None:
        """Add ``value`` to every position in ``[left, right)``."""
        if not 0 <= left <= right <= self.n:
            raise ValueError(f"interval [{left}, {right}) out of range")
        if left == right:
            return
        lo = left + self.size
        hi = right + self.size
        l0, r0 = lo, hi - 1
        while lo < hi:
            if lo & 1:
                self._apply(lo, value)
                lo += 1
            if hi & 1:
                hi -= 1
                self._apply(hi, value)
            lo >>= 1
            hi >>= 1
        self._rebuild(l0)
        self._rebuild(r0)

    def _pending_above(self, p: int) -> float:
        total = 0.0
        p >>= 1
        while p >= 1:
            total += self._lazy[p]
            p >>= 1
        return total

    def query(self, left: int, right: int) -> tuple[float, float]:
        """``(max, min)`` over positions ``[left, right)``."""
        if not 0 <= left < right <= self.n:
            raise ValueError(f"interval [{left}, {right}) out of range")
        best_max, best_min = -math.inf, math.inf
        lo = left + self.size
        hi = right + self.size
        while lo < hi:
            if lo & 1:
                extra = self._pending_above(lo)
                best_max = max(best_max, self._max[lo] + extra)
                best_min = min(best_min, self._min[lo] + extra)
                lo += 1
            if hi & 1:
                hi -= 1
                extra = self._pending_above(hi)
                best_max = max(best_max, self._max[hi] + extra)
                best_min = min(best_min, self._min[hi] + extra)
            lo >>= 1
            hi >>= 1
        return best_max, best_min

    @property
    def max(self) -> float:
        return self._max[1]

    @property
    def min(self) -> float:
        return self._min[1]

    def values(self) -> list[float]:
        return [self.query(i, i + 1)[0] for i in range(self.n)]


class RangeAddSumTree:
    """Fenwick pair supporting range add and range sum over ``n`` floats."""

    def __init__(self, n: int):
        self.n = n
        self._b1 = [0.0] * (n + 1)
        self._b2 = [0.0] * (n + 1)

    def _update(self, tree: list, i: int, value: float) -> None:
        i += 1
        n = self.n
        while i <= n:
            tree[i] += value
            i += i & -i

    def _prefix(self, i: int) -> float:
        # sum over positions [0, i)
        s1 = s2 = 0.0
        j = i
        b1, b2 = self._b1, self._b2
        while j > 0:
            s1 += b1[j]
            s2 += b2[j]
            j -= j & -j
        return s1 * i - s2

    def add(self, left: int, right: int, value: float) -> None:
        """Add ``value`` to positions ``[left, right)``."""
        if not 0 <= left <= right <= self.n:
            raise ValueError(f"interval [{left}, {right}) out of range")
        if left == right:
            return
        self._update(self._b1, left, value)
        self._update(self._b2, left, value * left)
        if right < self.n:
            self._update(self._b1, right, -value)
            self._update(self._b2, right, -value * right)

    def sum(self, left: int, right: int) -> float:
        return self._prefix(right) - self._prefix(left)
