"""Backward-in-time difference operators and the field history they read.

Each stencil is stored as integer weights plus an integer denominator so
that its moment sums can be checked exactly. Weight ``i`` multiplies the
sample at ``t - i*dt``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np


@dataclass(frozen=True)
class Stencil:
    weights: tuple[int, ...]
    denominator: int
    derivative: int

    @property
    def depth(self) -> int:
        return len(self.weights)

    def moment(self, m: int) -> int:
        return sum(w * i**m for i, w in enumerate(self.weights))

    def taylor_coefficient(self, m: int) -> Fraction:
        """Coefficient of dt^(m - derivative) * g^(m)(t) in the stencil's Taylor expansion."""
        return Fraction((-1) ** m * self.moment(m), self.denominator * factorial(m))

    def exact_degree(self, limit: int = 12) -> int:
        """Highest polynomial degree differentiated exactly."""
        for m in range(limit + 1):
            target = 1 if m == self.derivative else 0
            if self.taylor_coefficient(m) != target:
                return m - 1
        return limit

    def apply(self, samples, dt: float):
        if len(samples) < self.depth:
            raise ValueError(
                f"stencil needs {self.depth} history samples, only {len(samples)} available"
            )
        acc = self.weights[0] * samples[0]
        for i in range(1, self.depth):
            acc = acc + self.weights[i] * samples[i]
        return acc / (self.denominator * dt**self.derivative)


D2_ORDER4 = Stencil((45, -154, 214, -156, 61, -10), 12, 2)
D2_ORDER2 = Stencil((2, -5, 4, -1), 1, 2)
D3_ORDER3 = Stencil((17, -71, 118, -98, 41, -7), 4, 3)
D1_ORDER2 = Stencil((3, -4, 1), 2, 1)


def d2dt2_order4(samples, dt):
    return D2_ORDER4.apply(samples, dt)


def d2dt2_order2(samples, dt):
    return D2_ORDER2.apply(samples, dt)


def d3dt3_order3(samples, dt):
    return D3_ORDER3.apply(samples, dt)


def d1dt_order2(samples, dt):
    return D1_ORDER2.apply(samples, dt)


class HistoryBuffer:
    """The most recent ``depth`` fields, newest first: ``buf[i]`` is f(t - i*dt)."""

    def __init__(self, dt: float, depth: int = 6):
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.dt = float(dt)
        self.depth = depth
        self._items: deque[np.ndarray] = deque(maxlen=depth)

    def push(self, field: np.ndarray) -> None:
        self._items.appendleft(field)

    def __len__(self):
        return len(self._items)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return list(self._items)[i]
        return self._items[i]

    def __iter__(self):
        return iter(self._items)

    @property
    def warm(self) -> bool:
        return len(self._items) == self.depth

    def squares(self, n: int) -> list[np.ndarray]:
        return [g * g for g in list(self._items)[:n]]

    def copy(self) -> "HistoryBuffer":
        out = HistoryBuffer(self.dt, self.depth)
        for g in reversed(self._items):
            out.push(g.copy())
        return out
