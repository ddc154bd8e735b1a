"""Growth functions given as a monotone table instead of an expression."""

from __future__ import annotations

import math

import numpy as np
from scipy.interpolate import PchipInterpolator

from .expr import EvaluationError, mp_context

__all__ = ["TabulatedGrowth", "PoweredGrowth"]


class TabulatedGrowth:
    """Shape-preserving cubic (PCHIP) interpolant through ``(r, T)`` samples.

    PCHIP keeps monotone data monotone, so a strictly increasing table yields
    a continuous strictly increasing T on [r[0], r[-1]].  Outside the table
    the function is undefined and evaluation raises.
    """

    def __init__(self, r, values):
        r = np.asarray(r, dtype=float)
        values = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != values.shape or len(r) < 2:
            raise ValueError("need two matching 1-d arrays with at least 2 samples")
        if np.any(np.diff(r) <= 0):
            raise ValueError("abscissae must be strictly increasing")
        if np.any(np.diff(values) < 0):
            raise ValueError("tabulated values must be nondecreasing")
        self._r = r
        self._values = values
        self._interp = PchipInterpolator(r, values, extrapolate=False)

    @property
    def domain(self) -> tuple[float, float]:
        return float(self._r[0]), float(self._r[-1])

    def __call__(self, r: float) -> float:
        value = float(self._interp(float(r)))
        if math.isnan(value):
            raise EvaluationError("outside tabulated range", r=r)
        return value

    def evaluate(self, r, digits: int = 30):
        # only double-precision data exists; precision is that of the table
        return mp_context().mpf(self(float(r)))

    def __pow__(self, exponent: float) -> "PoweredGrowth":
        return PoweredGrowth(self, exponent)

    def __repr__(self):
        lo, hi = self.domain
        return f"TabulatedGrowth({len(self._r)} samples on [{lo}, {hi}])"


class PoweredGrowth:
    """``T(r) ** exponent`` for a black-box growth function T."""

    def __init__(self, base, exponent: float):
        self.base = base
        self.exponent = float(exponent)

    def __call__(self, r: float) -> float:
        return self.base(r) ** self.exponent

    def evaluate(self, r, digits: int = 30):
        base = self.base.evaluate(r, digits)
        ctx = mp_context()
        saved = ctx.prec
        try:
            ctx.dps = digits
            return ctx.power(base, ctx.mpf(self.exponent))
        finally:
            ctx.prec = saved

    def __repr__(self):
        return f"({self.base!r})^{self.exponent}"
