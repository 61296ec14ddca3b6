"""Time-periodic forcing ``F(x, t)`` from a small separable catalogue.

Each term is ``c * g(x) * psi(t)`` with

* ``g(x) = cos(a pi x + b)`` (``xkind="cos"``) or a polynomial
  ``sum_k coeffs[k] x**k`` (``xkind="poly"``),
* ``psi(t) = sin(2 pi f t + phi)`` or ``cos(2 pi f t + phi)`` with integer
  ``f``, so that ``F(x, 0) == F(x, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class ForcingTerm:
    c: float
    a: float = 0.0
    b: float = 0.0
    f: int = 1
    phi: float = 0.0
    tkind: str = "sin"
    xkind: str = "cos"
    coeffs: tuple = ()

    def __post_init__(self):
        if self.tkind not in ("sin", "cos"):
            raise ValueError(f"time factor must be sin or cos, got {self.tkind!r}")
        if self.xkind not in ("cos", "poly"):
            raise ValueError(f"space factor must be cos or poly, got {self.xkind!r}")
        if int(self.f) != self.f:
            raise ValueError(f"time frequency must be an integer, got {self.f}")
        if self.xkind == "poly" and not self.coeffs:
            raise ValueError("polynomial term needs coefficients")

    def space_sup(self) -> float:
        """``max |g(x)|`` over ``[0, 1]``."""
        if self.xkind == "cos":
            xs = np.linspace(0.0, 1.0, 4001)
            vals = np.abs(np.cos(self.a * np.pi * xs + self.b))
            # the maximum 1 is attained whenever a pi x + b crosses k pi
            lo, hi = sorted((self.b, self.a * math.pi + self.b))
            if math.floor(hi / math.pi) >= math.ceil(lo / math.pi):
                return 1.0
            return float(vals.max())
        poly = np.polynomial.Polynomial(self.coeffs)
        crit = [r.real for r in poly.deriv().roots()
                if abs(r.imag) < 1e-12 and 0.0 <= r.real <= 1.0]
        pts = np.array([0.0, 1.0] + crit)
        return float(np.max(np.abs(poly(pts))))


@dataclass(frozen=True)
class Forcing:
    """Finite sum of :class:`ForcingTerm`; the empty sum is ``F = 0``."""

    terms: tuple = ()
    _fast: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        fast = []
        for t in self.terms:
            fast.append((t.c, t.xkind == "cos", t.a * math.pi, t.b, tuple(t.coeffs),
                         t.tkind == "sin", 2.0 * math.pi * t.f, t.phi))
        object.__setattr__(self, "_fast", tuple(fast))

    @property
    def is_zero(self) -> bool:
        return all(t.c == 0 for t in self.terms)

    def sup_bound(self) -> float:
        """Upper bound ``sum |c| sup|g|`` for ``|F|`` (``|psi| <= 1``)."""
        return float(sum(abs(t.c) * t.space_sup() for t in self.terms))

    def __call__(self, x: float, t: float) -> float:
        out = 0.0
        for c, is_cos, a, b, coeffs, is_sin, om, phi in self._fast:
            if is_cos:
                g = math.cos(a * x + b)
            else:
                g = 0.0
                for ck in reversed(coeffs):
                    g = g * x + ck
            out += c * g * (math.sin(om * t + phi) if is_sin else math.cos(om * t + phi))
        return out

    def evaluate(self, x, t):
        """Vectorized evaluation on broadcastable arrays."""
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        out = np.zeros(np.broadcast(x, t).shape)
        for c, is_cos, a, b, coeffs, is_sin, om, phi in self._fast:
            g = np.cos(a * x + b) if is_cos else np.polynomial.polynomial.polyval(x, coeffs)
            psi = np.sin(om * t + phi) if is_sin else np.cos(om * t + phi)
            out = out + c * g * psi
        return out

    def grid_sup(self, n: int = 201) -> float:
        """``max |F|`` on an ``n`` by ``n`` grid of ``[0, 1]^2``."""
        xs = np.linspace(0.0, 1.0, n)
        return float(np.max(np.abs(self.evaluate(xs[:, None], xs[None, :])))) if self.terms else 0.0


ZERO_FORCING = Forcing(())


def single_mode(c: float, a: float = 1.0, b: float = 0.0, f: int = 1,
                phi: float = 0.0, tkind: str = "sin") -> Forcing:
    """``F = c cos(a pi x + b) trig(2 pi f t + phi)``."""
    return Forcing((ForcingTerm(c=c, a=a, b=b, f=f, phi=phi, tkind=tkind),))
