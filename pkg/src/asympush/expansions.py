"""Finite asymptotic expansions: lists of (exponent, log-polynomial) terms.

The same shape serves small-variable expansions (in t as t -> 0) and
large-variable expansions (in z as z -> infinity); only the bookkeeping of
the remainder order differs, and the caller records that.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .logpoly import EXPONENT_TOL, LogPolynomial

__all__ = ["Expansion", "ExpansionBuilder"]


@dataclass(frozen=True)
class Expansion:
    variable: str
    terms: tuple[tuple[complex, LogPolynomial], ...]
    remainder_order: float
    remainder_log_power: int = 0

    def __call__(self, v: float) -> complex:
        if v <= 0:
            raise ValueError(f"expansion variable {self.variable} must be positive")
        L = math.log(v)
        return sum((cmath.exp(a * L) * p(L) for a, p in self.terms), 0j)

    def coefficient(self, exponent: complex, log_power: int = 0) -> complex:
        for a, p in self.terms:
            if abs(a - complex(exponent)) <= EXPONENT_TOL:
                return p.coefficient(log_power)
        return 0j

    @property
    def exponents(self) -> tuple[complex, ...]:
        return tuple(a for a, _ in self.terms)

    def truncate_small(self, order: float) -> "Expansion":
        """Drop terms with Re exponent >= order (small-variable expansions)."""
        kept = tuple((a, p) for a, p in self.terms if a.real < order - EXPONENT_TOL)
        return Expansion(self.variable, kept, min(self.remainder_order, order), self.remainder_log_power)

    def truncate_large(self, order: float) -> "Expansion":
        """Drop terms with Re exponent <= -order-1 (large-variable expansions)."""
        kept = tuple((a, p) for a, p in self.terms if a.real > -order - 1.0 + EXPONENT_TOL)
        return Expansion(self.variable, kept, max(self.remainder_order, -order - 1.0), self.remainder_log_power)

    def as_rows(self) -> list[dict]:
        return [
            {
                "exponent": [a.real, a.imag],
                "logCoeffs": [[c.real, c.imag] for c in p.coeffs],
            }
            for a, p in self.terms
        ]


class ExpansionBuilder:
    """Accumulates coefficients, merging exponents within tolerance."""

    def __init__(self, variable: str):
        self.variable = variable
        self._terms: list[tuple[complex, list[complex]]] = []

    def add(self, exponent: complex, log_power: int, coeff: complex) -> None:
        if coeff == 0:
            return
        exponent = complex(exponent)
        for i, (a, cs) in enumerate(self._terms):
            if abs(a - exponent) <= EXPONENT_TOL:
                while len(cs) <= log_power:
                    cs.append(0j)
                cs[log_power] += coeff
                return
        cs = [0j] * (log_power + 1)
        cs[log_power] = coeff
        self._terms.append((exponent, cs))

    def add_poly(self, exponent: complex, poly: LogPolynomial) -> None:
        for i, c in enumerate(poly.coeffs):
            self.add(exponent, i, c)

    def build(self, remainder_order: float, remainder_log_power: int = 0) -> Expansion:
        terms = []
        for a, cs in self._terms:
            p = LogPolynomial(cs)
            if not p.is_zero:
                terms.append((a, p))
        terms.sort(key=lambda t: (t[0].real, t[0].imag))
        return Expansion(self.variable, tuple(terms), remainder_order, remainder_log_power)
