"""Exact multivariate polynomials with arbitrary-precision integer coefficients.

A polynomial is a map from exponent tuples (one slot per variable) to nonzero
integer coefficients.  Everything is exact; there is no floating point
anywhere.  The sizes this package needs are tiny (at most five or six
variables, degrees in the tens), so all algorithms favor clarity over
asymptotics: determinants by cofactor expansion, division by leading-term
reduction under graded-lexicographic order.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import InternalError

Monomial = tuple[int, ...]


def _grlex_key(mono: Monomial) -> tuple[int, Monomial]:
    return (sum(mono), mono)


class MultiPoly:
    """Immutable sparse multivariate polynomial over the integers."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[Monomial, int] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                if len(mono) != nvars:
                    raise InternalError(f"monomial {mono} has wrong arity, expected {nvars}")
                if any(e < 0 for e in mono):
                    raise InternalError(f"negative exponent in monomial {mono}")
                if coeff:
                    clean[mono] = coeff
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls(nvars, {})

    @classmethod
    def const(cls, nvars: int, value: int) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def monomial(cls, nvars: int, var: int, power: int = 1, coeff: int = 1) -> "MultiPoly":
        mono = [0] * nvars
        mono[var] = power
        return cls(nvars, {tuple(mono): coeff})

    # -- basic queries ------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def is_homogeneous(self) -> bool:
        degrees = {sum(m) for m in self.terms}
        return len(degrees) <= 1

    def constant_value(self) -> int:
        """Coefficient of the constant monomial."""
        return self.terms.get((0,) * self.nvars, 0)

    def leading(self) -> tuple[Monomial, int]:
        """Leading (monomial, coefficient) under graded-lex order."""
        if not self.terms:
            raise InternalError("zero polynomial has no leading term")
        mono = max(self.terms, key=_grlex_key)
        return mono, self.terms[mono]

    def coefficients_nonnegative(self) -> bool:
        return all(c >= 0 for c in self.terms.values())

    # -- arithmetic ---------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.nvars, {m: -c for m, c in self.terms.items()})

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_arity(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            new = out.get(mono, 0) + coeff
            if new:
                out[mono] = new
            else:
                out.pop(mono, None)
        return MultiPoly(self.nvars, out)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_arity(other)
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(a + b for a, b in zip(m1, m2))
                new = out.get(mono, 0) + c1 * c2
                if new:
                    out[mono] = new
                else:
                    out.pop(mono, None)
        return MultiPoly(self.nvars, out)

    def scale(self, k: int) -> "MultiPoly":
        if k == 0:
            return MultiPoly.zero(self.nvars)
        return MultiPoly(self.nvars, {m: k * c for m, c in self.terms.items()})

    def __pow__(self, n: int) -> "MultiPoly":
        if n < 0:
            raise InternalError("negative power of a polynomial")
        result = MultiPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def _check_arity(self, other: "MultiPoly"):
        if self.nvars != other.nvars:
            raise InternalError(f"arity mismatch: {self.nvars} vs {other.nvars}")

    # -- division -----------------------------------------------------

    def divide_exact(self, divisor: "MultiPoly") -> "MultiPoly":
        """Exact quotient self/divisor; raises InternalError on any remainder.

        Leading-term reduction under graded lex.  Exactness of every
        coefficient division is required: a failure means the caller's
        divisibility guarantee is broken, never a legitimate input state.
        """
        self._check_arity(divisor)
        if divisor.is_zero():
            raise InternalError("division by the zero polynomial")
        quotient: dict[Monomial, int] = {}
        rem = dict(self.terms)
        div_mono, div_coeff = divisor.leading()
        while rem:
            mono = max(rem, key=_grlex_key)
            coeff = rem[mono]
            q_mono = tuple(a - b for a, b in zip(mono, div_mono))
            if any(e < 0 for e in q_mono) or coeff % div_coeff:
                raise InternalError("inexact multivariate division (nonzero remainder)")
            q_coeff = coeff // div_coeff
            quotient[q_mono] = q_coeff
            for m, c in divisor.terms.items():
                tm = tuple(a + b for a, b in zip(q_mono, m))
                new = rem.get(tm, 0) - q_coeff * c
                if new:
                    rem[tm] = new
                else:
                    rem.pop(tm, None)
        return MultiPoly(self.nvars, quotient)

    # -- substitution -------------------------------------------------

    def map_vars(self, mapping: list[int], new_nvars: int) -> "MultiPoly":
        """Substitute x_i -> x_{mapping[i]}; slots may repeat or collapse."""
        out: dict[Monomial, int] = {}
        for mono, coeff in self.terms.items():
            new = [0] * new_nvars
            for var, e in enumerate(mono):
                new[mapping[var]] += e
            key = tuple(new)
            val = out.get(key, 0) + coeff
            if val:
                out[key] = val
            else:
                out.pop(key, None)
        return MultiPoly(new_nvars, out)

    def substitute(self, var: int, replacement: "MultiPoly") -> "MultiPoly":
        """Substitute `replacement` (same arity) for variable `var`."""
        self._check_arity(replacement)
        powers: dict[int, MultiPoly] = {0: MultiPoly.const(self.nvars, 1)}

        def power(e: int) -> MultiPoly:
            if e not in powers:
                powers[e] = power(e - 1) * replacement
            return powers[e]

        out = MultiPoly.zero(self.nvars)
        for mono, coeff in self.terms.items():
            rest = list(mono)
            e = rest[var]
            rest[var] = 0
            out = out + power(e) * MultiPoly(self.nvars, {tuple(rest): coeff})
        return out

    def shift_all_by_one(self) -> "MultiPoly":
        """Substitute x_i -> 1 + x_i for every variable."""
        out = self
        for var in range(self.nvars):
            shifted: dict[Monomial, int] = {}
            for mono, coeff in out.terms.items():
                e = mono[var]
                base = list(mono)
                for k in range(e + 1):
                    base[var] = k
                    key = tuple(base)
                    val = shifted.get(key, 0) + coeff * math.comb(e, k)
                    if val:
                        shifted[key] = val
                    else:
                        shifted.pop(key, None)
            out = MultiPoly(self.nvars, shifted)
        return out

    def coefficient_of(self, var: int, power: int) -> "MultiPoly":
        """Extract the coefficient of var**power, dropping that variable slot."""
        out: dict[Monomial, int] = {}
        for mono, coeff in self.terms.items():
            if mono[var] == power:
                key = mono[:var] + mono[var + 1 :]
                out[key] = coeff
        return MultiPoly(self.nvars - 1, out)

    def evaluate(self, values: list[Fraction | int]) -> Fraction:
        if len(values) != self.nvars:
            raise InternalError("wrong number of values for evaluation")
        total = Fraction(0)
        for mono, coeff in self.terms.items():
            term = Fraction(coeff)
            for v, e in zip(values, mono):
                if e:
                    term *= Fraction(v) ** e
            total += term
        return total

    # -- display ------------------------------------------------------

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=_grlex_key, reverse=True):
            coeff = self.terms[mono]
            factors = [
                f"x{i}^{e}" if e > 1 else f"x{i}"
                for i, e in enumerate(mono)
                if e
            ]
            body = "*".join(factors)
            if not body:
                parts.append(f"{coeff}")
            elif coeff == 1:
                parts.append(body)
            elif coeff == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coeff}*{body}")
        text = " + ".join(parts)
        return text.replace("+ -", "- ")


def det(matrix: list[list[MultiPoly]]) -> MultiPoly:
    """Determinant by cofactor expansion along the sparsest column."""
    n = len(matrix)
    if n == 0:
        raise InternalError("empty matrix")
    for row in matrix:
        if len(row) != n:
            raise InternalError("determinant of a non-square matrix")
    nvars = matrix[0][0].nvars
    if n == 1:
        return matrix[0][0]

    col = min(
        range(n),
        key=lambda j: sum(0 if matrix[i][j].is_zero() else 1 for i in range(n)),
    )
    result = MultiPoly.zero(nvars)
    for i in range(n):
        entry = matrix[i][col]
        if entry.is_zero():
            continue
        minor = [
            [matrix[r][c] for c in range(n) if c != col]
            for r in range(n)
            if r != i
        ]
        cofactor = det(minor)
        if (i + col) % 2:
            cofactor = -cofactor
        result = result + entry * cofactor
    return result
