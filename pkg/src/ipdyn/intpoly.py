"""Exact arithmetic for integer-valued polynomials.

A polynomial with rational coefficients takes an integer value at every
integer if and only if all of its coordinates in the binomial basis
C(n,0), C(n,1), C(n,2), ... are integers.  Polynomials are therefore
stored as integer coordinate vectors in that basis: membership testing
is structural, evaluation is exact with arbitrary-precision integers,
and nothing ever touches floating point.

The monomial view (ordinary coefficients as `fractions.Fraction`) is
used for parsing, printing and leading-coefficient comparisons.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

Rational = Union[int, Fraction]


class NotIntegralPolynomial(ValueError):
    """The coefficients describe a polynomial that is not integer-valued."""


class PolynomialParseError(ValueError):
    """A polynomial expression could not be parsed; names the offending token."""


def binomial(n: int, k: int) -> int:
    """C(n, k) for arbitrary integer n and k >= 0.

    The product of k consecutive integers is divisible by k!, so the
    division below is exact even for negative n.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    num = 1
    for i in range(k):
        num *= n - i
    return num // math.factorial(k)


@lru_cache(maxsize=None)
def _binomial_monomials(k: int) -> tuple[Fraction, ...]:
    # Monomial coefficients of C(n, k) = n(n-1)...(n-k+1) / k!.
    coeffs = [Fraction(1)]
    for i in range(k):
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for j, c in enumerate(coeffs):
            nxt[j + 1] += c
            nxt[j] -= c * i
        coeffs = nxt
    fact = math.factorial(k)
    return tuple(c / fact for c in coeffs)


@dataclass(frozen=True)
class IntegralPolynomial:
    """An integer-valued polynomial, stored in the binomial basis.

    ``coeffs[j]`` is the coordinate of C(n, j); trailing zeros are
    stripped, so the representation is canonical.  The zero polynomial
    has ``coeffs == ()`` and degree -1 by convention.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self) -> None:
        cs = tuple(self.coeffs)
        for c in cs:
            if not isinstance(c, int):
                raise TypeError(f"binomial coordinates must be int, got {c!r}")
        while cs and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs)

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls) -> "IntegralPolynomial":
        return cls(())

    @classmethod
    def constant(cls, c: int) -> "IntegralPolynomial":
        return cls((c,))

    @classmethod
    def from_monomials(cls, coefficients: Iterable[Rational]) -> "IntegralPolynomial":
        """Convert ordinary coefficients (constant first) to binomial basis.

        Raises NotIntegralPolynomial when the polynomial is not integer
        valued, naming the first non-integral binomial coordinate.
        """
        mono = [Fraction(c) for c in coefficients]
        while mono and mono[-1] == 0:
            mono.pop()
        values = [
            sum((c * x**j for j, c in enumerate(mono)), Fraction(0))
            for x in range(len(mono))
        ]
        coords: list[int] = []
        level = values
        while level:
            c = level[0]
            if c.denominator != 1:
                raise NotIntegralPolynomial(
                    f"coefficient of C(n,{len(coords)}) is {c}, not an integer"
                )
            coords.append(int(c))
            level = [b - a for a, b in zip(level, level[1:])]
        return cls(tuple(coords))

    # -- basic queries ---------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    def __call__(self, n: int) -> int:
        return sum(c * binomial(n, j) for j, c in enumerate(self.coeffs))

    def to_monomials(self) -> tuple[Fraction, ...]:
        """Ordinary coefficients (constant first), exact rationals."""
        if not self.coeffs:
            return ()
        out = [Fraction(0)] * len(self.coeffs)
        for k, c in enumerate(self.coeffs):
            if c:
                for j, m in enumerate(_binomial_monomials(k)):
                    out[j] += c * m
        while out and out[-1] == 0:
            out.pop()
        return tuple(out)

    def leading_coefficient(self) -> Fraction:
        """Leading monomial coefficient; 0 for the zero polynomial."""
        if not self.coeffs:
            return Fraction(0)
        k = self.degree
        return Fraction(self.coeffs[k], math.factorial(k))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "IntegralPolynomial") -> "IntegralPolynomial":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return IntegralPolynomial(
            tuple(x + y for x, y in zip(a, b)) + a[len(b):]
        )

    def __sub__(self, other: "IntegralPolynomial") -> "IntegralPolynomial":
        return self + (-other)

    def __neg__(self) -> "IntegralPolynomial":
        return IntegralPolynomial(tuple(-c for c in self.coeffs))

    def translate(self, m: int) -> "IntegralPolynomial":
        """p(n + m) as a polynomial in n (Vandermonde convolution)."""
        k = len(self.coeffs)
        new = [
            sum(c * binomial(m, j - i) for j, c in enumerate(self.coeffs) if j >= i)
            for i in range(k)
        ]
        return IntegralPolynomial(tuple(new))

    def shift_diff(self, m: int) -> "IntegralPolynomial":
        """The cross term q_m(n) = p(n+m) - p(m) - p(n).

        Its degree is strictly below deg p whenever deg p >= 1, and it
        vanishes identically when p is linear with zero constant term.
        q_m(0) = -p(0), so it has zero constant term exactly when p does.
        """
        return self.translate(m) - IntegralPolynomial.constant(self(m)) - self

    def zero_normalized(self) -> "IntegralPolynomial":
        """p - p(0): same polynomial shifted to vanish at 0."""
        return self - IntegralPolynomial.constant(self(0))

    # -- rendering -------------------------------------------------------

    def __str__(self) -> str:
        mono = self.to_monomials()
        if not mono:
            return "0"
        parts: list[str] = []
        for j in range(len(mono) - 1, -1, -1):
            c = mono[j]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            if j == 0:
                body = str(mag)
            else:
                var = "n" if j == 1 else f"n^{j}"
                body = var if mag == 1 else f"{mag}{var}"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self) -> str:
        return f"IntegralPolynomial({self.coeffs!r})"


def add(p: IntegralPolynomial, q: IntegralPolynomial) -> IntegralPolynomial:
    return p + q


def sub(p: IntegralPolynomial, q: IntegralPolynomial) -> IntegralPolynomial:
    return p - q


def neg(p: IntegralPolynomial) -> IntegralPolynomial:
    return -p


def essentially_distinct(p: IntegralPolynomial, q: IntegralPolynomial) -> bool:
    """True when p - q is nonconstant (differs by more than an additive shift)."""
    return (p - q).degree >= 1


@dataclass(frozen=True)
class Classification:
    """Report produced by :func:`classify`."""

    degree: int
    is_constant: bool
    essentially_distinct: bool
    zero_normalized: IntegralPolynomial


def classify(p: IntegralPolynomial, q: IntegralPolynomial) -> Classification:
    """Degree data for p plus the pairwise distinctness flag against q."""
    return Classification(
        degree=p.degree,
        is_constant=p.is_constant,
        essentially_distinct=essentially_distinct(p, q),
        zero_normalized=p.zero_normalized(),
    )


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<var>n)|(?P<op>[\^+\-*/])|(?P<bad>\S))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        assert kind is not None
        if kind == "bad":
            raise PolynomialParseError(
                f"unexpected token {m.group('bad')!r} in polynomial {text!r}"
            )
        tokens.append((kind, m.group(kind)))
    return tokens


def parse_polynomial(text: str) -> IntegralPolynomial:
    """Parse monomial syntax such as ``n^2 + 3n`` or ``1/2n^2 - 1/2n``.

    Coefficients may be integers or exact fractions ``a/b``; an optional
    ``*`` may separate a coefficient from ``n``.  Raises
    PolynomialParseError naming the offending token, or
    NotIntegralPolynomial when the result is not integer-valued.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialParseError(f"empty polynomial expression {text!r}")
    terms: list[tuple[Fraction, int]] = []
    i = 0

    def peek() -> tuple[str, str]:
        return tokens[i] if i < len(tokens) else ("end", "")

    sign = 1
    if peek() == ("op", "-"):
        sign, i = -1, i + 1
    elif peek() == ("op", "+"):
        i += 1
    while True:
        coeff: Fraction | None = None
        kind, val = peek()
        if kind == "num":
            coeff = Fraction(int(val))
            i += 1
            if peek() == ("op", "/"):
                i += 1
                kind, val = peek()
                if kind != "num":
                    raise PolynomialParseError(
                        f"expected integer after '/' in {text!r}, got {val!r}"
                    )
                coeff /= int(val)
                i += 1
            if peek() == ("op", "*"):
                i += 1
                if peek()[0] != "var":
                    raise PolynomialParseError(
                        f"expected 'n' after '*' in {text!r}"
                    )
        power = 0
        kind, val = peek()
        if kind == "var":
            power = 1
            i += 1
            if peek() == ("op", "^"):
                i += 1
                kind, val = peek()
                if kind != "num":
                    raise PolynomialParseError(
                        f"expected integer exponent after '^' in {text!r}, got {val!r}"
                    )
                power = int(val)
                i += 1
            if peek() == ("op", "/"):
                # trailing divisor, e.g. n/2 or 3n^2/4
                i += 1
                kind, val = peek()
                if kind != "num":
                    raise PolynomialParseError(
                        f"expected integer after '/' in {text!r}, got {val!r}"
                    )
                coeff = (coeff if coeff is not None else Fraction(1)) / int(val)
                i += 1
        if coeff is None and power == 0:
            raise PolynomialParseError(
                f"expected a term in {text!r}, got {peek()[1]!r}"
            )
        if coeff is None:
            coeff = Fraction(1)
        terms.append((sign * coeff, power))
        kind, val = peek()
        if kind == "end":
            break
        if (kind, val) == ("op", "+"):
            sign, i = 1, i + 1
        elif (kind, val) == ("op", "-"):
            sign, i = -1, i + 1
        else:
            raise PolynomialParseError(
                f"expected '+' or '-' in {text!r}, got {val!r}"
            )
    max_pow = max(p for _, p in terms)
    mono = [Fraction(0)] * (max_pow + 1)
    for c, p in terms:
        mono[p] += c
    return IntegralPolynomial.from_monomials(mono)
