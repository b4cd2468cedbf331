"""Dense integer polynomials in one variable, coefficients ascending."""

from __future__ import annotations

from typing import Iterable


class Poly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def const(cls, a: int) -> "Poly":
        return cls([a])

    @classmethod
    def monomial(cls, degree: int, a: int = 1) -> "Poly":
        return cls([0] * degree + [a])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, int):
            other = Poly([other])
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] += v
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly(-a for a in self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly(a * other for a in self.coeffs)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __call__(self, t):
        acc = 0
        for a in reversed(self.coeffs):
            acc = acc * t + a
        return acc

    def reflect(self, n: int) -> "Poly":
        """t^n p(1/t); requires deg p <= n."""
        if self.degree > n:
            raise ValueError(f"degree {self.degree} exceeds {n}")
        return Poly(reversed(self.coeffs + (0,) * (n + 1 - len(self.coeffs))))

    def truncate_half(self, rank: int) -> "Poly":
        """Keep the terms t^d with 2d < rank."""
        return Poly(a for d, a in enumerate(self.coeffs) if 2 * d < rank)

    def substitute_neg(self) -> "Poly":
        """p(-t)."""
        return Poly(a if d % 2 == 0 else -a for d, a in enumerate(self.coeffs))

    def to_list(self) -> list[int]:
        return list(self.coeffs)

    def __repr__(self):
        return f"Poly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for d in range(len(self.coeffs) - 1, -1, -1):
            a = self.coeffs[d]
            if not a:
                continue
            sign = "-" if a < 0 else "+"
            mag = abs(a)
            if d == 0:
                body = str(mag)
            else:
                body = ("" if mag == 1 else str(mag)) + ("t" if d == 1 else f"t^{d}")
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out
