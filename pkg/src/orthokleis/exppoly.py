"""Exact symbolic functions on the rank-2 Siegel upper half space.

The carrier type is a finite sum of terms

    c * (det Y)^p * y1^m1 y2^m2 y3^m3 * exp(pi i tr(A X) - pi tr(B Y)),

with Z = X + iY, X = [[x1, x3], [x3, x2]], Y = [[y1, y3], [y3, y2]].
Coefficients c are polynomials in a formal symbol standing for pi, with
Gaussian-rational coefficients, so differential operators act exactly;
floats entering through frequency matrices embed as exact binary
rationals.  The determinant power p may be any rational.

Monomials are kept in a normal form with min(m1, m2) = 0 by rewriting
y1*y2 = det Y + y3^2; sums of terms in this form vanish only when every
coefficient does, so equality with zero is a structural check.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import comb

_F0 = Fraction(0)
_F1 = Fraction(1)


class PiPoly:
    """Polynomial in a formal pi symbol with Gaussian-rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [(Fraction(re), Fraction(im)) for re, im in coeffs]
        while cs and cs[-1] == (_F0, _F0):
            cs.pop()
        self.coeffs = tuple(cs)

    @staticmethod
    def const(re, im=0) -> "PiPoly":
        return PiPoly([(Fraction(re), Fraction(im))])

    @staticmethod
    def pi_times(re, im=0) -> "PiPoly":
        """(re + im*i) * pi."""
        return PiPoly([(_F0, _F0), (Fraction(re), Fraction(im))])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "PiPoly") -> "PiPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        out = []
        for k in range(n):
            a = self.coeffs[k] if k < len(self.coeffs) else (_F0, _F0)
            b = other.coeffs[k] if k < len(other.coeffs) else (_F0, _F0)
            out.append((a[0] + b[0], a[1] + b[1]))
        return PiPoly(out)

    def __neg__(self) -> "PiPoly":
        return PiPoly([(-re, -im) for re, im in self.coeffs])

    def __sub__(self, other: "PiPoly") -> "PiPoly":
        return self + (-other)

    def __mul__(self, other: "PiPoly") -> "PiPoly":
        if self.is_zero or other.is_zero:
            return PiPoly()
        out = [[_F0, _F0] for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, (a, b) in enumerate(self.coeffs):
            for j, (c, d) in enumerate(other.coeffs):
                out[i + j][0] += a * c - b * d
                out[i + j][1] += a * d + b * c
        return PiPoly(out)

    def scale(self, re, im=0) -> "PiPoly":
        return self * PiPoly.const(re, im)

    def __eq__(self, other) -> bool:
        return isinstance(other, PiPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def evaluate(self, pi_value: float = math.pi) -> complex:
        total = 0j
        power = 1.0
        for re, im in self.coeffs:
            total += complex(float(re), float(im)) * power
            power *= pi_value
        return total

    def __repr__(self):
        return f"PiPoly({list(self.coeffs)})"


def _frac3(t) -> tuple:
    a, b, c = t
    return (Fraction(a), Fraction(b), Fraction(c))


def _normalize(raw: dict) -> dict:
    """Merge keys, enforce min(m1, m2) = 0 via y1 y2 = det Y + y3^2."""
    out: dict = {}
    stack = list(raw.items())
    while stack:
        (p, mono, A, B), coeff = stack.pop()
        if coeff.is_zero:
            continue
        m1, m2, m3 = mono
        w = min(m1, m2)
        if w > 0:
            for j in range(w + 1):
                key = (p + j, (m1 - w, m2 - w, m3 + 2 * (w - j)), A, B)
                stack.append((key, coeff.scale(comb(w, j))))
            continue
        key = (p, mono, A, B)
        if key in out:
            out[key] = out[key] + coeff
            if out[key].is_zero:
                del out[key]
        else:
            out[key] = coeff
    return out


class ExpPoly:
    """Canonical finite sum of exponential-polynomial terms."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None, _normalized: bool = False):
        if terms is None:
            terms = {}
        self.terms = terms if _normalized else _normalize(terms)

    # ------------------------------------------------------ constructors
    @staticmethod
    def zero() -> "ExpPoly":
        return ExpPoly({}, _normalized=True)

    @staticmethod
    def constant(re, im=0) -> "ExpPoly":
        return ExpPoly.single(PiPoly.const(re, im))

    @staticmethod
    def single(coeff: PiPoly, p=0, mono=(0, 0, 0), A=(0, 0, 0),
               B=(0, 0, 0)) -> "ExpPoly":
        key = (Fraction(p), tuple(int(m) for m in mono), _frac3(A), _frac3(B))
        return ExpPoly({key: coeff})

    @staticmethod
    def det_power(p) -> "ExpPoly":
        return ExpPoly.single(PiPoly.const(1), p=p)

    @staticmethod
    def exp_term(A, B) -> "ExpPoly":
        """Unit-coefficient pure exponential: frequencies given as upper
        triples (M11, M22, M12) of the symmetric 2x2 matrices."""
        return ExpPoly.single(PiPoly.const(1), A=A, B=B)

    # --------------------------------------------------------- structure
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, ExpPoly) and self.terms == other.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        out = dict(self.terms)
        for key, coeff in other.terms.items():
            if key in out:
                merged = out[key] + coeff
                if merged.is_zero:
                    del out[key]
                else:
                    out[key] = merged
            else:
                out[key] = coeff
        return ExpPoly(out, _normalized=True)

    def __neg__(self) -> "ExpPoly":
        return ExpPoly({k: -c for k, c in self.terms.items()}, _normalized=True)

    def __sub__(self, other: "ExpPoly") -> "ExpPoly":
        return self + (-other)

    def __mul__(self, other: "ExpPoly") -> "ExpPoly":
        raw: dict = {}
        for (p1, m1, a1, b1), c1 in self.terms.items():
            for (p2, m2, a2, b2), c2 in other.terms.items():
                key = (
                    p1 + p2,
                    (m1[0] + m2[0], m1[1] + m2[1], m1[2] + m2[2]),
                    (a1[0] + a2[0], a1[1] + a2[1], a1[2] + a2[2]),
                    (b1[0] + b2[0], b1[1] + b2[1], b1[2] + b2[2]),
                )
                c = c1 * c2
                if key in raw:
                    raw[key] = raw[key] + c
                else:
                    raw[key] = c
        return ExpPoly(raw)

    def scale(self, re, im=0) -> "ExpPoly":
        return ExpPoly(
            {k: c.scale(re, im) for k, c in self.terms.items()}
        )

    def scale_poly(self, q: PiPoly) -> "ExpPoly":
        return ExpPoly({k: c * q for k, c in self.terms.items()})

    def mul_det_power(self, q) -> "ExpPoly":
        q = Fraction(q)
        return ExpPoly(
            {(p + q, m, a, b): c for (p, m, a, b), c in self.terms.items()},
            _normalized=True,
        )

    def mul_y(self, j: int) -> "ExpPoly":
        """Multiply by the coordinate y_j, j in {1, 2, 3}."""
        raw = {}
        for (p, m, a, b), c in self.terms.items():
            mono = list(m)
            mono[j - 1] += 1
            raw[(p, tuple(mono), a, b)] = c
        return ExpPoly(raw)

    def x_average(self) -> "ExpPoly":
        """Exact integral over the X torus: keeps frequency-zero terms."""
        zero = (_F0, _F0, _F0)
        return ExpPoly(
            {k: c for k, c in self.terms.items() if k[2] == zero},
            _normalized=True,
        )

    # ------------------------------------------------------- derivatives
    def dx(self, j: int) -> "ExpPoly":
        """d/dx_j: each term picks up pi*i times its X-frequency weight."""
        out = {}
        for (p, m, a, b), c in self.terms.items():
            weight = a[j - 1] if j < 3 else 2 * a[2]
            if weight == 0:
                continue
            out[(p, m, a, b)] = c * PiPoly.pi_times(0, weight)
        return ExpPoly(out, _normalized=True)

    def dy(self, j: int) -> "ExpPoly":
        raw: dict = {}

        def put(key, coeff):
            if key in raw:
                raw[key] = raw[key] + coeff
            else:
                raw[key] = coeff

        for (p, m, a, b), c in self.terms.items():
            # chain rule through (det Y)^p: d(det Y)/dy = (y2, y1, -2 y3)
            if p != 0:
                mono = list(m)
                if j == 1:
                    mono[1] += 1
                    put((p - 1, tuple(mono), a, b), c.scale(p))
                elif j == 2:
                    mono[0] += 1
                    put((p - 1, tuple(mono), a, b), c.scale(p))
                else:
                    mono[2] += 1
                    put((p - 1, tuple(mono), a, b), c.scale(-2 * p))
            # monomial power rule
            if m[j - 1] > 0:
                mono = list(m)
                mono[j - 1] -= 1
                put((p, tuple(mono), a, b), c.scale(m[j - 1]))
            # exponential factor: -pi * (B weight)
            weight = b[j - 1] if j < 3 else 2 * b[2]
            if weight != 0:
                put((p, m, a, b), c * PiPoly.pi_times(-weight))
        return ExpPoly(raw)

    def dz(self, j: int) -> "ExpPoly":
        half = Fraction(1, 2)
        return self.dx(j).scale(half) + self.dy(j).scale(0, -half)

    def dzbar(self, j: int) -> "ExpPoly":
        half = Fraction(1, 2)
        return self.dx(j).scale(half) + self.dy(j).scale(0, half)

    def det_dz(self) -> "ExpPoly":
        quarter = Fraction(1, 4)
        return self.dz(2).dz(1) - self.dz(3).dz(3).scale(quarter)

    def det_dzbar(self) -> "ExpPoly":
        quarter = Fraction(1, 4)
        return self.dzbar(2).dzbar(1) - self.dzbar(3).dzbar(3).scale(quarter)

    def det_dy(self) -> "ExpPoly":
        quarter = Fraction(1, 4)
        return self.dy(2).dy(1) - self.dy(3).dy(3).scale(quarter)

    # -------------------------------------------------------- evaluation
    def evaluate(self, z_triple, pi_value: float = math.pi) -> complex:
        """Numeric value at Z given by the entry triple (z1, z2, z3)."""
        z1, z2, z3 = (complex(z) for z in z_triple)
        x = (z1.real, z2.real, z3.real)
        y = (z1.imag, z2.imag, z3.imag)
        u = y[0] * y[1] - y[2] * y[2]
        if not u > 0 or not y[0] > 0:
            raise ValueError("evaluation point must have positive definite Y")
        total = 0j
        for (p, m, a, b), c in self.terms.items():
            val = c.evaluate(pi_value) * u ** float(p)
            val *= y[0] ** m[0] * y[1] ** m[1] * y[2] ** m[2]
            tr_ax = float(a[0]) * x[0] + float(a[1]) * x[1] + 2 * float(a[2]) * x[2]
            tr_by = float(b[0]) * y[0] + float(b[1]) * y[1] + 2 * float(b[2]) * y[2]
            val *= complex(
                math.cos(pi_value * tr_ax), math.sin(pi_value * tr_ax)
            ) * math.exp(-pi_value * tr_by)
            total += val
        return total

    # ----------------------------------------------------- serialization
    def to_json(self) -> list:
        out = []
        for (p, m, a, b), c in sorted(
            self.terms.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2], kv[0][3])
        ):
            out.append({
                "coeff_pi_poly": [[str(re), str(im)] for re, im in c.coeffs],
                "p": str(p),
                "mono": list(m),
                "A": [str(v) for v in a],
                "B": [float(v) for v in b],
            })
        return out

    @staticmethod
    def from_json(data: list) -> "ExpPoly":
        raw = {}
        for item in data:
            coeff = PiPoly(
                [(Fraction(re), Fraction(im)) for re, im in item["coeff_pi_poly"]]
            )
            key = (
                Fraction(item["p"]),
                tuple(item["mono"]),
                _frac3(item["A"]),
                _frac3(item["B"]),
            )
            raw[key] = coeff
        return ExpPoly(raw)

    def __repr__(self):
        return f"ExpPoly({len(self.terms)} terms)"
