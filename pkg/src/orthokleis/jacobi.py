"""Jacobi group over a positive definite even lattice.

Heisenberg elements carry their unit-circle coordinate as an exact rational
angle: the stored ``phase`` q means zeta = exp(2 pi i q).  The angle is
tracked additively (never reduced mod 1), which costs nothing for the
circle value but buys exactness twice over: every composition law below is
an identity over Fraction entries, assertable with ``==``, and the matrix
embedding becomes an actual homomorphism.  The bare product of the
rotation and unipotent blocks composes only up to a central translation of
the first tube coordinate; the angle is precisely the bookkeeping that
central factor needs, so ``jacobi_embed`` appends it and multiplicativity
holds on the nose.  On the rest of the tube coordinates the correction is
invisible, so the embedded action is unchanged.

The weight-k slash operators at the bottom are numeric: they take and
return plain callables on (tau, z) with tau in the upper half plane and z a
complex vector.  The compatibility (f|g1)|g2 = f|(g1 g2) is what forces the
phase twist used in ``sl2_right_action``; the test suite checks it on
random points.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import NonIntegralEmbed
from .orthogroup import OrthElement, Space, heisenberg, rotation, translation

HALF = Fraction(1, 2)


def _fraction_vector(v) -> tuple:
    return tuple(Fraction(x) for x in v)


def _fraction_matrix(m) -> tuple:
    (a, b), (c, d) = m
    return ((Fraction(a), Fraction(b)), (Fraction(c), Fraction(d)))


def sigma_pairing(gram, u, v) -> Fraction:
    """The bilinear lattice pairing u^t S v over exact rationals."""
    n = len(gram)
    if len(u) != n or len(v) != n:
        raise ValueError(f"expected length-{n} vectors")
    total = Fraction(0)
    for i in range(n):
        row = gram[i]
        ui = Fraction(u[i])
        for j in range(n):
            total += ui * row[j] * Fraction(v[j])
    return total


@dataclass(frozen=True)
class HeisenbergElement:
    """(x, y, zeta) with zeta recorded as the rational angle ``phase``."""

    x: tuple
    y: tuple
    phase: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "x", _fraction_vector(self.x))
        object.__setattr__(self, "y", _fraction_vector(self.y))
        object.__setattr__(self, "phase", Fraction(self.phase))
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same length")

    def zeta(self) -> complex:
        return cmath.exp(2j * math.pi * float(self.phase % 1))

    def is_integral(self) -> bool:
        """Integral coordinates and trivial circle value (whole angle)."""
        return all(v.denominator == 1
                   for v in self.x + self.y + (self.phase,))


def heisenberg_identity(n: int) -> HeisenbergElement:
    return HeisenbergElement((Fraction(0),) * n, (Fraction(0),) * n)


def heisenberg_mul(gram, h1: HeisenbergElement,
                   h2: HeisenbergElement) -> HeisenbergElement:
    """(x1,y1,z1)(x2,y2,z2) = (x1+x2, y1+y2, z1 z2 e(sigma(x1, y2)))."""
    x = tuple(a + b for a, b in zip(h1.x, h2.x))
    y = tuple(a + b for a, b in zip(h1.y, h2.y))
    phase = h1.phase + h2.phase + sigma_pairing(gram, h1.x, h2.y)
    return HeisenbergElement(x, y, phase)


def heisenberg_inverse(gram, h: HeisenbergElement) -> HeisenbergElement:
    """(-x, -y, zeta^{-1} e(sigma(x, y)))."""
    phase = -h.phase + sigma_pairing(gram, h.x, h.y)
    return HeisenbergElement(tuple(-v for v in h.x),
                             tuple(-v for v in h.y), phase)


def sl2_right_action(gram, h: HeisenbergElement, mat) -> HeisenbergElement:
    """h^A for A of determinant one acting on pairs by
    (x, y) A = (a x + c y, b x + d y).

    The angle picks up half the cross pairing of the transformed pair minus
    half that of the original pair.  That normalization is the one under
    which the weight-k slash operators satisfy
    (f|h)|A = (f|A)|h^A, which in turn makes f -> f|(A,h) a right action
    of the full group.
    """
    (a, b), (c, d) = _fraction_matrix(mat)
    if a * d - b * c != 1:
        raise ValueError("right action requires determinant one")
    xa = tuple(a * u + c * v for u, v in zip(h.x, h.y))
    ya = tuple(b * u + d * v for u, v in zip(h.x, h.y))
    twist = (HALF * sigma_pairing(gram, xa, ya)
             - HALF * sigma_pairing(gram, h.x, h.y))
    return HeisenbergElement(xa, ya, h.phase + twist)


@dataclass(frozen=True)
class JacobiElement:
    """A pair (A, h) with A in SL_2 over the rationals."""

    mat: tuple
    h: HeisenbergElement

    def __post_init__(self):
        object.__setattr__(self, "mat", _fraction_matrix(self.mat))
        (a, b), (c, d) = self.mat
        if a * d - b * c != 1:
            raise ValueError("matrix part must have determinant one")

    def mat_np(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.mat])


def jacobi_identity(n: int) -> JacobiElement:
    return JacobiElement(((1, 0), (0, 1)), heisenberg_identity(n))


def jacobi_mul(gram, g1: JacobiElement, g2: JacobiElement) -> JacobiElement:
    """(A, h)(A', h') = (A A', h^{A'} h')."""
    (a, b), (c, d) = g1.mat
    (e, f), (g, k) = g2.mat
    prod = ((a * e + b * g, a * f + b * k), (c * e + d * g, c * f + d * k))
    moved = sl2_right_action(gram, g1.h, g2.mat)
    return JacobiElement(prod, heisenberg_mul(gram, moved, g2.h))


def jacobi_inverse(gram, g: JacobiElement) -> JacobiElement:
    (a, b), (c, d) = g.mat
    inv = ((d, -b), (-c, a))
    hinv = sl2_right_action(gram, heisenberg_inverse(gram, g.h), inv)
    return JacobiElement(inv, hinv)


def jacobi_embed(space: Space, g: JacobiElement) -> OrthElement:
    """The block embedding of an integral Jacobi element into the bordered
    orthogonal group: rotation piece, unipotent piece, and the central
    first-coordinate translation by (angle - pairing of x with y).

    The central factor is what makes the embedding multiplicative: the
    bare rotation-times-unipotent product only composes up to such a
    translation.  It reduces to the bare product exactly when the angle
    equals the pairing, in particular for pairs with x or y zero and
    trivial angle.  Only integral elements with whole angle land in the
    integral group; anything else raises NonIntegralEmbed.
    """
    (a, b), (c, d) = g.mat
    for v in (a, b, c, d):
        if v.denominator != 1:
            raise NonIntegralEmbed(f"matrix entry {v} is not integral")
    if not g.h.is_integral():
        raise NonIntegralEmbed(
            "Heisenberg part has non-integral coordinates or angle")
    x = [int(v) for v in g.h.x]
    y = [int(v) for v in g.h.y]
    D = ((int(a), int(b)), (int(c), int(d)))
    central = int(g.h.phase - sigma_pairing(space.L.gram(), x, y))
    lam = [central] + [0] * (space.dim - 1)
    return rotation(space, D) @ heisenberg(space, x, y) @ translation(space, lam)


def jacobi_action(g: JacobiElement, tau: complex, z) -> tuple:
    """The advertised action on the upper half plane times C^n:
    (tau, z) -> (A tau, (z + x tau + y) / (c tau + d))."""
    (a, b), (c, d) = (tuple(float(v) for v in row) for row in g.mat)
    z = np.asarray(z, dtype=complex)
    x = np.array([float(v) for v in g.h.x])
    y = np.array([float(v) for v in g.h.y])
    j = c * tau + d
    return (a * tau + b) / j, (z + x * tau + y) / j


# ------------------------------------------------------------------ slash

def slash(gram, f, element, k: int):
    """The weight-k slash of f by a matrix, a Heisenberg element, or a full
    Jacobi element; returns a new callable on (tau, z).

    Matrices may sit in GL_2^+ and are first normalized by the reciprocal
    square root of the determinant.
    """
    S = np.asarray([[float(v) for v in row] for row in gram])
    if isinstance(element, JacobiElement):
        return slash(gram, slash(gram, f, element.mat_np(), k), element.h, k)
    if isinstance(element, HeisenbergElement):
        x = np.array([float(v) for v in element.x])
        y = np.array([float(v) for v in element.y])
        zeta = element.zeta()
        sxx = float(x @ S @ x)

        def heis_slashed(tau, z):
            z = np.asarray(z, dtype=complex)
            pref = zeta * cmath.exp(1j * math.pi * tau * sxx
                                    + 2j * math.pi * complex(x @ S @ z))
            return pref * f(tau, z + x * tau + y)

        return heis_slashed

    M = np.asarray(element, dtype=float)
    if M.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    det = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    if det <= 0:
        raise ValueError(f"determinant {det} is not positive")
    a, b, c, d = (M / math.sqrt(det)).ravel()

    def mat_slashed(tau, z):
        z = np.asarray(z, dtype=complex)
        j = c * tau + d
        szz = complex(z @ S @ z)
        return (j ** (-k) * cmath.exp(-1j * math.pi * c * szz / j)
                * f((a * tau + b) / j, z / j))

    return mat_slashed
