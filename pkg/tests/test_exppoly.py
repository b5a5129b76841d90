"""Exact-term algebra: canonicalization, arithmetic, derivatives, JSON."""

import math
from fractions import Fraction

import numpy as np
import pytest

from orthokleis.exppoly import ExpPoly, PiPoly


def _sample_poly() -> ExpPoly:
    """A mixed poly exercising half-integer det powers, all three
    monomial slots, X-frequencies, and pi-polynomial coefficients."""
    t1 = ExpPoly.single(PiPoly.const(1) + PiPoly.pi_times(1),
                        p=Fraction(1, 2), mono=(1, 0, 0),
                        A=(1, 0, 1), B=(2, 1, 0))
    t2 = ExpPoly.single(PiPoly.pi_times(0, 2),
                        p=0, mono=(0, 1, 1), A=(0, 1, 0),
                        B=(1, 1, Fraction(1, 4)))
    t3 = ExpPoly.single(PiPoly.const(0, 1), p=Fraction(3, 2),
                        mono=(0, 0, 0), A=(0, 0, 0), B=(1, 2, 0))
    return t1 + t2 + t3


def _rand_point(rng):
    x = rng.uniform(-0.5, 0.5, 3)
    y1 = rng.uniform(0.8, 1.6)
    y2 = rng.uniform(0.8, 1.6)
    y3 = rng.uniform(-0.3, 0.3)
    return (complex(x[0], y1), complex(x[1], y2), complex(x[2], y3))


class TestPiPoly:
    def test_arithmetic(self):
        one_plus = PiPoly.const(1) + PiPoly.pi_times(1)
        two_minus = PiPoly.const(2) - PiPoly.pi_times(1)
        prod = one_plus * two_minus
        # (1 + pi)(2 - pi) = 2 + pi - pi^2
        assert prod.coeffs == (
            (Fraction(2), Fraction(0)),
            (Fraction(1), Fraction(0)),
            (Fraction(-1), Fraction(0)),
        )

    def test_evaluate_matches_float(self):
        q = PiPoly.const(Fraction(1, 3), 2) + PiPoly.pi_times(1, -1)
        want = complex(Fraction(1, 3), 2) + (1 - 1j) * math.pi
        assert abs(q.evaluate() - want) < 1e-15

    def test_cancellation_strips(self):
        q = PiPoly.pi_times(3) - PiPoly.pi_times(3)
        assert q.is_zero
        assert q.coeffs == ()

    def test_hash_consistency(self):
        a = PiPoly.const(1) + PiPoly.pi_times(2)
        b = PiPoly.pi_times(2) + PiPoly.const(1)
        assert a == b and hash(a) == hash(b)


class TestCanonicalization:
    def test_syzygy_rewrite_to_zero(self):
        """y1*y2 and det Y + y3^2 are the same function; the normal form
        must identify them exactly."""
        lhs = ExpPoly.single(PiPoly.const(1), mono=(1, 1, 0))
        rhs = ExpPoly.det_power(1) + ExpPoly.single(
            PiPoly.const(1), mono=(0, 0, 2))
        assert (lhs - rhs).is_zero

    def test_reduced_monomials(self):
        f = ExpPoly.single(PiPoly.const(3), p=Fraction(1, 2),
                           mono=(2, 3, 1), A=(1, 0, 0), B=(1, 1, 0))
        for (_, mono, _, _) in f.terms:
            assert min(mono[0], mono[1]) == 0

    def test_idempotent(self):
        f = _sample_poly() * _sample_poly() + _sample_poly()
        again = ExpPoly(dict(f.terms))
        assert again == f

    def test_syzygy_preserves_values(self):
        f = ExpPoly.single(PiPoly.const(1, 1), p=Fraction(-1, 2),
                           mono=(2, 2, 0), A=(0, 0, 0), B=(1, 1, 0))
        rng = np.random.default_rng(3)
        for _ in range(5):
            z = _rand_point(rng)
            y1, y2, y3 = z[0].imag, z[1].imag, z[2].imag
            u = y1 * y2 - y3 * y3
            direct = (1 + 1j) * u ** -0.5 * (y1 * y2) ** 2 * math.exp(
                -math.pi * (y1 + y2))
            assert abs(f.evaluate(z) - direct) < 1e-12 * abs(direct)


class TestArithmetic:
    def test_mul_matches_pointwise(self):
        f, g = _sample_poly(), _sample_poly().scale(0, 1)
        h = f * g
        rng = np.random.default_rng(11)
        for _ in range(5):
            z = _rand_point(rng)
            assert abs(h.evaluate(z) - f.evaluate(z) * g.evaluate(z)) < 1e-12

    def test_scale_and_neg(self):
        f = _sample_poly()
        assert (f + (-f)).is_zero
        assert (f.scale(2) - f - f).is_zero

    def test_mul_det_power_shifts(self):
        f = ExpPoly.det_power(Fraction(1, 2))
        g = f.mul_det_power(Fraction(3, 2))
        ((p, _, _, _),) = list(g.terms)
        assert p == 2

    def test_x_average_filters(self):
        keep = ExpPoly.single(PiPoly.const(2), B=(1, 1, 0))
        drop = ExpPoly.single(PiPoly.const(5), A=(1, 0, 0), B=(1, 1, 0))
        both = keep + drop
        assert both.x_average() == keep
        assert drop.x_average().is_zero


class TestDerivatives:
    def test_finite_difference_grid(self):
        f = _sample_poly()
        rng = np.random.default_rng(19)
        h = 1e-5
        for _ in range(10):
            z = list(_rand_point(rng))
            for j in (1, 2, 3):
                for shift, sym in ((h, f.dx(j)), (1j * h, f.dy(j))):
                    zp = list(z)
                    zm = list(z)
                    zp[j - 1] += shift
                    zm[j - 1] -= shift
                    num = (f.evaluate(zp) - f.evaluate(zm)) / (2 * h)
                    ref = sym.evaluate(z)
                    scale = max(abs(ref), 1.0)
                    assert abs(num - ref) < 5e-6 * scale

    def test_wirtinger_relations(self):
        f = _sample_poly()
        for j in (1, 2, 3):
            assert (f.dz(j) + f.dzbar(j) - f.dx(j)).is_zero
            assert (f.dz(j) - f.dzbar(j) - f.dy(j).scale(0, -1)).is_zero

    def test_holomorphic_character(self):
        """exp(pi i tr(A Z)) has vanishing antiholomorphic derivatives and
        picks up exactly pi*i times the frequency weight under dz."""
        f = ExpPoly.exp_term((2, 4, 1), (2, 4, 1))
        for j, weight in ((1, 2), (2, 4), (3, 2)):
            assert f.dzbar(j).is_zero
            assert (f.dz(j) - f.scale_poly(PiPoly.pi_times(0, weight))).is_zero

    def test_det_dy_on_det_powers(self):
        """det(d/dY) acts on (det Y)^b as b(b+1/2) (det Y)^{b-1}."""
        for b in (Fraction(1), Fraction(2), Fraction(5, 2), Fraction(-3, 2)):
            got = ExpPoly.det_power(b).det_dy()
            want = ExpPoly.det_power(b - 1).scale(b * (b + Fraction(1, 2)))
            assert (got - want).is_zero
        assert ExpPoly.det_power(0).det_dy().is_zero

    def test_det_dz_equals_quarter_det_dy_x_free(self):
        """On X-independent input det(d/dZ) = (-1/4) det(d/dY)."""
        f = (ExpPoly.single(PiPoly.const(1), p=Fraction(1, 2), mono=(0, 1, 0),
                            B=(1, 1, 0))
             + ExpPoly.single(PiPoly.pi_times(1), p=1, mono=(0, 0, 1),
                              B=(2, 1, Fraction(1, 2))))
        assert (f.det_dz() - f.det_dy().scale(Fraction(-1, 4))).is_zero

    def test_mixed_partials_commute(self):
        f = _sample_poly()
        for i in (1, 2, 3):
            for j in (1, 2, 3):
                assert (f.dy(i).dy(j) - f.dy(j).dy(i)).is_zero
                assert (f.dx(i).dy(j) - f.dy(j).dx(i)).is_zero


class TestEvaluation:
    def test_rejects_indefinite_y(self):
        f = _sample_poly()
        with pytest.raises(ValueError):
            f.evaluate((1j, -1j, 0))
        with pytest.raises(ValueError):
            f.evaluate((1j, 1j, 2j))

    def test_constant(self):
        f = ExpPoly.constant(Fraction(3, 4), -2)
        assert f.evaluate((0.3 + 1j, 1j, 0.1j)) == complex(0.75, -2)


class TestSerialization:
    def test_roundtrip_exact(self):
        f = _sample_poly() * _sample_poly() + ExpPoly.det_power(Fraction(-1, 2))
        back = ExpPoly.from_json(f.to_json())
        assert back == f

    def test_roundtrip_through_json_text(self):
        import json
        f = _sample_poly()
        back = ExpPoly.from_json(json.loads(json.dumps(f.to_json())))
        assert back == f

    def test_binary_float_frequencies_exact(self):
        b = 0.1  # not a dyadic rational in decimal, but exact as a float
        f = ExpPoly.exp_term((0, 0, 0), (b, b, 0))
        back = ExpPoly.from_json(f.to_json())
        assert back == f
        ((_, _, _, B),) = list(back.terms)
        assert B[0] == Fraction(0.1)
