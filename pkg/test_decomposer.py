import math
import random
import unittest
from fractions import Fraction
from unittest import mock

from modules.arith import RealInterval
from modules.basis_angles import BasisKey, basis_angles_for
from modules.class_group import class_group, discriminant_of
from modules.decomposer import (
    AngleCombo,
    PureAngle,
    combo_eval,
    combo_verify_exact,
    decompose,
    parse_angle,
    parse_combo,
    squared_trig,
    tan_surd,
)
from modules.errors import DomainError, ParseError, ResourceLimitError

K32 = BasisKey(3, 2)
K35 = BasisKey(3, 5)
K51 = BasisKey(5, 1)
K73 = BasisKey(7, 3)
K133 = BasisKey(13, 3)


class TestParseAngle(unittest.TestCase):
    def test_equivalent_forms(self):
        expected = PureAngle(0, Fraction(8, 9))
        for text in ("ang(8/9)", "sin2=8/9", "cos2=1/9", "tan2=8", "cot2=1/8", "sec2=9", "csc2=9/8",
                     "tan=(2/1)sqrt(2)"):
            self.assertEqual(parse_angle(text), expected, text)

    def test_quarter_turns(self):
        self.assertEqual(parse_angle("ang(1+2/3)"), PureAngle(1, Fraction(2, 3)))
        self.assertEqual(parse_angle("sin2=1/3 + pi/2"), PureAngle(1, Fraction(1, 3)))
        self.assertEqual(parse_angle("sin2=1/3 + 2*pi/2"), PureAngle(2, Fraction(1, 3)))
        self.assertEqual(parse_angle("ang(5/2)"), PureAngle(2, Fraction(1, 2)))
        self.assertEqual(parse_angle("ang(1)"), PureAngle(1, Fraction(0)))

    def test_dict_form(self):
        self.assertEqual(parse_angle({"sin2": "8/9"}), PureAngle(0, Fraction(8, 9)))
        self.assertEqual(parse_angle({"tan": (5, 4, 3), "n": 2}), PureAngle(2, Fraction(75, 91)))

    def test_errors(self):
        with self.assertRaises(ParseError) as ctx:
            parse_angle("foo(1/2)")
        self.assertIn("foo", str(ctx.exception))
        with self.assertRaises(DomainError):
            parse_angle("sin2=3/2")
        with self.assertRaises(DomainError):
            parse_angle("sec2=1/2")
        with self.assertRaises(DomainError):
            parse_angle("tan=(1/2)sqrt(8)")


class TestTrig(unittest.TestCase):
    def test_squared_trig(self):
        values = squared_trig(PureAngle(0, Fraction(8, 9)))
        self.assertEqual(values, {
            "sin2": Fraction(8, 9), "cos2": Fraction(1, 9), "tan2": Fraction(8),
            "cot2": Fraction(1, 8), "sec2": Fraction(9), "csc2": Fraction(9, 8),
        })
        right = squared_trig(PureAngle(1, Fraction(0)))
        self.assertIsNone(right["tan2"])
        self.assertEqual(right["cot2"], 0)

    def test_tan_surd(self):
        tan = tan_surd(PureAngle(0, Fraction(75, 91)))
        self.assertEqual((tan.a, tan.b, tan.d, tan.negated), (4, 5, 3, False))
        tan = tan_surd(PureAngle(1, Fraction(2, 3)))
        self.assertEqual((tan.a, tan.b, tan.d, tan.negated), (2, 1, 2, True))
        self.assertTrue(tan_surd(PureAngle(1, Fraction(0))).infinite)


class TestDecompose(unittest.TestCase):
    def test_worked_example(self):
        combo = decompose(parse_angle("tan=(5/4)sqrt(3)"))
        self.assertEqual(combo, AngleCombo.build(1, {K73: -1, K133: -1}))
        self.assertEqual(combo.to_text(), "t=1; <7>_3^-1; <13>_3^-1")

    def test_tetrahedral_angle(self):
        combo = decompose(parse_angle("sin2=8/9"))
        self.assertEqual(combo.to_text(), "t=1; <3>_2^-2")
        self.assertEqual(decompose(parse_angle("ang(1+2/3)")).to_text(), "t=1/2; <3>_2^1")

    def test_rational_multiples_of_pi(self):
        self.assertEqual(decompose(parse_angle("ang(1/2)")), AngleCombo(Fraction(1, 4)))
        self.assertEqual(decompose(parse_angle("ang(1/4)")), AngleCombo(Fraction(1, 6)))
        self.assertEqual(decompose(parse_angle("ang(3/4)")), AngleCombo(Fraction(1, 3)))
        self.assertEqual(decompose(parse_angle("ang(2)")), AngleCombo(Fraction(1)))
        self.assertEqual(decompose(parse_angle("ang(0)")), AngleCombo())

    def test_basis_angle_itself(self):
        self.assertEqual(decompose(parse_angle("tan=(1/1)sqrt(2)")), AngleCombo.build(0, {K32: 1}))
        self.assertEqual(decompose(parse_angle("tan2=4")), AngleCombo.build(0, {K51: 1}))
        self.assertEqual(decompose(parse_angle("tan2=5/4")), AngleCombo.build(0, {K35: 2}))

    def test_exact_verification(self):
        theta = parse_angle("sin2=8/9")
        self.assertTrue(combo_verify_exact(theta, AngleCombo.build(1, {K32: -2})))
        self.assertFalse(combo_verify_exact(theta, AngleCombo.build(0, {K32: -2})))
        self.assertFalse(combo_verify_exact(theta, AngleCombo.build(1, {K32: -1})))
        self.assertFalse(combo_verify_exact(theta, AngleCombo.build(1, {K32: Fraction(-3, 2)})))

    def test_round_trip(self):
        rng = random.Random(20240917)
        cases = 0
        while cases < 500:
            a, b = rng.randint(1, 50), rng.randint(1, 50)
            if Fraction(a, b).denominator != b:
                continue
            d = rng.choice((1, 2, 3, 5, 6, 7, 10, 13))
            theta = parse_angle({"tan": (b, a, d), "n": rng.randint(0, 3)})
            combo = decompose(theta)
            self.assertTrue(combo.is_integral)
            self.assertTrue(combo_verify_exact(theta, combo), (a, b, d))
            self.assertTrue(combo_eval(combo, 256).overlaps(theta.value(256)))
            self.assertLessEqual(combo.t.denominator, 12 * class_group(d).c_d)
            cases += 1

    def test_quarter_turn_shift(self):
        rng = random.Random(77)
        cases = 0
        while cases < 200:
            a, b = rng.randint(1, 40), rng.randint(1, 40)
            if Fraction(a, b).denominator != b:
                continue
            d = rng.choice((1, 2, 3, 5, 6, 7, 10, 13))
            theta = parse_angle({"tan": (b, a, d)})
            k = rng.randint(1, 6)
            base = decompose(theta)
            shifted = decompose(PureAngle(theta.n + k, theta.r))
            self.assertEqual(shifted.terms, base.terms, (a, b, d, k))
            self.assertEqual(shifted - base, AngleCombo(Fraction(k, 2)), (a, b, d, k))
            cases += 1
        self.assertEqual(
            decompose(parse_angle("ang(8/9) + 2*pi/2")),
            decompose(parse_angle("ang(8/9)")) + AngleCombo(Fraction(1)),
        )

    def test_t_denominator_divides_unit_and_class_order(self):
        rng = random.Random(31)
        units = {1: 2, 3: 3}
        cases = 0
        while cases < 300:
            a, b = rng.randint(1, 60), rng.randint(1, 60)
            if Fraction(a, b).denominator != b:
                continue
            d = rng.choice((1, 2, 3, 5, 6, 7, 10, 13, 14, 17, 21, 23))
            # 範數與判別式互質時沒有分歧質數
            if math.gcd(a * a + d * b * b, abs(discriminant_of(d))) != 1:
                continue
            theta = parse_angle({"tan": (b, a, d), "n": rng.randint(0, 3)})
            combo = decompose(theta)
            base_t = combo.t - Fraction(theta.n, 2)
            self.assertEqual((base_t * units.get(d, 1) * class_group(d).c_d).denominator, 1, (a, b, d))
            cases += 1


class TestIndependence(unittest.TestCase):
    def test_random_basis_combinations_are_irrational(self):
        pool = [angle.key for d in (1, 2, 3, 5, 6, 7, 14) for angle in basis_angles_for(d, 40)]
        rng = random.Random(200)
        bound = 1000
        for _ in range(200):
            keys = rng.sample(pool, rng.randint(1, 4))
            terms = {key: rng.choice([c for c in range(-5, 6) if c]) for key in keys}
            combo = AngleCombo.build(0, terms)
            ratio = combo_eval(combo, 256) / RealInterval.pi(256)
            self.assertLess(ratio.width, Fraction(1, 2 * bound * bound))
            candidate = ratio.midpoint.limit_denominator(bound)
            self.assertFalse(ratio.contains(candidate), combo)


class TestFactorLimit(unittest.TestCase):
    def test_small_limit_raises(self):
        theta = parse_angle("tan=(5/4)sqrt(3)")
        with mock.patch("modules.arith.TRIAL_DIVISION_BOUND", 6):
            with self.assertRaises(ResourceLimitError):
                decompose(theta, factor_limit=2)
            self.assertEqual(decompose(theta, factor_limit=10 ** 6), AngleCombo.build(1, {K73: -1, K133: -1}))


class TestCombo(unittest.TestCase):
    def test_parse_forms(self):
        expected = AngleCombo.build(1, {K32: -2})
        self.assertEqual(parse_combo("pi - 2*<3>_2"), expected)
        self.assertEqual(parse_combo("t=1; <3>_2^-2"), expected)
        self.assertEqual(
            parse_combo("3*pi/4 - <3>_5 + 1/2*<5>_1"),
            AngleCombo.build(Fraction(3, 4), {K35: -1, K51: Fraction(1, 2)}),
        )
        self.assertEqual(parse_combo("0"), AngleCombo())

    def test_parse_errors(self):
        with self.assertRaises(ParseError):
            parse_combo("pi - 2*<3>")
        with self.assertRaises(DomainError):
            parse_combo("<2>_3")

    def test_arithmetic(self):
        alpha = parse_combo("pi - 2*<3>_2")
        beta = parse_combo("pi/2 + <3>_2")
        self.assertEqual(alpha + beta.scale(2), AngleCombo(Fraction(2)))
        self.assertEqual(alpha - alpha, AngleCombo())
        self.assertEqual(-beta, AngleCombo.build(Fraction(-1, 2), {K32: -1}))

    def test_residue(self):
        self.assertEqual(AngleCombo(Fraction(3, 4)).residue(), Fraction(-1, 4))
        self.assertEqual(AngleCombo(Fraction(1, 2)).residue(), Fraction(1, 2))
        self.assertEqual(AngleCombo(Fraction(-1, 2)).residue(), Fraction(1, 2))
        self.assertEqual(AngleCombo(Fraction(2)).residue(), 0)

    def test_dict_round_trip(self):
        combo = parse_combo("3*pi/4 - <3>_5 + 1/2*<5>_1")
        self.assertEqual(AngleCombo.from_dict(combo.to_dict()), combo)
        with self.assertRaises(ParseError):
            AngleCombo.from_dict({"terms": []})


if __name__ == "__main__":
    unittest.main()
