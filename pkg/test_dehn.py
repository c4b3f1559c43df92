import itertools
import json
import os
import tempfile
import unittest
from fractions import Fraction

import numpy as np
import sympy
from scipy.spatial import ConvexHull

from modules.basis_angles import BasisKey
from modules.decomposer import AngleCombo, combo_eval, parse_combo
from modules.dehn import (
    DehnVector,
    Edge,
    Polyhedron,
    archimedean,
    archimedean_names,
    dehn_invariant,
    equidecomposable,
    load_polyhedron,
    parse_group,
    parse_volume,
    table3,
)
from modules.errors import DomainError, ParseError

K32 = BasisKey(3, 2)
K35 = BasisKey(3, 5)
K51 = BasisKey(5, 1)

# 單位邊長多面體的 Dehn 不變量（已發表的數值）
PUBLISHED = [
    ("tetrahedron", {K32: -12}),
    ("truncated tetrahedron", {K32: 12}),
    ("cube", {}),
    ("truncated cube", {K32: -24}),
    ("octahedron", {K32: 24}),
    ("truncated octahedron", {}),
    ("rhombicuboctahedron", {K32: -24}),
    ("cuboctahedron", {K32: -24}),
    ("truncated cuboctahedron", {}),
    ("icosahedron", {K35: 60}),
    ("truncated icosahedron", {K51: 30}),
    ("dodecahedron", {K51: -30}),
    ("truncated dodecahedron", {K35: -60}),
    ("rhombicosidodecahedron", {K35: 60, K51: -30}),
    ("icosidodecahedron", {K35: -60, K51: 30}),
    ("truncated icosidodecahedron", {}),
]

# 已發表的表格在這一列的正負號有誤：3-4 二面角為 π/2 + ⟨3⟩₂，4-4 二面角為 3π/4
SIGN_ERRATA = {"rhombicuboctahedron": {K32: 24}}

PHI = (1 + 5 ** 0.5) / 2
SQRT2 = 2 ** 0.5


def _signed(base, cyclic):
    """對 base 的座標取所有正負號，再取全部或循環排列"""
    points = {}
    orders = ((0, 1, 2), (1, 2, 0), (2, 0, 1)) if cyclic else tuple(itertools.permutations(range(3)))
    for signs in itertools.product((1, -1), repeat=3):
        v = tuple(s * c for s, c in zip(signs, base))
        for order in orders:
            p = tuple(v[i] + 0.0 for i in order)
            points.setdefault(tuple(round(c, 9) + 0.0 for c in p), p)
    return points


def _vertices(*bases, cyclic=True):
    points = {}
    for base in bases:
        points.update(_signed(base, cyclic))
    return np.array(sorted(points.values()))


def _even_sign(base):
    points = _signed(base, cyclic=False).values()
    return np.array(sorted(p for p in points if sum(c < 0 for c in p) % 2 == 0))


VERTICES = {
    "tetrahedron": np.array([(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)], dtype=float),
    "truncated tetrahedron": _even_sign((3, 1, 1)),
    "cube": _vertices((1, 1, 1)),
    "truncated cube": _vertices((SQRT2 - 1, 1, 1), cyclic=False),
    "octahedron": _vertices((1, 0, 0), cyclic=False),
    "truncated octahedron": _vertices((0, 1, 2), cyclic=False),
    "rhombicuboctahedron": _vertices((1, 1, 1 + SQRT2), cyclic=False),
    "cuboctahedron": _vertices((1, 1, 0), cyclic=False),
    "truncated cuboctahedron": _vertices((1, 1 + SQRT2, 1 + 2 * SQRT2), cyclic=False),
    "icosahedron": _vertices((0, 1, PHI)),
    "truncated icosahedron": _vertices((0, 1, 3 * PHI), (1, 2 + PHI, 2 * PHI), (PHI, 2, PHI ** 3)),
    "dodecahedron": _vertices((1, 1, 1), (0, 1 / PHI, PHI)),
    "truncated dodecahedron": _vertices((0, 1 / PHI, 2 + PHI), (1 / PHI, PHI, 2 * PHI), (PHI, 2, PHI + 1)),
    "rhombicosidodecahedron": _vertices((1, 1, PHI ** 3), (PHI ** 2, PHI, 2 * PHI), (2 + PHI, 0, PHI ** 2)),
    "icosidodecahedron": _vertices((0, 0, PHI), (0.5, PHI / 2, PHI ** 2 / 2)),
    "truncated icosidodecahedron": _vertices(
        (1 / PHI, 1 / PHI, 3 + PHI), (2 / PHI, PHI, 1 + 2 * PHI), (1 / PHI, PHI ** 2, -1 + 3 * PHI),
        (2 * PHI - 1, 2, 2 + PHI), (PHI, 3, 2 * PHI),
    ),
}


def _hull_edges(points):
    """凸包的真正邊：(邊長, 二面角)；同一平面的三角形先合併"""
    hull = ConvexHull(points)
    planes = []
    plane_ids = []
    for eq in hull.equations:
        pid = next((i for i, q in enumerate(planes) if np.allclose(q, eq, atol=1e-9)), None)
        if pid is None:
            pid = len(planes)
            planes.append(eq)
        plane_ids.append(pid)
    owners = {}
    for simplex, pid in zip(hull.simplices, plane_ids):
        for a, b in itertools.combinations(sorted(simplex), 2):
            owners.setdefault((a, b), set()).add(pid)
    edges = []
    for (a, b), pids in owners.items():
        if len(pids) != 2:
            continue
        n1, n2 = (planes[i][:3] for i in pids)
        dihedral = np.pi - np.arccos(np.clip(np.dot(n1, n2), -1.0, 1.0))
        edges.append((np.linalg.norm(points[a] - points[b]), dihedral))
    return edges, hull.volume


class TestDataset(unittest.TestCase):
    def test_names(self):
        self.assertEqual(archimedean_names(), [name for name, _ in PUBLISHED])

    def test_geometric_oracle(self):
        for name, points in VERTICES.items():
            P = archimedean(name)
            edges, volume = _hull_edges(points)
            lengths = [length for length, _ in edges]
            unit = lengths[0]
            self.assertTrue(np.allclose(lengths, unit, atol=1e-9), name)
            self.assertEqual(len(edges), sum(e.count for e in P.edges), name)

            measured = sorted(angle for _, angle in edges)
            stored = sorted(
                angle
                for e in P.edges
                for angle in [float(combo_eval(e.dihedral, 64))] * e.count
            )
            self.assertTrue(np.allclose(measured, stored, rtol=0, atol=1e-10), name)
            self.assertAlmostEqual(volume / unit ** 3, float(P.volume), places=9, msg=name)

    def test_name_normalization(self):
        self.assertEqual(archimedean("Truncated_Tetrahedron"), archimedean("truncated tetrahedron"))
        self.assertEqual(archimedean("  truncated-cube "), archimedean("truncated cube"))

    def test_rejected_names(self):
        with self.assertRaises(DomainError) as ctx:
            archimedean("snub cube")
        self.assertIn("snub cube", str(ctx.exception))
        with self.assertRaises(DomainError):
            archimedean("snub_dodecahedron")
        with self.assertRaises(DomainError):
            archimedean("great dodecahedron")


class TestDehnInvariant(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(dehn_invariant(archimedean("truncated tetrahedron")), DehnVector.build({K32: 12}))
        self.assertTrue(dehn_invariant(archimedean("cube")).is_zero)
        self.assertEqual(dehn_invariant(archimedean("icosahedron")), DehnVector.build({K35: 60}))
        self.assertEqual(
            dehn_invariant(archimedean("icosidodecahedron")),
            DehnVector.build({K35: -60, K51: 30}),
        )

    def test_table3(self):
        rows = table3()
        self.assertEqual(len(rows), 16)
        for (name, vector), (published_name, published) in zip(rows, PUBLISHED):
            self.assertEqual(name, published_name)
            expected = SIGN_ERRATA.get(name, published)
            self.assertEqual(vector, DehnVector.build(expected), name)
        rhombi = dict(rows)["rhombicuboctahedron"]
        self.assertEqual(rhombi, -DehnVector.build(PUBLISHED[6][1]))

    def test_text(self):
        rows = dict(table3())
        self.assertEqual(rows["tetrahedron"].to_text(), "-12*<3>_2")
        self.assertEqual(rows["icosidodecahedron"].to_text(), "30*<5>_1 - 60*<3>_5")
        self.assertEqual(rows["rhombicosidodecahedron"].to_text(), "-30*<5>_1 + 60*<3>_5")
        self.assertEqual(rows["truncated icosidodecahedron"].to_text(), "0")

    def test_zero_sum(self):
        total = DehnVector()
        for name in ("icosahedron", "dodecahedron", "icosidodecahedron"):
            total = total + dehn_invariant(archimedean(name))
        self.assertTrue(total.is_zero)

    def test_additivity_and_scaling(self):
        tet, octa = archimedean("tetrahedron"), archimedean("octahedron")
        union = tet.union(octa)
        self.assertEqual(dehn_invariant(union), dehn_invariant(tet) + dehn_invariant(octa))
        self.assertEqual(union.volume, tet.volume + octa.volume)

        doubled = archimedean("dodecahedron").scaled(2)
        self.assertEqual(dehn_invariant(doubled), dehn_invariant(archimedean("dodecahedron")).scale(2))
        self.assertEqual(sympy.simplify(doubled.volume - 8 * archimedean("dodecahedron").volume), 0)

    def test_edge_validation(self):
        with self.assertRaises(DomainError):
            Edge(Fraction(1), 6, AngleCombo(Fraction(1)))
        with self.assertRaises(DomainError):
            Edge(Fraction(-1), 6, parse_combo("pi/2"))
        with self.assertRaises(DomainError):
            Edge(Fraction(1), 0, parse_combo("pi/2"))
        with self.assertRaises(DomainError):
            Polyhedron("empty", ())


class TestEquidecomposable(unittest.TestCase):
    def test_reflexive(self):
        cube = archimedean("cube")
        verdict = equidecomposable([(1, cube)], [(1, cube)])
        self.assertEqual((verdict.dehn_equal, verdict.volume_status, verdict.answer), (True, "equal", "YES"))

    def test_tetrahedron_vs_cube(self):
        tet = archimedean("tetrahedron")
        cube = archimedean("cube").with_volume(tet.volume)
        verdict = equidecomposable([(1, tet)], [(1, cube)])
        self.assertFalse(verdict.dehn_equal)
        self.assertEqual(verdict.volume_status, "equal")
        self.assertEqual(verdict.answer, "NO")

    def test_zero_sum_cube(self):
        left = [(1, archimedean(n)) for n in ("icosahedron", "dodecahedron", "icosidodecahedron")]
        cube = archimedean("cube").with_volume("(25 + 10*sqrt(5))/2")
        verdict = equidecomposable(left, [(1, cube)])
        self.assertTrue(verdict.dehn_equal)
        self.assertEqual(verdict.volume_status, "equal")
        self.assertEqual(verdict.answer, "YES")

    def test_unknown_volume(self):
        cube = archimedean("cube")
        bare = Polyhedron("bare cube", cube.edges)
        verdict = equidecomposable([(1, cube)], [(1, bare)])
        self.assertEqual((verdict.volume_status, verdict.answer), ("unknown", "CONDITIONAL"))

    def test_multiplicities(self):
        cube = archimedean("cube")
        verdict = equidecomposable([(8, cube)], [(1, cube.scaled(2))])
        self.assertEqual(verdict.answer, "YES")
        with self.assertRaises(DomainError):
            equidecomposable([(0, cube)], [(1, cube)])

    def test_parse_group(self):
        group = parse_group("icosahedron+2*cube")
        self.assertEqual([(m, P.name) for m, P in group], [(1, "icosahedron"), (2, "cube")])


class TestPolyhedronFiles(unittest.TestCase):
    def _write(self, payload):
        handle = tempfile.NamedTemporaryFile("w", suffix=".json", delete=False, encoding="utf-8")
        with handle:
            json.dump(payload, handle)
        self.addCleanup(os.remove, handle.name)
        return handle.name

    def test_load(self):
        path = self._write({
            "name": "half tetrahedron",
            "volume": {"kind": "rational", "value": "1/3"},
            "edges": [{"length": "1/2", "count": 6, "dihedral": "pi - 2*<3>_2"}],
        })
        P = load_polyhedron(path)
        self.assertEqual(P.name, "half tetrahedron")
        self.assertEqual(P.volume, sympy.Rational(1, 3))
        self.assertEqual(dehn_invariant(P), DehnVector.build({K32: -6}))

    def test_angle_form_dihedral(self):
        path = self._write({
            "name": "tet",
            "volume": {"kind": "symbolic", "value": "sqrt(2)/12"},
            "edges": [{"length": "1", "count": 6, "dihedral": "cos2=1/9"}],
        })
        self.assertEqual(dehn_invariant(load_polyhedron(path)), dehn_invariant(archimedean("tetrahedron")))

    def test_bad_files(self):
        path = self._write({"name": "x", "volume": {"kind": "float", "value": "1"}, "edges": []})
        with self.assertRaises(ParseError):
            load_polyhedron(path)
        with self.assertRaises(DomainError):
            load_polyhedron(os.path.join(tempfile.gettempdir(), "does-not-exist.json"))

    def test_volume_whitelist(self):
        with self.assertRaises(ParseError):
            parse_volume("__import__('os')")
        with self.assertRaises(DomainError):
            parse_volume("-1")
        self.assertEqual(parse_volume(Fraction(1, 2)), sympy.Rational(1, 2))


if __name__ == "__main__":
    unittest.main()
