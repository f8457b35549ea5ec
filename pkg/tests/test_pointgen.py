"""Point-set oracles: per-point long division vs bulk path, interlacing."""

import itertools
import json
import random

import numpy as np
import pytest

from polylat.gfpoly import DigitVector, GfPoly, find_irreducible
from polylat.pointgen import (
    GeneratingVector,
    classical_digit_array,
    classical_points,
    digits_to_values,
    index_to_poly,
    interlace_digit_array,
    interlace_digits,
    interlace_points,
    iter_classical_points,
    lattice_points,
    point_for_index,
    write_points_csv,
    write_points_digits,
)


def make_gv(b, m, encs, alpha=1):
    return GeneratingVector(
        modulus=find_irreducible(b, m),
        alpha=alpha,
        q=tuple(GfPoly.from_int(b, e) for e in encs),
    )


class TestIndexToPoly:
    def test_zero(self):
        assert index_to_poly(0, 2).is_zero()

    def test_binary_and_ternary_readoff(self):
        assert index_to_poly(5, 2) == GfPoly(2, (1, 0, 1))  # x^2+1
        assert index_to_poly(5, 3) == GfPoly(3, (2, 1))  # x+2

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            index_to_poly(-1, 2)


class TestClassicalPoints:
    def test_m2_first_coordinate(self):
        gv = make_gv(2, 2, [1])
        ps = classical_points(gv)
        assert ps.points[1].coords[0].digits == (0, 1)  # value 1/4
        assert ps.points[1].coords[0].value() == 0.25

    def test_index_zero_is_origin(self):
        gv = make_gv(2, 3, [1, 5, 7])
        assert all(c.value() == 0.0 for c in classical_points(gv).points[0].coords)

    def test_m1_half(self):
        gv = make_gv(2, 1, [1])
        assert classical_points(gv).points[1].coords[0].value() == 0.5

    @pytest.mark.parametrize("b,m", [(2, 4), (3, 3), (5, 2)])
    def test_bulk_path_matches_per_point_division(self, b, m):
        rng = random.Random(17)
        encs = [rng.randrange(1, b**m) for _ in range(4)]
        gv = make_gv(b, m, encs, alpha=2)
        arr = classical_digit_array(gv)
        for n in range(gv.n_points):
            pure = point_for_index(gv, n)
            for j in range(gv.d):
                assert tuple(arr[n, j]) == pure.coords[j].digits

    def test_streaming_matches_bulk(self):
        gv = make_gv(2, 3, [3, 6])
        arr = classical_digit_array(gv)
        for n, p in enumerate(iter_classical_points(gv)):
            for j in range(gv.d):
                assert tuple(arr[n, j]) == p.coords[j].digits

    @pytest.mark.parametrize("b,m", [(2, 5), (2, 10), (3, 5), (5, 3)])
    def test_one_dimensional_projections_uniform(self, b, m):
        # every coordinate hits the full grid {k/b^m} exactly once
        rng = random.Random(m * b)
        encs = [rng.randrange(1, b**m) for _ in range(3)]
        gv = make_gv(b, m, encs)
        arr = classical_digit_array(gv)
        place = b ** np.arange(m - 1, -1, -1, dtype=np.int64)
        for j in range(gv.d):
            vals = sorted(arr[:, j, :].astype(np.int64) @ place)
            assert vals == list(range(b**m))


class TestInterlacing:
    def test_hand_example(self):
        a = DigitVector(2, (1, 0))  # 0.5
        c = DigitVector(2, (0, 1))  # 0.25
        out = interlace_digits([a, c], 2)
        assert out.digits == (1, 0, 0, 1)
        assert out.value() == 0.5625

    def test_zero_inputs(self):
        z = DigitVector(2, (0, 0))
        assert interlace_digits([z, z], 2).value() == 0.0

    def test_alpha_one_identity(self):
        a = DigitVector(3, (2, 1, 0))
        assert interlace_digits([a], 1).digits == a.digits

    def test_mismatched_precision_rejected(self):
        with pytest.raises(ValueError):
            interlace_digits([DigitVector(2, (1,)), DigitVector(2, (1, 0))], 2)

    @pytest.mark.parametrize("b,m,alpha", [(2, 2, 2), (2, 1, 3), (3, 2, 2)])
    def test_injective_on_digit_tuples(self, b, m, alpha):
        seen = set()
        space = list(itertools.product(range(b), repeat=m))
        for combo in itertools.product(space, repeat=alpha):
            out = interlace_digits([DigitVector(b, d) for d in combo], alpha)
            assert out.digits not in seen
            seen.add(out.digits)

    def test_interlace_points_matches_scalar(self):
        gv = make_gv(2, 3, [1, 5], alpha=2)
        ps = classical_points(gv)
        inter = interlace_points(ps, 2)
        assert inter.precision == 6
        for n, p in enumerate(ps.points):
            want = interlace_digits([p.coords[0], p.coords[1]], 2)
            assert inter.points[n].coords[0].digits == want.digits

    def test_interlace_points_alpha1_identity(self):
        gv = make_gv(2, 3, [1, 5])
        ps = classical_points(gv)
        same = interlace_points(ps, 1)
        for a, b_ in zip(ps.points, same.points):
            assert a == b_

    def test_array_interlacing_matches_object_path(self):
        gv = make_gv(3, 2, [1, 4, 2, 7], alpha=2)
        arr = interlace_digit_array(classical_digit_array(gv), 2)
        inter = interlace_points(classical_points(gv), 2)
        for n in range(gv.n_points):
            for k in range(gv.s):
                assert tuple(arr[n, k]) == inter.points[n].coords[k].digits

    def test_dimension_not_divisible_rejected(self):
        gv = make_gv(2, 3, [1, 5])
        with pytest.raises(ValueError):
            interlace_points(classical_points(gv), 3)


class TestFloats:
    def test_unit_values(self):
        assert DigitVector(2, (1,)).value() == 0.5
        assert DigitVector(2, (0, 1)).value() == 0.25
        assert abs(DigitVector(3, (2,)).value() - 2 / 3) < 1e-15

    def test_grid_membership_after_interlacing(self):
        gv = make_gv(2, 3, [1, 5, 3, 7], alpha=2)
        vals = lattice_points(gv)
        grid = vals * 2 ** (gv.alpha * gv.m)
        assert np.allclose(grid, np.round(grid))
        assert np.all((vals >= 0) & (vals < 1))

    def test_digits_to_values_horner_agreement(self):
        rng = np.random.default_rng(5)
        digits = rng.integers(0, 3, size=(10, 4, 6)).astype(np.uint8)
        vals = digits_to_values(digits, 3)
        for i in range(10):
            for j in range(4):
                assert abs(vals[i, j] - DigitVector(3, tuple(digits[i, j])).value()) < 1e-15


class TestGeneratingVectorIO:
    def test_json_roundtrip(self, tmp_path):
        gv = make_gv(2, 4, [1, 9, 13, 6], alpha=2)
        path = tmp_path / "vec.json"
        gv.save(path, metadata={"note": 1})
        back = GeneratingVector.load(path)
        assert back == gv
        doc = json.loads(path.read_text())
        assert set(doc) == {"b", "m", "alpha", "s", "P", "q", "config"}
        assert doc["q"] == ["1", "1001", "1101", "110"]

    def test_validation_rejects_zero_component(self):
        with pytest.raises(ValueError):
            make_gv(2, 3, [1, 0])

    def test_validation_rejects_large_degree(self):
        with pytest.raises(ValueError):
            make_gv(2, 3, [1, 8])  # encoding 8 = x^3, degree == m

    def test_csv_and_digit_formats(self, tmp_path):
        gv = make_gv(2, 3, [1, 5], alpha=2)
        digits = interlace_digit_array(classical_digit_array(gv), gv.alpha)
        vals = digits_to_values(digits, gv.b)
        csv = tmp_path / "p.csv"
        dig = tmp_path / "p.dig"
        write_points_csv(csv, vals)
        write_points_digits(dig, digits, gv.b)
        lines = csv.read_text().splitlines()
        assert lines[0] == "y1"
        assert len(lines) == gv.n_points + 1
        assert float(lines[1].split(",")[0]) == 0.0
        dlines = dig.read_text().splitlines()
        # digit rows reproduce the exact values
        for n in (1, 5):
            got = dlines[n + 1].split(",")[0]
            assert got == "".join(str(t) for t in digits[n, 0])

    def test_digit_format_roundtrip(self, tmp_path):
        from polylat.pointgen import read_points_digits

        gv = make_gv(3, 2, [1, 4], alpha=2)
        digits = interlace_digit_array(classical_digit_array(gv), gv.alpha)
        path = tmp_path / "p.dig"
        write_points_digits(path, digits, gv.b)
        back = read_points_digits(path, gv.b)
        assert back.shape == digits.shape
        assert (back == digits).all()
