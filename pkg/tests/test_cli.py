"""File parsing, the quadratic fundamental-unit helper, report emission,
round-trips and exit codes."""

import json

import pytest
from gmpy2 import mpq, mpz, isqrt

from pisotunit import NumberField, ParseError, field_norm, validate_units
from pisotunit.cli import (main, parse_field, quadratic_fundamental_unit,
                           run)
from pisotunit.errors import NotSquarefree
from pisotunit.fields import FieldElement
from pisotunit.algorithms import UnitSystem

from conftest import FIXTURES


def test_parse_field_sqrt2():
    field, units = parse_field(FIXTURES / "sqrt2.json")
    assert field.n == 2 and field.r1 == 2
    assert units.units[0] == field.element([1, 1])
    assert units.zeta_order == 2


def test_parse_field_salem():
    field, units = parse_field(FIXTURES / "salem101.json")
    assert (field.r1, field.r2) == (2, 1)
    assert len(units.units) == 2
    for u in units.units:
        assert field_norm(u, field) in (1, -1)


def test_parse_rejects_malformed(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "defining_polynomial": [-2, 0, 1],
        "fundamental_units": [["1/0", "1"]],
        "torsion_generator": ["-1", "0"],
        "torsion_order": 2,
    }))
    with pytest.raises(ParseError):
        parse_field(bad)
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"defining_polynomial": [-2, 0, 1]}))
    with pytest.raises(ParseError):
        parse_field(missing)
    nonsf = tmp_path / "nonsf.json"
    nonsf.write_text(json.dumps({
        "defining_polynomial": [1, 2, 1],
        "fundamental_units": [],
        "torsion_generator": ["-1", "0"],
        "torsion_order": 2,
    }))
    with pytest.raises(NotSquarefree):
        parse_field(nonsf)


# -- quadratic helper ------------------------------------------------------------


def test_quadratic_fundamental_unit_examples():
    d2 = quadratic_fundamental_unit(2)
    assert d2.defining_polynomial == [-2, 0, 1]
    assert d2.fundamental_units == [["1", "1"]]
    d5 = quadratic_fundamental_unit(5)
    assert d5.defining_polynomial == [-1, -1, 1]
    assert d5.fundamental_units == [["0", "1"]]  # the golden ratio itself
    d94 = quadratic_fundamental_unit(94)
    assert d94.fundamental_units == [["2143295", "221064"]]
    # norms: -1 for d=5, +1 for d=94, exactly
    x, y = mpz(2143295), mpz(221064)
    assert x * x - 94 * y * y == 1
    assert mpz(0) ** 2 + 0 * 1 - 1 * (5 - 1) // 4 == -1


def test_quadratic_rejects_nonsquarefree():
    for d in (4, 8, 9, 12, 18, 1, 0, -5):
        with pytest.raises(NotSquarefree):
            quadratic_fundamental_unit(d)


def _pell_smallest_unit(d):
    """Independent oracle: scan y for the least unit > 1 of O_{Q(sqrt d)}.

    Solves x^2 - d y^2 = +-4 over the half-integer basis when d = 1 mod 4,
    x^2 - d y^2 = +-1 otherwise; returns float value of the smallest unit.
    """
    import math
    if d % 4 == 1:
        y = 1
        while y < 10 ** 7:
            for target in (-4, 4):
                x2 = d * y * y + target
                if x2 > 0:
                    x = isqrt(x2)
                    if x * x == x2 and (x - y) % 2 == 0:
                        return (int(x) + y * math.sqrt(d)) / 2
            y += 1
    else:
        y = 1
        while y < 10 ** 7:
            for target in (-1, 1):
                x2 = d * y * y + target
                if x2 > 0:
                    x = isqrt(x2)
                    if x * x == x2:
                        return int(x) + y * math.sqrt(d)
            y += 1
    raise AssertionError("oracle exhausted")


def _value_of(desc):
    import math
    d_poly = desc.defining_polynomial
    x = mpq(desc.fundamental_units[0][0])
    y = mpq(desc.fundamental_units[0][1])
    if d_poly[1] == 0:
        d = -d_poly[0]
        return float(x) + float(y) * math.sqrt(d)
    d = 4 * (-d_poly[0]) + 1
    return float(x) + float(y) * (1 + math.sqrt(d)) / 2


SQUAREFREE_SMALL = [d for d in range(2, 101)
                    if all(d % (p * p) for p in range(2, 11))]


def test_quadratic_matches_exhaustive_search():
    for d in SQUAREFREE_SMALL:
        desc = quadratic_fundamental_unit(d)
        got = _value_of(desc)
        want = _pell_smallest_unit(d)
        assert abs(got - want) <= 1e-9 * want, (d, got, want)


def test_quadratic_output_validates():
    for d in (2, 3, 5, 13, 94):
        desc = quadratic_fundamental_unit(d)
        field = NumberField(desc.defining_polynomial)
        units = UnitSystem(
            units=tuple(FieldElement.from_coeffs([mpq(c) for c in u], field.n)
                        for u in desc.fundamental_units),
            zeta=FieldElement.from_coeffs([mpq(c) for c in desc.torsion_generator], field.n),
            zeta_order=desc.torsion_order)
        validate_units(units, field)


# -- run / emission -----------------------------------------------------------------


def test_run_cutedge_sqrt2():
    rep = run(FIXTURES / "sqrt2.json", "cutedge", embedding="largest-real")
    assert rep.exponents == [1]
    assert rep.classification == "Pisot"
    assert rep.min_poly == ["-1", "-2", "1"]
    assert rep.height.startswith("0.4406867935097715126163046624")
    assert rep.regulator.startswith("0.881373587019543")


def test_run_findmin_salem_json_roundtrip(tmp_path):
    rep = run(FIXTURES / "salem101.json", "findmin", embedding="largest-real",
              emit="json")
    assert rep.min_poly == ["1", "-101", "5", "-101", "1"]
    blob = json.dumps(rep.to_json())
    parsed = json.loads(blob)
    assert parsed["classification"] == "Salem"
    # re-run reproduces identical exponents and minimal polynomial
    rep2 = run(FIXTURES / "salem101.json", "findmin", embedding="largest-real")
    assert rep2.exponents == parsed["exponents"]
    assert rep2.min_poly == parsed["min_poly"]
    # the emitted minimal polynomial re-certifies
    from pisotunit.polys import RationalPoly, count_unit_circle_roots, is_reciprocal
    m = RationalPoly([int(c) for c in parsed["min_poly"]])
    assert is_reciprocal(m) and count_unit_circle_roots(m) == m.degree - 2


def test_run_findcpisot_cubic():
    rep = run(FIXTURES / "cubic.json", "findcpisot", embedding="first-complex")
    assert rep.min_poly == ["-1", "0", "1", "1"]
    assert rep.classification == "ComplexPisot"
    assert rep.exponents == [-1]


def test_main_exit_codes(tmp_path, capsys):
    assert main(["--field", str(FIXTURES / "sqrt2.json"),
                 "--algorithm", "cutedge"]) == 0
    capsys.readouterr()
    assert main(["--field", str(FIXTURES / "qi.json"),
                 "--algorithm", "findcpisot", "--embedding", "first-complex"]) == 3
    err = capsys.readouterr().err
    assert "rank 0" in err
    assert main(["--field", str(FIXTURES / "cm2m5.json"),
                 "--algorithm", "findcpisot", "--embedding", "first-complex"]) == 3
    capsys.readouterr()
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["--field", str(bad)]) == 2
    capsys.readouterr()
    assert main(["--field", str(tmp_path / "absent.json")]) == 2
    capsys.readouterr()


def test_main_quadratic_mode(capsys):
    assert main(["--quadratic", "94"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["fundamental_units"] == [["2143295", "221064"]]
    assert main(["--quadratic", "8"]) == 2


def test_main_emit_json(capsys):
    assert main(["--field", str(FIXTURES / "golden.json"), "--algorithm",
                 "findmin", "--emit", "json"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["algorithm"] == "findmin"
    assert rec["exponents"] == [1]
    assert rec["min_poly"] == ["-1", "-1", "1"]
    assert set(rec) >= {"algorithm", "embedding_index", "exponents",
                        "torsion_power", "min_poly", "classification",
                        "height", "approx_value", "regulator",
                        "precision_bits", "runtime_ms"}
