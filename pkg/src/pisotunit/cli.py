"""Field-description files, the real-quadratic fundamental-unit helper, and
report emission for the command line.

Field file schema (JSON object):
  defining_polynomial : array of integers, ascending degree
  fundamental_units   : array of arrays of rational strings ("p" or "p/q")
  torsion_generator   : array of rational strings
  torsion_order       : integer
  name                : optional free text
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass

from gmpy2 import mpq, mpz, isqrt

from .errors import (BadTorsion, CertificateMismatch, DependentUnits,
                     NoGenerator, NotAUnit, NotSquarefree, ParseError,
                     PrecisionExceeded, WrongRank)
from .fields import FieldElement, NumberField, Precision
from .algorithms import (UnitSystem, cut_edge, find_cpisot, find_min,
                         validate_units)
from .logspace import build_unit_matrix, regulator

_SLAB_EPS_DEFAULT = mpq(1, 1000)


# ---------------------------------------------------------------------------
# field descriptions


@dataclass
class FieldDescription:
    defining_polynomial: list
    fundamental_units: list          # lists of rational strings
    torsion_generator: list
    torsion_order: int
    name: str = ""

    def to_json(self):
        out = {
            "defining_polynomial": [int(c) for c in self.defining_polynomial],
            "fundamental_units": [[str(c) for c in u] for u in self.fundamental_units],
            "torsion_generator": [str(c) for c in self.torsion_generator],
            "torsion_order": int(self.torsion_order),
        }
        if self.name:
            out["name"] = self.name
        return out


def _parse_rational(s):
    try:
        return mpq(s)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"bad rational {s!r}: {exc}") from None


def parse_field(path, precision: Precision = None):
    """Read and validate a field description; returns (NumberField, UnitSystem).

    Squarefreeness of the defining polynomial is verified; irreducibility is
    the caller's obligation.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from None
    for key in ("defining_polynomial", "fundamental_units",
                "torsion_generator", "torsion_order"):
        if key not in raw:
            raise ParseError(f"{path}: missing key {key!r}")
    poly = raw["defining_polynomial"]
    if (not isinstance(poly, list) or not poly
            or not all(isinstance(c, int) for c in poly)):
        raise ParseError("defining_polynomial must be a nonempty integer array")
    try:
        field = NumberField(poly, precision=precision)
    except NotSquarefree:
        raise
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    n = field.n
    try:
        units = tuple(FieldElement.from_coeffs([_parse_rational(c) for c in u], n)
                      for u in raw["fundamental_units"])
        zeta = FieldElement.from_coeffs(
            [_parse_rational(c) for c in raw["torsion_generator"]], n)
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    order = raw["torsion_order"]
    if not isinstance(order, int):
        raise ParseError("torsion_order must be an integer")
    system = UnitSystem(units=units, zeta=zeta, zeta_order=order)
    validate_units(system, field)
    return field, system


# ---------------------------------------------------------------------------
# fundamental units of real quadratic fields


def _is_squarefree_int(d):
    d = mpz(d)
    p = 2
    while p * p * p <= d:
        if d % (p * p) == 0:
            return False
        while d % p == 0:
            d //= p
        p += 1 if p == 2 else 2
    # remaining cofactor has at most two prime factors; a square would be p^2
    r = isqrt(d)
    return r * r != d or d == 1


def _surd_cf_convergents(P, Q, D):
    """Convergents p_i/q_i of (P + sqrt(D)) / Q, exactly (D not a square)."""
    a0 = isqrt(D)
    p0, q0 = mpz(1), mpz(0)
    p1, q1 = None, None
    while True:
        a = (P + a0) // Q
        if p1 is None:
            p1, q1 = mpz(a), mpz(1)
        else:
            p0, p1 = p1, a * p1 + p0
            q0, q1 = q1, a * q1 + q0
        yield p1, q1
        P = a * Q - P
        Q = (D - P * P) // Q


def quadratic_fundamental_unit(d) -> FieldDescription:
    """Fundamental unit of Q(sqrt(d)) by the continued-fraction expansion,
    using the ring of integers' basis ((1+sqrt d)/2 when d = 1 mod 4)."""
    d = int(d)
    if d < 2 or not _is_squarefree_int(d):
        raise NotSquarefree(f"{d} is not a squarefree integer >= 2")
    if d % 4 == 1:
        # theta = (1 + sqrt d)/2, x^2 - x - (d-1)/4; unit x + y*theta with
        # x/y a convergent of (sqrt d - 1)/2, norm x^2 + xy - y^2 (d-1)/4
        poly = [-(d - 1) // 4, -1, 1]
        gen = _surd_cf_convergents(mpz(-1), mpz(2), mpz(d))

        def norm(x, y):
            return x * x + x * y - y * y * ((d - 1) // 4)
    else:
        poly = [-d, 0, 1]
        gen = _surd_cf_convergents(mpz(0), mpz(1), mpz(d))

        def norm(x, y):
            return x * x - d * y * y

    for _ in range(10 ** 6):
        x, y = next(gen)
        if abs(norm(x, y)) == 1:
            return FieldDescription(
                defining_polynomial=poly,
                fundamental_units=[[str(x), str(y)]],
                torsion_generator=["-1", "0"],
                torsion_order=2,
                name=f"Q(sqrt({d}))",
            )
    raise ParseError(f"continued fraction for d={d} did not close")  # unreachable


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    algorithm: str
    embedding_index: int
    embedding_root: dict
    exponents: list
    torsion_power: int
    min_poly: list               # decimal integer strings, ascending
    classification: str
    height: str                  # 30 significant digits
    approx_value: dict
    regulator: str
    precision_bits: int
    runtime_ms: int

    def to_json(self):
        return {
            "algorithm": self.algorithm,
            "embedding_index": self.embedding_index,
            "embedding_root": self.embedding_root,
            "exponents": self.exponents,
            "torsion_power": self.torsion_power,
            "min_poly": self.min_poly,
            "classification": self.classification,
            "height": self.height,
            "approx_value": self.approx_value,
            "regulator": self.regulator,
            "precision_bits": self.precision_bits,
            "runtime_ms": self.runtime_ms,
        }

    def to_text(self):
        lines = [
            f"algorithm      : {self.algorithm}",
            f"embedding      : #{self.embedding_index} at "
            f"{self.embedding_root['real']} + {self.embedding_root['imag']}*i",
            f"exponents      : {self.exponents}",
            f"torsion power  : {self.torsion_power}",
            f"min poly       : {self.min_poly} (ascending)",
            f"classification : {self.classification}",
            f"height         : {self.height}",
            f"approx value   : {self.approx_value['real']} + {self.approx_value['imag']}*i",
            f"regulator      : {self.regulator}",
            f"precision bits : {self.precision_bits}",
            f"runtime ms     : {self.runtime_ms}",
        ]
        return "\n".join(lines)


def _digits30(iv):
    return f"{iv.mid():.30g}"


def _enclosure_dict(e):
    return {"real": f"{e.real_part.mid():.30g}",
            "imag": f"{e.imag_part.mid():.30g}"}


def _resolve_embedding(spec, field):
    if spec == "largest-real":
        if field.r1 == 0:
            raise ParseError("no real embedding in this field")
        return field.r1
    if spec == "first-complex":
        if field.r2 == 0:
            raise ParseError("no complex embedding in this field")
        return field.r1 + 1
    try:
        k = int(spec)
    except ValueError:
        raise ParseError(f"bad embedding spec {spec!r}") from None
    if not 1 <= k <= field.embedding_count:
        raise ParseError(f"embedding index {k} out of 1..{field.embedding_count}")
    return k


def run(field_path, algorithm, embedding="largest-real", precision=128,
        precision_ceiling=8192, epsilon=None, emit="text") -> Report:
    """Dispatch one algorithm over a field file and assemble the report."""
    prec = Precision(bits=int(precision), ceiling=int(precision_ceiling))
    field, units = parse_field(field_path, precision=prec)
    k = _resolve_embedding(embedding, field)
    t0 = time.monotonic()
    if algorithm == "findmin":
        result = find_min(units, k, field)
    elif algorithm == "cutedge":
        result = cut_edge(units, k, field)
    elif algorithm == "findcpisot":
        eps = _SLAB_EPS_DEFAULT if epsilon is None else mpq(epsilon)
        result = find_cpisot(units, k, field, slab_eps=eps)
    else:
        raise ParseError(f"unknown algorithm {algorithm!r}")
    ms = int((time.monotonic() - t0) * 1000)

    if not result.min_poly.is_integer():
        raise CertificateMismatch("result minimal polynomial is not integral")
    reg = regulator(build_unit_matrix(units, field))
    root_encl = field.iso.stored_enclosure(k - 1, 64)
    return Report(
        algorithm=algorithm,
        embedding_index=k,
        embedding_root=_enclosure_dict(root_encl),
        exponents=list(result.exponents),
        torsion_power=result.torsion_power,
        min_poly=[str(int(c)) for c in result.min_poly.coeffs],
        classification=result.classification.value,
        height=_digits30(result.height),
        approx_value=_enclosure_dict(result.approx_value),
        regulator=_digits30(reg),
        precision_bits=prec.bits,
        runtime_ms=ms,
    )


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    p = argparse.ArgumentParser(
        prog="pisotunit",
        description="Smallest Pisot / Salem / complex Pisot unit generator "
                    "of a number field, from a defining polynomial and a "
                    "fundamental system of units.")
    p.add_argument("--field", help="path to a field description JSON file")
    p.add_argument("--algorithm", choices=["findmin", "cutedge", "findcpisot"],
                   default="cutedge")
    p.add_argument("--embedding", default="largest-real",
                   help="1-based index | largest-real | first-complex")
    p.add_argument("--precision", type=int, default=128,
                   help="initial working precision in bits")
    p.add_argument("--precision-ceiling", type=int, default=8192,
                   help="escalation ceiling in bits")
    p.add_argument("--epsilon", default=None,
                   help="relative gap for the findcpisot slabs (rational)")
    p.add_argument("--emit", choices=["text", "json"], default="text")
    p.add_argument("--quadratic", type=int, metavar="D",
                   help="emit a field description for Q(sqrt(D)) and exit")
    return p


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.quadratic is not None:
            desc = quadratic_fundamental_unit(args.quadratic)
            print(json.dumps(desc.to_json()))
            return 0
        if not args.field:
            print("error: --field is required (or use --quadratic)", file=sys.stderr)
            return 2
        report = run(args.field, args.algorithm, embedding=args.embedding,
                     precision=args.precision,
                     precision_ceiling=args.precision_ceiling,
                     epsilon=args.epsilon, emit=args.emit)
    except (ParseError, NotSquarefree, NotAUnit, DependentUnits, BadTorsion,
            WrongRank) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoGenerator as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except PrecisionExceeded as exc:
        print(f"error: precision ceiling exceeded: {exc}", file=sys.stderr)
        return 4
    except CertificateMismatch as exc:
        print(f"error: internal certificate mismatch: {exc}", file=sys.stderr)
        return 5
    if args.emit == "json":
        print(json.dumps(report.to_json()))
    else:
        print(report.to_text())
    return 0


if __name__ == "__main__":
    sys.exit(main())
