"""Shared fixtures and independent numeric oracles.

The oracles deliberately avoid the library's certified machinery: they work
from mpmath floating point at high precision (brute-force exponent search,
direct root finding), so tests compare two independent routes.
"""

import itertools
import pathlib

import mpmath
import pytest
from gmpy2 import mpq, mpz

from pisotunit import NumberField
from pisotunit.fields import FieldElement

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

SALEM_X = mpz(25028143793119802586914638653361124)
SALEM_Y = mpz(500860504311000367991236832383617)

PAPER_A3 = -60048257490013814123246164511189751124091132508231119928295605154893060
PAPER_A2 = 2556025223049864739934292009524109324899782644859727711036043393301222
PAPER_A1 = 97520402335817024268676911493103325


def load_system(name, precision=None):
    from pisotunit.cli import parse_field
    return parse_field(FIXTURES / name, precision=precision)


@pytest.fixture(scope="session")
def sqrt2():
    return load_system("sqrt2.json")


@pytest.fixture(scope="session")
def golden():
    return load_system("golden.json")


@pytest.fixture(scope="session")
def cubic():
    return load_system("cubic.json")


@pytest.fixture(scope="session")
def qi():
    return load_system("qi.json")


@pytest.fixture(scope="session")
def cm_field():
    return load_system("cm2m5.json")


@pytest.fixture(scope="session")
def salem():
    return load_system("salem101.json")


# ---------------------------------------------------------------------------
# numeric oracle


def mp_poly_roots(coeffs_ascending, dps=60):
    """All roots via mpmath, reals first ascending then upper-half by (re, im)."""
    with mpmath.workdps(dps):
        desc = [mpmath.mpf(int(c)) if mpq(c).denominator == 1
                else mpmath.mpf(mpq(c).numerator) / mpmath.mpf(mpq(c).denominator)
                for c in reversed([mpq(c) for c in coeffs_ascending])]
        rts = mpmath.polyroots(desc, maxsteps=200, extraprec=120)
        reals = sorted([r.real for r in rts if abs(r.imag) < mpmath.mpf(10) ** -40])
        upper = sorted([r for r in rts if r.imag > mpmath.mpf(10) ** -40],
                       key=lambda z: (z.real, z.imag))
        return reals, upper


class NumericEmbeddings:
    """Float values of the stored embeddings of field elements (oracle side)."""

    def __init__(self, field: NumberField, dps=60):
        self.dps = dps
        self.n = field.n
        with mpmath.workdps(dps):
            reals, upper = mp_poly_roots([int(c) for c in field.defining_poly.coeffs], dps)
            self.roots = list(reals) + list(upper)
        self.r1 = len(reals)

    def value(self, element: FieldElement, k):
        """phi_k(element) as an mpmath number (k is 1-based)."""
        with mpmath.workdps(self.dps):
            z = self.roots[k - 1]
            acc = mpmath.mpf(0)
            for c in reversed(element.coeffs):
                acc = acc * z + mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
            return acc

    def log_vector(self, unit_vals_at_roots, exponents):
        """Log vector of prod u_i^{e_i} from per-unit per-root moduli."""
        with mpmath.workdps(self.dps):
            out = []
            for i in range(len(self.roots)):
                s = mpmath.mpf(0)
                for uv, e in zip(unit_vals_at_roots, exponents):
                    if e:
                        s += e * mpmath.log(abs(uv[i]))
                if i >= self.r1:
                    s *= 2
                out.append(s)
            return out


def brute_force_minimum(field, units, k, radius, *, require, dps=60, tol=None):
    """Exhaustive search over ||e||_inf <= radius (and +- torsion sign) for the
    minimal-raw-objective unit of the requested kind at embedding k.

    require: 'sector' (closed sector, nonzero), 'interior', or 'complex_interior'
    (interior and non-real value).  Returns (exponents, raw_objective_float).
    mpmath only; completely independent of the certified code paths.
    """
    with mpmath.workdps(dps):
        tol = tol or mpmath.mpf(10) ** (-dps // 3)
        emb = NumericEmbeddings(field, dps)
        unit_vals = [[emb.value(u, i + 1) for i in range(len(emb.roots))]
                     for u in units.units]
        best = None
        r = len(units.units)
        for e in itertools.product(range(-radius, radius + 1), repeat=r):
            if not any(e):
                continue
            logs = emb.log_vector(unit_vals, e)
            vk = logs[k - 1]
            if vk <= tol:
                continue
            others = [logs[i] for i in range(len(logs)) if i != k - 1]
            if any(v > tol for v in others):
                continue
            if require in ("interior", "complex_interior") and any(abs(v) <= tol for v in others):
                continue
            if require == "complex_interior":
                val = mpmath.mpf(1)
                valc = mpmath.mpc(1)
                for uv, ei in zip(unit_vals, e):
                    if ei:
                        valc *= mpmath.mpc(uv[k - 1]) ** ei
                if abs(valc.imag) <= tol * max(1, abs(valc)):
                    continue
            if best is None or vk < best[1] - tol \
                    or (abs(vk - best[1]) <= tol and e < best[0]):
                best = (e, vk)
        return best
