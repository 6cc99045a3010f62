"""Top-level search algorithms over the unit lattice: the minimal U-number
generator, the minimal Pisot generator (edge exclusion), the minimal complex
Pisot generator with its impossibility paths, plus unit-system validation, the
constructive objective cap, and torsion normalisation.
"""

from __future__ import annotations

from dataclasses import dataclass

from gmpy2 import mpq

from .errors import (BadTorsion, CertificateMismatch, Infeasible,
                     InternalError, NoGenerator, RankZero, WrongRank)
from .fields import (FieldElement, NumberField, certify_real_at, embed,
                     field_norm, minimal_polynomial, modulus_sign_at,
                     mul_mod, pow_element, value_sign_at)
from .intervals import Interval, interval_matrix_inverse, iv_dot, iv_sum
from .intprog import IPProblem, intprog
from .logspace import (NumberClass, RegionTag, UnitMatrix, build_unit_matrix,
                       classify_number, delta, log_embedding, region_classify,
                       weil_height)
from .polys import count_real_roots

_SLAB_EPS_DEFAULT = mpq(1, 1000)


# ---------------------------------------------------------------------------
# unit systems


@dataclass(frozen=True)
class UnitSystem:
    """A fundamental system of units plus a generator of the torsion group."""

    units: tuple
    zeta: FieldElement
    zeta_order: int

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))

    @property
    def rank(self):
        return len(self.units)


def validate_units(units: UnitSystem, field: NumberField) -> UnitSystem:
    """Check rank, norms, torsion order and multiplicative independence."""
    r = field.unit_rank
    if units.rank != r:
        raise WrongRank(f"{units.rank} units supplied, unit rank is {r}")
    m = units.zeta_order
    if m < 2 or m % 2 != 0:
        raise BadTorsion(f"torsion order {m} is not an even integer >= 2")
    if field_norm(units.zeta, field) not in (1, -1):
        raise BadTorsion("torsion generator is not a unit")
    if pow_element(units.zeta, m, field) != field.one():
        raise BadTorsion(f"zeta^{m} != 1")
    for d in range(1, m):
        if m % d == 0 and pow_element(units.zeta, d, field) == field.one():
            raise BadTorsion(f"zeta^{d} = 1 for proper divisor {d} of {m}")
    build_unit_matrix(units, field)  # raises NotAUnit / DependentUnits
    return units


def unit_from_exponents(units: UnitSystem, e, t: int, field: NumberField) -> FieldElement:
    """zeta^t * prod u_i^{e_i}, exactly."""
    acc = pow_element(units.zeta, t % units.zeta_order, field)
    for u, ei in zip(units.units, e):
        if ei:
            acc = mul_mod(acc, pow_element(u, int(ei), field), field)
    return acc


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class GeneratorResult:
    exponents: tuple
    torsion_power: int
    element: FieldElement
    min_poly: object
    classification: NumberClass
    height: Interval
    approx_value: object
    embedding_index: int
    raw_objective: Interval    # the k-th log component (n * height)
    region: RegionTag


def _make_result(e, t, element, k, field, units, A) -> GeneratorResult:
    region = region_classify(element, k, field)
    cls = classify_number(element, k, field)
    lv = log_embedding(element, field)
    for i, entry in enumerate(lv.entries):
        ae = iv_dot(A.row(i), e, A.prec)
        if not entry.overlaps(ae):
            raise InternalError("log vector does not match A*e")
    return GeneratorResult(
        exponents=tuple(int(x) for x in e),
        torsion_power=int(t),
        element=element,
        min_poly=minimal_polynomial(element, field),
        classification=cls,
        height=weil_height(element, field),
        approx_value=embed(element, k, field),
        embedding_index=k,
        raw_objective=lv.entries[k - 1],
        region=region,
    )


# ---------------------------------------------------------------------------
# the constructive objective cap


def height_bound(A: UnitMatrix, k: int):
    """(U, witness): U bounds the minimal raw objective over sector k from
    above; witness is an integer vector certified strictly inside the cone
    (every non-k row value negative)."""
    r = A.r
    if r == 0:
        raise RankZero("height bound needs unit rank >= 1")
    field = A.field
    prec = max(A.prec, 128)
    cur = A.refresh(prec)
    norms = [cur.row_norm(i, prec) for i in range(r + 1)]
    sqrt_r = Interval.from_rational(r, prec).sqrt(prec)
    U_iv = iv_sum(norms, prec).mul(sqrt_r, prec).scale(mpq(1, 2), prec)
    U = mpq(U_iv.hi)

    other = [i for i in range(r + 1) if i != k - 1]
    eps0 = mpq(1, 2 ** 20)
    for _ in range(64):
        factor = sqrt_r.scale(mpq(1, 2), prec).add(Interval.from_rational(eps0, prec), prec)
        rows = [cur.row(i) for i in other]
        inv = interval_matrix_inverse(rows, prec)
        if inv is None:
            prec *= 2
            cur = cur.refresh(prec)
            norms = [cur.row_norm(i, prec) for i in range(r + 1)]
            continue
        rhs = [norms[i].mul(factor, prec).neg() for i in other]
        witness = []
        for i in range(r):
            wi = iv_sum([inv[i][j].mul(rhs[j], prec) for j in range(r)], prec)
            witness.append(int((2 * mpq(wi.mid()) + 1) // 2))
        witness = tuple(witness)
        if any(witness) and _witness_certified(cur, other, witness, units_of(A), field):
            return U, witness
        eps0 *= 2
    raise InternalError("height-bound witness certification failed")


def units_of(A: UnitMatrix):
    return A.units


def _witness_certified(A, other_rows, witness, units, field):
    """Certify row_i . witness < 0 for every non-k row."""
    cur = A
    for prec in field.precision.ladder():
        cur = cur.refresh(prec)
        undecided = []
        for i in other_rows:
            val = iv_dot(cur.row(i), witness, prec)
            if val.hi < 0:
                continue
            if val.lo >= 0:
                return False
            undecided.append(i)
        if not undecided:
            return True
        other_rows = undecided
    v = None
    for i in other_rows:
        if v is None:
            v = _power_product(units, witness, field)
        if modulus_sign_at(v, i + 1, field) >= 0:
            return False
    return True


def _power_product(units, e, field):
    acc = field.one()
    for u, ei in zip(units, e):
        if ei:
            acc = mul_mod(acc, pow_element(u, int(ei), field), field)
    return acc


# ---------------------------------------------------------------------------
# lattice IP assembly


def _lattice_problem(A: UnitMatrix, units: UnitSystem, field: NumberField, k: int,
                     row_specs, b, c_spec, eps, cap, warm):
    """IPProblem whose rows are signed combinations of the log-matrix rows.

    row_specs: list of {embedding_row (0-based): +-1} combinations; c_spec the
    same for the objective.  Exact callbacks settle boundary ties through the
    unit-circle machinery on minimal polynomials.
    """
    refreshed = {}

    def matrix_of(prec):
        got = refreshed.get(prec)
        if got is None:
            got = A.refresh(prec)
            refreshed[prec] = got
        return got

    def combo_row(cur, spec, prec):
        out = []
        for j in range(A.r):
            terms = [cur.entries[i][j].scale(s, prec) for i, s in spec.items()]
            out.append(iv_sum(terms, prec))
        return out

    def matrix_at(prec):
        cur = matrix_of(prec)
        rows = [combo_row(cur, spec, prec) for spec in row_specs]
        c = combo_row(cur, c_spec, prec)
        return rows, c

    unit_sign_cache = {}

    def _unit_log_sign(j, row_idx):
        key = (j, row_idx)
        s = unit_sign_cache.get(key)
        if s is None:
            s = modulus_sign_at(units.units[j], row_idx + 1, field)
            unit_sign_cache[key] = s
        return s

    def exact_row_sign(i, x):
        if b[i] != 0:
            return None  # never an exact tie against a nonzero dyadic bound
        spec = row_specs[i]
        if len(spec) != 1:
            return None
        (row_idx, sgn), = spec.items()
        nz = [(j, xj) for j, xj in enumerate(x) if xj]
        if not nz:
            return 0
        if len(nz) == 1:
            # single power of one unit: its log-entry sign scales by the exponent
            j, xj = nz[0]
            return sgn * _unit_log_sign(j, row_idx) * (1 if xj > 0 else -1)
        v = _power_product(units.units, x, field)
        return sgn * modulus_sign_at(v, row_idx + 1, field)

    (obj_idx, obj_sgn), = c_spec.items()

    def exact_obj_cmp(x1, x2):
        d = tuple(a - b2 for a, b2 in zip(x1, x2))
        if not any(d):
            return 0
        v = _power_product(units.units, d, field)
        return obj_sgn * modulus_sign_at(v, obj_idx + 1, field)

    def exact_obj_threshold(x, x0):
        # sign of c.x - (1+eps) c.x0 via q c.x - (q+p) c.x0 = c.(qx - (q+p)x0)
        p_num, q_den = eps.numerator, eps.denominator
        combo = tuple(q_den * a - (q_den + p_num) * b2 for a, b2 in zip(x, x0))
        if not any(combo):
            return 0
        v = _power_product(units.units, combo, field)
        return obj_sgn * modulus_sign_at(v, obj_idx + 1, field)

    return IPProblem(nvars=A.r, b=tuple(b), eps=eps, warm_start=warm,
                     objective_cap=cap, matrix_at=matrix_at,
                     exact_row_sign=exact_row_sign, exact_obj_cmp=exact_obj_cmp,
                     exact_obj_threshold=exact_obj_threshold,
                     precision=field.precision)


def _findmin_ip(A, units, field, k, eps=mpq(0), b_k=None, cap=None, warm=None):
    """The sign-flipped-row-k problem: rows i != k unchanged (<= 0), row k
    negated with bound -delta(n) (or the supplied slab bound)."""
    r = A.r
    b_k = -delta(field.n) if b_k is None else b_k
    row_specs = []
    b = []
    for i in range(r + 1):
        if i == k - 1:
            row_specs.append({i: -1})
            b.append(b_k)
        else:
            row_specs.append({i: 1})
            b.append(mpq(0))
    return _lattice_problem(A, units, field, k, row_specs, b, {k - 1: 1},
                            eps, cap, warm)


def _pick_optimum(result, units, field, k):
    """First optimum after the tie-break: interior over edge, then the
    lexicographically smallest exponent vector.  With eps = 0 the solver
    returns exactly the set of optima, so every solution is a candidate."""
    interior = []
    for e in result.solutions:
        elem = _power_product(units.units, e, field)
        if region_classify(elem, k, field).is_interior():
            interior.append(e)
    pool = interior or list(result.solutions)
    return min(pool)


# ---------------------------------------------------------------------------
# the three searches


def find_min(units: UnitSystem, k: int, field: NumberField) -> GeneratorResult:
    """Smallest-height unit whose log vector lies in the closed sector at k
    (paper-wise: the minimal U-number generator when k is a real embedding)."""
    units = validate_units(units, field)
    if field.unit_rank == 0:
        raise RankZero("find_min needs unit rank >= 1")
    if not 1 <= k <= field.unit_rank + 1:
        raise ValueError(f"embedding index {k} out of range")
    A = build_unit_matrix(units, field)
    U, witness = height_bound(A, k)
    problem = _findmin_ip(A, units, field, k, cap=U, warm=witness)
    result = intprog(problem)
    e = _pick_optimum(result, units, field, k)
    raw = _power_product(units.units, e, field)
    element, t = normalize_torsion(raw, k, units, field)
    return _make_result(e, t, element, k, field, units, A)


def _cutedge_ip(A, units, field, k, excluded, cap):
    """Rows i != k unchanged; for every excluded edge partner j a row
    -(A^k + A^j) with bound -delta(n)."""
    r = A.r
    d = delta(field.n)
    row_specs = []
    b = []
    for i in range(r + 1):
        if i == k - 1:
            continue
        row_specs.append({i: 1})
        b.append(mpq(0))
    for j in sorted(excluded):
        row_specs.append({k - 1: -1, j - 1: -1})
        b.append(-d)
    return _lattice_problem(A, units, field, k, row_specs, b, {k - 1: 1},
                            mpq(0), cap, None)


def cut_edge(units: UnitSystem, k: int, field: NumberField) -> GeneratorResult:
    """Smallest-height unit with log vector in the open sector at k: runs the
    sector search and, while the optimum sits on an edge, excludes that edge
    (every unit near it is a power of the edge optimum times torsion) and
    reruns.  At a real embedding the result is the minimal Pisot generator."""
    units = validate_units(units, field)
    if field.unit_rank == 0:
        raise RankZero("cut_edge needs unit rank >= 1")
    A = build_unit_matrix(units, field)
    U, witness = height_bound(A, k)
    problem = _findmin_ip(A, units, field, k, cap=U, warm=witness)
    result = intprog(problem)
    e = _pick_optimum(result, units, field, k)
    raw = _power_product(units.units, e, field)
    if region_classify(raw, k, field).is_interior():
        element, t = normalize_torsion(raw, k, units, field)
        return _make_result(e, t, element, k, field, units, A)

    excluded = set()
    for _ in range(field.unit_rank + 1):
        tag = region_classify(raw, k, field)
        if tag.is_interior():
            element, t = normalize_torsion(raw, k, units, field)
            return _make_result(e, t, element, k, field, units, A)
        if not tag.is_edge():
            raise CertificateMismatch(
                f"sector optimum neither interior nor on an edge: {tag}")
        excluded.add(tag.j)
        result = intprog(_cutedge_ip(A, units, field, k, excluded, U))
        e = _pick_optimum(result, units, field, k)
        raw = _power_product(units.units, e, field)
    raise InternalError("edge exclusion did not terminate")


def _dyadic_floor(q, bits=96):
    """Largest multiple of 2^-bits that is <= q."""
    q = mpq(q)
    scaled = (q.numerator << bits) // q.denominator
    return mpq(scaled, 1 << bits)


def find_cpisot(units: UnitSystem, k: int, field: NumberField,
                slab_eps=_SLAB_EPS_DEFAULT) -> GeneratorResult:
    """Minimal complex Pisot unit generator at the complex embedding k, or
    NoGenerator when none exists (rank zero, or trivial torsion with every
    fundamental unit real at k)."""
    units = validate_units(units, field)
    if k <= field.r1 or k > field.embedding_count:
        raise ValueError(f"embedding index {k} is not a complex embedding")
    if field.unit_rank == 0:
        # covers the torsion-only fields: no non-torsion unit exists at all
        raise NoGenerator("RankZero", "no complex Pisot generator: unit rank 0")
    slab_eps = mpq(slab_eps)

    zeta_is_pm1 = units.zeta_order == 2
    if not zeta_is_pm1:
        res = cut_edge(units, k, field)
        if not certify_real_at(res.element, k, field):
            return res
        A = build_unit_matrix(units, field)
        element = mul_mod(units.zeta, res.element, field)
        t = (res.torsion_power + 1) % units.zeta_order
        out = _make_result(res.exponents, t, element, k, field, units, A)
        if out.classification is not NumberClass.COMPLEX_PISOT:
            raise CertificateMismatch("torsion twist did not yield a complex Pisot unit")
        return out

    if all(certify_real_at(u, k, field) for u in units.units):
        raise NoGenerator("AllUnitsReal",
                          "no complex Pisot generator: every unit is real "
                          "at the chosen embedding")

    A = build_unit_matrix(units, field)
    U, witness = height_bound(A, k)
    cap = U
    b_k = -delta(field.n)
    warm = witness
    seen = set()
    for _ in range(10_000):
        try:
            result = intprog(_findmin_ip(A, units, field, k, eps=slab_eps,
                                         b_k=b_k, cap=cap, warm=warm))
        except Infeasible:
            cap = cap * 2  # slab floor above the cap box: widen and retry
            warm = None
            continue
        for e in result.solutions:
            if e in seen:
                continue
            seen.add(e)
            beta = _power_product(units.units, e, field)
            if (region_classify(beta, k, field).is_interior()
                    and not certify_real_at(beta, k, field)):
                element, t = normalize_torsion(beta, k, units, field)
                out = _make_result(e, t, element, k, field, units, A)
                if out.classification is not NumberClass.COMPLEX_PISOT:
                    raise CertificateMismatch("accepted candidate failed certification")
                return out
        # advance the slab: everything with objective <= (1+eps) * optimum has
        # been scanned; move the floor just below that threshold (dyadic,
        # rounded down so nothing in between is lost)
        z = result.objective_values[0]
        z_lo = mpq(z.lo)
        if z_lo <= 0:
            raise InternalError("slab optimum not certified positive")
        floor_next = _dyadic_floor((1 + slab_eps) * z_lo)
        if floor_next <= -b_k:
            # rounding must still make strict progress
            floor_next = _dyadic_floor((1 + slab_eps / 2) * (-b_k))
            if floor_next <= -b_k:
                raise InternalError("slab floor not advancing")
        b_k = -floor_next
        cap = max(cap, floor_next * 2)
        warm = None
    raise InternalError("slab search did not terminate")


def normalize_torsion(a: FieldElement, k: int, units: UnitSystem,
                      field: NumberField):
    """(zeta^t * a, t): at a real embedding make the value positive; at a
    complex one prefer a non-real representative when some torsion multiple
    achieves it.  The log vector is unchanged."""
    if k <= field.r1:
        if value_sign_at(a, k, field) > 0:
            return a, 0
        return FieldElement([-c for c in a.coeffs]), units.zeta_order // 2
    if not certify_real_at(a, k, field):
        return a, 0
    cand = a
    for t in range(1, units.zeta_order):
        cand = mul_mod(units.zeta, cand, field)
        if not certify_real_at(cand, k, field):
            return cand, t
    return a, 0


def generator_existence(units: UnitSystem, field: NumberField):
    """(exists, reason): whether the field has any unit generator at all.
    False exactly when torsion is just +-1, every fundamental unit is totally
    real, and the field is complex."""
    units = validate_units(units, field)
    if field.r2 == 0:
        return True, "real field"
    if units.zeta_order != 2:
        return True, "non-real torsion unit"
    for u in units.units:
        m = minimal_polynomial(u, field)
        if count_real_roots(m) != m.degree:
            return True, "a fundamental unit is not totally real"
    return False, "CM obstruction: all units lie in the real subfield"
