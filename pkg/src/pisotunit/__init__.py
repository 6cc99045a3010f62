"""Smallest Pisot, Salem, or complex Pisot unit generators of a number field,
computed by exact-arithmetic integer programming over the logarithmic unit
lattice.  Everything user-facing is certified: interval arithmetic with
precision escalation backed by exact algebraic decision procedures.
"""

from .errors import (BadTorsion, CertificateMismatch, DependentUnits,
                     Infeasible, InternalError, NoFallbackProvided,
                     NoGenerator, NotAUnit, NotSquarefree, ParseError,
                     PisotUnitError, PrecisionExceeded, RankZero,
                     SingularSystem, UnboundedRegion, WrongRank, ZeroElement)
from .intervals import ComplexEnclosure, Interval
from .polys import (RationalPoly, count_real_roots, count_unit_circle_roots,
                    is_reciprocal)
from .fields import (FieldElement, IsolatedRoots, NumberField, Precision,
                     certify_real_at, embed, field_norm, inverse,
                     isolate_roots, minimal_polynomial, mul_mod, pow_element)
from .logspace import (LogVector, NumberClass, RegionTag, UnitMatrix,
                       build_unit_matrix, classify_number, delta,
                       log_embedding, region_classify, regulator, weil_height)
from .intprog import IPProblem, IPResult, bounded_box, certified_le, intprog
from .algorithms import (GeneratorResult, UnitSystem, cut_edge, find_cpisot,
                         find_min, generator_existence, height_bound,
                         normalize_torsion, unit_from_exponents,
                         validate_units)
from .cli import (FieldDescription, Report, parse_field,
                  quadratic_fundamental_unit, run)

__version__ = "0.1.0"

__all__ = [
    "BadTorsion", "CertificateMismatch", "ComplexEnclosure", "DependentUnits",
    "FieldDescription", "FieldElement", "GeneratorResult", "IPProblem",
    "IPResult", "Infeasible", "InternalError", "Interval", "IsolatedRoots",
    "LogVector", "NoFallbackProvided", "NoGenerator", "NotAUnit",
    "NotSquarefree", "NumberClass", "NumberField", "ParseError",
    "PisotUnitError", "Precision", "PrecisionExceeded", "RankZero",
    "RationalPoly", "RegionTag", "Report", "SingularSystem", "UnboundedRegion",
    "UnitMatrix", "UnitSystem", "WrongRank", "ZeroElement",
    "bounded_box", "build_unit_matrix", "certified_le", "certify_real_at",
    "classify_number", "count_real_roots", "count_unit_circle_roots",
    "cut_edge", "delta", "embed", "field_norm", "find_cpisot", "find_min",
    "generator_existence", "height_bound", "intprog", "inverse",
    "is_reciprocal", "isolate_roots", "log_embedding", "minimal_polynomial",
    "mul_mod", "normalize_torsion", "parse_field", "pow_element",
    "quadratic_fundamental_unit", "region_classify", "regulator", "run",
    "unit_from_exponents", "validate_units", "weil_height",
]
