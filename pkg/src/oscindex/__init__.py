"""Fredholm properties and index of singular integral operators with an oscillating coefficient."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    Coefficient,
    OscillationSpec,
    constant,
    damping,
    eval_oscillation,
    helper_p1_q1,
    step_blend,
    trig_polynomial,
    winding_exp,
)
from .symbols import (  # noqa: E402
    ExtendedElement,
    Generator,
    extended_symbol,
    identity,
    matrix_symbol,
    multiplication,
    p_symbol,
    projection_p,
    projection_q,
    riesz_combination,
    s_symbol,
    scalar_symbols,
    singular,
)
from .fredholm import CaseTag, check_conditions_B, classify_case, corner_invertibility, finite_section_probe  # noqa: E402
from .factorization import (  # noqa: E402
    Certificate,
    builtin_certificate_PQUh,
    normalize_certificate,
    verify_certificate,
    weighted_shift_spectral_radius,
)
from .winding import arg_increment, arg_increment_line, oscillatory_segment  # noqa: E402
from .index import IndexOptions, IndexReport, compute_index, index_formula_B  # noqa: E402
from .instances import Instance, bundled, load  # noqa: E402

__all__ = [
    "Certificate",
    "CaseTag",
    "Coefficient",
    "ExtendedElement",
    "Generator",
    "IndexOptions",
    "IndexReport",
    "Instance",
    "OscillationSpec",
    "arg_increment",
    "arg_increment_line",
    "builtin_certificate_PQUh",
    "bundled",
    "check_conditions_B",
    "classify_case",
    "compute_index",
    "constant",
    "corner_invertibility",
    "damping",
    "eval_oscillation",
    "extended_symbol",
    "finite_section_probe",
    "helper_p1_q1",
    "identity",
    "index_formula_B",
    "load",
    "matrix_symbol",
    "multiplication",
    "normalize_certificate",
    "oscillatory_segment",
    "p_symbol",
    "projection_p",
    "projection_q",
    "riesz_combination",
    "s_symbol",
    "scalar_symbols",
    "singular",
    "step_blend",
    "trig_polynomial",
    "verify_certificate",
    "weighted_shift_spectral_radius",
    "winding_exp",
]
