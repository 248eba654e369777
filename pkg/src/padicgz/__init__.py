"""Exact p-adic arithmetic and degree-zero verification harness."""

__version__ = "0.1.0"

from .errors import (ContextMismatch, DepthError, InstanceError,
                     MeasureFormatError, ModelError, NotSquareError,
                     PadicError, PrecisionError, UnsupportedError)
from .generate import generate_instance
from .gz import (GZInstance, build_measure, darmon_difference, darmon_point,
                 ord_component_check, plectic_Q, plectic_determinant,
                 plectic_group, plectic_point, point_tensors, verify_thm71,
                 verify_thm91)
from .padic import (PadicScalar, PrimeContext, QuadContext, QuadScalar,
                    TorusElement, TorusQuotient, to_level, torus_quotient)
from .serialize import (format_scalar, load_instance_dict, load_measure,
                        report_line, save_instance_dict, save_measure)

__all__ = [
    "PrimeContext", "PadicScalar", "QuadContext", "QuadScalar",
    "TorusElement", "TorusQuotient", "torus_quotient", "to_level",
    "PadicError", "PrecisionError", "ContextMismatch", "NotSquareError",
    "DepthError", "MeasureFormatError", "ModelError", "InstanceError",
    "UnsupportedError",
    "GZInstance", "build_measure", "point_tensors", "darmon_difference",
    "darmon_point", "verify_thm71", "verify_thm91", "plectic_group",
    "plectic_Q", "plectic_point", "plectic_determinant",
    "ord_component_check", "generate_instance",
    "format_scalar", "load_measure", "save_measure", "load_instance_dict",
    "save_instance_dict", "report_line",
]
