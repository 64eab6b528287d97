"""Exception hierarchy shared by every engine.

Each exception carries a stable ``code`` string so the CLI can report
machine-readable errors without inspecting messages.
"""


class FscError(Exception):
    code = "fsc_error"


class ParseError(FscError, ValueError):
    code = "parse_error"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class RangeError(FscError, ValueError):
    code = "range_error"


class KindMismatch(FscError, ValueError):
    code = "kind_mismatch"


class DimensionMismatch(FscError, ValueError):
    code = "dimension_mismatch"


class DualUndefined(FscError, ValueError):
    code = "dual_undefined"


class CoefficientsNotHolder(FscError, ValueError):
    code = "coefficients_not_holder"


class EmptyRegion(FscError, ValueError):
    code = "empty_region"


class TargetNotInS(FscError, ValueError):
    code = "target_not_in_s"


class SetEmpty(FscError, ValueError):
    code = "set_empty"


class DimsMismatch(FscError, ValueError):
    code = "dims_mismatch"


class SupportTooLarge(FscError, ValueError):
    code = "support_too_large"


class NotHolder(FscError, ValueError):
    code = "not_holder"


class AliasingRisk(FscError, ValueError):
    code = "aliasing_risk"


class NotElliptic(FscError, ValueError):
    code = "not_elliptic"
