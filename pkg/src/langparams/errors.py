"""Exception hierarchy.

Every error raised on purpose by the library derives from ``LangParamsError``.
Size-guard refusals derive from ``SizeGuardError`` so the CLI can map them to
a distinct exit code.
"""


class LangParamsError(Exception):
    pass


class SizeGuardError(LangParamsError):
    pass


class EmptyInput(LangParamsError, ValueError):
    pass


class ZeroInput(LangParamsError, ValueError):
    pass


class UnsupportedType(LangParamsError, ValueError):
    pass


class DegenerateChi(LangParamsError, ValueError):
    pass


class NonPositiveCount(LangParamsError, ArithmeticError):
    pass


class NotApplicable(LangParamsError, ValueError):
    pass


class BadAction(LangParamsError, ValueError):
    pass


class BadInput(LangParamsError, ValueError):
    pass


class NotPrime(LangParamsError, ValueError):
    pass


class NotSupported(LangParamsError, ValueError):
    pass


class WeylTooLarge(SizeGuardError):
    def __init__(self, partial_count, bound):
        super().__init__(f"Weyl group exceeds bound {bound} (reached {partial_count} elements)")
        self.partial_count = partial_count
        self.bound = bound


class GroupTooLarge(SizeGuardError):
    def __init__(self, estimate, bound):
        super().__init__(f"group of estimated order {estimate} exceeds bound {bound}")
        self.estimate = estimate
        self.bound = bound


class TooManyPairs(SizeGuardError):
    def __init__(self, pairs, bound):
        super().__init__(f"{pairs} candidate pairs exceed bound {bound}")
        self.pairs = pairs
        self.bound = bound
