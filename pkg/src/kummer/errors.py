"""Exception hierarchy shared by every module of the package."""


class KummerError(Exception):
    """Base class for all errors raised by :mod:`kummer`."""


class SingularMatrix(KummerError):
    pass


class DegenerateInput(KummerError):
    pass


class OddResult(KummerError):
    pass


class SquareDiscriminant(KummerError):
    pass


class DiscriminantMismatch(KummerError):
    pass


class NotPrimitive(KummerError):
    pass


class NotFundamental(KummerError):
    pass


class UnsupportedDiscriminant(KummerError):
    pass


class NotCyclic(KummerError):
    pass


class NotSubgroup(KummerError):
    pass


class NonPrimitive(KummerError):
    pass


class UnsupportedLattice(KummerError):
    pass


class NotHyperbolic(KummerError):
    pass


class OverflowScope(KummerError):
    pass


class SearchExhausted(KummerError):
    """No discriminant up to ``n_max`` carried a large enough genus.

    ``best`` holds the record with the most GL2-classes in a single genus
    seen during the search (or ``None`` if nothing was scanned).
    """

    def __init__(self, n_max, best=None):
        super().__init__(f"no qualifying discriminant found with n <= {n_max}")
        self.n_max = n_max
        self.best = best
