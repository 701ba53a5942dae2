"""Exception types raised across betti_scope."""


class BettiScopeError(Exception):
    """Base class for all library errors."""


class ComplexError(BettiScopeError, ValueError):
    pass


class InvalidSimplex(ComplexError):
    def __init__(self, simplex):
        self.simplex = tuple(simplex)
        super().__init__(f"simplex {self.simplex} has repeated or invalid vertex ids")


class DegreeExceeded(ComplexError):
    def __init__(self, vertex, degree, bound):
        self.vertex = vertex
        self.degree = degree
        self.bound = bound
        super().__init__(f"vertex {vertex} lies in {degree} edges, degree bound is {bound}")


class DuplicateSimplex(ComplexError):
    def __init__(self, simplex):
        self.simplex = tuple(simplex)
        super().__init__(f"simplex {self.simplex} listed more than once")


class UnknownVertex(ComplexError, KeyError):
    def __init__(self, vertex):
        self.vertex = vertex
        ValueError.__init__(self, f"vertex {vertex} is not in the complex")

    def __str__(self):
        return self.args[0]


class UnknownSimplex(ComplexError, KeyError):
    def __init__(self, simplex):
        self.simplex = tuple(simplex)
        ValueError.__init__(self, f"simplex {self.simplex} is not in the complex")

    def __str__(self):
        return self.args[0]


class EmptyComplex(ComplexError):
    pass


class EmptyDimension(ComplexError):
    pass


class ParseError(ComplexError):
    def __init__(self, message, line_no=None, line=None):
        self.line_no = line_no
        self.line = line
        where = f"line {line_no}: " if line_no is not None else ""
        super().__init__(f"{where}{message}" + (f" ({line.strip()!r})" if line else ""))


class TooLarge(BettiScopeError, ValueError):
    def __init__(self, size, cap):
        self.size = size
        self.cap = cap
        super().__init__(f"operator of size {size} exceeds the dense/exact cap {cap}")


class InvalidParameter(BettiScopeError, ValueError):
    pass


class RadiusMismatch(BettiScopeError, ValueError):
    pass


class DegenerateSupport(BettiScopeError, ValueError):
    pass


class InvalidCut(BettiScopeError, ValueError):
    pass


class InvalidSpec(BettiScopeError, ValueError):
    pass


class NoMatch(BettiScopeError):
    """No corpus entry is within tolerance of the sampled local statistics."""

    def __init__(self, closest_index, closest_deviation, threshold):
        self.closest_index = closest_index
        self.closest_deviation = closest_deviation
        self.threshold = threshold
        super().__init__(
            f"no corpus entry within {threshold:.4g}; closest is entry {closest_index} "
            f"at sup-deviation {closest_deviation:.4g}"
        )
