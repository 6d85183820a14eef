"""Exception hierarchy.

Every error raised for bad input derives from :class:`MetricEmbedError`, so
callers (and the CLI) can tell validation problems from programming bugs.
"""


class MetricEmbedError(ValueError):
    pass


class MetricAxiomError(MetricEmbedError):
    """A distance matrix fails one of the metric axioms."""

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = tuple(witness)


class NonSquareMatrix(MetricAxiomError):
    def __init__(self, shape):
        super().__init__(f"distance matrix must be square, got shape {shape}", ())


class AsymmetricMatrix(MetricAxiomError):
    def __init__(self, i, j, dij, dji):
        super().__init__(f"d[{i}][{j}]={dij!r} differs from d[{j}][{i}]={dji!r}", (i, j))


class NegativeOrZeroOffDiagonal(MetricAxiomError):
    def __init__(self, i, j, value):
        super().__init__(f"d[{i}][{j}]={value!r} must be positive for distinct points", (i, j))


class NonzeroDiagonal(MetricAxiomError):
    def __init__(self, i, value):
        super().__init__(f"d[{i}][{i}]={value!r} must be zero", (i,))


class TriangleViolation(MetricAxiomError):
    """``d(i, j) > d(i, k) + d(k, j)``; the witness is ``(i, j, k)``."""

    def __init__(self, i, j, k, excess):
        super().__init__(
            f"triangle inequality fails: d({i},{j}) exceeds d({i},{k}) + d({k},{j}) by {excess:.3g}",
            (i, j, k),
        )


class InvalidExponent(MetricEmbedError):
    pass


class SizeOverflow(MetricEmbedError):
    pass


class IncompatibleBlocks(MetricEmbedError):
    pass


class EmptySkeleton(MetricEmbedError):
    pass


class EmptyAnchors(MetricEmbedError):
    pass


class ModulusDiameterMismatch(MetricEmbedError):
    pass


class NonDecreasingModulus(MetricEmbedError):
    pass


class ModulusRangeError(MetricEmbedError):
    pass


class BasePointHasNoAnnulus(MetricEmbedError):
    pass


class MissingLocalMap(MetricEmbedError):
    def __init__(self, n):
        super().__init__(f"no local map f_{n} supplied")
        self.n = n


class LocalContractViolation(MetricEmbedError):
    def __init__(self, n, x, y, detail):
        super().__init__(f"local map f_{n} breaks its contract on ({x}, {y}): {detail}")
        self.n, self.x, self.y = n, x, y


class NonpositiveScale(MetricEmbedError):
    pass


class CollapsedPair(MetricEmbedError):
    def __init__(self, x, y):
        super().__init__(f"points {x} and {y} share an image")
        self.x, self.y = x, y


class InsufficientRange(MetricEmbedError):
    pass


class InadmissibleEnvelope(MetricEmbedError):
    def __init__(self, kind, condition, detail):
        super().__init__(f"{kind} envelope fails condition ({condition}): {detail}")
        self.kind, self.condition = kind, condition


class LengthMismatch(MetricEmbedError):
    pass


class NotSorted(MetricEmbedError):
    pass


class EqualSets(MetricEmbedError):
    pass


class NonConvergent(MetricEmbedError):
    def __init__(self, order, index, spread, eta):
        super().__init__(
            f"{order} limit did not stabilise at index {index}: tail spread {spread:.3g} >= eta {eta:.3g}"
        )
        self.order, self.index, self.spread = order, index, spread


class HypothesisViolated(MetricEmbedError):
    pass
