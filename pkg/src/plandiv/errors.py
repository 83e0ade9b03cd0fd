"""Exception types shared across the package."""


class PlandivError(Exception):
    """Base class for all package errors."""


class DegenerateInput(PlandivError):
    """Input violates a general-position assumption; caller should re-rotate."""


class CrossingDetected(PlandivError):
    """Two segments cross while the structure was built in planar mode."""


class DegenerateCrossing(PlandivError):
    """Crossing pattern too degenerate to planarize (shared point, overlap, ...)."""


class OutOfBounds(PlandivError):
    """Query point lies outside the bounding box of the structure."""


class EmptyGraph(PlandivError):
    pass


class NoEdges(PlandivError):
    pass


class IndexOutOfRange(PlandivError, IndexError):
    """Neighbor index outside 1..deg(v)."""


class ParseError(PlandivError):
    """Malformed graph file; carries the offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class InvariantViolation(PlandivError):
    pass


class NotPlanar(PlandivError):
    pass


class ComponentCapExceeded(PlandivError):
    """Exact solver refused a component larger than its size cap."""


class SpaceExceeded(PlandivError):
    def __init__(self, machine, round_idx, words, budget):
        super().__init__(
            f"machine {machine} holds {words} words > budget {budget} at round {round_idx}"
        )
        self.machine = machine
        self.round = round_idx
        self.words = words
        self.budget = budget


class UndeliverableMessage(PlandivError):
    pass


class RestartLimit(PlandivError):
    pass


class Unreachable(PlandivError):
    pass


class Disconnected(PlandivError):
    pass


class PairNotMarked(PlandivError):
    pass


class BadSpec(PlandivError):
    pass


class DuplicatePoints(PlandivError):
    pass
