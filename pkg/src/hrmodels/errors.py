"""Exception types shared by all modules.

Each error carries a stable ``code`` so the command line front end can map
failures to exit codes and JSON reports without string matching.
"""


class HRError(Exception):
    code = "error"


# graph structure
class NotChordal(HRError):
    code = "not_chordal"


class Disconnected(HRError):
    code = "disconnected"


class TooLarge(HRError):
    code = "too_large"


class SizeCap(HRError):
    code = "size_cap"


class CompleteGraph(HRError):
    code = "complete_graph"


class NotTwoCliqueCover(HRError):
    code = "not_two_clique_cover"


# matrix algebra
class NotStrictlyCND(HRError):
    code = "not_strictly_cnd"


class NotCND(HRError):
    code = "not_cnd"


class SingularBorder(HRError):
    code = "singular_border"


class KernelViolation(HRError):
    code = "kernel_violation"


class RankDeficient(HRError):
    code = "rank_deficient"


class CliqueBlockNotCND(HRError):
    code = "clique_block_not_cnd"


# statements and data
class InvalidStatement(HRError):
    code = "invalid_statement"


class DegenerateData(HRError):
    code = "degenerate_data"


class DegenerateSample(HRError):
    code = "degenerate_sample"


class SingularConditioning(HRError):
    code = "singular_conditioning"


class InsufficientHalfspaceData(HRError):
    code = "insufficient_halfspace_data"

    def __init__(self, k: int, count: int):
        super().__init__(f"halfspace {k} has {count} points, need at least 2")
        self.k = k
        self.count = count


class EmptyExceedanceSet(HRError):
    code = "empty_exceedance_set"


# solver
class MaxIterations(HRError):
    code = "max_iterations"


class LeftCone(HRError):
    code = "left_cone"


# front end
class UnknownTarget(HRError):
    code = "unknown_target"
