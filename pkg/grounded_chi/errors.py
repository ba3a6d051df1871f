"""
Error types. Every error maps to a CLI exit code through `exit_code`:
1 audit failure, 2 usage / bad input, 3 generation budget, 4 solver budget.
"""


class GroundedError(Exception):
    exit_code = 2


# grid_topology

class FrameTooSmall(GroundedError):
    def __init__(self, frame, cell):
        self.frame = frame
        self.cell = cell
        super().__init__(f"cell {tuple(cell)} lies outside frame {frame.width}x{frame.height}")


class BaseNotSurrounded(GroundedError):
    def __init__(self, set_id):
        self.set_id = set_id
        super().__init__(f"base of {set_id} is not surrounded")


class NotConnected(GroundedError):
    pass


class SimplicityHypothesisViolated(GroundedError):
    def __init__(self, index, components, reason="intersection is disconnected"):
        self.index = index
        self.components = components
        super().__init__(f"constraint set {index}: {reason}")


# family_model

class BasesOverlap(GroundedError):
    def __init__(self, a, b):
        self.ids = (a, b)
        super().__init__(f"bases overlap: {a},{b}")


class InvalidPierced(GroundedError):
    pass


class GenerationBudgetExceeded(GroundedError):
    exit_code = 3

    def __init__(self, attempts):
        self.attempts = attempts
        super().__init__(f"generator gave up after {attempts} attempts")


class ParseError(GroundedError):
    def __init__(self, path, field, detail):
        self.path = path
        self.field = field
        super().__init__(f"{path}: {field}: {detail}")


class ValidationError(GroundedError):
    pass


# graph_core

class BudgetExceeded(GroundedError):
    exit_code = 4

    def __init__(self, limit):
        self.limit = limit
        super().__init__(f"solver node budget {limit} exhausted")


class OrderViolation(GroundedError):
    exit_code = 1


class NotPlanar(GroundedError):
    exit_code = 1


class NotFourColorable(GroundedError):
    exit_code = 1


# decomposition

class PreconditionFailed(GroundedError):
    def __init__(self, chi, threshold):
        self.chi = chi
        self.threshold = threshold
        super().__init__(f"chi={chi} does not exceed threshold {threshold}")


class NoSupportedLayer(GroundedError):
    pass


class NotAClique(GroundedError):
    pass


class InputOverlap(GroundedError):
    pass


class StepInfeasible(GroundedError):
    def __init__(self, stage, reason):
        self.stage = stage
        self.reason = reason
        super().__init__(f"{stage}: {reason}")


# dist2_pipeline

class PillarsNotDisjoint(GroundedError):
    pass


class PillarMissesS(GroundedError):
    pass


class NotSurrounded(GroundedError):
    pass


class HypothesisViolated(GroundedError):
    def __init__(self, member_id, detail="misses every pillar cut"):
        self.member_id = member_id
        super().__init__(f"{member_id}: {detail}")


class MemberMissesAllPillars(GroundedError):
    pass


class CliqueBoundViolated(GroundedError):
    exit_code = 1


class RoutingFailed(GroundedError):
    def __init__(self, corridor, members):
        self.corridor = corridor
        self.members = tuple(members)
        super().__init__(f"no route in corridor {corridor} for {', '.join(self.members)}")


class ClipDisjointnessViolated(GroundedError):
    exit_code = 1


# audits

class AuditFailure(GroundedError):
    exit_code = 1


class StageError(GroundedError):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 1)
        super().__init__(f"[{stage}] {cause}")
