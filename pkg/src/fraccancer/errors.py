"""Exception types raised by the solvers and front-ends."""


class NonConvergence(RuntimeError):
    """Newton iteration failed to reach tolerance at a time step."""

    def __init__(self, step: int, residual: float):
        super().__init__(f"Newton did not converge at step {step} (residual {residual:.3e})")
        self.step = step
        self.residual = residual


class SingularSystem(RuntimeError):
    """A 5x5 step system has a pivot below the breakdown threshold."""

    def __init__(self, step: int):
        super().__init__(f"singular step system at step {step}")
        self.step = step


class SweepNotConverged(RuntimeError):
    """Forward-backward sweep hit its iteration cap; ``solution`` holds the last iterate."""

    def __init__(self, solution):
        super().__init__(
            f"sweep not converged after {solution.sweeps_used} sweeps (psi = {solution.psi_final:.3e})"
        )
        self.solution = solution


class NonexistentEquilibrium(ValueError):
    """An equilibrium component is non-positive; ``condition`` names the violated inequality."""

    def __init__(self, condition: str, margin: float):
        super().__init__(f"equilibrium does not exist: {condition} (margin {margin:.6g})")
        self.condition = condition
        self.margin = margin


class MarginalCase(ArithmeticError):
    """Stability margin too close to zero to decide; ``report`` holds the evaluation."""

    def __init__(self, report):
        super().__init__(f"marginal stability (margin {report.matignon_margin:.3e})")
        self.report = report


class ConfigError(ValueError):
    """Base class for run-configuration problems."""


class ParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


class ValidationError(ConfigError):
    pass
