"""Exception types raised by the solvers, observables and CLI."""


class SpinOmitError(Exception):
    """Base class for all package errors."""


class InvalidParams(SpinOmitError, ValueError):
    """A physical parameter violates its domain; ``field`` names the culprit."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class NoConvergence(SpinOmitError):
    def __init__(self, message, residual=float("nan"), iterations=0):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")


class MultipleRoots(SpinOmitError):
    """The steady-state self-consistency has more than one real root (bistability)."""

    def __init__(self, roots):
        self.roots = tuple(roots)
        super().__init__(
            "steady-state detuning has %d roots: %s"
            % (len(self.roots), ", ".join(f"{r:.6e}" for r in self.roots))
        )


class AboveThreshold(SpinOmitError):
    """Parametric instability: 4G^2 >= kappa^2 + Delta^2."""


class SingularSystem(SpinOmitError):
    def __init__(self, condition):
        self.condition = condition
        super().__init__(f"sideband system is numerically singular (cond={condition:.3e})")


class UndefinedEfficiency(SpinOmitError):
    """Efficiencies are normalised by the probe amplitude, which is zero."""


class PhaseWrap(SpinOmitError):
    """Phase jump across the differentiation stencil could not be resolved."""


class BlowUp(SpinOmitError):
    """Time-domain state exceeded its bound (parametric instability or bad params)."""


class StepUnderflow(SpinOmitError):
    pass


class NonPeriodic(SpinOmitError):
    def __init__(self, drift):
        self.drift = drift
        super().__init__(f"harmonic coefficients drift by {drift:.3e} between windows")


class UnknownPreset(SpinOmitError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown preset"


class ConfigError(SpinOmitError, ValueError):
    pass
