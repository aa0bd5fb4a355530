"""Exception types shared across the package."""


class QnrnpError(Exception):
    """Base class for every error raised by this package."""


class NonPositiveTheta(QnrnpError):
    """The lower bound for theta_k is not positive, so the criterion cannot be used."""


class NoValidK(QnrnpError):
    """No k in [1, omega] gives a usable criterion."""


class Infeasible(QnrnpError):
    """Fewer than omega admissible primes are available for a divisor constraint."""


class WitnessNotFound(QnrnpError):
    """A prime on a final list has no pair of consecutive QNRNPs.

    This is either an implementation bug or a genuine counterexample,
    so it is never swallowed.
    """

    def __init__(self, p):
        super().__init__(f"no two consecutive QNRNPs found modulo p={p}")
        self.p = p


class CorruptCheckpoint(QnrnpError):
    """A checkpoint file failed its digest, version or constraint check."""


class NotPrime(QnrnpError):
    """An operation that needs a prime modulus received a composite."""


class ConfigError(QnrnpError):
    """Invalid run configuration (bad epsilon, worker count, interval...)."""
