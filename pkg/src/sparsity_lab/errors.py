"""Exception hierarchy shared by every module."""


class SparsityLabError(Exception):
    """Base class for all library errors."""


class WorkloadExceeded(SparsityLabError):
    """An enumeration or factorization would exceed the configured budget."""


class NotCoprime(SparsityLabError, ValueError):
    pass


class EvenModulus(SparsityLabError, ValueError):
    pass


class EmptySet(SparsityLabError):
    """No prime survived the sieving-set predicates."""


class ZeroInput(SparsityLabError, ValueError):
    pass


class DomainError(SparsityLabError, ValueError):
    pass


class OddD(SparsityLabError, ValueError):
    pass


class HypothesisViolated(SparsityLabError, ValueError):
    """A lemma hypothesis does not hold; the message names the condition."""


class NotCoprimeOrders(SparsityLabError, ValueError):
    pass


class DegenerateInstance(SparsityLabError, ValueError):
    pass


class PrecisionInsufficient(SparsityLabError):
    pass


class BoundViolation(SparsityLabError, AssertionError):
    """A proven inequality or exact identity failed on computed data."""


class OracleMismatch(SparsityLabError, AssertionError):
    """Two independent computation routes disagreed."""


class ConfigError(SparsityLabError, ValueError):
    pass
