"""Exception hierarchy shared across the package."""


class HyperbootError(Exception):
    """Base class for all errors raised by hyperboot."""


class InvalidKSet(HyperbootError, ValueError):
    pass


class DuplicateVertex(InvalidKSet):
    pass


class WrongArity(InvalidKSet):
    pass


class OutOfRange(HyperbootError, ValueError):
    pass


class TooLarge(HyperbootError, ValueError):
    """A desk-scale guard was exceeded."""


class BadArity(HyperbootError, ValueError):
    """Uniformity k or threshold r below 2."""


class BadPairing(HyperbootError, ValueError):
    """The (eps, delta) pair violates the regime inequality for its side."""


class NoRoot(HyperbootError, ValueError):
    pass


class BadChi(HyperbootError, ValueError):
    pass


class BadMu(HyperbootError, ValueError):
    pass


class EmptyIncrements(HyperbootError, ValueError):
    pass


class MissingTrace(HyperbootError, RuntimeError):
    """Verbose per-step data was not recorded for this run."""
