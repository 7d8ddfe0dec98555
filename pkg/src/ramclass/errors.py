"""Shared exception taxonomy.

Every error raised by the library is one of these classes, so callers (and
the CLI exit-code mapping) can dispatch on type alone.
"""


class RamclassError(Exception):
    """Base class for all library errors."""


class ParseError(RamclassError):
    """Malformed group spec, profile file, or cycle notation."""


class UnknownSpec(ParseError):
    """Syntactically valid spec naming a group this toolkit does not build."""


class DegreeMismatch(RamclassError):
    """Permutations of different degrees were combined."""


class NonTransitive(RamclassError):
    """Generated group does not act transitively on its points."""


class CapExceeded(RamclassError):
    """A configured size cap (group closure, enumeration bound) was exceeded."""


class NotPrime(RamclassError):
    """An argument required to be prime is not."""


class NotSubset(RamclassError):
    """A purported subset of a group contains foreign elements."""


class NotAbelian(RamclassError):
    """Operation defined only for abelian groups."""


class NotClosed(RamclassError):
    """Set is not closed under invertible powering (or conjugation)."""


class NotInH(RamclassError):
    """Subset must lie inside the abelian normal part of a dihedral group."""


class NotFundamental(RamclassError):
    """Integer is not a fundamental discriminant."""


class EmptyRange(RamclassError):
    """A scan checkpoint covers no fields / no data."""


class WildPrime(RamclassError):
    """Tame-prime operation called on a prime dividing the group order."""


class TamePrime(RamclassError):
    """Wild-prime operation called on a prime not dividing the group order."""


class BadResidue(RamclassError):
    """Residue class not coprime to the modulus."""


class UnsupportedSingularity(RamclassError):
    """No main-term branch exists (pole order 0 with no log power)."""


class InsufficientData(RamclassError):
    """Too few or degenerate data points for a fit."""


class MissingParam(RamclassError):
    """A required shape parameter was not supplied."""


class MissingGroup(RamclassError):
    """Profile record needs an attached permutation group."""


class MissingAbelianRank(RamclassError):
    """Genus bound needs rk_q of the maximal abelian subextension."""


class InvalidInputs(RamclassError):
    """Rank-bound inputs violate their invariants."""


class WrongGroup(RamclassError):
    """Profile group differs from the one the calculator expects."""


class NonPositive(RamclassError):
    """Argument must be a positive integer."""
