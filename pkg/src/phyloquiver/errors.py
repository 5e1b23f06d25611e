"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent input: unknown ids, broken invariants,
    violated preconditions, unparseable files."""


class UndecidedError(RuntimeError):
    """A query whose exact answer is not computable for the given input
    (e.g. phylogenetic status of a non-normal vertex in a non-monotonous
    quiver)."""


class SizeGuardError(RuntimeError):
    """A computation refused because it exceeded a configured size or
    enumeration budget."""
