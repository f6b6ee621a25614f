"""Exception types shared across the package."""


class SchemaError(ValueError):
    """A file or structure violates the expected schema."""


class SizeGuardExceeded(ValueError):
    """An exact search was refused because its candidate count is too large."""

    def __init__(self, what: str, count: int, limit: int):
        self.what = what
        self.count = count
        self.limit = limit
        super().__init__(
            f"{what}: {count} candidates exceeds the exact-mode guard of {limit}; "
            f"use a heuristic/sampled mode instead"
        )


# Exact searches refuse to run past this many candidates.
EXACT_CANDIDATE_LIMIT = 10**7
