"""Deterministic 64-bit seeding, shuffling and fold partitioning.

All randomness in the harness flows through the fixed generator defined
here, so any run can be replicated bit-for-bit from the master seed, in
any language.  The exact algorithms:

Avalanche mixer ``mix64`` (the splitmix64 finalizer), operating on
unsigned 64-bit integers with wrap-around arithmetic::

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

Seed derivation ``derive_seed(master, coords)``::

    h = mix64(master)
    for c in coords:  h = mix64((h + 0x9E3779B97F4A7C15 + c) mod 2^64)

Each step is a bijection of h for a fixed coordinate and injective in
the coordinate for a fixed h, so two coordinate tuples differing in a
single position can never collide.

Stream generator ``SplitMix64``::

    state = (state + 0x9E3779B97F4A7C15) mod 2^64;  output mix64(state)

Bounded draws use rejection sampling below the largest multiple of n
that fits in 64 bits, so every value in [0, n) is equally likely.
Shuffles are Fisher-Yates from the top index downward, drawing
``j = next_below(i + 1)`` and swapping positions i and j.
"""

from __future__ import annotations

from .errors import InvalidArgumentError

_MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_MULT_1 = 0xBF58476D1CE4E5B9
MIX_MULT_2 = 0x94D049BB133111EB

# Tag mixed into the master seed when subsampling grid points, so the
# subsample draw never reuses a trial's seed stream.
GRID_SAMPLE_TAG = 0x6772_6964  # "grid" in ASCII


def mix64(value: int) -> int:
    """splitmix64 finalizer; a bijection on 64-bit unsigned integers."""
    z = value & _MASK64
    z = ((z ^ (z >> 30)) * MIX_MULT_1) & _MASK64
    z = ((z ^ (z >> 27)) * MIX_MULT_2) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, coords: tuple[int, ...]) -> int:
    """Derive a per-trial seed from the master seed and trial coordinates.

    Pure and deterministic; see the module docstring for the bit-exact
    definition.
    """
    if master_seed < 0 or master_seed > _MASK64:
        raise InvalidArgumentError(f"master_seed must be a u64, got {master_seed}")
    h = mix64(master_seed)
    for c in coords:
        if c < 0:
            raise InvalidArgumentError(f"coordinates must be non-negative, got {c}")
        h = mix64((h + GOLDEN_GAMMA + c) & _MASK64)
    return h


class SplitMix64:
    """The documented 64-bit stream generator (splitmix64)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + GOLDEN_GAMMA) & _MASK64
        return mix64(self._state)

    def next_below(self, n: int) -> int:
        """Unbiased draw from [0, n) via rejection sampling."""
        if n <= 0:
            raise InvalidArgumentError(f"bound must be positive, got {n}")
        limit = ((1 << 64) // n) * n
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n


def _fisher_yates(n: int, rng: SplitMix64) -> list[int]:
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = rng.next_below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def shuffle_indices(n: int, seed: int) -> list[int]:
    """Seeded Fisher-Yates permutation of 0..n-1 (empty for n = 0)."""
    if n < 0:
        raise InvalidArgumentError(f"n must be non-negative, got {n}")
    return _fisher_yates(n, SplitMix64(seed))


def partition_folds(n_items: int, k: int, seed: int) -> list[int]:
    """Assign each of ``n_items`` to one of ``k`` folds, seeded.

    Fold sizes differ by at most one.  Both the item order and which
    folds receive the larger size are drawn from the seeded stream, so
    over many seeds every item lands in every fold with frequency 1/k.
    Returns ``assignment`` with ``assignment[item] = fold id``.
    """
    if k < 1 or k > n_items:
        raise InvalidArgumentError(
            f"fold count must satisfy 1 <= k <= n_items, got k={k}, n_items={n_items}"
        )
    rng = SplitMix64(seed)
    perm = _fisher_yates(n_items, rng)
    fold_order = _fisher_yates(k, rng)
    base, extra = divmod(n_items, k)
    assignment = [0] * n_items
    pos = 0
    for rank, fold_id in enumerate(fold_order):
        size = base + (1 if rank < extra else 0)
        for _ in range(size):
            assignment[perm[pos]] = fold_id
            pos += 1
    return assignment
