"""64-bit linear congruential generator, bit-exact across languages."""
from __future__ import annotations

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK = (1 << 64) - 1
_UNIT = 2.0**-53


class Lcg64:
    def __init__(self, seed: int):
        if not 0 <= seed <= MASK:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self.state = int(seed)

    def next_u64(self) -> int:
        self.state = (self.state * MULTIPLIER + INCREMENT) & MASK
        return self.state

    def next_unit(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * _UNIT

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_unit()


def random_starts(seed: int, count: int, d_hi: float, a_hi: float) -> list[tuple[float, float]]:
    """``count`` points drawn uniformly over ``[0, d_hi] x [0, a_hi]``, d first."""
    rng = Lcg64(seed)
    starts = []
    for _ in range(count):
        d = rng.uniform(0.0, d_hi)
        a = rng.uniform(0.0, a_hi)
        starts.append((d, a))
    return starts
