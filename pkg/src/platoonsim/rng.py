"""Deterministic random source used everywhere randomness is needed.

SplitMix64 (Steele, Lea & Flood 2014) with the standard published constants.
Every consumer of randomness in the simulator goes through this generator so
that seeded runs replay bit-identically and tests can re-derive the exact
draw sequence independently.
"""

_MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """64-bit SplitMix generator; uniform() yields 53-bit floats in [0, 1)."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & _MASK
        z = ((z ^ (z >> 27)) * MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def spawn(self, stream: int) -> "SplitMix64":
        """Derive an independent child generator for a numbered stream."""
        child = SplitMix64(self.state ^ (stream * GAMMA))
        # burn one output so children with nearby stream ids decorrelate
        child.next_u64()
        return child
