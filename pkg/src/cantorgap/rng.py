"""SplitMix64 pseudo-random generator used for all instance generation.

The derived draws are fixed so that other implementations can reproduce
instances bit for bit:

* ``below(n)``: draw 64-bit words ``w`` until ``w < n * floor(2**64 / n)``,
  return ``w % n``.
* ``bit()``: top bit of one word.
* ``sample(seq, k)``: partial Fisher-Yates; for ``i`` in ``0..k-1`` swap
  position ``i`` with ``i + below(len - i)`` and emit position ``i``.
"""

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def below(self, n):
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = ((1 << 64) // n) * n
        while True:
            w = self.next_u64()
            if w < limit:
                return w % n

    def bit(self):
        return self.next_u64() >> 63

    def sample(self, seq, k):
        items = list(seq)
        if k > len(items):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.below(len(items) - i)
            items[i], items[j] = items[j], items[i]
        return items[:k]

    def choice(self, seq):
        seq = list(seq)
        return seq[self.below(len(seq))]

    def fork(self):
        """Independent child stream seeded from the next word."""
        return SplitMix64(self.next_u64())
