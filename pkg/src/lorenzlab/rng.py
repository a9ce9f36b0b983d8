"""Deterministic random numbers and normal-distribution helpers.

The generator is xoshiro256++ seeded through splitmix64, implemented directly
on 64-bit integer arithmetic so that streams are reproducible bit for bit on
any platform, independent of numpy's generator versioning. Substreams are
derived from a (seed, index) pair, which lets a simulation assign one
independent stream per row: row i of an n-row run does not change when n does.

The inverse normal c.d.f. is the classic rational approximation with fixed
coefficients, sharpened by one Halley step against math.erfc. The refined
value is accurate to about 1e-15 absolute, comfortably below the 1e-9 the
rest of the package assumes.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1

_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15


def _splitmix64_mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def splitmix64_stream(seed: int, count: int) -> list[int]:
    """First `count` outputs of splitmix64 for the given seed."""
    state = seed & _MASK64
    out = []
    for _ in range(count):
        state = (state + _SPLITMIX_GAMMA) & _MASK64
        out.append(_splitmix64_mix(state))
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK64


class Xoshiro256pp:
    """xoshiro256++ with splitmix64 state expansion."""

    def __init__(self, seed: int):
        self._s = splitmix64_stream(seed, 4)
        # The all-zero state is invalid; splitmix64 cannot produce it from a
        # single seed, but guard anyway for hand-built states.
        if not any(self._s):
            self._s = [1, 2, 3, 4]

    @classmethod
    def from_state(cls, state: list[int]) -> "Xoshiro256pp":
        rng = cls.__new__(cls)
        rng._s = [w & _MASK64 for w in state]
        if not any(rng._s):
            rng._s = [1, 2, 3, 4]
        return rng

    @classmethod
    def substream(cls, seed: int, index: int) -> "Xoshiro256pp":
        """Independent stream for (seed, index), stable in the index."""
        mixed = _splitmix64_mix((seed ^ (index * _SPLITMIX_GAMMA)) & _MASK64)
        return cls(mixed)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s0 + s3) & _MASK64, 23) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def normal(self) -> float:
        """Standard normal via inversion (keeps substreams synchronized)."""
        # random() can return exactly 0, which inversion rejects.
        u = self.random()
        while u <= 0.0:
            u = self.random()
        return normal_inverse_cdf(u)


# -- normal distribution ------------------------------------------------------

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

# Rational-approximation coefficients (central region and tails). These are
# fixed by value on purpose: results must not drift with library versions.
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)

_P_LOW = 0.02425


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p > 1.0 - _P_LOW:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (
        (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
        * q
        / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
    )


def normal_inverse_cdf(p: float) -> float:
    """Inverse standard normal c.d.f., |error| near machine precision."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    if p > 0.5:
        # 1 - p is exact here, and the lower tail is where erfc (and hence
        # the Halley correction) keeps full relative accuracy
        return -normal_inverse_cdf(1.0 - p)
    x = _acklam(p)
    # One Halley step against the exact c.d.f.
    err = normal_cdf(x) - p
    u = err * _SQRT_2PI * math.exp(0.5 * x * x)
    return x - u / (1.0 + 0.5 * x * u)
