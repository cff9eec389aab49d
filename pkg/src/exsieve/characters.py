"""Real primitive Dirichlet characters via the Kronecker symbol.

A fundamental discriminant d determines the real primitive character
chi(n) = (d|n) of modulus D = |d|.  The full period is cached as a
signed-byte table, which makes every downstream inner loop an O(1)
lookup.  Complete and short progression sums over a proper divisor
D' of D are provided with their exact structural bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "kronecker_symbol",
    "is_fundamental_discriminant",
    "RealPrimitiveCharacter",
    "build_character",
    "GaussSumValue",
    "gauss_sum",
    "CharacterSumReport",
    "restricted_character_sum",
    "progression_complete_sum",
    "ShortSumReport",
    "short_progression_sum",
]

# (a|2) for a mod 8; 0 at even a
_KR2 = (0, 1, 0, -1, 0, -1, 0, 1)


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a|n), total on all integer pairs.

    Computed by the usual quadratic-reciprocity reduction: strip signs
    and factors of two, then flip via reciprocity for odd parts.
    """
    if n == 0:
        return 1 if a in (1, -1) else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    # factors of 2 in n contribute (a|2) per factor
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t % 2 == 1:
        result *= _KR2[a % 8]
        if result == 0:
            return 0
    a %= n
    # Jacobi-style loop on the odd part of n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_fundamental_discriminant(d: int) -> tuple[bool, str]:
    """Check the fundamental-discriminant conditions; returns (ok, reason)."""
    if d == 0:
        return False, "d = 0"
    if d % 4 == 1:
        core = d
    elif d % 4 == 0:
        core = d // 4
        if core % 4 not in (2, 3):
            return False, f"d = 0 mod 4 but d/4 = {core} is 0 or 1 mod 4"
    else:
        return False, f"d = {d % 4} mod 4 (must be 0 or 1)"
    if not _is_squarefree(abs(core)):
        return False, f"{core} has a square factor"
    return True, ""


def _is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return False
        else:
            p += 1
    return True


@dataclass(frozen=True)
class RealPrimitiveCharacter:
    """Real primitive character mod D = |d| for a fundamental discriminant d.

    values[r] = chi(r) for r = 0..D-1, entries in {-1, 0, +1}.
    """

    discriminant: int
    modulus: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    def __call__(self, n: int) -> int:
        return int(self.values[n % self.modulus])

    def value_array(self, N: int) -> np.ndarray:
        """chi(n) for n = 0..N as an int8 array."""
        D = self.modulus
        reps = N // D + 1
        return np.tile(self.values, reps)[: N + 1]

    # identity is the discriminant; arrays are derived data
    def __eq__(self, other):
        return (
            isinstance(other, RealPrimitiveCharacter)
            and other.discriminant == self.discriminant
        )

    def __hash__(self):
        return hash(("RealPrimitiveCharacter", self.discriminant))


def build_character(d: int) -> RealPrimitiveCharacter:
    """Build chi = (d|.) with its period table, verifying the invariants.

    Verified at build time: complete multiplicativity on a grid, vanishing
    exactly on gcd(n, D) > 1, zero period sum, and a primitivity witness
    for every proper divisor of D.
    """
    ok, reason = is_fundamental_discriminant(d)
    if not ok:
        raise ValueError(f"{d} is not a fundamental discriminant: {reason}")
    if abs(d) < 3:
        raise ValueError(f"need |d| >= 3, got d = {d}")
    D = abs(d)
    values = _kronecker_period(d, D)
    chi = RealPrimitiveCharacter(discriminant=d, modulus=D, values=values)
    _verify_character(chi)
    return chi


def _kronecker_period(d: int, D: int) -> np.ndarray:
    """(d|r) for r = 0..D-1, filled multiplicatively from prime values."""
    values = np.zeros(D, dtype=np.int8)
    if D <= 2:
        raise ValueError("modulus too small")
    # local spf sieve over 0..D-1
    spf = np.zeros(D, dtype=np.int64)
    for p in range(2, math.isqrt(D - 1) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    values[1] = 1
    for n in range(2, D):
        p = int(spf[n])
        if p == 0:  # n prime
            values[n] = kronecker_symbol(d, n)
        else:
            values[n] = values[p] * values[n // p]
    return values


def _verify_character(chi: RealPrimitiveCharacter) -> None:
    D = chi.modulus
    vals = chi.values
    if int(np.abs(vals).max()) > 1:
        raise AssertionError("character values outside {-1, 0, 1}")
    if int(vals.sum()) != 0:
        raise AssertionError(f"period sum {int(vals.sum())} != 0 for D = {D}")
    # vanishing exactly on gcd > 1 (index 0: gcd(0, D) = D > 1)
    g = np.gcd(np.arange(D), D)
    if not ((vals == 0) == (g > 1)).all():
        raise AssertionError("chi(n) = 0 iff gcd(n, D) > 1 violated")
    # multiplicativity spot check on a grid
    grid = range(1, min(D, 40))
    for m in grid:
        for n in grid:
            if vals[m] * vals[n] != vals[(m * n) % D]:
                raise AssertionError(f"chi({m})chi({n}) != chi({m * n}) mod {D}")
    # primitivity: every proper divisor admits a witness pair
    for Dp in _proper_divisors(D):
        if not _primitivity_witness(chi, Dp):
            raise AssertionError(f"no primitivity witness for divisor {Dp} of {D}")


def _proper_divisors(D: int) -> list[int]:
    return [k for k in range(1, D) if D % k == 0]


def _primitivity_witness(chi: RealPrimitiveCharacter, Dp: int) -> bool:
    """True iff some class mod Dp contains units n1, n2 with chi(n1) != chi(n2)."""
    D = chi.modulus
    idx = np.arange(D) % Dp
    vals = chi.values
    has_pos = np.zeros(Dp, dtype=bool)
    has_neg = np.zeros(Dp, dtype=bool)
    has_pos[idx[vals > 0]] = True
    has_neg[idx[vals < 0]] = True
    return bool((has_pos & has_neg).any())


@dataclass(frozen=True)
class GaussSumValue:
    """G(chi) = sum_r chi(r) e(r/D); |G| = sqrt(D) for primitive chi."""

    re: float
    im: float
    character: RealPrimitiveCharacter

    @property
    def magnitude(self) -> float:
        return math.hypot(self.re, self.im)


def gauss_sum(chi: RealPrimitiveCharacter) -> GaussSumValue:
    """Evaluate the Gauss sum by its D-term definition."""
    D = chi.modulus
    r = np.arange(D)
    # r/D is already reduced mod 1
    ang = 2.0 * math.pi * r / D
    vals = chi.values.astype(np.float64)
    re = math.fsum(vals * np.cos(ang))
    im = math.fsum(vals * np.sin(ang))
    return GaussSumValue(re=re, im=im, character=chi)


@dataclass(frozen=True)
class CharacterSumReport:
    """A restricted character sum against its Polya-Vinogradov-style envelope."""

    value: int
    envelope: float  # tau(q) * sqrt(D) * log(D), classical explicit constant 1
    ratio: float


def restricted_character_sum(
    chi: RealPrimitiveCharacter, u: float, q: int
) -> CharacterSumReport:
    """sum_{k <= u, gcd(k, q) = 1} chi(k), with an envelope comparison.

    The envelope is reported, not asserted: it is the empirical
    Polya-Vinogradov-shaped bound tau(q) sqrt(D) log D.
    """
    D = chi.modulus
    U = int(u)
    total = 0
    if U >= 1:
        ks = np.arange(1, U + 1)
        sel = np.gcd(ks, q) == 1
        total = int(chi.value_array(U)[1:][sel].sum())
    tau_q = _tau_small(q)
    envelope = tau_q * math.sqrt(D) * math.log(D)
    ratio = abs(total) / envelope if envelope > 0 else 0.0
    return CharacterSumReport(value=total, envelope=envelope, ratio=ratio)


def _tau_small(q: int) -> int:
    return sum(1 for k in range(1, q + 1) if q % k == 0)


def progression_complete_sum(chi: RealPrimitiveCharacter, Dp: int, b: int) -> int:
    """sum_{j=1}^{D/D'} chi(j D' + b) for a proper divisor D' of D.

    An integer combination of character values; vanishes identically.
    """
    D = chi.modulus
    if Dp <= 0 or D % Dp != 0 or Dp >= D:
        raise ValueError(f"D' = {Dp} is not a proper divisor of D = {D}")
    Dstar = D // Dp
    js = np.arange(1, Dstar + 1)
    return int(chi.values[(js * Dp + b) % D].sum())


@dataclass(frozen=True)
class ShortSumReport:
    """A short progression sum with its exact block-structure bound D/D'."""

    value: int
    bound: int
    ratio: float


def short_progression_sum(
    chi: RealPrimitiveCharacter, Dp: int, b: int, M: int, N: int
) -> ShortSumReport:
    """sum_{M <= m < M+N} chi(m D' + b); |sum| <= D/D' exactly.

    Complete blocks of length D/D' vanish, so only the <= D/D' leftover
    unit terms can contribute.
    """
    D = chi.modulus
    if Dp <= 0 or D % Dp != 0 or Dp >= D:
        raise ValueError(f"D' = {Dp} is not a proper divisor of D = {D}")
    ms = np.arange(M, M + N)
    total = int(chi.values[(ms * Dp + b) % D].sum())
    bound = D // Dp
    return ShortSumReport(value=total, bound=bound, ratio=abs(total) * Dp / D)
