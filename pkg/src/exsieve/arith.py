"""Sieve-backed tables of the classical arithmetic functions.

Everything downstream (characters, L-values, sieve weights, the psi
decomposition) factors integers through a single smallest-prime-factor
table and consumes the function tables built here.  Tables are plain
numpy arrays indexed by n (index 0 unused), immutable after
construction, and safe to share across workers.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "FactorTable",
    "ArithSequence",
    "SiftedPsi",
    "build_factor_table",
    "von_mangoldt",
    "arith_table",
    "dirichlet_convolve",
    "psi_progression",
    "sifted_psi_progression",
    "rough_mask",
    "coprime_mask",
    "save_factor_table",
    "load_factor_table",
    "cache_path_for",
    "cached_factor_table",
]

# A 10**8-entry table (uint32) needs ~400 MB plus transient sieve masks;
# that is the supported ceiling on a desk machine.
MAX_TABLE_LIMIT = 200_000_000

CACHE_MAGIC = b"XSPF1\x00"
CACHE_ENV = "EXSIEVE_CACHE_DIR"


@dataclass(frozen=True)
class FactorTable:
    """Smallest-prime-factor table for 2 <= n <= limit.

    spf[n] is the smallest prime factor of n; spf[0] = spf[1] = 0 is the
    "none" sentinel.  Repeated division by spf recovers the full
    factorization of any n <= limit.
    """

    limit: int
    spf: np.ndarray
    _derived: dict = field(default_factory=dict, repr=False, compare=False)

    def smallest_prime_factor(self, n: int) -> int:
        self._check_range(n)
        return int(self.spf[n])

    def is_prime(self, n: int) -> bool:
        self._check_range(n)
        return n >= 2 and int(self.spf[n]) == n

    def factorize(self, n: int) -> list[tuple[int, int]]:
        """Prime factorization of n as [(p, e), ...] with p ascending."""
        self._check_range(n)
        out: list[tuple[int, int]] = []
        while n > 1:
            p = int(self.spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def divisors(self, n: int) -> list[int]:
        """All positive divisors of n, ascending."""
        divs = [1]
        for p, e in self.factorize(n):
            pk = 1
            block = list(divs)
            for _ in range(e):
                pk *= p
                divs.extend(d * pk for d in block)
        return sorted(divs)

    def primes(self, upto: int | None = None) -> np.ndarray:
        """Primes <= upto (default: <= limit), as an int64 array."""
        if upto is None:
            upto = self.limit
        self._check_range(upto)
        key = "primes"
        if key not in self._derived:
            ns = np.arange(self.limit + 1, dtype=np.int64)
            self._derived[key] = ns[self.spf == ns][1:]  # drop n = 0
        ps = self._derived[key]
        return ps[: np.searchsorted(ps, upto, side="right")]

    def _check_range(self, n: int) -> None:
        if not (0 <= n <= self.limit):
            raise ValueError(f"n = {n} outside table range [0, {self.limit}]")


def build_factor_table(limit: int) -> FactorTable:
    """Sieve the smallest prime factor of every n <= limit.

    Deterministic: two builds with the same limit are byte-identical.
    """
    if limit < 2:
        raise ValueError(f"table limit must be >= 2, got {limit}")
    if limit > MAX_TABLE_LIMIT:
        raise MemoryError(
            f"table limit {limit} exceeds supported maximum {MAX_TABLE_LIMIT} "
            f"(would need {4 * (limit + 1)} bytes)"
        )
    try:
        spf = np.zeros(limit + 1, dtype=np.uint32)
    except MemoryError as exc:
        raise MemoryError(
            f"cannot allocate {4 * (limit + 1)} bytes for spf table"
        ) from exc
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            sl = spf[p * p :: p]
            sl[sl == 0] = p
    ns = np.arange(limit + 1, dtype=np.uint32)
    unmarked = spf == 0
    unmarked[:2] = False
    spf[unmarked] = ns[unmarked]
    spf.setflags(write=False)
    return FactorTable(limit=limit, spf=spf)


@dataclass(frozen=True)
class ArithSequence:
    """Values of an arithmetic function on 1..N (index 0 unused)."""

    kind: str
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def limit(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]


def von_mangoldt(n: int, table: FactorTable) -> float:
    """Lambda(n): log p if n is a prime power p^k, else 0."""
    table._check_range(n)
    if n < 2:
        return 0.0
    p = int(table.spf[n])
    while n % p == 0:
        n //= p
    return math.log(p) if n == 1 else 0.0


def _lambda_values(N: int, table: FactorTable) -> np.ndarray:
    vals = np.zeros(N + 1)
    for p in table.primes(N):
        p = int(p)
        lp = math.log(p)
        pk = p
        while pk <= N:
            vals[pk] = lp
            pk *= p
    return vals


def _mu_values(N: int, table: FactorTable) -> np.ndarray:
    vals = np.ones(N + 1, dtype=np.int64)
    for p in table.primes(N):
        p = int(p)
        vals[p::p] *= -1
        sq = p * p
        if sq <= N:
            vals[sq::sq] = 0
    vals[0] = 0
    return vals


def _phi_values(N: int, table: FactorTable) -> np.ndarray:
    vals = np.arange(N + 1, dtype=np.int64)
    for p in table.primes(N):
        p = int(p)
        vals[p::p] -= vals[p::p] // p
    vals[0] = 0
    return vals


def _tau_values(N: int) -> np.ndarray:
    vals = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        vals[d::d] += 1
    return vals


def _tau3_values(N: int) -> np.ndarray:
    tau = _tau_values(N)
    vals = np.zeros(N + 1, dtype=np.int64)
    for d in range(1, N + 1):
        vals[d :: d] += tau[1 : N // d + 1]
    return vals


_ARITH_BUILDERS = {
    "Lambda": lambda N, t: _lambda_values(N, t),
    "mu": lambda N, t: _mu_values(N, t),
    "phi": lambda N, t: _phi_values(N, t),
    "tau": lambda N, t: _tau_values(N),
    "tau3": lambda N, t: _tau3_values(N),
}


def arith_table(kind: str, N: int, table: FactorTable) -> ArithSequence:
    """Table of a named classical function on 1..N.

    kind is one of "Lambda", "mu", "phi", "tau", "tau3".  All are driven
    by the prime list of the factor table; total work is O(N log N).
    """
    if kind not in _ARITH_BUILDERS:
        raise ValueError(f"unknown arithmetic function kind {kind!r}")
    table._check_range(N)
    return ArithSequence(kind=kind, values=_ARITH_BUILDERS[kind](N, table))


def dirichlet_convolve(f: ArithSequence, g: ArithSequence, N: int) -> ArithSequence:
    """Dirichlet convolution (f*g)(n) = sum_{ab=n} f(a) g(b) on 1..N.

    Iterates the divisor double loop over the sparser factor, so
    convolving against Lambda or a sieve weight costs only the support.
    """
    if f.limit < N or g.limit < N:
        raise ValueError(
            f"inputs defined up to {f.limit} and {g.limit}, need {N}"
        )
    fa, ga = f.values, g.values
    # count nonzero entries to pick the cheaper outer loop
    f_nz = np.count_nonzero(fa[: N + 1])
    g_nz = np.count_nonzero(ga[: N + 1])
    if g_nz < f_nz:
        fa, ga = ga, fa
    out = np.zeros(N + 1)
    nz = np.nonzero(fa[: N + 1])[0]
    for d in nz:
        d = int(d)
        if d == 0:
            continue
        out[d::d] += fa[d] * ga[1 : N // d + 1]
    return ArithSequence(kind=f"({f.kind}*{g.kind})", values=out)


def rough_mask(N: int, z: float, table: FactorTable) -> np.ndarray:
    """Boolean mask over 0..N: True where P^-(n) > z (n = 1 counts as rough)."""
    mask = np.ones(N + 1, dtype=bool)
    mask[0] = False
    for p in table.primes(min(N, int(z))):
        p = int(p)
        if p > z:
            break
        mask[p::p] = False
    return mask


def coprime_mask(N: int, q: int, table: FactorTable) -> np.ndarray:
    """Boolean mask over 0..N: True where gcd(n, q) = 1."""
    mask = np.ones(N + 1, dtype=bool)
    mask[0] = False
    n = q
    while n > 1:
        p = int(table.spf[n]) if n <= table.limit else None
        if p is None:
            # q beyond the table: fall back to trial division
            p = 2
            while n % p:
                p += 1
        while n % p == 0:
            n //= p
        if p <= N:
            mask[p::p] = False
    return mask


def psi_progression(x: float, q: int, a: int, table: FactorTable) -> float:
    """psi(x; q, a) = sum of Lambda(n) over n <= x, n = a mod q.

    Summed with error-free (fsum) accumulation.
    """
    if math.gcd(a, q) != 1:
        raise ValueError(f"a = {a} and q = {q} must be coprime")
    N = int(x)
    table._check_range(N)
    lam = _lambda_table_cached(N, table)
    start = a % q
    if start == 0:
        start = q
    return math.fsum(lam[start : N + 1 : q])


@dataclass(frozen=True)
class SiftedPsi:
    """Rough part of a Chebyshev progression sum plus its small-prime complement."""

    sifted: float        # sum of Lambda(n), n <= x, n = a mod q, P^-(n) > z
    small_prime: float   # sum of Lambda(n), n <= x, n = a mod q, P^-(n) <= z


def sifted_psi_progression(
    x: float, q: int, a: int, z: float, table: FactorTable
) -> SiftedPsi:
    """Split psi(x; q, a) into its z-rough part and small-prime complement."""
    if math.gcd(a, q) != 1:
        raise ValueError(f"a = {a} and q = {q} must be coprime")
    if not z < x:
        raise ValueError(f"need z < x, got z = {z}, x = {x}")
    N = int(x)
    table._check_range(N)
    lam = _lambda_table_cached(N, table)
    mask = rough_mask(N, z, table)
    sel = np.zeros(N + 1, dtype=bool)
    start = a % q
    if start == 0:
        start = q
    sel[start : N + 1 : q] = True
    sifted = math.fsum(lam[sel & mask])
    small = math.fsum(lam[sel & ~mask])
    return SiftedPsi(sifted=sifted, small_prime=small)


def _lambda_table_cached(N: int, table: FactorTable) -> np.ndarray:
    """Lambda values 0..N, cached on the table (grow-only)."""
    cached = table._derived.get("Lambda")
    if cached is None or len(cached) < N + 1:
        cached = _lambda_values(N, table)
        table._derived["Lambda"] = cached
    return cached[: N + 1]


# ---------------------------------------------------------------------------
# FactorTable persistence: magic "XSPF1\0", little-endian u64 limit,
# then spf entries as little-endian u32 (0 = sentinel).

def save_factor_table(table: FactorTable, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<Q", table.limit))
        fh.write(table.spf.astype("<u4", copy=False).tobytes())


def load_factor_table(path: str | Path) -> FactorTable:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(CACHE_MAGIC))
        if magic != CACHE_MAGIC:
            raise ValueError(f"cache file {path} is corrupt: bad magic {magic!r}")
        raw = fh.read(8)
        if len(raw) < 8:
            raise ValueError(f"cache file {path} is corrupt: truncated header")
        (limit,) = struct.unpack("<Q", raw)
        data = np.fromfile(fh, dtype="<u4")
    if len(data) != limit + 1:
        raise ValueError(
            f"cache file {path} is corrupt: expected {limit + 1} entries, "
            f"got {len(data)}"
        )
    spf = data.astype(np.uint32, copy=False)
    spf.setflags(write=False)
    return FactorTable(limit=int(limit), spf=spf)


def cache_path_for(limit: int, cache_dir: str | Path | None = None) -> Path | None:
    """Cache file path for a table of the given limit, or None if caching is off."""
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV)
    if not cache_dir:
        return None
    return Path(cache_dir) / f"spf_{limit}.xspf"


def cached_factor_table(limit: int, cache_dir: str | Path | None = None) -> FactorTable:
    """Build a factor table, round-tripping through the cache dir when set."""
    path = cache_path_for(limit, cache_dir)
    if path is not None and path.exists():
        return load_factor_table(path)
    table = build_factor_table(limit)
    if path is not None:
        save_factor_table(table, path)
    return table
