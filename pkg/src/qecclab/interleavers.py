"""Qubit interleavers and their spread / dispersion metrics.

Permutations are 0-based: ``perm[i]`` is the input position read into
output position ``i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from sympy import factorint, isprime

from .channels import DomainError
from .pauli import PauliString

JPL_PRIMES = (31, 37, 43, 47, 53, 59, 61, 67)


class InterleaverError(RuntimeError):
    """Construction did not produce a valid permutation."""

    def __init__(self, message: str, attempts: int | None = None):
        super().__init__(message)
        self.attempts = attempts


@dataclass(frozen=True, eq=False)
class Permutation:
    perm: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.perm, dtype=np.int64)
        n = p.size
        if p.ndim != 1 or (n and (p.min() < 0 or p.max() >= n)) or np.unique(p).size != n:
            raise InterleaverError("mapping is not a bijection on 0..N-1")
        p.setflags(write=False)
        object.__setattr__(self, "perm", p)

    @property
    def N(self) -> int:
        return int(self.perm.size)

    def __len__(self) -> int:
        return self.N

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.perm, other.perm)

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.N)
        return Permutation(inv)

    def to_file(self, path: str | Path) -> None:
        Path(path).write_text(f"{self.N}\n" + " ".join(map(str, self.perm.tolist())) + "\n")

    @classmethod
    def from_file(cls, path: str | Path) -> "Permutation":
        tokens = Path(path).read_text().split()
        if not tokens:
            raise InterleaverError("empty permutation file")
        n = int(tokens[0])
        targets = [int(t) for t in tokens[1:]]
        if len(targets) != n:
            raise InterleaverError(f"header says N={n} but {len(targets)} targets follow")
        return cls(np.array(targets, dtype=np.int64))


def identity_interleaver(N: int) -> Permutation:
    return Permutation(np.arange(N))


def random_interleaver(N: int, rng: np.random.Generator) -> Permutation:
    return Permutation(rng.permutation(N))


def _fits(out: np.ndarray, filled: int, pos: int, val: int, S: int) -> bool:
    lo, hi = max(0, pos - S), min(filled, pos + S + 1)
    for k in range(lo, hi):
        if k != pos and abs(int(out[k]) - val) <= S:
            return False
    return True


def s_random(N: int, S: int, rng: np.random.Generator, max_restarts: int = 100) -> Permutation:
    """Randomized greedy S-random construction.

    Position ``i`` takes the first remaining input (in random order) that
    keeps every earlier neighbour within ``S`` more than ``S`` away.  At a
    dead end a random remaining value is swapped with a random earlier
    position when both placements stay valid; after ``10*N`` stalled
    attempts the construction restarts from scratch.
    """
    if N < 1 or S < 0:
        raise DomainError("need N >= 1 and S >= 0")
    for attempt in range(1, max_restarts + 1):
        remaining = list(rng.permutation(N))
        out = np.full(N, -1, dtype=np.int64)
        stalls = 0
        i = 0
        while i < N and stalls < 10 * N:
            forbidden = np.zeros(N, dtype=bool)
            for v in out[max(0, i - S):i]:
                forbidden[max(0, v - S):v + S + 1] = True
            allowed = ~forbidden[remaining]
            if allowed.any():
                k = int(np.argmax(allowed))
                out[i] = remaining.pop(k)
                i += 1
                continue
            stalls += 1
            k = int(rng.integers(len(remaining)))
            j = int(rng.integers(i))
            v, u = int(remaining[k]), int(out[j])
            out[j] = v
            if _fits(out, i, j, v, S):
                out[i] = u
                if _fits(out, i + 1, i, u, S):
                    remaining.pop(k)
                    i += 1
                    continue
                out[i] = -1
            out[j] = u
        if i == N:
            return Permutation(out)
    raise InterleaverError(f"S-random construction failed for N={N}, S={S}", attempts=max_restarts)


def is_primitive_root(alpha: int, p: int) -> bool:
    if not isprime(p):
        return False
    if alpha % p == 0:
        return False
    order = p - 1
    return all(pow(alpha, order // q, p) != 1 for q in factorint(order))


def welch_costas(N: int, alpha: int) -> Permutation:
    """pi(i) = (alpha^i mod (N+1)) - 1 for i = 0..N-1."""
    p = N + 1
    if not isprime(p):
        raise DomainError(f"N+1={p} is not prime")
    if not is_primitive_root(alpha, p):
        raise DomainError(f"alpha={alpha} is not a primitive root modulo {p}")
    out = np.empty(N, dtype=np.int64)
    v = 1
    for i in range(N):
        out[i] = v - 1
        v = v * alpha % p
    return Permutation(out)


def jpl(N: int, k1: int = 8) -> Permutation:
    """Interleaver from the JPL turbo-code recurrence."""
    if k1 < 2 or k1 % 2 or N % k1:
        raise DomainError(f"k1={k1} must be even and divide N={N}")
    k2 = N // k1
    half = k1 // 2
    out = np.empty(N, dtype=np.int64)
    for s in range(1, N + 1):
        m = (s - 1) % 2
        i = (s - 1) // (2 * k2)
        j = (s - 1) // 2 - i * k2
        t = (19 * i + 1) % half
        q = t % 8 + 1
        c = (JPL_PRIMES[q - 1] * j + 21 * m) % k2
        out[s - 1] = 2 * (t + c * half + 1) - m - 1
    try:
        return Permutation(out)
    except InterleaverError:
        raise InterleaverError(f"JPL recurrence is not a bijection for N={N}, k1={k1}") from None


def spread(p: Permutation, open_lag: bool = False) -> int:
    """Largest s with |pi(i)-pi(j)| >= s whenever 0 < |i-j| <= s.

    ``open_lag=True`` uses the alternative convention 0 < |i-j| < s, which
    scores one higher on structured permutations such as JPL.
    """
    perm = p.perm
    n = perm.size
    running = math.inf
    s = 1 if open_lag else 0
    for k in range(1, n):
        running = min(running, int(np.abs(perm[k:] - perm[:-k]).min()))
        target = k + 1 if open_lag else k
        if running < target:
            break
        s = target
    return s


def dispersion(p: Permutation) -> float:
    """Fraction of distinct displacement vectors among all C(N,2) pairs."""
    perm = p.perm
    n = perm.size
    if n < 2:
        raise DomainError("dispersion needs N >= 2")
    width = 2 * n
    codes = np.concatenate(
        [k * width + (perm[k:] - perm[:-k] + n) for k in range(1, n)]
    )
    return float(np.unique(codes).size / (n * (n - 1) // 2))


def apply_interleaver(p: Permutation, e: PauliString) -> PauliString:
    """Output qubit i carries input qubit pi(i)."""
    if p.N != e.n:
        raise ValueError(f"permutation length {p.N} differs from {e.n} qubits")
    codes = e.codes()
    return PauliString.from_codes(codes[p.perm])


def deinterleave(p: Permutation, e: PauliString) -> PauliString:
    return apply_interleaver(p.inverse(), e)
