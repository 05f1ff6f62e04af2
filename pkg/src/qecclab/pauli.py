"""Binary symplectic representation of n-qubit Pauli operators.

Each single-qubit Pauli maps to a pair of bits ``(z|x)``::

    I -> (0|0)   X -> (0|1)   Y -> (1|1)   Z -> (1|0)

An n-qubit string is stored as two Python ints used as bit masks, bit ``i``
holding qubit ``i``.  The textual binary form lists all z bits first, then a
bar, then the x bits, e.g. ``IIXII`` <-> ``00000|00100``.  Phases are
dropped throughout, so multiplication is a plain XOR.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

LABELS = "IXYZ"
# label -> (z, x)
_LABEL_BITS = {"I": (0, 0), "X": (0, 1), "Y": (1, 1), "Z": (1, 0)}
# 2*z + x -> label
_BITS_LABEL = {0: "I", 1: "X", 3: "Y", 2: "Z"}


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli operator modulo phase.

    ``z`` and ``x`` are bit masks; bit ``i`` refers to qubit ``i``.
    """

    n: int
    z: int = 0
    x: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        limit = 1 << self.n
        if not (0 <= self.z < limit and 0 <= self.x < limit):
            raise ValueError(f"bit masks do not fit in {self.n} qubits")

    # -- constructors -----------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0)

    @classmethod
    def from_labels(cls, labels: Iterable[str] | str) -> "PauliString":
        labels = list(labels)
        z = x = 0
        for i, lab in enumerate(labels):
            try:
                zb, xb = _LABEL_BITS[lab.upper()]
            except (KeyError, AttributeError):
                raise ValueError(f"unknown Pauli label {lab!r} at position {i}") from None
            z |= zb << i
            x |= xb << i
        return cls(len(labels), z, x)

    @classmethod
    def from_bits(cls, z_bits: Sequence[int], x_bits: Sequence[int]) -> "PauliString":
        if len(z_bits) != len(x_bits):
            raise ValueError("z and x parts must have the same length")
        z = x = 0
        for i, (zb, xb) in enumerate(zip(z_bits, x_bits)):
            if zb not in (0, 1) or xb not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            z |= int(zb) << i
            x |= int(xb) << i
        return cls(len(z_bits), z, x)

    @classmethod
    def from_binary(cls, text: str) -> "PauliString":
        """Parse ``"zzzzz|xxxxx"``."""
        try:
            zs, xs = text.strip().split("|")
        except ValueError:
            raise ValueError(f"binary Pauli form needs exactly one '|': {text!r}") from None
        if len(zs) != len(xs) or set(zs + xs) - {"0", "1"}:
            raise ValueError(f"malformed binary Pauli string {text!r}")
        return cls.from_bits([int(c) for c in zs], [int(c) for c in xs])

    @classmethod
    def from_codes(cls, codes: Sequence[int]) -> "PauliString":
        """Build from per-qubit codes 0..3 meaning I, X, Y, Z."""
        return cls.from_labels(LABELS[int(c)] for c in codes)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Accept either the label form or the binary form."""
        return cls.from_binary(text) if "|" in text else cls.from_labels(text.strip())

    # -- views ------------------------------------------------------------

    @property
    def z_bits(self) -> list[int]:
        return [(self.z >> i) & 1 for i in range(self.n)]

    @property
    def x_bits(self) -> list[int]:
        return [(self.x >> i) & 1 for i in range(self.n)]

    def labels(self) -> str:
        return "".join(
            _BITS_LABEL[2 * ((self.z >> i) & 1) + ((self.x >> i) & 1)] for i in range(self.n)
        )

    def binary(self) -> str:
        return "".join(map(str, self.z_bits)) + "|" + "".join(map(str, self.x_bits))

    def codes(self) -> np.ndarray:
        """Per-qubit codes 0..3 (I, X, Y, Z)."""
        out = np.zeros(self.n, dtype=np.uint8)
        for i, lab in enumerate(self.labels()):
            out[i] = LABELS.index(lab)
        return out

    def vector(self) -> np.ndarray:
        """Length-2n GF(2) vector in (z|x) layout."""
        return np.array(self.z_bits + self.x_bits, dtype=np.uint8)

    def __str__(self) -> str:
        return self.labels()

    def __len__(self) -> int:
        return self.n

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)

    @property
    def weight(self) -> int:
        return weight(self)

    def is_identity(self) -> bool:
        return self.z == 0 and self.x == 0


def _check_same_n(a: PauliString, b: PauliString) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit counts differ: {a.n} != {b.n}")


def pauli_to_symplectic(labels: Iterable[str] | str) -> PauliString:
    return PauliString.from_labels(labels)


def symplectic_to_pauli(p: PauliString) -> str:
    return p.labels()


def symplectic_product(u: PauliString, v: PauliString) -> int:
    """Return 0 if ``u`` and ``v`` commute, 1 otherwise."""
    _check_same_n(u, v)
    return ((u.z & v.x) ^ (v.z & u.x)).bit_count() & 1


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    _check_same_n(a, b)
    return PauliString(a.n, a.z ^ b.z, a.x ^ b.x)


def weight(p: PauliString) -> int:
    return (p.z | p.x).bit_count()


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Stabilizer generators stacked as rows of a (n-k) x 2n binary matrix."""

    rows: tuple[PauliString, ...]
    n: int
    k: int

    def __post_init__(self):
        if any(r.n != self.n for r in self.rows):
            raise ValueError("every generator must act on n qubits")
        if len(self.rows) != self.n - self.k:
            raise ValueError("need exactly n-k generators")
        for i, a in enumerate(self.rows):
            for b in self.rows[i + 1:]:
                if symplectic_product(a, b):
                    raise ValueError(f"generators {a} and {b} do not commute")

    @classmethod
    def from_labels(cls, generators: Sequence[str], k: int | None = None) -> "ParityCheckMatrix":
        rows = tuple(PauliString.from_labels(g) for g in generators)
        n = rows[0].n
        return cls(rows, n, n - len(rows) if k is None else k)

    def matrix(self) -> np.ndarray:
        return np.array([r.vector() for r in self.rows], dtype=np.uint8)


def syndrome(h: ParityCheckMatrix, e: PauliString) -> tuple[int, ...]:
    if e.n != h.n:
        raise ValueError(f"error acts on {e.n} qubits, code has {h.n}")
    return tuple(symplectic_product(row, e) for row in h.rows)


def gf2_rank(vectors: Iterable[int]) -> int:
    """Rank over GF(2) of integers interpreted as bit vectors."""
    basis: list[int] = []  # kept sorted descending, distinct leading bits
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def packed(p: PauliString) -> int:
    """Pack ``(z|x)`` into one int: x in the low n bits, z above."""
    return (p.z << p.n) | p.x


def in_span(generators: Sequence[PauliString], p: PauliString) -> bool:
    """True if ``p`` is a product of ``generators`` (phases ignored)."""
    gens = [packed(g) for g in generators]
    return gf2_rank(gens + [packed(p)]) == gf2_rank(gens)
