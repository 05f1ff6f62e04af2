"""Kitaev toric code on a d x d torus with minimum-weight matching decoding.

Qubits sit on edges.  Horizontal edge (r, c) has index r*d + c and joins
vertices (r, c), (r, c+1); vertical edge (r, c) has index d*d + r*d + c and
joins vertices (r, c), (r+1, c).  Vertex operators are X-type, plaquette
operators Z-type, so Z errors light up vertices and X errors plaquettes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from ._kernels import _pykernels as _ref
from ._kernels import EXACT_FLAG, decode_toric_batch
from .pauli import PauliString, gf2_rank, packed, symplectic_product


class Outcome(str, Enum):
    SUCCESS = "success"
    X_FAILURE = "X-failure"
    Z_FAILURE = "Z-failure"
    Y_FAILURE = "Y-failure"

    @classmethod
    def from_code(cls, code: int) -> "Outcome":
        return (cls.SUCCESS, cls.X_FAILURE, cls.Z_FAILURE, cls.Y_FAILURE)[int(code)]


def h_edge(r: int, c: int, d: int) -> int:
    return (r % d) * d + (c % d)


def v_edge(r: int, c: int, d: int) -> int:
    return d * d + (r % d) * d + (c % d)


def _mask_string(n: int, qubits: Sequence[int], kind: str) -> PauliString:
    bits = 0
    for q in qubits:
        bits ^= 1 << q
    return PauliString(n, z=bits) if kind == "Z" else PauliString(n, x=bits)


@dataclass(frozen=True)
class ToricCode:
    d: int
    vertex_ops: tuple[PauliString, ...] = field(repr=False)
    plaquette_ops: tuple[PauliString, ...] = field(repr=False)
    logicals: dict[str, PauliString] = field(repr=False)

    @property
    def n(self) -> int:
        return 2 * self.d * self.d

    @property
    def k(self) -> int:
        return 2

    def stabilizers(self) -> tuple[PauliString, ...]:
        return self.vertex_ops + self.plaquette_ops

    def stabilizer_rank(self) -> int:
        return gf2_rank(packed(s) for s in self.stabilizers())


def build_toric(d: int) -> ToricCode:
    if d < 2:
        raise ValueError("toric code needs d >= 2")
    n = 2 * d * d
    vertex, plaquette = [], []
    for r in range(d):
        for c in range(d):
            vq = (h_edge(r, c, d), h_edge(r, c - 1, d), v_edge(r, c, d), v_edge(r - 1, c, d))
            pq = (h_edge(r, c, d), h_edge(r + 1, c, d), v_edge(r, c, d), v_edge(r, c + 1, d))
            vertex.append(_mask_string(n, vq, "X"))
            plaquette.append(_mask_string(n, pq, "Z"))
    logicals = {
        "Z1": _mask_string(n, [h_edge(0, c, d) for c in range(d)], "Z"),
        "Z2": _mask_string(n, [v_edge(r, 0, d) for r in range(d)], "Z"),
        "X1": _mask_string(n, [h_edge(r, 0, d) for r in range(d)], "X"),
        "X2": _mask_string(n, [v_edge(0, c, d) for c in range(d)], "X"),
    }
    return ToricCode(d, tuple(vertex), tuple(plaquette), logicals)


@dataclass(frozen=True)
class DefectSet:
    kind: str  # "vertex" or "plaquette"
    coords: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.coords)


def toric_syndrome(code: ToricCode, e: PauliString) -> tuple[DefectSet, DefectSet]:
    """Vertex and plaquette defects of ``e``, listed in row-major order."""
    if e.n != code.n:
        raise ValueError(f"error acts on {e.n} qubits, code has {code.n}")
    d = code.d
    coords = [(r, c) for r in range(d) for c in range(d)]
    vert = tuple(rc for rc, s in zip(coords, code.vertex_ops) if symplectic_product(s, e))
    plaq = tuple(rc for rc, s in zip(coords, code.plaquette_ops) if symplectic_product(s, e))
    return DefectSet("vertex", vert), DefectSet("plaquette", plaq)


def defect_weights(code: ToricCode, defects: DefectSet) -> np.ndarray:
    return _ref.distance_matrix(list(defects.coords), code.d)


def mwpm_decode(code: ToricCode, defects: DefectSet) -> PauliString:
    """Correction for one defect type: Z paths for vertices, X paths for plaquettes."""
    if len(defects) % 2:
        raise RuntimeError(f"odd number of {defects.kind} defects ({len(defects)})")
    dual = defects.kind == "plaquette"
    edges = _ref.match_defects(list(defects.coords), code.d, dual=dual)
    bits = 0
    for q in edges:
        bits ^= 1 << q
    return PauliString(code.n, x=bits) if dual else PauliString(code.n, z=bits)


def matching_weight(code: ToricCode, defects: DefectSet) -> float:
    return _ref.min_weight_matching(defect_weights(code, defects))[0]


def matching_bruteforce(weights) -> tuple[float, list[tuple[int, int]]]:
    """Exhaustive minimum over all perfect matchings (at most 12 nodes)."""
    w = np.asarray(weights, dtype=float)
    m = w.shape[0]
    if m % 2 or m > 12:
        raise ValueError("brute force needs an even node count of at most 12")

    def rec(nodes: tuple[int, ...]):
        if not nodes:
            return 0.0, []
        first, rest = nodes[0], nodes[1:]
        best = (float("inf"), [])
        for idx, partner in enumerate(rest):
            sub_w, sub_p = rec(rest[:idx] + rest[idx + 1:])
            total = w[first, partner] + sub_w
            if total < best[0]:
                best = (total, [(first, partner)] + sub_p)
        return best

    return rec(tuple(range(m)))


def count_matchings(m: int) -> int:
    """(m-1)!! perfect matchings on m nodes."""
    return int(np.prod(np.arange(m - 1, 0, -2))) if m else 1


def decode(code: ToricCode, e: PauliString) -> PauliString:
    vert, plaq = toric_syndrome(code, e)
    return mwpm_decode(code, vert) * mwpm_decode(code, plaq)


def logical_failure(code: ToricCode, true_error: PauliString, correction: PauliString) -> Outcome:
    residual = true_error * correction
    vert, plaq = toric_syndrome(code, residual)
    if len(vert) or len(plaq):
        raise ValueError("residual has a non-trivial syndrome")
    lg = code.logicals
    x_fail = symplectic_product(residual, lg["Z1"]) or symplectic_product(residual, lg["Z2"])
    z_fail = symplectic_product(residual, lg["X1"]) or symplectic_product(residual, lg["X2"])
    return Outcome.from_code(int(bool(x_fail)) + 2 * int(bool(z_fail)))


def decode_codes(d: int, codes: np.ndarray) -> np.ndarray:
    """Outcome codes (0 success, 1 X, 2 Z, 3 Y) for a batch of per-qubit Pauli codes."""
    return decode_toric_batch(np.asarray(codes, dtype=np.uint8), d) & 3


def decode_codes_full(d: int, codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Outcome codes and a flag for corrections that differ from the error."""
    raw = decode_toric_batch(np.asarray(codes, dtype=np.uint8), d)
    return raw & 3, (raw & EXACT_FLAG) != 0


def single_type_errors(d: int, weight: int, kind: str):
    """All errors of one Pauli type and the given weight."""
    n = 2 * d * d
    for qubits in itertools.combinations(range(n), weight):
        yield _mask_string(n, qubits, kind)
