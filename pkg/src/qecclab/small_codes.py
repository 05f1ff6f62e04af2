"""Small stabilizer codes decoded by exhaustive enumeration.

Every one of the 4^n Pauli errors is tabulated once per code with its
syndrome index and its logical class.  Errors sharing a syndrome fall into
4^k cosets of the stabilizer group; the class label is the vector of
symplectic products with the logical operators, so two errors with the same
syndrome differ by a stabilizer exactly when their labels agree.

Syndrome index: the first generator is the most significant bit, so the
syndrome (1, 1, 0, 1) has index 13.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .channels import PauliChannelParams
from .pauli import (
    LABELS,
    ParityCheckMatrix,
    PauliString,
    in_span,
    packed,
    symplectic_product,
    syndrome,
)

MAX_ENUM_QUBITS = 10

FIVE_QUBIT_GENERATORS = ("ZZZZI", "ZXYIZ", "XXXXI", "XYZIX")


def _unpack(v: int, n: int) -> PauliString:
    return PauliString(n, z=v >> n, x=v & ((1 << n) - 1))


def _sp_packed(a: int, b: int, n: int) -> int:
    mask = (1 << n) - 1
    return (((a >> n) & (b & mask)) ^ ((b >> n) & (a & mask))).bit_count() & 1


def _gf2_basis(vectors: list[int]) -> list[int]:
    """Reduced basis with distinct leading bits."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def normalizer_basis(h: ParityCheckMatrix) -> list[int]:
    """Basis (packed ints) of all Paulis commuting with every generator."""
    n = h.n
    rows = [packed(r) for r in h.rows]
    # solve rows . Lambda v = 0 by elimination on the swapped-halves matrix
    mask = (1 << n) - 1
    swapped = [((r & mask) << n) | (r >> n) for r in rows]
    pivots: dict[int, int] = {}
    reduced: list[int] = []
    for r in swapped:
        for col, prow in pivots.items():
            if (r >> col) & 1:
                r ^= prow
        if r:
            col = r.bit_length() - 1
            for c2 in list(pivots):
                if (pivots[c2] >> col) & 1:
                    pivots[c2] ^= r
            pivots[col] = r
            reduced.append(r)
    free = [c for c in range(2 * n) if c not in pivots]
    basis = []
    for f in free:
        v = 1 << f
        for col, prow in pivots.items():
            if (prow >> f) & 1:
                v |= 1 << col
        basis.append(v)
    return basis


def find_logicals(h: ParityCheckMatrix) -> tuple[tuple[PauliString, ...], tuple[PauliString, ...]]:
    """Symplectic pairs (X_j, Z_j) spanning the normalizer modulo the stabilizer."""
    n = h.n
    stab = _gf2_basis([packed(r) for r in h.rows])
    pool = []
    span = list(stab)
    for v in normalizer_basis(h):
        if len(_gf2_basis(span + [v])) > len(span):
            span.append(v)
            pool.append(v)
    xs: list[int] = []
    zs: list[int] = []
    while pool:
        a = pool.pop(0)
        partner = next((b for b in pool if _sp_packed(a, b, n)), None)
        if partner is None:
            raise ValueError("normalizer complement is not symplectic")
        pool.remove(partner)
        # make the remaining vectors commute with the new pair
        rest = []
        for c in pool:
            if _sp_packed(c, partner, n):
                c ^= a
            if _sp_packed(c, a, n):
                c ^= partner
            rest.append(c)
        pool = rest
        xs.append(a)
        zs.append(partner)
    if len(xs) != h.k:
        raise ValueError(f"found {len(xs)} logical pairs, expected k={h.k}")
    return tuple(_unpack(v, n) for v in xs), tuple(_unpack(v, n) for v in zs)


@dataclass(frozen=True, eq=False)
class StabilizerCode:
    H: ParityCheckMatrix
    logical_x: tuple[PauliString, ...]
    logical_z: tuple[PauliString, ...]
    lookup: dict[tuple[int, ...], PauliString] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.H.n

    @property
    def k(self) -> int:
        return self.H.k

    @property
    def n_syndromes(self) -> int:
        return 1 << (self.n - self.k)

    def logicals(self) -> tuple[PauliString, ...]:
        return self.logical_x + self.logical_z

    @cached_property
    def table(self) -> "ErrorTable":
        return ErrorTable.build(self)


def syndrome_index(s) -> int:
    idx = 0
    for bit in s:
        idx = (idx << 1) | int(bit)
    return idx


def syndrome_bits(idx: int, m: int) -> tuple[int, ...]:
    idx = int(idx)
    return tuple((idx >> (m - 1 - i)) & 1 for i in range(m))


def logical_label(code: StabilizerCode, e: PauliString) -> int:
    """Bits (Z-logical products then X-logical products) packed into an int."""
    label = 0
    for lz in code.logical_z:
        label = (label << 1) | symplectic_product(e, lz)
    for lx in code.logical_x:
        label = (label << 1) | symplectic_product(e, lx)
    return label


@dataclass(frozen=True, eq=False)
class ErrorTable:
    """All 4^n errors; index = sum codes[i] * 4**i with codes 0..3 = I, X, Y, Z."""

    codes: np.ndarray  # (4^n, n) uint8
    syn: np.ndarray  # syndrome index per error
    label: np.ndarray  # logical class per error
    weight: np.ndarray

    @classmethod
    def build(cls, code: StabilizerCode) -> "ErrorTable":
        n = code.n
        if n > MAX_ENUM_QUBITS:
            raise ValueError(f"enumeration limited to n <= {MAX_ENUM_QUBITS}")
        idx = np.arange(4**n)
        codes = ((idx[:, None] // (4 ** np.arange(n))[None, :]) % 4).astype(np.uint8)
        z = ((codes == 2) | (codes == 3)).astype(np.int64)
        x = ((codes == 1) | (codes == 2)).astype(np.int64)

        def products(ops):
            cols = []
            for op in ops:
                oz = np.array(op.z_bits, dtype=np.int64)
                ox = np.array(op.x_bits, dtype=np.int64)
                cols.append(((z @ ox) + (x @ oz)) % 2)
            return cols

        syn = np.zeros(idx.size, dtype=np.int64)
        for col in products(code.H.rows):
            syn = (syn << 1) | col
        label = np.zeros(idx.size, dtype=np.int64)
        for col in products(code.logical_z + code.logical_x):
            label = (label << 1) | col
        weight = (codes != 0).sum(axis=1)
        return cls(codes, syn, label, weight)

    def probabilities(self, params: PauliChannelParams) -> np.ndarray:
        p = params.as_array()
        return np.prod(p[self.codes], axis=1)


def error_index(codes) -> np.ndarray:
    """Table index of per-qubit code arrays, shape (..., n)."""
    codes = np.asarray(codes, dtype=np.int64)
    return (codes * (4 ** np.arange(codes.shape[-1]))).sum(axis=-1)


def _bit_pattern_key(e: PauliString) -> str:
    return e.binary()


def build_lookup(h: ParityCheckMatrix) -> dict[tuple[int, ...], PauliString]:
    """Minimum-weight representative per syndrome, lexicographic (z|x) tie-break."""
    n = h.n
    best: dict[tuple[int, ...], PauliString] = {}
    for i in range(4**n):
        codes = [(i // 4**q) % 4 for q in range(n)]
        e = PauliString.from_codes(codes)
        s = syndrome(h, e)
        cur = best.get(s)
        if cur is None or (e.weight, _bit_pattern_key(e)) < (cur.weight, _bit_pattern_key(cur)):
            best[s] = e
    if len(best) != 1 << (n - h.k):
        raise ValueError("some syndromes have no representative")
    return best


def make_code(generators, k: int | None = None) -> StabilizerCode:
    h = ParityCheckMatrix.from_labels(generators, k)
    lx, lz = find_logicals(h)
    return StabilizerCode(h, lx, lz, build_lookup(h))


def five_qubit_code() -> StabilizerCode:
    return make_code(FIVE_QUBIT_GENERATORS)


def decode_lookup(code: StabilizerCode, s) -> PauliString:
    s = tuple(int(b) for b in s)
    if len(s) != code.n - code.k:
        raise ValueError(f"syndrome must have {code.n - code.k} bits")
    return code.lookup[s]


def posterior_marginals(code: StabilizerCode, s, params: PauliChannelParams) -> np.ndarray:
    """P(E_i = g | s) as an (n, 4) array, columns ordered I, X, Y, Z."""
    return all_posterior_marginals(code, params)[syndrome_index(s)]


def all_posterior_marginals(code: StabilizerCode, params: PauliChannelParams) -> np.ndarray:
    """Marginals for every syndrome at once, shape (2^(n-k), n, 4)."""
    t = code.table
    w = t.probabilities(params)
    ns, n = code.n_syndromes, code.n
    out = np.zeros((ns, n, 4))
    for g in range(4):
        for i in range(n):
            sel = t.codes[:, i] == g
            out[:, i, g] = np.bincount(t.syn[sel], weights=w[sel], minlength=ns)
    total = out[:, 0, :].sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        out /= total[:, None, None]
    return out


def coset_probabilities(code: StabilizerCode, params: PauliChannelParams) -> np.ndarray:
    """Summed probability of each (syndrome, logical class) coset."""
    t = code.table
    w = t.probabilities(params)
    n_cls = 4**code.k
    flat = np.bincount(t.syn * n_cls + t.label, weights=w, minlength=code.n_syndromes * n_cls)
    return flat.reshape(code.n_syndromes, n_cls)


def dqmld_classes(code: StabilizerCode, params: PauliChannelParams) -> np.ndarray:
    """Most probable logical class per syndrome (lowest label on ties)."""
    return np.argmax(coset_probabilities(code, params), axis=1)


def qmld_errors(code: StabilizerCode, params: PauliChannelParams) -> np.ndarray:
    """Table index of the single most probable error per syndrome."""
    t = code.table
    w = t.probabilities(params)
    order = np.lexsort((np.arange(w.size), -w, t.syn))
    first = np.r_[True, t.syn[order][1:] != t.syn[order][:-1]]
    return order[first]


def decode_dqmld(code: StabilizerCode, s, params: PauliChannelParams) -> tuple[int, PauliString]:
    """Most probable logical class and a correction in that coset."""
    si = syndrome_index(s)
    cls = int(dqmld_classes(code, params)[si])
    t = code.table
    w = t.probabilities(params)
    members = np.flatnonzero((t.syn == si) & (t.label == cls))
    best = int(members[np.argmax(w[members])])
    return cls, PauliString.from_codes(t.codes[best])


def decode_qmld(code: StabilizerCode, s, params: PauliChannelParams) -> PauliString:
    idx = int(qmld_errors(code, params)[syndrome_index(s)])
    return PauliString.from_codes(code.table.codes[idx])


def is_degenerate_success(code: StabilizerCode, true_error: PauliString, correction: PauliString) -> bool:
    return in_span(code.H.rows, true_error * correction)


def lookup_indices(code: StabilizerCode) -> np.ndarray:
    """Table index of the lookup representative per syndrome index."""
    m = code.n - code.k
    out = np.empty(code.n_syndromes, dtype=np.int64)
    for si in range(code.n_syndromes):
        rep = code.lookup[syndrome_bits(si, m)]
        out[si] = error_index(rep.codes())
    return out


def batch_outcomes(
    code: StabilizerCode, codes: np.ndarray, decoder: str, params: PauliChannelParams | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """(degenerate failure, exact-match failure) flags for a batch of errors.

    ``decoder`` is "lookup" or "dqmld"; the DQMLD prior is ``params``.
    """
    t = code.table
    e = error_index(codes)
    syn = t.syn[e]
    if decoder == "lookup":
        corr = lookup_indices(code)[syn]
        degenerate_fail = t.label[corr] != t.label[e]
        exact_fail = corr != e
    elif decoder == "dqmld":
        if params is None:
            raise ValueError("DQMLD needs channel parameters")
        cls = dqmld_classes(code, params)[syn]
        degenerate_fail = cls != t.label[e]
        exact_fail = qmld_errors(code, params)[syn] != e
    else:
        raise ValueError(f"unknown decoder {decoder!r}")
    return degenerate_fail, exact_fail


def labels_of(code: StabilizerCode, idx: int) -> str:
    return "".join(LABELS[c] for c in code.table.codes[idx])
