"""Pure-Python toric decoding kernels.

Reference implementation and fallback for the compiled module.  Qubit
layout on a d x d torus: horizontal edge (r, c) -> r*d + c joins vertices
(r, c) and (r, c+1); vertical edge (r, c) -> d*d + r*d + c joins vertices
(r, c) and (r+1, c).  Plaquette (r, c) has corners (r, c) .. (r+1, c+1).

Outcome codes: 0 success, 1 X-type logical failure, 2 Z-type, 3 both.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

# exact bitmask DP up to this many defects, blossom beyond
DP_LIMIT = 16
EXACT_FLAG = 4


def torus_delta(a: int, b: int, d: int) -> int:
    diff = (b - a) % d
    return min(diff, d - diff)


def toric_distance(a: tuple[int, int], b: tuple[int, int], d: int) -> int:
    return torus_delta(a[0], b[0], d) + torus_delta(a[1], b[1], d)


def _steps(a: int, b: int, d: int) -> tuple[int, int]:
    """(direction, count) along one axis; non-wrapping path wins ties."""
    diff = (b - a) % d
    back = d - diff if diff else 0
    if diff < back or (diff == back and b >= a):
        return 1, diff
    return -1, back


def vertex_path(a: tuple[int, int], b: tuple[int, int], d: int) -> list[int]:
    """Edges of the primal path from vertex a to vertex b, rows first."""
    (r, c), (r2, c2) = a, b
    edges = []
    step, count = _steps(r, r2, d)
    for _ in range(count):
        if step == 1:
            edges.append(d * d + r * d + c)
            r = (r + 1) % d
        else:
            r = (r - 1) % d
            edges.append(d * d + r * d + c)
    step, count = _steps(c, c2, d)
    for _ in range(count):
        if step == 1:
            edges.append(r * d + c)
            c = (c + 1) % d
        else:
            c = (c - 1) % d
            edges.append(r * d + c)
    return edges


def plaquette_path(a: tuple[int, int], b: tuple[int, int], d: int) -> list[int]:
    """Edges crossed by the dual path from plaquette a to plaquette b."""
    (r, c), (r2, c2) = a, b
    edges = []
    step, count = _steps(r, r2, d)
    for _ in range(count):
        if step == 1:
            r = (r + 1) % d
            edges.append(r * d + c)
        else:
            edges.append(r * d + c)
            r = (r - 1) % d
    step, count = _steps(c, c2, d)
    for _ in range(count):
        if step == 1:
            c = (c + 1) % d
            edges.append(d * d + r * d + c)
        else:
            edges.append(d * d + r * d + c)
            c = (c - 1) % d
    return edges


def _dp_matching(w: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    m = w.shape[0]
    full = (1 << m) - 1

    @lru_cache(maxsize=None)
    def best(mask: int) -> tuple[float, int]:
        if mask == 0:
            return 0.0, -1
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        top, arg = float("inf"), -1
        j_bits = rest
        while j_bits:
            low = j_bits & -j_bits
            j = low.bit_length() - 1
            j_bits ^= low
            cost = w[i, j] + best(rest ^ low)[0]
            if cost < top:
                top, arg = cost, j
        return top, arg

    total = best(full)[0]
    pairs = []
    mask = full
    while mask:
        i = (mask & -mask).bit_length() - 1
        j = best(mask)[1]
        pairs.append((i, j))
        mask ^= (1 << i) | (1 << j)
    return float(total), pairs


def _blossom_matching(w: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    import networkx as nx

    m = w.shape[0]
    g = nx.Graph()
    for i in range(m):
        for j in range(i + 1, m):
            g.add_edge(i, j, weight=float(w[i, j]))
    matching = nx.min_weight_matching(g)
    pairs = sorted(tuple(sorted(e)) for e in matching)
    if 2 * len(pairs) != m:
        raise RuntimeError("blossom returned an imperfect matching")
    return float(sum(w[i, j] for i, j in pairs)), pairs


def min_weight_matching(w) -> tuple[float, list[tuple[int, int]]]:
    """Exact minimum-weight perfect matching on a complete graph."""
    w = np.asarray(w, dtype=float)
    m = w.shape[0]
    if m % 2:
        raise ValueError(f"odd number of nodes ({m}) has no perfect matching")
    if m == 0:
        return 0.0, []
    if m <= DP_LIMIT:
        return _dp_matching(w)
    return _blossom_matching(w)


def distance_matrix(points: list[tuple[int, int]], d: int) -> np.ndarray:
    m = len(points)
    w = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            w[i, j] = w[j, i] = toric_distance(points[i], points[j], d)
    return w


def match_defects(points: list[tuple[int, int]], d: int, dual: bool) -> list[int]:
    """Correction edges (with multiplicity) for one defect type."""
    _, pairs = min_weight_matching(distance_matrix(points, d))
    path = plaquette_path if dual else vertex_path
    edges: list[int] = []
    for i, j in pairs:
        edges.extend(path(points[i], points[j], d))
    return edges


def syndromes(z: np.ndarray, x: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Vertex and plaquette defect grids, shape (B, d, d), for bit arrays (B, n)."""
    dd = d * d
    zh, zv = z[:, :dd].reshape(-1, d, d), z[:, dd:].reshape(-1, d, d)
    xh, xv = x[:, :dd].reshape(-1, d, d), x[:, dd:].reshape(-1, d, d)
    vert = zh ^ np.roll(zh, 1, axis=2) ^ zv ^ np.roll(zv, 1, axis=1)
    plaq = xh ^ np.roll(xh, -1, axis=1) ^ xv ^ np.roll(xv, -1, axis=2)
    return vert, plaq


def logical_masks(d: int) -> dict[str, np.ndarray]:
    """Supports of the logical representatives as boolean masks over qubits."""
    n, dd = 2 * d * d, d * d
    masks = {k: np.zeros(n, dtype=bool) for k in ("X1", "X2", "Z1", "Z2")}
    for r in range(d):
        masks["X1"][r * d + 0] = True  # horizontal edges in column 0 (dual loop)
        masks["Z2"][dd + r * d + 0] = True  # vertical edges in column 0
    for c in range(d):
        masks["X2"][dd + 0 * d + c] = True  # vertical edges in row 0 (dual loop)
        masks["Z1"][0 * d + c] = True  # horizontal edges in row 0
    return masks


def classify(rz: np.ndarray, rx: np.ndarray, d: int) -> int:
    """Outcome code of a residual with empty syndrome."""
    masks = logical_masks(d)
    z_fail = bool(rz[masks["X1"]].sum() % 2 or rz[masks["X2"]].sum() % 2)
    x_fail = bool(rx[masks["Z1"]].sum() % 2 or rx[masks["Z2"]].sum() % 2)
    return int(x_fail) + 2 * int(z_fail)


def decode_one(z: np.ndarray, x: np.ndarray, d: int) -> int:
    """Decode a single error given as z/x bit vectors.

    Returns the outcome code, with EXACT_FLAG added when the correction
    differs from the error (even if only by a stabilizer).
    """
    vert, plaq = syndromes(z[None, :], x[None, :], d)
    rz = z.astype(np.uint8).copy()
    rx = x.astype(np.uint8).copy()
    vpts = [tuple(p) for p in np.argwhere(vert[0])]
    ppts = [tuple(p) for p in np.argwhere(plaq[0])]
    for e in match_defects(vpts, d, dual=False):
        rz[e] ^= 1
    for e in match_defects(ppts, d, dual=True):
        rx[e] ^= 1
    exact = EXACT_FLAG if (rz.any() or rx.any()) else 0
    return classify(rz, rx, d) | exact


def decode_toric_batch(codes: np.ndarray, d: int) -> np.ndarray:
    """Outcome codes (plus EXACT_FLAG) for a batch of Pauli code arrays of shape (B, 2*d*d)."""
    codes = np.asarray(codes, dtype=np.uint8)
    z = ((codes == 2) | (codes == 3)).astype(np.uint8)
    x = ((codes == 1) | (codes == 2)).astype(np.uint8)
    out = np.zeros(codes.shape[0], dtype=np.int8)
    for b in range(codes.shape[0]):
        if z[b].any() or x[b].any():
            out[b] = decode_one(z[b], x[b], d)
    return out


def dp_matching_weight(w) -> float:
    """Matching weight from the DP path only (for cross-checks)."""
    return _dp_matching(np.asarray(w, dtype=float))[0]
