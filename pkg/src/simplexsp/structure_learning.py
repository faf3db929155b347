"""Learning nested 2-complex structure on a graph.

Candidate triangles are ranked by a size filtration (max edge weight,
equal-count quantile bands), shuffled and re-ordered within each band so
that edge-sharing triangles sink to the back, partitioned into nearly
uniform batches, and accumulated into a nested family X_0 c X_1 c ... c X_p
with one generalized Laplacian per level.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .complex_core import (
    ComplexError,
    SimplicialComplex,
    WeightedGraph,
    enumerate_candidate_triangles,
)
from .laplacian import GeneralizedLaplacian, _two_simplex_matrix
from .spectral import Spectrum, eigendecompose

__all__ = [
    "TriangleQueue",
    "LaplacianFamily",
    "filtration_bands",
    "order_within_band",
    "partition_queue",
    "build_family",
    "select_model",
    "family_manifest",
]


@dataclass
class TriangleQueue:
    """Ordered candidate triangles with their filtration band assignment."""

    entries: list
    band_of: dict
    bands: list  # (r_lo, r_hi) per band


@dataclass
class LaplacianFamily:
    """Nested complexes X_0 c ... c X_p with their generalized Laplacians."""

    complexes: list
    laplacians: list
    batches: list
    queue: TriangleQueue
    seed: int = 0
    _spectra: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not self._spectra:
            self._spectra = [None] * len(self.laplacians)

    @property
    def p(self) -> int:
        return len(self.laplacians) - 1

    @property
    def matrices(self) -> list:
        return [l.matrix for l in self.laplacians]

    def spectrum(self, i: int) -> Spectrum:
        if self._spectra[i] is None:
            self._spectra[i] = eigendecompose(self.laplacians[i])
        return self._spectra[i]


def _triangle_size(t, weights) -> float:
    return max(weights[frozenset((t[0], t[1]))],
               weights[frozenset((t[0], t[2]))],
               weights[frozenset((t[1], t[2]))])


def filtration_bands(triples, weights, num_bands: int) -> TriangleQueue:
    """Assign each triple to a quantile band of its max edge weight.

    Thresholds are equal-count quantiles; a triple goes to the first band
    whose upper threshold covers it.  Entries keep lexicographic order
    within a band (re-ordering is a separate step).
    """
    if num_bands < 1:
        raise ComplexError(f"need at least one band, got {num_bands}")
    triples = list(triples)
    if not triples:
        return TriangleQueue([], {}, [])
    wmap = {frozenset(k): float(v) for k, v in dict(weights).items()}
    sizes = np.array([_triangle_size(t, wmap) for t in triples])
    qs = np.quantile(sizes, [i / num_bands for i in range(1, num_bands + 1)])
    band_of = {}
    for t, s in zip(triples, sizes):
        band_of[t] = int(np.searchsorted(qs, s, side="left").clip(0, num_bands - 1))
    bands = []
    lo = 0.0
    for hi in qs:
        bands.append((lo, float(hi)))
        lo = float(hi)
    entries = []
    for i in range(num_bands):
        entries.extend(t for t in triples if band_of[t] == i)
    return TriangleQueue(entries, band_of, bands)


def _shares_edge(t1, t2) -> bool:
    return len(set(t1) & set(t2)) >= 2


def order_within_band(triples, seed: int) -> list:
    """Seeded shuffle, then push edge-sharing triangles to the back.

    One front-to-back scan: every unprocessed triangle sharing an edge with
    the current entry moves to the end of the queue, preserving the relative
    order of the moved items.
    """
    rng = np.random.default_rng(seed)
    q = [triples[i] for i in rng.permutation(len(triples))]
    j = 0
    while j < len(q):
        head = q[j]
        tail = q[j + 1:]
        keep = [t for t in tail if not _shares_edge(t, head)]
        moved = [t for t in tail if _shares_edge(t, head)]
        q = q[: j + 1] + keep + moved
        j += 1
    return q


def partition_queue(q: TriangleQueue, p: int) -> list:
    """Split the queue into p contiguous batches of nearly equal size."""
    if p < 1:
        raise ComplexError(f"need at least one batch, got {p}")
    entries = q.entries
    base, rem = divmod(len(entries), p)
    batches = []
    start = 0
    for i in range(p):
        size = base + (1 if i < rem else 0)
        batches.append(entries[start: start + size])
        start += size
    return batches


def _triple_weights(g: WeightedGraph, triples, mode: str):
    """Edge weights for every candidate triple; shortest-path fill in mode 'all'.

    Triples with an unreachable pair are discarded.
    """
    wmap = {frozenset(k): v for k, v in g.edges.items()}
    if mode == "closed":
        return triples, wmap
    idx = g.index
    a = csr_matrix(g.adjacency_matrix())
    dist = shortest_path(a, directed=False)
    kept = []
    for t in triples:
        ok = True
        for u, v in itertools.combinations(t, 2):
            key = frozenset((u, v))
            if key not in wmap:
                d = dist[idx[u], idx[v]]
                if not np.isfinite(d) or d <= 0:
                    ok = False
                    break
                wmap[key] = float(d)
        if ok:
            kept.append(t)
    return kept, wmap


def build_family(
    g: WeightedGraph,
    p: int = 20,
    num_bands: int = 1,
    seed: int = 0,
    mode: str = "closed",
) -> LaplacianFamily:
    """Run the full pipeline: enumerate, band, order, partition, assemble.

    Laplacians are updated incrementally: each added triangle contributes
    its closed-form block and retires the edge blocks of edges that stop
    being maximal.
    """
    triples = enumerate_candidate_triangles(g, mode)
    triples, wmap = _triple_weights(g, triples, mode)

    queue = filtration_bands(triples, wmap, num_bands)
    ordered = []
    for i in range(len(queue.bands)):
        band = [t for t in queue.entries if queue.band_of[t] == i]
        ordered.extend(order_within_band(band, seed + i))
    queue.entries = ordered
    batches = partition_queue(queue, p)

    idx = g.index
    lap = g.laplacian_matrix()
    edges = dict(g.edges)
    edge_keys = {frozenset(e) for e in edges}
    tri_count: dict = {}
    triangles: set = set()

    complexes = [SimplicialComplex(g.vertices, edges)]
    laplacians = [GeneralizedLaplacian((lap + lap.T) / 2.0, g.vertices, ())]

    for batch in batches:
        lap = lap.copy()
        for t in batch:
            pair_w = {}
            for u, v in itertools.combinations(t, 2):
                key = frozenset((u, v))
                w = wmap[key]
                pair_w[(u, v)] = w
                if key not in edge_keys:
                    edges[g.pair(u, v)] = w
                    edge_keys.add(key)
                    tri_count[key] = 0
                elif tri_count.get(key, 0) == 0:
                    # the edge stops being a maximal simplex: retire its block
                    i, j = idx[u], idx[v]
                    lap[i, i] -= w
                    lap[j, j] -= w
                    lap[i, j] += w
                    lap[j, i] += w
                tri_count[key] = tri_count.get(key, 0) + 1
            rows = [idx[v] for v in t]
            block = _two_simplex_matrix(
                pair_w[(t[0], t[1])], pair_w[(t[0], t[2])], pair_w[(t[1], t[2])]
            )
            lap[np.ix_(rows, rows)] += block
            triangles.add(t)
        complexes.append(SimplicialComplex(g.vertices, edges, triangles))
        sym = (lap + lap.T) / 2.0
        prov = tuple(sorted(triangles, key=lambda t: tuple(idx[v] for v in t)))
        laplacians.append(GeneralizedLaplacian(sym, g.vertices, prov))

    return LaplacianFamily(complexes, laplacians, batches, queue, seed)


def select_model(family: LaplacianFamily, signals: np.ndarray, r1: float):
    """argmin over levels of the total squared low-band projection residual.

    Keeps the first k = max(1, round(r1 n)) eigenvectors per level; ties go
    to the smaller level index.
    """
    if not 0 < r1 <= 1:
        raise ComplexError(f"r1 must lie in (0, 1], got {r1}")
    signals = np.asarray(signals, dtype=float)
    if signals.ndim == 1:
        signals = signals[:, None]
    if signals.shape[1] == 0:
        raise ComplexError("empty signal set")
    n = signals.shape[0]
    k = max(1, int(round(r1 * n)))
    errors = np.empty(family.p + 1)
    for i in range(family.p + 1):
        v = family.spectrum(i).eigenvectors[:, :k]
        resid = signals - v @ (v.T @ signals)
        errors[i] = float(np.sum(resid**2))
    # round-off keeps equal residuals from comparing equal; tie within a
    # tiny relative margin of the minimum and take the earliest level
    tol = 1e-12 * max(1.0, float(np.sum(signals**2)))
    best = int(np.nonzero(errors <= errors.min() + tol)[0][0])
    return best, errors


def family_manifest(family: LaplacianFamily) -> dict:
    """JSON-ready summary of a learned family (deterministic field order)."""
    levels = []
    for x, l in zip(family.complexes, family.laplacians):
        digest = hashlib.sha256(np.ascontiguousarray(l.matrix).tobytes()).hexdigest()
        levels.append(
            {
                "num_edges": len(x.edges),
                "num_triangles": len(x.simplices),
                "laplacian_sha256": digest,
            }
        )
    return {
        "n": family.complexes[0].n,
        "p": family.p,
        "seed": family.seed,
        "bands": [list(b) for b in family.queue.bands],
        "batches": [[list(t) for t in batch] for batch in family.batches],
        "levels": levels,
    }


def manifest_json(family: LaplacianFamily) -> str:
    return json.dumps(family_manifest(family), sort_keys=True)
