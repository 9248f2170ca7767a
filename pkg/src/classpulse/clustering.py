"""Agglomerative clustering of students over mixed-type features.

Pipeline: Gower dissimilarity over the feature matrix, then four bottom-up
hierarchical clusterings (single, complete, average, Ward) maintained with
the Lance-Williams recurrence, model selection by agglomerative coefficient,
dendrogram construction, flat cuts, and silhouette-based choice of k.

Everything here is a pure function over immutable inputs; the four linkage
models can be built independently from one shared dissimilarity matrix.

Determinism: when several cluster pairs are minimal at a merge step, the pair
whose (smaller canonical id, larger canonical id) is lexicographically least
wins, where a cluster's canonical id is its smallest original observation
index. Minima are compared with a tiny relative band (``_TIE_REL``) so that
values which are mathematically tied but differ in the last float bits are
still routed through the canonical tie-break.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .domain import FeatureKind, FeatureMatrix, StructuralError

# Relative width of the near-tie band when selecting the minimum inter-cluster
# distance. Must dominate accumulated float error of the recurrence (~1e-15)
# while staying far below any gap between genuinely distinct distances.
_TIE_REL = 1e-12


class DegenerateFeatures(ValueError):
    """No usable feature column: every column is constant across observations."""


class InsufficientObservations(ValueError):
    """Clustering needs at least two observations."""


class InvalidK(ValueError):
    """Requested cluster count is outside the valid range."""


class Linkage(str, enum.Enum):
    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"
    WARD = "ward"


@dataclass(frozen=True)
class DissimilarityMatrix:
    """Symmetric pairwise distances between n observations, zero diagonal.

    ``feature_ranges`` records the per-column range used for Gower
    normalization (None for categorical or excluded columns); matrices built
    directly from raw distances leave it empty.
    """

    labels: tuple[str, ...]
    d: np.ndarray
    feature_ranges: tuple[float | None, ...] = ()

    def __post_init__(self) -> None:
        d = np.asarray(self.d, dtype=float)
        object.__setattr__(self, "d", d)
        n = len(self.labels)
        if d.shape != (n, n):
            raise StructuralError("dissimilarity matrix shape must match labels")
        if n:
            if not np.isfinite(d).all():
                raise StructuralError("dissimilarities must be finite")
            if (d < 0).any():
                raise StructuralError("dissimilarities must be non-negative")
            if not np.allclose(d, d.T, atol=0.0, rtol=0.0, equal_nan=False):
                raise StructuralError("dissimilarity matrix must be symmetric")
            if np.diagonal(d).any():
                raise StructuralError("dissimilarity diagonal must be zero")

    @property
    def n(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class MergeStep:
    """One agglomeration: refs 0..n-1 are singletons, n+t is the step-t merge."""

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class MergeTrace:
    n: int
    steps: tuple[MergeStep, ...]


@dataclass(frozen=True)
class ClusteringModel:
    """A full merge trace for one linkage plus its agglomerative coefficient."""

    linkage: Linkage
    trace: MergeTrace
    ac: float
    degenerate: bool = False


@dataclass(frozen=True)
class Leaf:
    id: int
    label: str


@dataclass(frozen=True)
class Internal:
    height: float
    children: tuple["Node", "Node"]


Node = Union[Leaf, Internal]


@dataclass(frozen=True)
class Dendrogram:
    root: Node
    n: int
    labels: tuple[str, ...]

    def leaf_count(self) -> int:
        def count(node: Node) -> int:
            if isinstance(node, Leaf):
                return 1
            return sum(count(c) for c in node.children)

        return count(self.root)


@dataclass(frozen=True)
class ClusterAssignment:
    """Flat clusters: indices 0..k-1 ordered by smallest contained observation."""

    k: int
    member_of: tuple[int, ...]
    labels: tuple[str, ...]

    def members(self, cluster: int) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.member_of) if c == cluster)


@dataclass(frozen=True)
class KChoice:
    """Outcome of silhouette-based selection of the cluster count."""

    k: int
    scores: dict[int, float] = field(default_factory=dict)
    flagged: bool = False


def gower_dissimilarity(fm: FeatureMatrix) -> DissimilarityMatrix:
    """Pairwise Gower distances over the feature matrix.

    Numeric columns contribute |x_i - x_j| / range; categorical columns
    contribute 0/1 mismatch. Constant columns (zero range, or single-valued
    categorical) are excluded from both numerator and denominator. With at
    least two observations and no usable column at all this raises
    DegenerateFeatures.
    """
    n = fm.n
    if n == 0:
        raise StructuralError("cannot compute dissimilarities for zero observations")

    values = fm.values
    acc = np.zeros((n, n))
    usable = 0
    ranges: list[float | None] = []
    for col, kind in enumerate(fm.feature_kinds):
        x = values[:, col]
        if kind is FeatureKind.NUMERIC:
            r = float(x.max() - x.min()) if n else 0.0
            if r == 0.0:
                ranges.append(None)
                continue
            acc += np.abs(x[:, None] - x[None, :]) / r
            ranges.append(r)
            usable += 1
        else:
            if np.unique(x).size <= 1:
                ranges.append(None)
                continue
            acc += (x[:, None] != x[None, :]).astype(float)
            ranges.append(None)
            usable += 1

    if usable == 0:
        if n >= 2:
            raise DegenerateFeatures("all feature columns are constant")
        return DissimilarityMatrix(fm.students, np.zeros((1, 1)), tuple(ranges))

    d = acc / usable
    np.fill_diagonal(d, 0.0)
    return DissimilarityMatrix(fm.students, d, tuple(ranges))


def _lw_update(
    linkage: Linkage,
    dik: np.ndarray,
    djk: np.ndarray,
    dij: float,
    ni: int,
    nj: int,
    nk: np.ndarray,
) -> np.ndarray:
    """Lance-Williams recurrence for the distance from the merge i+j to each k."""
    if linkage is Linkage.SINGLE:
        return np.minimum(dik, djk)
    if linkage is Linkage.COMPLETE:
        return np.maximum(dik, djk)
    if linkage is Linkage.AVERAGE:
        return (ni * dik + nj * djk) / (ni + nj)
    # Ward, applied on squared dissimilarities; tiny negatives from rounding
    # are clamped so the square root stays defined.
    denom = ni + nj + nk
    out = ((ni + nk) * dik + (nj + nk) * djk - nk * dij) / denom
    return np.maximum(out, 0.0)


def agnes(D: DissimilarityMatrix, linkage: Linkage) -> ClusteringModel:
    """Bottom-up agglomeration: n-1 merges of the closest pair of clusters.

    Ward works on squared dissimilarities and reports square-rooted heights,
    keeping them on the input scale. With Gower (non-Euclidean) input Ward is
    a heuristic; it is supported because it is one of the four stock models.
    """
    n = D.n
    if n < 2:
        raise InsufficientObservations(f"need at least 2 observations, got {n}")

    work = D.d.copy()
    if linkage is Linkage.WARD:
        work = work**2
    scale = float(work.max())

    total = 2 * n - 1
    dm = np.full((total, total), np.inf)
    dm[:n, :n] = work
    np.fill_diagonal(dm, np.inf)
    size = np.zeros(total, dtype=int)
    size[:n] = 1
    canon = np.arange(total)
    active = list(range(n))
    steps: list[MergeStep] = []

    for t in range(n - 1):
        idx = np.array(active)
        sub = dm[np.ix_(idx, idx)]
        m = float(sub.min())
        thr = m + _TIE_REL * max(m, scale)
        cand_i, cand_j = np.where(sub <= thr)
        best_key = None
        best_pair = None
        for a_, b_ in zip(cand_i, cand_j):
            if a_ >= b_:
                continue
            ca, cb = int(canon[idx[a_]]), int(canon[idx[b_]])
            key = (min(ca, cb), max(ca, cb))
            if best_key is None or key < best_key:
                best_key = key
                best_pair = (int(idx[a_]), int(idx[b_]))
        assert best_pair is not None
        i, j = best_pair

        raw = float(dm[i, j])
        height = math.sqrt(raw) if linkage is Linkage.WARD else raw
        new = n + t
        others = [a for a in active if a != i and a != j]
        if others:
            ok = np.array(others)
            dm[new, ok] = dm[ok, new] = _lw_update(
                linkage, dm[i, ok], dm[j, ok], raw, int(size[i]), int(size[j]), size[ok]
            )
        size[new] = size[i] + size[j]
        canon[new] = min(canon[i], canon[j])
        active = others + [new]

        left, right = (i, j) if canon[i] <= canon[j] else (j, i)
        steps.append(MergeStep(left, right, height, int(size[new])))

    trace = MergeTrace(n=n, steps=tuple(steps))
    degenerate = trace.steps[-1].height <= 0.0
    return ClusteringModel(
        linkage=linkage,
        trace=trace,
        ac=agglomerative_coefficient(trace),
        degenerate=degenerate,
    )


def agglomerative_coefficient(trace: MergeTrace) -> float:
    """Mean over observations of 1 - (first-merge height / final-merge height).

    Values near 1 indicate strong clustering structure. A trace whose final
    merge height is zero (all observations identical) scores 0 rather than
    dividing by zero; `ClusteringModel.degenerate` flags that case.
    """
    n = trace.n
    final = trace.steps[-1].height
    if final <= 0.0:
        return 0.0
    first = np.zeros(n)
    for step in trace.steps:
        for ref in (step.left, step.right):
            if ref < n:
                first[ref] = step.height
    ac = float(np.mean(1.0 - first / final))
    return min(1.0, max(0.0, ac))


_SELECT_PREFERENCE = {
    Linkage.WARD: 3,
    Linkage.COMPLETE: 2,
    Linkage.AVERAGE: 1,
    Linkage.SINGLE: 0,
}


def select_model(models: Iterable[ClusteringModel]) -> ClusteringModel:
    """Pick the model with the highest agglomerative coefficient.

    Ties break by fixed preference: Ward > Complete > Average > Single.
    """
    candidates = list(models)
    if sorted(m.linkage for m in candidates) != sorted(Linkage):
        raise StructuralError("expected exactly one model per linkage")
    return max(candidates, key=lambda m: (m.ac, _SELECT_PREFERENCE[m.linkage]))


def build_dendrogram(trace: MergeTrace, labels: Sequence[str]) -> Dendrogram:
    """Binary merge tree; the child containing the smallest original index is first."""
    n = trace.n
    if len(labels) != n:
        raise StructuralError("one label per observation is required")
    nodes: list[Node] = [Leaf(i, labels[i]) for i in range(n)]
    canon = list(range(n))
    for step in trace.steps:
        a, b = step.left, step.right
        if canon[a] <= canon[b]:
            children = (nodes[a], nodes[b])
        else:
            children = (nodes[b], nodes[a])
        nodes.append(Internal(step.height, children))
        canon.append(min(canon[a], canon[b]))
    return Dendrogram(root=nodes[-1], n=n, labels=tuple(labels))


def cut_tree(trace: MergeTrace, k: int, labels: Sequence[str] = ()) -> ClusterAssignment:
    """Flat clusters by undoing the last k-1 merges; labels canonicalized."""
    n = trace.n
    if not 1 <= k <= n:
        raise InvalidK(f"k must be in [1, {n}], got {k}")

    parent = list(range(2 * n - 1))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t in range(n - k):
        step = trace.steps[t]
        new = n + t
        parent[find(step.left)] = new
        parent[find(step.right)] = new

    roots: dict[int, int] = {}
    member_of = []
    for i in range(n):
        r = find(i)
        if r not in roots:
            roots[r] = len(roots)
        member_of.append(roots[r])
    # roots are discovered in ascending observation order, so cluster indices
    # are already ordered by smallest contained observation
    return ClusterAssignment(k=k, member_of=tuple(member_of), labels=tuple(labels))


def silhouette_width(D: DissimilarityMatrix, assignment: ClusterAssignment) -> float:
    """Mean silhouette s(i) = (b - a) / max(a, b); singleton clusters score 0."""
    n = D.n
    k = assignment.k
    if not 2 <= k <= n - 1:
        raise InvalidK(f"silhouette needs k in [2, {n - 1}], got {k}")
    labels = np.array(assignment.member_of)
    if labels.shape != (n,):
        raise StructuralError("assignment does not match the dissimilarity matrix")

    d = D.d
    s = np.zeros(n)
    for i in range(n):
        own = labels == labels[i]
        own_size = int(own.sum())
        if own_size == 1:
            continue
        a = d[i][own].sum() / (own_size - 1)
        b = min(float(d[i][labels == c].mean()) for c in range(k) if c != labels[i])
        denom = max(a, b)
        s[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(s.mean())


def choose_k(
    trace: MergeTrace,
    D: DissimilarityMatrix,
    k_range: tuple[int, int] | None = None,
) -> KChoice:
    """Silhouette-maximizing k over [2, min(8, n-1)] by default; ties -> smaller k.

    With fewer than 3 observations there is nothing to score; returns
    min(n, 2) flagged.
    """
    n = trace.n
    if n < 3:
        return KChoice(k=min(n, 2), flagged=True)
    lo, hi = k_range if k_range is not None else (2, min(8, n - 1))
    lo = max(2, lo)
    hi = min(n - 1, hi)
    scores: dict[int, float] = {}
    best_k = lo
    best_s = -math.inf
    for k in range(lo, hi + 1):
        s = silhouette_width(D, cut_tree(trace, k))
        scores[k] = s
        if s > best_s:
            best_s = s
            best_k = k
    return KChoice(k=best_k, scores=scores)


def node_wire(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"id": node.id, "label": node.label}
    return {"height": node.height, "children": [node_wire(c) for c in node.children]}


def dendrogram_wire(model: ClusteringModel, dendrogram: Dendrogram) -> dict:
    """JSON wire form: merge list in the 0..n-1 / n+t ref convention plus the tree."""
    return {
        "n": dendrogram.n,
        "merges": [
            [s.left, s.right, s.height, s.size] for s in model.trace.steps
        ],
        "tree": node_wire(dendrogram.root),
        "linkage": model.linkage.value,
        "ac": model.ac,
    }
