"""Partially-connected hybrid precoding: eigen subproblems and dynamic mapping.

With one phase-shifter pair per antenna, the analog matrix has exactly one
non-zero per row, so approximating a target precoder decouples per RF chain
into rank-one fits ``min sum_i ||y_i - a_i x||^2`` over the antennas mapped to
that chain, where ``y_i`` is the i-th row of the target (as a column vector).
The optimum is the largest-eigenvalue pair of the cluster covariance, which
turns mapping design into a clustering problem on the target's rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import largest_eigenvalue_gram, principal_component


@dataclass(frozen=True)
class MappingSets:
    """Partition of antenna indices {0..n_antennas-1} over RF chains.

    Clusters are pairwise disjoint, non-empty, and cover every antenna; the
    j-th cluster holds the antennas driven by the j-th RF chain.
    """

    n_antennas: int
    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for j, cluster in enumerate(self.clusters):
            if len(cluster) == 0:
                raise ValueError(f"cluster {j} is empty")
            for i in cluster:
                if not 0 <= i < self.n_antennas:
                    raise ValueError(f"antenna index {i} out of range")
                if i in seen:
                    raise ValueError(f"antenna {i} mapped to more than one RF chain")
                seen.add(i)
        if len(seen) != self.n_antennas:
            missing = sorted(set(range(self.n_antennas)) - seen)
            raise ValueError(f"antennas not mapped to any RF chain: {missing}")

    @property
    def n_chains(self) -> int:
        return len(self.clusters)


def fixed_block_mapping(n_tx: int, n_rf: int) -> MappingSets:
    """Adjacent-antenna blocks: chain j drives antennas [j*n_tx/n_rf, (j+1)*n_tx/n_rf)."""
    if n_tx % n_rf != 0:
        raise ValueError(f"n_tx={n_tx} not divisible by n_rf={n_rf}")
    size = n_tx // n_rf
    clusters = tuple(tuple(range(j * size, (j + 1) * size)) for j in range(n_rf))
    return MappingSets(n_antennas=n_tx, clusters=clusters)


@dataclass(eq=False)
class SubproblemSolution:
    """Optimal rank-one fit for one RF chain's antenna set."""

    x: np.ndarray          # unit-norm centroid, length = target column count
    gains: np.ndarray      # per-antenna analog gains a_i
    lam: float             # achieved largest eigenvalue
    residual: float        # sum_i ||y_i||^2 - lam


def solve_subproblem(rows: np.ndarray) -> SubproblemSolution:
    """Solve ``min sum_i ||y_i - a_i x||^2`` for the rows of a target matrix.

    ``rows`` is (m, L): row i is the target's i-th row. The optimum is
    x = top eigenvector of sum_i y_i y_i^H with gains a_i = x^H y_i, and the
    residual equals sum_i ||y_i||^2 - lambda_1.
    """
    rows = np.asarray(rows, dtype=complex)
    if rows.ndim != 2 or rows.shape[0] == 0:
        raise ValueError("rows must be a non-empty 2-D array")
    cols = rows.T  # observation vectors y_i as columns
    x, lam = principal_component(cols)
    gains = rows @ np.conj(x)
    total = float(np.sum(np.abs(rows) ** 2))
    return SubproblemSolution(x=x, gains=gains, lam=lam, residual=total - lam)


@dataclass(eq=False)
class PartialHybrid:
    """Block-structured analog/digital factor pair for a given mapping."""

    f_rf: np.ndarray       # (n_tx, n_chains), one non-zero per row
    f_bb: np.ndarray       # (n_chains, L), row j is the centroid x_j (transposed)
    residual: float        # ||target - f_rf @ f_bb||_F^2
    objective: float       # sum of per-cluster largest eigenvalues


def hybrid_partial(f_opt: np.ndarray, mapping: MappingSets) -> PartialHybrid:
    """Optimal partially-connected factorization of ``f_opt`` for a fixed mapping.

    Row j of the digital factor is the cluster centroid (stored transposed, not
    conjugated) and column j of the analog factor carries the per-antenna gains
    at the rows of cluster j. The residual identity
    ``objective + residual = ||f_opt||_F^2`` holds by construction.
    """
    f_opt = np.asarray(f_opt, dtype=complex)
    n_tx, width = f_opt.shape
    if mapping.n_antennas != n_tx:
        raise ValueError("mapping antenna count does not match the target's rows")
    f_rf = np.zeros((n_tx, mapping.n_chains), dtype=complex)
    f_bb = np.zeros((mapping.n_chains, width), dtype=complex)
    objective = 0.0
    for j, cluster in enumerate(mapping.clusters):
        idx = np.asarray(cluster)
        sol = solve_subproblem(f_opt[idx, :])
        f_bb[j, :] = sol.x
        f_rf[idx, j] = sol.gains
        objective += sol.lam
    residual = float(np.sum(np.abs(f_opt) ** 2)) - objective
    return PartialHybrid(f_rf=f_rf, f_bb=f_bb, residual=residual, objective=objective)


def mapping_objective(f_opt: np.ndarray, mapping: MappingSets) -> float:
    """Sum over clusters of the largest eigenvalue of the cluster covariance."""
    f_opt = np.asarray(f_opt, dtype=complex)
    total = 0.0
    for cluster in mapping.clusters:
        idx = np.asarray(cluster)
        sub = f_opt[idx, :]
        total += float(np.linalg.svd(sub, compute_uv=False)[0] ** 2)
    return total


def _normalized_corr(a: np.ndarray, b: np.ndarray) -> float:
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0:
        return 0.0
    return float(np.abs(np.vdot(b, a)) / denom)


def greedy_mapping(f_opt: np.ndarray, n_rf: int) -> MappingSets:
    """Greedy antenna-to-chain assignment by largest eigenvalue increment.

    Each chain is seeded with one row (largest-norm row first, then the rows
    least correlated with the seeds already picked), which keeps every cluster
    non-empty. Remaining antennas are then attached one at a time: the pending
    (antenna, chain) pair with the biggest increase of the cluster's largest
    eigenvalue wins, lowest indices breaking ties. Eigenvalues are evaluated on
    the cluster Gram matrices, so the per-step cost stays small.
    """
    rows = np.asarray(f_opt, dtype=complex)
    n_tx = rows.shape[0]
    if not 1 <= n_rf <= n_tx:
        raise ValueError("need 1 <= n_rf <= n_tx")

    norms = np.linalg.norm(rows, axis=1)
    unassigned = set(range(n_tx))
    seeds: list[int] = []
    first = int(np.argmax(norms))
    seeds.append(first)
    unassigned.remove(first)
    while len(seeds) < n_rf:
        best = None
        for i in sorted(unassigned):
            worst = max(_normalized_corr(rows[i], rows[s]) for s in seeds)
            key = (worst, -norms[i], i)
            if best is None or key < best[0]:
                best = (key, i)
        seeds.append(best[1])
        unassigned.remove(best[1])

    members: list[list[int]] = [[s] for s in seeds]
    grams: list[np.ndarray] = [
        np.array([[np.vdot(rows[s], rows[s])]], dtype=complex) for s in seeds
    ]
    lams = [float(np.real(g[0, 0])) for g in grams]

    # increments[i][j] caches lambda_1(cluster j + row i) - lambda_1(cluster j)
    increments: dict[int, dict[int, float]] = {i: {} for i in unassigned}

    def increment(i: int, j: int) -> float:
        cached = increments[i].get(j)
        if cached is not None:
            return cached
        cross = rows[members[j]] @ np.conj(rows[i])
        m = len(members[j])
        bordered = np.empty((m + 1, m + 1), dtype=complex)
        bordered[:m, :m] = grams[j]
        bordered[:m, m] = cross
        bordered[m, :m] = np.conj(cross)
        bordered[m, m] = norms[i] ** 2
        val = largest_eigenvalue_gram(bordered) - lams[j]
        increments[i][j] = val
        return val

    while unassigned:
        best_pair = None
        best_val = -np.inf
        for i in sorted(unassigned):
            for j in range(n_rf):
                val = increment(i, j)
                if val > best_val:
                    best_val = val
                    best_pair = (i, j)
        i, j = best_pair
        cross = rows[members[j]] @ np.conj(rows[i])
        m = len(members[j])
        grown = np.empty((m + 1, m + 1), dtype=complex)
        grown[:m, :m] = grams[j]
        grown[:m, m] = cross
        grown[m, :m] = np.conj(cross)
        grown[m, m] = norms[i] ** 2
        grams[j] = grown
        members[j].append(i)
        lams[j] = largest_eigenvalue_gram(grown)
        unassigned.remove(i)
        del increments[i]
        for cache in increments.values():
            cache.pop(j, None)

    clusters = tuple(tuple(sorted(m)) for m in members)
    return MappingSets(n_antennas=n_tx, clusters=clusters)


@dataclass(eq=False)
class KMeansMapping:
    """Dynamic mapping produced by the eigenvector-centroid K-means variant."""

    mapping: MappingSets
    iterations: int
    distortion_trace: tuple[float, ...]
    converged: bool


def _init_centroids(rows: np.ndarray, n_rf: int) -> np.ndarray:
    """Pick n_rf rows as initial centroids: floor(n_rf/2) disjoint pairs with the
    smallest normalized inner products, plus (odd n_rf) the row least correlated
    with everything picked so far. Centroids are returned unit-normalized."""
    n_tx = rows.shape[0]
    norms = np.linalg.norm(rows, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    yn = rows / safe[:, None]
    corr = np.abs(yn @ yn.conj().T)

    pairs = sorted(
        ((corr[i, j], i, j) for i in range(n_tx) for j in range(i + 1, n_tx)),
        key=lambda t: (t[0], t[1], t[2]),
    )
    chosen: list[int] = []
    used: set[int] = set()
    for _, i, j in pairs:
        if len(chosen) >= 2 * (n_rf // 2):
            break
        if i in used or j in used:
            continue
        chosen.extend([i, j])
        used.update((i, j))
    if n_rf % 2 == 1:
        best = None
        for i in range(n_tx):
            if i in used:
                continue
            worst = max(corr[i, s] for s in chosen)
            key = (worst, i)
            if best is None or key < best[0]:
                best = (key, i)
        chosen.append(best[1])
    return yn[chosen].copy()


def _repair_empty(assign: np.ndarray, scores: np.ndarray, norms2: np.ndarray, n_rf: int) -> None:
    """Move the globally worst-fitting row into each empty cluster, in place.

    The worst fit is the row with the smallest max_j |y_i^H x_j|^2 / ||y_i||^2
    among rows whose current cluster keeps at least two members.
    """
    while True:
        counts = np.bincount(assign, minlength=n_rf)
        empties = np.flatnonzero(counts == 0)
        if empties.size == 0:
            return
        target = int(empties[0])
        fit = scores.max(axis=1) / np.where(norms2 > 0, norms2, 1.0)
        candidates = [i for i in range(assign.size) if counts[assign[i]] >= 2]
        worst = min(candidates, key=lambda i: (fit[i], i))
        assign[worst] = target


def kmeans_mapping(f_opt: np.ndarray, n_rf: int, max_iter: int = 50) -> KMeansMapping:
    """Alternating-maximization clustering of target rows into RF-chain groups.

    Rows are assigned to the centroid with the largest squared inner product
    (unnormalized, centroids are unit-norm); centroids are then refreshed as
    the top eigenvector of each cluster's covariance. Both half-steps are exact
    maximizers of the summed Rayleigh quotients, so the recorded distortion
    trace is non-decreasing. The loop stops when the assignment repeats or
    after ``max_iter`` iterations.
    """
    rows = np.asarray(f_opt, dtype=complex)
    n_tx = rows.shape[0]
    if n_rf < 2:
        raise ValueError("kmeans mapping needs n_rf >= 2")
    if n_rf > n_tx:
        raise ValueError("n_rf cannot exceed the antenna count")

    centroids = _init_centroids(rows, n_rf)
    norms2 = np.sum(np.abs(rows) ** 2, axis=1)
    prev_assign = None
    trace: list[float] = []
    converged = False
    iterations = 0
    assign = np.zeros(n_tx, dtype=int)

    for _ in range(max_iter):
        iterations += 1
        scores = np.abs(rows @ centroids.conj().T) ** 2  # |y_i^H x_j|^2
        assign = np.argmax(scores, axis=1)
        _repair_empty(assign, scores, norms2, n_rf)

        distortion = 0.0
        for j in range(n_rf):
            idx = np.flatnonzero(assign == j)
            x, lam = principal_component(rows[idx].T)
            centroids[j] = x
            distortion += lam
        trace.append(distortion)

        if prev_assign is not None and np.array_equal(assign, prev_assign):
            converged = True
            break
        prev_assign = assign.copy()

    clusters = tuple(
        tuple(int(i) for i in np.flatnonzero(assign == j)) for j in range(n_rf)
    )
    mapping = MappingSets(n_antennas=n_tx, clusters=clusters)
    return KMeansMapping(
        mapping=mapping,
        iterations=iterations,
        distortion_trace=tuple(trace),
        converged=converged,
    )


def gap_delta(f_opt: np.ndarray, mapping: MappingSets, n_rf: int | None = None) -> float:
    """Approximation-quality gap between the two analog structures.

    Computed as the sum of the n_rf largest squared singular values of the
    target minus the mapping objective; this equals the partially-connected
    residual minus the fully-connected residual and is non-negative because the
    one-non-zero-per-row structure restricts the dense one.
    """
    f_opt = np.asarray(f_opt, dtype=complex)
    if n_rf is None:
        n_rf = mapping.n_chains
    sv = np.linalg.svd(f_opt, compute_uv=False)
    top = float(np.sum(sv[:n_rf] ** 2))
    return top - mapping_objective(f_opt, mapping)
