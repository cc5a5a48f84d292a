"""Random-walk co-occurrence sampling.

One long walk is generated per worker; every position in the center range
emits its following `window` positions as (center, context) pairs, and for
undirected emission the mirrored (context, center) pair as well. Counts are
accumulated exactly (integer arithmetic throughout), so all marginal
identities hold to the last count.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional

import numpy as np

from .graphs import Graph, require_connected, stationary_distribution

START_MODES = ("stationary", "uniform", "fixed")

DIRECTED_DEFAULT_BURN_IN = 1000


@dataclass(frozen=True)
class SamplerConfig:
    """Walk-sampling parameters.

    `centers` is the number of walk positions used as pair centers; every
    center gets a complete right window, so the walk itself is
    `burn_in + centers + window` positions long.
    """

    window: int
    centers: int
    seed: int = 0
    start_mode: str = "stationary"
    start_node: Optional[int] = None
    burn_in: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.centers < 1:
            raise ValueError(f"centers must be >= 1, got {self.centers}")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.burn_in < 0:
            raise ValueError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.start_mode not in START_MODES:
            raise ValueError(f"start_mode must be one of {START_MODES}, got {self.start_mode!r}")
        if self.start_mode == "fixed" and self.start_node is None:
            raise ValueError("start_mode 'fixed' requires start_node")

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "centers": self.centers,
            "seed": self.seed,
            "start_mode": self.start_mode,
            "start_node": self.start_node,
            "burn_in": self.burn_in,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SamplerConfig":
        return cls(**data)


def default_sampler_config(g: Graph, window: int, centers: int, seed: int = 0,
                           workers: int = 1) -> SamplerConfig:
    """Defaults that keep counts unbiased: undirected graphs start at a
    degree-proportional node (the stationary law, so no burn-in is needed);
    directed graphs start uniformly and discard a burn-in prefix."""
    if g.directed:
        return SamplerConfig(window=window, centers=centers, seed=seed,
                             start_mode="uniform", burn_in=DIRECTED_DEFAULT_BURN_IN,
                             workers=workers)
    return SamplerConfig(window=window, centers=centers, seed=seed,
                         start_mode="stationary", burn_in=0, workers=workers)


@dataclass(frozen=True, eq=False)
class Walk:
    """A realized random walk over node ids, with the seed that produced it."""

    nodes: np.ndarray
    n: int
    seed: int

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True, eq=False)
class CooccurrenceCounts:
    """Exact pair counts and their marginals.

    `pair_counts` holds only nonzero entries; `node_counts[v]` is the number
    of pairs with first element v, `context_counts[c]` the number with second
    element c, `total` the multiset size.
    """

    n: int
    pair_counts: dict[tuple[int, int], int]
    node_counts: np.ndarray
    context_counts: np.ndarray
    total: int

    def __post_init__(self):
        if int(self.node_counts.sum()) != self.total or int(self.context_counts.sum()) != self.total:
            raise ValueError("marginal counts do not sum to the total")

    @classmethod
    def from_matrix(cls, mat: np.ndarray) -> "CooccurrenceCounts":
        mat = np.asarray(mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"count matrix must be square, got shape {mat.shape}")
        if np.any(mat < 0):
            raise ValueError("counts must be non-negative")
        rows, cols = np.nonzero(mat)
        pair_counts = {(int(i), int(j)): int(mat[i, j]) for i, j in zip(rows, cols)}
        return cls(
            n=mat.shape[0],
            pair_counts=pair_counts,
            node_counts=mat.sum(axis=1).astype(np.int64),
            context_counts=mat.sum(axis=0).astype(np.int64),
            total=int(mat.sum()),
        )

    @cached_property
    def dense(self) -> np.ndarray:
        mat = np.zeros((self.n, self.n), dtype=np.int64)
        for (v, c), cnt in self.pair_counts.items():
            mat[v, c] = cnt
        return mat

    def count(self, v: int, c: int) -> int:
        return self.pair_counts.get((v, c), 0)

    def is_symmetric(self) -> bool:
        return all(self.pair_counts.get((c, v)) == cnt for (v, c), cnt in self.pair_counts.items())


def merge_counts(parts: list[CooccurrenceCounts]) -> CooccurrenceCounts:
    """Sum count sets over the same node set (order-independent)."""
    if not parts:
        raise ValueError("nothing to merge")
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise ValueError("cannot merge counts over different node sets")
    total = np.zeros((n, n), dtype=np.int64)
    for p in parts:
        total += p.dense
    return CooccurrenceCounts.from_matrix(total)


def _draw_start(g: Graph, cfg: SamplerConfig, rng: np.random.Generator) -> int:
    if cfg.start_mode == "fixed":
        if not (0 <= cfg.start_node < g.n):
            raise ValueError(f"start node {cfg.start_node} out of range 0..{g.n - 1}")
        return cfg.start_node
    if cfg.start_mode == "uniform":
        return int(rng.integers(g.n))
    return int(rng.choice(g.n, p=stationary_distribution(g)))


def generate_walk(g: Graph, cfg: SamplerConfig) -> Walk:
    """Run one uniform random walk of burn_in + centers + window positions.

    Deterministic given cfg.seed. Requires a (strongly) connected graph so
    the walk can never get stuck.
    """
    require_connected(g)
    rng = np.random.default_rng(cfg.seed)
    start = _draw_start(g, cfg, rng)

    length = cfg.burn_in + cfg.centers + cfg.window
    steps = length - 1
    nbrs = g.out_neighbors
    # Pre-drawing the uniforms keeps the hot loop free of per-step RNG calls.
    u = rng.random(steps).tolist()
    walk = np.empty(length, dtype=np.int64)
    walk[0] = cur = start
    for i in range(steps):
        options = nbrs[cur]
        cur = options[int(u[i] * len(options))]
        walk[i + 1] = cur
    return Walk(nodes=walk, n=g.n, seed=cfg.seed)


def extract_pairs(walk: Walk, window: int, directed: bool, burn_in: int,
                  centers: int) -> CooccurrenceCounts:
    """Windowed pair extraction over the center range.

    Center position i (burn_in <= i < burn_in + centers) emits (w[i], w[i+o])
    for offsets o = 1..window; undirected emission also records the mirrored
    pair, so the count map is exactly symmetric and the total is
    2 * window * centers (window * centers when directed).
    """
    needed = burn_in + centers + window
    if len(walk) < needed:
        raise ValueError(f"walk has {len(walk)} positions, need at least {needed}")
    n = walk.n
    nodes = walk.nodes
    forward = np.zeros(n * n, dtype=np.int64)
    lo, hi = burn_in, burn_in + centers
    for offset in range(1, window + 1):
        codes = nodes[lo:hi] * n + nodes[lo + offset:hi + offset]
        forward += np.bincount(codes, minlength=n * n)
    mat = forward.reshape(n, n)
    if not directed:
        mat = mat + mat.T
    return CooccurrenceCounts.from_matrix(mat)


def _worker_seed(seed: int, worker: int) -> int:
    # Mixes (seed, worker index) into an independent 64-bit stream seed.
    return int(np.random.SeedSequence(entropy=seed, spawn_key=(worker,)).generate_state(1, np.uint64)[0])


def sample_counts(g: Graph, cfg: SamplerConfig) -> CooccurrenceCounts:
    """Generate walk(s) and accumulate windowed pair counts.

    With workers > 1, the center budget is split across workers, each worker
    runs its own walk from a seed mixed out of (cfg.seed, worker index), and
    the partial counts are summed. Deterministic given (seed, workers).
    """
    if cfg.workers == 1:
        walk = generate_walk(g, cfg)
        return extract_pairs(walk, cfg.window, g.directed, cfg.burn_in, cfg.centers)

    base, extra = divmod(cfg.centers, cfg.workers)
    parts = []
    for w in range(cfg.workers):
        chunk = base + (1 if w < extra else 0)
        if chunk == 0:
            continue
        sub = replace(cfg, centers=chunk, seed=_worker_seed(cfg.seed, w), workers=1)
        walk = generate_walk(g, sub)
        parts.append(extract_pairs(walk, sub.window, g.directed, sub.burn_in, sub.centers))
    return merge_counts(parts)


def empirical_conditional(counts: CooccurrenceCounts) -> np.ndarray:
    """Row-normalized pair counts: entry (i, j) = #(i,j)/#(i).

    Rows of nodes that never occurred are NaN (flagged absent rather than
    fabricated); observed rows sum to 1 exactly.
    """
    out = np.full((counts.n, counts.n), np.nan)
    observed = counts.node_counts > 0
    dense = counts.dense.astype(float)
    out[observed] = dense[observed] / counts.node_counts[observed, None]
    return out


def empirical_frequency(counts: CooccurrenceCounts) -> np.ndarray:
    """Node occurrence frequencies #(v)/|D|; sums to 1."""
    if counts.total == 0:
        raise ValueError("counts are empty")
    return counts.node_counts / counts.total


def write_counts_csv(counts: CooccurrenceCounts, path) -> None:
    """Nonzero counts as 'v,c,count' rows, ordered by (v, c)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["v", "c", "count"])
        for (v, c) in sorted(counts.pair_counts):
            writer.writerow([v, c, counts.pair_counts[(v, c)]])


def write_counts_sidecar(counts: CooccurrenceCounts, path, config: Optional[SamplerConfig] = None) -> None:
    payload = {
        "n": counts.n,
        "total": counts.total,
        "node_counts": counts.node_counts.tolist(),
        "context_counts": counts.context_counts.tolist(),
        "sampler_config": config.to_dict() if config is not None else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_counts_csv(path, sidecar_path) -> tuple[CooccurrenceCounts, Optional[SamplerConfig]]:
    """Load counts written by write_counts_csv + sidecar; cross-checks totals."""
    with open(sidecar_path, "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    n = meta["n"]
    mat = np.zeros((n, n), dtype=np.int64)
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["v", "c", "count"]:
            raise ValueError(f"unexpected counts header: {header}")
        for row in reader:
            v, c, cnt = int(row[0]), int(row[1]), int(row[2])
            mat[v, c] = cnt
    counts = CooccurrenceCounts.from_matrix(mat)
    if counts.total != meta["total"]:
        raise ValueError(
            f"counts file total {counts.total} disagrees with sidecar total {meta['total']}"
        )
    cfg = meta.get("sampler_config")
    return counts, SamplerConfig.from_dict(cfg) if cfg else None
