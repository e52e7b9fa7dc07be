"""Bagged CART regression forest, written from first principles.

Trees grow greedily: at each node every feature is scanned in index order and
every midpoint between consecutive distinct sorted values is a candidate
threshold; the split minimizing the summed squared error of the two children
wins, ties going to the lower feature index and then the lower threshold.
Nodes smaller than min_samples_split, or with a constant target, or with all
features constant become leaves predicting the node mean. Bagging draws a
same-size bootstrap resample per tree from an RNG stream spawned off the
master seed, so tree t sees the same sample no matter how training is
scheduled. The hot loops are JIT-compiled; the array layout doubles as the
serialization format, and JSON float round-tripping keeps reloads bit-exact.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

MODEL_FORMAT_VERSION = 1

DEFAULT_N_TREES = 100
DEFAULT_MIN_SAMPLES_SPLIT = 50

LEAF = -1

BENCHMARK_HEADER = [
    "model", "dataset", "label_scheme",
    "mae", "mae_change_pct", "medae", "medae_change_pct",
]


class ManifestError(ValueError):
    """Prediction-time feature manifest does not match the trained one."""


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = DEFAULT_N_TREES
    min_samples_split: int = DEFAULT_MIN_SAMPLES_SPLIT
    bootstrap: bool = True
    seed: int = 0


@dataclass(frozen=True)
class Tree:
    """Flat node arrays; feature == LEAF marks a leaf predicting value."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray


@dataclass(frozen=True)
class EvalReport:
    mae: float
    medae: float
    dataset: str = ""
    scheme: str = ""

    def to_dict(self) -> dict:
        return {
            "mae": self.mae,
            "medae": self.medae,
            "dataset": self.dataset,
            "scheme": self.scheme,
        }


@njit(cache=True, nogil=True)
def _grow(vals, ys, ids, min_samples_split,
          feature, threshold, left, right, value,
          side, stack_node, stack_lo, stack_hi, stack_buf):  # pragma: no cover
    # vals/ys/ids are (2, F, n): per-feature node segments in ascending feature
    # order, double-buffered so a stable partition is a single sequential pass.
    # stack_buf remembers which buffer holds each pending node's segments.
    n_features = vals.shape[1]
    n = vals.shape[2]
    node_count = 1
    stack_node[0] = 0
    stack_lo[0] = 0
    stack_hi[0] = n
    stack_buf[0] = 0
    sp = 1
    while sp > 0:
        sp -= 1
        node = stack_node[sp]
        lo = stack_lo[sp]
        hi = stack_hi[sp]
        src = stack_buf[sp]
        dst = 1 - src
        m = hi - lo

        total = 0.0
        total_sq = 0.0
        y_min = ys[src, 0, lo]
        y_max = y_min
        for i in range(lo, hi):
            yv = ys[src, 0, i]
            total += yv
            total_sq += yv * yv
            if yv < y_min:
                y_min = yv
            if yv > y_max:
                y_max = yv

        feature[node] = LEAF
        left[node] = LEAF
        right[node] = LEAF
        threshold[node] = 0.0
        if y_min == y_max:
            value[node] = y_min  # pure node: keep the constant bit-exact
            continue
        value[node] = total / m
        if m < min_samples_split:
            continue

        best_cost = np.inf
        best_f = -1
        best_thr = 0.0
        for f in range(n_features):
            run_sum = 0.0
            run_sq = 0.0
            for i in range(lo, hi - 1):
                yv = ys[src, f, i]
                run_sum += yv
                run_sq += yv * yv
                xv = vals[src, f, i]
                xn = vals[src, f, i + 1]
                if xn > xv:
                    k = i - lo + 1
                    sse_left = run_sq - run_sum * run_sum / k
                    rest_sum = total - run_sum
                    rest_sq = total_sq - run_sq
                    sse_right = rest_sq - rest_sum * rest_sum / (m - k)
                    cost = sse_left + sse_right
                    if cost < best_cost:
                        thr = 0.5 * (xv + xn)
                        if thr >= xn:  # adjacent floats: keep the right side open
                            thr = xv
                        best_cost = cost
                        best_f = f
                        best_thr = thr
        if best_f < 0:
            continue  # every feature constant across the node

        n_left = 0
        for i in range(lo, hi):
            if vals[src, best_f, i] <= best_thr:
                side[ids[src, best_f, i]] = 1
                n_left += 1
            else:
                side[ids[src, best_f, i]] = 0
        for f in range(n_features):
            a = lo
            b = lo + n_left
            for i in range(lo, hi):
                row = ids[src, f, i]
                if side[row] == 1:
                    vals[dst, f, a] = vals[src, f, i]
                    ys[dst, f, a] = ys[src, f, i]
                    ids[dst, f, a] = row
                    a += 1
                else:
                    vals[dst, f, b] = vals[src, f, i]
                    ys[dst, f, b] = ys[src, f, i]
                    ids[dst, f, b] = row
                    b += 1

        left_id = node_count
        right_id = node_count + 1
        node_count += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = left_id
        right[node] = right_id
        stack_node[sp] = left_id
        stack_lo[sp] = lo
        stack_hi[sp] = lo + n_left
        stack_buf[sp] = dst
        sp += 1
        stack_node[sp] = right_id
        stack_lo[sp] = lo + n_left
        stack_hi[sp] = hi
        stack_buf[sp] = dst
        sp += 1
    return node_count


@njit(cache=True)
def _predict_tree(X, feature, threshold, left, right, value, out):  # pragma: no cover
    for i in range(X.shape[0]):
        node = 0
        while feature[node] != LEAF:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]


def _grow_tree(X: np.ndarray, y: np.ndarray, min_samples_split: int) -> Tree:
    n, n_features = X.shape
    vals = np.empty((2, n_features, n), dtype=np.float64)
    ys = np.empty((2, n_features, n), dtype=np.float64)
    ids = np.empty((2, n_features, n), dtype=np.int32)
    for f in range(n_features):
        order = np.argsort(X[:, f], kind="stable")
        vals[0, f] = X[order, f]
        ys[0, f] = y[order]
        ids[0, f] = order
    cap = 2 * n + 1
    feature = np.empty(cap, dtype=np.int64)
    threshold = np.empty(cap, dtype=np.float64)
    left = np.empty(cap, dtype=np.int64)
    right = np.empty(cap, dtype=np.int64)
    value = np.empty(cap, dtype=np.float64)
    count = _grow(
        vals, ys, ids, min_samples_split,
        feature, threshold, left, right, value,
        np.zeros(n, dtype=np.uint8),
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
        np.empty(cap, dtype=np.int64),
    )
    return Tree(
        feature=feature[:count].copy(),
        threshold=threshold[:count].copy(),
        left=left[:count].copy(),
        right=right[:count].copy(),
        value=value[:count].copy(),
    )


@dataclass
class RegressionForest:
    """A trained forest plus the feature manifest it was fit on."""

    config: ForestConfig
    variant: str
    columns: list[str]
    trees: list[Tree] = field(default_factory=list)

    @classmethod
    def fit(cls, matrix, labels: np.ndarray, config: ForestConfig | None = None
            ) -> "RegressionForest":
        """Train on a FeatureMatrix and aligned labels.

        Per-tree sample streams come from SeedSequence children of the master
        seed: tree t's bootstrap is a pure function of (seed, t).
        """
        config = config or ForestConfig()
        X = np.ascontiguousarray(matrix.values, dtype=np.float64)
        y = np.ascontiguousarray(labels, dtype=np.float64)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ValueError("features and labels are misaligned")
        if X.shape[0] == 0:
            raise ValueError("cannot fit on an empty dataset")
        n = X.shape[0]
        seeds = np.random.SeedSequence(config.seed).spawn(config.n_trees)
        trees = []
        for t in range(config.n_trees):
            if config.bootstrap:
                rng = np.random.Generator(np.random.PCG64(seeds[t]))
                idx = rng.integers(0, n, size=n)
                Xb = X[idx]
                yb = y[idx]
            else:
                Xb = X
                yb = y
            trees.append(_grow_tree(Xb, yb, config.min_samples_split))
        return cls(
            config=config,
            variant=matrix.variant,
            columns=list(matrix.columns),
            trees=trees,
        )

    def predict(self, matrix) -> np.ndarray:
        """Mean of the trees' predictions; refuses a mismatched manifest."""
        if matrix.variant != self.variant or list(matrix.columns) != self.columns:
            raise ManifestError(
                f"matrix manifest ({matrix.variant}, {len(matrix.columns)} cols) "
                f"does not match model ({self.variant}, {len(self.columns)} cols)"
            )
        X = np.ascontiguousarray(matrix.values, dtype=np.float64)
        per_tree = np.empty((len(self.trees), X.shape[0]), dtype=np.float64)
        for t, tree in enumerate(self.trees):
            _predict_tree(
                X, tree.feature, tree.threshold, tree.left, tree.right,
                tree.value, per_tree[t],
            )
        return per_tree.mean(axis=0)

    def save(self, path: str | Path) -> None:
        payload = {
            "format_version": MODEL_FORMAT_VERSION,
            "config": {
                "n_trees": self.config.n_trees,
                "min_samples_split": self.config.min_samples_split,
                "bootstrap": self.config.bootstrap,
                "seed": self.config.seed,
            },
            "manifest": {"variant": self.variant, "columns": self.columns},
            "trees": [
                {
                    "feature": tree.feature.tolist(),
                    "threshold": tree.threshold.tolist(),
                    "left": tree.left.tolist(),
                    "right": tree.right.tolist(),
                    "value": tree.value.tolist(),
                }
                for tree in self.trees
            ],
        }
        with open(Path(path), "w") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path: str | Path) -> "RegressionForest":
        with open(Path(path)) as fh:
            payload = json.load(fh)
        version = payload.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version: {version!r}")
        cfg = payload["config"]
        trees = [
            Tree(
                feature=np.asarray(t["feature"], dtype=np.int64),
                threshold=np.asarray(t["threshold"], dtype=np.float64),
                left=np.asarray(t["left"], dtype=np.int64),
                right=np.asarray(t["right"], dtype=np.int64),
                value=np.asarray(t["value"], dtype=np.float64),
            )
            for t in payload["trees"]
        ]
        return cls(
            config=ForestConfig(
                n_trees=cfg["n_trees"],
                min_samples_split=cfg["min_samples_split"],
                bootstrap=cfg["bootstrap"],
                seed=cfg["seed"],
            ),
            variant=payload["manifest"]["variant"],
            columns=list(payload["manifest"]["columns"]),
            trees=trees,
        )


def evaluate(
    predictions: np.ndarray,
    labels: np.ndarray,
    dataset: str = "",
    scheme: str = "",
) -> EvalReport:
    """Mean and median absolute error of predictions against labels."""
    predictions = np.asarray(predictions, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if predictions.shape != labels.shape:
        raise ValueError("predictions and labels are misaligned")
    if predictions.size == 0:
        raise ValueError("cannot evaluate an empty set")
    err = np.abs(predictions - labels)
    return EvalReport(
        mae=float(err.mean()),
        medae=float(np.median(err)),
        dataset=dataset,
        scheme=scheme,
    )


def benchmark_rows(
    reports: dict[tuple[str, str, str], EvalReport],
    baseline_scheme: str = "k10",
    target_scheme: str = "eq1",
) -> list[dict[str, str]]:
    """Tabulate per (model, dataset) how the target label scheme moves the error.

    Keys are (variant, dataset, scheme). Change columns are percentages
    relative to the baseline scheme's row and stay empty on baseline rows.
    """
    rows: list[dict[str, str]] = []
    pairs = sorted({(v, d) for v, d, _ in reports})
    for variant, dataset in pairs:
        base = reports.get((variant, dataset, baseline_scheme))
        for scheme in (baseline_scheme, target_scheme):
            report = reports.get((variant, dataset, scheme))
            if report is None:
                continue
            if scheme == baseline_scheme or base is None:
                mae_change = medae_change = ""
            else:
                mae_change = f"{100.0 * (report.mae - base.mae) / base.mae:+.2f}"
                medae_change = f"{100.0 * (report.medae - base.medae) / base.medae:+.2f}"
            rows.append(
                {
                    "model": variant,
                    "dataset": dataset,
                    "label_scheme": scheme,
                    "mae": repr(report.mae),
                    "mae_change_pct": mae_change,
                    "medae": repr(report.medae),
                    "medae_change_pct": medae_change,
                }
            )
    return rows


def write_benchmark(rows: list[dict[str, str]], path: str | Path) -> None:
    """Export a benchmark comparison table as CSV."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCHMARK_HEADER, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
