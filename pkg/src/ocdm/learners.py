"""Self-contained decision tree and random forest learners.

Classification trees split on Gini impurity, regression trees on variance
reduction; numeric thresholds sit at midpoints of adjacent distinct values
and categorical features are split ordinally on their integer codes
(sorted label order).  Everything is deterministic given a seed, including
split tie-breaking: the earliest feature, then the lowest threshold, wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np


class LearnerError(Exception):
    pass


class EmptyDataset(LearnerError):
    pass


class MixedKinds(LearnerError):
    pass


class TooFewSamples(LearnerError):
    pass


@dataclass(frozen=True)
class LearnerConfig:
    n_trees: int = 100
    bootstrap: bool = True
    feature_subsample: int | None = None  # None = ceil(sqrt(#features)) per split
    max_depth: int | None = None
    min_leaf: int = 1
    cv_folds: int = 5
    regression_tolerance: float = 0.05


# ---------------------------------------------------------------------------
# feature encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeatureEncoding:
    """Invertible value <-> float mapping for one feature."""

    kind: str  # "numeric" | "boolean" | "categorical"
    labels: tuple[str, ...] = ()  # categorical: sorted label order -> code

    def encode(self, value: object) -> float:
        if self.kind == "numeric":
            return float(value)
        if self.kind == "boolean":
            return 1.0 if value else 0.0
        return float(self.labels.index(str(value)))

    def decode(self, code: float) -> object:
        if self.kind == "numeric":
            return code
        if self.kind == "boolean":
            return bool(round(code))
        return self.labels[int(round(code))]


@dataclass(frozen=True)
class EncodedDataset:
    rows: np.ndarray  # (n, f) float matrix
    target: np.ndarray  # (n,) float (regression) or int codes (classification)
    feature_names: tuple[str, ...]
    encodings: Mapping[str, FeatureEncoding]
    target_kind: str  # "classification" | "regression"
    target_encoding: FeatureEncoding

    @property
    def n_rows(self) -> int:
        return int(self.rows.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.rows.shape[1])

    def decode_target(self, value: float) -> object:
        return self.target_encoding.decode(value)


def _column_encoding(values: list[object], name: str) -> FeatureEncoding:
    if all(isinstance(v, bool) for v in values):
        return FeatureEncoding(kind="boolean")
    if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        return FeatureEncoding(kind="numeric")
    if all(isinstance(v, str) for v in values):
        return FeatureEncoding(kind="categorical", labels=tuple(sorted(set(values))))
    raise MixedKinds(f"attribute {name!r} mixes numeric and categorical values")


def encode_features(
    raw_rows: Sequence[Mapping[str, object]], target: str
) -> EncodedDataset:
    """Encode attribute dictionaries into a numeric matrix.

    Categorical labels map to integers in sorted label order, booleans to
    0/1, numerics pass through.  The target becomes a regression target
    exactly when its values are numeric.
    """
    if not raw_rows:
        raise EmptyDataset("no rows to encode")
    for row in raw_rows:
        if target not in row:
            raise EmptyDataset(f"target {target!r} missing from a row")
    feature_names = tuple(sorted(k for k in raw_rows[0] if k != target))
    for row in raw_rows:
        if tuple(sorted(k for k in row if k != target)) != feature_names:
            raise MixedKinds("rows do not share the same attribute set")

    encodings: dict[str, FeatureEncoding] = {}
    for name in feature_names:
        encodings[name] = _column_encoding([row[name] for row in raw_rows], name)
    target_encoding = _column_encoding([row[target] for row in raw_rows], target)
    target_kind = "regression" if target_encoding.kind == "numeric" else "classification"

    matrix = np.empty((len(raw_rows), len(feature_names)), dtype=float)
    for i, row in enumerate(raw_rows):
        for j, name in enumerate(feature_names):
            matrix[i, j] = encodings[name].encode(row[name])
    target_values = np.array(
        [target_encoding.encode(row[target]) for row in raw_rows], dtype=float
    )
    if target_kind == "classification":
        target_values = target_values.astype(np.int64)

    return EncodedDataset(
        rows=matrix,
        target=target_values,
        feature_names=feature_names,
        encodings=encodings,
        target_kind=target_kind,
        target_encoding=target_encoding,
    )


# ---------------------------------------------------------------------------
# decision tree
# ---------------------------------------------------------------------------


@dataclass
class TreeNode:
    n_samples: int
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    value: float = 0.0  # class code or regression mean

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class DecisionTree:
    root: TreeNode
    kind: str  # "classification" | "regression"
    n_classes: int
    depth: int
    training_accuracy: float
    feature_names: tuple[str, ...] = ()

    def predict_row(self, row: np.ndarray) -> float:
        node = self.root
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.value

    def predict(self, rows: np.ndarray) -> np.ndarray:
        return np.array([self.predict_row(row) for row in rows])

    def leaves(self) -> list[TreeNode]:
        out: list[TreeNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend([node.right, node.left])
        return out


def _leaf_value(y: np.ndarray, kind: str, n_classes: int) -> float:
    if kind == "regression":
        return float(y.mean())
    counts = np.bincount(y.astype(np.int64), minlength=n_classes)
    return float(np.argmax(counts))  # argmax takes the lowest class on ties


def _impurity(y: np.ndarray, kind: str) -> float:
    if kind == "regression":
        return float(y.var()) if len(y) else 0.0
    _, counts = np.unique(y, return_counts=True)
    p = counts / len(y)
    return float(1.0 - (p * p).sum())


def _best_split_for_feature(
    column: np.ndarray, y: np.ndarray, kind: str, min_leaf: int
) -> tuple[float, float] | None:
    """Best (score, threshold) along one feature; lower score is better."""
    order = np.argsort(column, kind="stable")
    xs = column[order]
    ys = y[order]
    n = len(ys)
    # Positions where the sorted value changes; split between them.
    change = np.nonzero(np.diff(xs) > 0)[0]
    if len(change) == 0:
        return None

    best: tuple[float, float] | None = None
    if kind == "regression":
        csum = np.cumsum(ys)
        csq = np.cumsum(ys * ys)
        for idx in change:
            nl = idx + 1
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            left_var = csq[idx] - csum[idx] ** 2 / nl
            right_sum = csum[-1] - csum[idx]
            right_var = (csq[-1] - csq[idx]) - right_sum**2 / nr
            score = (left_var + right_var) / n
            threshold = (xs[idx] + xs[idx + 1]) / 2.0
            if best is None or score < best[0] - 1e-12:
                best = (float(score), float(threshold))
    else:
        classes = np.unique(ys)
        onehot = (ys[:, None] == classes[None, :]).astype(float)
        cum = np.cumsum(onehot, axis=0)
        total = cum[-1]
        for idx in change:
            nl = idx + 1
            nr = n - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            left = cum[idx]
            right = total - left
            gini_left = 1.0 - ((left / nl) ** 2).sum()
            gini_right = 1.0 - ((right / nr) ** 2).sum()
            score = (nl * gini_left + nr * gini_right) / n
            threshold = (xs[idx] + xs[idx + 1]) / 2.0
            if best is None or score < best[0] - 1e-12:
                best = (float(score), float(threshold))
    return best


def _grow(
    rows: np.ndarray,
    y: np.ndarray,
    kind: str,
    n_classes: int,
    config: LearnerConfig,
    rng: np.random.Generator | None,
    depth: int,
) -> tuple[TreeNode, int]:
    node = TreeNode(n_samples=len(y), value=_leaf_value(y, kind, n_classes))
    if (
        len(y) < 2 * config.min_leaf
        or _impurity(y, kind) <= 1e-12
        or (config.max_depth is not None and depth >= config.max_depth)
    ):
        return node, depth

    n_features = rows.shape[1]
    if rng is not None and config.feature_subsample is not None:
        k = min(config.feature_subsample, n_features)
        features = np.sort(rng.choice(n_features, size=k, replace=False))
    else:
        features = np.arange(n_features)

    best: tuple[float, int, float] | None = None  # (score, feature, threshold)
    for feature in features:
        found = _best_split_for_feature(rows[:, feature], y, kind, config.min_leaf)
        if found is None:
            continue
        score, threshold = found
        if best is None or score < best[0] - 1e-12:
            best = (score, int(feature), threshold)
    if best is None:
        return node, depth

    _, feature, threshold = best
    mask = rows[:, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left, dl = _grow(rows[mask], y[mask], kind, n_classes, config, rng, depth + 1)
    node.right, dr = _grow(rows[~mask], y[~mask], kind, n_classes, config, rng, depth + 1)
    return node, max(dl, dr)


def train_decision_tree(
    ds: EncodedDataset, config: LearnerConfig | None = None
) -> DecisionTree:
    """Greedy CART fit on the full dataset with all features."""
    config = config or LearnerConfig()
    if ds.n_rows == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    n_classes = (
        int(ds.target.max()) + 1 if ds.target_kind == "classification" else 0
    )
    root, depth = _grow(ds.rows, ds.target, ds.target_kind, n_classes, config, None, 0)
    tree = DecisionTree(
        root=root,
        kind=ds.target_kind,
        n_classes=n_classes,
        depth=depth,
        training_accuracy=0.0,
        feature_names=ds.feature_names,
    )
    tree.training_accuracy = _accuracy(
        tree.predict(ds.rows), ds.target, ds.target_kind, config.regression_tolerance
    )
    return tree


# ---------------------------------------------------------------------------
# random forest
# ---------------------------------------------------------------------------


@dataclass
class RandomForest:
    trees: list[DecisionTree]
    kind: str
    n_classes: int
    feature_subsample: int
    seed: int
    feature_names: tuple[str, ...] = ()

    def predict(self, rows: np.ndarray) -> np.ndarray:
        votes = np.stack([tree.predict(rows) for tree in self.trees])
        if self.kind == "regression":
            return votes.mean(axis=0)
        out = np.empty(rows.shape[0], dtype=np.int64)
        for i in range(rows.shape[0]):
            counts = np.bincount(votes[:, i].astype(np.int64), minlength=self.n_classes)
            out[i] = int(np.argmax(counts))
        return out


def train_random_forest(
    ds: EncodedDataset, config: LearnerConfig | None = None, seed: int = 0
) -> RandomForest:
    """Bootstrap-aggregated trees with per-split feature subsampling."""
    config = config or LearnerConfig()
    if ds.n_rows == 0:
        raise EmptyDataset("cannot train on an empty dataset")
    n_classes = (
        int(ds.target.max()) + 1 if ds.target_kind == "classification" else 0
    )
    subsample = config.feature_subsample
    if subsample is None:
        subsample = max(1, math.ceil(math.sqrt(ds.n_features)))
    per_split = config.feature_subsample is not None or config.n_trees > 1

    rng = np.random.default_rng(seed)
    trees: list[DecisionTree] = []
    for _ in range(config.n_trees):
        tree_rng = np.random.default_rng(rng.integers(0, 2**63 - 1))
        if config.bootstrap:
            idx = tree_rng.integers(0, ds.n_rows, size=ds.n_rows)
        else:
            idx = np.arange(ds.n_rows)
        rows = ds.rows[idx]
        y = ds.target[idx]
        grow_config = LearnerConfig(
            n_trees=1,
            bootstrap=False,
            feature_subsample=subsample if per_split else None,
            max_depth=config.max_depth,
            min_leaf=config.min_leaf,
        )
        root, depth = _grow(
            rows,
            y,
            ds.target_kind,
            n_classes,
            grow_config,
            tree_rng if per_split else None,
            0,
        )
        tree = DecisionTree(
            root=root,
            kind=ds.target_kind,
            n_classes=n_classes,
            depth=depth,
            training_accuracy=0.0,
            feature_names=ds.feature_names,
        )
        trees.append(tree)
    return RandomForest(
        trees=trees,
        kind=ds.target_kind,
        n_classes=n_classes,
        feature_subsample=subsample,
        seed=seed,
        feature_names=ds.feature_names,
    )


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _accuracy(
    predicted: np.ndarray, truth: np.ndarray, kind: str, tolerance: float
) -> float:
    if kind == "classification":
        return float((predicted == truth).mean())
    with np.errstate(invalid="ignore"):
        ok = np.abs(predicted - truth) <= tolerance * np.abs(truth)
    exact = (truth == 0) & (predicted == 0)
    return float((ok | exact).mean())


def _fold_assignment(
    ds: EncodedDataset, folds: int, rng: np.random.Generator
) -> np.ndarray:
    """Deterministic stratified fold labels (plain shuffled folds for regression)."""
    assignment = np.empty(ds.n_rows, dtype=np.int64)
    if ds.target_kind == "classification":
        for cls in np.unique(ds.target):
            members = np.nonzero(ds.target == cls)[0]
            members = members[rng.permutation(len(members))]
            assignment[members] = np.arange(len(members)) % folds
    else:
        order = rng.permutation(ds.n_rows)
        assignment[order] = np.arange(ds.n_rows) % folds
    return assignment


def evaluate_accuracy(
    config: LearnerConfig, ds: EncodedDataset, folds: int = 5, seed: int = 0
) -> float:
    """Mean k-fold cross-validated forest accuracy.

    Classification folds are stratified; regression accuracy counts
    predictions within the configured relative tolerance of the truth.
    """
    if folds < 2:
        raise TooFewSamples("need at least 2 folds")
    if ds.n_rows < folds:
        raise TooFewSamples(f"{ds.n_rows} rows cannot fill {folds} folds")
    rng = np.random.default_rng(seed)
    assignment = _fold_assignment(ds, folds, rng)
    scores: list[float] = []
    for fold in range(folds):
        test_mask = assignment == fold
        if not test_mask.any() or test_mask.all():
            continue
        train = EncodedDataset(
            rows=ds.rows[~test_mask],
            target=ds.target[~test_mask],
            feature_names=ds.feature_names,
            encodings=ds.encodings,
            target_kind=ds.target_kind,
            target_encoding=ds.target_encoding,
        )
        forest = train_random_forest(train, config, seed=int(rng.integers(0, 2**31)))
        predicted = forest.predict(ds.rows[test_mask])
        scores.append(
            _accuracy(
                predicted, ds.target[test_mask], ds.target_kind, config.regression_tolerance
            )
        )
    return float(np.mean(scores))


# ---------------------------------------------------------------------------
# rule extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Condition:
    """One feature constraint of a rule, already decoded to labels."""

    feature: str
    kind: str  # "numeric" | "boolean" | "categorical"
    low: float = -math.inf  # numeric: low < x <= high
    high: float = math.inf
    allowed: tuple[object, ...] = ()  # boolean/categorical membership

    def matches(self, value: object) -> bool:
        if self.kind == "numeric":
            return self.low < float(value) <= self.high  # type: ignore[arg-type]
        return value in self.allowed

    def describe(self) -> str:
        if self.kind == "numeric":
            if self.low == -math.inf:
                return f"{self.feature} <= {self.high:g}"
            if self.high == math.inf:
                return f"{self.feature} > {self.low:g}"
            return f"{self.low:g} < {self.feature} <= {self.high:g}"
        if len(self.allowed) == 1:
            return f"{self.feature} = {self.allowed[0]}"
        return f"{self.feature} in {{{', '.join(str(v) for v in sorted(map(str, self.allowed)))}}}"


@dataclass(frozen=True)
class Rule:
    conditions: tuple[Condition, ...]
    outcome: object
    support: int

    def matches(self, assignment: Mapping[str, object]) -> bool:
        return all(c.matches(assignment[c.feature]) for c in self.conditions)

    def describe(self) -> str:
        if not self.conditions:
            return f"IF TRUE THEN {self.outcome}"
        clauses = " AND ".join(c.describe() for c in self.conditions)
        return f"IF {clauses} THEN {self.outcome}"


@dataclass(frozen=True)
class RuleList:
    rules: tuple[Rule, ...]
    target: str = ""

    def predict(self, assignment: Mapping[str, object]) -> object:
        fired = [r for r in self.rules if r.matches(assignment)]
        if len(fired) != 1:
            raise LearnerError(
                f"{len(fired)} rules fire for {dict(assignment)!r}; expected exactly 1"
            )
        return fired[0].outcome

    def __iter__(self):
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)


def _interval_to_condition(
    feature: str, encoding: FeatureEncoding, low: float, high: float
) -> Condition:
    if encoding.kind == "numeric":
        return Condition(feature=feature, kind="numeric", low=low, high=high)
    if encoding.kind == "boolean":
        allowed = tuple(b for b in (False, True) if low < float(b) <= high)
        return Condition(feature=feature, kind="boolean", allowed=allowed)
    allowed = tuple(
        label for code, label in enumerate(encoding.labels) if low < code <= high
    )
    return Condition(feature=feature, kind="categorical", allowed=allowed)


def tree_to_rules(
    tree: DecisionTree, encodings: Mapping[str, FeatureEncoding], target_encoding: FeatureEncoding | None = None, target: str = ""
) -> RuleList:
    """One IF-THEN rule per leaf, decoded back to original labels.

    The rules partition the feature space: exactly one rule fires for any
    assignment over the tree's features.
    """
    rules: list[Rule] = []

    def walk(node: TreeNode, bounds: dict[str, tuple[float, float]]) -> None:
        if node.is_leaf:
            conditions = []
            for feature in tree.feature_names:
                if feature not in bounds:
                    continue
                low, high = bounds[feature]
                conditions.append(
                    _interval_to_condition(feature, encodings[feature], low, high)
                )
            outcome: object = node.value
            if tree.kind == "classification" and target_encoding is not None:
                outcome = target_encoding.decode(node.value)
            rules.append(
                Rule(conditions=tuple(conditions), outcome=outcome, support=node.n_samples)
            )
            return
        feature = tree.feature_names[node.feature]
        low, high = bounds.get(feature, (-math.inf, math.inf))
        left_bounds = dict(bounds)
        left_bounds[feature] = (low, min(high, node.threshold))
        walk(node.left, left_bounds)
        right_bounds = dict(bounds)
        right_bounds[feature] = (max(low, node.threshold), high)
        walk(node.right, right_bounds)

    walk(tree.root, {})
    return RuleList(rules=tuple(rules), target=target)
