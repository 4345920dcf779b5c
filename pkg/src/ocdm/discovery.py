"""Decision-structure discovery over a DOCEL log.

Mining proceeds in three stages: seed one candidate decision per output
node (attribute, activity, object type, shift number), recursively attach
input nodes whose earlier shifts correlate with the decision's values over
related objects, then consolidate candidates with overlapping trace
coverage into predictive models and keep a model only when its
cross-validated random-forest accuracy clears the support threshold.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

from .correlation import TooFewSamples as CorrelationTooFewSamples
from .correlation import correlate
from .docel import DocelLog, UnknownObjectError, validate_log
from .learners import (
    DecisionTree,
    EncodedDataset,
    LearnerConfig,
    RandomForest,
    TooFewSamples,
    encode_features,
    evaluate_accuracy,
    train_decision_tree,
    train_random_forest,
)
from .shifts import (
    Ataots,
    ShiftIndex,
    TraceSet,
    build_shift_index,
    candidate_variables,
    enumerate_ataots,
    traces_with_shift,
)


class MiningError(Exception):
    pass


class InvalidConfig(MiningError):
    pass


class InvalidLog(MiningError):
    pass


@dataclass(frozen=True)
class MiningConfig:
    """The six discovery thresholds plus learner settings and RNG seed."""

    min_shift: float = 0.2
    max_shift: int = 3
    min_traceprop: float = 0.3
    min_corr: float = 0.3
    min_dev: float = 0.3
    min_support: float = 0.3
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    rng_seed: int = 42
    max_recursion_depth: int = 10

    def check(self) -> None:
        for name in ("min_shift", "min_traceprop", "min_corr", "min_dev", "min_support"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvalidConfig(f"{name} must be in [0, 1], got {value}")
        if self.max_shift < 1:
            raise InvalidConfig(f"max_shift must be >= 1, got {self.max_shift}")
        if self.max_recursion_depth < 1:
            raise InvalidConfig("max_recursion_depth must be >= 1")


@dataclass
class PredictiveModel:
    """Trained forest (the gate) plus a single tree for inspection."""

    output: Ataots
    inputs: tuple[Ataots, ...]
    dataset: EncodedDataset
    forest: RandomForest
    tree: DecisionTree
    accuracy: float
    target_name: str
    feature_map: Mapping[Ataots, str]


@dataclass
class DiscoveredDecision:
    node: Ataots
    input_nodes: frozenset[Ataots]
    trace_set: TraceSet
    model_key: Ataots | None = None


@dataclass
class DiscoveredDrd:
    """One discovered decision requirements diagram."""

    top: Ataots
    trace_set: TraceSet
    decisions: dict[Ataots, DiscoveredDecision] = field(default_factory=dict)
    edges: dict[tuple[Ataots, Ataots], int] = field(default_factory=dict)
    models: dict[Ataots, PredictiveModel] = field(default_factory=dict)
    correlations: dict[tuple[Ataots, Ataots], float] = field(default_factory=dict)

    @property
    def nodes(self) -> set[Ataots]:
        out = {self.top}
        for source, target in self.edges:
            out.add(source)
            out.add(target)
        return out

    @property
    def input_nodes(self) -> set[Ataots]:
        return {n for n in self.nodes if n not in self.models}

    def signature(self) -> tuple[frozenset[Ataots], frozenset[tuple[Ataots, Ataots]]]:
        return frozenset(self.nodes), frozenset(self.edges)

    def reaches(self, source: Ataots, target: Ataots) -> bool:
        """True when ``target`` is reachable from ``source`` along edges."""
        stack = [source]
        seen = set()
        while stack:
            node = stack.pop()
            if node == target:
                return True
            if node in seen:
                continue
            seen.add(node)
            stack.extend(t for (s, t) in self.edges if s == node)
        return False

    def clone(self, trace_set: TraceSet) -> "DiscoveredDrd":
        return DiscoveredDrd(
            top=self.top,
            trace_set=trace_set,
            decisions=dict(self.decisions),
            edges=dict(self.edges),
            models=dict(self.models),
            correlations=dict(self.correlations),
        )


@dataclass(frozen=True)
class CandidateEvaluation:
    """One candidate input node paired against a decision node."""

    node: Ataots
    covered: frozenset[str]  # top-side objects with at least one valid pair
    correlation: float
    # per top object: [(partner object, input value)] in deterministic order
    pairs: Mapping[str, tuple[tuple[str, object], ...]]


@dataclass
class CandidateModelSet:
    """Candidates ranked by decreasing trace coverage."""

    entries: list[CandidateEvaluation]

    def __post_init__(self) -> None:
        self.entries.sort(key=lambda c: (-len(c.covered), c.node))


@dataclass(frozen=True)
class ModelEvaluation:
    """Diagnostic record of one support-gate decision."""

    output: Ataots
    inputs: tuple[Ataots, ...]
    trace_count: int
    accuracy: float
    accepted: bool


def related_objects(
    index: ShiftIndex, log: DocelLog, o: str, object_type2: str
) -> set[str]:
    """Objects of ``object_type2`` co-occurring with ``o`` in its trace."""
    if o not in log.objects:
        raise UnknownObjectError(f"unknown object id {o!r}")
    out: set[str] = set()
    for eid in index.traces[o]:
        refs = log.event(eid).object_refs.get(object_type2)
        if refs:
            out.update(refs)
    return out


def find_input_models(
    candidates: CandidateModelSet, config: MiningConfig, type_total: int
) -> list[tuple[tuple[Ataots, ...], frozenset[str]]]:
    """Consolidate overlapping candidates into model groups.

    Identical trace sets merge; subsets that still clear the trace
    proportion spawn a model on the subset; partial overlaps passing the
    deviation ratio contribute a model on the uncovered difference; and
    candidates reaching uncovered traces initialize new models.
    """
    models: list[tuple[list[Ataots], frozenset[str]]] = []
    cov: set[str] = set()
    bound = config.min_traceprop * type_total

    for entry in candidates.entries:
        t = entry.covered
        for inputs, t_m in list(models):
            if t == t_m:
                if entry.node not in inputs:
                    inputs.append(entry.node)
            elif t < t_m and len(t) > bound:
                models.append(([*inputs, entry.node], t))
            elif t & t_m and not (t <= t_m) and len(t & t_m) / len(t) > config.min_dev:
                difference = t - t_m
                if difference:
                    models.append(([*inputs, entry.node], frozenset(difference)))
                    cov |= t
        if not (t <= cov) and len(t) > bound:
            models.append(([entry.node], t))
            cov |= t

    out: list[tuple[tuple[Ataots, ...], frozenset[str]]] = []
    seen: set[tuple[tuple[Ataots, ...], frozenset[str]]] = set()
    for inputs, t_m in models:
        key = (tuple(sorted(inputs)), t_m)
        if key not in seen:
            seen.add(key)
            out.append(key)
    # Re-rank after consolidation: widest coverage first.
    out.sort(key=lambda m: (-len(m[1]), m[0]))
    return out


def _derived_seed(base: int, *parts: object) -> int:
    digest = hashlib.sha256(repr((base, parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def _feature_names(
    inputs: Sequence[Ataots], target_attribute: str
) -> dict[Ataots, str]:
    """Stable, collision-free feature names (plain attribute names when possible)."""
    names: dict[Ataots, str] = {}
    attribute_counts: dict[str, int] = {}
    for node in inputs:
        attribute_counts[node.attribute] = attribute_counts.get(node.attribute, 0) + 1
    for node in inputs:
        name = node.attribute
        if attribute_counts[node.attribute] > 1 or name == target_attribute:
            name = f"{node.attribute}_shift-{node.shift_number} ({node.activity})"
        names[node] = name
    return names


def build_predictive_model(
    inputs: Sequence[Ataots],
    output: Ataots,
    traces: TraceSet,
    index: ShiftIndex,
    log: DocelLog,
    config: MiningConfig,
) -> tuple[PredictiveModel, float] | None:
    """Train and cross-validate a forest for ``output`` from ``inputs``.

    One training row per supporting object: each input contributes the value
    written at its shift (taken from the first related object with a shift
    strictly preceding the output's), the target the value written at the
    output's shift.  Returns None when fewer than two complete rows exist.
    """
    inputs = sorted(inputs)
    if not inputs:
        return None
    target_name = output.attribute
    feature_map = _feature_names(inputs, target_name)

    raw_rows: list[dict[str, object]] = []
    kept_objects: list[str] = []
    for o in sorted(traces.object_ids):
        out_events = index.shift_events(output.attribute, output.activity, o)
        if len(out_events) < output.shift_number:
            continue
        out_pos = log.event_position(out_events[output.shift_number - 1])
        row: dict[str, object] = {}
        complete = True
        for node in inputs:
            value = None
            for o2 in sorted(related_objects(index, log, o, node.object_type)):
                in_events = index.shift_events(node.attribute, node.activity, o2)
                if len(in_events) < node.shift_number:
                    continue
                in_pos = log.event_position(in_events[node.shift_number - 1])
                if in_pos < out_pos:
                    value = index.shift_value(
                        node.attribute, node.activity, o2, node.shift_number
                    )
                    break
            if value is None:
                complete = False
                break
            row[feature_map[node]] = value
        if not complete:
            continue
        row[target_name] = index.shift_value(
            output.attribute, output.activity, o, output.shift_number
        )
        raw_rows.append(row)
        kept_objects.append(o)

    if len(raw_rows) < 2:
        return None
    dataset = encode_features(raw_rows, target=target_name)
    seed = _derived_seed(config.rng_seed, "model", output, tuple(inputs))
    try:
        accuracy = evaluate_accuracy(
            config.learner, dataset, folds=config.learner.cv_folds, seed=seed
        )
    except TooFewSamples:
        return None
    forest = train_random_forest(dataset, config.learner, seed=seed + 1)
    tree_config = replace(config.learner, n_trees=1, bootstrap=False, feature_subsample=None)
    tree = train_decision_tree(dataset, tree_config)
    model = PredictiveModel(
        output=output,
        inputs=tuple(inputs),
        dataset=dataset,
        forest=forest,
        tree=tree,
        accuracy=accuracy,
        target_name=target_name,
        feature_map=feature_map,
    )
    return model, accuracy


class _Miner:
    """Single-run mining state; immutable log and index, private DRDs."""

    def __init__(
        self,
        log: DocelLog,
        config: MiningConfig,
        diagnostics: list[ModelEvaluation] | None = None,
    ):
        self.log = log
        self.config = config
        self.index = build_shift_index(log)
        self.variables = candidate_variables(self.index, log, config.min_shift)
        self.universe = enumerate_ataots(self.index, self.variables, config.max_shift)
        self.diagnostics = diagnostics
        self._related_cache: dict[tuple[str, str], set[str]] = {}

    def related(self, o: str, object_type: str) -> set[str]:
        key = (o, object_type)
        if key not in self._related_cache:
            self._related_cache[key] = related_objects(self.index, self.log, o, object_type)
        return self._related_cache[key]

    # -- candidate pairing ---------------------------------------------------

    def evaluate_candidate(
        self, node: Ataots, candidate: Ataots, trace_objects: frozenset[str]
    ) -> CandidateEvaluation | None:
        """Pair a candidate's earlier shifts against the node's shifts."""
        input_values: list[object] = []
        output_values: list[object] = []
        pairs: dict[str, list[tuple[str, object]]] = {}
        for o in sorted(trace_objects):
            out_events = self.index.shift_events(node.attribute, node.activity, o)
            if len(out_events) < node.shift_number:
                continue
            out_pos = self.log.event_position(out_events[node.shift_number - 1])
            out_value = self.index.shift_value(
                node.attribute, node.activity, o, node.shift_number
            )
            for o2 in sorted(self.related(o, candidate.object_type)):
                in_events = self.index.shift_events(
                    candidate.attribute, candidate.activity, o2
                )
                if len(in_events) < candidate.shift_number:
                    continue
                in_pos = self.log.event_position(in_events[candidate.shift_number - 1])
                if in_pos >= out_pos:
                    continue
                value = self.index.shift_value(
                    candidate.attribute, candidate.activity, o2, candidate.shift_number
                )
                input_values.append(value)
                output_values.append(out_value)
                pairs.setdefault(o, []).append((o2, value))
        if not pairs:
            return None
        covered = frozenset(pairs)
        total = self.index.object_type_counts.get(node.object_type, 0)
        if len(covered) <= self.config.min_traceprop * total:
            return None
        try:
            score = correlate(input_values, output_values)
        except CorrelationTooFewSamples:
            return None
        if score <= self.config.min_corr:
            return None
        return CandidateEvaluation(
            node=candidate,
            covered=covered,
            correlation=score,
            pairs={o: tuple(v) for o, v in pairs.items()},
        )

    # -- recursion -----------------------------------------------------------

    def expand(
        self,
        node: Ataots,
        drd: DiscoveredDrd,
        path: tuple[Ataots, ...],
        expanded: set[Ataots],
        collector: list[DiscoveredDrd],
    ) -> None:
        if node in expanded or len(path) > self.config.max_recursion_depth:
            return
        expanded.add(node)

        evaluations: list[CandidateEvaluation] = []
        for candidate in self.universe:
            if candidate == node or candidate in path:
                continue
            evaluation = self.evaluate_candidate(
                node, candidate, drd.trace_set.object_ids
            )
            if evaluation is not None:
                evaluations.append(evaluation)
        if not evaluations:
            return

        candidate_set = CandidateModelSet(evaluations)
        by_node = {c.node: c for c in candidate_set.entries}
        total = self.index.object_type_counts.get(node.object_type, 0)
        groups = find_input_models(candidate_set, self.config, total)

        for inputs, t_m in groups:
            trace_set = TraceSet(object_ids=t_m, anchor=node)
            built = build_predictive_model(
                inputs, node, trace_set, self.index, self.log, self.config
            )
            if built is None:
                continue
            model, accuracy = built
            accepted = accuracy > self.config.min_support
            if self.diagnostics is not None:
                self.diagnostics.append(
                    ModelEvaluation(
                        output=node,
                        inputs=tuple(inputs),
                        trace_count=len(t_m),
                        accuracy=accuracy,
                        accepted=accepted,
                    )
                )
            if not accepted:
                continue

            whole = t_m == drd.trace_set.object_ids
            target_drd = drd
            edge_scores = {d2: by_node[d2].correlation for d2 in inputs}
            kept = list(inputs)
            if not whole:
                # A different object-trace cluster gets its own diagram with
                # correlations re-estimated on that cluster; edges whose
                # re-estimated score no longer clears the threshold are
                # dropped and the model rebuilt on the survivors.
                for d2 in inputs:
                    restricted = self._restricted_correlation(node, by_node[d2], t_m)
                    if restricted is not None:
                        edge_scores[d2] = restricted
                kept = [d2 for d2 in inputs if edge_scores[d2] > self.config.min_corr]
                if not kept:
                    continue
                if tuple(kept) != tuple(inputs):
                    rebuilt = build_predictive_model(
                        kept,
                        node,
                        TraceSet(object_ids=t_m, anchor=node),
                        self.index,
                        self.log,
                        self.config,
                    )
                    if rebuilt is None:
                        continue
                    model, accuracy = rebuilt
                    if self.diagnostics is not None:
                        self.diagnostics.append(
                            ModelEvaluation(
                                output=node,
                                inputs=tuple(kept),
                                trace_count=len(t_m),
                                accuracy=accuracy,
                                accepted=accuracy > self.config.min_support,
                            )
                        )
                    if accuracy <= self.config.min_support:
                        continue
                target_drd = drd.clone(TraceSet(object_ids=t_m, anchor=node))
                collector.append(target_drd)

            self._install_model(
                target_drd, node, kept, t_m, edge_scores, model, clamp=not whole
            )
            for d2 in kept:
                next_expanded = expanded if whole else set(expanded)
                self.expand(d2, target_drd, path + (d2,), next_expanded, collector)

    def _restricted_correlation(
        self, node: Ataots, evaluation: CandidateEvaluation, t_m: frozenset[str]
    ) -> float | None:
        """Correlation of one candidate re-estimated over a trace cluster."""
        xs: list[object] = []
        ys: list[object] = []
        for o in sorted(t_m):
            pair_list = evaluation.pairs.get(o, ())
            if not pair_list:
                continue
            out_value = self.index.shift_value(
                node.attribute, node.activity, o, node.shift_number
            )
            for _, value in pair_list:
                xs.append(value)
                ys.append(out_value)
        if len(xs) < 2:
            return None
        try:
            return correlate(xs, ys)
        except CorrelationTooFewSamples:
            return None

    def _install_model(
        self,
        drd: DiscoveredDrd,
        node: Ataots,
        inputs: Sequence[Ataots],
        t_m: frozenset[str],
        edge_scores: Mapping[Ataots, float],
        model: PredictiveModel,
        clamp: bool = False,
    ) -> None:
        attached: list[Ataots] = []
        for d2 in inputs:
            if drd.reaches(node, d2):
                # This requirement would close a cycle; drop the edge and
                # keep the diagram acyclic.
                continue
            edge = (d2, node)
            if edge not in drd.edges:
                drd.edges[edge] = len(t_m)
                drd.correlations[edge] = edge_scores[d2]
            elif clamp and drd.edges[edge] > len(t_m):
                # Inside a forked cluster an inherited edge cannot claim more
                # support than the cluster holds.
                drd.edges[edge] = len(t_m)
                drd.correlations[edge] = edge_scores[d2]
            attached.append(d2)
        if not attached:
            return
        if node not in drd.models:
            drd.models[node] = model
        previous = drd.decisions.get(node)
        known = previous.input_nodes if previous else frozenset()
        drd.decisions[node] = DiscoveredDecision(
            node=node,
            input_nodes=known | frozenset(attached),
            trace_set=TraceSet(object_ids=t_m, anchor=node),
            model_key=node,
        )

    # -- top level -----------------------------------------------------------

    def mine(self) -> list[DiscoveredDrd]:
        results: list[DiscoveredDrd] = []
        for top in self.universe:
            top_traces = traces_with_shift(self.index, top)
            if not top_traces.object_ids:
                continue
            drd = DiscoveredDrd(top=top, trace_set=top_traces)
            forked: list[DiscoveredDrd] = []
            self.expand(top, drd, (top,), set(), forked)
            for candidate_drd in [drd, *forked]:
                if any(target == top for (_, target) in candidate_drd.edges):
                    results.append(candidate_drd)
        return deduplicate_drds(results)


def find_input_variables(
    top: Ataots,
    drd: DiscoveredDrd,
    index: ShiftIndex,
    log: DocelLog,
    config: MiningConfig,
) -> tuple[dict[Ataots, DiscoveredDecision], dict[tuple[Ataots, Ataots], int]]:
    """Recursively attach correlated earlier-shift inputs to ``top``.

    Mutates ``drd`` in place and returns its decisions and edges; forked
    diagrams for partially overlapping trace clusters are appended to
    ``drd`` siblings via :func:`mine_dmn_models` when run end to end.
    """
    config.check()
    miner = _Miner(log, config)
    miner.index = index
    miner.variables = candidate_variables(index, log, config.min_shift)
    miner.universe = enumerate_ataots(index, miner.variables, config.max_shift)
    miner.expand(top, drd, (top,), set(), [])
    return drd.decisions, drd.edges


def mine_dmn_models(
    log: DocelLog,
    config: MiningConfig | None = None,
    diagnostics: list[ModelEvaluation] | None = None,
) -> list[DiscoveredDrd]:
    """Discover every supported decision diagram in the log.

    One diagram is attempted per candidate output node; diagrams whose top
    decision acquires no accepted inputs are discarded and duplicates
    (same nodes and edges) are removed.  Deterministic for a fixed
    (log, config) pair.
    """
    config = config or MiningConfig()
    config.check()
    report = validate_log(log)
    if not report.ok:
        first = report.errors[0]
        raise InvalidLog(f"{first.code}: {first.message} ({len(report.errors)} errors)")
    miner = _Miner(log, config, diagnostics)
    return miner.mine()


def deduplicate_drds(drds: Sequence[DiscoveredDrd]) -> list[DiscoveredDrd]:
    """Drop diagrams whose node and edge sets repeat; first occurrence wins."""
    seen: set[tuple[frozenset[Ataots], frozenset[tuple[Ataots, Ataots]]]] = set()
    out: list[DiscoveredDrd] = []
    for drd in drds:
        key = drd.signature()
        if key not in seen:
            seen.add(key)
            out.append(drd)
    return out
