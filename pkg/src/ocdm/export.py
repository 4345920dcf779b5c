"""Serialization of discovered diagrams, trees and rules to DOT and JSON.

All output is canonical: keys sorted, node and edge order fixed, floats
rendered with exactly six decimals.  Two runs with the same seed therefore
produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import math
from typing import Mapping

from .discovery import DiscoveredDrd, PredictiveModel
from .learners import DecisionTree, FeatureEncoding, RuleList, tree_to_rules
from .shifts import Ataots

# ---------------------------------------------------------------------------
# canonical JSON
# ---------------------------------------------------------------------------


def _format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"non-finite float {value!r} cannot be serialized")
    return f"{value:.6f}"


def canonical_json(payload: object) -> str:
    """Render with sorted keys and fixed 6-decimal float precision."""

    def render(node: object) -> str:
        if isinstance(node, dict):
            items = sorted(node.items(), key=lambda kv: kv[0])
            inner = ",".join(f"{json.dumps(str(k))}:{render(v)}" for k, v in items)
            return "{" + inner + "}"
        if isinstance(node, (list, tuple)):
            return "[" + ",".join(render(v) for v in node) + "]"
        if isinstance(node, bool):
            return "true" if node else "false"
        if isinstance(node, float):
            return _format_float(node)
        if isinstance(node, int):
            return str(node)
        if node is None:
            return "null"
        return json.dumps(str(node))

    return render(payload) + "\n"


def _round6(value: float) -> float:
    return float(f"{value:.6f}")


# ---------------------------------------------------------------------------
# DRD documents
# ---------------------------------------------------------------------------


def _node_entry(node: Ataots, kind: str) -> dict[str, object]:
    return {
        "label": node.label,
        "attribute": node.attribute,
        "activity": node.activity,
        "object_type": node.object_type,
        "shift_number": node.shift_number,
        "kind": kind,
    }


def drd_to_document(
    drd: DiscoveredDrd, metadata: Mapping[str, object] | None = None
) -> dict[str, object]:
    """Plain-dict form of a diagram, ready for canonical JSON."""
    decision_nodes = set(drd.models)
    nodes = sorted(drd.nodes)
    node_entries = [
        _node_entry(n, "decision" if n in decision_nodes else "input") for n in nodes
    ]
    edge_entries = []
    for (source, target) in sorted(drd.edges):
        edge_entries.append(
            {
                "from": source.label,
                "from_activity": source.activity,
                "from_object_type": source.object_type,
                "to": target.label,
                "to_activity": target.activity,
                "to_object_type": target.object_type,
                "supporting_objects": drd.edges[(source, target)],
                "correlation": _round6(drd.correlations.get((source, target), 0.0)),
            }
        )
    accuracies = {
        node.label: _round6(model.accuracy) for node, model in sorted(drd.models.items())
    }
    return {
        "top": _node_entry(drd.top, "decision" if drd.top in decision_nodes else "input"),
        "nodes": node_entries,
        "edges": edge_entries,
        "model_accuracies": accuracies,
        "trace_set_size": len(drd.trace_set.object_ids),
        "metadata": dict(metadata or {}),
    }


def drd_to_json(
    drd: DiscoveredDrd, metadata: Mapping[str, object] | None = None
) -> str:
    return canonical_json(drd_to_document(drd, metadata))


def parse_drd_json(text: str) -> dict[str, object]:
    return json.loads(text)


# ---------------------------------------------------------------------------
# DOT
# ---------------------------------------------------------------------------


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def drd_to_dot(drd: DiscoveredDrd) -> str:
    """DOT digraph: decisions as rectangles, inputs as rounded rectangles.

    Node labels stack the shifted-variable name, the activity that performs
    the shift and the owning object type; edge labels carry the number of
    supporting objects.
    """
    decision_nodes = set(drd.models)
    nodes = sorted(drd.nodes)
    ids = {node: f"n{i}" for i, node in enumerate(nodes)}
    lines = ["digraph drd {", "  rankdir=BT;"]
    for node in nodes:
        label = _dot_escape(f"{node.label}\n{node.activity}\n{node.object_type}")
        if node in decision_nodes:
            style = "shape=box"
        else:
            style = "shape=box, style=rounded"
        lines.append(f'  {ids[node]} [label="{label}", {style}];')
    for (source, target) in sorted(drd.edges):
        count = drd.edges[(source, target)]
        lines.append(f'  {ids[source]} -> {ids[target]} [label="{count}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _split_condition(
    tree: DecisionTree,
    encodings: Mapping[str, FeatureEncoding],
    feature: str,
    threshold: float,
) -> tuple[str, str]:
    """Decoded (left, right) branch descriptions for one split."""
    encoding = encodings[feature]
    if encoding.kind == "numeric":
        return (f"{feature} <= {threshold:g}", f"{feature} > {threshold:g}")
    if encoding.kind == "boolean":
        left = [str(b) for b in (False, True) if float(b) <= threshold]
        right = [str(b) for b in (False, True) if float(b) > threshold]
    else:
        left = [l for c, l in enumerate(encoding.labels) if c <= threshold]
        right = [l for c, l in enumerate(encoding.labels) if c > threshold]

    def describe(labels: list[str]) -> str:
        if len(labels) == 1:
            return f"{feature} = {labels[0]}"
        return f"{feature} in {{{', '.join(labels)}}}"

    return describe(left), describe(right)


def tree_to_dot(
    tree: DecisionTree,
    encodings: Mapping[str, FeatureEncoding],
    target_encoding: FeatureEncoding | None = None,
) -> str:
    """DOT rendering with split conditions decoded back to labels."""
    lines = ["digraph tree {"]
    counter = [0]

    def walk(node) -> str:
        name = f"t{counter[0]}"
        counter[0] += 1
        if node.is_leaf:
            if tree.kind == "classification" and target_encoding is not None:
                outcome = target_encoding.decode(node.value)
            elif tree.kind == "classification":
                outcome = int(node.value)
            else:
                outcome = f"{node.value:g}"
            label = _dot_escape(f"{outcome}\nsamples={node.n_samples}")
            lines.append(f'  {name} [label="{label}", shape=ellipse];')
            return name
        feature = tree.feature_names[node.feature]
        left_text, right_text = _split_condition(tree, encodings, feature, node.threshold)
        label = _dot_escape(f"{feature}\nsamples={node.n_samples}")
        lines.append(f'  {name} [label="{label}", shape=box];')
        left_name = walk(node.left)
        right_name = walk(node.right)
        lines.append(f'  {name} -> {left_name} [label="{_dot_escape(left_text)}"];')
        lines.append(f'  {name} -> {right_name} [label="{_dot_escape(right_text)}"];')
        return name

    walk(tree.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# rules
# ---------------------------------------------------------------------------


def model_rules(model: PredictiveModel) -> RuleList:
    """IF-THEN rules for a decision's exported tree."""
    return tree_to_rules(
        model.tree,
        model.dataset.encodings,
        target_encoding=model.dataset.target_encoding,
        target=model.target_name,
    )


def rules_to_document(rules: RuleList) -> dict[str, object]:
    entries = []
    for rule in rules:
        conditions = []
        for condition in rule.conditions:
            entry: dict[str, object] = {
                "feature": condition.feature,
                "kind": condition.kind,
            }
            if condition.kind == "numeric":
                entry["low"] = None if condition.low == -math.inf else _round6(condition.low)
                entry["high"] = None if condition.high == math.inf else _round6(condition.high)
            else:
                entry["allowed"] = sorted(str(v) for v in condition.allowed)
            conditions.append(entry)
        outcome = rule.outcome
        if isinstance(outcome, float):
            outcome = _round6(outcome)
        entries.append(
            {
                "conditions": conditions,
                "outcome": outcome,
                "support": rule.support,
                "text": rule.describe(),
            }
        )
    return {"target": rules.target, "rules": entries}


def rules_to_json(rules: RuleList) -> str:
    return canonical_json(rules_to_document(rules))
