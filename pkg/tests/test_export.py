import json

import pytest

from dot_checker import parse_dot
from ocdm.discovery import DiscoveredDrd, MiningConfig, mine_dmn_models
from ocdm.export import (
    canonical_json,
    drd_to_document,
    drd_to_dot,
    drd_to_json,
    model_rules,
    parse_drd_json,
    rules_to_json,
    tree_to_dot,
)
from ocdm.generators import PublicationParams, generate_publication_log
from ocdm.learners import LearnerConfig, encode_features, train_decision_tree
from ocdm.shifts import Ataots, TraceSet

FAST = MiningConfig(min_corr=0.1, learner=LearnerConfig(n_trees=15))


@pytest.fixture(scope="module")
def mined():
    log = generate_publication_log(
        PublicationParams(num_books=40, max_authors=40, max_publishers=40)
    )
    return mine_dmn_models(log, FAST)


def test_canonical_json_shapes():
    payload = {"b": 0.4123, "a": [1, True, None, "x"], "c": {"z": 1.0}}
    assert (
        canonical_json(payload)
        == '{"a":[1,true,null,"x"],"b":0.412300,"c":{"z":1.000000}}\n'
    )


def test_canonical_json_rejects_nan():
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})


def test_drd_json_round_trip(mined):
    for drd in mined:
        document = drd_to_document(drd, {"seed": 42})
        again = parse_drd_json(drd_to_json(drd, {"seed": 42}))
        assert again == json.loads(json.dumps(document))


def test_drd_json_six_decimal_floats(mined):
    text = drd_to_json(mined[0])
    correlations = [
        part.split(":")[-1]
        for part in text.split(",")
        if '"correlation":' in part
    ]
    assert correlations
    for value in correlations:
        whole, dot, fraction = value.partition(".")
        assert dot == "." and len(fraction.rstrip("}]")) >= 6


def test_drd_json_deterministic(mined):
    assert drd_to_json(mined[0]) == drd_to_json(mined[0])


def test_drd_dot_parses_and_labels(mined):
    top_drd = next(d for d in mined if d.top.attribute == "Publication Status")
    text = drd_to_dot(top_drd)
    graph = parse_dot(text)
    assert len(graph.nodes) == len(top_drd.nodes)
    assert len(graph.edges) == len(top_drd.edges)
    label_blob = " ".join(attrs.get("label", "") for attrs in graph.nodes.values())
    assert "Quality_shift-1\\nDetermine book quality\\nBooks" in label_blob
    # decisions are plain boxes, inputs rounded
    rounded = [a for a in graph.nodes.values() if "rounded" in a.get("style", "")]
    assert len(rounded) == len(top_drd.input_nodes)
    # edge labels carry supporting-object counts
    supports = sorted(int(a["label"].strip('"')) for _, _, a in graph.edges)
    assert supports == sorted(top_drd.edges.values())


def test_empty_drd_is_valid_dot():
    anchor = Ataots("A", "act", "T", 1)
    empty = DiscoveredDrd(top=anchor, trace_set=TraceSet(frozenset(), anchor))
    empty_dot = drd_to_dot(empty)
    graph = parse_dot(empty_dot)
    assert len(graph.edges) == 0


def test_tree_dot_decodes_conditions(mined):
    top_drd = next(d for d in mined if d.top.attribute == "Publication Status")
    model = top_drd.models[top_drd.top]
    text = tree_to_dot(model.tree, model.dataset.encodings, model.dataset.target_encoding)
    graph = parse_dot(text)
    blob = text.replace('\\"', "")
    assert "feature" not in blob  # conditions reference attribute names
    assert "Quality" in blob or "Compliance" in blob
    assert "samples=" in blob
    assert graph.edges  # edge labels carry the decoded split conditions


def test_single_leaf_tree_dot():
    rows = [{"x": 1.0, "y": "only"}, {"x": 2.0, "y": "only"}]
    ds = encode_features(rows, target="y")
    tree = train_decision_tree(ds)
    graph = parse_dot(tree_to_dot(tree, ds.encodings, ds.target_encoding))
    assert len(graph.nodes) == 1 and not graph.edges


def test_rules_json_round_trip(mined):
    top_drd = next(d for d in mined if d.top.attribute == "Publication Status")
    model = top_drd.models[top_drd.top]
    rules = model_rules(model)
    payload = json.loads(rules_to_json(rules))
    assert payload["target"] == "Publication Status"
    assert len(payload["rules"]) == len(rules)
    for entry in payload["rules"]:
        assert entry["support"] >= 1
        assert entry["text"].startswith("IF ")
