import json

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_small_log
from ocdm.generators import generate_publication_log
from ocdm.shifts import (
    Ataots,
    build_shift_index,
    candidate_variables,
    enumerate_ataots,
    traces_with_shift,
)


def naive_shift_tables(log):
    """Quadratic (record x event) oracle for the shift tables."""
    shifts = {}
    for record in log.dynamic_records:
        for position, event in enumerate(log.events):
            if event.event_id == record.event_id:
                key = (record.attribute, event.activity, record.object_id)
                shifts.setdefault(key, []).append((position, event.event_id))
    shifts = {k: tuple(e for _, e in sorted(v)) for k, v in shifts.items()}

    traces = {}
    for oid in log.objects:
        trace = []
        for event in log.events:
            if any(oid in ids for ids in event.object_refs.values()):
                trace.append(event.event_id)
        traces[oid] = tuple(trace)

    static_origin = {}
    for oid, obj in log.objects.items():
        if traces[oid]:
            for attr in log.schema.static.get(obj.object_type, {}):
                static_origin[(attr, oid)] = traces[oid][0]
    return shifts, traces, static_origin


def test_snippet_shift_entries(snippet_log):
    index = build_shift_index(snippet_log)
    assert index.shifts[("Publication Status", "Decide on publication", "b3")] == ("e13",)
    assert index.shifts[("Publication Status", "Submit book manuscript", "b2")] == ("e4",)
    assert index.shift_value("Publication Status", "Decide on publication", "b3", 1) == "Revise"
    # statics pseudo-shift at the object's first event
    assert index.static_origin[("Name", "a951")] == "e1"
    assert index.shift_events("Name", "Find inspiration", "a951") == ("e1",)
    assert index.shift_events("Name", "Write book", "a951") == ()


def test_object_without_dynamics_has_static_origin_only(snippet_log):
    index = build_shift_index(snippet_log)
    assert not any(oid == "p90" for (_, _, oid) in index.shifts)
    assert index.static_origin[("Name", "p90")] == snippet_log.trace_event_ids("p90")[0]


def test_index_oracle_equivalence_small_logs():
    for seed in range(30):
        log = random_small_log(seed)
        index = build_shift_index(log)
        shifts, traces, static_origin = naive_shift_tables(log)
        assert dict(index.shifts) == shifts
        assert dict(index.traces) == traces
        assert dict(index.static_origin) == static_origin


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_index_oracle_equivalence_property(seed):
    log = random_small_log(seed)
    index = build_shift_index(log)
    shifts, traces, static_origin = naive_shift_tables(log)
    assert dict(index.shifts) == shifts
    assert dict(index.traces) == traces
    assert dict(index.static_origin) == static_origin


def test_candidate_variables_output_gate():
    # 10 of 20 objects shifted: passes at min_shift=0.2 (10 > 4) but the
    # same 10 must fail once the population grows to 200 via the threshold.
    log = generate_publication_log()
    index = build_shift_index(log)
    easy = candidate_variables(index, log, min_shift=0.05)
    hard = candidate_variables(index, log, min_shift=1.0)
    assert easy.is_output("Decide on publication", "Publication Status", "Books")
    # strict inequality: shifting every object fails at min_shift=1.0
    assert not hard.is_output("Decide on publication", "Publication Status", "Books")


def test_constant_attribute_is_neither_input_nor_output(snippet_log):
    # Publication Status at Submit is always "Pending" in the snippet.
    index = build_shift_index(snippet_log)
    cand = candidate_variables(index, snippet_log, min_shift=0.0)
    assert not cand.is_output("Submit book manuscript", "Publication Status", "Books")
    assert ("Publication Status", "Books") not in cand.inputs.get(
        "Submit book manuscript", set()
    )
    # ...but at Decide it takes two values across objects? Only one object
    # shifts there in the snippet, so it stays constant as well.
    assert not cand.is_output("Decide on publication", "Publication Status", "Books")


def test_text_attributes_never_enter_discovery(snippet_log):
    index = build_shift_index(snippet_log)
    cand = candidate_variables(index, snippet_log, min_shift=0.0)
    flattened = {pair for pairs in cand.inputs.values() for pair in pairs}
    assert not any(attr == "Name" for attr, _ in flattened)


def test_min_shift_monotonicity():
    log = generate_publication_log()
    index = build_shift_index(log)
    lo = candidate_variables(index, log, 0.1)
    hi = candidate_variables(index, log, 0.5)
    for activity, pairs in hi.outputs.items():
        assert pairs <= lo.outputs.get(activity, set())
    assert lo.inputs == hi.inputs  # inputs independent of min_shift


def test_max_shift_monotonicity():
    log = generate_publication_log()
    index = build_shift_index(log)
    cand = candidate_variables(index, log, 0.2)
    sets = [set(enumerate_ataots(index, cand, k)) for k in (1, 2, 3)]
    assert sets[0] <= sets[1] <= sets[2]


def test_max_shift_bounds_shift_numbers():
    log = generate_publication_log()
    index = build_shift_index(log)
    cand = candidate_variables(index, log, 0.2)
    nodes = enumerate_ataots(index, cand, 1)
    assert all(n.shift_number == 1 for n in nodes)


def test_traces_with_shift_nesting():
    log = generate_publication_log()
    index = build_shift_index(log)
    one = Ataots("Quality", "Determine book quality", "Books", 1)
    two = Ataots("Quality", "Determine book quality", "Books", 2)
    t1 = traces_with_shift(index, one).object_ids
    t2 = traces_with_shift(index, two).object_ids
    assert t2 <= t1
    assert len(t1) == 100  # the linear process shifts every book once
    assert len(t2) == 0


def test_debug_dump_is_json(snippet_log):
    index = build_shift_index(snippet_log)
    payload = json.loads(index.to_debug_json())
    assert payload["object_type_counts"] == {"Authors": 2, "Books": 2, "Publishers": 2}


def multi_shift_toy(n_objects=5, reached=3, repeats=1):
    """Books whose status is set at submission and, for some, at decision;
    optionally the decision repeats to create higher shift numbers."""
    from datetime import datetime, timedelta

    from ocdm.docel import (
        AttributeSchema,
        DynamicAttributeRecord,
        Event,
        ObjectInstance,
        build_log,
    )

    schema = AttributeSchema(
        object_types=("Books",),
        static={"Books": {}},
        dynamic={"Status": ("Books", "categorical")},
    )
    objects = [ObjectInstance(f"b{i}", "Books") for i in range(n_objects)]
    events, records = [], []
    base = datetime(2023, 2, 1, 9, 0, 0)
    counter = 0

    def emit(activity, oid, when, value):
        nonlocal counter
        counter += 1
        eid = f"e{counter}"
        events.append(Event(eid, activity, when, {"Books": frozenset([oid])}))
        records.append(DynamicAttributeRecord(f"s{counter}", "Status", value, eid, oid))

    for i in range(n_objects):
        t = base + timedelta(minutes=20 * i)
        emit("submit", f"b{i}", t, "fast" if i % 2 else "slow")
        if i < reached:
            for r in range(repeats):
                emit("decide", f"b{i}", t + timedelta(minutes=1 + r), f"v{(i + r) % 2}")
    return build_log(events, objects, records, schema)


def test_both_activities_enumerated_for_same_attribute():
    log = multi_shift_toy()
    index = build_shift_index(log)
    cand = candidate_variables(index, log, min_shift=0.1)
    nodes = set(enumerate_ataots(index, cand, max_shift=3))
    assert Ataots("Status", "submit", "Books", 1) in nodes
    assert Ataots("Status", "decide", "Books", 1) in nodes


def test_repeated_shifts_enumerate_one_node_per_depth():
    log = multi_shift_toy(repeats=3)
    index = build_shift_index(log)
    cand = candidate_variables(index, log, min_shift=0.1)
    nodes = enumerate_ataots(index, cand, max_shift=3)
    decide_nodes = [n for n in nodes if n.activity == "decide"]
    assert [n.shift_number for n in decide_nodes] == [1, 2, 3]


def test_traces_with_shift_partial_reach():
    log = multi_shift_toy(n_objects=5, reached=3)
    index = build_shift_index(log)
    reached = traces_with_shift(index, Ataots("Status", "decide", "Books", 1))
    assert reached.object_ids == {"b0", "b1", "b2"}
    beyond = traces_with_shift(index, Ataots("Status", "decide", "Books", 2))
    assert beyond.object_ids == frozenset()
