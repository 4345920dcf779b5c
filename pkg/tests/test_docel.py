import json
from datetime import datetime

import pytest

from conftest import random_small_log, ts
from ocdm.docel import (
    AttributeSchema,
    DanglingForeignKeyError,
    DocelLog,
    DuplicateIdError,
    DynamicAttributeRecord,
    Event,
    MissingFileError,
    ObjectInstance,
    SchemaMismatchError,
    UnknownObjectError,
    build_log,
    object_trace,
    parse_docel,
    parse_timestamp,
    validate_log,
    write_docel,
)
from ocdm.generators import generate_publication_log, generate_shipping_log


def test_object_trace_interleaved(snippet_log):
    assert [e.event_id for e in object_trace(snippet_log, "b2")] == [
        "e3", "e4", "e6", "e9", "e11",
    ]
    assert [e.event_id for e in object_trace(snippet_log, "a951")] == [
        "e1", "e3", "e4", "e11",
    ]


def test_object_trace_unknown(snippet_log):
    with pytest.raises(UnknownObjectError):
        object_trace(snippet_log, "b999")


def test_trace_of_never_referenced_object(snippet_log):
    log = DocelLog(
        events=snippet_log.events,
        objects={**snippet_log.objects, "b7": ObjectInstance("b7", "Books", {"Genre": "Poetry"})},
        dynamic_records=snippet_log.dynamic_records,
        schema=snippet_log.schema,
    )
    assert object_trace(log, "b7") == ()


def test_trace_completeness(snippet_log):
    from_traces = sorted(
        (eid, oid)
        for oid in snippet_log.objects
        for eid in snippet_log.trace_event_ids(oid)
    )
    from_events = sorted(
        (e.event_id, oid) for e in snippet_log.events for oid in e.referenced_objects()
    )
    assert from_traces == from_events


def test_events_sorted_with_id_tiebreak():
    schema = AttributeSchema(("T",), {"T": {}}, {})
    when = ts("2022-01-01 10:00:00")
    events = [
        Event("zz", "a", when, {"T": frozenset(["t1"])}),
        Event("aa", "a", when, {"T": frozenset(["t1"])}),
    ]
    log = build_log(events, [ObjectInstance("t1", "T")], [], schema)
    assert [e.event_id for e in log.events] == ["aa", "zz"]


def test_timestamp_formats():
    assert parse_timestamp("2022-01-01 11:38:02") == parse_timestamp("2022-01-01T11:38:02")
    with pytest.raises(SchemaMismatchError):
        parse_timestamp("yesterday")


def test_validate_clean(snippet_log):
    report = validate_log(snippet_log)
    assert report.ok
    assert report.errors == ()


def test_validate_dangling_reference(snippet_log):
    bad = Event(
        "e99", "Write book", ts("2022-01-01 12:00:00"), {"Books": frozenset(["b999"])}
    )
    log = build_log(
        list(snippet_log.events) + [bad],
        snippet_log.objects.values(),
        snippet_log.dynamic_records,
        snippet_log.schema,
    )
    report = validate_log(log)
    assert any(e.code == "DanglingForeignKey" for e in report.errors)


def test_validate_duplicate_dynamic_triple(snippet_log):
    doubled = list(snippet_log.dynamic_records) + [
        DynamicAttributeRecord("ps99", "Publication Status", "Maybe", "e13", "b3")
    ]
    log = build_log(
        snippet_log.events, snippet_log.objects.values(), doubled, snippet_log.schema
    )
    report = validate_log(log)
    assert any(e.code == "DuplicateId" for e in report.errors)


def test_validate_shift_target_must_be_referenced(snippet_log):
    # e1 references only a951; a Publication Status change of b2 there is invalid.
    stray = DynamicAttributeRecord("ps98", "Publication Status", "Pending", "e1", "b2")
    log = build_log(
        snippet_log.events,
        snippet_log.objects.values(),
        list(snippet_log.dynamic_records) + [stray],
        snippet_log.schema,
    )
    report = validate_log(log)
    assert any(e.code == "ShiftTargetNotInEvent" for e in report.errors)


def test_validate_wrong_type_slot(snippet_log):
    bad = Event(
        "e99", "Write book", ts("2022-01-01 12:00:00"), {"Authors": frozenset(["b2"])}
    )
    log = build_log(
        list(snippet_log.events) + [bad],
        snippet_log.objects.values(),
        snippet_log.dynamic_records,
        snippet_log.schema,
    )
    assert any(e.code == "SchemaMismatch" for e in validate_log(log).errors)


def test_parse_empty_directory(tmp_path):
    with pytest.raises(MissingFileError):
        parse_docel(tmp_path)


def test_parse_missing_events(tmp_path):
    (tmp_path / "manifest.json").write_text(
        json.dumps({"object_types": {"T": {"static": {}}}})
    )
    with pytest.raises(MissingFileError) as excinfo:
        parse_docel(tmp_path)
    assert "events.csv" in str(excinfo.value)


def test_parse_header_mismatch(tmp_path, snippet_log):
    write_docel(snippet_log, tmp_path)
    events = tmp_path / "events.csv"
    lines = events.read_text().splitlines()
    lines[0] = "event_id,activity,timestamp,Authors,Books"  # drop a column
    events.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaMismatchError):
        parse_docel(tmp_path)


def test_parse_dangling_object_reference(tmp_path, snippet_log):
    write_docel(snippet_log, tmp_path)
    events = tmp_path / "events.csv"
    text = events.read_text().replace("b2", "b404")
    events.write_text(text)
    with pytest.raises(DanglingForeignKeyError):
        parse_docel(tmp_path)


def test_parse_duplicate_event_id(tmp_path, snippet_log):
    write_docel(snippet_log, tmp_path)
    events = tmp_path / "events.csv"
    lines = events.read_text().splitlines()
    lines.append(lines[1])
    events.write_text("\n".join(lines) + "\n")
    with pytest.raises(DuplicateIdError):
        parse_docel(tmp_path)


def test_parse_semicolon_separated_object_cells(tmp_path):
    schema = AttributeSchema(("T",), {"T": {}}, {})
    events = [
        Event(
            "e1", "batch", ts("2022-01-01 09:00:00"), {"T": frozenset(["t1", "t2"])}
        )
    ]
    log = build_log(
        events, [ObjectInstance("t1", "T"), ObjectInstance("t2", "T")], [], schema
    )
    write_docel(log, tmp_path)
    raw = (tmp_path / "events.csv").read_text()
    assert "t1;t2" in raw
    assert parse_docel(tmp_path) == log


def test_round_trip_generated_logs(tmp_path):
    for name, gen in (("pub", generate_publication_log), ("ship", generate_shipping_log)):
        log = gen()
        target = tmp_path / name
        write_docel(log, target)
        assert parse_docel(target) == log


def test_round_trip_random_logs(tmp_path):
    for seed in range(8):
        log = random_small_log(seed)
        target = tmp_path / f"log{seed}"
        write_docel(log, target)
        assert parse_docel(target) == log


def test_round_trip_without_dynamics(tmp_path):
    schema = AttributeSchema(("T",), {"T": {"x": "numeric"}}, {})
    log = build_log(
        [Event("e1", "a", ts("2022-01-01 09:00:00"), {"T": frozenset(["t1"])})],
        [ObjectInstance("t1", "T", {"x": 3.0})],
        [],
        schema,
    )
    write_docel(log, tmp_path)
    assert not list(tmp_path.glob("dynamic_*.csv"))
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["dynamic_attributes"] == {}
    assert parse_docel(tmp_path) == log


def test_kind_inference_fallback_warns(tmp_path, snippet_log):
    write_docel(snippet_log, tmp_path)
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    manifest["dynamic_attributes"]["Publication Status"]["kind"] = None
    (tmp_path / "manifest.json").write_text(json.dumps(manifest))
    log = parse_docel(tmp_path)
    assert log.parse_warnings
    assert log.schema.dynamic_kind("Publication Status") == "categorical"
    report = validate_log(log)
    assert report.ok and report.warnings


def test_deterministic_ordering():
    a = random_small_log(3)
    b = random_small_log(3)
    assert a == b
    assert [e.event_id for e in a.events] == [e.event_id for e in b.events]
