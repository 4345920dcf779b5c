"""In-memory DOCEL event log model plus the on-disk CSV round trip.

A DOCEL directory holds one ``events.csv``, one ``objects_<Type>.csv`` per
object type, one ``dynamic_<Attribute>.csv`` per dynamic attribute and a
``manifest.json`` declaring object types, attribute ownership and value
kinds.  Events reference objects by id; dynamic attribute records reference
both an event and an object, which is what makes attribute changes
attributable to a single object.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from datetime import datetime
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

VALUE_KINDS = ("numeric", "categorical", "boolean", "text")

_TRUE_TOKENS = {"true", "1", "yes"}
_FALSE_TOKENS = {"false", "0", "no"}

# Attribute and type names are embedded in file names with all
# non-alphanumeric characters stripped ("Publication Status" ->
# "dynamic_PublicationStatus.csv").
_NAME_STRIP = re.compile(r"[^0-9A-Za-z]+")


def slug(name: str) -> str:
    return _NAME_STRIP.sub("", name)


class DocelError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "DocelError"

    def __init__(self, message: str, location: str = ""):
        self.location = location
        self.message = message
        super().__init__(f"{message}" + (f" [{location}]" if location else ""))


class MissingFileError(DocelError):
    code = "MissingFile"


class SchemaMismatchError(DocelError):
    code = "SchemaMismatch"


class DanglingForeignKeyError(DocelError):
    code = "DanglingForeignKey"


class DuplicateIdError(DocelError):
    code = "DuplicateId"


class IoFailureError(DocelError):
    code = "IoFailure"


class UnknownObjectError(DocelError):
    code = "UnknownObject"


@dataclass(frozen=True)
class AttributeSchema:
    """Declared attribute layout of a log.

    ``static`` maps object type -> {attribute: kind} in declaration order,
    ``dynamic`` maps attribute -> (owning object type, kind) and
    ``event_attributes`` maps attribute -> kind for static event attributes.
    """

    object_types: tuple[str, ...]
    static: Mapping[str, Mapping[str, str]]
    dynamic: Mapping[str, tuple[str, str]]
    event_attributes: Mapping[str, str] = field(default_factory=dict)

    def static_kind(self, object_type: str, attribute: str) -> str | None:
        return self.static.get(object_type, {}).get(attribute)

    def dynamic_kind(self, attribute: str) -> str | None:
        entry = self.dynamic.get(attribute)
        return entry[1] if entry else None

    def dynamic_owner(self, attribute: str) -> str | None:
        entry = self.dynamic.get(attribute)
        return entry[0] if entry else None

    def dynamic_attributes_of(self, object_type: str) -> tuple[str, ...]:
        return tuple(a for a, (ot, _) in self.dynamic.items() if ot == object_type)


@dataclass(frozen=True)
class Event:
    event_id: str
    activity: str
    timestamp: datetime
    object_refs: Mapping[str, frozenset[str]]
    event_attributes: Mapping[str, object] = field(default_factory=dict)

    def referenced_objects(self) -> frozenset[str]:
        out: set[str] = set()
        for ids in self.object_refs.values():
            out.update(ids)
        return frozenset(out)


@dataclass(frozen=True)
class ObjectInstance:
    object_id: str
    object_type: str
    static_attributes: Mapping[str, object] = field(default_factory=dict)


@dataclass(frozen=True)
class DynamicAttributeRecord:
    record_id: str
    attribute: str
    value: object
    event_id: str
    object_id: str


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str
    location: str = ""


@dataclass(frozen=True)
class ValidationReport:
    errors: tuple[ValidationIssue, ...] = ()
    warnings: tuple[ValidationIssue, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass(frozen=True)
class DocelLog:
    """Immutable event log; safe for concurrent reads once constructed.

    Events are kept in canonical order (timestamp, then event id as a tie
    break) and dynamic records in (attribute, event order, object id,
    record id) order, so two logs with the same content compare equal.
    """

    events: tuple[Event, ...]
    objects: Mapping[str, ObjectInstance]
    dynamic_records: tuple[DynamicAttributeRecord, ...]
    schema: AttributeSchema
    parse_warnings: tuple[str, ...] = field(default_factory=tuple, compare=False)

    @property
    def object_types(self) -> tuple[str, ...]:
        return self.schema.object_types

    @cached_property
    def _event_positions(self) -> dict[str, int]:
        return {e.event_id: i for i, e in enumerate(self.events)}

    @cached_property
    def _events_by_id(self) -> dict[str, Event]:
        return {e.event_id: e for e in self.events}

    @cached_property
    def _traces(self) -> dict[str, tuple[str, ...]]:
        traces: dict[str, list[str]] = {oid: [] for oid in self.objects}
        for event in self.events:
            for ids in event.object_refs.values():
                for oid in sorted(ids):
                    if oid in traces:
                        traces[oid].append(event.event_id)
        return {oid: tuple(eids) for oid, eids in traces.items()}

    def event(self, event_id: str) -> Event:
        try:
            return self._events_by_id[event_id]
        except KeyError:
            raise UnknownObjectError(f"unknown event id {event_id!r}")

    def event_position(self, event_id: str) -> int:
        return self._event_positions[event_id]

    def trace_event_ids(self, object_id: str) -> tuple[str, ...]:
        if object_id not in self.objects:
            raise UnknownObjectError(f"unknown object id {object_id!r}")
        return self._traces[object_id]

    def object_trace(self, object_id: str) -> tuple[Event, ...]:
        return tuple(self._events_by_id[eid] for eid in self.trace_event_ids(object_id))

    def objects_of_type(self, object_type: str) -> tuple[str, ...]:
        return tuple(
            oid for oid, obj in self.objects.items() if obj.object_type == object_type
        )


def object_trace(log: DocelLog, object_id: str) -> tuple[Event, ...]:
    """Events in which ``object_id`` participates, in log order."""
    return log.object_trace(object_id)


def build_log(
    events: Iterable[Event],
    objects: Iterable[ObjectInstance],
    dynamic_records: Iterable[DynamicAttributeRecord],
    schema: AttributeSchema,
    parse_warnings: Iterable[str] = (),
) -> DocelLog:
    """Assemble a log, applying the canonical orderings."""
    ordered_events = tuple(sorted(events, key=lambda e: (e.timestamp, e.event_id)))
    positions = {e.event_id: i for i, e in enumerate(ordered_events)}
    ordered_objects = {
        obj.object_id: obj for obj in sorted(objects, key=lambda o: o.object_id)
    }
    ordered_records = tuple(
        sorted(
            dynamic_records,
            key=lambda r: (
                r.attribute,
                positions.get(r.event_id, len(positions)),
                r.object_id,
                r.record_id,
            ),
        )
    )
    return DocelLog(
        events=ordered_events,
        objects=ordered_objects,
        dynamic_records=ordered_records,
        schema=schema,
        parse_warnings=tuple(parse_warnings),
    )


# ---------------------------------------------------------------------------
# value parsing / formatting
# ---------------------------------------------------------------------------


def parse_timestamp(raw: str, location: str = "") -> datetime:
    text = raw.strip()
    for fmt in ("%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S"):
        try:
            return datetime.strptime(text, fmt)
        except ValueError:
            continue
    raise SchemaMismatchError(f"unparseable timestamp {raw!r}", location)


def parse_value(raw: str, kind: str, location: str = "") -> object:
    text = raw.strip()
    if kind == "numeric":
        try:
            value = float(text)
        except ValueError:
            raise SchemaMismatchError(f"expected numeric value, got {raw!r}", location)
        if not math.isfinite(value):
            raise SchemaMismatchError(f"non-finite numeric value {raw!r}", location)
        return value
    if kind == "boolean":
        lowered = text.lower()
        if lowered in _TRUE_TOKENS:
            return True
        if lowered in _FALSE_TOKENS:
            return False
        raise SchemaMismatchError(f"expected boolean value, got {raw!r}", location)
    if kind == "categorical":
        if not text:
            raise SchemaMismatchError("empty categorical value", location)
        return text
    if kind == "text":
        return text
    raise SchemaMismatchError(f"unknown value kind {kind!r}", location)


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return "True" if value else "False"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def infer_kind(values: Iterable[str]) -> str:
    """Fallback kind inference for manifests that omit a kind."""
    seen = [v.strip() for v in values if v.strip()]
    if not seen:
        return "text"
    if all(v.lower() in _TRUE_TOKENS | _FALSE_TOKENS for v in seen):
        return "boolean"
    try:
        for v in seen:
            float(v)
        return "numeric"
    except ValueError:
        pass
    return "categorical"


# ---------------------------------------------------------------------------
# on-disk format
# ---------------------------------------------------------------------------

MANIFEST_NAME = "manifest.json"
EVENTS_NAME = "events.csv"


def _events_header(schema: AttributeSchema) -> list[str]:
    return (
        ["event_id", "activity", "timestamp"]
        + list(schema.object_types)
        + list(schema.event_attributes)
    )


def _read_manifest(directory: Path) -> tuple[AttributeSchema, dict[str, dict[str, str | None]], list[str]]:
    path = directory / MANIFEST_NAME
    if not path.is_file():
        raise MissingFileError(MANIFEST_NAME, str(directory))
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaMismatchError(f"unreadable manifest: {exc}", str(path))

    warnings: list[str] = []
    raw_kinds: dict[str, dict[str, str | None]] = {"static": {}, "dynamic": {}, "event": {}}

    object_types = raw.get("object_types")
    if not isinstance(object_types, dict) or not object_types:
        raise SchemaMismatchError("manifest must declare object_types", str(path))

    static: dict[str, dict[str, str]] = {}
    for type_name, spec in object_types.items():
        attrs = spec.get("static", {}) if isinstance(spec, dict) else {}
        cleaned: dict[str, str] = {}
        for attr, kind in attrs.items():
            if kind not in VALUE_KINDS:
                raw_kinds["static"][f"{type_name}/{attr}"] = kind
                warnings.append(
                    f"kind missing or unknown for static attribute {attr!r}"
                    f" of {type_name!r}; will infer from values"
                )
                kind = ""
            cleaned[attr] = kind
        static[type_name] = cleaned

    dynamic: dict[str, tuple[str, str]] = {}
    for attr, spec in raw.get("dynamic_attributes", {}).items():
        owner = spec.get("object_type") if isinstance(spec, dict) else None
        kind = spec.get("kind") if isinstance(spec, dict) else None
        if owner not in object_types:
            raise SchemaMismatchError(
                f"dynamic attribute {attr!r} declares unknown object type {owner!r}",
                str(path),
            )
        if kind not in VALUE_KINDS:
            raw_kinds["dynamic"][attr] = kind
            warnings.append(
                f"kind missing or unknown for dynamic attribute {attr!r};"
                " will infer from values"
            )
            kind = ""
        dynamic[attr] = (owner, kind)

    event_attributes: dict[str, str] = {}
    for attr, kind in raw.get("event_attributes", {}).items():
        if kind not in VALUE_KINDS:
            raw_kinds["event"][attr] = kind
            warnings.append(
                f"kind missing or unknown for event attribute {attr!r};"
                " will infer from values"
            )
            kind = ""
        event_attributes[attr] = kind

    schema = AttributeSchema(
        object_types=tuple(object_types),
        static=static,
        dynamic=dynamic,
        event_attributes=event_attributes,
    )
    return schema, raw_kinds, warnings


def _read_csv(path: Path) -> list[list[str]]:
    if not path.is_file():
        raise MissingFileError(path.name, str(path.parent))
    with path.open(newline="", encoding="utf-8") as handle:
        return [row for row in csv.reader(handle)]


def _check_header(rows: list[list[str]], expected: list[str], path: Path) -> None:
    if not rows or [c.strip() for c in rows[0]] != expected:
        got = rows[0] if rows else []
        raise SchemaMismatchError(
            f"header mismatch: expected {expected}, got {got}", str(path)
        )


def parse_docel(directory_path: str | Path) -> DocelLog:
    """Parse a DOCEL directory into a validated in-memory log.

    Structural problems (missing files, header mismatches, dangling foreign
    keys, duplicate ids) abort the parse with a located error; soft issues
    such as inferred value kinds are reported through ``parse_warnings``.
    """
    directory = Path(directory_path)
    if not directory.is_dir():
        raise MissingFileError(EVENTS_NAME, str(directory))
    schema, pending_kinds, warnings = _read_manifest(directory)

    # Resolve inferred kinds first so all values parse under a known kind.
    schema = _resolve_kinds(directory, schema, warnings)

    events_path = directory / EVENTS_NAME
    rows = _read_csv(events_path)
    header = _events_header(schema)
    _check_header(rows, header, events_path)

    events: list[Event] = []
    seen_event_ids: set[str] = set()
    n_types = len(schema.object_types)
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        where = f"{events_path.name}:{lineno}"
        if len(row) != len(header):
            raise SchemaMismatchError(
                f"expected {len(header)} columns, got {len(row)}", where
            )
        event_id = row[0].strip()
        if not event_id:
            raise SchemaMismatchError("empty event_id", where)
        if event_id in seen_event_ids:
            raise DuplicateIdError(f"duplicate event id {event_id!r}", where)
        seen_event_ids.add(event_id)
        refs: dict[str, frozenset[str]] = {}
        for offset, type_name in enumerate(schema.object_types):
            cell = row[3 + offset].strip()
            ids = frozenset(p.strip() for p in cell.split(";") if p.strip())
            if ids:
                refs[type_name] = ids
        attrs: dict[str, object] = {}
        for offset, (attr, kind) in enumerate(schema.event_attributes.items()):
            cell = row[3 + n_types + offset]
            if cell.strip():
                attrs[attr] = parse_value(cell, kind, where)
        events.append(
            Event(
                event_id=event_id,
                activity=row[1].strip(),
                timestamp=parse_timestamp(row[2], where),
                object_refs=refs,
                event_attributes=attrs,
            )
        )

    objects: list[ObjectInstance] = []
    seen_object_ids: set[str] = set()
    for type_name in schema.object_types:
        path = directory / f"objects_{slug(type_name)}.csv"
        rows = _read_csv(path)
        attr_names = list(schema.static[type_name])
        _check_header(rows, ["object_id"] + attr_names, path)
        for lineno, row in enumerate(rows[1:], start=2):
            if not row or all(not c.strip() for c in row):
                continue
            where = f"{path.name}:{lineno}"
            if len(row) != 1 + len(attr_names):
                raise SchemaMismatchError(
                    f"expected {1 + len(attr_names)} columns, got {len(row)}", where
                )
            object_id = row[0].strip()
            if object_id in seen_object_ids:
                raise DuplicateIdError(f"duplicate object id {object_id!r}", where)
            seen_object_ids.add(object_id)
            statics = {
                attr: parse_value(cell, schema.static[type_name][attr], where)
                for attr, cell in zip(attr_names, row[1:])
            }
            objects.append(ObjectInstance(object_id, type_name, statics))

    object_ids = seen_object_ids
    for event in events:
        for type_name, ids in event.object_refs.items():
            for oid in ids:
                if oid not in object_ids:
                    raise DanglingForeignKeyError(
                        f"event {event.event_id!r} references unknown object {oid!r}",
                        EVENTS_NAME,
                    )

    records: list[DynamicAttributeRecord] = []
    seen_record_keys: set[tuple[str, str, str]] = set()
    seen_record_ids: set[str] = set()
    for attr, (owner, kind) in schema.dynamic.items():
        path = directory / f"dynamic_{slug(attr)}.csv"
        rows = _read_csv(path)
        _check_header(rows, ["record_id", "value", "event_id", "object_id"], path)
        for lineno, row in enumerate(rows[1:], start=2):
            if not row or all(not c.strip() for c in row):
                continue
            where = f"{path.name}:{lineno}"
            if len(row) != 4:
                raise SchemaMismatchError(f"expected 4 columns, got {len(row)}", where)
            record_id, raw_value, event_id, object_id = (c.strip() for c in row)
            if record_id in seen_record_ids:
                raise DuplicateIdError(f"duplicate record id {record_id!r}", where)
            seen_record_ids.add(record_id)
            if event_id not in seen_event_ids:
                raise DanglingForeignKeyError(
                    f"record {record_id!r} references unknown event {event_id!r}", where
                )
            if object_id not in object_ids:
                raise DanglingForeignKeyError(
                    f"record {record_id!r} references unknown object {object_id!r}", where
                )
            key = (attr, event_id, object_id)
            if key in seen_record_keys:
                raise DuplicateIdError(
                    f"duplicate dynamic record for {key!r}", where
                )
            seen_record_keys.add(key)
            records.append(
                DynamicAttributeRecord(
                    record_id=record_id,
                    attribute=attr,
                    value=parse_value(raw_value, kind, where),
                    event_id=event_id,
                    object_id=object_id,
                )
            )

    return build_log(events, objects, records, schema, warnings)


def _resolve_kinds(
    directory: Path, schema: AttributeSchema, warnings: list[str]
) -> AttributeSchema:
    """Fill in any missing value kinds by scanning the raw CSV columns."""

    def column(path: Path, header_index: int) -> list[str]:
        rows = _read_csv(path)
        return [row[header_index] for row in rows[1:] if len(row) > header_index]

    static = {t: dict(attrs) for t, attrs in schema.static.items()}
    for type_name, attrs in static.items():
        names = list(attrs)
        for i, attr in enumerate(names):
            if not attrs[attr]:
                path = directory / f"objects_{slug(type_name)}.csv"
                attrs[attr] = infer_kind(column(path, 1 + i))

    dynamic = dict(schema.dynamic)
    for attr, (owner, kind) in dynamic.items():
        if not kind:
            path = directory / f"dynamic_{slug(attr)}.csv"
            dynamic[attr] = (owner, infer_kind(column(path, 1)))

    event_attrs = dict(schema.event_attributes)
    base = 3 + len(schema.object_types)
    for i, (attr, kind) in enumerate(event_attrs.items()):
        if not kind:
            event_attrs[attr] = infer_kind(column(directory / EVENTS_NAME, base + i))

    return AttributeSchema(
        object_types=schema.object_types,
        static=static,
        dynamic=dynamic,
        event_attributes=event_attrs,
    )


def write_docel(log: DocelLog, directory_path: str | Path) -> None:
    """Write ``log`` as a DOCEL directory; inverse of :func:`parse_docel`."""
    directory = Path(directory_path)
    try:
        directory.mkdir(parents=True, exist_ok=True)

        manifest = {
            "object_types": {
                t: {"static": dict(log.schema.static.get(t, {}))}
                for t in log.schema.object_types
            },
            "dynamic_attributes": {
                attr: {"object_type": owner, "kind": kind}
                for attr, (owner, kind) in log.schema.dynamic.items()
            },
            "event_attributes": dict(log.schema.event_attributes),
        }
        # Key order is meaningful: it fixes the CSV column order on re-parse.
        (directory / MANIFEST_NAME).write_text(
            json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
        )

        with (directory / EVENTS_NAME).open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(_events_header(log.schema))
            for event in log.events:
                row = [
                    event.event_id,
                    event.activity,
                    event.timestamp.strftime("%Y-%m-%d %H:%M:%S"),
                ]
                for type_name in log.schema.object_types:
                    ids = sorted(event.object_refs.get(type_name, ()))
                    row.append(";".join(ids))
                for attr in log.schema.event_attributes:
                    value = event.event_attributes.get(attr, "")
                    row.append(format_value(value) if value != "" else "")
                writer.writerow(row)

        for type_name in log.schema.object_types:
            attr_names = list(log.schema.static[type_name])
            path = directory / f"objects_{slug(type_name)}.csv"
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(["object_id"] + attr_names)
                for oid in sorted(log.objects_of_type(type_name)):
                    obj = log.objects[oid]
                    writer.writerow(
                        [oid]
                        + [format_value(obj.static_attributes[a]) for a in attr_names]
                    )

        for attr in log.schema.dynamic:
            path = directory / f"dynamic_{slug(attr)}.csv"
            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(["record_id", "value", "event_id", "object_id"])
                for record in log.dynamic_records:
                    if record.attribute == attr:
                        writer.writerow(
                            [
                                record.record_id,
                                format_value(record.value),
                                record.event_id,
                                record.object_id,
                            ]
                        )
    except OSError as exc:
        raise IoFailureError(f"cannot write log: {exc}", str(directory))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _value_kind_ok(value: object, kind: str) -> bool:
    if kind == "numeric":
        return (
            isinstance(value, (int, float))
            and not isinstance(value, bool)
            and math.isfinite(float(value))
        )
    if kind == "boolean":
        return isinstance(value, bool)
    if kind == "categorical":
        return isinstance(value, str) and bool(value)
    if kind == "text":
        return isinstance(value, str)
    return False


def validate_log(log: DocelLog) -> ValidationReport:
    """Check every structural invariant; violations become report entries."""
    errors: list[ValidationIssue] = []
    warnings: list[ValidationIssue] = [
        ValidationIssue("ParseWarning", w) for w in log.parse_warnings
    ]

    known_types = set(log.schema.object_types)
    seen_event_ids: set[str] = set()
    for event in log.events:
        where = f"event {event.event_id}"
        if event.event_id in seen_event_ids:
            errors.append(ValidationIssue("DuplicateId", "duplicate event id", where))
        seen_event_ids.add(event.event_id)
        if not event.referenced_objects():
            errors.append(
                ValidationIssue("EmptyEvent", "event references no objects", where)
            )
        for type_name, ids in event.object_refs.items():
            if type_name not in known_types:
                errors.append(
                    ValidationIssue(
                        "SchemaMismatch", f"unknown object type {type_name!r}", where
                    )
                )
                continue
            for oid in ids:
                obj = log.objects.get(oid)
                if obj is None:
                    errors.append(
                        ValidationIssue(
                            "DanglingForeignKey", f"unknown object {oid!r}", where
                        )
                    )
                elif obj.object_type != type_name:
                    errors.append(
                        ValidationIssue(
                            "SchemaMismatch",
                            f"object {oid!r} of type {obj.object_type!r} listed"
                            f" under {type_name!r}",
                            where,
                        )
                    )
        for attr, value in event.event_attributes.items():
            kind = log.schema.event_attributes.get(attr)
            if kind is None:
                errors.append(
                    ValidationIssue(
                        "SchemaMismatch", f"undeclared event attribute {attr!r}", where
                    )
                )
            elif not _value_kind_ok(value, kind):
                errors.append(
                    ValidationIssue(
                        "InvalidValue", f"event attribute {attr!r} violates {kind}", where
                    )
                )

    for oid, obj in log.objects.items():
        where = f"object {oid}"
        if obj.object_type not in known_types:
            errors.append(
                ValidationIssue(
                    "SchemaMismatch", f"unknown object type {obj.object_type!r}", where
                )
            )
            continue
        declared = log.schema.static.get(obj.object_type, {})
        for attr, value in obj.static_attributes.items():
            kind = declared.get(attr)
            if kind is None:
                errors.append(
                    ValidationIssue(
                        "SchemaMismatch", f"undeclared static attribute {attr!r}", where
                    )
                )
            elif not _value_kind_ok(value, kind):
                errors.append(
                    ValidationIssue(
                        "InvalidValue", f"static attribute {attr!r} violates {kind}", where
                    )
                )
        if not log.trace_event_ids(oid):
            warnings.append(
                ValidationIssue("OrphanObject", "object appears in no event", where)
            )

    seen_keys: set[tuple[str, str, str]] = set()
    seen_record_ids: set[str] = set()
    for record in log.dynamic_records:
        where = f"record {record.record_id}"
        if record.record_id in seen_record_ids:
            errors.append(ValidationIssue("DuplicateId", "duplicate record id", where))
        seen_record_ids.add(record.record_id)
        key = (record.attribute, record.event_id, record.object_id)
        if key in seen_keys:
            errors.append(
                ValidationIssue(
                    "DuplicateId",
                    f"duplicate (attribute, event, object) triple {key!r}",
                    where,
                )
            )
        seen_keys.add(key)
        entry = log.schema.dynamic.get(record.attribute)
        obj = log.objects.get(record.object_id)
        event = log._events_by_id.get(record.event_id)
        if event is None:
            errors.append(
                ValidationIssue(
                    "DanglingForeignKey", f"unknown event {record.event_id!r}", where
                )
            )
        if obj is None:
            errors.append(
                ValidationIssue(
                    "DanglingForeignKey", f"unknown object {record.object_id!r}", where
                )
            )
        if entry is None:
            errors.append(
                ValidationIssue(
                    "SchemaMismatch",
                    f"undeclared dynamic attribute {record.attribute!r}",
                    where,
                )
            )
        elif obj is not None:
            owner, kind = entry
            if obj.object_type != owner:
                errors.append(
                    ValidationIssue(
                        "SchemaMismatch",
                        f"dynamic attribute {record.attribute!r} belongs to"
                        f" {owner!r}, not {obj.object_type!r}",
                        where,
                    )
                )
            if not _value_kind_ok(record.value, kind):
                errors.append(
                    ValidationIssue(
                        "InvalidValue", f"value violates kind {kind!r}", where
                    )
                )
        if event is not None and obj is not None:
            if record.object_id not in event.referenced_objects():
                errors.append(
                    ValidationIssue(
                        "ShiftTargetNotInEvent",
                        f"event {record.event_id!r} changes {record.attribute!r} of"
                        f" {record.object_id!r} without referencing it",
                        where,
                    )
                )

    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))
