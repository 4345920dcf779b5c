"""Shift bookkeeping: which activity changed which attribute of which object.

A *shift* is one change of a dynamic attribute of one object by one
activity; the n-th shift of (attribute, activity, object) is the n-th such
change in log order.  Static attributes are modelled as shifted exactly
once, at the object's first event, under that event's activity, which lets
them participate in discovery with shift number 1.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .docel import DocelLog


@dataclass(frozen=True, order=True)
class Ataots:
    """(attribute, activity, object type, shift number) node identity."""

    attribute: str
    activity: str
    object_type: str
    shift_number: int

    @property
    def label(self) -> str:
        return f"{self.attribute}_shift-{self.shift_number}"

    def describe(self) -> str:
        return f"{self.label} @ {self.activity} [{self.object_type}]"


@dataclass(frozen=True)
class TraceSet:
    """Objects whose traces contain at least ``anchor.shift_number`` shifts."""

    object_ids: frozenset[str]
    anchor: Ataots

    def __len__(self) -> int:
        return len(self.object_ids)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.object_ids))


@dataclass
class CandidateVariables:
    """Per-activity potential inputs and outputs as (attribute, type) pairs."""

    inputs: dict[str, set[tuple[str, str]]] = field(default_factory=dict)
    outputs: dict[str, set[tuple[str, str]]] = field(default_factory=dict)

    def is_output(self, activity: str, attribute: str, object_type: str) -> bool:
        return (attribute, object_type) in self.outputs.get(activity, ())


@dataclass(frozen=True)
class ShiftIndex:
    """Immutable per-log shift tables; safe for concurrent reads.

    ``shifts`` covers dynamic attributes only; static attributes are reached
    through ``static_origin`` plus the pseudo-shift accessors below.
    """

    shifts: Mapping[tuple[str, str, str], tuple[str, ...]]
    static_origin: Mapping[tuple[str, str], str]
    traces: Mapping[str, tuple[str, ...]]
    object_type_counts: Mapping[str, int]
    shift_values: Mapping[tuple[str, str, str], tuple[object, ...]]
    static_values: Mapping[tuple[str, str], object]
    static_attributes: Mapping[str, tuple[str, ...]]
    first_activity: Mapping[str, str]
    objects_by_type: Mapping[str, tuple[str, ...]]

    def is_static(self, attribute: str, object_type: str) -> bool:
        return attribute in self.static_attributes.get(object_type, ())

    def shift_events(self, attribute: str, activity: str, object_id: str) -> tuple[str, ...]:
        """Shift events of (attribute, activity) for one object, log ordered."""
        events = self.shifts.get((attribute, activity, object_id))
        if events is not None:
            return events
        origin = self.static_origin.get((attribute, object_id))
        if origin is not None and self.first_activity.get(object_id) == activity:
            return (origin,)
        return ()

    def shift_value(
        self, attribute: str, activity: str, object_id: str, shift_number: int
    ) -> object:
        """Value written at the n-th shift (the stored value for statics)."""
        values = self.shift_values.get((attribute, activity, object_id))
        if values is not None:
            return values[shift_number - 1]
        return self.static_values[(attribute, object_id)]

    def to_debug_json(self) -> str:
        """Test-tooling dump of the index content."""
        payload = {
            "shifts": {
                " | ".join(key): list(events)
                for key, events in sorted(self.shifts.items())
            },
            "static_origin": {
                " | ".join(key): eid for key, eid in sorted(self.static_origin.items())
            },
            "traces": {oid: list(eids) for oid, eids in sorted(self.traces.items())},
            "object_type_counts": dict(sorted(self.object_type_counts.items())),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def build_shift_index(log: DocelLog) -> ShiftIndex:
    """One pass over the log building every shift table."""
    traces = {oid: log.trace_event_ids(oid) for oid in log.objects}

    shifts: dict[tuple[str, str, str], list[str]] = {}
    shift_values: dict[tuple[str, str, str], list[object]] = {}
    # Dynamic records are canonically ordered, but group per event position so
    # batch changes (one event shifting several objects) land one entry each.
    ordered = sorted(
        log.dynamic_records,
        key=lambda r: (log.event_position(r.event_id), r.attribute, r.object_id),
    )
    for record in ordered:
        activity = log.event(record.event_id).activity
        key = (record.attribute, activity, record.object_id)
        shifts.setdefault(key, []).append(record.event_id)
        shift_values.setdefault(key, []).append(record.value)

    static_origin: dict[tuple[str, str], str] = {}
    static_values: dict[tuple[str, str], object] = {}
    first_activity: dict[str, str] = {}
    for oid, obj in log.objects.items():
        trace = traces[oid]
        if not trace:
            continue
        first_event = trace[0]
        first_activity[oid] = log.event(first_event).activity
        for attr in log.schema.static.get(obj.object_type, {}):
            static_origin[(attr, oid)] = first_event
            static_values[(attr, oid)] = obj.static_attributes.get(attr)

    counts: dict[str, int] = {t: 0 for t in log.schema.object_types}
    by_type: dict[str, list[str]] = {t: [] for t in log.schema.object_types}
    for oid, obj in log.objects.items():
        counts[obj.object_type] = counts.get(obj.object_type, 0) + 1
        by_type.setdefault(obj.object_type, []).append(oid)

    return ShiftIndex(
        shifts={k: tuple(v) for k, v in shifts.items()},
        static_origin=static_origin,
        traces=traces,
        object_type_counts=counts,
        shift_values={k: tuple(v) for k, v in shift_values.items()},
        static_values=static_values,
        static_attributes={
            t: tuple(attrs) for t, attrs in ((t, log.schema.static.get(t, {})) for t in log.schema.object_types)
        },
        first_activity=first_activity,
        objects_by_type={t: tuple(sorted(v)) for t, v in by_type.items()},
    )


def _minable_kind(kind: str | None) -> bool:
    # Free-form text attributes are identifiers (names, account numbers),
    # not decision variables; they never enter discovery.
    return kind in ("numeric", "categorical", "boolean")


def candidate_variables(
    index: ShiftIndex, log: DocelLog, min_shift: float
) -> CandidateVariables:
    """Potential input/output variables per activity.

    (attribute, type) is an input of activity ``a`` when the values written
    at shifts of ``a`` are not all identical, and additionally an output
    when strictly more than ``min_shift`` of that type's objects were
    shifted by ``a``.
    """
    grouped: dict[tuple[str, str, str], tuple[set[str], list[object]]] = {}

    for (attr, activity, oid), values in index.shift_values.items():
        owner = log.schema.dynamic_owner(attr)
        if not _minable_kind(log.schema.dynamic_kind(attr)):
            continue
        key = (attr, activity, owner)
        objects, pooled = grouped.setdefault(key, (set(), []))
        objects.add(oid)
        pooled.extend(values)

    for (attr, oid), value in index.static_values.items():
        object_type = log.objects[oid].object_type
        if not _minable_kind(log.schema.static_kind(object_type, attr)):
            continue
        activity = index.first_activity[oid]
        key = (attr, activity, object_type)
        objects, pooled = grouped.setdefault(key, (set(), []))
        objects.add(oid)
        pooled.append(value)

    result = CandidateVariables()
    for (attr, activity, object_type), (objects, pooled) in grouped.items():
        if len(set(pooled)) <= 1:
            continue
        result.inputs.setdefault(activity, set()).add((attr, object_type))
        total = index.object_type_counts.get(object_type, 0)
        if len(objects) > min_shift * total:
            result.outputs.setdefault(activity, set()).add((attr, object_type))
    return result


def enumerate_ataots(
    index: ShiftIndex, candidates: CandidateVariables, max_shift: int
) -> list[Ataots]:
    """Every output node expanded over realised shift numbers 1..max_shift."""
    out: list[Ataots] = []
    for activity, pairs in candidates.outputs.items():
        for attr, object_type in pairs:
            if index.is_static(attr, object_type):
                deepest = 1
            else:
                deepest = max(
                    (
                        len(events)
                        for (a, act, _), events in index.shifts.items()
                        if a == attr and act == activity
                    ),
                    default=0,
                )
            for n in range(1, min(deepest, max_shift) + 1):
                out.append(Ataots(attr, activity, object_type, n))
    return sorted(out)


def traces_with_shift(index: ShiftIndex, a: Ataots) -> TraceSet:
    """Objects of the node's type with at least ``shift_number`` shifts."""
    members = {
        oid
        for oid in index.objects_by_type.get(a.object_type, ())
        if len(index.shift_events(a.attribute, a.activity, oid)) >= a.shift_number
    }
    return TraceSet(object_ids=frozenset(members), anchor=a)
