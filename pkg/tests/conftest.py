"""Shared fixtures: a hand-built log snippet and a random small-log builder."""

from __future__ import annotations

from datetime import datetime, timedelta

import numpy as np
import pytest

from ocdm.docel import (
    AttributeSchema,
    DynamicAttributeRecord,
    Event,
    ObjectInstance,
    build_log,
)


def ts(text: str) -> datetime:
    return datetime.strptime(text, "%Y-%m-%d %H:%M:%S")


@pytest.fixture(scope="session")
def snippet_log():
    """Interleaved two-book publication snippet with known traces and shifts."""
    schema = AttributeSchema(
        object_types=("Authors", "Books", "Publishers"),
        static={
            "Authors": {"Name": "text"},
            "Books": {"Genre": "categorical"},
            "Publishers": {"Name": "text"},
        },
        dynamic={"Publication Status": ("Books", "categorical")},
    )
    objects = [
        ObjectInstance("a951", "Authors", {"Name": "Avery North"}),
        ObjectInstance("a155", "Authors", {"Name": "Brit Calder"}),
        ObjectInstance("b2", "Books", {"Genre": "Fantasy"}),
        ObjectInstance("b3", "Books", {"Genre": "Romance"}),
        ObjectInstance("p86", "Publishers", {"Name": "Telecom Electronics Publishing"}),
        ObjectInstance("p90", "Publishers", {"Name": "Studio West Software Publishing"}),
    ]

    def ev(eid, activity, when, authors=(), books=(), publishers=()):
        refs = {}
        if authors:
            refs["Authors"] = frozenset(authors)
        if books:
            refs["Books"] = frozenset(books)
        if publishers:
            refs["Publishers"] = frozenset(publishers)
        return Event(eid, activity, ts(when), refs)

    events = [
        ev("e1", "Find inspiration", "2022-01-01 10:53:45", authors=["a951"]),
        ev("e2", "Find inspiration", "2022-01-01 10:59:42", authors=["a155"]),
        ev("e3", "Write book", "2022-01-01 11:00:30", authors=["a951"], books=["b2"]),
        ev("e4", "Submit book manuscript", "2022-01-01 11:08:23", authors=["a951"], books=["b2"], publishers=["p90"]),
        ev("e5", "Write book", "2022-01-01 11:08:32", authors=["a155"], books=["b3"]),
        ev("e6", "Read manuscript details", "2022-01-01 11:17:26", books=["b2"], publishers=["p90"]),
        ev("e7", "Submit book manuscript", "2022-01-01 11:18:13", authors=["a155"], books=["b3"], publishers=["p86"]),
        ev("e8", "Read manuscript details", "2022-01-01 11:22:06", books=["b3"], publishers=["p86"]),
        ev("e9", "Read manuscript", "2022-01-01 11:27:06", books=["b2"], publishers=["p90"]),
        ev("e10", "Read manuscript", "2022-01-01 11:31:22", books=["b3"], publishers=["p86"]),
        ev("e11", "Determine book quality", "2022-01-01 11:36:09", authors=["a951"], books=["b2"], publishers=["p90"]),
        ev("e12", "Determine book quality", "2022-01-01 11:36:51", authors=["a155"], books=["b3"], publishers=["p86"]),
        ev("e13", "Decide on publication", "2022-01-01 11:38:02", books=["b3"], publishers=["p86"]),
    ]
    records = [
        DynamicAttributeRecord("ps3", "Publication Status", "Pending", "e4", "b2"),
        DynamicAttributeRecord("ps5", "Publication Status", "Pending", "e7", "b3"),
        DynamicAttributeRecord("ps6", "Publication Status", "Revise", "e13", "b3"),
    ]
    return build_log(events, objects, records, schema)


def random_small_log(seed: int, max_objects: int = 10):
    """Seeded random log with a handful of objects, events and shifts.

    Used for oracle-equivalence and round-trip checks; always passes
    validation by construction.
    """
    rng = np.random.default_rng(seed)
    n_types = int(rng.integers(1, 4))
    type_names = tuple(f"T{i + 1}" for i in range(n_types))

    kinds = ("numeric", "categorical", "boolean", "text")
    static: dict[str, dict[str, str]] = {}
    for t in type_names:
        static[t] = {
            f"{t}s{j}": kinds[rng.integers(len(kinds))]
            for j in range(rng.integers(0, 3))
        }

    objects = []
    per_type: dict[str, list[str]] = {t: [] for t in type_names}
    n_objects = int(rng.integers(1, max_objects + 1))
    for i in range(n_objects):
        t = type_names[rng.integers(n_types)]
        oid = f"{t.lower()}_{i}"
        per_type[t].append(oid)
        attrs = {}
        for attr, kind in static[t].items():
            attrs[attr] = _random_value(rng, kind)
        objects.append(ObjectInstance(oid, t, attrs))

    dynamic: dict[str, tuple[str, str]] = {}
    for j in range(rng.integers(0, 4)):
        owner = type_names[rng.integers(n_types)]
        dynamic[f"d{j}"] = (owner, kinds[rng.integers(3)])  # no text dynamics

    activities = [f"act{j}" for j in range(rng.integers(1, 5))]
    events = []
    base = datetime(2023, 1, 1, 9, 0, 0)
    n_events = int(rng.integers(1, 16))
    all_ids = [o.object_id for o in objects]
    for i in range(n_events):
        chosen = rng.choice(all_ids, size=min(len(all_ids), int(rng.integers(1, 4))), replace=False)
        refs: dict[str, set[str]] = {}
        for oid in chosen:
            t = next(o.object_type for o in objects if o.object_id == oid)
            refs.setdefault(t, set()).add(oid)
        events.append(
            Event(
                f"ev{i}",
                activities[rng.integers(len(activities))],
                base + timedelta(seconds=int(rng.integers(0, 5000))),
                {t: frozenset(ids) for t, ids in refs.items()},
            )
        )

    records = []
    counter = 0
    for attr, (owner, kind) in dynamic.items():
        for event in events:
            for oid in sorted(event.object_refs.get(owner, ())):
                if rng.random() < 0.5:
                    counter += 1
                    records.append(
                        DynamicAttributeRecord(
                            f"r{counter}", attr, _random_value(rng, kind), event.event_id, oid
                        )
                    )

    schema = AttributeSchema(
        object_types=type_names, static=static, dynamic=dynamic, event_attributes={}
    )
    return build_log(events, objects, records, schema)


def _random_value(rng: np.random.Generator, kind: str):
    if kind == "numeric":
        return float(rng.integers(0, 7))
    if kind == "boolean":
        return bool(rng.random() < 0.5)
    if kind == "categorical":
        return f"cat{rng.integers(0, 4)}"
    return f"free text {rng.integers(0, 100)}"
