"""Synthetic DOCEL log generators with embedded, replayable decision logic.

Two processes are provided: a linear book publication process (authors,
books, publishers) and an order shipping process with a refund loop
(customers, orders, a single product type).  Every generated decision
value is produced by the same decision tables that :func:`ground_truth`
exposes, so tests can replay the tables over a generated log and must
reproduce every outcome exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta
from typing import Mapping

import numpy as np

from .docel import (
    AttributeSchema,
    DocelLog,
    DynamicAttributeRecord,
    Event,
    ObjectInstance,
    build_log,
)


class InvalidParams(ValueError):
    pass


# ---------------------------------------------------------------------------
# decision tables (ground truth)
# ---------------------------------------------------------------------------

_OPS = {
    "==": lambda a, b: a == b,
    ">=": lambda a, b: a >= b,
    "<=": lambda a, b: a <= b,
    "<": lambda a, b: a < b,
    ">": lambda a, b: a > b,
}


@dataclass(frozen=True)
class RuleRow:
    """One IF-THEN row; empty conditions match everything."""

    conditions: tuple[tuple[str, str, object], ...]  # (feature, op, value)
    outcome: object

    def matches(self, assignment: Mapping[str, object]) -> bool:
        return all(_OPS[op](assignment[feat], value) for feat, op, value in self.conditions)


@dataclass(frozen=True)
class DecisionTable:
    output: str
    inputs: tuple[str, ...]
    rows: tuple[RuleRow, ...]

    def evaluate(self, assignment: Mapping[str, object]) -> object:
        for row in self.rows:
            if row.matches(assignment):
                return row.outcome
        raise KeyError(f"no rule of {self.output!r} matches {dict(assignment)!r}")


@dataclass(frozen=True)
class GroundTruthSpec:
    """Edges and rule tables a generator embeds, for rediscovery checks."""

    drd_edges: tuple[tuple[str, str, str], ...]  # (input, output, input object type)
    rules: Mapping[str, DecisionTable]


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

DEFAULT_GENRES = ("Fantasy", "Romance", "Science Fiction", "Thriller", "History", "Poetry")

_FIRST_NAMES = (
    "Alex", "Bram", "Carla", "Daan", "Els", "Femke", "Gilles", "Hanne",
    "Ivo", "Jana", "Koen", "Lena", "Milan", "Noor", "Otto", "Paula",
    "Quinten", "Rosa", "Stan", "Tess",
)
_LAST_NAMES = (
    "Peeters", "Janssens", "Maes", "Jacobs", "Mertens", "Willems",
    "Claes", "Goris", "Wouters", "DeSmet", "Dubois", "Lambert",
    "Martin", "Simon", "Dumont", "Verhoeven",
)
_COMPANY_WORDS = (
    "Atlas", "Borealis", "Cedar", "Delta", "Ember", "Fjord", "Granite",
    "Harbor", "Iris", "Juniper", "Krypton", "Lumen",
)


@dataclass(frozen=True)
class PublicationParams:
    max_authors: int = 100
    max_published_books: int = 9
    genre_list: tuple[str, ...] = DEFAULT_GENRES
    max_publishers: int = 100
    num_books: int = 100
    start_time: datetime = datetime(2022, 1, 1, 10, 0, 0)
    event_interval: tuple[int, int] = (60, 600)  # seconds between a book's events
    prob_compliance: float = 0.7
    publication_threshold: int = 5
    rng_seed: int = 42

    def check(self) -> None:
        if min(self.max_authors, self.max_publishers, self.num_books) < 1:
            raise InvalidParams("object counts must be >= 1")
        if self.max_published_books < 1:
            raise InvalidParams("max_published_books must be >= 1")
        if not 0.0 <= self.prob_compliance <= 1.0:
            raise InvalidParams("prob_compliance must be in [0, 1]")
        if self.event_interval[0] < 1 or self.event_interval[1] < self.event_interval[0]:
            raise InvalidParams("event_interval must be a nonempty positive range")
        if not self.genre_list:
            raise InvalidParams("genre_list must not be empty")


@dataclass(frozen=True)
class ShippingParams:
    product_value: float = 40.0
    num_customers: int = 50
    resource_lists: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    start_time: datetime = datetime(2022, 3, 1, 8, 0, 0)
    event_interval: tuple[int, int] = (60, 600)
    order_value_threshold: float = 100.0
    num_orders: int = 150
    prob_refund: float = 0.15
    max_order_quantity: int = 3
    rng_seed: int = 42

    def check(self) -> None:
        if self.product_value <= 0:
            raise InvalidParams("product_value must be > 0")
        if self.max_order_quantity < 1:
            raise InvalidParams("max_order_quantity must be >= 1")
        if min(self.num_customers, self.num_orders) < 1:
            raise InvalidParams("object counts must be >= 1")
        if not 0.0 <= self.prob_refund <= 1.0:
            raise InvalidParams("prob_refund must be in [0, 1]")
        if self.event_interval[0] < 1 or self.event_interval[1] < self.event_interval[0]:
            raise InvalidParams("event_interval must be a nonempty positive range")


def ground_truth(
    process: str, params: PublicationParams | ShippingParams | None = None
) -> GroundTruthSpec:
    """The exact edges and rule tables the named generator embeds."""
    if process == "publication":
        p = params if isinstance(params, PublicationParams) else PublicationParams()
        thr = p.publication_threshold
        quality = DecisionTable(
            output="Quality",
            inputs=("Total number of published books", "Review Score"),
            rows=(
                RuleRow(
                    (
                        ("Total number of published books", ">=", float(thr)),
                        ("Review Score", ">=", 6.0),
                    ),
                    "Excellent",
                ),
                RuleRow(
                    (("Total number of published books", ">=", float(thr)),), "Average"
                ),
                RuleRow((), "Bad"),
            ),
        )
        publication = DecisionTable(
            output="Publication Status",
            inputs=("Quality", "Compliance"),
            rows=(
                RuleRow((("Quality", "==", "Excellent"), ("Compliance", "==", True)), "Yes"),
                RuleRow((("Quality", "==", "Average"), ("Compliance", "==", True)), "Revise"),
                RuleRow((), "No"),
            ),
        )
        return GroundTruthSpec(
            drd_edges=(
                ("Review Score", "Quality", "Books"),
                ("Total number of published books", "Quality", "Authors"),
                ("Quality", "Publication Status", "Books"),
                ("Compliance", "Publication Status", "Books"),
            ),
            rules={"Quality": quality, "Publication Status": publication},
        )
    if process == "shipping":
        p = params if isinstance(params, ShippingParams) else ShippingParams()
        value_rows = tuple(
            RuleRow((("Quantity", "==", float(q)),), float(q) * p.product_value)
            for q in range(1, p.max_order_quantity + 1)
        )
        order_value = DecisionTable(
            output="Order Value", inputs=("Quantity",), rows=value_rows
        )
        shipping = DecisionTable(
            output="Shipping Method",
            inputs=("Refund", "Importance", "Order Value"),
            rows=(
                RuleRow((("Refund", "==", True),), "Express Courier"),
                RuleRow((("Importance", "==", "High"),), "Courier"),
                RuleRow((("Order Value", ">=", p.order_value_threshold),), "Courier"),
                RuleRow((), "Mail"),
            ),
        )
        return GroundTruthSpec(
            drd_edges=(
                ("Quantity", "Order Value", "Orders"),
                ("Order Value", "Shipping Method", "Orders"),
                ("Importance", "Shipping Method", "Customers"),
                ("Refund", "Shipping Method", "Orders"),
            ),
            rules={"Order Value": order_value, "Shipping Method": shipping},
        )
    raise InvalidParams(f"unknown process {process!r}")


# ---------------------------------------------------------------------------
# shared scheduling helpers
# ---------------------------------------------------------------------------


def _person_name(rng: np.random.Generator) -> str:
    return f"{_FIRST_NAMES[rng.integers(len(_FIRST_NAMES))]} {_LAST_NAMES[rng.integers(len(_LAST_NAMES))]}"


def _company_name(rng: np.random.Generator) -> str:
    a = _COMPANY_WORDS[rng.integers(len(_COMPANY_WORDS))]
    b = _COMPANY_WORDS[rng.integers(len(_COMPANY_WORDS))]
    return f"{a} {b} Publishing"


def _finalize_events(
    scheduled: list[tuple[datetime, int, int, str, dict[str, frozenset[str]], dict[str, object], list[tuple[str, str, object]]]],
) -> tuple[list[Event], dict[int, str]]:
    """Sort case-interleaved events, force strictly increasing timestamps
    and hand out global event ids; returns events plus schedule-key -> id."""
    scheduled.sort(key=lambda item: (item[0], item[1], item[2]))
    events: list[Event] = []
    id_by_slot: dict[int, str] = {}
    last: datetime | None = None
    for number, (when, case, step, activity, refs, attrs, _writes) in enumerate(
        scheduled, start=1
    ):
        if last is not None and when <= last:
            when = last + timedelta(seconds=1)
        last = when
        event_id = f"e{number}"
        id_by_slot[case * 1000 + step] = event_id
        events.append(
            Event(
                event_id=event_id,
                activity=activity,
                timestamp=when,
                object_refs=refs,
                event_attributes=attrs,
            )
        )
    return events, id_by_slot


# ---------------------------------------------------------------------------
# publication process
# ---------------------------------------------------------------------------

PUBLICATION_ACTIVITIES = (
    "Find inspiration",
    "Write book",
    "Submit book manuscript",
    "Read manuscript details",
    "Read manuscript",
    "Determine book quality",
    "Decide on publication",
    "Communicate decision",
)


def generate_publication_log(p: PublicationParams | None = None) -> DocelLog:
    """Linear eight-activity publication process, one chain per book.

    Authors carry their prior publication count as a static attribute;
    books accumulate Publication Status, Compliance, Review Score and
    Quality through the chain.  Quality and the publication decision come
    from the embedded decision tables.
    """
    p = p or PublicationParams()
    p.check()
    rng = np.random.default_rng(p.rng_seed)
    truth = ground_truth("publication", p)

    authors: dict[str, ObjectInstance] = {}
    for i in range(p.max_authors):
        oid = f"a{i + 1}"
        authors[oid] = ObjectInstance(
            object_id=oid,
            object_type="Authors",
            static_attributes={
                "Name": _person_name(rng),
                "Author Specialty Genre": str(p.genre_list[rng.integers(len(p.genre_list))]),
                "Total number of published books": float(
                    rng.integers(1, p.max_published_books + 1)
                ),
            },
        )
    publishers: dict[str, ObjectInstance] = {}
    for i in range(p.max_publishers):
        oid = f"p{i + 1}"
        publishers[oid] = ObjectInstance(
            object_id=oid,
            object_type="Publishers",
            static_attributes={
                "Name": _company_name(rng),
                "Publisher Specialty Genre": str(
                    p.genre_list[rng.integers(len(p.genre_list))]
                ),
            },
        )

    books: dict[str, ObjectInstance] = {}
    scheduled: list = []
    writes_by_slot: dict[int, list[tuple[str, str, object]]] = {}
    lo, hi = p.event_interval
    arrival = p.start_time
    for i in range(p.num_books):
        book_id = f"b{i + 1}"
        author_id = f"a{(i % p.max_authors) + 1}"
        publisher_id = f"p{(i % p.max_publishers) + 1}"
        books[book_id] = ObjectInstance(
            object_id=book_id,
            object_type="Books",
            static_attributes={
                "Genre": str(p.genre_list[rng.integers(len(p.genre_list))]),
                "Number of pages": float(rng.integers(120, 481)),
            },
        )

        published = authors[author_id].static_attributes[
            "Total number of published books"
        ]
        score = float(rng.integers(0, 11))
        compliant = bool(rng.random() < p.prob_compliance)
        quality = truth.rules["Quality"].evaluate(
            {"Total number of published books": published, "Review Score": score}
        )
        decision = truth.rules["Publication Status"].evaluate(
            {"Quality": quality, "Compliance": compliant}
        )

        a = frozenset([author_id])
        b = frozenset([book_id])
        pub = frozenset([publisher_id])
        refs_by_step = (
            {"Authors": a},
            {"Authors": a, "Books": b},
            {"Authors": a, "Books": b, "Publishers": pub},
            {"Books": b, "Publishers": pub},
            {"Books": b, "Publishers": pub},
            {"Authors": a, "Books": b, "Publishers": pub},
            {"Books": b, "Publishers": pub},
            {"Authors": a, "Books": b, "Publishers": pub},
        )
        writes_by_step: dict[int, list[tuple[str, str, object]]] = {
            2: [("Publication Status", book_id, "Pending")],
            3: [("Compliance", book_id, compliant)],
            4: [("Review Score", book_id, score)],
            5: [("Quality", book_id, quality)],
            6: [("Publication Status", book_id, decision)],
        }

        arrival = arrival + timedelta(seconds=int(rng.integers(5, 46)))
        cursor = arrival
        for step, activity in enumerate(PUBLICATION_ACTIVITIES):
            cursor = cursor + timedelta(seconds=int(rng.integers(lo, hi + 1)))
            scheduled.append((cursor, i, step, activity, refs_by_step[step], {}, None))
            if step in writes_by_step:
                writes_by_slot[i * 1000 + step] = writes_by_step[step]

    events, id_by_slot = _finalize_events(scheduled)

    counters = {"Publication Status": 0, "Compliance": 0, "Review Score": 0, "Quality": 0}
    prefixes = {
        "Publication Status": "ps",
        "Compliance": "c",
        "Review Score": "rs",
        "Quality": "q",
    }
    records: list[DynamicAttributeRecord] = []
    for slot in sorted(writes_by_slot):
        for attribute, object_id, value in writes_by_slot[slot]:
            counters[attribute] += 1
            records.append(
                DynamicAttributeRecord(
                    record_id=f"{prefixes[attribute]}{counters[attribute]}",
                    attribute=attribute,
                    value=value,
                    event_id=id_by_slot[slot],
                    object_id=object_id,
                )
            )

    schema = AttributeSchema(
        object_types=("Authors", "Books", "Publishers"),
        static={
            "Authors": {
                "Name": "text",
                "Author Specialty Genre": "categorical",
                "Total number of published books": "numeric",
            },
            "Books": {"Genre": "categorical", "Number of pages": "numeric"},
            "Publishers": {"Name": "text", "Publisher Specialty Genre": "categorical"},
        },
        dynamic={
            "Publication Status": ("Books", "categorical"),
            "Compliance": ("Books", "boolean"),
            "Review Score": ("Books", "numeric"),
            "Quality": ("Books", "categorical"),
        },
        event_attributes={},
    )
    return build_log(
        events,
        list(authors.values()) + list(books.values()) + list(publishers.values()),
        records,
        schema,
    )


# ---------------------------------------------------------------------------
# shipping process
# ---------------------------------------------------------------------------

SHIPPING_BASE_ACTIVITIES = (
    "Place order",
    "Receive order",
    "Determine order value",
    "Confirm shipping information",
    "Determine shipping method",
    "Send invoice",
    "Ship package",
    "Deliver package",
    "Check customer satisfaction",
    "File order",
)

SHIPPING_REFUND_ACTIVITIES = (
    "Request refund",
    "Determine shipping method",
    "Send back package",
    "Pay refund",
)

DEFAULT_RESOURCES: Mapping[str, tuple[str, ...]] = {
    activity: ("Sam", "Robin", "Charlie", "Alex")
    for activity in SHIPPING_BASE_ACTIVITIES + SHIPPING_REFUND_ACTIVITIES
}


def generate_shipping_log(p: ShippingParams | None = None) -> DocelLog:
    """Order shipping process with an express-courier refund loop.

    Each order runs ten base activities; unsatisfied customers trigger a
    four-activity return leg in which the shipping method is determined a
    second time.  The order's refund flag is recorded when the company
    receives the order, so the embedded shipping-method table is applied
    with all three of its inputs at both determinations.
    """
    p = p or ShippingParams()
    p.check()
    rng = np.random.default_rng(p.rng_seed)
    truth = ground_truth("shipping", p)
    resources = dict(DEFAULT_RESOURCES)
    resources.update({k: tuple(v) for k, v in (p.resource_lists or {}).items()})

    customers: dict[str, ObjectInstance] = {}
    for i in range(p.num_customers):
        oid = f"c{i + 1}"
        customers[oid] = ObjectInstance(
            object_id=oid,
            object_type="Customers",
            static_attributes={
                "Name": _person_name(rng),
                "Bank Account": f"BE{rng.integers(10**13, 10**14 - 1)}",
                "Importance": "High" if rng.random() < 0.5 else "Low",
            },
        )
    product = ObjectInstance(
        object_id="pr1",
        object_type="Products",
        static_attributes={"Product Value": float(p.product_value)},
    )

    orders: dict[str, ObjectInstance] = {}
    scheduled: list = []
    writes_by_slot: dict[int, list[tuple[str, str, object]]] = {}
    lo, hi = p.event_interval
    arrival = p.start_time
    for i in range(p.num_orders):
        order_id = f"o{i + 1}"
        customer_id = f"c{(i % p.num_customers) + 1}"
        quantity = float(rng.integers(1, p.max_order_quantity + 1))
        refund = bool(rng.random() < p.prob_refund)
        orders[order_id] = ObjectInstance(
            object_id=order_id,
            object_type="Orders",
            static_attributes={"Quantity": quantity},
        )

        importance = customers[customer_id].static_attributes["Importance"]
        value = truth.rules["Order Value"].evaluate({"Quantity": quantity})
        method = truth.rules["Shipping Method"].evaluate(
            {"Refund": refund, "Importance": importance, "Order Value": value}
        )

        c = frozenset([customer_id])
        o = frozenset([order_id])
        pr = frozenset([product.object_id])
        base_refs = (
            {"Customers": c, "Orders": o},
            {"Orders": o, "Products": pr},
            {"Orders": o, "Products": pr},
            {"Customers": c, "Orders": o},
            {"Customers": c, "Orders": o},
            {"Customers": c, "Orders": o},
            {"Orders": o},
            {"Orders": o},
            {"Customers": c, "Orders": o},
            {"Orders": o},
        )
        steps: list[tuple[str, dict[str, frozenset[str]]]] = list(
            zip(SHIPPING_BASE_ACTIVITIES[:9], base_refs[:9])
        )
        writes: dict[int, list[tuple[str, str, object]]] = {
            1: [("Refund", order_id, refund)],
            2: [("Order Value", order_id, value)],
            4: [("Shipping Method", order_id, method)],
        }
        if refund:
            leg_refs = (
                {"Customers": c, "Orders": o},
                {"Customers": c, "Orders": o},
                {"Orders": o},
                {"Customers": c, "Orders": o},
            )
            for activity, refs in zip(SHIPPING_REFUND_ACTIVITIES, leg_refs):
                steps.append((activity, refs))
            # The return leg re-applies the same table; with the refund flag
            # set the method is Express Courier.
            writes[len(steps) - 3] = [("Shipping Method", order_id, method)]
        steps.append((SHIPPING_BASE_ACTIVITIES[9], base_refs[9]))

        arrival = arrival + timedelta(seconds=int(rng.integers(5, 46)))
        cursor = arrival
        for step, (activity, refs) in enumerate(steps):
            cursor = cursor + timedelta(seconds=int(rng.integers(lo, hi + 1)))
            pool = resources.get(activity, ("Sam",))
            attrs = {"Resource": str(pool[rng.integers(len(pool))])}
            scheduled.append((cursor, i, step, activity, refs, attrs, None))
            if step in writes:
                writes_by_slot[i * 1000 + step] = writes[step]

    events, id_by_slot = _finalize_events(scheduled)

    counters = {"Refund": 0, "Order Value": 0, "Shipping Method": 0}
    prefixes = {"Refund": "rf", "Order Value": "ov", "Shipping Method": "sm"}
    records: list[DynamicAttributeRecord] = []
    for slot in sorted(writes_by_slot):
        for attribute, object_id, value in writes_by_slot[slot]:
            counters[attribute] += 1
            records.append(
                DynamicAttributeRecord(
                    record_id=f"{prefixes[attribute]}{counters[attribute]}",
                    attribute=attribute,
                    value=value,
                    event_id=id_by_slot[slot],
                    object_id=object_id,
                )
            )

    schema = AttributeSchema(
        object_types=("Customers", "Orders", "Products"),
        static={
            "Customers": {
                "Name": "text",
                "Bank Account": "text",
                "Importance": "categorical",
            },
            "Orders": {"Quantity": "numeric"},
            "Products": {"Product Value": "numeric"},
        },
        dynamic={
            "Refund": ("Orders", "boolean"),
            "Order Value": ("Orders", "numeric"),
            "Shipping Method": ("Orders", "categorical"),
        },
        event_attributes={"Resource": "text"},
    )
    return build_log(
        events,
        list(customers.values()) + list(orders.values()) + [product],
        records,
        schema,
    )
