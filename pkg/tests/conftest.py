"""Shared fixtures: the telephony running scenario at desk scale."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from provtrim import AbstractionForest, AbstractionTree, PolySet, normalize

settings.register_profile(
    "provtrim",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("provtrim")


REVENUE_TERMS = [
    (220.8, {"p1": 1, "m1": 1}),
    (240, {"p1": 1, "m3": 1}),
    (127.4, {"f1": 1, "m1": 1}),
    (114.45, {"f1": 1, "m3": 1}),
    (75.9, {"y1": 1, "m1": 1}),
    (72.5, {"y1": 1, "m3": 1}),
    (42, {"v": 1, "m1": 1}),
    (24.2, {"v": 1, "m3": 1}),
]

BUSINESS_TERMS = [
    (77.9, {"b1": 1, "m1": 1}),
    (80.5, {"b1": 1, "m3": 1}),
    (52.2, {"e": 1, "m1": 1}),
    (56.5, {"e": 1, "m3": 1}),
    (69.7, {"b2": 1, "m1": 1}),
    (100.65, {"b2": 1, "m3": 1}),
]


@pytest.fixture
def revenue_poly():
    """Zip-10001 revenues: four plan variables crossed with two months."""
    return normalize(REVENUE_TERMS)


@pytest.fixture
def business_poly():
    """Zip-10002 revenues over the business-plan variables."""
    return normalize(BUSINESS_TERMS)


@pytest.fixture
def plans_tree():
    """The full plan hierarchy, including leaves no polynomial uses."""
    return AbstractionTree.build(
        ("Plans", [
            ("Business", [("SB", ["b1", "b2"]), "e"]),
            ("Special", [("F", ["f1", "f2"]), ("Y", ["y1", "y2", "y3"]), "v"]),
            ("Standard", ["p1", "p2"]),
        ])
    )


@pytest.fixture
def months_tree():
    """Quarter groupings; only q1's months occur in the fixtures."""
    return AbstractionTree.build(
        ("Year", [("q1", ["m1", "m3"]), ("q4", ["m10", "m12"])])
    )


@pytest.fixture
def revenue_polyset(revenue_poly):
    return PolySet([revenue_poly])


@pytest.fixture
def zip_polyset(revenue_poly, business_poly):
    return PolySet([revenue_poly, business_poly])


@pytest.fixture
def plans_forest(plans_tree):
    return AbstractionForest([plans_tree])


@pytest.fixture
def months_forest(months_tree):
    return AbstractionForest([months_tree])


@pytest.fixture
def zip_forest(plans_tree, months_tree):
    return AbstractionForest([plans_tree, months_tree])
