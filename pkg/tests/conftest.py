"""Shared builders for the test suite."""

from __future__ import annotations

import pytest

from delayedmarkets.markets import Market
from delayedmarkets.probability import Filtration, FiniteSpace, Partition
from delayedmarkets.rationals import rat


def binomial_market(s0, up, down):
    """One asset, two states, one step: the textbook sanity market."""
    states = ("u", "d")
    space = FiniteSpace.uniform(states, 1, 1)
    prices = {"stock": ((rat(s0), rat(s0)), (rat(up), rat(down)))}
    grand = Filtration((Partition.trivial(states), Partition.discrete(states)))
    index_set = frozenset({"stock"})
    return Market(space, prices, (index_set,), {index_set: grand}, grand)


def two_step_market():
    """Four states, two steps, one asset on a recombining-style tree."""
    states = ("uu", "ud", "du", "dd")
    space = FiniteSpace.uniform(states, 2, 2)
    level1 = Partition.of(states, [("uu", "ud"), ("du", "dd")])
    grand = Filtration((Partition.trivial(states), level1, Partition.discrete(states)))
    prices = {
        "stock": (
            tuple(rat(4) for _ in states),
            (rat(8), rat(8), rat(2), rat(2)),
            (rat(16), rat(4), rat(4), rat(1)),
        )
    }
    index_set = frozenset({"stock"})
    return Market(space, prices, (index_set,), {index_set: grand}, grand)


@pytest.fixture
def no_arbitrage_binomial():
    return binomial_market(1, 2, rat(1, 2))


@pytest.fixture
def dominated_binomial():
    return binomial_market(1, 2, 1)
