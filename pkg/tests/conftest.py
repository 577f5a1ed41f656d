"""Shared fixtures: reference sources, fixture dictionaries, and the
seeded random dictionary corpus used by the property and acceptance suites."""

import pytest

from vvcode import FiniteDictionary, RunLengthDictionary, SourceModel
from vvcode.rng import XorShift64Star

CORPUS_SEED = 42
CORPUS_RANDOM_COUNT = 100
CORPUS_MAX_DEPTH = 8


def make_rng(seed):
    return XorShift64Star(seed)


def random_proper_dictionary(rng, max_depth=CORPUS_MAX_DEPTH, k=2):
    """Random proper dictionary via trie sampling.

    Each edge independently becomes a word, an internal node, or is left
    absent; absent branches produce dead zones, so the corpus contains
    non-ASC dictionaries as well as complete ones.
    """
    words = []

    def grow(prefix):
        for s in range(k):
            r = rng.next_float()
            if len(prefix) + 1 >= max_depth:
                if r < 0.85:
                    words.append(prefix + (s,))
            elif r < 0.45:
                words.append(prefix + (s,))
            elif r < 0.85:
                grow(prefix + (s,))

    while not words:
        grow(())
    return FiniteDictionary(k, words)


def fixture_dictionaries():
    return [
        FiniteDictionary(2, [(0,)]),
        FiniteDictionary(2, [(0,), (1, 0), (1, 1)]),
        FiniteDictionary(2, [(0,), (1,)]),
        FiniteDictionary(2, [(0, 0), (0, 1), (1, 0), (1, 1)]),
    ]


def build_corpus():
    rng = make_rng(CORPUS_SEED)
    dicts = fixture_dictionaries()
    while len(dicts) < len(fixture_dictionaries()) + CORPUS_RANDOM_COUNT:
        dicts.append(random_proper_dictionary(rng))
    return dicts


@pytest.fixture(scope="session")
def corpus():
    return build_corpus()


@pytest.fixture(scope="session")
def fair():
    return SourceModel.fair_bit()


@pytest.fixture(scope="session")
def biased():
    return SourceModel.finite([0.9, 0.1])


@pytest.fixture(scope="session")
def geometric_half():
    return SourceModel.geometric(0.5)


@pytest.fixture(scope="session")
def run_length():
    return RunLengthDictionary()


@pytest.fixture(scope="session")
def complete_dict():
    """The small worked example {0, 10, 11}: proper and complete."""
    return FiniteDictionary(2, [(0,), (1, 0), (1, 1)])
