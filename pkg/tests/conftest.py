import itertools
import json

import numpy as np
import pytest

from pathlyap.corpus import COMPLETE_GRAPH, EXAMPLE_MATRICES, GAP_GRAPH
from pathlyap.graph import parse_graph
from pathlyap.io import matrix_set_from_dict


def all_words(alphabet, max_len, min_len=1):
    for t in range(min_len, max_len + 1):
        yield from itertools.product(alphabet, repeat=t)


def readable_by_paths(g, w):
    """Independent oracle: is ``w`` a factor of the label of some path of ``g``?

    Works on the original edges (no expansion): try every edge and every offset
    inside its label as the start, then follow whole edges until ``w`` is used up.
    """
    w = tuple(w)
    if not w:
        return True
    out = {v: [e for e in g.edges if e.src == v] for v in g.nodes}

    def follow(node, rest):
        if not rest:
            return True
        for e in out[node]:
            k = min(len(e.label), len(rest))
            if e.label[:k] == rest[:k] and follow(e.dst, rest[k:]):
                return True
        return False

    for e in g.edges:
        for off in range(len(e.label)):
            tail = e.label[off:]
            k = min(len(tail), len(w))
            if tail[:k] == w[:k] and follow(e.dst, w[k:]):
                return True
    return False


def sigma_oracle(w, alphabet):
    """Independent dense construction of the Sigma_w matrices (1-based in the comments)."""
    n = len(w) + 1
    mats = {s: np.zeros((n, n), dtype=int) for s in alphabet}
    for i, s in enumerate(w):
        mats[s][i, i + 1] = 1
    mats[alphabet[0]][n - 1, 0] = 1
    return mats


@pytest.fixture
def complete_graph():
    return parse_graph(COMPLETE_GRAPH)


@pytest.fixture
def gap_graph():
    return parse_graph(GAP_GRAPH)


@pytest.fixture
def example_set():
    return matrix_set_from_dict(EXAMPLE_MATRICES)


@pytest.fixture
def write_json(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
