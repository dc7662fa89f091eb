"""Words, labeled graphs, NFAs, and the unit-label expansion.

A word is a tuple of symbol strings.  An edge ``i -> j`` with label
``u = (u1, ..., ut)`` stands for the inequality ``V_j(A_ut ... A_u1 x) < V_i(x)``:
labels are stored in chronological switching order, so reading a path left
to right follows the trajectory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DuplicateNodeError, EmptyLabelError, FormatError, UnknownSymbolError

Word = tuple[str, ...]


def mirror(word: Sequence[str]) -> Word:
    return tuple(reversed(tuple(word)))


def word_str(word: Sequence[str]) -> str:
    """Compact display form: ``"121"`` for one-character symbols, space separated otherwise."""
    word = tuple(word)
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return " ".join(word)


def _check_alphabet(alphabet) -> tuple[str, ...]:
    if not isinstance(alphabet, (list, tuple)) or not alphabet:
        raise FormatError("alphabet must be a nonempty list of symbols")
    if not all(isinstance(s, str) and s for s in alphabet):
        raise FormatError("alphabet symbols must be nonempty strings")
    if len(set(alphabet)) != len(alphabet):
        raise FormatError("alphabet contains duplicate symbols")
    return tuple(alphabet)


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    label: Word


@dataclass(frozen=True)
class LabeledGraph:
    """Directed multigraph whose edges carry nonempty words over ``alphabet``.

    Node and symbol order is the declaration order and is used for every
    deterministic tie-break downstream.
    """

    alphabet: tuple[str, ...]
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _check_alphabet(list(self.alphabet)))
        nodes = tuple(self.nodes)
        if not all(isinstance(v, str) for v in nodes):
            raise FormatError("node identifiers must be strings")
        seen = set()
        for v in nodes:
            if v in seen:
                raise DuplicateNodeError(f"duplicate node id {v!r}")
            seen.add(v)
        object.__setattr__(self, "nodes", nodes)
        edges = tuple(
            e if isinstance(e, Edge) else Edge(e[0], e[1], tuple(e[2])) for e in self.edges
        )
        symbols = set(self.alphabet)
        for e in edges:
            if e.src not in seen or e.dst not in seen:
                raise FormatError(f"edge {e.src!r}->{e.dst!r} references an undeclared node")
            if len(e.label) == 0:
                raise EmptyLabelError(f"empty label on edge {e.src!r}->{e.dst!r}")
            for s in e.label:
                if s not in symbols:
                    raise UnknownSymbolError(
                        f"unknown symbol {s!r} in label of edge {e.src!r}->{e.dst!r}"
                    )
        object.__setattr__(self, "edges", tuple(Edge(e.src, e.dst, tuple(e.label)) for e in edges))

    @property
    def unit_labels(self) -> bool:
        return all(len(e.label) == 1 for e in self.edges)

    def with_edges(self, extra: Iterable[Edge]) -> "LabeledGraph":
        return LabeledGraph(self.alphabet, self.nodes, self.edges + tuple(extra))


def check_word(word: Sequence[str], alphabet: Sequence[str]) -> Word:
    word = tuple(word)
    known = set(alphabet)
    for s in word:
        if s not in known:
            raise UnknownSymbolError(f"symbol {s!r} is not in the alphabet {list(alphabet)}")
    return word


# --------------------------------------------------------------------------
# JSON documents
# --------------------------------------------------------------------------

def _require_keys(doc, required: set, optional: set = frozenset(), what="document"):
    if not isinstance(doc, dict):
        raise FormatError(f"{what} must be a JSON object")
    unknown = set(doc) - required - set(optional)
    if unknown:
        raise FormatError(f"unknown field(s) in {what}: {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise FormatError(f"missing field(s) in {what}: {sorted(missing)}")


def graph_from_dict(doc) -> LabeledGraph:
    _require_keys(doc, {"alphabet", "nodes", "edges"}, what="graph")
    if not isinstance(doc["nodes"], list):
        raise FormatError("'nodes' must be a list")
    if not isinstance(doc["edges"], list):
        raise FormatError("'edges' must be a list")
    edges = []
    for k, e in enumerate(doc["edges"]):
        _require_keys(e, {"from", "to", "label"}, what=f"edge #{k}")
        if not isinstance(e["label"], list):
            raise FormatError(f"edge #{k}: 'label' must be a list of symbols")
        edges.append(Edge(e["from"], e["to"], tuple(e["label"])))
    return LabeledGraph(tuple(doc["alphabet"]), tuple(doc["nodes"]), tuple(edges))


def graph_to_dict(g: LabeledGraph) -> dict:
    return {
        "alphabet": list(g.alphabet),
        "nodes": list(g.nodes),
        "edges": [{"from": e.src, "to": e.dst, "label": list(e.label)} for e in g.edges],
    }


def _loads(document):
    if isinstance(document, (bytes, bytearray)):
        document = document.decode("utf-8")
    if isinstance(document, str):
        try:
            return json.loads(document)
        except json.JSONDecodeError as exc:
            raise FormatError(f"malformed JSON: {exc}") from exc
    return document


def parse_graph(document) -> LabeledGraph:
    """Parse a graph document (JSON text, bytes, or an already decoded dict)."""
    return graph_from_dict(_loads(document))


def serialize_graph(g: LabeledGraph) -> str:
    return json.dumps(graph_to_dict(g))


# --------------------------------------------------------------------------
# Expansion into unit-labeled transitions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpandedGraph:
    """Unit-labeled transition structure obtained by splitting every multi-symbol edge.

    States ``0 .. len(g.nodes)-1`` are the original nodes in order; the rest are
    auxiliary chain states.  ``origin[k]`` gives ``(edge_index, offset)`` for the
    auxiliary state ``len(g.nodes) + k``: the state sits after ``offset`` symbols
    of that edge's label.
    """

    graph: LabeledGraph
    n_states: int
    unit_edges: tuple[tuple[int, int, int], ...]  # (state, symbol index, state)
    origin: tuple[tuple[int, int], ...]
    succ: tuple[tuple[frozenset, ...], ...] = field(repr=False)  # succ[symbol][state]

    @property
    def n_aux(self) -> int:
        return len(self.origin)

    def state_name(self, k: int) -> str:
        nodes = self.graph.nodes
        if k < len(nodes):
            return nodes[k]
        e, off = self.origin[k - len(nodes)]
        return f"{self.graph.edges[e].src}~{e}.{off}"

    def step(self, states: Iterable[int], sym: int) -> frozenset:
        table = self.succ[sym]
        out = set()
        for q in states:
            out |= table[q]
        return frozenset(out)


def expand(g: LabeledGraph) -> ExpandedGraph:
    index = {v: k for k, v in enumerate(g.nodes)}
    sym_index = {s: k for k, s in enumerate(g.alphabet)}
    n_states = len(g.nodes)
    origin = []
    unit = []
    for ei, e in enumerate(g.edges):
        prev = index[e.src]
        for off, s in enumerate(e.label):
            if off == len(e.label) - 1:
                nxt = index[e.dst]
            else:
                nxt = n_states
                n_states += 1
                origin.append((ei, off + 1))
            unit.append((prev, sym_index[s], nxt))
            prev = nxt
    succ = [[set() for _ in range(n_states)] for _ in g.alphabet]
    for a, s, b in unit:
        succ[s][a].add(b)
    frozen = tuple(tuple(frozenset(x) for x in row) for row in succ)
    return ExpandedGraph(g, n_states, tuple(unit), tuple(origin), frozen)


# --------------------------------------------------------------------------
# Nondeterministic automata
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Nfa:
    """Plain NFA without epsilon moves."""

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[tuple[str, str, str], ...]  # (from, symbol, to)
    start: frozenset
    accept: frozenset

    def __post_init__(self):
        object.__setattr__(self, "alphabet", _check_alphabet(list(self.alphabet)))
        states = tuple(self.states)
        if len(set(states)) != len(states):
            raise DuplicateNodeError("duplicate NFA state")
        known = set(states)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "start", frozenset(self.start))
        object.__setattr__(self, "accept", frozenset(self.accept))
        if not self.start <= known or not self.accept <= known:
            raise FormatError("start and accept states must be declared states")
        symbols = set(self.alphabet)
        trans = tuple(tuple(t) for t in self.transitions)
        for a, s, b in trans:
            if a not in known or b not in known:
                raise FormatError(f"transition {a!r}-{s!r}->{b!r} references an undeclared state")
            if s not in symbols:
                raise UnknownSymbolError(f"unknown symbol {s!r} in transition {a!r}->{b!r}")
        object.__setattr__(self, "transitions", trans)


def nfa_from_dict(doc) -> Nfa:
    _require_keys(doc, {"alphabet", "states", "start", "accept", "transitions"}, what="NFA")
    trans = []
    for k, t in enumerate(doc["transitions"]):
        _require_keys(t, {"from", "sym", "to"}, what=f"transition #{k}")
        trans.append((t["from"], t["sym"], t["to"]))
    return Nfa(tuple(doc["states"]), tuple(doc["alphabet"]), tuple(trans),
               frozenset(doc["start"]), frozenset(doc["accept"]))


def nfa_to_dict(nfa: Nfa) -> dict:
    order = {q: k for k, q in enumerate(nfa.states)}
    return {
        "alphabet": list(nfa.alphabet),
        "states": list(nfa.states),
        "start": sorted(nfa.start, key=order.get),
        "accept": sorted(nfa.accept, key=order.get),
        "transitions": [{"from": a, "sym": s, "to": b} for a, s, b in nfa.transitions],
    }


def parse_nfa(document) -> Nfa:
    return nfa_from_dict(_loads(document))
