"""NFA universality reduced to path-completeness, with an exact universality oracle."""

from __future__ import annotations

from collections import deque
from typing import Optional

from .errors import BudgetExceeded, FormatError
from .graph import Edge, LabeledGraph, Nfa, Word
from .pathcomplete import default_budget

DEFAULT_FRESH = "f"


def fresh_symbol_for(nfa: Nfa, base: str = DEFAULT_FRESH) -> str:
    if base not in nfa.alphabet:
        return base
    k = 0
    while f"{base}{k}" in nfa.alphabet:
        k += 1
    return f"{base}{k}"


def reduce_universality(nfa: Nfa, fresh_symbol: Optional[str] = None) -> LabeledGraph:
    """Graph over ``alphabet + [f]`` that is path-complete iff ``nfa`` accepts every word.

    Transitions become unit-labeled edges and every accepting state gets an
    ``f`` edge to every start state.  When ``fresh_symbol`` is omitted, ``"f"``
    is used (renamed ``f0``, ``f1``, ... if taken); an explicit symbol that is
    already in the alphabet is an error.
    """
    if fresh_symbol is None:
        fresh_symbol = fresh_symbol_for(nfa)
    elif fresh_symbol in nfa.alphabet:
        raise FormatError(f"fresh symbol {fresh_symbol!r} already belongs to the NFA alphabet")
    edges = [Edge(a, b, (s,)) for a, s, b in nfa.transitions]
    for q in nfa.states:
        if q not in nfa.accept:
            continue
        for p in nfa.states:
            if p in nfa.start:
                edges.append(Edge(q, p, (fresh_symbol,)))
    return LabeledGraph(nfa.alphabet + (fresh_symbol,), nfa.states, tuple(edges))


def nfa_universal_exact(nfa: Nfa, budget: Optional[int] = None) -> tuple[bool, Optional[Word]]:
    """Subset construction from the start set.

    Returns ``(True, None)`` when every reachable subset meets the accept set,
    otherwise ``(False, w)`` with ``w`` the shortest (then lexicographically
    least) rejected word.
    """
    budget = default_budget() if budget is None else budget
    succ: dict = {}
    for a, s, b in nfa.transitions:
        succ.setdefault((a, s), set()).add(b)
    start = frozenset(nfa.start)
    parent: dict = {start: None}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        if not current & nfa.accept:
            word = []
            node = current
            while parent[node] is not None:
                node, s = parent[node]
                word.append(s)
            return False, tuple(reversed(word))
        for s in nfa.alphabet:
            nxt = frozenset(b for q in current for b in succ.get((q, s), ()))
            if nxt in parent:
                continue
            parent[nxt] = (current, s)
            if len(parent) > budget:
                raise BudgetExceeded(f"more than {budget} reachable subsets", required=len(parent))
            queue.append(nxt)
    return True, None
