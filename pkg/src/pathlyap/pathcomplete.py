"""Path-completeness: every finite word must be a factor of some path label."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import BudgetExceeded
from .graph import LabeledGraph, Word, check_word, expand

DEFAULT_SUBSET_BUDGET = 10**6


def default_budget() -> int:
    env = os.environ.get("PATHLYAP_BUDGET")
    return int(env) if env else DEFAULT_SUBSET_BUDGET


@dataclass(frozen=True)
class PathCompleteness:
    complete: bool
    missing_word: Optional[Word]
    explored_subsets: int
    expanded_state_count: int

    def __bool__(self):
        return self.complete


def check_path_complete(g: LabeledGraph, subset_budget: Optional[int] = None) -> PathCompleteness:
    """Decide path-completeness by determinizing the expanded graph.

    Every expanded state is both initial and accepting, so a word is readable
    exactly when the subset reached from the full state set is nonempty.  The
    BFS visits symbols in alphabet order, which makes the first empty subset
    found correspond to the shortest, lexicographically least missing word.
    """
    if subset_budget is None:
        subset_budget = default_budget()
    if subset_budget < 1:
        raise ValueError("subset_budget must be at least 1")
    ex = expand(g)
    if ex.n_states == 0:
        return PathCompleteness(False, (g.alphabet[0],), 1, 0)
    start = frozenset(range(ex.n_states))
    parent: dict[frozenset, tuple[Optional[frozenset], int]] = {start: (None, -1)}
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for sym in range(len(g.alphabet)):
            nxt = ex.step(current, sym)
            if nxt in parent:
                continue
            parent[nxt] = (current, sym)
            if not nxt:
                word = []
                node = nxt
                while parent[node][0] is not None:
                    node, s = parent[node]
                    word.append(g.alphabet[s])
                return PathCompleteness(False, tuple(reversed(word)), len(parent), ex.n_states)
            if len(parent) > subset_budget:
                raise BudgetExceeded(
                    f"more than {subset_budget} reachable subsets; path-completeness undecided",
                    required=len(parent),
                )
            queue.append(nxt)
    return PathCompleteness(True, None, len(parent), ex.n_states)


def readable_bruteforce(g: LabeledGraph, w: Sequence[str]) -> bool:
    """Reference check: is ``w`` a factor of the label of some path of ``g``?"""
    w = check_word(w, g.alphabet)
    ex = expand(g)
    sym_index = {s: k for k, s in enumerate(g.alphabet)}
    current = set(range(ex.n_states))
    for s in w:
        k = sym_index[s]
        current = {b for (a, t, b) in ex.unit_edges if t == k and a in current}
        if not current:
            return False
    return True
