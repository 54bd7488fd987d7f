"""One hand-built event structure per axiom, each breaking only that axiom."""

from somm.events import Event, EventStructure


def make(events, order=(), conflict=(), justifies=()):
    """Event structure from strict order pairs; reflexive pairs are added."""
    n = len(events)
    po = {(i, i) for i in range(n)} | set(order)
    return EventStructure(list(events), frozenset(po), frozenset(conflict), frozenset(justifies))


def plain(n):
    return [Event(i) for i in range(n)]


VIOLATORS = {
    "read-write-disjoint": make([Event(0, is_read=True, is_write=True, loc="x", value=0)]),
    "justifies-write-read": make(
        [Event(0, is_read=True, loc="x", value=0), Event(1, is_read=True, loc="x", value=0)],
        justifies=[(0, 1)],
    ),
    "conflict-symmetric": make(plain(2), conflict=[(0, 1)]),
    "conflict-irreflexive": make(plain(1), conflict=[(0, 0)]),
    "conflict-forward": make(plain(3), order=[(1, 2)], conflict=[(0, 1), (1, 0)]),
    "conflict-backward": make(plain(3), order=[(0, 1)], conflict=[(1, 2), (2, 1)]),
    "conflict-transitive": make(plain(3), conflict=[(0, 1), (1, 0), (1, 2), (2, 1)]),
}
