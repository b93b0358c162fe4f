"""Brute-force reference implementations, written for clarity over speed."""

from fractions import Fraction


def density(elements, n):
    return Fraction(sum(1 for a in elements if a <= n), n)


def witness_count(cutpoints, elements, horizon):
    members = set(elements)
    count = 0
    for a, b in zip(cutpoints, cutpoints[1:]):
        if b - 1 > horizon:
            continue
        if all(k in members for k in range(a, b)):
            count += 1
    return count


def image(mapping, elements):
    return sorted(mapping[a - 1] for a in elements)


def fin_verdict(elements, horizon, guard):
    import math
    lo = max(1, math.ceil(guard * horizon))
    tail = sum(1 for a in elements if lo <= a <= horizon)
    return "member" if tail == 0 else ("non-member" if tail >= 2 else "undecided")


def coins(entries, n):
    return [1 if j in set(entries) else 0 for j in range(1, n + 1)]


def extend_by_hand(prefix, u, v, cutpoints, m):
    """The three steps, one element at a time."""
    s = list(prefix)
    while len(s) < m:
        s.append(s[-1] + 1 if s else 1)
    d = len(s)
    k = next(i for i, c in enumerate(cutpoints, start=1) if c > d)
    nk, nk1, nk2 = cutpoints[k - 1], cutpoints[k], cutpoints[k + 1]
    while len(s) < nk - 1:
        s.append(s[-1] + 1)
    for supply, stop in ((u, nk1), (v, nk2)):
        pool = [w for w in supply if w > s[-1]]
        s.extend(pool[:stop - len(s) - 1])
    return s
