"""Generate-and-filter oracle for the admissible-triple enumerators.

Everything is built from raw constraints: vertex classes are effective,
contact orders balance divisor pairings vertex by vertex, the glued graph
is connected, the genus and leg counts add up, class-zero vertices are
stable, and the pushforwards of the two sides sum to beta. Only
``canonical_key`` is shared with the library, to compare results.
"""

from __future__ import annotations

import itertools

from flopgw.degeneration import AdmissibleGraph, AdmissibleTriple, canonical_key
from flopgw.lattice import vadd, vsub


def _weight_lists(total, max_weight):
    """Non-increasing tuples of parts in 1..max_weight summing to total."""
    if total == 0:
        yield ()
        return
    for first in range(min(total, max_weight), 0, -1):
        for rest in _weight_lists(total - first, first):
            yield (first,) + rest


def _candidate_classes(lat, push, beta, W, E, max_contact=None):
    """Effective classes whose image fits under beta, with non-negative contact.

    The degree window is doubled until the candidate set stops changing.
    """
    def collect(D):
        out = []
        for b in lat.effective_classes(D):
            c = lat.pair(E, b)
            if c < 0 or (max_contact is not None and c > max_contact):
                continue
            if W.is_effective(vsub(beta, push(b))):
                out.append(b)
        return out

    D = 4
    cur = collect(D)
    while True:
        nxt = collect(2 * D)
        if nxt == cur:
            return cur
        D, cur = 2 * D, nxt
        if D > 256:
            raise RuntimeError("candidate classes do not stabilise")


def _sides(vertices, W, beta, push, n, g, max_vertices):
    """All multisets of at most max_vertices vertices, pruned by beta, n and g."""
    out = [()]
    images = [push(v[1]) for v in vertices]
    fits = {}

    def fit(img):
        if img not in fits:
            fits[img] = W.is_effective(vsub(beta, img))
        return fits[img]

    def rec(start, chosen, img, legs, gsum):
        for i in range(start, len(vertices)):
            gv, b, ws, nv = vertices[i]
            if legs + nv > n or gsum + gv > g:
                continue
            img2 = vadd(img, images[i])
            if not fit(img2):
                continue
            new = chosen + (vertices[i],)
            out.append(new)
            if len(new) < max_vertices:
                rec(i, new, img2, legs + nv, gsum + gv)

    rec(0, (), tuple(0 for _ in beta), 0, 0)
    return out


def _vertices(classes, lat, E, n, max_genus, max_weight):
    out = []
    for b in classes:
        for ws in _weight_lists(lat.pair(E, b), max_weight):
            for gv in range(max_genus + 1):
                for nv in range(n + 1):
                    if not any(b) and 2 * gv - 2 + nv + len(ws) <= 0:
                        continue
                    out.append((gv, b, ws, nv))
    return out


def _leg_assignments(labels, counts):
    """Ways to hand out ``labels`` to vertices with the given leg counts."""
    if not counts:
        yield ()
        return
    for chosen in itertools.combinations(labels, counts[0]):
        rest = [x for x in labels if x not in chosen]
        for tail in _leg_assignments(rest, counts[1:]):
            yield (chosen,) + tail


def _connected(nv1, nv2, pairs):
    nodes = nv1 + nv2
    if nodes == 0:
        return False
    adj = {i: set() for i in range(nodes)}
    for a, b in pairs:
        adj[a].add(nv1 + b)
        adj[nv1 + b].add(a)
    seen, stack = {0}, [0]
    while stack:
        x = stack.pop()
        for y in adj[x] - seen:
            seen.add(y)
            stack.append(y)
    return len(seen) == nodes


def brute_force_triples(g, n, beta, geom, max_vertices, max_genus, max_weight):
    W, Y1, Y2, E = geom.W, geom.Y1, geom.Y2, geom.divisor
    beta = W._coords(beta)
    if not W.is_effective(beta):
        return set()
    p1, p2 = geom.p1.apply_coords, geom.p2.apply_coords
    c1 = _candidate_classes(Y1, p1, beta, W, E)
    top = max([Y1.pair(E, b) for b in c1] + [0])
    c2 = _candidate_classes(Y2, p2, beta, W, E, max_contact=top)
    v1 = _vertices(c1, Y1, E, n, max_genus, max_weight)
    v2 = _vertices(c2, Y2, E, n, max_genus, max_weight)
    s1 = _sides(v1, W, beta, p1, n, g, max_vertices)
    s2 = _sides(v2, W, beta, p2, n, g, max_vertices)

    pushed = {}

    def summary(side, push):
        img = tuple(0 for _ in beta)
        for _, b, _, _ in side:
            key = (push, b)
            if key not in pushed:
                pushed[key] = push(b)
            img = vadd(img, pushed[key])
        ws = tuple(sorted(w for v in side for w in v[2]))
        return img, ws, sum(v[3] for v in side), sum(v[0] for v in side)

    by_key = {}
    for side in s2:
        img, ws, legs, gs = summary(side, p2)
        by_key.setdefault((vsub(beta, img), ws), []).append((side, legs, gs))

    found = {}
    for side1 in s1:
        img, ws, legs1, gs1 = summary(side1, p1)
        for side2, legs2, gs2 in by_key.get((img, ws), []):
            if legs1 + legs2 != n or not (side1 or side2):
                continue
            r = len(ws)
            if r + 1 - len(side1) - len(side2) + gs1 + gs2 != g:
                continue
            for eta in _glue(side1, side2, n, Y1, Y2):
                found.setdefault(canonical_key(eta), eta)
    return set(found)


def _glue(side1, side2, n, Y1, Y2):
    roots1 = [(v, w) for v, vert in enumerate(side1) for w in vert[2]]
    roots2 = [(v, w) for v, vert in enumerate(side2) for w in vert[2]]
    counts1 = [vert[3] for vert in side1]
    counts2 = [vert[3] for vert in side2]
    n1 = sum(counts1)
    seen = set()
    for perm in itertools.permutations(range(len(roots2))):
        r2 = [roots2[i] for i in perm]
        if any(a[1] != b[1] for a, b in zip(roots1, r2)):
            continue
        if not _connected(len(side1), len(side2), [(a[0], b[0]) for a, b in zip(roots1, r2)]):
            continue
        for I in itertools.combinations(range(1, n + 1), n1):
            rest = [x for x in range(1, n + 1) if x not in I]
            for a1 in _leg_assignments(list(I), counts1):
                for a2 in _leg_assignments(rest, counts2):
                    legs1 = sorted((lab, v) for v, labs in enumerate(a1) for lab in labs)
                    legs2 = sorted((lab, v) for v, labs in enumerate(a2) for lab in labs)
                    key = (tuple(r2), tuple(legs1), tuple(legs2))
                    if key in seen:
                        continue
                    seen.add(key)
                    g1 = AdmissibleGraph(Y1, tuple((v[0], v[1]) for v in side1),
                                         tuple(v for _, v in legs1), tuple(roots1))
                    g2 = AdmissibleGraph(Y2, tuple((v[0], v[1]) for v in side2),
                                         tuple(v for _, v in legs2), tuple(r2))
                    yield AdmissibleTriple(g1, g2, tuple(I))
