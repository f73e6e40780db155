#!/usr/bin/env python3
"""Generate the flower mesh: a 16x16 sheet with a square hole, partitioned
into four spiral petals by cubic Bezier fold arcs.

The inner square has vertices (6,7), (7,10), (10,9), (9,6); each arc runs
from one inner vertex to the midpoint of an outer side, and the remaining
arcs follow by 90-degree rotation about the sheet center (8,8). Each petal
is meshed as a 17x14 transfinite patch in a rotating frame: the v-cross
section is the first arc rotated by v*90 degrees, plus boundary-sum
corrections so all four sides are matched exactly. (A fixed-frame Coons
blend folds over badly here because opposite sides of a petal are near a
quarter turn apart.) The grid is split into triangles and relaxed by
guarded averaging, with a direct max-min search around any vertex whose
star stays close to degenerate, so every element keeps strictly positive
orientation. Arc nodes are generated once and shared by the two petals on
either side, so the fold chains match between neighbors bit for bit.

Writes data/flower_1904.msh (1904 elements, 3920 nodes, 68 fold edges).
"""

import math
import os
import sys

ALPHA = math.pi / 6.0
NU = 17  # cells from the inner square (u=0) to the outer boundary (u=1)
NV = 14  # cells from one arc (v=0) to the next (v=1); L-corner at v=7/14


def r90(p):
    """Rotation by 90 degrees about (8,8): (x,y) -> (16-y, x)."""
    return (16.0 - p[1], p[0])


def lerp(a, b, t):
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def bezier(ctrl, t):
    s = 1.0 - t
    w = (s * s * s, 3.0 * s * s * t, 3.0 * s * t * t, t * t * t)
    return (
        sum(w[k] * ctrl[k][0] for k in range(4)),
        sum(w[k] * ctrl[k][1] for k in range(4)),
    )


def build_arcs():
    arc0 = [
        (10.0, 9.0),
        (
            10.0 + 3.0 * math.cos(ALPHA) - math.sin(ALPHA),
            9.0 - math.cos(ALPHA) - 3.0 * math.sin(ALPHA),
        ),
        (8.0 + 3.162 * math.cos(ALPHA), 3.162 * math.sin(ALPHA)),
        (8.0, 0.0),
    ]
    arcs = [arc0]
    for _ in range(3):
        arcs.append([r90(p) for p in arcs[-1]])
    return arcs


ARCS = build_arcs()
OUTER_CORNER = [(16.0, 0.0), (16.0, 16.0), (0.0, 16.0), (0.0, 0.0)]


def outer_l(petal, v):
    """The u=1 side: boundary-midpoint -> outer corner -> next midpoint.

    Both legs have length 8, so the corner sits at v = 1/2 exactly (a grid
    vertex, since NV is even)."""
    m0 = ARCS[petal][3]
    m1 = ARCS[(petal + 1) % 4][3]
    c = OUTER_CORNER[petal]
    if v <= 0.5:
        return lerp(m0, c, 2.0 * v)
    return lerp(c, m1, 2.0 * v - 1.0)


def rot(p, v):
    """Rotation about the sheet center (8,8) by v quarter turns."""
    a = v * 0.5 * math.pi
    c, s = math.cos(a), math.sin(a)
    dx, dy = p[0] - 8.0, p[1] - 8.0
    return (8.0 + c * dx - s * dy, 8.0 + s * dx + c * dy)


def coons(petal, u, v):
    """Rotating-frame transfinite blend for one petal.

    The carrier rot(arc(u), v) already interpolates both arcs (the v=1 arc
    IS the v=0 arc rotated a quarter turn); the two u-side corrections
    restore the inner chord and the outer L, and vanish on the arcs because
    the side curves meet them at the shared corners."""
    q0 = ARCS[petal][0]
    m0 = ARCS[petal][3]
    q1 = ARCS[(petal + 1) % 4][0]
    car = rot(bezier(ARCS[petal], u), v)
    side_in = lerp(q0, q1, v)
    side_out = outer_l(petal, v)
    rin = rot(q0, v)
    rout = rot(m0, v)
    return (
        car[0] + (1 - u) * (side_in[0] - rin[0]) + u * (side_out[0] - rout[0]),
        car[1] + (1 - u) * (side_in[1] - rin[1]) + u * (side_out[1] - rout[1]),
    )


def area2(a, b, c):
    """Twice the signed area of triangle (a, b, c)."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def main():
    nodes = []  # (x, y)

    def new_node(p):
        nodes.append(p)
        return len(nodes) - 1

    # Arc nodes first: 35 samples per arc (corners at even indices, fold-edge
    # midpoints at odd ones). Shared by both adjacent petals.
    arc_node = [[new_node(bezier(ARCS[a], i / 34.0)) for i in range(35)]
                for a in range(4)]

    # Per-petal corner grids; rows j=0 and j=NV reference the shared arc rows.
    corner = []  # corner[petal][i][j] -> node id
    frozen = set()
    for a in range(4):
        frozen.update(arc_node[a])
    for petal in range(4):
        grid = [[-1] * (NV + 1) for _ in range(NU + 1)]
        for i in range(NU + 1):
            for j in range(NV + 1):
                if j == 0:
                    grid[i][j] = arc_node[petal][2 * i]
                elif j == NV:
                    grid[i][j] = arc_node[(petal + 1) % 4][2 * i]
                else:
                    grid[i][j] = new_node(coons(petal, i / NU, j / NV))
                    if i == 0 or i == NU:
                        frozen.add(grid[i][j])  # hole side / outer boundary
        corner.append(grid)

    def corner_fan():
        """Seed a polar fan inside the reflex wedge at each inner-square
        corner. The petal angle there is about 215 degrees, so the tensor
        grid must wrap around the corner; the transfinite blend instead
        hugs it, leaving a tangle that vertex-at-a-time relaxation cannot
        undo (the trapped vertices block each other). Fanning the first few
        free rows by index angle gives the relaxation a feasible start. The
        fan core is kept frozen while the rest untangles (the tangle at the
        blend junction would otherwise wander back in and eat it) and is
        released for the polish phase."""
        core = set()
        for petal in range(4):
            g = corner[petal]
            q = nodes[g[0][0]]
            pa = nodes[g[1][0]]
            pc = nodes[g[0][1]]
            ha = math.hypot(pa[0] - q[0], pa[1] - q[1])
            hc = math.hypot(pc[0] - q[0], pc[1] - q[1])
            ta = math.atan2(pa[1] - q[1], pa[0] - q[0])
            om = (math.atan2(pc[1] - q[1], pc[0] - q[0]) - ta) % (2 * math.pi)
            for i in range(1, 5):
                for j in range(1, 5):
                    w = min(1.0, (5 - max(i, j)) / 3.0)
                    th = ta + om * (2.0 / math.pi) * math.atan2(j, i)
                    rho = 0.8 * math.hypot(i * ha, j * hc)
                    fan = (q[0] + rho * math.cos(th), q[1] + rho * math.sin(th))
                    old = nodes[g[i][j]]
                    nodes[g[i][j]] = (w * fan[0] + (1 - w) * old[0],
                                      w * fan[1] + (1 - w) * old[1])
                    if max(i, j) <= 3:
                        core.add(g[i][j])
        return core

    def triangulate():
        """Split every cell along the diagonal that maximizes the worse of
        the two triangle orientations."""
        tris = []
        for petal in range(4):
            g = corner[petal]
            for i in range(NU):
                for j in range(NV):
                    a, b = g[i][j], g[i + 1][j]
                    c, d = g[i + 1][j + 1], g[i][j + 1]
                    pa, pb, pc, pd = (nodes[k] for k in (a, b, c, d))
                    q_ac = min(area2(pa, pb, pc), area2(pa, pc, pd))
                    q_bd = min(area2(pa, pb, pd), area2(pb, pc, pd))
                    if q_ac >= q_bd:
                        tris.append((a, b, c))
                        tris.append((a, c, d))
                    else:
                        tris.append((a, b, d))
                        tris.append((b, c, d))
        return tris

    def smooth(tris, polish, pinned=frozenset()):
        """Guarded averaging. While untangling (polish=False) a vertex moves
        toward the mean of its neighbors if the worst incident orientation
        stays positive, or strictly improves while still inverted. In the
        polish phase every vertex incident to a sliver (worst area below the
        margin) accepts only strict improvements of that worst, and healthy
        vertices may not create new slivers, so the global minimum area is
        nondecreasing; a direct max-min search unsticks the sliver stars."""
        adj = {}
        star = {}
        for t, (a, b, c) in enumerate(tris):
            for u, v in ((a, b), (b, c), (c, a)):
                adj.setdefault(u, set()).add(v)
                adj.setdefault(v, set()).add(u)
            for v in (a, b, c):
                star.setdefault(v, []).append(t)

        def worst(v, pos):
            w = math.inf
            for t in star[v]:
                p = [pos if k == v else nodes[k] for k in tris[t]]
                w = min(w, area2(p[0], p[1], p[2]))
            return w

        def kick(v):
            """Direct max-min search over the star: the incident areas are
            affine in the vertex position, so the pointwise minimum is
            concave and a refined grid scan homes in on its maximizer."""
            best_q = worst(v, nodes[v])
            best_p = nodes[v]
            xs = [nodes[k][0] for k in adj[v]]
            ys = [nodes[k][1] for k in adj[v]]
            h = 0.5 * max(max(xs) - min(xs), max(ys) - min(ys))
            for _ in range(6):
                cx, cy = best_p
                for ix in range(-7, 8):
                    for iy in range(-7, 8):
                        cand = (cx + ix * h / 7.0, cy + iy * h / 7.0)
                        q = worst(v, cand)
                        if q > best_q:
                            best_q, best_p = q, cand
                h *= 0.35
            if best_q > worst(v, nodes[v]):
                nodes[v] = best_p

        margin = 0.05 * 2.0 * 246.0 / 1904.0  # 5% of the mean doubled area
        free = [v for v in sorted(adj) if v not in frozen and v not in pinned]
        for sweep in range(60 if polish else 200):
            shift = 0.0
            for v in free:
                q0 = worst(v, nodes[v])
                if polish and q0 < margin and sweep % 20 == 0:
                    kick(v)
                    q0 = worst(v, nodes[v])
                nb = adj[v]
                tx = sum(nodes[k][0] for k in nb) / len(nb)
                ty = sum(nodes[k][1] for k in nb) / len(nb)
                for w in (1.0, 0.5, 0.25):
                    cand = (nodes[v][0] + w * (tx - nodes[v][0]),
                            nodes[v][1] + w * (ty - nodes[v][1]))
                    q = worst(v, cand)
                    if polish:
                        ok = q >= margin if q0 >= margin else q > q0
                    else:
                        ok = (q > 0.0) if q0 > 0.0 else (q > q0)
                    if ok:
                        shift = max(shift, abs(cand[0] - nodes[v][0]),
                                    abs(cand[1] - nodes[v][1]))
                        nodes[v] = cand
                        break
            if shift < 1e-13:
                break

    fan_core = corner_fan()
    tris = triangulate()
    for _ in range(4):
        smooth(tris, polish=False, pinned=fan_core)
        tris = triangulate()
        worst = min(area2(*(nodes[k] for k in t)) for t in tris
                    if not set(t) <= (frozen | fan_core))
        if worst > 0.0:
            break
    for _ in range(3):
        smooth(tris, polish=True)
        tris = triangulate()
        worst = min(area2(*(nodes[k] for k in t)) for t in tris)
        if worst > 1e-4:
            break
    assert worst > 0.0, f"degenerate triangle remains (2A = {worst})"

    # Midpoint nodes: fold-chain midpoints come from the odd arc samples;
    # every other edge is straight.
    midpoint = {}
    for a in range(4):
        for i in range(NU):
            key = tuple(sorted((arc_node[a][2 * i], arc_node[a][2 * i + 2])))
            midpoint[key] = arc_node[a][2 * i + 1]

    def mid_id(u, v):
        key = (u, v) if u < v else (v, u)
        if key not in midpoint:
            p = (0.5 * (nodes[u][0] + nodes[v][0]),
                 0.5 * (nodes[u][1] + nodes[v][1]))
            midpoint[key] = new_node(p)
        return midpoint[key]

    elements = []
    for (a, b, c) in tris:
        elements.append((a, b, c, mid_id(b, c), mid_id(c, a), mid_id(a, b)))

    folds = [(arc_node[a][2 * i], arc_node[a][2 * i + 2])
             for a in range(4) for i in range(NU)]

    # Sanity: counts, map regularity, and total area.
    assert len(elements) == 1904, len(elements)
    assert len(nodes) == 3920, len(nodes)
    assert len(folds) == 68

    grads = [lambda l: (-1.0, -1.0), lambda l: (1.0, 0.0), lambda l: (0.0, 1.0)]

    def det_j(el, xi, eta):
        lam = (1.0 - xi - eta, xi, eta)
        dlam = ((-1.0, -1.0), (1.0, 0.0), (0.0, 1.0))
        j = [[0.0, 0.0], [0.0, 0.0]]
        for k in range(3):
            g = ((4.0 * lam[k] - 1.0) * dlam[k][0],
                 (4.0 * lam[k] - 1.0) * dlam[k][1])
            p = nodes[el[k]]
            for r in range(2):
                j[r][0] += p[r] * g[0]
                j[r][1] += p[r] * g[1]
        for k in range(3):
            k1, k2 = (k + 1) % 3, (k + 2) % 3
            g = (4.0 * (lam[k1] * dlam[k2][0] + lam[k2] * dlam[k1][0]),
                 4.0 * (lam[k1] * dlam[k2][1] + lam[k2] * dlam[k1][1]))
            p = nodes[el[3 + k]]
            for r in range(2):
                j[r][0] += p[r] * g[0]
                j[r][1] += p[r] * g[1]
        return j[0][0] * j[1][1] - j[0][1] * j[1][0]

    probe = [(x / 8.0, y / 8.0) for x in range(9) for y in range(9 - x)]
    for e, el in enumerate(elements):
        for (xi, eta) in probe:
            d = det_j(el, xi, eta)
            assert d > 0.0, f"element {e} has det J = {d} at ({xi},{eta})"

    # Edge-midpoint rule (exact for the quadratic det J): total area must be
    # the outer square minus the inner one, 256 - 10 = 246.
    area = 0.0
    for el in elements:
        for (xi, eta) in ((0.5, 0.0), (0.5, 0.5), (0.0, 0.5)):
            area += det_j(el, xi, eta) / 6.0
    assert abs(area - 246.0) < 1e-9 * 246.0, area

    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
        "data", "flower_1904.msh")
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as f:
        f.write(f"NODES {len(nodes)}\n")
        for i, (x, y) in enumerate(nodes):
            f.write(f"{i} {x:.17g} {y:.17g}\n")
        f.write(f"ELEMENTS {len(elements)}\n")
        for e, el in enumerate(elements):
            f.write(str(e) + " " + " ".join(str(n) for n in el) + "\n")
        f.write(f"FOLD_EDGES {len(folds)}\n")
        for a, b in folds:
            f.write(f"{a} {b}\n")
        f.write("DIRICHLET_VERTICES 0\n")
    print(f"wrote {out}: {len(nodes)} nodes, {len(elements)} elements, "
          f"{len(folds)} fold edges, area {area:.12f}")


if __name__ == "__main__":
    main()
