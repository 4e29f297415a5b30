"""Built-in example complexes, diagrams, and covers.

Everything here is desk scale: small rational complexes, their
endomorphism dgLas, and synthetic covers whose Cech diagrams exercise
the totalisation and descent machinery. The builders are deterministic
(seeded) so frozen test values stay valid.
"""

from __future__ import annotations

import random

from .dgla import Dgla, DglaMap, abelian_dgla, end_dgla, sl2
from .linalg import ChainComplexQ, Mat
from .ratio import Q
from .semicosimplicial import CoverModel, ScDgla, cech_from_cover, constant_sc


def two_step_complex() -> ChainComplexQ:
    """0 -> Q^2 -> Q -> 0 with a rank-1 differential; cohomology is one
    dimensional, concentrated in degree 0."""
    return ChainComplexQ({0: 2, 1: 1}, {0: [[1, 0]]})


def acyclic_complex() -> ChainComplexQ:
    """0 -> Q -> Q^2 -> Q -> 0, exact everywhere."""
    return ChainComplexQ({0: 1, 1: 2, 2: 1}, {0: [[1], [0]], 1: [[0, 1]]})


def zero_dgla() -> Dgla:
    return abelian_dgla({}, label="zero")


# --- diagrams ---------------------------------------------------------------


def sc_constant_sl2(top: int = 3) -> ScDgla:
    """Constant diagram on sl2 (degree 0 only)."""
    return constant_sc(sl2(), top, label="constant sl2")


def sc_constant_end(top: int = 3) -> ScDgla:
    """Constant diagram on the endomorphism dgLa of the two-step complex."""
    g, _ = end_dgla(two_step_complex(), label="end two-step")
    return constant_sc(g, top, label="constant end")


def sc_counterexample() -> ScDgla:
    """The diagram that is zero everywhere except for a one-dimensional
    degree -1 piece at level 2; its negative cohomology obstructs
    descent."""
    z = zero_dgla()
    g2 = abelian_dgla({-1: 1}, label="line in degree -1")
    cof = {
        (1, 0): DglaMap(z, z, {}, check=False),
        (1, 1): DglaMap(z, z, {}, check=False),
        (2, 0): DglaMap(z, g2, {}, check=False),
        (2, 1): DglaMap(z, g2, {}, check=False),
        (2, 2): DglaMap(z, g2, {}, check=False),
    }
    return ScDgla([z, z, g2], cof, check=True, label="counterexample")


def sc_zero(top: int = 2) -> ScDgla:
    """The zero diagram."""
    return constant_sc(zero_dgla(), top, label="zero diagram")


def sc_weak_only() -> ScDgla:
    """Nonzero cohomology in degree -1 at level 0, where the gluing
    window places no constraint: the weak hypothesis holds, the strong
    one fails."""
    g0 = abelian_dgla({-1: 1}, label="line in degree -1")
    z = zero_dgla()
    cof = {
        (1, 0): DglaMap(g0, z, {}, check=False),
        (1, 1): DglaMap(g0, z, {}, check=False),
        (2, 0): DglaMap(z, z, {}, check=False),
        (2, 1): DglaMap(z, z, {}, check=False),
        (2, 2): DglaMap(z, z, {}, check=False),
    }
    return ScDgla([g0, z, z], cof, check=True, label="weak only")


# --- covers -----------------------------------------------------------------


def cover_identity(g: Dgla, n_opens: int) -> CoverModel:
    """Every intersection carries the same sections; restrictions are the
    identity (a trivially glued cover)."""
    ident = DglaMap.identity(g)
    sections = {}
    restrictions = {}
    for size in range(1, n_opens + 1):
        from itertools import combinations

        for T in combinations(range(n_opens), size):
            sections[T] = g
            if size > 1:
                for k in range(size):
                    restrictions[(T[:k] + T[k + 1 :], T)] = ident
    return CoverModel(n_opens, sections, restrictions)


def sc_cech_identity(g: Dgla | None = None, n_opens: int = 3) -> ScDgla:
    if g is None:
        g, _ = end_dgla(two_step_complex(), label="end two-step")
    return cech_from_cover(cover_identity(g, n_opens))


def cover_twist() -> CoverModel:
    """Two opens, one-dimensional sections on each, two-dimensional
    sections on the overlap, both restrictions hitting the same line:
    the glued line bundle has one-dimensional kernel and cokernel, so
    the Cech cohomology of the cover is (1, 1)."""
    u = abelian_dgla({0: 1}, label="sections U0")
    v = abelian_dgla({0: 1}, label="sections U1")
    uv = abelian_dgla({0: 2}, label="sections U01")
    line = Mat.from_rows([[1], [0]])
    return CoverModel(
        2,
        {(0,): u, (1,): v, (0, 1): uv},
        {
            ((0,), (0, 1)): DglaMap(u, uv, {0: line}),
            ((1,), (0, 1)): DglaMap(v, uv, {0: line}),
        },
    )


def cover_twist_redundant() -> CoverModel:
    """The twist cover with the second open duplicated; the nerve gains a
    triangle but the cohomology must not change."""
    u = abelian_dgla({0: 1}, label="sections U0")
    v = abelian_dgla({0: 1}, label="sections U1")
    w = abelian_dgla({0: 1}, label="sections U2 (copy of U1)")
    uv = abelian_dgla({0: 2}, label="sections U01")
    uw = abelian_dgla({0: 2}, label="sections U02")
    vw = abelian_dgla({0: 1}, label="sections U12")
    uvw = abelian_dgla({0: 2}, label="sections U012")
    line = Mat.from_rows([[1], [0]])
    ident2 = Mat.identity(2)
    ident1 = Mat.identity(1)
    sections = {
        (0,): u, (1,): v, (2,): w,
        (0, 1): uv, (0, 2): uw, (1, 2): vw,
        (0, 1, 2): uvw,
    }
    restrictions = {
        ((0,), (0, 1)): DglaMap(u, uv, {0: line}),
        ((1,), (0, 1)): DglaMap(v, uv, {0: line}),
        ((0,), (0, 2)): DglaMap(u, uw, {0: line}),
        ((2,), (0, 2)): DglaMap(w, uw, {0: line}),
        ((1,), (1, 2)): DglaMap(v, vw, {0: ident1}),
        ((2,), (1, 2)): DglaMap(w, vw, {0: ident1}),
        ((0, 1), (0, 1, 2)): DglaMap(uv, uvw, {0: ident2}),
        ((0, 2), (0, 1, 2)): DglaMap(uw, uvw, {0: ident2}),
        ((1, 2), (0, 1, 2)): DglaMap(vw, uvw, {0: line}),
    }
    return CoverModel(3, sections, restrictions)


def sc_twist() -> ScDgla:
    return cech_from_cover(cover_twist())


# --- conjugated covers -------------------------------------------------------


def random_chain_auto(cx: ChainComplexQ, rng: random.Random) -> dict:
    """A random invertible chain automorphism of the complex of the shape
    identity plus a differential-commuting perturbation built from a
    random degree -1 homotopy (scaled down until invertible)."""
    degs = sorted(cx.dims)
    h = {}
    for d in degs:
        rows, cols = cx.dim(d - 1), cx.dim(d)
        m = Mat(rows, cols)
        for r in range(rows):
            for c in range(cols):
                m.set_entry(r, c, Q(rng.randint(-2, 2)))
        h[d] = m
    scale = Q(1)
    for _ in range(8):
        phi = {}
        ok = True
        for d in degs:
            n = cx.dim(d)
            pert = Mat(n, n)
            if d in h and h[d].rows:
                pert = pert.add(cx.diff(d - 1) @ h[d])
            if (d + 1) in h and cx.dim(d + 1):
                pert = pert.add(h[d + 1] @ cx.diff(d))
            m = Mat.identity(n).add(pert.scale(scale))
            if m.inverse() is None:
                ok = False
                break
            phi[d] = m
        if ok:
            return phi
        scale = scale / 2
    return {d: Mat.identity(cx.dim(d)) for d in degs}


def conjugation_map(g: Dgla, eb, cx: ChainComplexQ, phi: dict) -> DglaMap:
    """The dgLa automorphism of an endomorphism dgLa given by conjugating
    with an invertible chain automorphism of the underlying complex."""
    phiinv = {d: m.inverse() for d, m in phi.items()}
    mats = {}
    for p in g.degrees():
        n = g.dim(p)
        m = Mat(n, n)
        for col in range(n):
            i, r, c = eb.unit(p, col)
            left = phi.get(i + p)
            right = phiinv.get(i)
            if left is None or right is None:
                continue
            for r2 in range(left.rows):
                lv = left.entry(r2, r)
                if not lv:
                    continue
                for c2 in range(right.cols):
                    rv = right.entry(c, c2)
                    if rv:
                        row = eb.index(i, p, r2, c2)
                        m.set_entry(row, col, m.entry(row, col) + lv * rv)
        mats[p] = m
    return DglaMap(g, g, mats, check=True)


def cover_conjugated(
    cx: ChainComplexQ | None = None, n_opens: int = 3, seed: int = 0
) -> CoverModel:
    """Every intersection carries the endomorphism dgLa of the same
    complex, but each tuple of opens is twisted by its own random chain
    automorphism; restrictions are the comparison conjugations, which
    commute on the nose."""
    from itertools import combinations

    if cx is None:
        cx = two_step_complex()
    g, eb = end_dgla(cx, label="end")
    rng = random.Random(seed)
    autos = {}
    for size in range(1, n_opens + 1):
        for T in combinations(range(n_opens), size):
            autos[T] = random_chain_auto(cx, rng)
    sections = {}
    restrictions = {}
    for size in range(1, n_opens + 1):
        for T in combinations(range(n_opens), size):
            sections[T] = g
            if size > 1:
                for k in range(size):
                    S = T[:k] + T[k + 1 :]
                    comp = {
                        d: autos[T][d] @ autos[S][d].inverse()
                        for d in autos[T]
                    }
                    restrictions[(S, T)] = conjugation_map(g, eb, cx, comp)
    return CoverModel(n_opens, sections, restrictions)


def sc_cech_conjugated(n_opens: int = 3, seed: int = 0) -> ScDgla:
    return cech_from_cover(cover_conjugated(n_opens=n_opens, seed=seed))


def strong_examples() -> list:
    """Named diagrams satisfying the vanishing-negative-cohomology
    hypothesis, used across the descent suites."""
    return [
        ("constant sl2", sc_constant_sl2(3)),
        ("identity cech over end", sc_cech_identity()),
        ("conjugated cech over end", sc_cech_conjugated(seed=5)),
    ]
