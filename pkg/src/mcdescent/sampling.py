"""Seeded random generators for elements, families, and groupoid data.

Every generator takes an explicit random.Random and iterates only over
deterministically ordered structures, so a fixed seed reproduces the
same objects byte for byte.
"""

from __future__ import annotations

import random

from .artin import ArtinAlgebra
from .dgla import Elem, TensorCtx
from .mcgauge import bch, bch_many, gauge, stabilizer_log
from .ratio import Q
from .semicosimplicial import (
    ScDgla,
    TotDelMorphism,
    TotDelObject,
    TotElem,
    TWElem,
    elem_times_form,
    totdel_assemble,
    totdel_mor_assemble,
    tw_ctx,
    tw_gauge,
    whitney_map,
)


def random_elem(
    ctx: TensorCtx,
    deg: int,
    rng: random.Random,
    density: float = 0.5,
    span: int = 2,
) -> Elem:
    """Random formless element of one Lie degree with coefficients in the
    maximal ideal."""
    e = ctx.zero()
    for idx in range(ctx.dgla.dim(deg)):
        for am in ctx.artin.maximal_basis:
            if rng.random() < density:
                c = rng.randint(-span, span)
                if c:
                    e = e.add(ctx.term(deg, idx, c, am))
    return e


def random_mc(ctx: TensorCtx, rng: random.Random, density: float = 0.5) -> Elem:
    """A guaranteed Maurer-Cartan element: gauge the zero solution by a
    random degree-zero logarithm."""
    return gauge(random_elem(ctx, 0, rng, density), ctx.zero())


def random_tot_elem(
    sc: ScDgla,
    artin: ArtinAlgebra,
    deg: int,
    rng: random.Random,
    density: float = 0.5,
) -> TotElem:
    comps = []
    for p in range(sc.top + 1):
        ctx = TensorCtx(sc.levels[p], artin, ())
        comps.append(random_elem(ctx, deg - p, rng, density))
    return TotElem(sc, artin, comps)


def bump_elem(
    sc: ScDgla,
    artin: ArtinAlgebra,
    level: int,
    rng: random.Random,
    deg: int = 0,
    density: float = 0.5,
) -> Elem:
    """A form-valued element at one chart level whose pullback to every
    face vanishes: a random coefficient times the product of all
    barycentric coordinates of the simplex."""
    n = level
    ctx = tw_ctx(sc, artin, n)
    e = ctx.zero()
    for idx in range(sc.levels[n].dim(deg)):
        for am in artin.maximal_basis:
            if rng.random() < density:
                c = rng.randint(-2, 2)
                if c:
                    e = e.add(ctx.term(deg, idx, c, am, pmono=(1,) * n))
    if n == 0 or e.is_zero():
        return e
    # multiply by 1 - t1 - ... - tn
    poly = {(0,) * n: Q(1)}
    for i in range(n):
        key = tuple(1 if j == i else 0 for j in range(n))
        poly[key] = Q(-1)
    acc = ctx.zero()
    for pm, c in poly.items():
        acc = acc.add(elem_times_form(e, {(pm, ()): c}))
    return acc


def random_compatible_family(
    sc: ScDgla,
    artin: ArtinAlgebra,
    deg: int,
    rng: random.Random,
    density: float = 0.5,
    with_bumps: bool = True,
) -> TWElem:
    """A random compatible family of the given total degree: the image of
    a random totalisation element under the comparison map, plus a
    face-vanishing bump at the top level. A bump below the top would
    leak into the compatibility condition one level up through its
    coface image, so only the top level admits one freely."""
    fam = whitney_map(random_tot_elem(sc, artin, deg, rng, density))
    if not with_bumps or sc.top == 0:
        return fam
    comps = list(fam.comps)
    n = sc.top
    if sc.levels[n].dim(deg):
        comps[n] = comps[n].add(bump_elem(sc, artin, n, rng, deg, density))
    return TWElem(sc, artin, comps)


def random_tw_mc(
    sc: ScDgla,
    artin: ArtinAlgebra,
    rng: random.Random,
    density: float = 0.5,
) -> TWElem:
    """A compatible family of Maurer-Cartan solutions: gauge the zero
    family by a random compatible degree-zero family."""
    lam = random_compatible_family(sc, artin, 0, rng, density)
    return tw_gauge(lam, TWElem.zero(sc, artin))


def cech_trivialized_object(
    sc: ScDgla,
    artin: ArtinAlgebra,
    rng: random.Random,
    density: float = 0.5,
    perturb: bool = True,
) -> TotDelObject:
    """A valid groupoid object over a Cech diagram built from local
    trivialisations: each open carries a gauged copy of the zero
    solution and the transition logs compare the trivialising gauges.
    With perturb the transitions are twisted by irrelevant stabilizer
    logs, which keeps the object valid but makes the witnesses
    nontrivial."""
    meta = sc.meta
    if not meta or "tuples" not in meta:
        raise ValueError("cech_trivialized_object needs a diagram built from a cover")
    tuples = meta["tuples"]
    inj = meta["inj"]
    ctx0 = TensorCtx(sc.levels[0], artin, ())
    ctx1 = TensorCtx(sc.levels[1], artin, ())
    taus = []
    for ti, T in enumerate(tuples[0]):
        sec = inj[0][ti].source
        tau = random_elem(TensorCtx(sec, artin, ()), 0, rng, density)
        taus.append(tau)
    l = ctx0.zero()
    locs = []
    for ti, T in enumerate(tuples[0]):
        sec_ctx = taus[ti].ctx
        li = gauge(taus[ti], sec_ctx.zero())
        locs.append(li)
        l = l.add(li.map_lie(inj[0][ti]))
    m = ctx1.zero()
    for ti, T in enumerate(tuples[1]):
        i0 = tuples[0].index((T[0],))
        i1 = tuples[0].index((T[1],))
        sec = inj[1][ti].source
        # move both trivialising gauges into the overlap sections
        r0 = _cover_restriction_into(sc, (T[0],), T)
        r1 = _cover_restriction_into(sc, (T[1],), T)
        ta = taus[i0].map_lie(r0)
        tb = taus[i1].map_lie(r1)
        mij = bch(ta, tb.neg())
        if perturb:
            base = locs[i1].map_lie(r1)
            u = random_elem(TensorCtx(sec, artin, ()), -1, rng, density)
            if not u.is_zero():
                w = stabilizer_log(gauge(mij, base), u)
                mij = bch(w, mij)
        m = m.add(mij.map_lie(inj[1][ti]))
    return totdel_assemble(sc, l, m)


def random_totdel_object(
    sc: ScDgla,
    artin: ArtinAlgebra,
    rng: random.Random,
    density: float = 0.5,
) -> TotDelObject:
    """A verified glued object over the diagram: trivialised local data
    when the diagram came from a cover, otherwise a gauge-exact solution
    with the trivial gluing."""
    if "inj" in sc.meta:
        return cech_trivialized_object(sc, artin, rng, density)
    ctx = TensorCtx(sc.levels[0], artin, ())
    l = gauge(random_elem(ctx, 0, rng, density), ctx.zero())
    return totdel_assemble(sc, l, TensorCtx(sc.levels[1], artin, ()).zero())


def random_totdel_morphism(
    sc: ScDgla,
    o: TotDelObject,
    rng: random.Random,
    density: float = 0.5,
) -> TotDelMorphism:
    """A random morphism out of a glued object: pick a degree-zero gauge
    log, transport the object along it, and package the comparison."""
    a = random_elem(TensorCtx(sc.levels[0], o.artin, ()), 0, rng, density)
    l1 = gauge(a, o.l)
    m1 = bch_many(
        [a.map_lie(sc.face(1, 1)), o.m, a.map_lie(sc.face(1, 0)).neg()]
    )
    target = totdel_assemble(sc, l1, m1)
    return totdel_mor_assemble(o, target, a)


def _cover_restriction_into(sc: ScDgla, S: tuple, T: tuple):
    """The restriction map of the underlying cover from the sections over
    S to the sections over T, recovered from the diagram metadata."""
    cover = sc.meta.get("cover")
    if cover is not None:
        return cover.restriction(S, T)
    # identity-style covers: sections coincide, fall back to face algebra
    from .dgla import DglaMap

    meta = sc.meta
    src = meta["inj"][len(S) - 1][meta["tuples"][len(S) - 1].index(S)].source
    tgt = meta["inj"][len(T) - 1][meta["tuples"][len(T) - 1].index(T)].source
    if src is tgt:
        return DglaMap.identity(src)
    raise ValueError("cover metadata missing and sections differ")
