"""Semicosimplicial dgLas, their totalisations, and descent data.

A semicosimplicial dgLa is a diagram of dgLas g_0, g_1, ..., g_N with
coface maps into every level satisfying the coface identities. This
module provides:

- ScDgla: the diagram type with validation, truncation, and face maps
  indexed by arbitrary monotone injections;
- the total complex of the diagram (exact rational cohomology);
- CoverModel and the Cech diagram of a finite cover;
- form-valued element families over the diagram, one simplex chart per
  level, with the compatibility condition cutting out the Thom-Whitney
  totalisation, plus the integration / Whitney comparison maps onto the
  total complex;
- Maurer-Cartan data of the two-step truncated totalisation in the
  canonical decomposed shape (base element, edge polynomial, triangle
  polynomial) with its four face conditions;
- the groupoid of descent data: objects (l, m, u) and morphisms (a, b)
  glued from the levelwise Deligne groupoids.

Chart conventions, fixed here and used everywhere: the level-n chart has
polynomial variables t_1..t_n (the barycentric coordinate of vertex 0 is
1 - sum and is implicit). The k-th face of an element family is the
pullback along the coface missing vertex n-k, so the chart vertex at the
origin pairs with the injection hitting the top vertex. Under this
pairing a compatible family restricts along chart faces exactly as the
diagram's coface maps act, with face k of the level-n component equal to
the k-th coface image of the level-(n-1) component.
"""

from __future__ import annotations

import math
from itertools import combinations

from .artin import ArtinAlgebra
from .dgla import Dgla, DglaError, DglaMap, Elem, TensorCtx, direct_sum
from .forms import (
    coface_images,
    f_const,
    f_sub,
    f_var,
    fkey_mul,
    whitney_form,
)
from .linalg import ChainComplexQ, ChainMapQ, Mat
from .mcgauge import (
    GaugeError,
    bch_many,
    embed,
    extract_irrelevant,
    gauge,
    is_mc,
    morphism_equal,
    stabilizer_log,
)
from .ratio import Q, neg_one_pow, rat


class ScError(ValueError):
    """Raised on malformed semicosimplicial data."""


def level_vars(p: int) -> tuple:
    """Chart variable names for the level-p simplex."""
    return tuple(f"t{i}" for i in range(1, p + 1))


class ScDgla:
    """A semicosimplicial dgLa: levels g_0..g_N and coface maps.

    cofaces is keyed by (i, k) with 0 <= k <= i <= N and holds the k-th
    coface map g_{i-1} -> g_i. The coface identities
    face(i+1, k+1) o face(i, j) = face(i+1, j) o face(i, k) for k >= j
    are verified on construction unless check=False.
    """

    __slots__ = ("levels", "cofaces", "label", "meta")

    def __init__(self, levels, cofaces, check: bool = True, label: str = ""):
        self.levels = list(levels)
        self.cofaces = dict(cofaces)
        self.label = label
        self.meta: dict = {}
        if not self.levels:
            raise ScError("at least one level is required")
        if check:
            bad = self.violations()
            if bad:
                raise ScError("; ".join(bad))

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def face(self, i: int, k: int) -> DglaMap:
        """The k-th coface map into level i (from level i-1)."""
        if not (1 <= i <= self.top and 0 <= k <= i):
            raise ScError(f"no face ({k},{i}) in a diagram with top {self.top}")
        return self.cofaces[(i, k)]

    def violations(self) -> list:
        out = []
        for key in self.cofaces:
            i, k = key
            if not (1 <= i <= self.top and 0 <= k <= i):
                out.append(f"stray face map keyed {key}")
        for i in range(1, self.top + 1):
            for k in range(i + 1):
                m = self.cofaces.get((i, k))
                if m is None:
                    out.append(f"missing face ({k},{i})")
                    continue
                if m.source is not self.levels[i - 1]:
                    out.append(f"face ({k},{i}) has the wrong source")
                    continue
                if m.target is not self.levels[i]:
                    out.append(f"face ({k},{i}) has the wrong target")
                    continue
                try:
                    m.validate()
                except DglaError as e:
                    out.append(f"face ({k},{i}): {e}")
        if out:
            return out
        for i in range(1, self.top):
            for j in range(i + 1):
                for k in range(j, i + 1):
                    lhs = self.face(i + 1, k + 1).compose(self.face(i, j))
                    rhs = self.face(i + 1, j).compose(self.face(i, k))
                    if not lhs.eq(rhs):
                        out.append(
                            f"coface identity fails: ({k + 1},{i + 1})o({j},{i})"
                            f" != ({j},{i + 1})o({k},{i})"
                        )
        return out

    def truncate(self, i: int) -> "ScDgla":
        """Discard all levels above i (the diagram they span is zero)."""
        if not (0 <= i <= self.top):
            raise ScError("truncation level out of range")
        cof = {key: m for key, m in self.cofaces.items() if key[0] <= i}
        out = ScDgla(
            self.levels[: i + 1], cof, check=False,
            label=f"{self.label}|<={i}" if self.label else "",
        )
        for key, val in self.meta.items():
            if isinstance(val, dict) and all(isinstance(k, int) for k in val):
                out.meta[key] = {p: v for p, v in val.items() if p <= i}
            else:
                out.meta[key] = val
        return out

    def __repr__(self):
        dims = [g.total_dim for g in self.levels]
        return f"ScDgla(levels={dims}{' ' + self.label if self.label else ''})"


def sc_same(a: ScDgla, b: ScDgla) -> bool:
    """Whether two diagram handles present the same diagram (same level
    dgLa objects and equal coface maps); truncations of a common parent
    compare equal under this."""
    if a is b:
        return True
    if len(a.levels) != len(b.levels):
        return False
    if any(x is not y for x, y in zip(a.levels, b.levels)):
        return False
    if a.cofaces.keys() != b.cofaces.keys():
        return False
    return all(
        m is b.cofaces[k] or m.eq(b.cofaces[k]) for k, m in a.cofaces.items()
    )


def validate_sc(g: ScDgla) -> dict:
    """Full validation report: dgLa axioms per level plus coface identities."""
    violations = []
    for i, lv in enumerate(g.levels):
        try:
            lv.validate(mode="auto")
        except DglaError as e:
            violations.append(f"level {i}: {e}")
    violations.extend(g.violations())
    return {"ok": not violations, "violations": violations}


def face_map_of_injection(sc: ScDgla, image, n_tgt: int) -> DglaMap:
    """The diagram map attached to the monotone injection with the given
    vertex image inside 0..n_tgt, as a composition of coface maps (the
    outermost factor always misses the largest absent vertex)."""
    image = tuple(image)
    n_src = len(image) - 1
    if n_src < 0 or n_tgt > sc.top:
        raise ScError("injection out of range")
    if any(not 0 <= v <= n_tgt for v in image) or any(
        a >= b for a, b in zip(image, image[1:])
    ):
        raise ScError("vertex image must be strictly increasing in range")
    if n_src == n_tgt:
        return DglaMap.identity(sc.levels[n_src])
    missing = sorted(set(range(n_tgt + 1)) - set(image))
    j = missing[-1]
    inner_image = tuple(v if v < j else v - 1 for v in image)
    inner = face_map_of_injection(sc, inner_image, n_tgt - 1)
    return sc.face(n_tgt, j).compose(inner)


def constant_sc(g: Dgla, top: int, label: str = "") -> ScDgla:
    """The constant diagram on g with every coface the identity."""
    ident = DglaMap.identity(g)
    cof = {(i, k): ident for i in range(1, top + 1) for k in range(i + 1)}
    return ScDgla([g] * (top + 1), cof, check=False, label=label or "constant")


# --- total complex ----------------------------------------------------------


class TotBasis:
    """Flat bases of the total complex: one slot per (level, lie index)
    pair at each total degree n, with level-p slots drawn from the
    internal degree n - p."""

    def __init__(self, sc: ScDgla):
        self.sc = sc
        degs = set()
        for p, g in enumerate(sc.levels):
            for q in g.degrees():
                degs.add(p + q)
        self.slots = {}
        for n in sorted(degs):
            lst = []
            for p, g in enumerate(sc.levels):
                for idx in range(g.dim(n - p)):
                    lst.append((p, idx))
            if lst:
                self.slots[n] = lst
        self.pos = {
            n: {pi: i for i, pi in enumerate(lst)}
            for n, lst in self.slots.items()
        }

    def dim(self, n: int) -> int:
        return len(self.slots.get(n, []))

    def index(self, n: int, p: int, idx: int) -> int:
        return self.pos[n][(p, idx)]


def total_complex(sc: ScDgla) -> tuple:
    """The total complex of the diagram: degree n is the direct sum of the
    internal degree n - p parts over levels p, and the differential on a
    level-p slice is the alternating coface sum plus (-1)^p times the
    internal differential. Returns (complex, basis bookkeeping)."""
    tb = TotBasis(sc)
    dims = {n: len(slots) for n, slots in tb.slots.items()}
    diffs = {}
    for n, slots in tb.slots.items():
        tgt = tb.dim(n + 1)
        if not tgt:
            continue
        m = Mat(tgt, len(slots))
        for col, (p, idx) in enumerate(slots):
            q = n - p
            if p + 1 <= sc.top:
                for k in range(p + 2):
                    fm = sc.face(p + 1, k).mat(q)
                    sgn = neg_one_pow(k)
                    for r in range(fm.rows):
                        v = fm.entry(r, idx)
                        if v:
                            rr = tb.index(n + 1, p + 1, r)
                            m.set_entry(rr, col, m.entry(rr, col) + sgn * v)
            dm = sc.levels[p].diff(q)
            sgn = neg_one_pow(p)
            for r in range(dm.rows):
                v = dm.entry(r, idx)
                if v:
                    rr = tb.index(n + 1, p, r)
                    m.set_entry(rr, col, m.entry(rr, col) + sgn * v)
        if not m.is_zero():
            diffs[n] = m
    return ChainComplexQ(dims, diffs), tb


def total_truncation_map(sc: ScDgla, i: int) -> ChainMapQ:
    """The projection of the total complex onto the total complex of the
    truncation at level i; levels above i are dropped. A chain map."""
    sct = sc.truncate(i)
    full, tbf = total_complex(sc)
    trunc, tbt = total_complex(sct)
    mats = {}
    for n, slots in tbf.slots.items():
        if not tbt.dim(n):
            continue
        m = Mat(tbt.dim(n), len(slots))
        for col, (p, idx) in enumerate(slots):
            if p <= i:
                m.set_entry(tbt.index(n, p, idx), col, 1)
        mats[n] = m
    return ChainMapQ(full, trunc, mats)


# --- Cech diagrams of covers -------------------------------------------------


class CoverModel:
    """A finite cover presented by dgLas of sections: one dgLa per
    ascending tuple of opens (the sections on that intersection) and a
    restriction map for every one-step inclusion of tuples.

    sections is keyed by ascending tuples of open indices; restrictions
    by (src_tuple, tgt_tuple) with src obtained from tgt by removing one
    entry. Longer restrictions are composed one entry at a time and the
    compatibility of the two-step squares is validated.
    """

    __slots__ = ("n_opens", "sections", "restrictions")

    def __init__(self, n_opens: int, sections, restrictions, check=True):
        self.n_opens = n_opens
        self.sections = dict(sections)
        self.restrictions = dict(restrictions)
        if check:
            bad = self.violations()
            if bad:
                raise ScError("; ".join(bad))

    def tuples(self, p: int) -> list:
        """All ascending (p+1)-tuples of opens."""
        return list(combinations(range(self.n_opens), p + 1))

    def violations(self) -> list:
        out = []
        for T, g in self.sections.items():
            if tuple(sorted(set(T))) != T:
                out.append(f"section key {T} is not an ascending tuple")
            if not isinstance(g, Dgla):
                out.append(f"section {T} is not a dgLa")
        for (src, tgt), m in self.restrictions.items():
            if len(src) + 1 != len(tgt) or not set(src) < set(tgt):
                out.append(f"restriction {src}->{tgt} is not one-step")
                continue
            if m.source is not self.sections.get(src):
                out.append(f"restriction {src}->{tgt} has the wrong source")
            if m.target is not self.sections.get(tgt):
                out.append(f"restriction {src}->{tgt} has the wrong target")
        if out:
            return out
        for p in range(2, self.n_opens):
            for T in self.tuples(p):
                if T not in self.sections:
                    continue
                for a, b in combinations(range(len(T)), 2):
                    Ta = T[:a] + T[a + 1 :]
                    Tb = T[:b] + T[b + 1 :]
                    Tab = tuple(v for i, v in enumerate(T) if i not in (a, b))
                    try:
                        via_a = self.one_step(Ta, T).compose(
                            self.one_step(Tab, Ta)
                        )
                        via_b = self.one_step(Tb, T).compose(
                            self.one_step(Tab, Tb)
                        )
                    except KeyError as e:
                        out.append(f"missing restriction: {e}")
                        continue
                    if not via_a.eq(via_b):
                        out.append(
                            f"restrictions into {T} do not commute"
                        )
        return out

    def one_step(self, src: tuple, tgt: tuple) -> DglaMap:
        m = self.restrictions.get((src, tgt))
        if m is None:
            raise KeyError(f"restriction {src} -> {tgt}")
        return m

    def restriction(self, src: tuple, tgt: tuple) -> DglaMap:
        """Restriction along any inclusion of tuples, composed one removed
        entry at a time (largest removed position first); two-step
        compatibility makes the result path independent."""
        src, tgt = tuple(src), tuple(tgt)
        if src == tgt:
            return DglaMap.identity(self.sections[src])
        extra = [v for v in tgt if v not in src]
        drop = extra[-1]
        mid = tuple(v for v in tgt if v != drop)
        return self.one_step(mid, tgt).compose(self.restriction(src, mid))


def cech_from_cover(cover: CoverModel, depth: int | None = None) -> ScDgla:
    """The Cech diagram of a cover: level p is the direct sum of sections
    over ascending (p+1)-tuples, and the k-th coface into level p sends
    the component at a tuple with its k-th entry removed into the
    component at that tuple by restriction."""
    top = cover.n_opens - 1
    if depth is not None:
        top = min(top, depth)
    levels = []
    inj = {}
    proj = {}
    tuples = {}
    for p in range(top + 1):
        tp = cover.tuples(p)
        tuples[p] = tp
        parts = [cover.sections[T] for T in tp]
        total, injs, projs = direct_sum(parts)
        total.label = f"cech level {p}"
        levels.append(total)
        inj[p] = injs
        proj[p] = projs
    cof = {}
    for p in range(1, top + 1):
        degs = set(levels[p - 1].dims) | set(levels[p].dims)
        for k in range(p + 1):
            mats = {}
            for d in degs:
                rows = levels[p].dim(d)
                cols = levels[p - 1].dim(d)
                m = Mat(rows, cols)
                for ti, T in enumerate(tuples[p]):
                    S = T[:k] + T[k + 1 :]
                    si = tuples[p - 1].index(S)
                    block = (
                        inj[p][ti].mat(d)
                        @ cover.restriction(S, T).mat(d)
                        @ proj[p - 1][si].mat(d)
                    )
                    m = m.add(block)
                if not m.is_zero():
                    mats[d] = m
            cof[(p, k)] = DglaMap(levels[p - 1], levels[p], mats, check=False)
    sc = ScDgla(levels, cof, check=True, label="cech")
    sc.meta = {"tuples": tuples, "inj": inj, "proj": proj, "cover": cover}
    return sc


# --- element families over the diagram ---------------------------------------


def tw_ctx(sc: ScDgla, artin: ArtinAlgebra, p: int) -> TensorCtx:
    """The tensor context of the level-p component: level-p dgLa, Artin
    coefficients, level-p chart."""
    return TensorCtx(sc.levels[p], artin, level_vars(p))


class TWElem:
    """A family with one form-valued component per diagram level; the
    level-p component lives in the level-p simplex chart. Compatible
    families (face pullbacks matching coface images) form the
    Thom-Whitney totalisation; all operations act componentwise."""

    __slots__ = ("sc", "artin", "comps")

    def __init__(self, sc: ScDgla, artin: ArtinAlgebra, comps):
        comps = list(comps)
        if len(comps) != sc.top + 1:
            raise ScError("one component per level is required")
        for p, c in enumerate(comps):
            if c.ctx.dgla is not sc.levels[p]:
                raise ScError(f"component {p} is over the wrong dgLa")
            if c.ctx.artin is not artin:
                raise ScError(f"component {p} has the wrong coefficients")
            if c.ctx.form_vars != level_vars(p):
                raise ScError(f"component {p} is in the wrong chart")
        self.sc = sc
        self.artin = artin
        self.comps = comps

    @classmethod
    def zero(cls, sc: ScDgla, artin: ArtinAlgebra) -> "TWElem":
        return cls(sc, artin, [tw_ctx(sc, artin, p).zero() for p in range(sc.top + 1)])

    def _chk(self, other: "TWElem"):
        if self.artin is not other.artin or not sc_same(self.sc, other.sc):
            raise ScError("families over different diagrams")

    def add(self, other):
        self._chk(other)
        return TWElem(
            self.sc, self.artin,
            [a.add(b) for a, b in zip(self.comps, other.comps)],
        )

    def sub(self, other):
        self._chk(other)
        return TWElem(
            self.sc, self.artin,
            [a.sub(b) for a, b in zip(self.comps, other.comps)],
        )

    def scale(self, c):
        return TWElem(self.sc, self.artin, [a.scale(c) for a in self.comps])

    def neg(self):
        return self.scale(-1)

    def eq(self, other) -> bool:
        self._chk(other)
        return all(a.eq(b) for a, b in zip(self.comps, other.comps))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def d(self) -> "TWElem":
        return TWElem(self.sc, self.artin, [c.d() for c in self.comps])

    def bracket(self, other) -> "TWElem":
        self._chk(other)
        return TWElem(
            self.sc, self.artin,
            [a.bracket(b) for a, b in zip(self.comps, other.comps)],
        )

    def truncate(self, i: int) -> "TWElem":
        return TWElem(self.sc.truncate(i), self.artin, self.comps[: i + 1])

    def face_violations(self) -> list:
        """Pairs (n, k) where the k-th chart face of the level-n component
        differs from the k-th coface image of the level-(n-1) component."""
        out = []
        for n in range(1, self.sc.top + 1):
            prev = level_vars(n - 1)
            for k in range(n + 1):
                lhs = self.comps[n].form_subst(coface_images(n - k, n), prev)
                rhs = self.comps[n - 1].map_lie(self.sc.face(n, k))
                if not lhs.eq(rhs):
                    out.append((n, k))
        return out

    def is_compatible(self) -> bool:
        return not self.face_violations()


def tw_gauge(lam: TWElem, x: TWElem) -> TWElem:
    """Componentwise gauge action; compatible data stay compatible."""
    lam._chk(x)
    return TWElem(
        x.sc, x.artin,
        [gauge(a, b) for a, b in zip(lam.comps, x.comps)],
    )


def tw_is_mc(x: TWElem) -> bool:
    """Componentwise Maurer-Cartan check (with the full differential)."""
    return all(is_mc(c) for c in x.comps)


class TotElem:
    """An element of the total complex with Artin coefficients: one plain
    component per level (no form variables), the level-p part sitting in
    internal degree (total degree - p) when homogeneous."""

    __slots__ = ("sc", "artin", "comps")

    def __init__(self, sc: ScDgla, artin: ArtinAlgebra, comps):
        comps = list(comps)
        if len(comps) != sc.top + 1:
            raise ScError("one component per level is required")
        for p, c in enumerate(comps):
            if c.ctx.dgla is not sc.levels[p]:
                raise ScError(f"component {p} is over the wrong dgLa")
            if c.ctx.artin is not artin:
                raise ScError(f"component {p} has the wrong coefficients")
            if c.ctx.nforms:
                raise ScError(f"component {p} carries form variables")
        self.sc = sc
        self.artin = artin
        self.comps = comps

    @classmethod
    def zero(cls, sc: ScDgla, artin: ArtinAlgebra) -> "TotElem":
        return cls(
            sc, artin,
            [TensorCtx(g, artin, ()).zero() for g in sc.levels],
        )

    def _chk(self, other):
        if self.artin is not other.artin or not sc_same(self.sc, other.sc):
            raise ScError("elements over different diagrams")

    def add(self, other):
        self._chk(other)
        return TotElem(
            self.sc, self.artin,
            [a.add(b) for a, b in zip(self.comps, other.comps)],
        )

    def sub(self, other):
        self._chk(other)
        return TotElem(
            self.sc, self.artin,
            [a.sub(b) for a, b in zip(self.comps, other.comps)],
        )

    def scale(self, c):
        return TotElem(self.sc, self.artin, [a.scale(c) for a in self.comps])

    def eq(self, other) -> bool:
        self._chk(other)
        return all(a.eq(b) for a, b in zip(self.comps, other.comps))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def d(self) -> "TotElem":
        """Total differential: the level-p output is the alternating coface
        sum of the level-(p-1) input plus (-1)^p times the internal
        differential of the level-p input."""
        out = []
        for p in range(self.sc.top + 1):
            acc = self.comps[p].d().scale(neg_one_pow(p))
            if p >= 1:
                for k in range(p + 1):
                    acc = acc.add(
                        self.comps[p - 1]
                        .map_lie(self.sc.face(p, k))
                        .scale(neg_one_pow(k))
                    )
            out.append(acc)
        return TotElem(self.sc, self.artin, out)


def elem_times_form(e: Elem, form: dict) -> Elem:
    """Right-multiply an element by a scalar polynomial form in the same
    chart (wedge on the form slot, Lie and coefficient slots untouched)."""
    out: dict = {}
    for (deg, idx, am, pm, dm), c in e.terms.items():
        for (fp, fS), fc in form.items():
            r = fkey_mul(pm, dm, fp, fS)
            if r is None:
                continue
            np_, nS, sgn = r
            key = (deg, idx, am, np_, nS)
            v = out.get(key, Q(0)) + c * fc * sgn
            if v == 0:
                out.pop(key, None)
            else:
                out[key] = v
    return Elem(e.ctx, out)


def _sign_slot(p: int, q: int) -> int:
    """The comparison-map sign for a level-p slot of total degree q."""
    return neg_one_pow(p * q + p * (p - 1) // 2)


def integration_map(w: TWElem) -> TotElem:
    """Integrate the top form-degree part of each component over its chart
    simplex (exact Dirichlet integrals), with the standard sign per slot.
    A chain map from families onto the total complex."""
    out = []
    for p in range(w.sc.top + 1):
        ctx0 = TensorCtx(w.sc.levels[p], w.artin, ())
        acc = ctx0.zero()
        full = tuple(range(p))
        for (deg, idx, am, pm, dm), c in w.comps[p].terms.items():
            if dm != full:
                continue
            num = 1
            for e in pm:
                num *= math.factorial(e)
            val = c * Q(num) / Q(math.factorial(p + sum(pm)))
            val *= _sign_slot(p, deg + p)
            acc = acc.add(ctx0.term(deg, idx, val, am, (), ()))
        out.append(acc)
    return TotElem(w.sc, w.artin, out)


def whitney_map(c: TotElem) -> TWElem:
    """Extend a total-complex element to a compatible family using the
    elementary simplex forms: the level-n component collects, over every
    vertex subset S, the image of the level-(|S|-1) input along the
    injection with the reversed vertex set, wedged with the form of S.
    A chain map splitting the integration map."""
    sc, artin = c.sc, c.artin
    comps = []
    for n in range(sc.top + 1):
        ctxn = tw_ctx(sc, artin, n)
        acc = ctxn.zero()
        for p in range(n + 1):
            cp = c.comps[p]
            if cp.is_zero():
                continue
            for S in combinations(range(n + 1), p + 1):
                rev = tuple(sorted(n - s for s in S))
                moved = cp.map_lie(face_map_of_injection(sc, rev, n))
                if moved.is_zero():
                    continue
                form = whitney_form(S, n)
                lifted = embed(moved, level_vars(n), positions=[])
                for m in sorted(moved.total_degrees()):
                    part = lifted.component_total(m)
                    acc = acc.add(
                        elem_times_form(part, form).scale(_sign_slot(p, p + m))
                    )
        comps.append(acc)
    return TWElem(sc, artin, comps)


# --- Maurer-Cartan data of the two-step truncation ---------------------------


class TwTruncMC:
    """A Maurer-Cartan element of the totalisation of the two-step
    truncation, in the canonical decomposed shape:

    - x: Maurer-Cartan element at level 0 (no chart variables);
    - p: level-1 degree-0 polynomial in one variable t, divisible by t
      and with no dt part (the level-1 component is the gauge of the
      0-th coface image of x by p);
    - r: level-2 polynomial in variables (t, s): a degree-0 part with no
      constant term plus a degree -1 part divisible by t and carrying ds
      (the level-2 component is the gauge of the common corner by r).

    The four face conditions tie the data together; see tw_mc_verify.
    """

    __slots__ = ("sc", "artin", "x", "p", "r")

    def __init__(self, sc: ScDgla, artin: ArtinAlgebra, x: Elem, p: Elem, r: Elem):
        self.sc = sc
        self.artin = artin
        self.x = x
        self.p = p
        self.r = r


def _mvalued(e: Elem) -> bool:
    A = e.ctx.artin
    return all(A.level(k[2]) >= 1 for k in e.terms)


def tw_mc_shape_violations(e: TwTruncMC) -> list:
    out = []
    sc = e.sc
    if sc.top < 2:
        out.append("the diagram must have levels 0..2")
        return out
    if e.x.ctx.dgla is not sc.levels[0] or e.x.ctx.nforms != 0:
        out.append("base element must be a plain level-0 element")
    if e.p.ctx.dgla is not sc.levels[1] or e.p.ctx.form_vars != ("t",):
        out.append("edge polynomial must be a level-1 element in one variable t")
    if e.r.ctx.dgla is not sc.levels[2] or e.r.ctx.form_vars != ("t", "s"):
        out.append("triangle polynomial must be a level-2 element in (t, s)")
    if out:
        return out
    for el, what in ((e.x, "base"), (e.p, "edge"), (e.r, "triangle")):
        if el.ctx.artin is not e.artin:
            out.append(f"{what} element has the wrong coefficients")
        elif not _mvalued(el):
            out.append(f"{what} element must take maximal-ideal coefficients")
    if not all(k[0] == 1 for k in e.x.terms):
        out.append("base element must be homogeneous of degree 1")
    elif not is_mc(e.x):
        out.append("base element is not Maurer-Cartan")
    for (deg, _idx, _am, pm, dm), _c in e.p.terms.items():
        if deg != 0 or dm != () or pm[0] < 1:
            out.append("edge polynomial must be degree 0, divisible by t, no dt")
            break
    for (deg, _idx, _am, pm, dm), _c in e.r.terms.items():
        good0 = deg == 0 and dm == () and pm != (0, 0)
        good1 = deg == -1 and dm == (1,) and pm[0] >= 1
        if not (good0 or good1):
            out.append(
                "triangle polynomial must be a degree-0 part without constant"
                " term plus a degree -1 part divisible by t carrying ds"
            )
            break
    return out


def tw_mc_conditions(e: TwTruncMC) -> list:
    """The four face conditions, each evaluated exactly:

    1. the 1st coface image of x is the gauge of the 0th by p(1);
    2. the 0th coface image of p matches r on the edge t = 0 (with the
       remaining variable renamed);
    3. the 1st coface image of p matches r on the edge s = 0;
    4. along the diagonal edge, the loop composed of the 2nd coface image
       of p, r restricted to (t, 1-t), and the corner value r(0,1) fixes
       the common corner for every t.
    """
    sc = e.sc
    f = sc.face
    x0 = e.x.map_lie(f(1, 0))
    x1 = e.x.map_lie(f(1, 1))
    c1 = gauge(e.p.subs_values({0: 1}), x0).eq(x1)

    lhs2 = e.p.map_lie(f(2, 0))
    rhs2 = e.r.subs_values({0: 0}).form_subst([f_var(0, 1)], ("t",))
    c2 = lhs2.eq(rhs2)

    lhs3 = e.p.map_lie(f(2, 1))
    rhs3 = e.r.subs_values({1: 0})
    c3 = lhs3.eq(rhs3)

    p22 = e.p.map_lie(f(2, 2))
    rdiag = e.r.form_subst(
        [f_var(0, 1), f_sub(f_const(1, 1), f_var(0, 1))], ("t",)
    )
    r01 = embed(e.r.subs_values({0: 0, 1: 1}), ("t",), positions=[])
    corner = embed(x0.map_lie(f(2, 2)), ("t",), positions=[])
    loop = bch_many([p22.neg(), rdiag, r01.neg()])
    c4 = gauge(loop, corner).eq(corner)
    return [c1, c2, c3, c4]


def tw_mc_verify(e: TwTruncMC) -> dict:
    """Report on the canonical shape and the four face conditions."""
    shape = tw_mc_shape_violations(e)
    if shape:
        return {"ok": False, "shape": shape, "conditions": []}
    conds = tw_mc_conditions(e)
    return {"ok": all(conds), "shape": [], "conditions": conds}


def tw_mc_assemble(sc: ScDgla, x: Elem, p: Elem, r: Elem) -> TwTruncMC:
    """Bundle (x, p, r) after verifying shape and face conditions."""
    e = TwTruncMC(sc, x.ctx.artin, x, p, r)
    rep = tw_mc_verify(e)
    if not rep["ok"]:
        bad = rep["shape"] or [
            f"face condition {i + 1} fails"
            for i, c in enumerate(rep["conditions"])
            if not c
        ]
        raise ScError("; ".join(bad))
    return e


def tw_mc_to_element(e: TwTruncMC) -> TWElem:
    """The genuine compatible family of the triple over the two-step
    truncation: level 0 is x, level 1 the gauge of the 0th coface image
    by p, level 2 the gauge of the common corner by r read in the
    standard chart (swapping (t, s) to (t2, t1))."""
    sc2 = e.sc.truncate(2)
    f = e.sc.face
    x0 = e.x.map_lie(f(1, 0))
    xi1 = gauge(
        e.p.form_subst([f_var(0, 1)], level_vars(1)),
        embed(x0, level_vars(1), positions=[]),
    )
    corner = embed(
        x0.map_lie(f(2, 0)), level_vars(2), positions=[]
    )
    r_std = e.r.form_subst([f_var(1, 2), f_var(0, 2)], level_vars(2))
    xi2 = gauge(r_std, corner)
    return TWElem(sc2, e.artin, [e.x, xi1, xi2])


def tw_mc_from_element(w: TWElem) -> TwTruncMC:
    """Decompose a compatible Maurer-Cartan family over the two-step
    truncation into its canonical triple (inverse of tw_mc_to_element)."""
    from .mcgauge import decompose_path, decompose_square

    sc = w.sc
    if sc.top != 2:
        raise ScError("expected a family over levels 0..2")
    if not tw_is_mc(w) or not w.is_compatible():
        raise ScError("input is not a compatible Maurer-Cartan family")
    f = sc.face
    x = w.comps[0]
    x0 = x.map_lie(f(1, 0))
    p = decompose_path(x0, w.comps[1]).form_subst([f_var(0, 1)], ("t",))
    corner = x0.map_lie(f(2, 0))
    xi2_paper = w.comps[2].form_subst(
        [f_var(1, 2), f_var(0, 2)], ("t", "s")
    )
    r = decompose_square(corner, xi2_paper)
    return tw_mc_assemble(sc, x, p, r)


# --- the groupoid of descent data --------------------------------------------


class TotDelObject:
    """Descent data glued from the levelwise Deligne groupoids: a
    Maurer-Cartan element l at level 0, a degree-0 gluing m at level 1
    with the gauge of the 0th coface image of l by m equal to the 1st,
    and a degree -1 coherence witness u at level 2 trivialising the
    cocycle of m (absent when the diagram stops below level 2)."""

    __slots__ = ("sc", "artin", "l", "m", "u")

    def __init__(self, sc, artin, l, m, u=None):
        self.sc = sc
        self.artin = artin
        self.l = l
        self.m = m
        self.u = u

    def eq(self, other: "TotDelObject") -> bool:
        if self.artin is not other.artin or not sc_same(self.sc, other.sc):
            return False
        same = self.l.eq(other.l) and self.m.eq(other.m)
        if self.u is None or other.u is None:
            return same and self.u is other.u
        return same and self.u.eq(other.u)


def totdel_cocycle(sc: ScDgla, m: Elem) -> Elem:
    """The level-2 gluing cocycle of m: the product (in the group sense)
    of the 0th coface image, the inverse of the 1st, and the 2nd."""
    f = sc.face
    return bch_many(
        [m.map_lie(f(2, 0)), m.map_lie(f(2, 1)).neg(), m.map_lie(f(2, 2))]
    )


def totdel_verify(o: TotDelObject) -> dict:
    """Exact verification of the two object invariants."""
    sc = o.sc
    f = sc.face
    bad = []
    if not all(k[0] == 1 for k in o.l.terms) or not _mvalued(o.l):
        bad.append("level-0 element must be degree 1 over the maximal ideal")
    elif not is_mc(o.l):
        bad.append("level-0 element is not Maurer-Cartan")
    if not all(k[0] == 0 for k in o.m.terms) or not _mvalued(o.m):
        bad.append("gluing must be degree 0 over the maximal ideal")
    if bad:
        return {"ok": False, "violations": bad}
    if not gauge(o.m, o.l.map_lie(f(1, 0))).eq(o.l.map_lie(f(1, 1))):
        bad.append("gauge of the 0th coface image of l by m is not the 1st")
    if sc.top >= 2:
        if o.u is None:
            bad.append("a level-2 coherence witness is required")
        else:
            if not all(k[0] == -1 for k in o.u.terms) or not _mvalued(o.u):
                bad.append("witness must be degree -1 over the maximal ideal")
            else:
                base = o.l.map_lie(f(1, 0)).map_lie(f(2, 2))
                if not totdel_cocycle(sc, o.m).eq(stabilizer_log(base, o.u)):
                    bad.append("witness does not trivialise the cocycle")
    return {"ok": not bad, "violations": bad}


def totdel_assemble(sc, l: Elem, m: Elem, u: Elem | None = None) -> TotDelObject:
    """Build descent data; when the witness is omitted it is found by a
    linear solve (failure means the gluing is incoherent at level 2)."""
    artin = l.ctx.artin
    if u is None and sc.top >= 2:
        f = sc.face
        base = l.map_lie(f(1, 0)).map_lie(f(2, 2))
        u = extract_irrelevant(base, totdel_cocycle(sc, m))
        if u is None:
            raise ScError(
                "the gluing cocycle admits no degree -1 witness at level 2"
            )
    o = TotDelObject(sc, artin, l, m, u)
    rep = totdel_verify(o)
    if not rep["ok"]:
        raise ScError("; ".join(rep["violations"]))
    return o


class TotDelMorphism:
    """A morphism of descent data: a level-0 degree-0 element a with the
    gauge of the source onto the target, plus a level-1 degree -1
    witness b trivialising the gluing defect. The class of a up to the
    inessential stabiliser of the source is the actual morphism."""

    __slots__ = ("source", "target", "a", "b")

    def __init__(self, source, target, a, b):
        self.source = source
        self.target = target
        self.a = a
        self.b = b


def totdel_mor_defect(f_: TotDelMorphism) -> Elem:
    """The level-1 gluing defect of the underlying gauge log: the group
    word inverse(m0) * inverse(1st coface image of a) * m1 * (0th coface
    image of a)."""
    sc = f_.source.sc
    fc = sc.face
    return bch_many(
        [
            f_.source.m.neg(),
            f_.a.map_lie(fc(1, 1)).neg(),
            f_.target.m,
            f_.a.map_lie(fc(1, 0)),
        ]
    )


def totdel_mor_verify(f_: TotDelMorphism) -> dict:
    bad = []
    o0, o1 = f_.source, f_.target
    sc = o0.sc
    if not all(k[0] == 0 for k in f_.a.terms) or not _mvalued(f_.a):
        bad.append("underlying element must be degree 0 over the maximal ideal")
    if not all(k[0] == -1 for k in f_.b.terms) or not _mvalued(f_.b):
        bad.append("witness must be degree -1 over the maximal ideal")
    if bad:
        return {"ok": False, "violations": bad}
    if not gauge(f_.a, o0.l).eq(o1.l):
        bad.append("gauge of the source by a is not the target")
    base = o0.l.map_lie(sc.face(1, 0))
    if not totdel_mor_defect(f_).eq(stabilizer_log(base, f_.b)):
        bad.append("witness does not trivialise the gluing defect")
    return {"ok": not bad, "violations": bad}


def totdel_mor_assemble(
    source: TotDelObject, target: TotDelObject, a: Elem, b: Elem | None = None
) -> TotDelMorphism:
    """Build a morphism; when the witness is omitted it is found by a
    linear solve (failure means a does not respect the gluings)."""
    if b is None:
        sc = source.sc
        base = source.l.map_lie(sc.face(1, 0))
        probe = TotDelMorphism(source, target, a, None)
        b = extract_irrelevant(base, totdel_mor_defect(probe))
        if b is None:
            raise ScError("the gluing defect admits no degree -1 witness")
    f_ = TotDelMorphism(source, target, a, b)
    rep = totdel_mor_verify(f_)
    if not rep["ok"]:
        raise ScError("; ".join(rep["violations"]))
    return f_


def totdel_identity(o: TotDelObject) -> TotDelMorphism:
    ctx0 = o.l.ctx
    ctx1 = o.m.ctx
    return TotDelMorphism(o, o, ctx0.zero(), ctx1.zero())


def totdel_compose(f_: TotDelMorphism, g_: TotDelMorphism) -> TotDelMorphism:
    """Composite (f after g): the underlying element is the group log of
    the product, the witness is recomputed by a linear solve. Existence
    of the witness is guaranteed for morphisms of valid data; failure is
    an internal inconsistency."""
    if not f_.source.eq(g_.target):
        raise ScError("morphisms are not composable")
    from .mcgauge import bch

    a = bch(f_.a, g_.a)
    try:
        return totdel_mor_assemble(g_.source, f_.target, a)
    except ScError as e:
        raise ScError(f"internal inconsistency composing morphisms: {e}")


def totdel_invert(f_: TotDelMorphism) -> TotDelMorphism:
    return totdel_mor_assemble(f_.target, f_.source, f_.a.neg())


def totdel_mor_equal(f_: TotDelMorphism, g_: TotDelMorphism) -> bool:
    """Morphisms agree when they share endpoints and their underlying
    elements differ by an inessential stabiliser of the source."""
    if not (f_.source.eq(g_.source) and f_.target.eq(g_.target)):
        return False
    return morphism_equal(f_.source.l, f_.a, g_.a)
