"""Deformations of a morphism of modules, end to end at desk scale.

The chain: finite-dimensional algebras and modules, explicit projective
resolutions by free covers, a lift of the morphism to the resolutions,
the graph subcomplex and the dgLa of endomorphisms preserving it, the
two-level diagram whose totalisation controls deformations of the
morphism, and a long-exact-sequence checker that ties its cohomology to
Ext groups computed by an independent brute-force oracle. Everything is
exact rational linear algebra; "locally free" means projective with a
witnessed splitting.
"""

from __future__ import annotations

import random

from .dgla import Dgla, DglaMap, direct_sum
from .linalg import ChainComplexQ, Mat, Subspace, vec, vis_zero, vzero
from .ratio import Q, rat
from .semicosimplicial import ScDgla, total_complex


class PipelineError(ValueError):
    pass


def _flatten(m: Mat):
    return tuple(m.entry(r, c) for r in range(m.rows) for c in range(m.cols))


def _unflatten(v, rows, cols):
    m = Mat(rows, cols)
    for r in range(rows):
        for c in range(cols):
            x = rat(v[r * cols + c])
            if x:
                m.set_entry(r, c, x)
    return m


# --- finite-dimensional algebras ---------------------------------------------


class FinAlg:
    """Associative unital algebra over Q on a chosen basis.

    mul[i][j] is the coordinate vector of the product of the i-th and
    j-th basis elements; unit is the coordinate vector of 1.
    """

    def __init__(self, mul, unit, labels=None, label="", check=True):
        self.dim = len(mul)
        self.mul = [[vec(v) for v in row] for row in mul]
        self.unit = vec(unit)
        self.labels = list(labels) if labels else [f"x{i}" for i in range(self.dim)]
        self.label = label
        if check:
            self.check()

    def mul_vec(self, u, v):
        out = [Q(0)] * self.dim
        for i, a in enumerate(u):
            if a == 0:
                continue
            for j, b in enumerate(v):
                if b == 0:
                    continue
                for k, c in enumerate(self.mul[i][j]):
                    out[k] += a * b * c
        return tuple(out)

    def check(self):
        basis = [
            tuple(Q(1) if k == i else Q(0) for k in range(self.dim))
            for i in range(self.dim)
        ]
        for i, e in enumerate(basis):
            if self.mul_vec(self.unit, e) != e or self.mul_vec(e, self.unit) != e:
                raise PipelineError(f"unit law fails on basis element {i}")
        for a in basis:
            for b in basis:
                ab = self.mul_vec(a, b)
                for c in basis:
                    if self.mul_vec(ab, c) != self.mul_vec(a, self.mul_vec(b, c)):
                        raise PipelineError("multiplication is not associative")

    def left_mult_mat(self, i):
        """Matrix of left multiplication by the i-th basis element."""
        m = Mat(self.dim, self.dim)
        for j in range(self.dim):
            for k, c in enumerate(self.mul[i][j]):
                if c:
                    m.set_entry(k, j, c)
        return m


def field_algebra():
    return FinAlg([[(1,)]], (1,), labels=["1"], label="Q")


def a2_algebra():
    """Path algebra of the two-vertex quiver with one arrow, on the
    basis (first idempotent, second idempotent, arrow). The arrow a
    satisfies a = a e1 = e2 a."""
    e1, e2, a = (1, 0, 0), (0, 1, 0), (0, 0, 1)
    z = (0, 0, 0)
    mul = [
        [e1, z, z],  # e1*e1, e1*e2, e1*a
        [z, e2, a],  # e2*e1, e2*e2, e2*a
        [a, z, z],  # a*e1,  a*e2,  a*a
    ]
    return FinAlg(mul, (1, 1, 0), labels=["e1", "e2", "a"], label="A2")


# --- modules ------------------------------------------------------------------


class FinMod:
    """Left module on a chosen basis: one action matrix per algebra
    basis element."""

    def __init__(self, alg: FinAlg, dim: int, acts, label="", check=True):
        self.alg = alg
        self.dim = dim
        self.acts = [m if isinstance(m, Mat) else Mat.from_rows(m, cols=dim) for m in acts]
        self.label = label
        if len(self.acts) != alg.dim:
            raise PipelineError("one action matrix per algebra basis element")
        for m in self.acts:
            if m.rows != dim or m.cols != dim:
                raise PipelineError("action matrix has the wrong shape")
        if check:
            self.check()

    def act_of(self, u) -> Mat:
        out = Mat(self.dim, self.dim)
        for i, c in enumerate(u):
            if c:
                out = out.add(self.acts[i].scale(rat(c)))
        return out

    def check(self):
        if self.dim == 0:
            return
        ident = Mat.identity(self.dim)
        if self.act_of(self.alg.unit) != ident:
            raise PipelineError("unit does not act as the identity")
        for i in range(self.alg.dim):
            for j in range(self.alg.dim):
                if self.acts[i] @ self.acts[j] != self.act_of(self.alg.mul[i][j]):
                    raise PipelineError("action is not multiplicative")


def zero_module(alg: FinAlg) -> FinMod:
    return FinMod(alg, 0, [Mat(0, 0)] * alg.dim, label="0")


def free_module(alg: FinAlg, k: int) -> FinMod:
    """Direct sum of k copies of the algebra as a left module over
    itself."""
    acts = []
    for i in range(alg.dim):
        l0 = alg.left_mult_mat(i)
        m = Mat(k * alg.dim, k * alg.dim)
        for t in range(k):
            for r in range(alg.dim):
                for c in range(alg.dim):
                    v = l0.entry(r, c)
                    if v:
                        m.set_entry(t * alg.dim + r, t * alg.dim + c, v)
        acts.append(m)
    return FinMod(alg, k * alg.dim, acts, label=f"free({k})", check=False)


def module_direct_sum(m1: FinMod, m2: FinMod):
    """Returns (sum, inj1, inj2, proj1, proj2)."""
    n = m1.dim + m2.dim
    acts = []
    for i in range(m1.alg.dim):
        m = Mat(n, n)
        for r in range(m1.dim):
            for c in range(m1.dim):
                v = m1.acts[i].entry(r, c)
                if v:
                    m.set_entry(r, c, v)
        for r in range(m2.dim):
            for c in range(m2.dim):
                v = m2.acts[i].entry(r, c)
                if v:
                    m.set_entry(m1.dim + r, m1.dim + c, v)
        acts.append(m)
    out = FinMod(m1.alg, n, acts, check=False)
    i1 = Mat(n, m1.dim)
    i2 = Mat(n, m2.dim)
    p1 = Mat(m1.dim, n)
    p2 = Mat(m2.dim, n)
    for r in range(m1.dim):
        i1.set_entry(r, r, Q(1))
        p1.set_entry(r, r, Q(1))
    for r in range(m2.dim):
        i2.set_entry(m1.dim + r, r, Q(1))
        p2.set_entry(r, m1.dim + r, Q(1))
    return out, i1, i2, p1, p2


def is_module_map(m1: FinMod, m2: FinMod, t: Mat) -> bool:
    return all(
        t @ m1.acts[i] == m2.acts[i] @ t for i in range(m1.alg.dim)
    )


def hom_basis(m1: FinMod, m2: FinMod):
    """Basis of the space of module maps, as matrices."""
    if m1.dim == 0 or m2.dim == 0:
        return []
    nunk = m2.dim * m1.dim
    rows = []
    for i in range(m1.alg.dim):
        a, b = m1.acts[i], m2.acts[i]
        # (T a - b T)[r, c] = sum_k T[r,k] a[k,c] - b[r,k] T[k,c]
        for r in range(m2.dim):
            for c in range(m1.dim):
                row = [Q(0)] * nunk
                for k in range(m1.dim):
                    v = a.entry(k, c)
                    if v:
                        row[r * m1.dim + k] += v
                for k in range(m2.dim):
                    v = b.entry(r, k)
                    if v:
                        row[k * m1.dim + c] -= v
                if any(row):
                    rows.append(tuple(row))
    if not rows:
        return [
            _unflatten(v, m2.dim, m1.dim)
            for v in Mat(0, nunk).kernel_basis()
        ]
    m = Mat.from_rows(rows, cols=nunk)
    return [_unflatten(v, m2.dim, m1.dim) for v in m.kernel_basis()]


class HomSolver:
    """Expresses module maps in the coordinates of a chosen hom basis."""

    def __init__(self, basis, rows, cols):
        self.basis = basis
        self.rows = rows
        self.cols = cols
        self.mat = (
            Mat.from_cols([_flatten(b) for b in basis], rows=rows * cols)
            if basis
            else None
        )

    def coords(self, t: Mat):
        if not self.basis:
            if not t.is_zero():
                raise PipelineError("map does not lie in the hom space")
            return ()
        sol = self.mat.solve(_flatten(t))
        if sol is None:
            raise PipelineError("map does not lie in the hom space")
        return tuple(sol[0])

    def from_coords(self, v) -> Mat:
        out = Mat(self.rows, self.cols)
        for c, b in zip(v, self.basis):
            if c:
                out = out.add(b.scale(rat(c)))
        return out


def generating_set(m: FinMod):
    """Greedy small generating set: basis vectors not already inside the
    submodule generated by the previous picks. The generated span only
    needs one pass of the action since the algebra is unital."""
    span = Subspace(m.dim, [])
    gens = []
    for t in range(m.dim):
        e = tuple(Q(1) if k == t else Q(0) for k in range(m.dim))
        if span.contains(e):
            continue
        gens.append(e)
        orbit = [tuple(m.acts[i].matvec(e)) for i in range(m.alg.dim)]
        span = Subspace(m.dim, list(span.basis) + orbit)
        if span.dim == m.dim:
            break
    return gens


def free_cover(m: FinMod):
    """A surjection from a free module onto m, using a greedy generating
    set. Returns (free, pi)."""
    gens = generating_set(m)
    free = free_module(m.alg, len(gens))
    pi = Mat(m.dim, free.dim)
    for t, g in enumerate(gens):
        for j in range(m.alg.dim):
            col = m.acts[j].matvec(g)
            for r, v in enumerate(col):
                if v:
                    pi.set_entry(r, t * m.alg.dim + j, v)
    return free, pi


def split_section(pi: Mat, src: FinMod, tgt: FinMod):
    """A module map s with pi∘s = id on tgt, or None. pi: src -> tgt
    must be a module map."""
    basis = hom_basis(tgt, src)
    if tgt.dim == 0:
        return Mat(src.dim, 0)
    if not basis:
        return None
    cols = [_flatten(pi @ b) for b in basis]
    m = Mat.from_cols(cols, rows=tgt.dim * tgt.dim)
    sol = m.solve(_flatten(Mat.identity(tgt.dim)))
    if sol is None:
        return None
    out = Mat(src.dim, tgt.dim)
    for c, b in zip(sol[0], basis):
        if c:
            out = out.add(b.scale(rat(c)))
    return out


def projective_witness(m: FinMod):
    """(embedding, projection, rank of the free module) realizing m as a
    direct summand of a free module, or None when m is not projective."""
    if m.dim == 0:
        return Mat(0, 0), Mat(0, 0), 0
    free, pi = free_cover(m)
    s = split_section(pi, free, m)
    if s is None:
        return None
    return s, pi, free.dim // m.alg.dim


def kernel_module(m: FinMod, t: Mat):
    """The kernel of a module map out of m, as a module with its
    inclusion. Returns (ker, incl)."""
    basis = t.kernel_basis()
    k = len(basis)
    if k == 0:
        return zero_module(m.alg), Mat(m.dim, 0)
    incl = Mat.from_cols(basis, rows=m.dim)
    acts = []
    for i in range(m.alg.dim):
        img = m.acts[i] @ incl
        a = Mat(k, k)
        for c in range(k):
            s = incl.solve(img.col(c))
            if s is None:
                raise PipelineError("kernel is not closed under the action")
            for r, v in enumerate(s[0]):
                if v:
                    a.set_entry(r, c, v)
        acts.append(a)
    return FinMod(m.alg, k, acts, check=False), incl


def fibre_product(m1: FinMod, f: Mat, m2: FinMod, g: Mat, tgt_dim: int):
    """{(x, y) : f x = g y} inside the direct sum. Returns
    (X, pr1, pr2)."""
    s, i1, i2, p1, p2 = module_direct_sum(m1, m2)
    t = Mat(tgt_dim, s.dim)
    for r in range(tgt_dim):
        for c in range(m1.dim):
            v = f.entry(r, c)
            if v:
                t.set_entry(r, c, v)
        for c in range(m2.dim):
            v = g.entry(r, c)
            if v:
                t.set_entry(r, m1.dim + c, -v)
    x, incl = kernel_module(s, t)
    return x, p1 @ incl, p2 @ incl


# --- bounded complexes of modules ----------------------------------------------


class BddComplex:
    """Bounded complex of modules in nonpositive degrees.

    mods: {deg: FinMod}; diffs: {deg: Mat for d taking deg to deg+1}.
    witnesses: {deg: (emb, proj, free_rank)} realizing a term as a
    summand of a free module, when the term is flagged projective.
    """

    def __init__(self, alg: FinAlg, mods: dict, diffs: dict, witnesses=None, check=True):
        self.alg = alg
        self.mods = {int(d): m for d, m in mods.items() if m.dim}
        self.diffs = {}
        for d, m in diffs.items():
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if not m.is_zero():
                self.diffs[int(d)] = m
        self.witnesses = dict(witnesses) if witnesses else {}
        if check:
            self.check()

    def deg_range(self):
        if not self.mods:
            return 0, -1
        return min(self.mods), max(self.mods)

    def module(self, d: int) -> FinMod:
        return self.mods.get(d) or zero_module(self.alg)

    def dim(self, d: int) -> int:
        m = self.mods.get(d)
        return m.dim if m else 0

    def diff(self, d: int) -> Mat:
        m = self.diffs.get(d)
        return m if m is not None else Mat(self.dim(d + 1), self.dim(d))

    def check(self):
        lo, hi = self.deg_range()
        if self.mods and hi > 0:
            raise PipelineError("complex must live in nonpositive degrees")
        for d in self.mods:
            dm = self.diff(d)
            if dm.rows != self.dim(d + 1) or dm.cols != self.dim(d):
                raise PipelineError(f"differential at {d} has the wrong shape")
            if not is_module_map(self.module(d), self.module(d + 1), dm):
                raise PipelineError(f"differential at {d} is not a module map")
            if not (self.diff(d + 1) @ dm).is_zero():
                raise PipelineError("differential does not square to zero")
        for d, w in self.witnesses.items():
            emb, proj, k = w
            if (proj @ emb) != Mat.identity(self.dim(d)):
                raise PipelineError(f"splitting witness at {d} is not a splitting")

    def underlying(self) -> ChainComplexQ:
        return ChainComplexQ(
            {d: m.dim for d, m in self.mods.items()},
            {d: m for d, m in self.diffs.items()},
            check=False,
        )

    def attach_witnesses(self):
        """Compute and store splitting witnesses for every term; raises
        when a term is not projective."""
        for d, m in self.mods.items():
            if d in self.witnesses:
                continue
            w = projective_witness(m)
            if w is None:
                raise PipelineError(f"term in degree {d} is not projective")
            self.witnesses[d] = w


def module_as_complex(m: FinMod) -> BddComplex:
    return BddComplex(m.alg, {0: m}, {}, check=False)


class ChainMapM:
    """Degreewise module maps commuting with the differentials."""

    def __init__(self, source: BddComplex, target: BddComplex, comps: dict, check=True):
        self.source = source
        self.target = target
        self.comps = {}
        for d, m in comps.items():
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if not m.is_zero():
                self.comps[int(d)] = m
        if check:
            self.check()

    def comp(self, d: int) -> Mat:
        m = self.comps.get(d)
        return m if m is not None else Mat(self.target.dim(d), self.source.dim(d))

    def check(self):
        degs = set(self.source.mods) | set(self.target.mods)
        for d in degs:
            c = self.comp(d)
            if c.rows != self.target.dim(d) or c.cols != self.source.dim(d):
                raise PipelineError(f"component at {d} has the wrong shape")
            if c.rows and c.cols and not is_module_map(
                self.source.module(d), self.target.module(d), c
            ):
                raise PipelineError(f"component at {d} is not a module map")
            lhs = self.target.diff(d) @ c
            rhs = self.comp(d + 1) @ self.source.diff(d)
            if lhs != rhs:
                raise PipelineError(f"square at degree {d} does not commute")

    @classmethod
    def identity(cls, k: BddComplex) -> "ChainMapM":
        return cls(k, k, {d: Mat.identity(k.dim(d)) for d in k.mods}, check=False)

    def is_quasi_iso(self) -> bool:
        cone, _ = cone_complex(self)
        return cone.underlying().betti() == {}


# --- resolutions ---------------------------------------------------------------


class Resolution:
    """A complex of projectives in nonpositive degrees together with a
    surjective augmentation onto a module, exact away from degree 0."""

    def __init__(self, cx: BddComplex, module: FinMod, aug: Mat, check=True):
        self.cx = cx
        self.module = module
        self.aug = aug
        if check:
            self.check()

    def check(self):
        if self.aug.rows != self.module.dim or self.aug.cols != self.cx.dim(0):
            raise PipelineError("augmentation has the wrong shape")
        if self.module.dim and not is_module_map(
            self.cx.module(0), self.module, self.aug
        ):
            raise PipelineError("augmentation is not a module map")
        if not (self.aug @ self.cx.diff(-1)).is_zero():
            raise PipelineError("augmentation does not kill the image")
        if self.aug.rank() != self.module.dim:
            raise PipelineError("augmentation is not surjective")
        und = self.cx.underlying()
        betti = und.betti()
        lo, _ = self.cx.deg_range()
        for d, h in betti.items():
            if d != 0 and h:
                raise PipelineError(f"resolution is not exact in degree {d}")
        h0 = betti.get(0, 0)
        # kernel of augmentation = image of the last differential
        ker = Subspace(self.cx.dim(0), self.aug.kernel_basis())
        img = Subspace(self.cx.dim(0), [
            self.cx.diff(-1).col(j) for j in range(self.cx.dim(-1))
        ])
        if not (ker.eq(img) and h0 == self.module.dim):
            raise PipelineError("augmentation is not a quasi-isomorphism")
        self.cx.attach_witnesses()


def resolve(m: FinMod, n_max: int = 8) -> Resolution:
    """Projective resolution by iterated free covers; a kernel is kept
    as the last term as soon as it is projective, and a module that is
    already projective resolves as itself."""
    if m.dim == 0:
        return Resolution(BddComplex(m.alg, {}, {}, check=False), m, Mat(0, 0))
    w = projective_witness(m)
    if w is not None:
        cx = BddComplex(m.alg, {0: m}, {}, witnesses={0: w}, check=False)
        return Resolution(cx, m, Mat.identity(m.dim))
    f0, pi0 = free_cover(m)
    mods = {0: f0}
    diffs = {}
    ker, incl = kernel_module(f0, pi0)
    r = 0
    while ker.dim:
        r += 1
        if r > n_max:
            raise PipelineError("resolution exceeded the length bound")
        w = projective_witness(ker)
        if w is not None:
            mods[-r] = ker
            diffs[-r] = incl
            break
        fr, pir = free_cover(ker)
        mods[-r] = fr
        diffs[-r] = incl @ pir
        ker, incl = kernel_module(fr, pir)
    cx = BddComplex(m.alg, mods, diffs, check=True)
    return Resolution(cx, m, pi0)


def lift_morphism(alpha: Mat, fmod: FinMod, gmod: FinMod, res_g: Resolution, n_max: int = 8):
    """A resolution of the source together with a chain map to the given
    resolution of the target lifting the morphism. Returns
    (res_f, lift: ChainMapM)."""
    if not is_module_map(fmod, gmod, alpha):
        raise PipelineError("the morphism is not a module map")
    if alpha.is_zero():
        res_f = resolve(fmod, n_max)
        lift = ChainMapM(res_f.cx, res_g.cx, {}, check=True)
        _check_lift(alpha, res_f, res_g, lift)
        return res_f, lift
    if (
        fmod.dim == gmod.dim
        and alpha.rank() == fmod.dim
        and alpha.inverse() is not None
    ):
        inv = alpha.inverse()
        res_f = Resolution(res_g.cx, fmod, inv @ res_g.aug)
        lift = ChainMapM.identity(res_g.cx)
        _check_lift(alpha, res_f, res_g, lift)
        return res_f, lift

    # degree 0: cover the fibre product of the morphism and the augmentation
    x0, pr_f, pr_e = fibre_product(fmod, alpha, res_g.cx.module(0), res_g.aug, gmod.dim)
    f0, pi = free_cover(x0)
    aug_f = pr_f @ pi
    mods = {0: f0}
    diffs = {}
    lifts = {0: pr_e @ pi}
    ker, incl = kernel_module(f0, aug_f)
    r = 0
    while ker.dim:
        r += 1
        if r > n_max:
            raise PipelineError("resolution exceeded the length bound")
        eg = res_g.cx.module(-r)
        # pairs (y, k) with d y = (previous lift) k, a fibre product over
        # the next target term
        amap = lifts[-r + 1] @ incl
        x, pr_y, pr_k = fibre_product(eg, res_g.cx.diff(-r), ker, amap, res_g.cx.dim(-r + 1))
        w = projective_witness(ker)
        if w is not None:
            s = split_section(pr_k, x, ker)
            if s is None:
                raise PipelineError("projective kernel failed to split the fibre product")
            mods[-r] = ker
            diffs[-r] = incl
            lifts[-r] = pr_y @ s
            break
        fr, pir = free_cover(x)
        mods[-r] = fr
        diffs[-r] = incl @ pr_k @ pir
        lifts[-r] = pr_y @ pir
        ker, incl = kernel_module(fr, pr_k @ pir)
    cx = BddComplex(fmod.alg, mods, diffs, check=True)
    res_f = Resolution(cx, fmod, aug_f)
    lift = ChainMapM(cx, res_g.cx, lifts, check=True)
    _check_lift(alpha, res_f, res_g, lift)
    return res_f, lift


def _check_lift(alpha: Mat, res_f: Resolution, res_g: Resolution, lift: ChainMapM):
    if (res_g.aug @ lift.comp(0)) != (alpha @ res_f.aug):
        raise PipelineError("augmented square does not commute")


# --- graph, direct sums, cones ---------------------------------------------------


def complex_direct_sum(k1: BddComplex, k2: BddComplex):
    """Returns (sum, inj1, inj2, proj1, proj2) with chain-map blocks."""
    degs = sorted(set(k1.mods) | set(k2.mods))
    mods = {}
    diffs = {}
    i1c, i2c, p1c, p2c = {}, {}, {}, {}
    parts = {}
    for d in degs:
        s, i1, i2, p1, p2 = module_direct_sum(k1.module(d), k2.module(d))
        mods[d] = s
        parts[d] = (i1, i2, p1, p2)
        i1c[d], i2c[d], p1c[d], p2c[d] = i1, i2, p1, p2
    for d in degs:
        if d + 1 in mods:
            i1n, i2n, _, _ = parts[d + 1]
            diffs[d] = (i1n @ k1.diff(d) @ p1c[d]).add(i2n @ k2.diff(d) @ p2c[d])
    total = BddComplex(k1.alg, mods, diffs, check=True)
    inj1 = ChainMapM(k1, total, i1c, check=True)
    inj2 = ChainMapM(k2, total, i2c, check=True)
    proj1 = ChainMapM(total, k1, p1c, check=True)
    proj2 = ChainMapM(total, k2, p2c, check=True)
    return total, inj1, inj2, proj1, proj2


def graph_complex(f: ChainMapM):
    """The graph of a chain map, with its embedding into the direct sum
    of source and target. Returns (graph, embedding, ambient, iso) where
    iso identifies the source with the graph."""
    k, m = f.source, f.target
    ambient, i1, i2, _, _ = complex_direct_sum(k, m)
    graph = BddComplex(k.alg, dict(k.mods), dict(k.diffs), witnesses=dict(k.witnesses), check=False)
    comps = {}
    for d in k.mods:
        comps[d] = (i1.comp(d)).add(i2.comp(d) @ f.comp(d))
    emb = ChainMapM(graph, ambient, comps, check=True)
    iso = ChainMapM(k, graph, {d: Mat.identity(k.dim(d)) for d in k.mods}, check=True)
    return graph, emb, ambient, iso


def cone_complex(f: ChainMapM):
    """Mapping cone: shifted source plus target with the map in the
    corner. Returns (cone, inclusion of the target)."""
    e, q = f.source, f.target
    degs = sorted({d - 1 for d in e.mods} | set(q.mods))
    mods = {}
    parts = {}
    for d in degs:
        s, i1, i2, p1, p2 = module_direct_sum(e.module(d + 1), q.module(d))
        if s.dim:
            mods[d] = s
            parts[d] = (i1, i2, p1, p2)
    diffs = {}
    for d in degs:
        if d + 1 not in mods or d not in mods:
            continue
        i1n, i2n, _, _ = parts[d + 1]
        _, _, p1, p2 = parts[d]
        dmat = (i1n @ e.diff(d + 1).neg() @ p1).add(
            i2n @ f.comp(d + 1) @ p1
        ).add(i2n @ q.diff(d) @ p2)
        diffs[d] = dmat
    cone = BddComplex(e.alg, mods, diffs, check=True)
    incl = ChainMapM(
        q,
        cone,
        {d: parts[d][1] for d in mods if d in q.mods and q.dim(d)},
        check=True,
    )
    return cone, incl


# --- hom complexes and module-level endomorphism dgLas ----------------------------


class HomBook:
    """Bookkeeping for the hom complex of two bounded complexes: per
    total degree, the blocks source-degree -> source-degree + p with a
    basis of module maps each."""

    def __init__(self, k: BddComplex, m: BddComplex):
        self.k = k
        self.m = m
        self.blocks = {}
        self.offsets = {}
        self.dims = {}
        pmin = min(m.mods, default=0) - max(k.mods, default=0)
        pmax = max(m.mods, default=0) - min(k.mods, default=0)
        for p in range(pmin, pmax + 1):
            off = 0
            blocks = []
            for i in sorted(k.mods):
                if i + p not in m.mods:
                    continue
                basis = hom_basis(k.module(i), m.module(i + p))
                if not basis:
                    continue
                solver = HomSolver(basis, m.dim(i + p), k.dim(i))
                blocks.append((i, solver))
                self.offsets[(p, i)] = off
                off += len(basis)
            if blocks:
                self.blocks[p] = blocks
                self.dims[p] = off

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    def to_mats(self, p: int, v) -> dict:
        out = {}
        for i, solver in self.blocks.get(p, ()):
            off = self.offsets[(p, i)]
            coords = v[off : off + len(solver.basis)]
            if any(coords):
                out[i] = solver.from_coords(coords)
        return out

    def coords(self, p: int, mats: dict):
        out = [Q(0)] * self.dim(p)
        for i, solver in self.blocks.get(p, ()):
            t = mats.get(i)
            if t is None or t.is_zero():
                continue
            off = self.offsets[(p, i)]
            for j, c in enumerate(solver.coords(t)):
                out[off + j] = c
        # make sure no block fell outside the recorded ones
        known = {i for i, _ in self.blocks.get(p, ())}
        for i, t in mats.items():
            if i not in known and t is not None and not t.is_zero():
                raise PipelineError("map has a component outside the hom space")
        return tuple(out)

    def block_mat(self, p: int, i: int, v) -> Mat:
        for j, solver in self.blocks.get(p, ()):
            if j == i:
                off = self.offsets[(p, i)]
                return solver.from_coords(v[off : off + len(solver.basis)])
        return Mat(self.m.dim(i + p), self.k.dim(i))


def hom_complex(k: BddComplex, m: BddComplex):
    """The complex of module maps with differential
    h -> d∘h - (-1)^{|h|} h∘d. Returns (ChainComplexQ, HomBook)."""
    book = HomBook(k, m)
    dims = dict(book.dims)
    diffs = {}
    for p in sorted(dims):
        if book.dim(p + 1) == 0:
            continue
        dmat = Mat(book.dim(p + 1), book.dim(p))
        sgn = Q(1) if p % 2 == 0 else Q(-1)
        for i, solver in book.blocks[p]:
            off = book.offsets[(p, i)]
            for j, b in enumerate(solver.basis):
                img = {}
                post = m.diff(i + p) @ b
                if not post.is_zero():
                    img[i] = post
                pre = b @ k.diff(i - 1)
                if not pre.is_zero():
                    img[i - 1] = img.get(i - 1, Mat(pre.rows, pre.cols)).add(
                        pre.scale(-sgn)
                    )
                coords = book.coords(p + 1, img)
                for r, c in enumerate(coords):
                    if c:
                        dmat.set_entry(r, off + j, c)
        if not dmat.is_zero():
            diffs[p] = dmat
    return ChainComplexQ(dims, diffs, check=True), book


def compose_in_books(bookA: HomBook, pa: int, va, bookB: HomBook, pb: int, vb) -> dict:
    """Blockwise composite (A after B) of two hom elements, as matrices
    keyed by source degree."""
    amats = bookA.to_mats(pa, va)
    bmats = bookB.to_mats(pb, vb)
    out = {}
    for i, b in bmats.items():
        a = amats.get(i + pb)
        if a is None:
            continue
        prod = a @ b
        if not prod.is_zero():
            out[i] = out.get(i, Mat(prod.rows, prod.cols)).add(prod)
    return out


def end_dgla_of_complex(k: BddComplex, label: str = ""):
    """Endomorphism dgLa of a bounded complex of modules: degree-p part
    the module maps lowering the degree by -p blockwise, graded
    commutator bracket. Returns (Dgla, HomBook)."""
    cplx, book = hom_complex(k, k)

    def brk(p1, a, p2, b):
        v1 = [Q(1) if t == a else Q(0) for t in range(book.dim(p1))]
        v2 = [Q(1) if t == b else Q(0) for t in range(book.dim(p2))]
        ab = compose_in_books(book, p1, v1, book, p2, v2)
        ba = compose_in_books(book, p2, v2, book, p1, v1)
        sgn = Q(-1) if (p1 * p2) % 2 else Q(1)
        mats = dict(ab)
        for i, m in ba.items():
            cur = mats.get(i, Mat(m.rows, m.cols))
            mats[i] = cur.add(m.scale(-sgn))
        coords = book.coords(p1 + p2, mats)
        return [(t, c) for t, c in enumerate(coords) if c]

    g = Dgla(
        dict(book.dims),
        {p: cplx.diff(p) for p in book.dims if not cplx.diff(p).is_zero()},
        brk,
        validate="auto",
        label=label or "End",
    )
    return g, book


def sub_dgla_from_spans(g: Dgla, spans: dict, label: str = ""):
    """The sub-dgLa spanned degreewise by the given coordinate vectors;
    closure under d and bracket is solved for and asserted. Returns
    (sub, inclusion DglaMap)."""
    mats = {}
    sols = {}
    dims = {}
    for d, vecs in spans.items():
        if not vecs:
            continue
        mats[d] = Mat.from_cols(vecs, rows=g.dim(d))
        dims[d] = len(vecs)

    def in_coords(d, v):
        m = mats.get(d)
        if m is None:
            if vis_zero(v):
                return ()
            raise PipelineError("sub-dgla is not closed")
        sol = m.solve(v)
        if sol is None:
            raise PipelineError("sub-dgla is not closed")
        return tuple(sol[0])

    diffs = {}
    for d in dims:
        if dims.get(d + 1, 0) == 0:
            img_ok = all(
                vis_zero(g.diff(d).matvec(mats[d].col(j))) for j in range(dims[d])
            )
            if not img_ok:
                raise PipelineError("sub-dgla is not closed under d")
            continue
        dm = Mat(dims[d + 1], dims[d])
        for j in range(dims[d]):
            co = in_coords(d + 1, g.diff(d).matvec(mats[d].col(j)))
            for r, c in enumerate(co):
                if c:
                    dm.set_entry(r, j, c)
        if not dm.is_zero():
            diffs[d] = dm

    def brk(d1, i, d2, j):
        v1 = mats[d1].col(i)
        v2 = mats[d2].col(j)
        w = g._bracket_vec(d1, v1, d2, v2)
        if vis_zero(vec(w)):
            return []
        co = in_coords(d1 + d2, vec(w))
        return [(t, c) for t, c in enumerate(co) if c]

    sub = Dgla(dims, diffs, brk, validate="none", label=label)
    incl = DglaMap(sub, g, {d: mats[d] for d in dims}, check=True)
    return sub, incl


def sub_preserving_dgla(emb: ChainMapM, end_amb=None):
    """The dgLa of endomorphisms of the ambient complex preserving the
    image of a degreewise-injective chain embedding. Returns
    (L, inclusion into End(ambient), end_of_ambient, its HomBook)."""
    sub, amb = emb.source, emb.target
    for d in sub.mods:
        if emb.comp(d).rank() != sub.dim(d):
            raise PipelineError("the embedding is not degreewise injective")
    if end_amb is None:
        end_g, book = end_dgla_of_complex(amb, label="End(ambient)")
    else:
        end_g, book = end_amb
    spans = {}
    for p in sorted(book.dims):
        n = book.dim(p)
        rows = []
        for i, solver in book.blocks[p]:
            tgt = i + p
            img = Subspace(
                amb.dim(tgt),
                [emb.comp(tgt).col(j) for j in range(sub.dim(tgt))]
                if sub.dim(tgt)
                else [],
            )
            ann = img.annihilator_matrix()
            if ann.rows == 0 or sub.dim(i) == 0:
                continue
            off = book.offsets[(p, i)]
            for rr in range(ann.rows):
                for cc in range(sub.dim(i)):
                    row = [Q(0)] * n
                    nz = False
                    for j, b in enumerate(solver.basis):
                        val = Q(0)
                        col = (b @ emb.comp(i)).col(cc)
                        for t, a in enumerate(col):
                            av = ann.entry(rr, t)
                            if av and a:
                                val += av * a
                        if val:
                            row[off + j] = val
                            nz = True
                    if nz:
                        rows.append(tuple(row))
        if rows:
            m = Mat.from_rows(rows, cols=n)
            spans[p] = m.kernel_basis()
        else:
            spans[p] = [
                tuple(Q(1) if t == j else Q(0) for t in range(n)) for j in range(n)
            ]
    sub_g, incl = sub_dgla_from_spans(end_g, spans, label="preserving")
    return sub_g, incl, end_g, book


# --- Ext oracle --------------------------------------------------------------------


def ext_bruteforce(f: FinMod, g: FinMod, n_max: int = 8):
    """Dimensions of Ext^i computed from an explicit projective
    resolution and its hom complex into the target module."""
    if f.alg is not g.alg and f.alg.label != g.alg.label:
        raise PipelineError("modules live over different algebras")
    res = resolve(f, n_max)
    if not res.cx.mods:
        return []
    cplx, _ = hom_complex(res.cx, module_as_complex(g))
    lo, _ = res.cx.deg_range()
    out = []
    for i in range(0, -lo + 1):
        out.append(cplx.cohomology(i)[0])
    return out


# --- combined resolutions ------------------------------------------------------------


def _extend_to_resolution(alg, mods, diffs, module, aug, reserved, n_max):
    """Complete partially built data to a resolution by adding free
    covers of the successive kernels next to the reserved summands.

    A reserved summand comes with a differential into the reserved block
    of the term above, which always occupies the first coordinates."""
    r = 0
    cur_mod = mods[0]
    ker_map = aug
    while True:
        ker, incl = kernel_module(cur_mod, ker_map)
        if ker.dim == 0:
            break
        r += 1
        if r > n_max:
            raise PipelineError("combined resolution exceeded the length bound")
        res_part = reserved.get(-r)
        if res_part is None:
            w = projective_witness(ker)
            if w is not None:
                mods[-r] = ker
                diffs[-r] = incl
                break
            fr, pi = free_cover(ker)
            mods[-r] = fr
            diffs[-r] = incl @ pi
            cur_mod = fr
            ker_map = pi
        else:
            part_mod, part_d = res_part
            # zero-pad the reserved differential into the full term above
            emb = Mat(cur_mod.dim, part_d.rows)
            for t in range(part_d.rows):
                emb.set_entry(t, t, Q(1))
            part_d_full = emb @ part_d
            # reserved summand maps in by its own differential; cover the
            # whole kernel next to it
            fr, pi = free_cover(ker)
            s, i1, i2, p1, p2 = module_direct_sum(part_mod, fr)
            mods[-r] = s
            diffs[-r] = (part_d_full @ p1).add(incl @ pi @ p2)
            cur_mod = s
            ker_map = diffs[-r]
    return mods, diffs


def combined_resolution(res_f: Resolution, res_fp: Resolution, res_g: Resolution, res_gp: Resolution, n_max: int = 8):
    """Two combined resolutions containing both given resolutions of
    each module as quasi-isomorphic subcomplexes, with degreewise-split
    exact rows onto the quotients. Returns a dict with complexes Q, P,
    quotients R, N, and the four inclusion chain maps."""
    if res_f.module is not res_fp.module and res_f.module.dim != res_fp.module.dim:
        raise PipelineError("the first pair must resolve the same module")
    if res_g.module is not res_gp.module and res_g.module.dim != res_gp.module.dim:
        raise PipelineError("the second pair must resolve the same module")
    q, i1, j1, r_quot = _combine_pair(res_fp, res_f, n_max)
    p, i2, j2, n_quot = _combine_pair(res_gp, res_g, n_max)
    return {
        "Q": q,
        "P": p,
        "R": r_quot,
        "N": n_quot,
        "i1": i1,
        "i2": i2,
        "j1": j1,
        "j2": j2,
    }


def _combine_pair(res_a: Resolution, res_b: Resolution, n_max: int):
    """One combined resolution Q of the common module containing res_a
    and res_b as subcomplexes; the row 0 -> res_a -> Q -> Q/res_a -> 0
    is degreewise split exact. Returns (Q: Resolution, incl_a, incl_b,
    quotient complex)."""
    alg = res_a.cx.alg
    module = res_a.module
    a0, b0 = res_a.cx.module(0), res_b.cx.module(0)
    s0, ia0, ib0, pa0, pb0 = module_direct_sum(a0, b0)
    aug = (res_a.aug @ pa0).add(res_b.aug @ pb0)
    mods = {0: s0}
    diffs = {}
    # reserved summands: the direct sums of the two given terms per degree
    reserved = {}
    degs = sorted(set(res_a.cx.mods) | set(res_b.cx.mods))
    parts = {0: (ia0, ib0, pa0, pb0)}
    prev = (ia0, ib0)
    for d in sorted((d for d in degs if d < 0), reverse=True):
        sa, ia, ib, pa, pb = module_direct_sum(res_a.cx.module(d), res_b.cx.module(d))
        ia_prev, ib_prev = prev
        dmat = (ia_prev @ res_a.cx.diff(d) @ pa).add(ib_prev @ res_b.cx.diff(d) @ pb)
        reserved[d] = (sa, dmat)
        parts[d] = (ia, ib, pa, pb)
        prev = (ia, ib)
    mods, diffs = _extend_to_resolution(alg, mods, diffs, module, aug, reserved, n_max)
    qcx = BddComplex(alg, mods, diffs, check=True)
    q = Resolution(qcx, module, aug)
    # inclusions of the two resolutions: reserved summands sit first
    incl_a_comps = {0: ia0}
    incl_b_comps = {0: ib0}
    quot_mods = {0: b0}
    quot_diffs = {}
    quot_proj = {0: pb0}
    for d in sorted(mods):
        if d == 0:
            continue
        ia, ib, pa, pb = parts.get(d, (None, None, None, None))
        full = mods[d]
        adim = res_a.cx.dim(d)
        bdim = res_b.cx.dim(d)
        # the reserved block occupies the first coordinates
        emb_a = Mat(full.dim, adim)
        for r in range(adim):
            emb_a.set_entry(r, r, Q(1))
        emb_b = Mat(full.dim, bdim)
        for r in range(bdim):
            emb_b.set_entry(adim + r, r, Q(1))
        if adim:
            incl_a_comps[d] = emb_a
        if bdim:
            incl_b_comps[d] = emb_b
        # quotient by the res_a block: remaining coordinates
        qdim = full.dim - adim
        if qdim:
            pr = Mat(qdim, full.dim)
            for r in range(qdim):
                pr.set_entry(r, adim + r, Q(1))
            quot_proj[d] = pr
            rest_acts = []
            for t in range(alg.dim):
                sub = Mat(qdim, qdim)
                for r in range(qdim):
                    for c in range(qdim):
                        sub.set_entry(r, c, full.acts[t].entry(adim + r, adim + c))
                rest_acts.append(sub)
            quot_mods[d] = FinMod(alg, qdim, rest_acts, check=False)
    for d in sorted(quot_mods):
        if d + 1 in quot_mods or d + 1 == 0:
            pr_up = quot_proj.get(d + 1)
            if pr_up is not None and d in mods:
                # induced differential on the quotient coordinates
                qd = Mat(pr_up.rows, quot_proj[d].rows)
                dm = qcx.diff(d)
                for c in range(quot_proj[d].rows):
                    src = quot_proj[d]
                    # lift the c-th quotient basis vector: complement coordinates
                    lift_vec = [Q(0)] * mods[d].dim
                    adim = res_a.cx.dim(d)
                    lift_vec[adim + c] = Q(1)
                    img = dm.matvec(tuple(lift_vec))
                    red = pr_up.matvec(img)
                    for r, v in enumerate(red):
                        if v:
                            qd.set_entry(r, c, v)
                if not qd.is_zero():
                    quot_diffs[d] = qd
    quot = BddComplex(alg, quot_mods, quot_diffs, check=True)
    incl_a = ChainMapM(res_a.cx, qcx, incl_a_comps, check=True)
    incl_b = ChainMapM(res_b.cx, qcx, incl_b_comps, check=True)
    # verify split exactness of the row degreewise and quasi-isomorphisms
    for d in mods:
        adim = res_a.cx.dim(d)
        if adim + quot.dim(d) != mods[d].dim:
            raise PipelineError("row is not degreewise exact")
    if not incl_a.is_quasi_iso() or not incl_b.is_quasi_iso():
        raise PipelineError("inclusion into the combined resolution is not a quasi-iso")
    if quot.underlying().betti() != {}:
        raise PipelineError("quotient of the combined resolution is not acyclic")
    return q, incl_a, incl_b, quot


# --- cone comparison -----------------------------------------------------------------


def cone_comparison(j1: ChainMapM):
    """The comparison dgLa between the endomorphisms of two
    quasi-isomorphic complexes: lower-triangular endomorphisms of the
    mapping cone, projecting onto both endomorphism dgLas with acyclic
    kernels. Returns a dict with the dgla, both projections, and the
    verdicts."""
    if not j1.is_quasi_iso():
        raise PipelineError("the comparison map must be a quasi-isomorphism")
    e, qq = j1.source, j1.target
    cone, incl_q = cone_complex(j1)
    d_g, incl_end, end_cone, book = sub_preserving_dgla(incl_q)
    end_e, book_e = end_dgla_of_complex(e, label="End(source)")
    end_q, book_q = end_dgla_of_complex(qq, label="End(target)")
    # block data of the cone
    eshift = {d: e.dim(d + 1) for d in cone.mods}

    def proj_mats(which):
        out = {}
        for p in sorted(d_g.dims):
            tgt_book = book_e if which == "e" else book_q
            m = Mat(tgt_book.dim(p), d_g.dim(p))
            for j in range(d_g.dim(p)):
                v = incl_end.mats[p].col(j) if p in incl_end.mats else vzero(book.dim(p))
                mats = book.to_mats(p, v)
                blocks = {}
                for i, t in mats.items():
                    es, qs = eshift.get(i, 0), cone.dim(i) - eshift.get(i, 0)
                    est, qst = eshift.get(i + p, 0), cone.dim(i + p) - eshift.get(i + p, 0)
                    if which == "e":
                        # upper-left block, acting on the shifted source
                        if es and est:
                            blk = Mat(e.dim(i + p + 1), e.dim(i + 1))
                            for r in range(est):
                                for c in range(es):
                                    val = t.entry(r, c)
                                    if val:
                                        blk.set_entry(r, c, val)
                            if not blk.is_zero():
                                blocks[i + 1] = blocks.get(
                                    i + 1, Mat(blk.rows, blk.cols)
                                ).add(blk)
                    else:
                        if qs and qst:
                            blk = Mat(qq.dim(i + p), qq.dim(i))
                            for r in range(qst):
                                for c in range(qs):
                                    val = t.entry(est + r, es + c)
                                    if val:
                                        blk.set_entry(r, c, val)
                            if not blk.is_zero():
                                blocks[i] = blocks.get(i, Mat(blk.rows, blk.cols)).add(blk)
                coords = tgt_book.coords(p, blocks)
                sgn = Q(-1) if (which == "e" and p % 2) else Q(1)
                for r, c in enumerate(coords):
                    if c:
                        m.set_entry(r, j, c * sgn)
            if not m.is_zero():
                out[p] = m
        return out

    pi2 = DglaMap(d_g, end_q, proj_mats("q"), check=True)
    pi1 = DglaMap(d_g, end_e, proj_mats("e"), check=True)

    def surjective(dm: DglaMap):
        return all(dm.mat(p).rank() == dm.target.dim(p) for p in dm.target.dims)

    def kernel_acyclic(dm: DglaMap):
        dims = {}
        bases = {}
        for p in d_g.dims:
            kb = dm.mat(p).kernel_basis()
            bases[p] = kb
            if kb:
                dims[p] = len(kb)
        diffs = {}
        for p, kb in bases.items():
            nxt = bases.get(p + 1, [])
            if not nxt or not kb:
                for v in kb:
                    if not vis_zero(d_g.diff(p).matvec(v)):
                        raise PipelineError("projection kernel is not a subcomplex")
                continue
            mat_next = Mat.from_cols(nxt, rows=d_g.dim(p + 1))
            dd = Mat(len(nxt), len(kb))
            for j, v in enumerate(kb):
                sol = mat_next.solve(d_g.diff(p).matvec(v))
                if sol is None:
                    raise PipelineError("projection kernel is not a subcomplex")
                for r, c in enumerate(sol[0]):
                    if c:
                        dd.set_entry(r, j, c)
            if not dd.is_zero():
                diffs[p] = dd
        return ChainComplexQ(dims, diffs, check=True).betti() == {}

    return {
        "dgla": d_g,
        "pi1": pi1,
        "pi2": pi2,
        "pi1_surjective": surjective(pi1),
        "pi2_surjective": surjective(pi2),
        "pi1_kernel_acyclic": kernel_acyclic(pi1),
        "pi2_kernel_acyclic": kernel_acyclic(pi2),
    }


# --- the two-level diagram of a morphism ------------------------------------------------


def build_H(res_f: Resolution, res_g: Resolution, lift: ChainMapM, n_opens: int = 1) -> ScDgla:
    """The two-level diagram controlling deformations of the morphism:
    level 0 the endomorphisms of the two resolutions together with the
    endomorphisms of their direct sum preserving the graph of the lift,
    level 1 the endomorphisms of the direct sum; one face includes the
    pair as a block-diagonal, the other includes the graph-preserving
    part. A zero tail makes the diagram three levels deep. With two
    synthetic opens both levels double and carry identity gluings in
    their metadata."""
    if n_opens not in (1, 2):
        raise PipelineError("only one or two synthetic opens are supported")
    graph, emb, ambient, _ = graph_complex(lift)
    l_g, l_incl, end_s, book_s = sub_preserving_dgla(emb)
    end_f, book_f = end_dgla_of_complex(res_f.cx, label="End(source res)")
    end_g, book_g = end_dgla_of_complex(res_g.cx, label="End(target res)")
    level0, injs, projs = direct_sum([end_f, end_g, l_g])

    # block-diagonal inclusion of the End pair
    sum_parts = {}
    for d in ambient.mods:
        fdim = res_f.cx.dim(d)
        i_f = Mat(ambient.dim(d), fdim)
        for r in range(fdim):
            i_f.set_entry(r, r, Q(1))
        gdim = res_g.cx.dim(d)
        i_g = Mat(ambient.dim(d), gdim)
        for r in range(gdim):
            i_g.set_entry(fdim + r, r, Q(1))
        sum_parts[d] = (i_f, i_g)

    def pair_face_mats():
        out = {}
        for p in level0.dims:
            m = Mat(end_s.dim(p), level0.dim(p))
            for which, (end_part, book_part) in (
                (0, (end_f, book_f)),
                (1, (end_g, book_g)),
            ):
                pm = projs[which].mat(p)
                for j in range(level0.dim(p)):
                    v = pm.col(j)
                    if vis_zero(v):
                        continue
                    mats = book_part.to_mats(p, v)
                    big = {}
                    for i, t in mats.items():
                        i_src = sum_parts[i][which]
                        i_tgt = sum_parts[i + p][which]
                        blk = i_tgt @ t @ _left_inverse(i_src)
                        big[i] = big.get(i, Mat(blk.rows, blk.cols)).add(blk)
                    coords = book_s.coords(p, big)
                    for r, c in enumerate(coords):
                        if c:
                            m.set_entry(r, j, m.entry(r, j) + c)
            out[p] = m
        return out

    f0_mats = pair_face_mats()
    f1_mats = {}
    for p in level0.dims:
        m = Mat(end_s.dim(p), level0.dim(p))
        lm = l_incl.mats.get(p)
        pm = projs[2].mat(p)
        if lm is not None:
            prod = lm @ pm
            for r in range(prod.rows):
                for c in range(prod.cols):
                    v = prod.entry(r, c)
                    if v:
                        m.set_entry(r, c, v)
        f1_mats[p] = m
    face0 = DglaMap(level0, end_s, f0_mats, check=True)
    face1 = DglaMap(level0, end_s, f1_mats, check=True)

    from .builders import zero_dgla

    z = zero_dgla()
    if n_opens == 1:
        lv0, lv1 = level0, end_s
        cof = {
            (1, 0): face0,
            (1, 1): face1,
            (2, 0): DglaMap(end_s, z, {}, check=False),
            (2, 1): DglaMap(end_s, z, {}, check=False),
            (2, 2): DglaMap(end_s, z, {}, check=False),
        }
    else:
        lv0, i0, p0 = direct_sum([level0, level0])
        lv1, i1, p1 = direct_sum([end_s, end_s])

        def doubled(face):
            mats = {}
            for p in lv0.dims:
                m = Mat(lv1.dim(p), lv0.dim(p))
                for k in (0, 1):
                    prod = i1[k].mat(p) @ face.mat(p) @ p0[k].mat(p)
                    m = m.add(prod)
                mats[p] = m
            return DglaMap(lv0, lv1, mats, check=True)

        cof = {
            (1, 0): doubled(face0),
            (1, 1): doubled(face1),
            (2, 0): DglaMap(lv1, z, {}, check=False),
            (2, 1): DglaMap(lv1, z, {}, check=False),
            (2, 2): DglaMap(lv1, z, {}, check=False),
        }
    sc = ScDgla([lv0, lv1, z], cof, check=True, label="morphism diagram")
    sc.meta.update(
        {
            "opens": n_opens,
            "single_level0": level0,
            "single_level1": end_s,
            "face0": face0,
            "face1": face1,
            "level0_injs": injs,
            "level0_projs": projs,
            "books": {"F": book_f, "G": book_g, "S": book_s},
            "ends": {"F": end_f, "G": end_g, "L": l_g},
            "l_inclusion": l_incl,
            "sum_parts": sum_parts,
            "resolutions": (res_f, res_g),
            "lift": lift,
        }
    )
    return sc


def _left_inverse(m: Mat) -> Mat:
    """Left inverse of an injective coordinate inclusion built from unit
    columns."""
    out = Mat(m.cols, m.rows)
    for c in range(m.cols):
        for r in range(m.rows):
            if m.entry(r, c) == Q(1):
                out.set_entry(c, r, Q(1))
                break
    return out


def h_cohomology(sc: ScDgla) -> dict:
    """Cohomology dimensions of the totalisation of the two-level
    diagram, computed from the shifted cone of the face difference; for
    two synthetic opens the levelwise totals take one Čech step over the
    identity gluings first."""
    opens = sc.meta.get("opens", 1)
    if opens == 1:
        tot, _ = total_complex(sc)
        return {d: h for d, h in tot.betti().items()}
    level0 = sc.meta["single_level0"]
    end_s = sc.meta["single_level1"]
    face0, face1 = sc.meta["face0"], sc.meta["face1"]

    # slots per total degree: (level j, cech c) with internal degree
    # n - j - c; differential = internal d, si face difference, and the
    # overlap difference, with alternating signs fixed by the d^2 check.
    def slot_dims(n):
        out = {}
        for j, c, g in ((0, 0, level0), (0, 1, level0), (1, 0, end_s), (1, 1, end_s)):
            k = n - j - c
            mult = 2 if c == 0 else 1
            d = g.dim(k) * mult
            if d:
                out[(j, c)] = d
        return out

    degs = set()
    for g in (level0, end_s):
        for d in g.dims:
            degs.add(d)
            degs.add(d + 1)
            degs.add(d + 2)
    lo, hi = min(degs), max(degs)
    dims = {}
    offsets = {}
    for n in range(lo, hi + 1):
        sd = slot_dims(n)
        off = {}
        total = 0
        for key in sorted(sd):
            off[key] = total
            total += sd[key]
        if total:
            dims[n] = total
            offsets[n] = off
    diffs = {}
    for n in sorted(dims):
        if n + 1 not in dims:
            continue
        m = Mat(dims[n + 1], dims[n])
        offs, offt = offsets[n], offsets[n + 1]
        for (j, c), off in offs.items():
            k = n - j - c
            g = level0 if j == 0 else end_s
            face_mat0, face_mat1 = face0.mat(k), face1.mat(k)
            copies = 2 if c == 0 else 1
            gd = g.dim(k)
            for copy in range(copies):
                for col in range(gd):
                    src = off + copy * gd + col
                    # internal differential, sign (-1)^{j+c}
                    if (j, c) in offt:
                        sgn = Q(-1) if (j + c) % 2 else Q(1)
                        dm = g.diff(k)
                        for r in range(dm.rows):
                            v = dm.entry(r, col)
                            if v:
                                m.set_entry(
                                    offt[(j, c)] + copy * g.dim(k + 1) + r,
                                    src,
                                    v * sgn,
                                )
                    # face difference into level 1, same cech position
                    if j == 0 and (1, c) in offt:
                        for fm, s in ((face_mat0, Q(1)), (face_mat1, Q(-1))):
                            for r in range(fm.rows):
                                v = fm.entry(r, col)
                                if v:
                                    tgt = offt[(1, c)] + copy * end_s.dim(k) + r
                                    m.set_entry(tgt, src, m.entry(tgt, src) + v * s)
                    # cech difference into the overlap, sign (-1)^j to
                    # commute past the level direction
                    if c == 0 and (j, 1) in offt:
                        s = Q(-1) if copy == 0 else Q(1)
                        if j % 2:
                            s = -s
                        tgt0 = offt[(j, 1)]
                        m.set_entry(tgt0 + col, src, m.entry(tgt0 + col, src) + s)
        if not m.is_zero():
            diffs[n] = m
    cplx = ChainComplexQ(dims, diffs, check=True)
    return {d: h for d, h in cplx.betti().items()}


# --- the long exact sequence -----------------------------------------------------------


def les_check(sc: ScDgla) -> dict:
    """Exactness, junction by junction, of the sequence relating the
    totalisation cohomology to the Ext groups of the two modules: the
    explicit maps are (project to the End pair), (difference of push and
    pull along the lift), and (include as the corner block of the
    direct-sum endomorphisms one level up). Images and kernels are
    compared as subspaces, not merely by dimension."""
    if sc.meta.get("opens", 1) != 1:
        raise PipelineError("the junction checker runs on the one-open diagram")
    res_f, res_g = sc.meta["resolutions"]
    lift = sc.meta["lift"]
    level0 = sc.meta["single_level0"]
    end_f, end_g = sc.meta["ends"]["F"], sc.meta["ends"]["G"]
    book_s = sc.meta["books"]["S"]
    book_f, book_g = sc.meta["books"]["F"], sc.meta["books"]["G"]
    projs = sc.meta["level0_projs"]
    sum_parts = sc.meta["sum_parts"]
    tot, tb = total_complex(sc)
    cx_f = end_f.complex()
    cx_g = end_g.complex()
    cx_fg, book_fg = hom_complex(res_f.cx, res_g.cx)

    lift_comp = {d: lift.comp(d) for d in set(res_f.cx.mods)}

    def u_map(i):
        hdim, reps = tot.cohomology(i)
        nf = cx_f.cohomology(i)[0]
        ng = cx_g.cohomology(i)[0]
        m = Mat(nf + ng, hdim)
        for j, rep in enumerate(reps):
            x = [Q(0)] * level0.dim(i)
            for p, idx in tb.slots.get(i, []):
                if p == 0:
                    x[idx] = rep[tb.index(i, p, idx)]
            phi = projs[0].mat(i).matvec(vec(x))
            psi = projs[1].mat(i).matvec(vec(x))
            cf = cx_f.class_of(i, phi)
            cg = cx_g.class_of(i, psi)
            if cf is None or cg is None:
                raise PipelineError("projection of a cocycle failed to be closed")
            for r, c in enumerate(cf):
                if c:
                    m.set_entry(r, j, c)
            for r, c in enumerate(cg):
                if c:
                    m.set_entry(nf + r, j, c)
        return m

    def v_map(i):
        nf, reps_f = cx_f.cohomology(i)
        ng, reps_g = cx_g.cohomology(i)
        nfg = cx_fg.cohomology(i)[0]
        m = Mat(nfg, nf + ng)
        cols = [(rep, 0) for rep in reps_f] + [(rep, 1) for rep in reps_g]
        for j, (rep, side) in enumerate(cols):
            out = {}
            if side == 0:
                mats = book_f.to_mats(i, rep)
                for bi, t in mats.items():
                    lm = lift_comp.get(bi + i)
                    if lm is None or lm.rows == 0:
                        continue
                    prod = lm @ t
                    if not prod.is_zero():
                        out[bi] = out.get(bi, Mat(prod.rows, prod.cols)).add(
                            prod.scale(Q(-1))
                        )
            else:
                mats = book_g.to_mats(i, rep)
                for bi, t in mats.items():
                    lm = lift_comp.get(bi)
                    if lm is None or lm.rows == 0:
                        continue
                    prod = t @ lm
                    if not prod.is_zero():
                        out[bi] = out.get(bi, Mat(prod.rows, prod.cols)).add(prod)
            coords = book_fg.coords(i, out)
            cls = cx_fg.class_of(i, vec(coords) if coords else vzero(cx_fg.dim(i)))
            if cls is None:
                raise PipelineError("face difference of a cocycle failed to be closed")
            for r, c in enumerate(cls):
                if c:
                    m.set_entry(r, j, c)
        return m

    def theta_map(i):
        nfg, reps = cx_fg.cohomology(i)
        nh = tot.cohomology(i + 1)[0]
        m = Mat(nh, nfg)
        for j, rep in enumerate(reps):
            mats = book_fg.to_mats(i, rep)
            big = {}
            for bi, t in mats.items():
                i_f = sum_parts[bi][0]
                i_g = sum_parts[bi + i][1]
                blk = i_g @ t @ _left_inverse(i_f)
                if not blk.is_zero():
                    big[bi] = blk
            y = book_s.coords(i, big)
            w = [Q(0)] * tot.dim(i + 1)
            for p, idx in tb.slots.get(i + 1, []):
                if p == 1:
                    w[tb.index(i + 1, p, idx)] = y[idx]
            cls = tot.class_of(i + 1, vec(w))
            if cls is None:
                raise PipelineError("corner inclusion of a cocycle failed to be closed")
            for r, c in enumerate(cls):
                if c:
                    m.set_entry(r, j, c)
        return m

    lo = min(list(tot.dims) + [0]) - 1
    hi = max(list(tot.dims) + [0]) + 1
    junctions = []
    exact = True
    for i in range(lo, hi + 1):
        u_i = u_map(i)
        v_i = v_map(i)
        th_prev = theta_map(i - 1)
        th_i = theta_map(i)
        # junction at H^i(total): image of theta = kernel of u
        if tot.cohomology(i)[0]:
            im_th = Subspace.from_vectors(
                tot.cohomology(i)[0], [th_prev.col(j) for j in range(th_prev.cols)]
            )
            ker_u = Subspace.from_vectors(tot.cohomology(i)[0], u_i.kernel_basis())
            ok1 = im_th.eq(ker_u)
        else:
            ok1 = th_prev.cols == 0 or all(
                vis_zero(th_prev.col(j)) for j in range(th_prev.cols)
            )
        # junction at Ext^i(F,F) + Ext^i(G,G): image of u = kernel of v
        npair = u_i.rows
        if npair:
            im_u = Subspace.from_vectors(npair, [u_i.col(j) for j in range(u_i.cols)])
            ker_v = Subspace.from_vectors(npair, v_i.kernel_basis())
            ok2 = im_u.eq(ker_v)
        else:
            ok2 = True
        # junction at Ext^i(F,G): image of v = kernel of theta
        nfg = v_i.rows
        if nfg:
            im_v = Subspace.from_vectors(nfg, [v_i.col(j) for j in range(v_i.cols)])
            ker_th = Subspace.from_vectors(nfg, th_i.kernel_basis())
            ok3 = im_v.eq(ker_th)
        else:
            ok3 = True
        junctions.append(
            {
                "degree": i,
                "at_total": bool(ok1),
                "at_ext_pair": bool(ok2),
                "at_ext_hom": bool(ok3),
            }
        )
        exact = exact and ok1 and ok2 and ok3
    return {"exact": bool(exact), "junctions": junctions}


# --- orchestration -----------------------------------------------------------------------


def pipeline_report(fmod: FinMod, gmod: FinMod, alpha: Mat, n_opens: int = 1, n_max: int = 8) -> dict:
    """Run the whole chain on one morphism and collect every verdict."""
    res_g = resolve(gmod, n_max)
    res_f, lift = lift_morphism(alpha, fmod, gmod, res_g, n_max)
    sc = build_H(res_f, res_g, lift, n_opens=n_opens)
    hdims = h_cohomology(sc)
    ext_ff = ext_bruteforce(fmod, fmod, n_max)
    ext_gg = ext_bruteforce(gmod, gmod, n_max)
    ext_fg = ext_bruteforce(fmod, gmod, n_max)
    end_f = sc.meta["ends"]["F"]
    end_g = sc.meta["ends"]["G"]
    match = True
    for i, dim_expected in enumerate(ext_ff):
        if end_f.cohomology(i)[0] != dim_expected:
            match = False
    for i, dim_expected in enumerate(ext_gg):
        if end_g.cohomology(i)[0] != dim_expected:
            match = False
    out = {
        "schema": "pipeline-report/1",
        "algebra": fmod.alg.label,
        "source_dim": fmod.dim,
        "target_dim": gmod.dim,
        "morphism_rank": alpha.rank(),
        "opens": n_opens,
        "h_cohomology": {str(d): h for d, h in sorted(hdims.items())},
        "ext": {"FF": ext_ff, "GG": ext_gg, "FG": ext_fg},
        "end_matches_ext": match,
        "tangent_dim": hdims.get(1, 0),
        "obstruction_dim": hdims.get(2, 0),
    }
    if n_opens == 1:
        les = les_check(sc)
        out["les_exact"] = les["exact"]
        out["les_junctions"] = les["junctions"]
    return out


def report_markdown(report: dict) -> str:
    lines = [
        "# Morphism deformation report",
        "",
        f"- algebra: {report['algebra']}",
        f"- source dim {report['source_dim']}, target dim {report['target_dim']},"
        f" morphism rank {report['morphism_rank']}",
        f"- tangent dim {report['tangent_dim']},"
        f" obstruction dim {report['obstruction_dim']}",
        "",
        "| degree | H of totalisation |",
        "|---|---|",
    ]
    for d, h in report["h_cohomology"].items():
        lines.append(f"| {d} | {h} |")
    lines += [
        "",
        "| pair | Ext dims |",
        "|---|---|",
        f"| source, source | {report['ext']['FF']} |",
        f"| target, target | {report['ext']['GG']} |",
        f"| source, target | {report['ext']['FG']} |",
        "",
    ]
    if "les_exact" in report:
        lines.append(
            "long exact sequence: "
            + ("exact at every junction" if report["les_exact"] else "NOT exact")
        )
        lines.append("")
    lines.append(
        "Ext via endomorphism complexes matches the oracle: "
        + ("yes" if report["end_matches_ext"] else "NO")
    )
    return "\n".join(lines) + "\n"


# --- canonical and random instances --------------------------------------------------------


def a2_modules() -> dict:
    """The four indecomposables of the two-vertex quiver: both
    projectives, both simples (the second simple is projective)."""
    alg = a2_algebra()
    p1 = FinMod(
        alg,
        2,
        [Mat.from_rows([[1, 0], [0, 0]]), Mat.from_rows([[0, 0], [0, 1]]), Mat.from_rows([[0, 0], [1, 0]])],
        label="P1",
    )
    p2 = FinMod(alg, 1, [Mat.from_rows([[0]]), Mat.from_rows([[1]]), Mat.from_rows([[0]])], label="P2")
    s1 = FinMod(alg, 1, [Mat.from_rows([[1]]), Mat.from_rows([[0]]), Mat.from_rows([[0]])], label="S1")
    return {"alg": alg, "P1": p1, "P2": p2, "S1": s1, "S2": p2}


def a2_module(d1: int, d2: int, arrow: Mat) -> FinMod:
    """Representation of the quiver with spaces of the two dimensions
    and the given arrow matrix (d2 x d1)."""
    alg = a2_algebra()
    n = d1 + d2
    e1 = Mat(n, n)
    for r in range(d1):
        e1.set_entry(r, r, Q(1))
    e2 = Mat(n, n)
    for r in range(d2):
        e2.set_entry(d1 + r, d1 + r, Q(1))
    a = Mat(n, n)
    for r in range(d2):
        for c in range(d1):
            v = arrow.entry(r, c)
            if v:
                a.set_entry(d1 + r, c, v)
    return FinMod(alg, n, [e1, e2, a], label=f"rep({d1},{d2})")


def random_a2_module(rng: random.Random, dmax: int = 2) -> FinMod:
    d1 = rng.randrange(0, dmax + 1)
    d2 = rng.randrange(0, dmax + 1)
    if d1 + d2 == 0:
        d1 = 1
    arrow = Mat(d2, d1)
    for r in range(d2):
        for c in range(d1):
            arrow.set_entry(r, c, Q(rng.randrange(-2, 3)))
    return a2_module(d1, d2, arrow)


def random_module_map(m1: FinMod, m2: FinMod, rng: random.Random) -> Mat:
    basis = hom_basis(m1, m2)
    out = Mat(m2.dim, m1.dim)
    for b in basis:
        c = rng.randrange(-2, 3)
        if c:
            out = out.add(b.scale(Q(c)))
    return out


def canonical_morphisms() -> list:
    """The three canonical instances: the zero morphism, an identity,
    and the inclusion of a simple into a projective."""
    mods = a2_modules()
    p1, s1, s2 = mods["P1"], mods["S1"], mods["S2"]
    incl = hom_basis(s2, p1)[0]
    return [
        ("zero on simple", s1, s1, Mat(1, 1)),
        ("identity of projective", p1, p1, Mat.identity(2)),
        ("simple into projective", s2, p1, incl),
    ]
