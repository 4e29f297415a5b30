"""Differential graded Lie algebras over Q and their tensor elements.

A Dgla is bounded with a finite basis in each degree: differentials are
matrices, the bracket is a table of structure constants on basis pairs.
Construction validates graded antisymmetry, the Leibniz rule and the graded
Jacobi identity exactly (full sweep for small algebras, seeded sample above
a size threshold, controllable via the validate argument).

Computations happen in tensors L (x) A (x) Omega: an Elem is a sparse dict
keyed by (degree, basis index, coefficient-ring monomial, form monomial,
form differential mask). The coefficient ring is a local Artinian monomial
quotient (or nothing), the form slot a polynomial-forms algebra in named
variables (or nothing). Total degree = Lie degree + number of differentials
in the mask; the coefficient ring is inert degree 0.

Sign conventions (Lie factor first):
    d(l (x) w)          = dl (x) w + (-1)^{|l|} l (x) dw
    [l (x) w, l' (x) w'] = (-1)^{|w| |l'|} [l, l'] (x) (w ^ w')
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .artin import ArtinAlgebra
from .forms import fkey_d, fkey_mul
from .linalg import ChainComplexQ, Mat, Vec, vzero
from .ratio import Q, neg_one_pow, rat


class DglaError(ValueError):
    pass


def _norm_bracket_value(val):
    out = []
    for k, c in val:
        c = rat(c)
        if c != 0:
            out.append((int(k), c))
    out.sort()
    return tuple(out)


class Dgla:
    """Bounded dgLa over Q with chosen finite bases.

    dims:    {degree: dimension}, zero dims may be omitted
    diffs:   {degree: Mat or rows} for d : L^deg -> L^{deg+1}
    bracket: callable (d1, i, d2, j) -> iterable of (k, coeff), or a dict
             with those keys; missing swapped pairs are filled in from
             graded antisymmetry
    names:   optional {(degree, index): str} for printing
    validate: "full", "sample", "none" or "auto" (full below a size cutoff)
    """

    def __init__(
        self,
        dims: dict,
        diffs: dict,
        bracket,
        names=None,
        validate: str = "auto",
        label: str = "",
    ):
        self.dims = {int(d): int(n) for d, n in dims.items() if n}
        self.label = label
        self.diffs = {}
        for d, m in diffs.items():
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if m.rows != self.dim(d + 1) or m.cols != self.dim(d):
                raise DglaError(
                    f"differential at degree {d}: shape {m.rows}x{m.cols}, "
                    f"expected {self.dim(d + 1)}x{self.dim(d)}"
                )
            if not m.is_zero():
                self.diffs[int(d)] = m
        self._names = dict(names) if names else {}
        self._br: dict = {}
        pairs = [
            (d1, d2)
            for d1 in self.dims
            for d2 in self.dims
            if self.dim(d1 + d2) > 0
        ]
        if callable(bracket):
            for d1, d2 in pairs:
                for i in range(self.dim(d1)):
                    for j in range(self.dim(d2)):
                        val = _norm_bracket_value(bracket(d1, i, d2, j) or ())
                        self._check_targets(d1 + d2, val)
                        if val:
                            self._br[(d1, i, d2, j)] = val
        else:
            for (d1, i, d2, j), val in bracket.items():
                val = _norm_bracket_value(val)
                self._check_targets(d1 + d2, val)
                if val:
                    self._br[(d1, i, d2, j)] = val
            # fill missing orientation from graded antisymmetry
            for (d1, i, d2, j), val in list(self._br.items()):
                rev = (d2, j, d1, i)
                if rev not in self._br and (d1, i) != (d2, j):
                    sign = -neg_one_pow(d1 * d2)
                    self._br[rev] = tuple((k, sign * c) for k, c in val)
        self.validate(mode=validate)

    def _check_targets(self, deg: int, val):
        n = self.dim(deg)
        for k, _ in val:
            if not 0 <= k < n:
                raise DglaError(
                    f"bracket lands on index {k} in degree {deg} (dim {n})"
                )

    # --- basic structure ---------------------------------------------------

    def dim(self, deg: int) -> int:
        return self.dims.get(deg, 0)

    def degrees(self):
        return sorted(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def diff(self, deg: int) -> Mat:
        m = self.diffs.get(deg)
        return m if m is not None else Mat(self.dim(deg + 1), self.dim(deg))

    def name(self, deg: int, idx: int) -> str:
        return self._names.get((deg, idx), f"b[{deg},{idx}]")

    def bracket_basis(self, d1: int, i: int, d2: int, j: int):
        return self._br.get((d1, i, d2, j), ())

    def basis_keys(self):
        for d in self.degrees():
            for i in range(self.dim(d)):
                yield d, i

    def complex(self) -> ChainComplexQ:
        return ChainComplexQ(dict(self.dims), dict(self.diffs), check=False)

    def cohomology(self, deg: int):
        return self.complex().cohomology(deg)

    def __repr__(self):
        dd = ", ".join(f"{d}:{n}" for d, n in sorted(self.dims.items()))
        tag = f" {self.label!r}" if self.label else ""
        return f"Dgla({{{dd}}}{tag})"

    # --- validation ----------------------------------------------------

    def _bracket_vec(self, d1: int, v1: Vec, d2: int, v2: Vec) -> Vec:
        out = [Q(0)] * self.dim(d1 + d2)
        for i, a in enumerate(v1):
            if a == 0:
                continue
            for j, b in enumerate(v2):
                if b == 0:
                    continue
                for k, c in self.bracket_basis(d1, i, d2, j):
                    out[k] += a * b * c
        return tuple(out)

    def validate(self, mode: str = "full", seed: int = 0):
        """Check d^2 = 0, graded antisymmetry, Leibniz and Jacobi.

        Raises DglaError on the first violation. mode "sample" checks a
        seeded random subset of triples; "auto" switches to sampling when
        the total dimension is large; "none" skips everything.
        """
        if mode == "none":
            return
        if mode == "auto":
            mode = "full" if self.total_dim <= 16 else "sample"
        for d in self.degrees():
            if self.dim(d + 2):
                prod = self.diff(d + 1) @ self.diff(d)
                if not prod.is_zero():
                    raise DglaError(f"d^2 != 0 at degree {d}")
        keys = list(self.basis_keys())
        rng = random.Random(seed)
        if mode == "full":
            pair_iter = [(a, b) for a in keys for b in keys]
        else:
            pair_iter = [
                (rng.choice(keys), rng.choice(keys)) for _ in range(400)
            ]
        for (d1, i), (d2, j) in pair_iter:
            val = self.bracket_basis(d1, i, d2, j)
            # antisymmetry
            rev = self.bracket_basis(d2, j, d1, i)
            sign = -neg_one_pow(d1 * d2)
            if dict(rev) != {k: sign * c for k, c in val}:
                raise DglaError(
                    f"bracket not graded-antisymmetric on "
                    f"{self.name(d1, i)}, {self.name(d2, j)}"
                )
            # Leibniz: d[x,y] = [dx,y] + (-1)^{|x|} [x,dy]
            tgt = d1 + d2
            if self.dim(tgt + 1):
                lhs = [Q(0)] * self.dim(tgt + 1)
                dm = self.diff(tgt)
                for k, c in val:
                    for r in range(dm.rows):
                        e = dm.entry(r, k)
                        if e:
                            lhs[r] += c * e
                rhs = [Q(0)] * self.dim(tgt + 1)
                dx = self.diff(d1).col(i) if self.dim(d1 + 1) else ()
                for r, e in enumerate(dx):
                    if e:
                        for k, c in self.bracket_basis(d1 + 1, r, d2, j):
                            rhs[k] += e * c
                dy = self.diff(d2).col(j) if self.dim(d2 + 1) else ()
                sgn = neg_one_pow(d1)
                for r, e in enumerate(dy):
                    if e:
                        for k, c in self.bracket_basis(d1, i, d2 + 1, r):
                            rhs[k] += sgn * e * c
                if lhs != rhs:
                    raise DglaError(
                        f"Leibniz fails on {self.name(d1, i)}, {self.name(d2, j)}"
                    )
        if mode == "full":
            triple_iter = [(a, b, c) for a in keys for b in keys for c in keys]
        else:
            triple_iter = [
                (rng.choice(keys), rng.choice(keys), rng.choice(keys))
                for _ in range(400)
            ]
        for (d1, i), (d2, j), (d3, k) in triple_iter:
            if self.dim(d1 + d2 + d3) == 0:
                continue
            # [x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]
            n = self.dim(d1 + d2 + d3)
            lhs = [Q(0)] * n
            for m, c in self.bracket_basis(d2, j, d3, k):
                for r, e in self.bracket_basis(d1, i, d2 + d3, m):
                    lhs[r] += c * e
            rhs = [Q(0)] * n
            for m, c in self.bracket_basis(d1, i, d2, j):
                for r, e in self.bracket_basis(d1 + d2, m, d3, k):
                    rhs[r] += c * e
            sgn = neg_one_pow(d1 * d2)
            for m, c in self.bracket_basis(d1, i, d3, k):
                for r, e in self.bracket_basis(d2, j, d1 + d3, m):
                    rhs[r] += sgn * c * e
            if lhs != rhs:
                raise DglaError(
                    f"Jacobi fails on {self.name(d1, i)}, "
                    f"{self.name(d2, j)}, {self.name(d3, k)}"
                )


@dataclass(frozen=True)
class TensorCtx:
    """Ambient for computations: dgLa, coefficient ring, form variables."""

    dgla: Dgla
    artin: ArtinAlgebra | None = None
    form_vars: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "form_vars", tuple(self.form_vars))

    @property
    def nforms(self) -> int:
        return len(self.form_vars)

    def unit_mono(self):
        return self.artin.unit if self.artin else ()

    def compatible(self, other: "TensorCtx") -> bool:
        return (
            self.dgla is other.dgla
            and (
                self.artin is other.artin
                or (self.artin is not None and self.artin == other.artin)
            )
            and self.form_vars == other.form_vars
        )

    def with_vars(self, form_vars) -> "TensorCtx":
        return TensorCtx(self.dgla, self.artin, tuple(form_vars))

    def zero(self) -> "Elem":
        return Elem(self, {})

    def term(self, deg, idx, coeff=1, amono=None, pmono=None, dmask=()) -> "Elem":
        if amono is None:
            amono = self.unit_mono()
        if pmono is None:
            pmono = (0,) * self.nforms
        key = (int(deg), int(idx), tuple(amono), tuple(pmono), tuple(sorted(dmask)))
        return Elem(self, {key: rat(coeff)})

    def from_lie_vec(self, deg, v, amono=None, pmono=None, dmask=()) -> "Elem":
        out = self.zero()
        for i, c in enumerate(v):
            if rat(c) != 0:
                out = out.add(self.term(deg, i, c, amono, pmono, dmask))
        return out


class Elem:
    """Sparse tensor L (x) A (x) Omega element.

    terms: {(deg, idx, amono, pmono, dmask): Q}. Do not mutate in place;
    all operations return fresh elements.
    """

    __slots__ = ("ctx", "terms")

    def __init__(self, ctx: TensorCtx, terms: dict):
        self.ctx = ctx
        self.terms = {k: v for k, v in terms.items() if v != 0}

    # --- linear structure -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def add(self, other: "Elem") -> "Elem":
        self._chk(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, Q(0)) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        return Elem(self.ctx, out)

    def sub(self, other: "Elem") -> "Elem":
        return self.add(other.scale(-1))

    def scale(self, c) -> "Elem":
        c = rat(c)
        if c == 0:
            return Elem(self.ctx, {})
        return Elem(self.ctx, {k: c * v for k, v in self.terms.items()})

    def neg(self) -> "Elem":
        return self.scale(-1)

    def eq(self, other: "Elem") -> bool:
        self._chk(other)
        return self.terms == other.terms

    def _chk(self, other: "Elem"):
        if not self.ctx.compatible(other.ctx):
            raise DglaError("elements live in different contexts")

    # --- degree bookkeeping -------------------------------------------------

    def total_degrees(self) -> set:
        return {d + len(S) for (d, _, _, _, S) in self.terms}

    def is_homogeneous(self, deg: int) -> bool:
        return all(d + len(S) == deg for (d, _, _, _, S) in self.terms)

    def component_total(self, deg: int) -> "Elem":
        return Elem(
            self.ctx,
            {k: c for k, c in self.terms.items() if k[0] + len(k[4]) == deg},
        )

    def min_artin_level(self) -> int | None:
        """Smallest coefficient-monomial degree present; None for 0."""
        if not self.terms:
            return None
        return min(sum(k[2]) for k in self.terms)

    def artin_level_component(self, level: int) -> "Elem":
        return Elem(
            self.ctx, {k: c for k, c in self.terms.items() if sum(k[2]) == level}
        )

    def artin_levels(self) -> set:
        return {sum(k[2]) for k in self.terms}

    # --- dgLa operations ----------------------------------------------------

    def d(self) -> "Elem":
        L = self.ctx.dgla
        out: dict = {}

        def bump(key, c):
            v = out.get(key, Q(0)) + c
            if v == 0:
                out.pop(key, None)
            else:
                out[key] = v

        for (deg, idx, am, pm, S), c in self.terms.items():
            dm = L.diffs.get(deg)
            if dm is not None:
                for r in range(dm.rows):
                    e = dm.entry(r, idx)
                    if e:
                        bump((deg + 1, r, am, pm, S), c * e)
            sgn = neg_one_pow(deg)
            for m, np_, nS in fkey_d(pm, S):
                bump((deg, idx, am, np_, nS), c * m * sgn)
        return Elem(self.ctx, out)

    def bracket(self, other: "Elem") -> "Elem":
        self._chk(other)
        L = self.ctx.dgla
        A = self.ctx.artin
        out: dict = {}
        for (d1, i1, a1, p1, S1), c1 in self.terms.items():
            for (d2, i2, a2, p2, S2), c2 in other.terms.items():
                val = L.bracket_basis(d1, i1, d2, i2)
                if not val:
                    continue
                if A is not None:
                    am = A.mono_mul(a1, a2)
                    if am is None:
                        continue
                else:
                    am = ()
                r = fkey_mul(p1, S1, p2, S2)
                if r is None:
                    continue
                pm, S, fsign = r
                koszul = neg_one_pow(len(S1) * d2)
                base = c1 * c2 * fsign * koszul
                for k, c in val:
                    key = (d1 + d2, k, am, pm, S)
                    v = out.get(key, Q(0)) + base * c
                    if v == 0:
                        out.pop(key, None)
                    else:
                        out[key] = v
        return Elem(self.ctx, out)

    # --- form-slot manipulation ----------------------------------------------

    def form_subst(self, images: list, new_vars) -> "Elem":
        """Substitute form variables; images[i] is a polynomial dict in the
        new variables (see forms.f_subst). Lie and coefficient slots ride
        along untouched."""
        from .forms import f_d, f_mul, f_scale, poly_pow

        new_vars = tuple(new_vars)
        nctx = self.ctx.with_vars(new_vars)
        m = len(new_vars)
        d_imgs = [f_d(img) for img in images]
        unit = {((0,) * m, ()): Q(1)}
        out: dict = {}
        pcache: dict = {}
        for (deg, idx, am, pm, S), c in self.terms.items():
            if pm in pcache:
                poly = pcache[pm]
            else:
                poly = unit
                for i, e in enumerate(pm):
                    if e:
                        poly = f_mul(poly, poly_pow(images[i], e, m))
                pcache[pm] = poly
            form = poly
            for i in S:
                form = f_mul(form, d_imgs[i])
            for (np_, nS), fc in f_scale(c, form).items():
                key = (deg, idx, am, np_, nS)
                v = out.get(key, Q(0)) + fc
                if v == 0:
                    out.pop(key, None)
                else:
                    out[key] = v
        return Elem(nctx, out)

    def subs_values(self, values: dict) -> "Elem":
        """Pull back along var_i := constant for i in values: terms carrying
        the differential of a substituted variable vanish (the image has
        zero differential). Remaining variables keep their order."""
        from .forms import f_const, f_var

        keep = [i for i in range(self.ctx.nforms) if i not in values]
        new_vars = tuple(self.ctx.form_vars[i] for i in keep)
        m = len(keep)
        pos = {v: p for p, v in enumerate(keep)}
        images = []
        for i in range(self.ctx.nforms):
            if i in values:
                images.append(f_const(values[i], m))
            else:
                images.append(f_var(pos[i], m))
        return self.form_subst(images, new_vars)

    def lie_vector(self, deg: int, amono, pmono=None, dmask=()) -> Vec:
        """Coefficient vector in L^deg of a fixed (monomial, form) slot."""
        if pmono is None:
            pmono = (0,) * self.ctx.nforms
        key_tail = (tuple(amono), tuple(pmono), tuple(sorted(dmask)))
        n = self.ctx.dgla.dim(deg)
        v = [Q(0)] * n
        for (d, i, am, pm, S), c in self.terms.items():
            if d == deg and (am, pm, S) == key_tail:
                v[i] = c
        return tuple(v)

    def form_slots(self) -> set:
        return {(pm, S) for (_, _, _, pm, S) in self.terms}

    def map_lie(self, dmap: "DglaMap") -> "Elem":
        """Push forward along a dgLa map, keeping the other slots."""
        if dmap.source is not self.ctx.dgla:
            raise DglaError("map source does not match element context")
        nctx = TensorCtx(dmap.target, self.ctx.artin, self.ctx.form_vars)
        out: dict = {}
        for (deg, idx, am, pm, S), c in self.terms.items():
            m = dmap.mat(deg)
            for r in range(m.rows):
                e = m.entry(r, idx)
                if e:
                    key = (deg, r, am, pm, S)
                    v = out.get(key, Q(0)) + c * e
                    if v == 0:
                        out.pop(key, None)
                    else:
                        out[key] = v
        return Elem(nctx, out)

    def __repr__(self):
        if not self.terms:
            return "Elem(0)"
        L = self.ctx.dgla
        A = self.ctx.artin
        names = self.ctx.form_vars
        parts = []
        for (deg, idx, am, pm, S), c in sorted(self.terms.items()):
            fs = []
            if A is not None and am != A.unit:
                fs.append(A.mono_str(am))
            for i, e in enumerate(pm):
                if e == 1:
                    fs.append(names[i])
                elif e > 1:
                    fs.append(f"{names[i]}^{e}")
            for i in S:
                fs.append(f"d{names[i]}")
            body = "*".join([L.name(deg, idx)] + fs)
            parts.append(f"({c})*{body}")
        return " + ".join(parts)


class DglaMap:
    """Map of dgLas: degreewise matrices commuting with d and brackets."""

    def __init__(self, source: Dgla, target: Dgla, mats: dict, check: bool = True):
        self.source = source
        self.target = target
        self.mats = {}
        for d, m in mats.items():
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if m.rows != target.dim(d) or m.cols != source.dim(d):
                raise DglaError(f"map shape mismatch at degree {d}")
            if not m.is_zero():
                self.mats[int(d)] = m
        if check:
            self.validate()

    def mat(self, deg: int) -> Mat:
        m = self.mats.get(deg)
        return m if m is not None else Mat(self.target.dim(deg), self.source.dim(deg))

    def validate(self):
        for d in self.source.degrees():
            lhs = self.target.diff(d) @ self.mat(d)
            rhs = self.mat(d + 1) @ self.source.diff(d)
            if lhs != rhs:
                raise DglaError(f"map does not commute with d at degree {d}")
        for d1, i in self.source.basis_keys():
            for d2, j in self.source.basis_keys():
                if self.target.dim(d1 + d2) == 0 and self.source.dim(d1 + d2) == 0:
                    continue
                lhs = [Q(0)] * self.target.dim(d1 + d2)
                m = self.mat(d1 + d2)
                for k, c in self.source.bracket_basis(d1, i, d2, j):
                    for r in range(m.rows):
                        e = m.entry(r, k)
                        if e:
                            lhs[r] += c * e
                rhs = [Q(0)] * self.target.dim(d1 + d2)
                mi = self.mat(d1)
                mj = self.mat(d2)
                for r1 in range(mi.rows):
                    a = mi.entry(r1, i)
                    if not a:
                        continue
                    for r2 in range(mj.rows):
                        b = mj.entry(r2, j)
                        if not b:
                            continue
                        for k, c in self.target.bracket_basis(d1, r1, d2, r2):
                            rhs[k] += a * b * c
                if lhs != rhs:
                    raise DglaError(
                        f"map is not a Lie homomorphism on "
                        f"({d1},{i}), ({d2},{j})"
                    )

    def compose(self, inner: "DglaMap") -> "DglaMap":
        if inner.target is not self.source:
            raise DglaError("composition mismatch")
        degs = set(inner.source.dims)
        mats = {d: self.mat(d) @ inner.mat(d) for d in degs}
        return DglaMap(inner.source, self.target, mats, check=False)

    @classmethod
    def identity(cls, L: Dgla) -> "DglaMap":
        return cls(L, L, {d: Mat.identity(n) for d, n in L.dims.items()}, check=False)

    def eq(self, other: "DglaMap") -> bool:
        if self.source is not other.source or self.target is not other.target:
            return False
        degs = set(self.mats) | set(other.mats)
        return all(self.mat(d) == other.mat(d) for d in degs)


def direct_sum(parts: list) -> tuple:
    """Direct sum of dgLas. Returns (sum, injections, projections)."""
    degs = set()
    for p in parts:
        degs |= set(p.dims)
    offs = {}
    dims = {}
    for d in degs:
        off = []
        tot = 0
        for p in parts:
            off.append(tot)
            tot += p.dim(d)
        offs[d] = off
        if tot:
            dims[d] = tot
    diffs = {}
    for d in degs:
        rows, cols = dims.get(d + 1, 0), dims.get(d, 0)
        m = Mat(rows, cols)
        for pi, p in enumerate(parts):
            dm = p.diff(d)
            ro = offs.get(d + 1, [0] * len(parts))[pi]
            co = offs[d][pi]
            for r in range(dm.rows):
                for cc, v in dm._rows[r].items():
                    m.set_entry(ro + r, co + cc, v)
        if rows and cols and not m.is_zero():
            diffs[d] = m

    idx_of = {}
    for d in degs:
        for pi, p in enumerate(parts):
            for i in range(p.dim(d)):
                idx_of[(d, offs[d][pi] + i)] = (pi, i)

    def brk(d1, i, d2, j):
        p1, i1 = idx_of[(d1, i)]
        p2, j2 = idx_of[(d2, j)]
        if p1 != p2:
            return ()
        off = offs.get(d1 + d2)
        if off is None:
            return ()
        return [
            (off[p1] + k, c) for k, c in parts[p1].bracket_basis(d1, i1, d2, j2)
        ]

    names = {}
    for d in degs:
        for pi, p in enumerate(parts):
            for i in range(p.dim(d)):
                names[(d, offs[d][pi] + i)] = f"{pi}:{p.name(d, i)}"
    total = Dgla(dims, diffs, brk, names=names, validate="none")
    injs = []
    projs = []
    for pi, p in enumerate(parts):
        imats = {}
        pmats = {}
        for d in degs:
            n = p.dim(d)
            if n == 0:
                continue
            im = Mat(dims.get(d, 0), n)
            pm = Mat(n, dims.get(d, 0))
            for i in range(n):
                im.set_entry(offs[d][pi] + i, i, 1)
                pm.set_entry(i, offs[d][pi] + i, 1)
            imats[d] = im
            pmats[d] = pm
        injs.append(DglaMap(p, total, imats, check=False))
        projs.append(DglaMap(total, p, pmats, check=False))
    return total, injs, projs


# --- standard examples ----------------------------------------------------


def abelian_dgla(dims: dict, diffs: dict | None = None, label: str = "") -> Dgla:
    return Dgla(dims, diffs or {}, lambda *a: (), label=label or "abelian")


class EndBasis:
    """Bookkeeping for the endomorphism dgLa of a bounded complex: in each
    degree p the basis is the matrix units of Hom(C^i, C^{i+p}) over all i."""

    def __init__(self, cx: ChainComplexQ):
        self.cx = cx
        self.by_deg: dict = {}
        self.lookup: dict = {}
        for p in range(
            min(cx.dims, default=0) - max(cx.dims, default=0),
            max(cx.dims, default=0) - min(cx.dims, default=0) + 1,
        ):
            units = []
            for i in sorted(cx.dims):
                if cx.dim(i) and cx.dim(i + p):
                    for r in range(cx.dim(i + p)):
                        for c in range(cx.dim(i)):
                            self.lookup[(i, p, r, c)] = (p, len(units))
                            units.append((i, r, c))
            if units:
                self.by_deg[p] = units

    def dims(self) -> dict:
        return {p: len(u) for p, u in self.by_deg.items()}

    def unit(self, deg: int, idx: int):
        """(source degree, row, col) of a basis endomorphism."""
        return self.by_deg[deg][idx]

    def index(self, i: int, p: int, r: int, c: int):
        got = self.lookup.get((i, p, r, c))
        return got[1] if got else None


def end_dgla(cx: ChainComplexQ, label: str = "") -> tuple:
    """Endomorphism dgLa of a bounded complex: degree-p part Hom(C, C[p]),
    differential phi -> d phi - (-1)^p phi d, bracket the graded commutator.
    Returns (Dgla, EndBasis)."""
    eb = EndBasis(cx)
    dims = eb.dims()

    def compose(p1, i1, r1, c1, p2, i2, r2, c2):
        # unit1 . unit2 as a basis unit of degree p1 + p2, or None
        if i2 + p2 != i1 or c1 != r2:
            return None
        return (i2, p1 + p2, r1, c2)

    diffs = {}
    for p, units in eb.by_deg.items():
        rows = len(eb.by_deg.get(p + 1, ()))
        if rows == 0:
            continue
        m = Mat(rows, len(units))
        for j, (i, r, c) in enumerate(units):
            dm = cx.diff(i + p)
            for rr in range(dm.rows):
                v = dm.entry(rr, r)
                if v:
                    idx = eb.index(i, p + 1, rr, c)
                    if idx is not None:
                        m.set_entry(idx, j, m.entry(idx, j) + v)
            dm2 = cx.diff(i - 1)
            sgn = -neg_one_pow(p)
            for cc in range(dm2.cols):
                v = dm2.entry(c, cc)
                if v:
                    idx = eb.index(i - 1, p + 1, r, cc)
                    if idx is not None:
                        m.set_entry(idx, j, m.entry(idx, j) + sgn * v)
        if not m.is_zero():
            diffs[p] = m

    def brk(p1, a, p2, b):
        i1, r1, c1 = eb.unit(p1, a)
        i2, r2, c2 = eb.unit(p2, b)
        out: dict = {}
        comp = compose(p1, i1, r1, c1, p2, i2, r2, c2)
        if comp is not None:
            idx = eb.index(comp[0], comp[1], comp[2], comp[3])
            if idx is not None:
                out[idx] = out.get(idx, 0) + 1
        comp = compose(p2, i2, r2, c2, p1, i1, r1, c1)
        if comp is not None:
            idx = eb.index(comp[0], comp[1], comp[2], comp[3])
            if idx is not None:
                out[idx] = out.get(idx, 0) - neg_one_pow(p1 * p2)
        return [(k, v) for k, v in out.items() if v]

    names = {}
    for p, units in eb.by_deg.items():
        for j, (i, r, c) in enumerate(units):
            names[(p, j)] = f"E({i}->{i + p})[{r},{c}]"
    L = Dgla(dims, diffs, brk, names=names, validate="none", label=label or "end")
    return L, eb


def sl2() -> Dgla:
    """sl_2 in degree 0 with basis e, h, f and zero differential."""
    table = {
        ("h", "e"): [("e", 2)],
        ("h", "f"): [("f", -2)],
        ("e", "f"): [("h", 1)],
    }
    order = {"e": 0, "h": 1, "f": 2}

    def brk(d1, i, d2, j):
        n1 = "ehf"[i]
        n2 = "ehf"[j]
        if (n1, n2) in table:
            return [(order[k], c) for k, c in table[(n1, n2)]]
        if (n2, n1) in table:
            return [(order[k], -c) for k, c in table[(n2, n1)]]
        return ()

    names = {(0, 0): "e", (0, 1): "h", (0, 2): "f"}
    return Dgla({0: 3}, {}, brk, names=names, label="sl2")


def elem_base_change(f, e: "Elem") -> "Elem":
    """Push every coefficient of an element forward along a local algebra
    map, keeping the Lie and form data; the result lives over the target
    ring in an otherwise identical context."""
    if e.ctx.artin is not f.source and e.ctx.artin != f.source:
        raise DglaError("element coefficients do not live over the map source")
    ctx = TensorCtx(e.ctx.dgla, f.target, e.ctx.form_vars)
    out: dict = {}
    for (deg, idx, am, pm, dm), c in e.terms.items():
        for tm, tc in f._mono_image(am).items():
            key = (deg, idx, tm, pm, dm)
            v = out.get(key, Q(0)) + c * tc
            if v == 0:
                out.pop(key, None)
            else:
                out[key] = v
    return Elem(ctx, out)
