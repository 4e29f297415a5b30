"""Exact linear algebra over the rationals.

Sparse row-dict matrices with reduced row echelon form, kernels, images and
solving; rational subspaces with canonical bases; bounded cochain complexes
with cohomology (dimensions plus deterministic representatives), mapping
cones and induced maps on cohomology.

Everything is exact: no floats anywhere, no tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ratio import Q, neg_one_pow, rat

Vec = tuple  # tuple of Q entries


def vec(entries) -> Vec:
    return tuple(rat(e) for e in entries)


def vzero(n: int) -> Vec:
    return (Q(0),) * n


def vadd(u: Vec, v: Vec) -> Vec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def vsub(u: Vec, v: Vec) -> Vec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def vscale(c, v: Vec) -> Vec:
    c = rat(c)
    return tuple(c * a for a in v)


def vneg(v: Vec) -> Vec:
    return tuple(-a for a in v)


def vis_zero(v: Vec) -> bool:
    return all(a == 0 for a in v)


class Mat:
    """Rational matrix stored as sparse rows: list of {col: nonzero Q}."""

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, data=None):
        self.rows = rows
        self.cols = cols
        self._rows = [dict() for _ in range(rows)]
        if data:
            for (r, c), v in data.items():
                v = rat(v)
                if v != 0:
                    self._rows[r][c] = v

    # --- constructors -------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int) -> "Mat":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        m = cls(n, n)
        for i in range(n):
            m._rows[i][i] = Q(1)
        return m

    @classmethod
    def from_rows(cls, rows_list, cols: int | None = None) -> "Mat":
        rows_list = [vec(r) for r in rows_list]
        if cols is None:
            cols = len(rows_list[0]) if rows_list else 0
        m = cls(len(rows_list), cols)
        for i, r in enumerate(rows_list):
            if len(r) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(r):
                if v != 0:
                    m._rows[i][j] = v
        return m

    @classmethod
    def from_cols(cls, cols_list, rows: int | None = None) -> "Mat":
        cols_list = [vec(c) for c in cols_list]
        if rows is None:
            rows = len(cols_list[0]) if cols_list else 0
        m = cls(rows, len(cols_list))
        for j, c in enumerate(cols_list):
            if len(c) != rows:
                raise ValueError("ragged columns")
            for i, v in enumerate(c):
                if v != 0:
                    m._rows[i][j] = v
        return m

    # --- access -------------------------------------------------------

    def entry(self, r: int, c: int):
        return self._rows[r].get(c, Q(0))

    def set_entry(self, r: int, c: int, v):
        v = rat(v)
        if v == 0:
            self._rows[r].pop(c, None)
        else:
            self._rows[r][c] = v

    def row(self, r: int) -> Vec:
        d = self._rows[r]
        return tuple(d.get(j, Q(0)) for j in range(self.cols))

    def col(self, c: int) -> Vec:
        return tuple(self._rows[i].get(c, Q(0)) for i in range(self.rows))

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def copy(self) -> "Mat":
        m = Mat(self.rows, self.cols)
        m._rows = [dict(r) for r in self._rows]
        return m

    def __eq__(self, other):
        if not isinstance(other, Mat):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and self._rows == other._rows
        )

    def __hash__(self):  # pragma: no cover - Mat is not meant for dict keys
        raise TypeError("Mat is unhashable")

    def is_zero(self) -> bool:
        return all(not r for r in self._rows)

    def __repr__(self):
        nz = sum(len(r) for r in self._rows)
        return f"Mat({self.rows}x{self.cols}, {nz} nonzero)"

    # --- arithmetic ----------------------------------------------------

    def transpose(self) -> "Mat":
        m = Mat(self.cols, self.rows)
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                m._rows[j][i] = v
        return m

    def matvec(self, v: Vec) -> Vec:
        if len(v) != self.cols:
            raise ValueError(f"matvec shape mismatch: {self.cols} vs {len(v)}")
        out = []
        for r in self._rows:
            s = Q(0)
            for j, a in r.items():
                s += a * v[j]
            out.append(s)
        return tuple(out)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError("matmul shape mismatch")
        out = Mat(self.rows, other.cols)
        for i, r in enumerate(self._rows):
            acc: dict = {}
            for k, a in r.items():
                for j, b in other._rows[k].items():
                    acc[j] = acc.get(j, Q(0)) + a * b
            out._rows[i] = {j: v for j, v in acc.items() if v != 0}
        return out

    def add(self, other: "Mat") -> "Mat":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("add shape mismatch")
        out = self.copy()
        for i, r in enumerate(other._rows):
            tr = out._rows[i]
            for j, v in r.items():
                nv = tr.get(j, Q(0)) + v
                if nv == 0:
                    tr.pop(j, None)
                else:
                    tr[j] = nv
        return out

    def sub(self, other: "Mat") -> "Mat":
        return self.add(other.scale(-1))

    def neg(self) -> "Mat":
        return self.scale(-1)

    def scale(self, c) -> "Mat":
        c = rat(c)
        out = Mat(self.rows, self.cols)
        if c == 0:
            return out
        out._rows = [{j: c * v for j, v in r.items()} for r in self._rows]
        return out

    def hstack(self, other: "Mat") -> "Mat":
        if self.rows != other.rows:
            raise ValueError("hstack shape mismatch")
        out = self.copy()
        out.cols = self.cols + other.cols
        for i, r in enumerate(other._rows):
            for j, v in r.items():
                out._rows[i][self.cols + j] = v
        return out

    # --- elimination ----------------------------------------------------

    def rref(self) -> tuple["Mat", list[int]]:
        """Reduced row echelon form; returns (R, pivot column list).

        Deterministic: always picks the first row with a nonzero entry in
        the current column.
        """
        work = [dict(r) for r in self._rows]
        pivots: list[int] = []
        top = 0
        for col in range(self.cols):
            sel = None
            for i in range(top, len(work)):
                if work[i].get(col):
                    sel = i
                    break
            if sel is None:
                continue
            work[top], work[sel] = work[sel], work[top]
            prow = work[top]
            inv = Q(1) / prow[col]
            if inv != 1:
                for j in list(prow):
                    prow[j] *= inv
            for i in range(len(work)):
                if i == top:
                    continue
                f = work[i].get(col)
                if not f:
                    continue
                row_i = work[i]
                for j, v in prow.items():
                    nv = row_i.get(j, Q(0)) - f * v
                    if nv == 0:
                        row_i.pop(j, None)
                    else:
                        row_i[j] = nv
            pivots.append(col)
            top += 1
            if top == len(work):
                break
        out = Mat(self.rows, self.cols)
        out._rows = work
        return out, pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def kernel_basis(self) -> list[Vec]:
        """Basis of the right kernel, from the free-column parametrisation.

        For each free column f the vector has 1 in slot f and -R[p][f] in
        each pivot slot p; order follows ascending free columns. This is the
        canonical deterministic choice used for cohomology representatives.
        """
        R, pivots = self.rref()
        pivset = set(pivots)
        basis = []
        for f in range(self.cols):
            if f in pivset:
                continue
            v = [Q(0)] * self.cols
            v[f] = Q(1)
            for i, p in enumerate(pivots):
                a = R._rows[i].get(f)
                if a:
                    v[p] = -a
            basis.append(tuple(v))
        return basis

    def image_basis(self) -> list[Vec]:
        """Basis of the column space: nonzero rows of rref(transpose)."""
        R, pivots = self.transpose().rref()
        return [R.row(i) for i in range(len(pivots))]

    def solve(self, b: Vec):
        """Solve A x = b. Returns (particular, kernel_basis) or None."""
        if len(b) != self.rows:
            raise ValueError("solve shape mismatch")
        aug = self.hstack(Mat.from_cols([b], rows=self.rows))
        R, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = [Q(0)] * self.cols
        for i, p in enumerate(pivots):
            x[p] = R._rows[i].get(self.cols, Q(0))
        return tuple(x), self.kernel_basis()

    def inverse(self):
        """Exact inverse, or None when the matrix is not invertible."""
        if self.rows != self.cols:
            return None
        aug = self.hstack(Mat.identity(self.rows))
        R, pivots = aug.rref()
        if pivots != list(range(self.rows)):
            return None
        inv = Mat(self.rows, self.rows)
        for i in range(self.rows):
            for j in range(self.rows):
                v = R.entry(i, self.rows + j)
                if v:
                    inv.set_entry(i, j, v)
        return inv


def mat_from_column_action(dim_src: int, dim_tgt: int, act) -> Mat:
    """Matrix of a linear map given by its action on standard basis vectors.

    act(j) must return the image of e_j as a length-dim_tgt iterable.
    """
    m = Mat(dim_tgt, dim_src)
    for j in range(dim_src):
        img = act(j)
        for i, v in enumerate(img):
            v = rat(v)
            if v != 0:
                m._rows[i][j] = v
    return m


class Subspace:
    """Subspace of Q^n with a canonical (RREF) basis."""

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: int, basis_rows=None):
        self.ambient = ambient
        if not basis_rows:
            self.basis = []
        else:
            R, pivots = Mat.from_rows(basis_rows, cols=ambient).rref()
            self.basis = [R.row(i) for i in range(len(pivots))]

    @classmethod
    def from_vectors(cls, ambient: int, vectors) -> "Subspace":
        return cls(ambient, list(vectors))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Vec) -> bool:
        if vis_zero(v):
            return True
        if not self.basis:
            return False
        m = Mat.from_rows(self.basis, cols=self.ambient).transpose()
        return m.solve(tuple(rat(x) for x in v)) is not None

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(b) for b in other.basis)

    def eq(self, other: "Subspace") -> bool:
        return (
            self.ambient == other.ambient
            and self.dim == other.dim
            and self.contains_space(other)
        )

    def sum_(self, other: "Subspace") -> "Subspace":
        return Subspace(self.ambient, list(self.basis) + list(other.basis))

    def intersect(self, other: "Subspace") -> "Subspace":
        # kernel of the stacked coefficient solve: v in both spans
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.ambient)
        a = Mat.from_rows(self.basis, cols=self.ambient).transpose()
        b = Mat.from_rows(other.basis, cols=self.ambient).transpose()
        stacked = a.hstack(b.scale(-1))
        out = []
        for k in stacked.kernel_basis():
            coeffs = k[: self.dim]
            v = vzero(self.ambient)
            for c, bv in zip(coeffs, self.basis, strict=True):
                v = vadd(v, vscale(c, bv))
            out.append(v)
        return Subspace(self.ambient, out)

    def annihilator_matrix(self) -> Mat:
        """Matrix whose kernel is exactly this subspace."""
        if not self.basis:
            return Mat.identity(self.ambient)
        # rows spanning the orthogonal complement under the standard pairing
        comp = Mat.from_rows(self.basis, cols=self.ambient).kernel_basis()
        return Mat.from_rows(comp, cols=self.ambient) if comp else Mat(0, self.ambient)

    def __repr__(self):
        return f"Subspace(dim {self.dim} in Q^{self.ambient})"


def quotient_dim(space: Subspace, sub: Subspace) -> int:
    if not space.contains_space(sub):
        raise ValueError("not a subspace")
    return space.dim - sub.dim


class ChainComplexQ:
    """Bounded cochain complex of finite-dimensional rational vector spaces.

    dims: {degree: dimension}, diffs: {degree: Mat of d: C^deg -> C^{deg+1}}.
    Degrees with zero dimension may be omitted. Validates d∘d = 0.
    """

    def __init__(self, dims: dict, diffs: dict, check: bool = True):
        self.dims = {d: n for d, n in dims.items() if n}
        self.diffs = {}
        for d, m in diffs.items():
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if m.rows != self.dim(d + 1) or m.cols != self.dim(d):
                raise ValueError(
                    f"differential at degree {d} has shape {m.rows}x{m.cols}, "
                    f"expected {self.dim(d + 1)}x{self.dim(d)}"
                )
            if not m.is_zero():
                self.diffs[d] = m
        if check:
            for d in list(self.diffs):
                nxt = self.diffs.get(d + 1)
                if nxt is not None and not (nxt @ self.diffs[d]).is_zero():
                    raise ValueError(f"d^2 != 0 at degree {d}")

    def dim(self, deg: int) -> int:
        return self.dims.get(deg, 0)

    def degrees(self):
        return sorted(self.dims)

    def diff(self, deg: int) -> Mat:
        m = self.diffs.get(deg)
        if m is None:
            return Mat(self.dim(deg + 1), self.dim(deg))
        return m

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def euler(self) -> int:
        return sum(neg_one_pow(d) * n for d, n in self.dims.items())

    def cocycles(self, deg: int) -> list[Vec]:
        if self.dim(deg) == 0:
            return []
        return self.diff(deg).kernel_basis()

    def coboundaries(self, deg: int) -> list[Vec]:
        if self.dim(deg) == 0 or self.dim(deg - 1) == 0:
            return []
        return self.diff(deg - 1).image_basis()

    def cohomology(self, deg: int) -> tuple[int, list[Vec]]:
        """(dimension, representative cocycles) at this degree.

        Representatives are deterministic: the canonical kernel basis is
        reduced against the coboundary space, keeping the vectors that
        extend its RREF basis (first-come order).
        """
        cyc = self.cocycles(deg)
        bnd = self.coboundaries(deg)
        if not cyc:
            return 0, []
        n = self.dim(deg)
        hdim = len(cyc) - len(bnd)
        if hdim == 0:
            return 0, []
        reps = []
        space = Subspace(n, bnd)
        for z in cyc:
            grown = Subspace(n, list(space.basis) + [z])
            if grown.dim > space.dim:
                reps.append(z)
                space = grown
            if len(reps) == hdim:
                break
        return hdim, reps

    def betti(self) -> dict:
        out = {}
        lo = min(self.dims) if self.dims else 0
        hi = max(self.dims) if self.dims else -1
        for d in range(lo, hi + 1):
            h, _ = self.cohomology(d)
            if h:
                out[d] = h
        return out

    def class_of(self, deg: int, v: Vec):
        """Coordinates of [v] against this degree's representatives.

        Returns None when v is not a cocycle; otherwise the coefficient
        tuple in the representative basis (empty tuple for the zero class).
        """
        if not vis_zero(self.diff(deg).matvec(v)):
            return None
        hdim, reps = self.cohomology(deg)
        bnd = self.coboundaries(deg)
        cols = list(reps) + bnd
        if not cols:
            return ()
        m = Mat.from_cols(cols, rows=self.dim(deg))
        sol = m.solve(tuple(rat(x) for x in v))
        if sol is None:  # pragma: no cover - cocycle always decomposes
            raise AssertionError("cocycle failed to decompose")
        return tuple(sol[0][:hdim])

    def same_class(self, deg: int, u: Vec, v: Vec) -> bool:
        cu = self.class_of(deg, u)
        cv = self.class_of(deg, v)
        if cu is None or cv is None:
            raise ValueError("not cocycles")
        return cu == cv

    def shift(self, k: int) -> "ChainComplexQ":
        """Shifted complex C[k]: C[k]^n = C^{n+k}, d[k] = (-1)^k d."""
        dims = {d - k: n for d, n in self.dims.items()}
        sign = Q(-1) if k % 2 else Q(1)
        diffs = {d - k: m.scale(sign) for d, m in self.diffs.items()}
        return ChainComplexQ(dims, diffs, check=False)


@dataclass
class ChainMapQ:
    """Degreewise map of complexes commuting with the differentials."""

    source: ChainComplexQ
    target: ChainComplexQ
    mats: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for d, m in self.mats.items():
            if not isinstance(m, Mat):
                m = Mat.from_rows(m)
            if m.rows != self.target.dim(d) or m.cols != self.source.dim(d):
                raise ValueError(f"chain map shape mismatch at degree {d}")
            if not m.is_zero():
                clean[d] = m
        self.mats = clean
        for d in set(self.source.dims) | set(self.mats):
            lhs = self.target.diff(d) @ self.mat(d)
            rhs = self.mat(d + 1) @ self.source.diff(d)
            if lhs != rhs:
                raise ValueError(f"does not commute with d at degree {d}")

    def mat(self, deg: int) -> Mat:
        m = self.mats.get(deg)
        if m is None:
            return Mat(self.target.dim(deg), self.source.dim(deg))
        return m

    def apply(self, deg: int, v: Vec) -> Vec:
        return self.mat(deg).matvec(v)


def cone(f: ChainMapQ) -> ChainComplexQ:
    """Mapping cone: cone(f)^n = X^{n+1} ⊕ Y^n, d(x, y) = (-dx, fx + dy)."""
    X, Y = f.source, f.target
    degs = set()
    for d in X.dims:
        degs.add(d - 1)
    degs |= set(Y.dims)
    dims = {d: X.dim(d + 1) + Y.dim(d) for d in degs}
    diffs = {}
    for d in sorted(degs):
        rows = X.dim(d + 2) + Y.dim(d + 1)
        cols = X.dim(d + 1) + Y.dim(d)
        m = Mat(rows, cols)
        dx = X.diff(d + 1)
        for i in range(dx.rows):
            for j, v in dx._rows[i].items():
                m.set_entry(i, j, -v)
        fm = f.mat(d + 1)
        for i in range(fm.rows):
            for j, v in fm._rows[i].items():
                m.set_entry(X.dim(d + 2) + i, j, v)
        dy = Y.diff(d)
        for i in range(dy.rows):
            for j, v in dy._rows[i].items():
                m.set_entry(X.dim(d + 2) + i, X.dim(d + 1) + j, v)
        if not m.is_zero():
            diffs[d] = m
    return ChainComplexQ(dims, diffs)


def cohomology_map(f: ChainMapQ, deg: int) -> Mat:
    """Matrix of H^deg(f) in the canonical representative bases."""
    hs, reps_s = f.source.cohomology(deg)
    ht, reps_t = f.target.cohomology(deg)
    out = Mat(ht, hs)
    for j, z in enumerate(reps_s):
        img = f.apply(deg, z)
        cls = f.target.class_of(deg, img)
        if cls is None:  # pragma: no cover - chain maps send cocycles to cocycles
            raise AssertionError("image of cocycle is not a cocycle")
        for i, c in enumerate(cls):
            out.set_entry(i, j, c)
    return out


def is_quasi_iso(f: ChainMapQ) -> bool:
    degs = set(f.source.dims) | set(f.target.dims)
    if not degs:
        return True
    lo, hi = min(degs) - 1, max(degs) + 1
    for d in range(lo, hi + 1):
        hs, _ = f.source.cohomology(d)
        ht, _ = f.target.cohomology(d)
        if hs != ht:
            return False
        m = cohomology_map(f, d)
        if m.rank() != hs:
            return False
    return True
