"""Gauge calculus: composition product, action, decomposition, homotopies.

Independent oracle: endomorphism elements act as honest matrices on the
underlying complex tensored with the coefficient ring, where the gauge
action is conjugation of the twisted differential by a nilpotent matrix
exponential and the composition product is matrix multiplication of
exponentials. Everything is exact.
"""

import math
import random

import pytest

from mcdescent.artin import dual_numbers, fat_point, truncated_poly
from mcdescent.dgla import TensorCtx, end_dgla
from mcdescent.linalg import ChainComplexQ, Mat
from mcdescent.mcgauge import (
    GaugeError,
    bch,
    compose_paths,
    decompose_path,
    decompose_square,
    elem_linear_solve,
    embed,
    endpoint,
    extract_irrelevant,
    gauge,
    gauge_from_path,
    invert_path,
    is_gauge_fixed,
    is_mc,
    lie_basis_elems,
    mc_residual,
    morphism_equal,
    orbit_decide_square_zero,
    path_from_gauge,
    paths_homotopic,
    square_compose,
    square_defect_witness,
    square_from_irrelevant,
    square_symmetry,
    square_transitivity,
    stabilizer_log,
    verify_path,
    verify_square,
)
from mcdescent.ratio import Q

CX = ChainComplexQ({0: 1, 1: 1, 2: 1}, {0: [[0]], 1: [[0]]})  # zero differential
CXD = ChainComplexQ({0: 2, 1: 1}, {0: [[1, 0]]})


def make_ctx(cx, A):
    L, eb = end_dgla(cx)
    L.validate(mode="full")
    return TensorCtx(L, A), eb


def rand_in_degree(ctx, rng, deg, span=2):
    out = ctx.zero()
    A = ctx.artin
    for am in A.maximal_basis:
        for idx in range(ctx.dgla.dim(deg)):
            c = rng.randint(-span, span)
            if c:
                out = out.add(ctx.term(deg, idx, c, am))
    return out


def rand_mc(ctx, rng):
    """A Maurer-Cartan element: gauge transform of 0 by a random log."""
    return gauge(rand_in_degree(ctx, rng, 0), ctx.zero())


# --- matrix oracle ----------------------------------------------------------


class Operator:
    """Elements of End(C) (x) A as matrices on C (x) A over Q."""

    def __init__(self, cx, eb, A):
        self.cx = cx
        self.eb = eb
        self.A = A
        self.slots = [
            (i, c, am)
            for i in sorted(cx.dims)
            for c in range(cx.dim(i))
            for am in A.basis
        ]
        self.pos = {s: k for k, s in enumerate(self.slots)}
        self.n = len(self.slots)

    def of_elem(self, z):
        m = Mat(self.n, self.n)
        for (p, idx, am, _, _), coeff in z.terms.items():
            i, r, c = self.eb.unit(p, idx)
            for (i2, c2, mu) in self.slots:
                if i2 != i or c2 != c:
                    continue
                prod = self.A.mono_mul(am, mu)
                if prod is None:
                    continue
                row = self.pos[(i + p, r, prod)]
                col = self.pos[(i2, c2, mu)]
                m.set_entry(row, col, m.entry(row, col) + coeff)
        return m

    def of_diff(self):
        m = Mat(self.n, self.n)
        for (i, c, mu) in self.slots:
            dm = self.cx.diff(i)
            for r in range(dm.rows):
                v = dm.entry(r, c)
                if v:
                    m.set_entry(self.pos[(i + 1, r, mu)], self.pos[(i, c, mu)], v)
        return m

    def exp(self, m):
        out = Mat.identity(self.n)
        term = Mat.identity(self.n)
        k = 1
        while True:
            term = term @ m
            if term.is_zero():
                return out
            out = out.add(term.scale(Q(1, math.factorial(k))))
            k += 1
            assert k < 40, "exp did not terminate"


def test_bch_matches_matrix_exponentials():
    rng = random.Random(31)
    for A in (truncated_poly(3), truncated_poly(4), fat_point()):
        ctx, eb = make_ctx(CX, A)
        op = Operator(CX, eb, A)
        for _ in range(6):
            a = rand_in_degree(ctx, rng, 0)
            b = rand_in_degree(ctx, rng, 0)
            lhs = op.exp(op.of_elem(bch(a, b)))
            rhs = op.exp(op.of_elem(a)) @ op.exp(op.of_elem(b))
            assert lhs == rhs


def test_bch_closed_forms():
    rng = random.Random(32)
    # nilpotency index 3: a + b + [a,b]/2
    ctx, _ = make_ctx(CX, truncated_poly(3))
    for _ in range(10):
        a = rand_in_degree(ctx, rng, 0)
        b = rand_in_degree(ctx, rng, 0)
        want = a.add(b).add(a.bracket(b).scale("1/2"))
        assert bch(a, b).eq(want)
    # nilpotency index 4: ... + [a,[a,b]]/12 + [b,[b,a]]/12
    ctx, _ = make_ctx(CX, truncated_poly(4))
    for _ in range(10):
        a = rand_in_degree(ctx, rng, 0)
        b = rand_in_degree(ctx, rng, 0)
        want = (
            a.add(b)
            .add(a.bracket(b).scale("1/2"))
            .add(a.bracket(a.bracket(b)).scale("1/12"))
            .add(b.bracket(b.bracket(a)).scale("1/12"))
        )
        assert bch(a, b).eq(want)


def test_bch_group_laws():
    rng = random.Random(33)
    ctx, _ = make_ctx(CX, fat_point())
    z = ctx.zero()
    for _ in range(6):
        a = rand_in_degree(ctx, rng, 0)
        b = rand_in_degree(ctx, rng, 0)
        c = rand_in_degree(ctx, rng, 0)
        assert bch(a, z).eq(a) and bch(z, a).eq(a)
        assert bch(a, a.neg()).is_zero()
        assert bch(a, bch(b, c)).eq(bch(bch(a, b), c))


def test_gauge_is_conjugation_of_twisted_differential():
    rng = random.Random(34)
    for cx in (CX, CXD):
        A = truncated_poly(4)
        ctx, eb = make_ctx(cx, A)
        op = Operator(cx, eb, A)
        d = op.of_diff()
        for _ in range(6):
            a = rand_in_degree(ctx, rng, 0)
            x = rand_mc(ctx, rng)
            e = op.exp(op.of_elem(a))
            einv = op.exp(op.of_elem(a.neg()))
            lhs = d.add(op.of_elem(gauge(a, x)))
            rhs = e @ d.add(op.of_elem(x)) @ einv
            assert lhs == rhs


def test_gauge_action_laws():
    rng = random.Random(35)
    ctx, _ = make_ctx(CXD, fat_point())
    for _ in range(8):
        a = rand_in_degree(ctx, rng, 0)
        b = rand_in_degree(ctx, rng, 0)
        x = rand_mc(ctx, rng)
        assert gauge(ctx.zero(), x).eq(x)
        assert gauge(a, gauge(b, x)).eq(gauge(bch(a, b), x))
        assert is_mc(gauge(a, x))


def test_mc_residual_depends_on_coefficients():
    # x = (shift by one step) * t is flat over dual numbers but not mod t^3
    for A, flat in ((dual_numbers(), True), (truncated_poly(3), False)):
        ctx, eb = make_ctx(CX, A)
        x = ctx.zero()
        for idx in range(ctx.dgla.dim(1)):
            x = x.add(ctx.term(1, idx, 1, (1,)))
        assert is_mc(x) is flat
        if not flat:
            r = mc_residual(x)
            assert r.min_artin_level() == 2


def test_stabilizer_logs_fix_the_object():
    rng = random.Random(36)
    ctx, _ = make_ctx(CXD, truncated_poly(4))
    for _ in range(8):
        x = rand_mc(ctx, rng)
        u = rand_in_degree(ctx, rng, -1)
        a = stabilizer_log(x, u)
        assert is_gauge_fixed(a, x)


def test_extract_irrelevant_roundtrip():
    rng = random.Random(37)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    for _ in range(8):
        x = rand_mc(ctx, rng)
        u = rand_in_degree(ctx, rng, -1)
        g = stabilizer_log(x, u)
        u2 = extract_irrelevant(x, g)
        assert u2 is not None
        assert stabilizer_log(x, u2).eq(g)


def test_morphism_equal():
    rng = random.Random(38)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    x = rand_mc(ctx, rng)
    a = rand_in_degree(ctx, rng, 0)
    u = rand_in_degree(ctx, rng, -1)
    a2 = bch(a, stabilizer_log(x, u))
    assert morphism_equal(x, a, a2)
    assert morphism_equal(x, a, a)
    # over the zero-differential complex, a closed non-exact direction is
    # a genuinely different morphism out of 0
    ctx0, _ = make_ctx(CX, truncated_poly(3))
    zero = ctx0.zero()
    c = ctx0.term(0, 0, 1, (1,))
    assert not morphism_equal(zero, zero, c)


def test_decompose_path_roundtrip():
    rng = random.Random(39)
    ctx, _ = make_ctx(CXD, truncated_poly(4))
    ctx1 = ctx.with_vars(("t",))
    for _ in range(5):
        x = rand_mc(ctx, rng)
        # random gauge log with polynomial and dt parts
        g = ctx1.zero()
        for am in ctx.artin.maximal_basis:
            for idx in range(ctx.dgla.dim(0)):
                c = rng.randint(-2, 2)
                if c:
                    g = g.add(ctx1.term(0, idx, c, am, (rng.randint(1, 2),), ()))
            for idx in range(ctx.dgla.dim(-1)):
                c = rng.randint(-1, 1)
                if c:
                    g = g.add(ctx1.term(-1, idx, c, am, (rng.randint(0, 2),), (0,)))
        xi = gauge(g, embed(x, ("t",), positions=[]))
        assert endpoint(xi, 0, 0).eq(x)
        p = decompose_path(x, xi)
        # shape: no dt part, all terms divisible by t
        for (deg, _, _, pm, S) in p.terms:
            assert deg == 0 and S == () and pm[0] >= 1
        assert gauge(p, embed(x, ("t",), positions=[])).eq(xi)


def test_decompose_path_uniqueness_on_lines():
    rng = random.Random(40)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    for _ in range(5):
        x = rand_mc(ctx, rng)
        a = rand_in_degree(ctx, rng, 0)
        r = path_from_gauge(x, a)
        p = decompose_path(x, r)
        # the line log t*a is already in shape, so it is the answer
        want = ctx.with_vars(("t",)).zero()
        for (deg, idx, am, _, _), c in embed(a, ("t",), positions=[]).terms.items():
            want = want.add(ctx.with_vars(("t",)).term(deg, idx, c, am, (1,), ()))
        assert p.eq(want)
        assert gauge_from_path(x, r).eq(a)


def test_decompose_square_roundtrip():
    rng = random.Random(41)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    ctx2 = ctx.with_vars(("t", "s"))
    for _ in range(4):
        x = rand_mc(ctx, rng)
        g = ctx2.zero()
        for am in ctx.artin.maximal_basis:
            for idx in range(ctx.dgla.dim(0)):
                c = rng.randint(-2, 2)
                if c:
                    et, es = rng.randint(0, 2), rng.randint(0, 2)
                    if et + es == 0:
                        et = 1
                    g = g.add(ctx2.term(0, idx, c, am, (et, es), ()))
            for idx in range(ctx.dgla.dim(-1)):
                c = rng.randint(-1, 1)
                if c:
                    mask = rng.choice([(0,), (1,)])
                    g = g.add(
                        ctx2.term(
                            -1, idx, c, am,
                            (rng.randint(0, 1), rng.randint(0, 1)), mask,
                        )
                    )
        xi = gauge(g, embed(x, ("t", "s"), positions=[]))
        r = decompose_square(x, xi)
        for (deg, _, _, pm, S) in r.terms:
            if deg == 0:
                assert S == () and pm[0] + pm[1] >= 1
            else:
                assert deg == -1 and S == (1,) and pm[0] >= 1
        assert gauge(r, embed(x, ("t", "s"), positions=[])).eq(xi)


def test_paths_and_composition():
    rng = random.Random(42)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    x = rand_mc(ctx, rng)
    a = rand_in_degree(ctx, rng, 0)
    b = rand_in_degree(ctx, rng, 0)
    r1 = path_from_gauge(x, a)
    y = endpoint(r1, 0, 1)
    assert verify_path(x, y, r1)
    r2 = path_from_gauge(y, b)
    z = endpoint(r2, 0, 1)
    comp = compose_paths(x, r1, r2)
    assert verify_path(x, z, comp)
    rev = invert_path(r1)
    assert verify_path(y, x, rev)


def test_square_from_irrelevant_and_defect():
    rng = random.Random(43)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    x = rand_mc(ctx, rng)
    a = rand_in_degree(ctx, rng, 0)
    u = rand_in_degree(ctx, rng, -1)
    a2 = bch(a, stabilizer_log(x, u))
    w = square_from_irrelevant(x, a, u)
    r1 = path_from_gauge(x, a)
    r2 = path_from_gauge(x, a2)
    y = endpoint(r1, 0, 1)
    assert verify_square(x, y, r1, r2, w)
    got_a, got_a2, got_u = square_defect_witness(x, w)
    assert got_a.eq(a) and got_a2.eq(a2)
    assert stabilizer_log(x, got_u).eq(stabilizer_log(x, u))


def test_paths_homotopic_positive_and_negative():
    rng = random.Random(44)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    x = rand_mc(ctx, rng)
    a = rand_in_degree(ctx, rng, 0)
    u = rand_in_degree(ctx, rng, -1)
    a2 = bch(a, stabilizer_log(x, u))
    r1 = path_from_gauge(x, a)
    r2 = path_from_gauge(x, a2)
    ok, w = paths_homotopic(x, r1, r2)
    assert ok
    y = endpoint(r1, 0, 1)
    assert verify_square(x, y, r1, r2, w)
    # a closed non-exact gauge direction is not homotopic to the constant
    ctx0, _ = make_ctx(CX, truncated_poly(3))
    zero = ctx0.zero()
    c = ctx0.term(0, 0, 1, (1,))
    rc = path_from_gauge(zero, c)
    r0 = path_from_gauge(zero, ctx0.zero())
    ok2, w2 = paths_homotopic(zero, rc, r0)
    assert not ok2 and w2 is None


def test_square_symmetry_and_transitivity():
    rng = random.Random(45)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    x = rand_mc(ctx, rng)
    a = rand_in_degree(ctx, rng, 0)
    u1 = rand_in_degree(ctx, rng, -1)
    u2 = rand_in_degree(ctx, rng, -1)
    a2 = bch(a, stabilizer_log(x, u1))
    a3 = bch(a2, stabilizer_log(gauge(ctx.zero(), x), u2))
    w12 = square_from_irrelevant(x, a, u1)
    w23 = square_from_irrelevant(x, a2, u2)
    r1 = path_from_gauge(x, a)
    r2 = path_from_gauge(x, a2)
    r3 = path_from_gauge(x, a3)
    y = endpoint(r1, 0, 1)
    flipped = square_symmetry(w12)
    assert verify_square(x, y, r2, r1, flipped)
    w13 = square_transitivity(x, w12, w23)
    assert verify_square(x, y, r1, r3, w13)


def test_square_compose():
    rng = random.Random(46)
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    x = rand_mc(ctx, rng)
    a = rand_in_degree(ctx, rng, 0)
    u = rand_in_degree(ctx, rng, -1)
    a2 = bch(a, stabilizer_log(x, u))
    w1 = square_from_irrelevant(x, a, u)
    y = gauge(a, x)
    b = rand_in_degree(ctx, rng, 0)
    v = rand_in_degree(ctx, rng, -1)
    b2 = bch(b, stabilizer_log(y, v))
    w2 = square_from_irrelevant(y, b, v)
    w = square_compose(x, w1, w2)
    comp1 = compose_paths(x, path_from_gauge(x, a), path_from_gauge(y, b))
    comp2 = compose_paths(x, path_from_gauge(x, a2), path_from_gauge(y, b2))
    z = endpoint(comp1, 0, 1)
    assert verify_square(x, z, comp1, comp2, w)


def test_orbit_decide_square_zero():
    rng = random.Random(47)
    for A in (dual_numbers(),):
        ctx, _ = make_ctx(CXD, A)
        x = rand_mc(ctx, rng)
        a = rand_in_degree(ctx, rng, 0)
        y = gauge(a, x)
        ok, wit = orbit_decide_square_zero(x, y)
        assert ok and gauge(wit, x).eq(y)
    # zero differential: distinct closed directions are inequivalent
    ctx0, _ = make_ctx(CX, dual_numbers())
    x = ctx0.term(1, 0, 1, (1,))
    ok, wit = orbit_decide_square_zero(x, ctx0.zero())
    assert not ok and wit is None
    with pytest.raises(GaugeError):
        ctx3, _ = make_ctx(CX, truncated_poly(3))
        orbit_decide_square_zero(ctx3.zero(), ctx3.zero())


def test_elem_linear_solve_consistency():
    ctx, _ = make_ctx(CXD, truncated_poly(3))
    basis = lie_basis_elems(ctx, 0)
    target = basis[0].d()
    sol = elem_linear_solve(lambda e: e.d(), target, basis)
    assert sol is not None and sol.d().eq(target)
    assert elem_linear_solve(lambda e: ctx.zero(), basis[0], basis) is None
