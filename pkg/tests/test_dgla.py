"""Graded Lie structure: validation, tensor elements, substitution."""

import random

import pytest

from mcdescent.artin import truncated_poly
from mcdescent.dgla import (
    Dgla,
    DglaError,
    DglaMap,
    TensorCtx,
    abelian_dgla,
    direct_sum,
    sl2,
)
from mcdescent.forms import f_const, f_sub, f_var
from mcdescent.linalg import Mat
from mcdescent.ratio import Q


def two_term() -> Dgla:
    # x in degree 0 acting on y in degree 1 by [x, y] = y, d = 0
    br = {
        (0, 0, 1, 0): [(0, 1)],
    }
    return Dgla({0: 1, 1: 1}, {}, br, names={(0, 0): "x", (1, 0): "y"})


def test_sl2_validates():
    L = sl2()
    assert L.total_dim == 3
    assert L.bracket_basis(0, 1, 0, 0) == ((0, Q(2)),)
    assert L.cohomology(0)[0] == 3  # zero differential


def test_antisymmetry_violation_caught():
    br = {(0, 0, 0, 1): [(0, 1)], (0, 1, 0, 0): [(0, 1)]}
    with pytest.raises(DglaError, match="antisym"):
        Dgla({0: 2}, {}, br)


def test_jacobi_violation_caught():
    # tampered sl2: [h, e] = e instead of 2e
    def brk(d1, i, d2, j):
        table = {(1, 0): [(0, 1)], (1, 2): [(2, -2)], (0, 2): [(1, 1)]}
        if (i, j) in table:
            return table[(i, j)]
        if (j, i) in table:
            return [(k, -c) for k, c in table[(j, i)]]
        return ()

    with pytest.raises(DglaError, match="Jacobi"):
        Dgla({0: 3}, {}, brk)


def test_leibniz_violation_caught():
    # d(a) = c but [c, b] is not d[a, b] = 0
    br = {(0, 0, 0, 1): [], (1, 0, 0, 1): [(0, 1)]}
    with pytest.raises(DglaError, match="Leibniz"):
        Dgla(
            {0: 2, 1: 1},
            {0: [[1, 0]]},
            br,
            names={(0, 0): "a", (0, 1): "b", (1, 0): "c"},
        )


def test_d_squared_violation_caught():
    with pytest.raises(DglaError, match="d\\^2"):
        abelian_dgla({0: 1, 1: 1, 2: 1}, {0: [[1]], 1: [[1]]})


def test_derived_antisymmetry_fill():
    L = two_term()
    # [y, x] was not given; must be -(-1)^{0*1}[x, y] = -y
    assert L.bracket_basis(1, 0, 0, 0) == ((0, Q(-1)),)


def rand_elem(ctx, rng, total_deg, nterms=3, min_level=1):
    A = ctx.artin
    L = ctx.dgla
    out = ctx.zero()
    nv = ctx.nforms
    for _ in range(nterms):
        deg_choices = [d for d in L.degrees() if 0 <= total_deg - d <= nv]
        if not deg_choices:
            return out
        d = rng.choice(deg_choices)
        k = total_deg - d
        S = tuple(sorted(rng.sample(range(nv), k))) if nv else ()
        idx = rng.randrange(L.dim(d))
        monos = [m for m in A.basis if sum(m) >= min_level] if A else [()]
        am = rng.choice(monos)
        pm = tuple(rng.randint(0, 2) for _ in range(nv))
        out = out.add(ctx.term(d, idx, rng.randint(-3, 3), am, pm, S))
    return out


def test_elem_bracket_graded_antisymmetric():
    rng = random.Random(21)
    L = sl2()
    A = truncated_poly(3)
    ctx = TensorCtx(L, A, ("t", "s"))
    for _ in range(25):
        dx = rng.choice([0, 1, 2])
        dy = rng.choice([0, 1, 2])
        x = rand_elem(ctx, rng, dx)
        y = rand_elem(ctx, rng, dy)
        lhs = x.bracket(y)
        rhs = y.bracket(x).scale(-((-1) ** (dx * dy)))
        assert lhs.eq(rhs)


def test_elem_d_squared_and_leibniz():
    rng = random.Random(22)
    L = two_term()
    A = truncated_poly(3)
    ctx = TensorCtx(L, A, ("t",))
    for _ in range(25):
        dx = rng.choice([0, 1])
        dy = rng.choice([0, 1])
        x = rand_elem(ctx, rng, dx)
        y = rand_elem(ctx, rng, dy)
        assert x.d().d().is_zero()
        lhs = x.bracket(y).d()
        rhs = x.d().bracket(y).add(x.bracket(y.d()).scale((-1) ** dx))
        assert lhs.eq(rhs)


def test_elem_jacobi():
    rng = random.Random(23)
    L = sl2()
    A = truncated_poly(4)
    ctx = TensorCtx(L, A, ("t",))
    for _ in range(15):
        degs = [rng.choice([0, 1]) for _ in range(3)]
        x, y, z = (rand_elem(ctx, rng, dg, nterms=2) for dg in degs)
        lhs = x.bracket(y.bracket(z))
        rhs = x.bracket(y).bracket(z).add(
            y.bracket(x.bracket(z)).scale((-1) ** (degs[0] * degs[1]))
        )
        assert lhs.eq(rhs)


def test_subst_commutes_with_d():
    # pullbacks are maps of complexes: subst(d x) = d(subst x)
    rng = random.Random(24)
    L = sl2()
    A = truncated_poly(3)
    ctx = TensorCtx(L, A, ("t", "s"))
    # substitute t := 1 - u, s := u*v into new variables (u, v)
    images = [
        f_sub(f_const(1, 2), f_var(0, 2)),
        {((1, 1), ()): Q(1)},
    ]
    for _ in range(20):
        x = rand_elem(ctx, rng, rng.choice([0, 1, 2]))
        lhs = x.d().form_subst(images, ("u", "v"))
        rhs = x.form_subst(images, ("u", "v")).d()
        assert lhs.eq(rhs)


def test_subs_values_kills_differentials():
    L = sl2()
    A = truncated_poly(3)
    ctx = TensorCtx(L, A, ("t",))
    x = ctx.term(0, 0, 1, (1,), (1,), (0,))  # e * t(1) * t dt
    at0 = x.subs_values({0: 0})
    assert at0.is_zero()
    y = ctx.term(0, 0, 1, (1,), (2,), ())  # e * t(1) * t^2
    assert y.subs_values({0: "1/2"}).eq(
        TensorCtx(L, A, ()).term(0, 0, "1/4", (1,))
    )


def test_lie_vector_roundtrip():
    L = sl2()
    A = truncated_poly(3)
    ctx = TensorCtx(L, A, ("t",))
    v = (Q(1), Q(-2), Q(3))
    x = ctx.from_lie_vec(0, v, amono=(2,), pmono=(1,), dmask=())
    assert x.lie_vector(0, (2,), (1,), ()) == v
    assert x.lie_vector(0, (1,), (1,), ()) == (Q(0),) * 3


def test_direct_sum_structure():
    L1 = sl2()
    L2 = two_term()
    total, injs, projs = direct_sum([L1, L2])
    assert total.dim(0) == 4 and total.dim(1) == 1
    total.validate(mode="full")
    for inj in injs:
        inj.validate()
    # proj . inj = identity on each part
    for pi, (inj, prj) in enumerate(zip(injs, projs)):
        comp = prj.compose(inj)
        assert comp.eq(DglaMap.identity([L1, L2][pi]))
    # brackets across summands vanish
    ctx = TensorCtx(total, truncated_poly(3))
    a = ctx.term(0, 0, 1, (1,))  # from sl2
    b = ctx.term(0, 3, 1, (1,))  # x from the second part
    assert a.bracket(b).is_zero()


def test_map_lie_on_elements():
    L = sl2()
    total, injs, _ = direct_sum([L, L])
    ctx = TensorCtx(L, truncated_poly(3), ("t",))
    x = ctx.term(0, 1, 2, (1,), (1,), ())
    pushed = x.map_lie(injs[1])
    assert pushed.lie_vector(0, (1,), (1,), ()) == (
        Q(0),
        Q(0),
        Q(0),
        Q(0),
        Q(2),
        Q(0),
    )
    # maps of dgLas commute with d and brackets on elements
    y = ctx.term(0, 0, 1, (1,))
    assert x.bracket(y).map_lie(injs[1]).eq(
        pushed.bracket(y.map_lie(injs[1]))
    )


def test_validate_sample_mode_runs():
    sl2().validate(mode="sample", seed=3)
