import random

import pytest

from mcdescent.artin import ArtinMorphism, square_zero, truncated_poly
from mcdescent.builders import (
    sc_cech_conjugated,
    sc_cech_identity,
    sc_constant_sl2,
    sc_counterexample,
    sc_twist,
    sc_weak_only,
    sc_zero,
    cover_twist_redundant,
    strong_examples,
)
from mcdescent.descent import (
    DescentError,
    GaugeHomotopy,
    check_hypothesis,
    homotopy_endpoint,
    homotopy_verify,
    mc_pair_assemble,
    mc_pair_base_change,
    mc_pair_verify,
    phi1_essential_lift,
    phi1_full_lift,
    phi1_mor,
    phi1_obj,
    phi2_mor,
    phi2_obj,
    phi_descend,
    pi0_compare_square_zero,
    totdel_base_change,
    tw_lift,
)
from mcdescent.dgla import TensorCtx
from mcdescent.mcgauge import (
    bch,
    bch_many,
    embed,
    gauge,
    morphism_equal,
    paths_homotopic,
    stabilizer_log,
)
from mcdescent.ratio import Q
from mcdescent.sampling import cech_trivialized_object, random_elem, random_tw_mc
from mcdescent.semicosimplicial import (
    cech_from_cover,
    elem_times_form,
    totdel_assemble,
    totdel_compose,
    totdel_identity,
    totdel_mor_assemble,
    totdel_mor_equal,
    totdel_verify,
    tw_mc_assemble,
    tw_mc_from_element,
    tw_mc_to_element,
    tw_mc_verify,
)


def cech_diagrams():
    return [
        ("identity cech", sc_cech_identity(n_opens=3).truncate(2)),
        ("conjugated cech", sc_cech_conjugated(n_opens=3, seed=5).truncate(2)),
    ]


def random_object(sc, artin, rng):
    """A verified glued object: trivialised Cech data when the diagram
    came from a cover, otherwise a gauge-exact solution with trivial
    gluing."""
    if "inj" in sc.meta:
        return cech_trivialized_object(sc, artin, rng)
    ctx = TensorCtx(sc.levels[0], artin, ())
    l = gauge(random_elem(ctx, 0, rng), ctx.zero())
    return totdel_assemble(sc, l, TensorCtx(sc.levels[1], artin, ()).zero())


def transported_target(sc, o, a):
    l1 = gauge(a, o.l)
    m1 = bch_many([a.map_lie(sc.face(1, 1)), o.m, a.map_lie(sc.face(1, 0)).neg()])
    return totdel_assemble(sc, l1, m1)


def random_morphism(sc, o, rng):
    a = random_elem(TensorCtx(sc.levels[0], o.artin, ()), 0, rng)
    return totdel_mor_assemble(o, transported_target(sc, o, a), a)


# --- hypothesis checking ----------------------------------------------------


def test_hypothesis_flags_on_builtins():
    for name, sc in strong_examples():
        rep = check_hypothesis(sc)
        assert rep["strong"], name
        assert rep["weak"], name
        assert rep["table"] == {}


def test_hypothesis_on_nonnegatively_graded_diagram():
    # degree 0 everywhere, so there is no negative cohomology at all
    rep = check_hypothesis(sc_twist())
    assert rep["strong"] and rep["weak"]


def test_hypothesis_counterexample_fails_both_flags():
    rep = check_hypothesis(sc_counterexample())
    assert not rep["strong"]
    assert not rep["weak"]
    assert rep["table"] == {(2, -1): 1}


def test_hypothesis_weak_without_strong():
    # level 0 carries negative cohomology but the gluing window never
    # looks at level 0, so only the strong flag drops
    rep = check_hypothesis(sc_weak_only())
    assert not rep["strong"]
    assert rep["weak"]
    assert rep["table"] == {(0, -1): 1}


# --- pairs and the one-level functor ----------------------------------------


def test_mc_pair_validation_accepts_essential_lifts():
    for name, sc in cech_diagrams():
        for nu in (2, 3):
            rng = random.Random(nu)
            o = random_object(sc, truncated_poly(nu), rng)
            pair = phi1_essential_lift(o)
            rep = mc_pair_verify(pair)
            assert rep["ok"], (name, nu, rep)


def test_mc_pair_rejects_broken_shapes():
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    rng = random.Random(0)
    o = cech_trivialized_object(sc, A, rng)
    pair = phi1_essential_lift(o)
    ctx1 = pair.p.ctx
    # a constant term in the path violates the origin condition
    bad = pair.p.add(ctx1.term(0, 0, amono=A.maximal_basis[0]))
    with pytest.raises(DescentError):
        mc_pair_assemble(pair.sc, A, pair.x, bad)
    # perturbing the path endpoint breaks the comparison condition
    drift = elem_times_form(
        embed(random_elem(TensorCtx(sc.levels[1], A, ()), 0, rng), ("t",)),
        {((1,), ()): Q(1)},
    )
    tweaked = bch(drift, pair.p)
    rep = mc_pair_verify(
        type(pair)(pair.sc, A, pair.x, tweaked)
    )
    if rep["ok"]:
        # astronomically unlikely, but keep the test honest
        pytest.skip("random drift happened to stabilise the endpoint")
    assert not rep["condition"]


def test_phi1_roundtrip_is_the_identity():
    for name, sc in cech_diagrams():
        for nu in (2, 3):
            for seed in range(3):
                rng = random.Random(seed)
                o = random_object(sc, truncated_poly(nu), rng)
                back = phi1_obj(phi1_essential_lift(o))
                assert back.l.eq(o.l), (name, nu, seed)
                assert back.m.eq(o.m), (name, nu, seed)


def test_phi1_on_zero_path_gives_identity_gluing():
    # a base point with matching faces and the zero path descends to the
    # identity morphism glue
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    rng = random.Random(2)
    inj0 = sc.meta["inj"][0]
    tau = random_elem(TensorCtx(inj0[0].source, A, ()), 0, rng)
    x = None
    for j in inj0:
        piece = gauge(tau, TensorCtx(j.source, A, ()).zero()).map_lie(j)
        x = piece if x is None else x.add(piece)
    pair = mc_pair_assemble(sc, A, x, TensorCtx(sc.levels[1], A, ("t",)).zero())
    o = phi1_obj(pair)
    assert o.m.is_zero()
    assert totdel_verify(o)["ok"]


# --- fullness ----------------------------------------------------------------


def test_full_lift_satisfies_all_postconditions():
    for name, sc in cech_diagrams():
        for nu, seed in [(2, 0), (2, 4), (3, 1), (3, 2)]:
            A = truncated_poly(nu)
            rng = random.Random(seed)
            o0 = random_object(sc, A, rng)
            f = random_morphism(sc, o0, rng)
            h = phi1_full_lift(f)
            assert homotopy_verify(h)["ok"]
            assert homotopy_endpoint(h, 0).eq(phi1_essential_lift(f.source))
            assert homotopy_endpoint(h, 1).eq(phi1_essential_lift(f.target))
            assert morphism_equal(o0.l, phi1_mor(h), f.a), (name, nu, seed)


def test_full_lift_of_identity_is_constant():
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    o = cech_trivialized_object(sc, A, random.Random(1))
    h = phi1_full_lift(totdel_identity(o))
    assert h.z0.eq(embed(o.l, ("xi",)))
    assert h.z1.subs_values({0: 0}).eq(h.z1.subs_values({0: 1}))
    assert phi1_mor(h).is_zero()


def test_full_lift_of_inessential_self_morphism_has_equal_endpoints():
    """A zero log paired with a witness from the kernel of the
    stabiliser map is a self morphism; its lift keeps both ends at the
    same pair."""
    from mcdescent.builders import acyclic_complex
    from mcdescent.dgla import end_dgla
    from mcdescent.semicosimplicial import TotDelMorphism, totdel_mor_verify

    g, _ = end_dgla(acyclic_complex(), label="end acyclic")
    sc = sc_cech_identity(g=g, n_opens=3).truncate(2)
    A = truncated_poly(3)
    o = cech_trivialized_object(sc, A, random.Random(6))
    g1 = sc.levels[1]
    # a closed element scaled by the deepest ideal power: everything the
    # stabiliser map produces from it dies in the coefficients
    w_vec = g1.complex().cocycles(-1)[0]
    b = TensorCtx(g1, A, ()).from_lie_vec(-1, w_vec, amono=(2,))
    assert not b.is_zero()
    assert stabilizer_log(o.l.map_lie(sc.face(1, 0)), b).is_zero()
    f = TotDelMorphism(o, o, TensorCtx(sc.levels[0], A, ()).zero(), b)
    assert totdel_mor_verify(f)["ok"]
    h = phi1_full_lift(f)
    assert homotopy_endpoint(h, 0).eq(homotopy_endpoint(h, 1))


def test_full_lift_rejects_broken_witness():
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    rng = random.Random(7)
    o = cech_trivialized_object(sc, A, rng)
    f = random_morphism(sc, o, rng)
    from mcdescent.semicosimplicial import TotDelMorphism

    broken = TotDelMorphism(
        f.source,
        f.target,
        f.a,
        f.b.add(TensorCtx(sc.levels[1], A, ()).term(-1, 0, amono=A.maximal_basis[0])),
    )
    with pytest.raises(DescentError):
        phi1_full_lift(broken)


def test_descended_morphism_is_independent_of_the_representative():
    """Two lifts of inessentially different logs stay 2-homotopic and
    descend to equal morphisms."""
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    for seed in range(3):
        rng = random.Random(seed)
        o0 = cech_trivialized_object(sc, A, rng)
        ctx0 = TensorCtx(sc.levels[0], A, ())
        a = random_elem(ctx0, 0, rng)
        o1 = transported_target(sc, o0, a)
        f = totdel_mor_assemble(o0, o1, a)
        a2 = bch(a, stabilizer_log(o0.l, random_elem(ctx0, -1, rng)))
        f2 = totdel_mor_assemble(o0, o1, a2)
        assert totdel_mor_equal(f, f2)
        h, h2 = phi1_full_lift(f), phi1_full_lift(f2)
        ok, witness = paths_homotopic(o0.l, h.z0, h2.z0)
        assert ok and witness is not None
        assert morphism_equal(o0.l, phi1_mor(h), phi2_mor(h2))


def test_descent_of_composite_homotopy_is_the_composite():
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    for seed in (3, 11):
        rng = random.Random(seed)
        o0 = cech_trivialized_object(sc, A, rng)
        ctx0 = TensorCtx(sc.levels[0], A, ())
        f = random_morphism(sc, o0, rng)
        g = random_morphism(sc, f.target, rng)
        gf = totdel_compose(g, f)
        t_f = phi1_mor(phi1_full_lift(f))
        t_g = phi1_mor(phi1_full_lift(g))
        t_gf = phi1_mor(phi1_full_lift(gf))
        assert morphism_equal(o0.l, t_gf, bch(t_g, t_f))


# --- the two-level functor and essential surjectivity ------------------------


def test_phi2_on_zero_data_gives_the_zero_object():
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    e = tw_mc_assemble(
        sc,
        TensorCtx(sc.levels[0], A, ()).zero(),
        TensorCtx(sc.levels[1], A, ("t",)).zero(),
        TensorCtx(sc.levels[2], A, ("t", "s")).zero(),
    )
    o = phi2_obj(e)
    assert o.l.is_zero() and o.m.is_zero() and o.u.is_zero()


def test_phi2_sends_valid_inputs_to_valid_objects():
    diagrams = cech_diagrams() + [("constant sl2", sc_constant_sl2(2))]
    for name, sc in diagrams:
        for nu in (2, 3):
            for seed in range(2):
                rng = random.Random(seed)
                o = random_object(sc, truncated_poly(nu), rng)
                e = tw_lift(o)
                assert tw_mc_verify(e)["ok"], (name, nu, seed)
                out = phi2_obj(e)
                assert totdel_verify(out)["ok"], (name, nu, seed)


def test_lift_then_descend_returns_the_object_on_the_nose():
    for name, sc in cech_diagrams():
        for nu in (2, 3):
            for seed in range(4):
                rng = random.Random(seed)
                o = random_object(sc, truncated_poly(nu), rng)
                out = phi2_obj(tw_lift(o))
                assert out.l.eq(o.l), (name, nu, seed)
                assert out.m.eq(o.m), (name, nu, seed)
                assert out.u.eq(o.u), (name, nu, seed)


def test_lift_handles_nontrivial_coherence_witnesses():
    # seeds picked so the solved witness is nonzero at depth three
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    seen = 0
    for seed in (0, 2, 3):
        o = cech_trivialized_object(sc, A, random.Random(seed))
        if o.u.is_zero():
            continue
        seen += 1
        out = phi2_obj(tw_lift(o))
        assert out.u.eq(o.u)
    assert seen >= 2


def test_lifted_square_matches_both_edge_faces():
    sc = sc_cech_conjugated(n_opens=3, seed=5).truncate(2)
    A = truncated_poly(3)
    o = cech_trivialized_object(sc, A, random.Random(4))
    e = tw_lift(o)
    rep = tw_mc_verify(e)
    assert rep["ok"], rep


# --- full descent -------------------------------------------------------------


def test_descend_factors_through_the_decomposition():
    for name, sc in cech_diagrams():
        rng = random.Random(8)
        A = truncated_poly(3)
        w = random_tw_mc(sc, A, rng)
        o = phi_descend(w)
        assert totdel_verify(o)["ok"], name
        o2 = phi2_obj(tw_mc_from_element(w))
        assert o.l.eq(o2.l) and o.m.eq(o2.m) and o.u.eq(o2.u)


def test_descend_inverts_the_lift():
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A = truncated_poly(3)
    for seed in (0, 9):
        o = cech_trivialized_object(sc, A, random.Random(seed))
        w = tw_mc_to_element(tw_lift(o))
        back = phi_descend(w)
        assert back.l.eq(o.l) and back.m.eq(o.m) and back.u.eq(o.u)


def test_descend_truncates_deep_diagrams():
    sc = sc_cech_identity(n_opens=4)
    assert sc.top == 3
    w = random_tw_mc(sc, truncated_poly(2), random.Random(3))
    o = phi_descend(w)
    assert o.sc.top == 2
    assert totdel_verify(o)["ok"]


def test_descend_refuses_the_counterexample_with_a_report():
    sc = sc_counterexample()
    w = random_tw_mc(sc, square_zero(1), random.Random(0))
    with pytest.raises(DescentError) as info:
        phi_descend(w)
    rep = info.value.report
    assert rep is not None
    assert not rep["strong"] and not rep["weak"]
    assert rep["table"] == {(2, -1): 1}
    # the override descends anyway; the data itself is consistent
    o = phi_descend(w, require_hypothesis=False)
    assert totdel_verify(o)["ok"]


def test_descend_accepts_weak_only_diagrams():
    sc = sc_weak_only()
    w = random_tw_mc(sc, square_zero(2), random.Random(1))
    o = phi_descend(w)
    assert totdel_verify(o)["ok"]


# --- base change --------------------------------------------------------------


def test_base_change_commutes_with_the_descent_functor():
    sc = sc_cech_identity(n_opens=3).truncate(2)
    A, B = square_zero(2), square_zero(3)
    f = ArtinMorphism(
        A,
        B,
        [
            {(1, 0, 0): Q(1), (0, 1, 0): Q(2)},
            {(0, 0, 1): Q(1), (1, 0, 0): Q(-1)},
        ],
    )
    for seed in range(4):
        rng = random.Random(seed)
        o = cech_trivialized_object(sc, A, rng)
        pair = phi1_essential_lift(o)
        # also exercise a path that is not a straight line
        loop = elem_times_form(
            embed(random_elem(TensorCtx(sc.levels[1], A, ()), 0, rng), ("t",)),
            {((1,), ()): Q(1), ((2,), ()): Q(-1)},
        )
        curved = mc_pair_assemble(pair.sc, A, pair.x, bch(loop, pair.p))
        for pr in (pair, curved):
            lhs = phi1_obj(mc_pair_base_change(f, pr))
            rhs = totdel_base_change(f, phi1_obj(pr))
            assert lhs.l.eq(rhs.l)
            assert lhs.m.eq(rhs.m)


def test_base_change_preserves_object_validity():
    sc = sc_cech_conjugated(n_opens=3, seed=5).truncate(2)
    A, B = square_zero(3), square_zero(2)
    f = ArtinMorphism(A, B, [{(1, 0): Q(1)}, {(0, 1): Q(1)}, {(1, 0): Q(1), (0, 1): Q(-1)}])
    o = cech_trivialized_object(sc, A, random.Random(5))
    out = totdel_base_change(f, o)
    assert totdel_verify(out)["ok"]


# --- orbit comparison at square zero ------------------------------------------


def test_pi0_isomorphic_on_every_strong_builtin():
    for name, sc in strong_examples():
        sc2 = sc.truncate(2) if sc.top > 2 else sc
        for n in (1, 2):
            rep = pi0_compare_square_zero(sc2, square_zero(n))
            assert rep["isomorphic"], (name, n, rep)


def test_pi0_counts_the_twisted_line_bundle():
    rep = pi0_compare_square_zero(sc_twist(), square_zero(1))
    assert rep["tot_side"]["pi0_dim"] == 1
    assert rep["groupoid_side"]["pi0_dim"] == 1
    assert rep["isomorphic"]
    rep3 = pi0_compare_square_zero(sc_twist(), square_zero(3))
    assert rep3["tot_side"]["pi0_dim"] == 3
    assert rep3["isomorphic"]


def test_pi0_handles_a_redundant_open_with_a_witness_level():
    sc = cech_from_cover(cover_twist_redundant())
    rep = pi0_compare_square_zero(sc, square_zero(2))
    assert rep["tot_side"]["pi0_dim"] == 2
    assert rep["groupoid_side"]["pi0_dim"] == 2
    assert rep["isomorphic"]


def test_pi0_flags_the_counterexample():
    rep = pi0_compare_square_zero(sc_counterexample(), square_zero(1))
    assert rep["tot_side"]["pi0_dim"] == 1
    assert rep["groupoid_side"]["pi0_dim"] == 0
    assert not rep["isomorphic"]


def test_pi0_zero_diagram_gives_two_singletons():
    rep = pi0_compare_square_zero(sc_zero(), square_zero(2))
    assert rep["tot_side"]["pi0_dim"] == 0
    assert rep["groupoid_side"]["pi0_dim"] == 0
    assert rep["isomorphic"]


def test_pi0_rejects_fat_coefficients():
    with pytest.raises(DescentError):
        pi0_compare_square_zero(sc_twist(), truncated_poly(3))
