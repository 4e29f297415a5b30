"""Maurer-Cartan elements, the gauge action, and homotopies.

Everything runs inside tensors L (x) m (x) forms where m is the maximal
ideal of a monomial-quotient Artin ring, so gauge exponentials and the
composition product (Baker-Campbell-Hausdorff) are finite sums. The
composition product is computed as log(e^a e^b) in the free associative
algebra on two letters, truncated at the nilpotency index, with each word
projected to a nested bracket (the classical (1/k) [x1,[x2,...,[x_{k-1},xk]]]
projection, valid because the logarithm is a Lie element).

Paths live in L[t,dt] (one form variable), squares in L[t,s,dt,ds]; both
use the full differential, so a path of gauges acting on a constant object
automatically produces the expected dt-correction terms.

The decomposition solvers write a Maurer-Cartan path (or square) that
starts at x as e^g * x with g in a rigid polynomial shape, solving level by
level in the coefficient filtration; each level is one exact linear system,
and the final residual is asserted to vanish identically.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .dgla import Elem, TensorCtx
from .forms import f_var
from .linalg import Mat
from .ratio import Q


class GaugeError(ValueError):
    pass


# --- generic linear solving over tensor elements ---------------------------


def elem_linear_solve(map_fn, target: Elem, basis: list):
    """Solve map_fn(sum c_j basis_j) = target for rational c_j.

    map_fn must be linear. Returns the solution element (deterministic:
    particular solution of the reduced system) or None when inconsistent.
    """
    ctx = target.ctx
    if not basis:
        return ctx.zero() if target.is_zero() else None
    images = [map_fn(b) for b in basis]
    keys = set(target.terms)
    for im in images:
        keys |= set(im.terms)
    keys = sorted(keys)
    pos = {k: i for i, k in enumerate(keys)}
    m = Mat(len(keys), len(basis))
    for j, im in enumerate(images):
        for k, c in im.terms.items():
            m.set_entry(pos[k], j, c)
    rhs = tuple(target.terms.get(k, Q(0)) for k in keys)
    sol = m.solve(rhs)
    if sol is None:
        return None
    out = basis[0].ctx.zero()
    for c, b in zip(sol[0], basis, strict=True):
        if c != 0:
            out = out.add(b.scale(c))
    return out


def lie_basis_elems(ctx: TensorCtx, deg: int, min_level: int = 1) -> list:
    """Basis of L^deg (x) m as constant elements of the context."""
    A = ctx.artin
    if A is None:
        raise GaugeError("a coefficient ring is required")
    out = []
    for am in A.basis:
        if sum(am) < min_level:
            continue
        for idx in range(ctx.dgla.dim(deg)):
            out.append(ctx.term(deg, idx, 1, am))
    return out


# --- Maurer-Cartan basics ---------------------------------------------------


def mc_residual(x: Elem) -> Elem:
    """dx + (1/2)[x, x] with the full differential of the context."""
    return x.d().add(x.bracket(x).scale(Q(1, 2)))


def is_mc(x: Elem) -> bool:
    return mc_residual(x).is_zero()


def _require_gauge_arg(a: Elem, who: str = "gauge argument"):
    if a.ctx.artin is None:
        raise GaugeError(f"{who} needs Artin coefficients")
    for (deg, _, am, _, S) in a.terms:
        if deg + len(S) != 0:
            raise GaugeError(f"{who} must have total degree 0")
        if sum(am) < 1:
            raise GaugeError(f"{who} must lie in the maximal ideal")


def gauge(a: Elem, x: Elem) -> Elem:
    """Gauge action e^a * x = x + sum_n ad_a^n/(n+1)! ([a,x] - da)."""
    _require_gauge_arg(a)
    a._chk(x)
    cur = a.bracket(x).sub(a.d())
    out = x
    n = 0
    nu = a.ctx.artin.nu
    while not cur.is_zero():
        if n >= nu:
            raise GaugeError("gauge series failed to terminate")
        out = out.add(cur.scale(Q(1, math.factorial(n + 1))))
        cur = a.bracket(cur)
        n += 1
    return out


def is_gauge_fixed(a: Elem, x: Elem) -> bool:
    return gauge(a, x).eq(x)


# --- composition product ----------------------------------------------------


def _word_mul(f: dict, g: dict, maxlen: int) -> dict:
    out: dict = {}
    for w1, c1 in f.items():
        for w2, c2 in g.items():
            if len(w1) + len(w2) > maxlen:
                continue
            w = w1 + w2
            v = out.get(w, Q(0)) + c1 * c2
            if v == 0:
                out.pop(w, None)
            else:
                out[w] = v
    return out


@lru_cache(maxsize=None)
def _bch_words(nu: int):
    """Words of log(e^A e^B) in the free associative algebra on letters
    0, 1, truncated to length < nu. Returns ((word, coeff), ...)."""
    maxlen = nu - 1
    if maxlen < 1:
        return ()
    expa = {(0,) * k: Q(1, math.factorial(k)) for k in range(maxlen + 1)}
    expb = {(1,) * k: Q(1, math.factorial(k)) for k in range(maxlen + 1)}
    prod = _word_mul(expa, expb, maxlen)
    u = dict(prod)
    u.pop((), None)
    log: dict = {}
    power = dict(u)
    for m in range(1, maxlen + 1):
        coeff = Q((-1) ** (m + 1), m)
        for w, c in power.items():
            v = log.get(w, Q(0)) + coeff * c
            if v == 0:
                log.pop(w, None)
            else:
                log[w] = v
        power = _word_mul(power, u, maxlen)
    return tuple(sorted(log.items()))


def bch(a: Elem, b: Elem) -> Elem:
    """Composition product a * b with e^{a*b} = e^a e^b, exact."""
    _require_gauge_arg(a)
    _require_gauge_arg(b)
    a._chk(b)
    nu = a.ctx.artin.nu
    out = a.ctx.zero()
    pair = (a, b)
    for w, c in _bch_words(nu):
        k = len(w)
        if k == 1:
            out = out.add(pair[w[0]].scale(c))
            continue
        r = pair[w[-1]]
        for i in range(k - 2, -1, -1):
            r = pair[w[i]].bracket(r)
            if r.is_zero():
                break
        if not r.is_zero():
            out = out.add(r.scale(c / k))
    return out


def bch_many(elems: list) -> Elem:
    """Left-to-right composition product of a list of gauge logs."""
    if not elems:
        raise GaugeError("empty product")
    out = elems[0]
    for e in elems[1:]:
        out = bch(out, e)
    return out


# --- stabilizers -------------------------------------------------------------


def stabilizer_log(x: Elem, u: Elem) -> Elem:
    """du + [x, u]: for Maurer-Cartan x this exponentiates into the
    stabilizer of x (the inessential part of the automorphism group)."""
    return u.d().add(x.bracket(u))


def extract_irrelevant(x: Elem, g: Elem):
    """Solve g = du + [x, u] for u in L^{-1} (x) m; None if impossible."""
    basis = lie_basis_elems(x.ctx, -1)
    return elem_linear_solve(lambda u: stabilizer_log(x, u), g, basis)


def morphism_equal(x: Elem, a1: Elem, a2: Elem) -> bool:
    """Equality of gauge morphisms out of x: a2 = a1 * (du + [x,u])."""
    defect = bch(a1.neg(), a2)
    return extract_irrelevant(x, defect) is not None


# --- embeddings between form contexts ----------------------------------------


def embed(x: Elem, new_vars, positions=None) -> Elem:
    """Reinterpret x in a larger form context; positions[i] says where the
    i-th old variable goes (default: the identity prefix)."""
    n = len(new_vars)
    if positions is None:
        positions = list(range(x.ctx.nforms))
    images = [f_var(p, n) for p in positions]
    return x.form_subst(images, tuple(new_vars))


def endpoint(x: Elem, var: int, value) -> Elem:
    """Pull back along form variable var := value (a rational)."""
    return x.subs_values({var: value})


# --- the shape solvers -------------------------------------------------------


def _tmax(rho: Elem, var: int) -> int:
    return max((k[3][var] for k in rho.terms), default=0)


def _shape_1var(ctx: TensorCtx, level: int, tmax: int) -> list:
    A = ctx.artin
    L = ctx.dgla
    out = []
    for am in A.monomials_of_level(level):
        for e in range(1, tmax + 1):
            for idx in range(L.dim(0)):
                out.append(ctx.term(0, idx, 1, am, (e,), ()))
    return out


def _shape_2var(ctx: TensorCtx, level: int, tb: int, sb: int) -> list:
    A = ctx.artin
    L = ctx.dgla
    out = []
    for am in A.monomials_of_level(level):
        for et in range(tb + 1):
            for es in range(sb + 1):
                if et + es == 0:
                    continue
                for idx in range(L.dim(0)):
                    out.append(ctx.term(0, idx, 1, am, (et, es), ()))
        for et in range(1, tb + 1):
            for es in range(sb + 1):
                for idx in range(L.dim(-1)):
                    out.append(ctx.term(-1, idx, 1, am, (et, es), (1,)))
    return out


def _decompose(x: Elem, xi: Elem, shape_fn) -> Elem:
    A = xi.ctx.artin
    if A is None:
        raise GaugeError("decomposition needs Artin coefficients")
    g = x
    log = xi.ctx.zero()
    for level in range(1, A.nu):
        rho = xi.sub(g)
        if rho.is_zero():
            break
        lvl = rho.min_artin_level()
        if lvl < level:
            raise GaugeError(
                f"residual dropped below the current level ({lvl} < {level})"
            )
        if lvl > level:
            continue
        piece = rho.artin_level_component(level)
        basis = shape_fn(level, piece)
        delta = elem_linear_solve(lambda d: d.d().neg(), piece, basis)
        if delta is None:
            raise GaugeError(
                f"no shape solution at coefficient level {level}; "
                "the input is not a gauge path out of x"
            )
        log = log.add(delta)
        g = gauge(log, x)
    if not xi.sub(g).is_zero():
        raise GaugeError("decomposition left a nonzero residual")
    return log


def decompose_path(x: Elem, xi: Elem) -> Elem:
    """Write a Maurer-Cartan path xi(t,dt) with xi(0) = x as e^{p(t)} * x.

    x lives in the plain context, xi in a one-variable form context.
    Returns p with every monomial divisible by t and no dt part.
    """
    if xi.ctx.nforms != 1:
        raise GaugeError("expected a one-variable path")
    if not endpoint(xi, 0, 0).eq(x.form_subst([], ())):
        raise GaugeError("path does not start at the given object")
    xe = embed(x.form_subst([], ()), xi.ctx.form_vars, positions=[])

    def shapes(level, piece):
        return _shape_1var(xi.ctx, level, _tmax(piece, 0) + 1)

    return _decompose(xe, xi, shapes)


def decompose_square(x: Elem, xi: Elem) -> Elem:
    """Write a Maurer-Cartan square xi(t,s,dt,ds) with xi(0,0) = x as
    e^{r} * x with r = r0(t,s) + r1(t,s) t ds, r0 vanishing at the origin.
    """
    if xi.ctx.nforms != 2:
        raise GaugeError("expected a two-variable square")
    origin = endpoint(endpoint(xi, 1, 0), 0, 0)
    if not origin.eq(x.form_subst([], ())):
        raise GaugeError("square does not start at the given object")
    xe = embed(x.form_subst([], ()), xi.ctx.form_vars, positions=[])

    def shapes(level, piece):
        return _shape_2var(
            xi.ctx, level, _tmax(piece, 0) + 1, _tmax(piece, 1) + 1
        )

    return _decompose(xe, xi, shapes)


# --- paths (homotopies) -------------------------------------------------------


def path_from_gauge(x: Elem, a: Elem, var: str = "t") -> Elem:
    """The line t |-> e^{t a} * x as a Maurer-Cartan path."""
    ctx1 = x.ctx.with_vars((var,))
    ae = embed(a, (var,), positions=[])
    # multiply a by the coordinate t
    terms = {}
    for (deg, idx, am, pm, S), c in ae.terms.items():
        terms[(deg, idx, am, (pm[0] + 1,), S)] = c
    ta = Elem(ctx1, terms)
    xe = embed(x, (var,), positions=[])
    return gauge(ta, xe)


def verify_path(x: Elem, y: Elem, r: Elem) -> bool:
    """r is a Maurer-Cartan path from x to y."""
    return (
        is_mc(r)
        and endpoint(r, 0, 0).eq(x.form_subst([], ()))
        and endpoint(r, 0, 1).eq(y.form_subst([], ()))
    )


def gauge_from_path(x: Elem, r: Elem) -> Elem:
    """Endpoint gauge of a path: a with e^a * x = r(1), from the canonical
    decomposition r = e^{p(t)} * x."""
    p = decompose_path(x, r)
    return endpoint(p, 0, 1)


def invert_path(r: Elem) -> Elem:
    """Reverse a path by pulling back along t := 1 - t."""
    from .forms import f_const, f_sub

    img = f_sub(f_const(1, 1), f_var(0, 1))
    return r.form_subst([img], r.ctx.form_vars)


def compose_paths(x: Elem, r1: Elem, r2: Elem) -> Elem:
    """Composite of r1: x -> y and r2: y -> z, via composition of the
    decomposed gauge logs."""
    y = endpoint(r1, 0, 1)
    p1 = decompose_path(x, r1)
    p2 = decompose_path(y, r2)
    xe = embed(x, r1.ctx.form_vars, positions=[])
    return gauge(bch(p2, p1), xe)


# --- squares (homotopies between homotopies) -----------------------------------


def verify_square(x: Elem, y: Elem, r1: Elem, r2: Elem, w: Elem) -> bool:
    """w(t,s) is a Maurer-Cartan square: r1 at s=0, r2 at s=1, constant in
    s at t = 0 (value x) and t = 1 (value y)."""
    if not is_mc(w):
        return False
    if not endpoint(w, 1, 0).eq(r1) or not endpoint(w, 1, 1).eq(r2):
        return False
    xs = embed(x, ("s",), positions=[])
    ys = embed(y, ("s",), positions=[])
    return endpoint(w, 0, 0).eq(xs) and endpoint(w, 0, 1).eq(ys)


def square_from_irrelevant(x: Elem, a: Elem, u: Elem) -> Elem:
    """Witness square between the line of a and the line of
    a * (du + [x,u]): t |-> e^{t(a * (d(su) + [x, su]))} * x."""
    ctx2 = x.ctx.with_vars(("t", "s"))
    xe = embed(x, ("t", "s"), positions=[])
    ue = embed(u, ("t", "s"), positions=[])
    su = Elem(
        ctx2,
        {
            (deg, idx, am, (pm[0], pm[1] + 1), S): c
            for (deg, idx, am, pm, S), c in ue.terms.items()
        },
    )
    sigma = stabilizer_log(xe, su)
    c = bch(embed(a, ("t", "s"), positions=[]), sigma)
    tc = Elem(
        ctx2,
        {
            (deg, idx, am, (pm[0] + 1, pm[1]), S): cc
            for (deg, idx, am, pm, S), cc in c.terms.items()
        },
    )
    return gauge(tc, xe)


def _const_in_s(g: Elem) -> Elem:
    """Embed a one-variable log (t) as a square log constant in s."""
    return embed(g, ("t", "s"), positions=[0])


def square_symmetry(w: Elem) -> Elem:
    """Flip a square along s := 1 - s, swapping its two path faces."""
    from .forms import f_const, f_sub

    imgs = [f_var(0, 2), f_sub(f_const(1, 2), f_var(1, 2))]
    return w.form_subst(imgs, w.ctx.form_vars)


def square_transitivity(x: Elem, w1: Elem, w2: Elem) -> Elem:
    """Given squares between r1, r2 and between r2, r3 (same endpoints),
    produce a square between r1 and r3."""
    r1log = decompose_square(x, w1)
    r2log = decompose_square(x, w2)
    q = endpoint(r2log, 1, 0)  # the log of the shared middle path
    xe = embed(x, ("t", "s"), positions=[])
    c = bch(r2log, bch(_const_in_s(q).neg(), r1log))
    return gauge(c, xe)


def square_compose(x: Elem, w1: Elem, w2: Elem) -> Elem:
    """Horizontal composition: w1 between paths x -> y, w2 between paths
    y -> z (with matching middle object), giving a square between the
    composite paths.

    The composites are formed face by face and the witness is rebuilt
    from the homotopy decision; the defect of the composites is a
    product of inessential logs (one conjugated from y back to x, which
    stays inessential), so the decision always succeeds on valid input.
    """
    xq = x.form_subst([], ())
    comp1 = compose_paths(xq, endpoint(w1, 1, 0), endpoint(w2, 1, 0))
    comp2 = compose_paths(xq, endpoint(w1, 1, 1), endpoint(w2, 1, 1))
    ok, w = paths_homotopic(xq, comp1, comp2)
    if not ok:
        raise GaugeError("face composites are not homotopic; invalid input")
    return w


def paths_homotopic(x: Elem, r1: Elem, r2: Elem):
    """Decide whether two paths with the same endpoints bound a square.

    Returns (True, witness) or (False, None). The criterion is that the
    endpoint gauges differ by an element of the inessential stabilizer;
    when they do, the witness square is assembled from straight-line
    interpolations and the stabilizer square.
    """
    p1 = decompose_path(x, r1)
    p2 = decompose_path(x, r2)
    a1 = endpoint(p1, 0, 1)
    a2 = endpoint(p2, 0, 1)
    defect = bch(a1.neg(), a2)
    u = extract_irrelevant(x.form_subst([], ()), defect)
    if u is None:
        return False, None
    xe = embed(x, ("t", "s"), positions=[])
    ctx2 = xe.ctx

    def s_times(e):
        return Elem(
            ctx2,
            {
                (deg, idx, am, (pm[0], pm[1] + 1), S): c
                for (deg, idx, am, pm, S), c in e.terms.items()
            },
        )

    def interp(plog, afinal):
        # straight line (1-s) p(t) + s t a between a path log and a line log
        pe = _const_in_s(plog)
        ae = embed(afinal, ("t", "s"), positions=[])
        ta = Elem(
            ctx2,
            {
                (deg, idx, am, (pm[0] + 1, pm[1]), S): c
                for (deg, idx, am, pm, S), c in ae.terms.items()
            },
        )
        return pe.sub(s_times(pe)).add(s_times(ta))

    w_left = gauge(interp(p1, a1), xe)  # r1 to the line of a1
    w_mid = square_from_irrelevant(x.form_subst([], ()), a1, u)
    w_right = square_symmetry(gauge(interp(p2, a2), xe))  # line of a2 to r2
    w = square_transitivity(x, square_transitivity(x, w_left, w_mid), w_right)
    return True, w


def square_defect_witness(x: Elem, w: Elem):
    """From a square between r1 and r2, extract u with
    a2 = a1 * (du + [x,u]) for the endpoint gauges. Returns (a1, a2, u)."""
    r = decompose_square(x, w)
    a1 = endpoint(endpoint(r, 1, 0), 0, 1)
    a2 = endpoint(endpoint(r, 1, 1), 0, 1)
    defect = bch(a1.neg(), a2)
    u = extract_irrelevant(x.form_subst([], ()), defect)
    if u is None:
        raise GaugeError("square exists but defect is not inessential")
    return a1, a2, u


# --- square-zero coefficients ---------------------------------------------------


def orbit_decide_square_zero(x: Elem, y: Elem):
    """Gauge equivalence over a square-zero ring: the action reduces to
    x - da, so equivalence is a single linear solve. Returns (bool, a)."""
    A = x.ctx.artin
    if A is None or not A.is_square_zero():
        raise GaugeError("coefficient ring must be square-zero")
    if not (is_mc(x) and is_mc(y)):
        raise GaugeError("inputs must satisfy the Maurer-Cartan equation")
    diff = x.sub(y)
    basis = lie_basis_elems(x.ctx, 0)
    a = elem_linear_solve(lambda e: e.d(), diff, basis)
    if a is None:
        return False, None
    return True, a
