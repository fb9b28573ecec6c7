"""Factorization of univariate polynomials over tower levels.

Staged irreducibility testing, squarefree decomposition with p-th root
extraction, distinct-degree splitting, and Cantor-Zassenhaus equal-degree
splitting (quadratic-residue exponent for odd p, absolute trace for p = 2).
Randomness comes from explicit streams; every exported result is put into a
canonical order, so callers see deterministic output regardless of how the
splitting happened to proceed.

Also home to the Galois norm helpers: the norm of a polynomial from a tower
level down to a sub-level, and the decomposition of the norm of a linear as
a d1-th power of an irreducible of degree d2.
"""

from .poly import DensePoly, ModCtx
from .tower import Level

__all__ = [
    "is_irreducible", "squarefree_decomposition", "distinct_degree_split",
    "equal_degree_factor", "one_equal_degree_factor", "factor", "roots",
    "split_roots", "any_root", "any_root_in_subfield", "splits_completely",
    "norm_to_base", "norm_linear_decomposed", "poly_sort_key",
]


def poly_sort_key(f: DensePoly):
    """Canonical key: degree, then coefficient vector in rank order."""
    lv = f.level
    return (f.deg, tuple(lv.rank(c) for c in f.c))


def _next_frob(ctx: ModCtx, xi, xi1, K: int):
    """X^(K^(s+1)) mod f from X^(K^s): compose or repower, whichever is cheaper."""
    if ctx.n - 1 < 2 * K.bit_length():
        return ctx.compose(xi, xi1)
    return ctx.powmod(xi, K)


def is_irreducible(f: DensePoly) -> bool:
    """Stage s tests for factors of degree s via gcd(X^(K^s) - X, f)."""
    n = f.deg
    if n <= 0:
        return False
    if n == 1:
        return True
    f = f.monic()[0]
    if f.c[0] == 0:
        return False  # X divides
    L = f.level
    K = L.size
    ctx = ModCtx(f)
    x = DensePoly.x(L)
    xi1 = ctx.frob_pow_x(L.m)
    xi = xi1
    for s in range(1, n // 2 + 1):
        if (xi - x).gcd(f).deg > 0:
            return False
        if s < n // 2:
            xi = _next_frob(ctx, xi, xi1, K)
    return True


def _pth_root(f: DensePoly) -> DensePoly:
    """g with g(X)^p = f(X); f must have exponents divisible by p."""
    L = f.level
    p = L.p
    out = []
    for j in range(0, f.deg + 1, p):
        out.append(L.frob_p(f.c[j], L.m - 1) if L.m > 1 else f.c[j])
    if any(f.c[j] for j in range(f.deg + 1) if j % p):
        raise ValueError("polynomial is not a p-th power")
    return DensePoly(L, out)


def squarefree_decomposition(f: DensePoly):
    """List of (monic squarefree g, multiplicity) with f = lead * prod g^mult."""
    f = f.monic()[0]
    out = []
    e = 1
    while f.deg > 0:
        df = f.derivative()
        if df.is_zero:
            f = _pth_root(f)
            e *= f.level.p
            continue
        g = f.gcd(df)
        w = f // g
        i = 1
        while w.deg > 0:
            y = w.gcd(g)
            z = w // y
            if z.deg > 0:
                out.append((z, i * e))
            w = y
            g = g // y
            i += 1
        f = g
    out.sort(key=lambda t: (t[1],) + poly_sort_key(t[0]))
    return out


def distinct_degree_split(f: DensePoly):
    """List of (product of all irreducible factors of degree d, d), d ascending.

    f must be monic and squarefree.
    """
    L = f.level
    K = L.size
    out = []
    rem = f
    ctx = ModCtx(f)
    x = DensePoly.x(L)
    xi1 = ctx.frob_pow_x(L.m)
    xi = xi1
    s = 1
    while rem.deg >= 2 * s:
        g = (xi - x).gcd(rem)
        if g.deg > 0:
            out.append((g, s))
            rem = rem // g
        s += 1
        if rem.deg >= 2 * s:
            xi = _next_frob(ctx, xi, xi1, K)
    if rem.deg > 0:
        out.append((rem, rem.deg))
    return out


def _edf_split(g: DensePoly, d: int, rng):
    """One Cantor-Zassenhaus attempt; returns a proper factor or None."""
    L = g.level
    ctx = ModCtx(g)
    t = rng.poly(L, g.deg - 1)
    if t.deg < 1 and not t.c:
        return None
    if L.p == 2:
        acc = ctx.reduce(t)
        u = acc
        for _ in range(L.m * d - 1):
            u = ctx.sqrmod(u)
            acc = acc + u
        h = acc.gcd(g)
    else:
        e = (L.size ** d - 1) // 2
        s = ctx.powmod(t, e)
        h = (s - DensePoly.one(L)).gcd(g)
    if 0 < h.deg < g.deg:
        return h
    return None


def equal_degree_factor(f: DensePoly, d: int, rng):
    """All monic irreducible factors of f, each of degree d, sorted canonically."""
    if f.deg == d:
        return [f]
    if f.deg % d:
        raise ValueError("degree %d does not divide %d" % (d, f.deg))
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if g.deg == d:
            out.append(g)
            continue
        h = None
        while h is None:
            h = _edf_split(g, d, rng)
        stack.append(h)
        stack.append(g // h)
    out.sort(key=poly_sort_key)
    return out


def one_equal_degree_factor(f: DensePoly, d: int, rng):
    """One monic irreducible degree-d factor of an equal-degree input.

    Keeps only the smaller half of each split, so the cost stays near a
    single chain of games instead of the full factor tree.
    """
    if f.deg % d:
        raise ValueError("degree %d does not divide %d" % (d, f.deg))
    g = f.monic()[0]
    while g.deg > d:
        h = None
        while h is None:
            h = _edf_split(g, d, rng)
        other = g // h
        g = h if h.deg <= other.deg else other
    return g


def factor(f: DensePoly, rng):
    """Full factorization: list of (monic irreducible, multiplicity)."""
    if f.deg < 1:
        return []
    out = []
    for g, mult in squarefree_decomposition(f):
        for prod, d in distinct_degree_split(g):
            for irr in equal_degree_factor(prod, d, rng):
                out.append((irr, mult))
    out.sort(key=lambda t: poly_sort_key(t[0]))
    return out


def splits_completely(f: DensePoly) -> bool:
    """True iff f is a product of distinct linear factors over its level."""
    if f.deg < 1:
        return False
    f = f.monic()[0]
    if f.deg == 1:
        return True
    ctx = ModCtx(f)
    xi = ctx.frob_pow_x(f.level.m)
    return xi == ctx.reduce(DensePoly.x(f.level))


def roots(f: DensePoly, rng):
    """All roots in the level, as raw ints sorted by rank."""
    L = f.level
    if f.deg < 1:
        return []
    if f.deg == 1:
        return [L.neg(L.mul(f.c[0], L.inv(f.c[1])))]
    f = f.monic()[0]
    ctx = ModCtx(f)
    xi = ctx.frob_pow_x(L.m)
    g = (xi - ctx.reduce(DensePoly.x(L))).gcd(f)
    if g.deg == 0:
        return []
    lins = equal_degree_factor(g, 1, rng)
    rs = [L.neg(h.c[0]) for h in lins]
    rs.sort(key=L.rank)
    return rs


def split_roots(f: DensePoly, rng):
    """Roots of an f already certified to split completely, or None.

    Skips the splitting-field gcd of roots(); the only guard left is
    squarefreeness, since the equal-degree game assumes distinct factors.
    Returns None when f has a repeated root.
    """
    L = f.level
    if f.deg == 1:
        return [L.neg(L.mul(f.c[0], L.inv(f.c[1])))]
    f = f.monic()[0]
    if f.gcd(f.derivative()).deg > 0:
        return None
    lins = equal_degree_factor(f, 1, rng)
    rs = [L.neg(h.c[0]) for h in lins]
    rs.sort(key=L.rank)
    return rs


def any_root(f: DensePoly, rng):
    """One root in the level, or None.  Not canonical; callers canonicalize."""
    rs = roots(f, rng)
    return rs[0] if rs else None


def any_root_in_subfield(f: DensePoly, sub_deg: int, rng, tries: int = 512):
    """A root of f when f is known to split with all roots in the subfield
    of absolute degree sub_deg.  Skips the splitting-field gcd and runs the
    equal-degree game with the subfield exponent; trial polynomials get
    subfield coefficients via the trace, so the exponent argument applies.
    """
    L = f.level
    if L.m % sub_deg:
        raise ValueError("no subfield of degree %d in %s" % (sub_deg, L.name))
    if f.deg == 1:
        return L.neg(L.mul(f.c[0], L.inv(f.c[1])))
    g = f.monic()[0]
    steps = L.m // sub_deg
    sub_size = L.p ** sub_deg

    def sub_elt(stream):
        y = stream.field_elt(L)
        acc = y
        for j in range(1, steps):
            acc = L.add(acc, L.frob_p(y, sub_deg * j))
        return acc

    for attempt in range(tries):
        if g.deg == 1:
            return L.neg(g.c[0])
        stream = rng.child("subroot", attempt)
        ctx = ModCtx(g)
        t = DensePoly(L, [sub_elt(stream) for _ in range(g.deg)])
        if L.p == 2:
            acc = ctx.reduce(t)
            u = acc
            for _ in range(sub_deg - 1):
                u = ctx.sqrmod(u)
                acc = acc + u
            h = acc.gcd(g)
        else:
            s = ctx.powmod(t, (sub_size - 1) // 2)
            h = (s - DensePoly.one(L)).gcd(g)
        if 0 < h.deg < g.deg:
            g = h if 2 * h.deg <= g.deg else g // h
    raise RuntimeError("root isolation did not converge in %d tries" % tries)


# ---------------------------------------------------------------------------
# Galois norms down the tower.


def norm_to_base(f: DensePoly, dst: Level) -> DensePoly:
    """Product of the Galois conjugates of f over dst, projected to dst."""
    src = f.level
    if src is dst:
        return f
    if src.m % dst.m:
        raise ValueError("no norm from %s to %s" % (src.name, dst.name))
    rel = src.m // dst.m
    acc = f
    cur = f
    for _ in range(1, rel):
        cur = DensePoly(src, [src.frob_p(c, dst.m) for c in cur.c])
        acc = acc * cur
    return acc.map_level(dst)


def norm_linear_decomposed(r: int, src: Level, dst: Level):
    """Norm of (X - r) from src down to dst as (irreducible mu, d1).

    mu is the minimal polynomial of r over dst (degree d2) and the norm is
    mu^d1 with d1*d2 = src.m/dst.m.
    """
    if src.m % dst.m:
        raise ValueError("no norm from %s to %s" % (src.name, dst.name))
    rel = src.m // dst.m
    orbit = [r]
    cur = src.frob_p(r, dst.m)
    while cur != r:
        orbit.append(cur)
        cur = src.frob_p(cur, dst.m)
    d2 = len(orbit)
    if rel % d2:
        raise ArithmeticError("orbit size %d does not divide %d" % (d2, rel))
    mu = DensePoly(src, [1])
    for s in orbit:
        mu = mu * DensePoly(src, [src.neg(s), 1])
    return mu.map_level(dst), rel // d2
