"""Degree-2 elimination over a tower level.

The working identity, entirely in K[X] for K the level's field:

    h1 * f  =  (X + a)(h1 X^q - h0)  +  W,
    f       =  X^(q+1) + a X^q + b X + c,
    W       =  (X + a) h0 + (b X + c) h1.

Whenever (X + a, bX + c) lies in the lattice of pairs (w0, w1) with
w0 h0 + w1 h1 == 0 mod Q, the remainder W equals kappa * Q * L with L monic
linear or constant; if f additionally splits into distinct linear factors,

    Q == kappa^-1 * h1 * prod (X - r_i) * L^-1    (mod h1 X^q - h0),

which is the Rewrite this module produces.  The split condition depends only
on B(a) = (b - a^q)^(q+1) / (c - ab)^q landing in the level's splitting set,
so candidates can be filtered by a precomputed set at small levels or found
by root-finding the degree q^2+q condition polynomial for a sampled B.

Trap predicates (refusals) and the two root conditions that certify them are
implemented alongside; they gate which quadratics the descent may eliminate.
"""

from .tower import Level, FieldElt
from .poly import DensePoly, ModCtx
from . import factor as factorlib
from . import bluher as bluherlib

__all__ = [
    "Lattice2", "TrapReport", "Rewrite", "StarConditionData",
    "lattice_basis", "is_good", "check_star_conditions",
    "eliminate_quadratic", "verify_rewrite", "norm_elt",
    "TrapError", "TrapLevel0", "TrapLevelKd", "TrapSubfield", "TrapH1Root",
    "Exhausted", "EliminationError", "BSET_CAP",
]

BSET_CAP = 1 << 13


class EliminationError(RuntimeError):
    """Structural failure: bad inputs or a collapsed lattice."""


class TrapError(RuntimeError):
    """Q is refused: one of the trap flags is set."""

    def __init__(self, msg, report):
        super().__init__(msg)
        self.report = report


class TrapLevel0(TrapError):
    pass


class TrapLevelKd(TrapError):
    pass


class TrapSubfield(TrapError):
    pass


class TrapH1Root(TrapError):
    pass


class Exhausted(RuntimeError):
    """No splitting candidate within budget; caller should backtrack."""

    def __init__(self, msg, stats=None):
        super().__init__(msg)
        self.stats = stats or {}


class Lattice2:
    """Solutions (w0, w1) of w0 h0 + w1 h1 == 0 mod Q, in reduced basis form.

    Nondegenerate: basis (1, u0 X + u1), (X, v0 X + v1).  Degenerate: a
    constant pair (w0, w1) already lies in the lattice, with
    w0 h0 + w1 h1 = cv * Q for a nonzero constant cv.
    """

    __slots__ = ("level", "Q", "degenerate", "u0", "u1", "v0", "v1",
                 "w0", "w1", "cv")

    def __init__(self, level, Q, degenerate, **kw):
        self.level = level
        self.Q = Q
        self.degenerate = degenerate
        self.u0 = kw.get("u0")
        self.u1 = kw.get("u1")
        self.v0 = kw.get("v0")
        self.v1 = kw.get("v1")
        self.w0 = kw.get("w0")
        self.w1 = kw.get("w1")
        self.cv = kw.get("cv")


class TrapReport:
    __slots__ = ("level0", "level_kd", "subfield_image", "h1_root",
                 "degenerate")

    def __init__(self, level0, level_kd, subfield_image, h1_root, degenerate):
        self.level0 = level0
        self.level_kd = level_kd
        self.subfield_image = subfield_image
        self.h1_root = h1_root
        self.degenerate = degenerate

    @property
    def good(self):
        return not (self.level0 or self.level_kd or self.subfield_image
                    or self.h1_root or self.degenerate)

    def flags(self):
        return {k: getattr(self, k) for k in self.__slots__}

    def __repr__(self):
        on = [k for k in self.__slots__ if getattr(self, k)]
        return "TrapReport(%s)" % (", ".join(on) or "good")


class Rewrite:
    """One verified elimination step.

    factors is a list of (monic DensePoly, exponent, Level) triples; the
    semantic identity, with D the relative degree of `level` over level 1:

        norm(lhs) == norm(unit) * h1^(h1_exp*D) * prod norm(f)^e   (mod I)
    """

    __slots__ = ("level", "lhs", "factors", "h1_exp", "unit")

    def __init__(self, level, lhs, factors, h1_exp, unit):
        self.level = level
        self.lhs = lhs
        self.factors = factors
        self.h1_exp = h1_exp
        self.unit = unit

    def __repr__(self):
        degs = [(f.deg, e) for f, e, _ in self.factors]
        return "Rewrite(deg %d at %s -> %s, h1^%d)" % (
            self.lhs.deg, self.level.name, degs, self.h1_exp)


class StarConditionData:
    __slots__ = ("aF", "bF", "cF", "dF", "rho1", "rho2")

    def __init__(self, aF, bF, cF, dF, rho1, rho2):
        self.aF = aF
        self.bF = bF
        self.cF = cF
        self.dF = dF
        self.rho1 = rho1
        self.rho2 = rho2


# ---------------------------------------------------------------------------
# per-(setup, level) cached data


class _LevelData:
    __slots__ = ("level", "h0", "h1", "bset", "x", "h1_monic")

    def __init__(self, s, level):
        self.level = level
        self.h0 = s.h0.map_level(level)
        self.h1 = s.h1.map_level(level)
        self.x = DensePoly.x(level)
        self.bset = None  # built lazily; None means "not yet decided"
        m, _ = s.h1.monic()
        self.h1_monic = m.map_level(level)


def _ldata(s, level) -> _LevelData:
    cache = getattr(s, "_elim_cache", None)
    if cache is None:
        cache = {}
        s._elim_cache = cache
    ld = cache.get(level.m)
    if ld is None:
        ld = _LevelData(s, level)
        cache[level.m] = ld
    return ld


def _bset(s, level, cap=BSET_CAP):
    ld = _ldata(s, level)
    if ld.bset is None:
        ld.bset = bluherlib.bluher_set(level, cap) or ()
    return ld.bset or None


def norm_elt(src: Level, dst: Level, x: int) -> int:
    """Field norm of x from src down to dst, as a raw dst element."""
    if src is dst:
        return x
    rel, r = divmod(src.m, dst.m)
    if r:
        raise ValueError("no norm from %s to %s" % (src.name, dst.name))
    acc = x
    c = x
    for _ in range(rel - 1):
        c = src.frob_p(c, dst.m)
        acc = src.mul(acc, c)
    emb = src.tower.embedding(dst, src)
    return emb.project(acc)


# ---------------------------------------------------------------------------
# lattice and trap predicates


def _check_quadratic(s, Q, require_irreducible=True):
    level = Q.level
    if Q.deg != 2 or not Q.is_monic:
        raise EliminationError("Q must be a monic quadratic")
    ld = _ldata(s, level)
    if s.h1.deg == 2 and Q == ld.h1_monic:
        raise EliminationError("Q is a scalar multiple of h1")
    if require_irreducible and not factorlib.is_irreducible(Q):
        raise EliminationError("Q is reducible")
    return ld


def lattice_basis(s, Q: DensePoly, check: bool = True) -> Lattice2:
    """Reduced basis of the relation lattice of Q, or its degenerate witness."""
    ld = _check_quadratic(s, Q, require_irreducible=check)
    level = Q.level
    ctx = ModCtx(Q)
    H0 = ctx.reduce(ld.h0)
    H1 = ctx.reduce(ld.h1)
    if H1.is_zero or Q.gcd(ld.h1).deg > 0:
        raise EliminationError("h1 shares a root with Q")
    w = ctx.mulmod(-H0, ctx.invmod(H1))  # -h0/h1 mod Q, degree <= 1
    u1 = w.c[0] if w.deg >= 0 else 0
    u0 = w.c[1] if w.deg >= 1 else 0
    if u0 == 0:
        # constant pair (1, u1): h0 + u1 h1 must be a nonzero multiple of Q
        comb = ld.h0 + ld.h1.mul_elt(u1)
        if comb.is_zero:
            raise EliminationError("lattice collapses: h0 + u1*h1 = 0")
        if comb.deg != 2:
            raise EliminationError("degenerate combination is not deg 2")
        cv = comb.lead
        if comb != Q.mul_elt(cv):
            raise EliminationError("degenerate combination is not a multiple of Q")
        return Lattice2(level, Q, True, u0=u0, u1=u1, w0=1, w1=u1, cv=cv)
    q1 = Q.c[1]
    q0 = Q.c[0]
    v0 = level.sub(u1, level.mul(u0, q1))
    v1 = level.neg(level.mul(u0, q0))
    return Lattice2(level, Q, False, u0=u0, u1=u1, v0=v0, v1=v1)


def _frob_chain(s, ctx: ModCtx, level: Level, steps: int):
    """X^(q^j) mod Q for j = 0..steps, via repeated q-th powers."""
    q = s.q
    xs = [ctx.pow_x(1)]
    cur = xs[0]
    for _ in range(steps):
        cur = ctx.powmod(cur, q)
        xs.append(cur)
    return xs


def is_good(s, Q: DensePoly, check_irreducible: bool = False):
    """Trap flags for an irreducible even-degree Q; good means all clear."""
    level = Q.level
    if Q.deg < 2 or Q.deg % 2:
        raise EliminationError("goodness is defined for even degree only")
    if not Q.is_monic:
        raise EliminationError("Q must be monic")
    if check_irreducible and not factorlib.is_irreducible(Q):
        raise EliminationError("Q is reducible")
    ld = _ldata(s, level)
    d = Q.deg // 2
    kDd = s.k * (level.m // (s.i * s.k)) * d

    h1_root = ld.h1.deg > 0 and Q.gcd(ld.h1).deg > 0
    ctx = ModCtx(Q)

    xs = _frob_chain(s, ctx, level, kDd + 1)
    # level 0: Q shares a factor with h1 X^q - h0
    t0 = ctx.reduce(ld.h1 * xs[1] - ld.h0)
    level0 = t0.is_zero or Q.gcd(t0).deg > 0
    # level kD*d: Q divides h1 X^(q^(kDd+1)) - h0
    tk = ctx.reduce(ld.h1 * xs[kDd + 1] - ld.h0)
    level_kd = tk.is_zero

    degenerate = False
    subfield_image = False
    if h1_root:
        subfield_image = True  # h0/h1 undefined mod Q; flagged via h1_root
    else:
        H0 = ctx.reduce(ld.h0)
        H1 = ctx.reduce(ld.h1)
        sf = ctx.mulmod(H0, ctx.invmod(H1))
        # sf^(q^kDd) via composition with the cached Frobenius power of X
        sfk = ctx.compose(sf, xs[kDd])
        subfield_image = sfk == sf
        if Q.deg == 2:
            degenerate = sf.deg < 1
    report = TrapReport(level0, level_kd, subfield_image, h1_root, degenerate)
    return report.good, report


def check_star_conditions(s, Q: DensePoly, rng=None):
    """The two root conditions certifying Q is not a level-0 / level-kD trap.

    Returns (star, starstar, data); condition TRUE means "holds", i.e. the
    corresponding trap is certified absent.  The result is a pure function
    of (setup, Q): when no stream is given, one is derived from Q itself.
    """
    if rng is None:
        from .rng import Stream
        rng = Stream.from_seed(0x57A12, "star-roots", Q.level.name,
                               *[str(c) for c in Q.c])
    lat = lattice_basis(s, Q)
    if lat.degenerate:
        raise EliminationError("star conditions need a nondegenerate lattice")
    level = Q.level
    tw = level.tower
    up = tw.level(2 * (level.m // (s.i * s.k)))
    aF = level.neg(lat.u0)
    bF = level.sub(lat.u1, lat.v0)
    cF = lat.v1
    dF = level.neg(lat.v0)
    # roots of aF*A^2 + bF*A + cF = aF * Q(-A); they live one level up
    F = DensePoly(up, [tw.embedding(level, up).apply(x)
                       for x in (cF, bF, aF)])
    rts = factorlib.roots(F, rng)
    if len(rts) != 2:
        raise ArithmeticError("trap certificate quadratic must have 2 roots upstairs")
    rho1, rho2 = rts
    emb = tw.embedding(level, up)
    aU, dU = emb.apply(aF), emb.apply(dF)
    r1q = up.frob_p(rho1, s.i)
    star = up.add(up.add(r1q, up.mul(aU, rho2)), dU) != 0
    starstar = up.add(up.add(r1q, up.mul(aU, rho1)), dU) != 0
    data = StarConditionData(
        FieldElt(level, aF), FieldElt(level, bF), FieldElt(level, cF),
        FieldElt(level, dF), FieldElt(up, rho1), FieldElt(up, rho2))
    return star, starstar, data


# ---------------------------------------------------------------------------
# the elimination search


def _candidate(s, ld, lat, a, roots_rng, stats):
    """Try one value of a; return (roots, cofactor, kappa) or None."""
    level = ld.level
    q = s.q
    b = level.add(level.mul(lat.u0, a), lat.v0)
    c = level.add(level.mul(lat.u1, a), lat.v1)
    ab = level.mul(a, b)
    if c == ab:
        return None
    aq = level.frob_p(a, s.i)
    if b == aq:
        return None
    if ld.bset:
        bma = level.sub(b, aq)
        cmab = level.sub(c, ab)
        B = level.mul(level.pow_(bma, q + 1),
                      level.inv(level.pow_(cmab, q)))
        if B not in ld.bset:
            return None
    f = DensePoly(level, [c, b] + [0] * (q - 2) + [a, 1])
    if not ld.bset:
        if not factorlib.splits_completely(f):
            return None
    stats["splits"] += 1
    rts = factorlib.split_roots(f, roots_rng)
    if rts is None or len(rts) != q + 1:
        return None  # repeated roots; not a usable split
    num = (ld.x + DensePoly(level, [a])) * ld.h0 + DensePoly(level, [c, b]) * ld.h1
    if num.is_zero:
        return None
    quo, rem = num.divrem(lat.Q)
    if not rem.is_zero:
        raise ArithmeticError("lattice candidate numerator not divisible by Q")
    kappa = quo.lead
    cof = None
    if quo.deg == 1:
        cof, _ = quo.monic()
    return rts, cof, kappa


def _build_rewrite(s, ld, Q, rts, cof, kappa):
    level = ld.level
    factors = [(DensePoly(level, [level.neg(r), 1]), 1, level) for r in rts]
    if cof is not None:
        factors.append((cof, -1, level))
    unit = level.inv(kappa)
    return Rewrite(level, Q, factors, 1, FieldElt(level, unit))


def _spread_pow_q(f: DensePoly, q: int, i: int) -> DensePoly:
    """f^q for f over a level of characteristic p, q = p^i (coefficientwise)."""
    L = f.level
    if f.is_zero:
        return f
    out = [0] * (f.deg * q + 1)
    for j, cj in enumerate(f.c):
        if cj:
            out[j * q] = L.frob_p(cj, i % L.m)
    return DensePoly(L, out)


def _condition_poly(s, ld, lat, B):
    """The degree q^2+q polynomial whose roots are the a giving value B."""
    level = ld.level
    q = s.q
    neg1 = level.neg(level.from_coeffs([1]))
    # S = -A^q + u0 A + v0 ;  T = -u0 A^2 + (u1 - v0) A + v1
    S = DensePoly(level, [lat.v0, lat.u0] + [0] * (q - 2) + [neg1])
    T = DensePoly(level, [lat.v1, level.sub(lat.u1, lat.v0), level.neg(lat.u0)])
    P = _spread_pow_q(S, q, s.i) * S - _spread_pow_q(T, q, s.i).mul_elt(B)
    Pm, _ = P.monic()
    return Pm


def _roots_in_level(P: DensePoly, rng):
    level = P.level
    ctx = ModCtx(P)
    t = ctx.pow_x(level.size) - DensePoly.x(level)
    g = P.gcd(t)
    if g.deg <= 0:
        return []
    return factorlib.roots(g, rng)


def eliminate_quadratic(s, Q: DensePoly, rng, policy: str = "auto",
                        elim_budget: int = 4096, vet_budget: int = 64,
                        vetter=None, check_good: bool = True) -> Rewrite:
    """Rewrite an irreducible good quadratic over the factor-base shapes.

    policy: "auto" (random candidates, exhaustive fallback at small levels),
    "random", "exhaust", or "bluher" (sample a splitting constant B, then
    root-find the condition polynomial in a).  A vetter, when supplied, may
    reject an otherwise-valid candidate (descendant goodness); rejections
    consume vet_budget.  check_good=False skips the trap gate; only for
    callers that have already vetted this exact Q.
    """
    level = Q.level
    ld = _check_quadratic(s, Q)
    if check_good:
        good, report = is_good(s, Q)
        if report.h1_root:
            raise TrapH1Root("h1 shares a root with Q", report)
        if report.level0:
            raise TrapLevel0("Q is a level-0 trap", report)
        if report.level_kd:
            raise TrapLevelKd("Q is a level-kD trap", report)

    lat = lattice_basis(s, Q, check=False)
    if lat.degenerate:
        # free rewrite: h1 * (X + u1^(1/q))^q == h0 + u1 h1 == cv * Q mod bracket
        root_w1 = level.frob_p(lat.w1, (level.m - s.i % level.m) % level.m)
        fct = DensePoly(level, [root_w1, 1])
        unit = level.inv(lat.cv)
        return Rewrite(level, Q, [(fct, s.q, level)], 1, FieldElt(level, unit))
    if check_good and report.subfield_image:
        raise TrapSubfield("h0/h1 maps Q's roots into the halfway subfield",
                           report)

    if policy not in ("auto", "random", "exhaust", "bluher"):
        raise ValueError("unknown policy %r" % policy)
    if ld.bset is None and policy in ("auto", "random"):
        _bset(s, level)

    stats = {"trials": 0, "splits": 0, "vetoes": 0, "b_samples": 0}
    vets = 0

    def finish(found):
        nonlocal vets
        rts, cof, kappa = found
        if vetter is not None and not vetter(rts, cof):
            stats["vetoes"] += 1
            vets += 1
            if vets >= vet_budget:
                raise Exhausted("descendant-goodness budget exhausted", stats)
            return None
        return _build_rewrite(s, ld, Q, rts, cof, kappa)

    def try_a(a, attempt):
        stats["trials"] += 1
        found = _candidate(s, ld, lat, a, rng.child("roots", attempt), stats)
        if found is None:
            return None
        return finish(found)

    if policy in ("auto", "random"):
        budget = elim_budget
        if policy == "auto" and level.size <= (1 << 16):
            # the exhaustive fallback is cheap here; don't over-invest in
            # random trials that are doomed when no candidate splits at all
            budget = min(elim_budget, max(32, 2 * level.size))
        for attempt in range(budget):
            rw = try_a(rng.field_elt(level), attempt)
            if rw is not None:
                return rw
        if policy == "auto" and level.size <= (1 << 16):
            policy = "exhaust"
        else:
            raise Exhausted("no splitting candidate in %d trials" % budget,
                            stats)
    if policy == "exhaust":
        if level.size > (1 << 22):
            raise EliminationError("level too large for exhaustive scan")
        for r in range(level.size):
            rw = try_a(level.from_rank(r), -r - 1)
            if rw is not None:
                return rw
        raise Exhausted("exhaustive scan found no splitting candidate", stats)
    # policy == "bluher"
    for attempt in range(elim_budget):
        u = rng.field_elt(level)
        B = bluherlib._map_raw(level, s.i, u)
        if B is None:
            continue
        stats["b_samples"] += 1
        P = _condition_poly(s, ld, lat, B)
        for a in _roots_in_level(P, rng.child("cond", attempt)):
            rw = try_a(a, attempt)
            if rw is not None:
                return rw
        if stats["trials"] >= elim_budget:
            break
    raise Exhausted("no splitting B found within budget", stats)


# ---------------------------------------------------------------------------
# verification oracle


def verify_rewrite(s, rw: Rewrite) -> bool:
    """Exact target-field check of the Rewrite identity."""
    lvl1 = s.level1
    D = rw.level.m // lvl1.m

    def image(f: DensePoly):
        g = factorlib.norm_to_base(f, lvl1) if f.level is not lvl1 else f
        return s.target_reduce(g)

    lhs = image(rw.lhs)
    unit_n = norm_elt(rw.level, lvl1, rw.unit.n if isinstance(rw.unit, FieldElt)
                      else rw.unit)
    rhs = s.target_reduce(DensePoly(lvl1, [unit_n]))
    rhs = rhs * (s.target_reduce(s.h1) ** (rw.h1_exp * D))
    for f, e, _lvl in rw.factors:
        rhs = rhs * (image(f) ** e)
    return lhs == rhs
