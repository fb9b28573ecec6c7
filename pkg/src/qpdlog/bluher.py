"""Complete-splitting constants for the trinomials X^(q+1) - BX + B.

A degree-2 elimination succeeds exactly when its affine-normalized candidate
lands on a B for which X^(q+1) - BX + B splits into distinct linear factors
over the working level.  The set of such B is the image of the rational map

    u  |->  (u - u^(q^2))^(q+1) / (u - u^q)^(q^2+1)

on K minus F_{q^2}, and that map is exactly (q^3 - q)-to-1 onto the image.
Membership is decided by a modular-power divisibility test; the exhaustive
enumerator is a test oracle and analytics tool, never part of the solver path.
"""

from .tower import Level, FieldElt
from .poly import DensePoly, ModCtx

__all__ = ["BluherSample", "bluher_from_u", "is_bluher", "enumerate_bluher",
           "bluher_set", "BluherEnumeration", "ENUM_CAP"]

ENUM_CAP = 1 << 22


class BluherSample:
    """One (u, B) pair with B in the splitting set of its level."""

    __slots__ = ("level", "u", "B")

    def __init__(self, level: Level, u: FieldElt, B: FieldElt):
        self.level = level
        self.u = u
        self.B = B

    def __repr__(self):
        return "BluherSample(u=%s, B=%s)" % (self.u.encode(), self.B.encode())


def _map_raw(L: Level, q_exp: int, u: int):
    """Raw-int image of u, or None when u lies in F_{q^2}.

    q_exp is log_p(q); fast path used by enumeration and samplers.
    """
    uq = L.frob_p(u, q_exp % L.m)
    uq2 = L.frob_p(uq, q_exp % L.m)
    if uq2 == u:
        return None
    q = L.p ** q_exp
    num = L.pow_(L.sub(u, uq2), q + 1)
    den = L.pow_(L.sub(u, uq), q * q + 1)
    return L.mul(num, L.inv(den))


def _trinomial(L: Level, q: int, B: int) -> DensePoly:
    coeffs = [B, L.neg(B)] + [0] * (q - 1) + [1]
    return DensePoly(L, coeffs)


def is_bluher(level: Level, B) -> bool:
    """True iff X^(q+1) - BX + B splits with distinct roots over the level.

    Tested as divisibility into X^|K| - X, which forces both squarefreeness
    and complete splitting at once.
    """
    b = B.n if isinstance(B, FieldElt) else B
    if not b:
        raise ValueError("B must be nonzero")
    q = level.tower.q
    ctx = ModCtx(_trinomial(level, q, b))
    return ctx.pow_x(level.size) == DensePoly.x(level)


def bluher_from_u(level: Level, u, check: bool = True) -> BluherSample:
    """Image of u under the splitting-set parameterization.

    Rejects u in F_{q^2} (the map is undefined there: the denominator
    vanishes or the image degenerates).  With check=True the split property
    is asserted at construction.
    """
    un = u.n if isinstance(u, FieldElt) else u
    i = level.tower.i
    b = _map_raw(level, i, un)
    if b is None:
        raise ValueError("u lies in F_(q^2); the parameterization excludes it")
    if check and not is_bluher(level, b):
        raise ArithmeticError("parameterized B fails the split test")
    return BluherSample(level, FieldElt(level, un), FieldElt(level, b))


class BluherEnumeration:
    """Exhaustive image with per-B preimage counts."""

    __slots__ = ("level", "counts", "domain_size", "estimate")

    def __init__(self, level: Level, counts: dict, domain_size: int):
        self.level = level
        self.counts = counts
        self.domain_size = domain_size
        q = level.tower.q
        kd = level.m // level.tower.i
        self.estimate = q ** (kd - 3) if kd >= 3 else 0

    @property
    def image(self) -> set:
        return set(self.counts)

    def elements(self) -> list:
        return [FieldElt(self.level, b) for b in sorted(self.counts)]

    def __len__(self):
        return len(self.counts)


def enumerate_bluher(level: Level, cap: int = ENUM_CAP) -> BluherEnumeration:
    """Walk every u in the level and collect the image multiset.

    Levels larger than the cap are refused: this is an oracle for tests and
    small-field analytics, not a solver component.
    """
    if level.size > cap:
        raise ValueError("level size %d exceeds enumeration cap %d"
                         % (level.size, cap))
    i = level.tower.i
    counts = {}
    domain = 0
    for r in range(level.size):
        u = level.from_rank(r)
        b = _map_raw(level, i, u)
        if b is None:
            continue
        domain += 1
        counts[b] = counts.get(b, 0) + 1
    return BluherEnumeration(level, counts, domain)


def bluher_set(level: Level, cap: int = ENUM_CAP):
    """Raw-int membership set for fast inner-loop filtering, or None.

    The elimination search uses this as an exact accelerator for the split
    test at small levels: B(a) lies in the set iff the candidate splits.
    """
    if level.size > cap:
        return None
    return enumerate_bluher(level, cap).image
