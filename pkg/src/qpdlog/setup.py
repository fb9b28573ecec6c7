"""Field setup: the pair (h0, h1), the modulus I, and the factor base.

The target field F_{q^{kl}} is realized as K[X]/(I) where K is tower level 1
(the field F_{q^k}), I is a monic irreducible degree-l divisor of h1*X^q - h0,
and h0, h1 are coprime of degree at most two.  Elements of the target field
are TargetElt values: reduced representative polynomials of degree < l.

The factor base is every nonzero polynomial of degree <= 1 over K, followed
by h1 itself iff deg h1 = 2.  Its ordering is frozen: degree first, then the
coefficient vector (c0, c1) compared by element rank, c0 major.  Indices are
closed-form in both directions, so the base never has to be materialized for
relation bookkeeping; the exhaustive list exists for small-field tests.
"""

import json

from .tower import FieldTower, build_tower, EncodingError
from .poly import DensePoly, ModCtx, poly_encode, poly_decode
from . import factor as factorlib

__all__ = [
    "Setup", "SetupError", "TargetElt", "FactorBase",
    "make_kummer", "search_general", "validate_setup",
    "save_setup", "load_setup", "loads_setup",
]


class SetupError(ValueError):
    """Setup construction or validation failed."""


class TargetElt:
    """Element of the target field F_{q^{kl}} = K[X]/(I)."""

    __slots__ = ("setup", "poly")

    def __init__(self, setup: "Setup", poly: DensePoly):
        self.setup = setup
        self.poly = poly

    @property
    def is_zero(self):
        return self.poly.is_zero

    @property
    def is_one(self):
        return self.poly.c == (1,)

    def __mul__(self, other):
        return TargetElt(self.setup, self.setup.fctx.mulmod(self.poly, other.poly))

    def __pow__(self, e: int):
        s = self.setup
        e %= s.N  # the unit group has exponent N
        return TargetElt(s, s.fctx.powmod(self.poly, e))

    def inverse(self):
        return TargetElt(self.setup, self.setup.fctx.invmod(self.poly))

    def __eq__(self, other):
        return (isinstance(other, TargetElt) and other.setup is self.setup
                and other.poly == self.poly)

    def __hash__(self):
        return hash(self.poly)

    def encode(self) -> list:
        return poly_encode(self.poly)

    def __repr__(self):
        return "TargetElt(%s)" % (self.encode(),)


class FactorBase:
    """Index <-> polynomial bijection for the factor base, closed form."""

    __slots__ = ("setup", "size", "_qk", "_has_h1", "_elems")

    def __init__(self, setup: "Setup"):
        self.setup = setup
        self._qk = setup.level1.size
        self._has_h1 = setup.h1.deg == 2
        self.size = self._qk * self._qk - 1 + (1 if self._has_h1 else 0)
        self._elems = None

    def __len__(self):
        return self.size

    def poly(self, j: int) -> DensePoly:
        L = self.setup.level1
        qk = self._qk
        if not 0 <= j < self.size:
            raise IndexError("factor base index %d out of range" % j)
        if self._has_h1 and j == self.size - 1:
            return self.setup.h1
        if j < qk - 1:
            return DensePoly(L, [L.from_rank(j + 1)])
        t = j - (qk - 1)
        c0 = L.from_rank(t // (qk - 1))
        c1 = L.from_rank(t % (qk - 1) + 1)
        return DensePoly(L, [c0, c1])

    def index_of(self, f: DensePoly) -> int:
        L = self.setup.level1
        qk = self._qk
        if f.deg == 0:
            return L.rank(f.c[0]) - 1
        if f.deg == 1:
            return (qk - 1) + L.rank(f.c[0]) * (qk - 1) + (L.rank(f.c[1]) - 1)
        if self._has_h1 and f == self.setup.h1:
            return self.size - 1
        raise ValueError("not a factor base element: %r" % (f,))

    def constant_index(self, c: int) -> int:
        """Index of a nonzero constant given as a raw level-1 element."""
        if not c:
            raise ValueError("zero is not in the factor base")
        return self.setup.level1.rank(c) - 1

    def monic_linear_index(self, c0: int) -> int:
        """Index of X + c0 with c0 a raw level-1 element."""
        qk = self._qk
        return (qk - 1) + self.setup.level1.rank(c0) * (qk - 1) + (1 - 1)

    @property
    def elems(self) -> list:
        """The materialized list; only sensible at small q^k."""
        if self._elems is None:
            self._elems = [self.poly(j) for j in range(self.size)]
        return self._elems


class Setup:
    """Immutable description of one target field construction."""

    def __init__(self, tower: FieldTower, h0: DensePoly, h1: DensePoly,
                 I: DensePoly, flavor: str):
        self.tower = tower
        self.h0 = h0
        self.h1 = h1
        self.I = I
        self.flavor = flavor
        self.l = I.deg
        self.p = tower.p
        self.i = tower.i
        self.k = tower.k
        self.q = tower.q
        self.level1 = tower.level(1)
        self.N = self.q ** (self.k * self.l) - 1
        violations = validate_setup(self)
        if violations:
            raise SetupError("; ".join(violations))
        self.fctx = ModCtx(I)
        self.factor_base = FactorBase(self)

    @property
    def m(self) -> int:
        return self.factor_base.size

    # -- target field -------------------------------------------------------

    def one(self) -> TargetElt:
        return TargetElt(self, DensePoly.one(self.level1))

    def target_reduce(self, f: DensePoly) -> TargetElt:
        if f.level is not self.level1:
            raise ValueError("representative must be at level 1")
        return TargetElt(self, self.fctx.reduce(f))

    def decode_target(self, data: list) -> TargetElt:
        f = poly_decode(self.tower, data, level=self.level1)
        return self.target_reduce(f)

    def random_target(self, rng) -> TargetElt:
        while True:
            f = rng.poly(self.level1, self.l - 1)
            if not f.is_zero:
                return TargetElt(self, f)

    def eval_product(self, pairs) -> TargetElt:
        """Product over (factor base index, exponent mod N) pairs."""
        acc = self.one()
        for j, e in pairs:
            e = int(e) % self.N
            if e == 0:
                continue
            base = self.target_reduce(self.factor_base.poly(j))
            if base.is_zero:
                raise ArithmeticError("factor base element reduces to zero")
            acc = acc * base ** e
        return acc

    # -- persistence ---------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "i": self.i,
            "k": self.k,
            "flavor": self.flavor,
            "h0": poly_encode(self.h0),
            "h1": poly_encode(self.h1),
            "I": poly_encode(self.I),
            "l": self.l,
            "defining_polys": self.tower.defining_polys(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True) + "\n"

    def __repr__(self):
        return "Setup(%s, q=%d, k=%d, l=%d)" % (self.flavor, self.q, self.k, self.l)


def guardrail_warnings(q: int, k: int) -> list:
    """Parameter-regime notes; never fatal at desk scale."""
    out = []
    if q <= 61:
        out.append("q = %d <= 61: outside the proven good-solution regime" % q)
    lg = q.bit_length() - 1
    if q == 1 << lg and lg % 2 == 0 and q > 1:
        out.append("q = %d is a power of 4" % q)
    if k < 18:
        out.append("k = %d < 18: outside the proven regime" % k)
    return out


def validate_setup(s: Setup) -> list:
    """Invariant check; returns a list of violations (empty = ok)."""
    out = []
    L = s.level1
    if s.h0.level is not L or s.h1.level is not L or s.I.level is not L:
        return ["h0, h1, I must live at tower level 1"]
    if s.h0.deg > 2 or s.h0.is_zero:
        out.append("h0 must be nonzero of degree <= 2")
    if s.h1.deg > 2 or s.h1.is_zero:
        out.append("h1 must be nonzero of degree <= 2")
    if s.h0.gcd(s.h1).deg != 0:
        out.append("h0 and h1 are not coprime")
    if not s.I.is_monic:
        out.append("I is not monic")
    if s.l < 1:
        out.append("deg I must be positive")
    if not factorlib.is_irreducible(s.I):
        out.append("I is not irreducible")
    G = _bracket(s)
    if (G % s.I).c:
        out.append("I does not divide h1*X^q - h0")
    if s.N != s.q ** (s.k * s.l) - 1:
        out.append("N mismatch")
    return out


def _bracket(s: Setup) -> DensePoly:
    """The polynomial h1*X^q - h0 at level 1."""
    L = s.level1
    xq = DensePoly(L, (0,) * s.q + (1,))
    return s.h1 * xq - s.h0


def make_kummer(tower: FieldTower, q: int = None, k: int = None) -> Setup:
    """Kummer setup: h1 = 1, h0 = aX, I = X^(q-1) - a, for the least valid a."""
    q = tower.q if q is None else q
    k = tower.k if k is None else k
    if q != tower.q or k != tower.k:
        raise SetupError("tower was built for q=%d, k=%d" % (tower.q, tower.k))
    if q < 3:
        raise SetupError("Kummer setup needs q >= 3 (degree q-1 >= 2)")
    L = tower.level(1)
    for r in range(1, L.size):
        a = L.from_rank(r)
        I = DensePoly(L, [L.neg(a)] + [0] * (q - 2) + [1])
        if factorlib.is_irreducible(I):
            h0 = DensePoly(L, [0, a])
            h1 = DensePoly.one(L)
            return Setup(tower, h0, h1, I, "kummer")
    raise SetupError("no a in F_%d^%d makes X^%d - a irreducible" % (q, k, q - 1))


def search_general(tower: FieldTower, q: int, k: int, l: int, rng,
                   budget: int = 10000):
    """Random search for a general setup with a degree-l modulus.

    Returns (Setup, stats) or (None, stats).  h1 is sampled monic, stratified
    by degree in {0, 1, 2}; h0 uniform of degree <= 2, coprime to h1.
    """
    if q != tower.q or k != tower.k:
        raise SetupError("tower was built for q=%d, k=%d" % (tower.q, tower.k))
    if not 1 <= l <= q + 2:
        raise SetupError("l must satisfy 1 <= l <= q + 2")
    L = tower.level(1)
    stats = {"tries": 0, "coprime_rejects": 0, "degree_hits": 0}
    for _ in range(budget):
        stats["tries"] += 1
        d1 = rng.randbelow(3)
        h1 = rng.monic_poly(L, d1) if d1 else DensePoly.one(L)
        h0 = rng.poly(L, 2)
        if h0.is_zero:
            continue
        if h0.gcd(h1).deg != 0:
            stats["coprime_rejects"] += 1
            continue
        xq = DensePoly(L, (0,) * q + (1,))
        G = h1 * xq - h0
        if G.deg < l:
            continue
        cand = None
        for irr, _mult in factorlib.factor(G, rng.child("factor", stats["tries"])):
            if irr.deg == l:
                cand = irr
                break
        if cand is None:
            continue
        stats["degree_hits"] += 1
        try:
            return Setup(tower, h0, h1, cand, "general"), stats
        except SetupError:
            continue
    return None, stats


def save_setup(s: Setup, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(s.dumps())


def load_setup(path: str) -> Setup:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_setup(fh.read())


def loads_setup(text: str) -> Setup:
    data = json.loads(text)
    try:
        p, i, k = int(data["p"]), int(data["i"]), int(data["k"])
        flavor = data["flavor"]
        stored_polys = {int(d): list(map(int, cs))
                        for d, cs in data["defining_polys"].items()}
    except (KeyError, ValueError, TypeError) as exc:
        raise SetupError("malformed setup file: %s" % exc) from exc
    top = max(stored_polys)
    base = i * k
    if top % base or (top // base) & (top // base - 1):
        raise SetupError("stored degrees do not form a tower chain")
    emax = (top // base).bit_length() - 1
    tower = build_tower(p, i, k, emax, degree_budget=max(top, 128))
    rebuilt = {lv.m: list(lv.f) for lv in tower.chain}
    if rebuilt != stored_polys:
        raise SetupError("stored defining polynomials do not match the "
                         "deterministic tower construction")
    L = tower.level(1)
    h0 = poly_decode(tower, data["h0"], level=L)
    h1 = poly_decode(tower, data["h1"], level=L)
    I = poly_decode(tower, data["I"], level=L)
    s = Setup(tower, h0, h1, I, flavor)
    if s.l != int(data["l"]):
        raise SetupError("stored l does not match deg I")
    return s
