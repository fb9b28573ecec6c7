"""Dense univariate polynomials over tower levels, with packed kernels.

A DensePoly stores raw packed coefficients (little endian, trimmed).  The
product of two polynomials is computed by a second Kronecker substitution on
top of the packed element form: coefficient i sits at bit offset i*S where
the stride S leaves room for one full unreduced convolution block per slot.
One big integer multiply then performs the whole bivariate convolution, and
each slot is folded back to a canonical field element afterwards.

ModCtx fixes a monic modulus and precomputes packed rows X^k mod M, so that
modular multiplication is one integer multiply plus one fold pass.  All the
heavy exponentiations (Frobenius powers, equal-degree splitting, membership
tests) run through it.
"""

from .tower import Level, FieldElt, EncodingError, _DEGREE_CAP

__all__ = ["DensePoly", "ModCtx", "poly_encode", "poly_decode"]


class DensePoly:
    """Polynomial over one level; coefficients are raw packed ints."""

    __slots__ = ("level", "c")

    def __init__(self, level: Level, coeffs):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.level = level
        self.c = tuple(cs)

    @classmethod
    def from_elts(cls, elts):
        if not elts:
            raise ValueError("from_elts needs at least one element")
        level = elts[0].level
        return cls(level, [e.n for e in elts])

    @classmethod
    def zero(cls, level):
        return cls(level, [])

    @classmethod
    def one(cls, level):
        return cls(level, [1])

    @classmethod
    def x(cls, level):
        return cls(level, [0, 1])

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    @property
    def is_zero(self) -> bool:
        return not self.c

    @property
    def lead(self) -> int:
        return self.c[-1] if self.c else 0

    @property
    def is_monic(self) -> bool:
        return bool(self.c) and self.c[-1] == 1

    def elts(self):
        return [FieldElt(self.level, x) for x in self.c]

    def __eq__(self, other):
        # Value equality: levels match by (p, defining poly), not identity,
        # so polynomials survive a save/load round trip.
        return (isinstance(other, DensePoly) and other.level.p == self.level.p
                and other.level.f == self.level.f and other.c == self.c)

    def __hash__(self):
        return hash((self.level.p, self.level.f, self.c))

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        return "DensePoly(%s, deg=%d)" % (self.level.name, self.deg)

    # -- ring ops ------------------------------------------------------------

    def __add__(self, other):
        L = self.level
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for j, x in enumerate(b):
            out[j] = L.add(out[j], x)
        return DensePoly(L, out)

    def __sub__(self, other):
        L = self.level
        n = max(len(self.c), len(other.c))
        out = []
        for j in range(n):
            x = self.c[j] if j < len(self.c) else 0
            y = other.c[j] if j < len(other.c) else 0
            out.append(L.sub(x, y))
        return DensePoly(L, out)

    def __neg__(self):
        L = self.level
        return DensePoly(L, [L.neg(x) for x in self.c])

    def __mul__(self, other):
        a, b = self.c, other.c
        if not a or not b:
            return DensePoly(self.level, [])
        L = self.level
        if len(a) == 1:
            return DensePoly(L, [L.mul(a[0], x) for x in b])
        if len(b) == 1:
            return DensePoly(L, [L.mul(b[0], x) for x in a])
        dmin = len(a) + len(b) - 2
        if dmin > _DEGREE_CAP:
            raise ValueError("product degree %d exceeds the packing cap" % dmin)
        S = L.stride_bits
        pa = _pack(a, S)
        pb = _pack(b, S)
        t = pa * pb
        slot_mask = (1 << S) - 1
        fold = L.fold_block
        out = [fold((t >> (i * S)) & slot_mask) for i in range(dmin + 1)]
        return DensePoly(L, out)

    def mul_elt(self, e: int):
        L = self.level
        if not e:
            return DensePoly(L, [])
        return DensePoly(L, [L.mul(x, e) for x in self.c])

    def shift(self, k: int):
        """Multiply by X^k."""
        if not self.c:
            return self
        return DensePoly(self.level, (0,) * k + self.c)

    def divrem(self, other):
        """Schoolbook division; other must be nonzero."""
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        L = self.level
        db = other.deg
        inv_lead = L.inv(other.c[-1])
        rem = list(self.c)
        if len(rem) - 1 < db:
            return DensePoly(L, []), self
        quo = [0] * (len(rem) - db)
        bc = other.c
        for s in range(len(rem) - 1 - db, -1, -1):
            top = rem[s + db]
            if not top:
                continue
            f = L.mul(top, inv_lead)
            quo[s] = f
            for j in range(db + 1):
                if bc[j]:
                    rem[s + j] = L.sub(rem[s + j], L.mul(f, bc[j]))
        return DensePoly(L, quo), DensePoly(L, rem[:db])

    def __mod__(self, other):
        return self.divrem(other)[1]

    def __floordiv__(self, other):
        return self.divrem(other)[0]

    def monic(self):
        """Returns (self/lead, lead)."""
        if not self.c:
            raise ValueError("zero polynomial has no monic form")
        lead = self.c[-1]
        if lead == 1:
            return self, 1
        L = self.level
        inv = L.inv(lead)
        return DensePoly(L, [L.mul(x, inv) for x in self.c]), lead

    def gcd(self, other):
        a, b = self, other
        while b.c:
            a, b = b, a % b
        return a.monic()[0] if a.c else a

    def xgcd(self, other):
        """(g, s, t) with s*self + t*other = g, g monic."""
        L = self.level
        r0, r1 = self, other
        s0, s1 = DensePoly.one(L), DensePoly.zero(L)
        t0, t1 = DensePoly.zero(L), DensePoly.one(L)
        while r1.c:
            q, r = r0.divrem(r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if r0.c and r0.c[-1] != 1:
            inv = L.inv(r0.c[-1])
            r0, s0, t0 = r0.mul_elt(inv), s0.mul_elt(inv), t0.mul_elt(inv)
        return r0, s0, t0

    def eval(self, x: int) -> int:
        L = self.level
        acc = 0
        for coeff in reversed(self.c):
            acc = L.add(L.mul(acc, x), coeff)
        return acc

    def derivative(self):
        L = self.level
        return DensePoly(L, [L.mul_small(c, j) for j, c in enumerate(self.c) if j])

    def frobenius(self, j: int = 1):
        """Apply the q^j Frobenius to every coefficient."""
        L = self.level
        i = L.tower.i if L.tower is not None else 1
        s = (i * j) % L.m
        if s == 0:
            return self
        return DensePoly(L, [L.frob_p(x, s) for x in self.c])

    def map_level(self, dst: Level):
        """Embed or project every coefficient through the tower."""
        L = self.level
        if dst is L:
            return self
        tw = L.tower
        if dst.m % L.m == 0:
            emb = tw.embedding(L, dst)
            return DensePoly(dst, [emb.apply(x) for x in self.c])
        emb = tw.embedding(dst, L)
        return DensePoly(dst, [emb.project(x) for x in self.c])


def _pack(coeffs, stride: int) -> int:
    t = 0
    for i, c in enumerate(coeffs):
        if c:
            t |= c << (i * stride)
    return t


class ModCtx:
    """Reduction context for a fixed monic modulus over one level.

    At levels with log tables a coefficientwise fast path replaces the
    Kronecker-packed product: table lookups with deferred digit folding,
    which wins handily at the small degrees this package lives on.
    """

    __slots__ = ("level", "mod", "n", "_rows", "_slot_mask", "_S",
                 "_fast_rows")

    def __init__(self, mod: DensePoly):
        if not mod.is_monic or mod.deg < 1:
            raise ValueError("modulus must be monic of degree >= 1")
        self.level = mod.level
        self.mod = mod
        self.n = mod.deg
        self._S = mod.level.stride_bits
        self._slot_mask = (1 << self._S) - 1
        L = mod.level
        base = _pack([L.neg(c) for c in mod.c[:self.n]], self._S)
        self._rows = [base]
        self._fast_rows = None
        if L._log is not None:
            self._fast_rows = [tuple(L.neg(c) for c in mod.c[:self.n])]

    def _row(self, k: int) -> int:
        """Packed canonical form of X^k mod M, k >= n."""
        rows = self._rows
        idx = k - self.n
        while len(rows) <= idx:
            t = rows[-1] << self._S
            # fold the slot that just crossed degree n
            c = (t >> (self.n * self._S)) & self._slot_mask
            t &= (1 << (self.n * self._S)) - 1
            if c:
                t += c * rows[0]
            rows.append(self._repack_canonical(t))
        return rows[idx]

    def _repack_canonical(self, t: int) -> int:
        fold = self.level.fold_block
        S, mask = self._S, self._slot_mask
        out = 0
        for i in range(self.n):
            blk = (t >> (i * S)) & mask
            if blk:
                out |= fold(blk) << (i * S)
        return out

    def _reduce_packed(self, t: int, top: int):
        """Fold slots top..n of a packed convolution, then unpack."""
        S, mask = self._S, self._slot_mask
        n = self.n
        if top >= n:
            self._row(top)  # make sure rows are built
            rows = self._rows
            fold = self.level.fold_block
            for k in range(top, n - 1, -1):
                blk = (t >> (k * S)) & mask
                t &= (1 << (k * S)) - 1
                if blk:
                    c = fold(blk)
                    if c:
                        t += c * rows[k - n]
        fold = self.level.fold_block
        return [fold((t >> (i * S)) & mask) for i in range(n)]

    def _fast_row(self, idx: int) -> tuple:
        """Coefficients of X^(n+idx) mod M, canonical, for the fast path."""
        rows = self._fast_rows
        L = self.level
        n = self.n
        top = rows[0]
        while len(rows) <= idx:
            cur = rows[-1]
            hi = cur[n - 1]
            nxt = [0] + list(cur[:n - 1])
            if hi:
                for j in range(n):
                    if top[j]:
                        nxt[j] = L.add(nxt[j], L.mul(hi, top[j]))
            rows.append(tuple(nxt))
        return rows[idx]

    def _fast_fold(self, out: list) -> DensePoly:
        """Fold slots >= n of a deferred-canon coefficient list in place."""
        L = self.level
        n = self.n
        exp, log, n1 = L._exp, L._log, L._n1
        canon = L.canon
        if len(out) > n:
            self._fast_row(len(out) - 1 - n)  # materialize every needed row
        rows = self._fast_rows
        for s in range(len(out) - 1, n - 1, -1):
            c = canon(out[s])
            if c:
                lc = log[c]
                row = rows[s - n]
                for j in range(n):
                    rj = row[j]
                    if rj:
                        out[j] += exp[(lc + log[rj]) % n1]
        return DensePoly(L, [canon(x) for x in out[:n]])

    def reduce(self, f: DensePoly) -> DensePoly:
        if f.deg < self.n:
            return f
        if self._fast_rows is not None:
            return self._fast_fold(list(f.c))
        t = _pack(f.c, self._S)
        return DensePoly(self.level, self._reduce_packed(t, f.deg))

    def mulmod(self, a: DensePoly, b: DensePoly) -> DensePoly:
        ca, cb = a.c, b.c
        if not ca or not cb:
            return DensePoly(self.level, [])
        if self._fast_rows is not None:
            L = self.level
            exp, log, n1 = L._exp, L._log, L._n1
            out = [0] * (len(ca) + len(cb) - 1)
            for i, ai in enumerate(ca):
                if ai:
                    li = log[ai]
                    for j, bj in enumerate(cb):
                        if bj:
                            out[i + j] += exp[(li + log[bj]) % n1]
            return self._fast_fold(out)
        dmin = len(ca) + len(cb) - 2
        if dmin > _DEGREE_CAP:
            raise ValueError("product degree %d exceeds the packing cap" % dmin)
        t = _pack(ca, self._S) * _pack(cb, self._S)
        return DensePoly(self.level, self._reduce_packed(t, dmin))

    def sqrmod(self, a: DensePoly) -> DensePoly:
        ca = a.c
        if self.level.p == 2 and len(ca) > 1:
            # char 2: cross terms vanish, so the square is a coefficient
            # spread; skips the full convolution in Frobenius chains
            L = self.level
            out = [0] * (2 * len(ca) - 1)
            for i, ai in enumerate(ca):
                if ai:
                    out[2 * i] = L.mul(ai, ai)
            if self._fast_rows is not None:
                return self._fast_fold(out)
            return self.reduce(DensePoly(L, out))
        return self.mulmod(a, a)

    def addmod(self, a: DensePoly, b: DensePoly) -> DensePoly:
        return a + b

    def powmod(self, a: DensePoly, e: int) -> DensePoly:
        if e < 0:
            raise ValueError("negative exponent")
        if e == 0:
            return DensePoly.one(self.level)
        a = self.reduce(a)
        result = None
        bit = 1 << (e.bit_length() - 1)
        while bit:
            if result is not None:
                result = self.sqrmod(result)
                if e & bit:
                    result = self.mulmod(result, a)
            else:
                result = a  # top bit
            bit >>= 1
        return result

    def pow_x(self, e: int) -> DensePoly:
        return self.powmod(DensePoly.x(self.level), e)

    def _frob_coeffs(self, f: DensePoly, j: int) -> DensePoly:
        L = self.level
        j %= L.m
        if j == 0:
            return f
        return DensePoly(L, [L.frob_p(c, j) if c else 0 for c in f.c])

    def frob_pow_x(self, t: int) -> DensePoly:
        """X^(p^t) mod the modulus.

        Composition ladder F_{a+b} = F_a^(p^b) o F_b; coefficientwise
        p-powers are cheap, so this needs ~2 log2(t) compositions of n
        mulmods each, against ~1.5 t log2(p) mulmods for plain
        square-and-multiply.  Whichever estimate is smaller runs.
        """
        if t < 0:
            raise ValueError("negative Frobenius exponent")
        L = self.level
        if t == 0:
            return self.reduce(DensePoly.x(L))
        plain = 1.5 * t * max(1, L.p.bit_length() - 1)
        ladder = 2.0 * t.bit_length() * self.n
        if plain <= ladder:
            return self.pow_x(L.p ** t)
        F1 = self.pow_x(L.p)
        F = F1
        a = 1
        for bit in bin(t)[3:]:
            F = self.compose(self._frob_coeffs(F, a), F)
            a <<= 1
            if bit == "1":
                F = self.compose(self._frob_coeffs(F1, a), F)
                a += 1
        return F

    def compose(self, f: DensePoly, g: DensePoly) -> DensePoly:
        """f(g) mod M by Horner; g must be reduced."""
        L = self.level
        acc = DensePoly.zero(L)
        for coeff in reversed(f.c):
            acc = self.mulmod(acc, g)
            if coeff:
                acc = acc + DensePoly(L, [coeff])
        return acc

    def invmod(self, a: DensePoly) -> DensePoly:
        g, s, _ = a.xgcd(self.mod)
        if g.deg != 0:
            raise ZeroDivisionError("element is not invertible mod modulus")
        return self.reduce(s)


def poly_encode(f: DensePoly) -> list:
    """JSON-friendly list of element encodings, little endian."""
    return [FieldElt(f.level, x).encode() for x in f.c]


def poly_decode(tower, data, level: Level = None) -> DensePoly:
    if not isinstance(data, list):
        raise EncodingError("polynomial encoding must be a list")
    if not data:
        if level is None:
            raise EncodingError("zero polynomial needs an explicit level")
        return DensePoly.zero(level)
    elts = [tower.decode(s) for s in data]
    lv = elts[0].level
    if any(e.level is not lv for e in elts):
        raise EncodingError("mixed levels in polynomial encoding")
    if level is not None and level is not lv:
        raise EncodingError("polynomial encoded at unexpected level")
    return DensePoly(lv, [e.n for e in elts])
