"""Absolute-representation towers of finite fields of small characteristic.

Every level of a tower is F_p[T]/(f_m) for a monic irreducible f_m over the
prime field, so an element is a vector of m coefficients in [0, p).  We pack
that vector into a single Python int, one digit of `w` bits per coefficient,
and multiply through plain integer multiplication (Kronecker substitution):
the digit width is chosen so that convolution sums and reduction folds never
overflow a digit.  That keeps the inner loops on the C side of CPython.

Levels are built deterministically: the defining polynomial of each degree is
the lexicographically least monic irreducible (coefficients compared from the
highest degree down), and the embedding between adjacent levels sends the
lower generator to the lexicographically least root of its defining
polynomial in the higher level.  Embeddings between distant levels are
composites of adjacent ones, so they commute by construction.
"""

import math

__all__ = [
    "ArithmeticBudgetError",
    "LevelMismatchError",
    "EncodingError",
    "Level",
    "FieldElt",
    "Embedding",
    "FieldTower",
    "build_tower",
    "is_prime",
]

# Max X-degree any packed polynomial product is allowed to reach.  Lifts are
# capped well below this; the bound feeds the digit-width computation.
_DEGREE_CAP = 200

# Max absolute extension degree a tower may contain by default.
DEFAULT_DEGREE_BUDGET = 128


class ArithmeticBudgetError(ValueError):
    """Requested tower exceeds the configured absolute-degree budget."""


class LevelMismatchError(ValueError):
    """Operands live at different levels and were not embedded first."""


class EncodingError(ValueError):
    """Malformed element or polynomial encoding."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid far beyond desk-scale inputs."""
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % sp == 0:
            return n == sp
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Dense F_p[T] helpers on small coefficient lists (little endian).  Only used
# off the hot path: element inversion and embedding sections.


def fp_trim(f: list) -> list:
    while f and f[-1] == 0:
        f.pop()
    return f


def fp_divrem(a: list, b: list, p: int) -> tuple:
    """Quotient and remainder in F_p[T]; b must be nonzero."""
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    inv_lb = pow(lb, -1, p)
    q = [0] * max(0, len(a) - db)
    while len(a) - 1 >= db and a:
        c = a[-1] * inv_lb % p
        s = len(a) - 1 - db
        q[s] = c
        for j in range(db + 1):
            a[s + j] = (a[s + j] - c * b[j]) % p
        fp_trim(a)
    return q, a


def fp_xgcd(a: list, b: list, p: int) -> tuple:
    """Extended gcd in F_p[T]: returns (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = list(a), list(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = fp_divrem(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, _fp_sub(s0, _fp_mul(q, s1, p), p)
        t0, t1 = t1, _fp_sub(t0, _fp_mul(q, t1, p), p)
    if r0:
        c = pow(r0[-1], -1, p)
        r0 = [x * c % p for x in r0]
        s0 = [x * c % p for x in s0]
        t0 = [x * c % p for x in t0]
    return r0, s0, t0


def _fp_mul(a: list, b: list, p: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return fp_trim(out)


def _fp_sub(a: list, b: list, p: int) -> list:
    n = max(len(a), len(b))
    out = [0] * n
    for j in range(n):
        x = a[j] if j < len(a) else 0
        y = b[j] if j < len(b) else 0
        out[j] = (x - y) % p
    return fp_trim(out)


def _fp_gauss_solve(cols: list, p: int, m_dst: int):
    """Left inverse data for the F_p matrix whose columns are digit vectors.

    Returns rows S (m_src x m_dst) with S . y = coordinates whenever y is in
    the column span.  Membership is checked by the caller via re-embedding.
    """
    m_src = len(cols)
    # Augmented rows of [M | I].
    rows = []
    for r in range(m_dst):
        row = [cols[c][r] for c in range(m_src)] + [0] * m_dst
        row[m_src + r] = 1
        rows.append(row)
    piv_of_col = [-1] * m_src
    r0 = 0
    for c in range(m_src):
        piv = next((r for r in range(r0, m_dst) if rows[r][c] % p), -1)
        if piv < 0:
            raise ValueError("embedding columns are not independent")
        rows[r0], rows[piv] = rows[piv], rows[r0]
        inv = pow(rows[r0][c], -1, p)
        rows[r0] = [v * inv % p for v in rows[r0]]
        for r in range(m_dst):
            if r != r0 and rows[r][c] % p:
                f = rows[r][c]
                rows[r] = [(v - f * w) % p for v, w in zip(rows[r], rows[r0])]
        piv_of_col[c] = r0
        r0 += 1
    return [rows[piv_of_col[c]][m_src:] for c in range(m_src)]


# ---------------------------------------------------------------------------


class Level:
    """One absolute field F_p[T]/(f) with packed-int element arithmetic.

    Raw operations take and return plain ints (the packed form).  The public
    FieldElt wrapper is for API boundaries; inner loops stay on raw ints.
    """

    __slots__ = (
        "p", "m", "f", "name", "w", "mask", "stride_digits", "stride_bits",
        "fold_rows", "ones_sub", "_shifts", "_frob_mats", "size",
        "tower", "_canon2_mask", "_exp", "_log", "_n1",
    )

    def __init__(self, p: int, f: list, tower=None):
        self.p = p
        self.f = tuple(f)
        self.m = len(f) - 1
        m = self.m
        if f[-1] != 1:
            raise ValueError("defining polynomial must be monic")
        self.name = "%d^%d" % (p, m)
        self.size = p ** m
        self.tower = tower
        # Digit width: covers poly products up to degree _DEGREE_CAP plus the
        # worst fold accumulation (see module docstring).
        bound = 2 * _DEGREE_CAP * m * m * p ** 3
        self.w = bound.bit_length() + 1
        self.mask = (1 << self.w) - 1
        self.stride_digits = 2 * m - 1
        self.stride_bits = self.stride_digits * self.w
        self._shifts = tuple(j * self.w for j in range(2 * m))
        self.ones_sub = sum(p << (j * self.w) for j in range(m))
        if p == 2:
            self._canon2_mask = sum(1 << (j * self.w) for j in range(2 * m))
        else:
            self._canon2_mask = 0
        # fold_rows[s] = packed(T^(m+s) mod f) for s = 0 .. m-2.
        rows = []
        top = self.from_coeffs([(-c) % p for c in f[:m]])
        row = top
        for _ in range(max(0, m - 1)):
            rows.append(row)
            # multiply by T: shift one digit, fold the overflowing top digit
            row <<= self.w
            hi = (row >> (m * self.w)) & self.mask
            if hi:
                row = (row & ((1 << (m * self.w)) - 1)) + hi * top
                row = self.canon(row)
        self.fold_rows = tuple(rows)
        self._frob_mats = {}
        self._exp = None
        self._log = None
        self._n1 = 0

    # -- representation ----------------------------------------------------

    def canon(self, x: int) -> int:
        """Reduce every digit mod p (digits must not exceed the width)."""
        if self.p == 2:
            return x & self._canon2_mask if x >> self.w else x & 1
        p, w, mask = self.p, self.w, self.mask
        out = 0
        sh = 0
        while x:
            d = (x & mask) % p
            if d:
                out |= d << sh
            x >>= w
            sh += w
        return out

    def from_coeffs(self, coeffs) -> int:
        p, w = self.p, self.w
        if len(coeffs) > self.m:
            raise EncodingError("too many coefficients for level %s" % self.name)
        x = 0
        for j, c in enumerate(coeffs):
            c %= p
            if c:
                x |= c << (j * w)
        return x

    def to_coeffs(self, a: int) -> list:
        w, mask = self.w, self.mask
        out = [0] * self.m
        j = 0
        while a:
            out[j] = a & mask
            a >>= w
            j += 1
        return out

    def rank(self, a: int) -> int:
        """Position of the element in lexicographic coefficient order."""
        coeffs = self.to_coeffs(a)
        r = 0
        for c in coeffs:
            r = r * self.p + c
        return r

    def from_rank(self, r: int) -> int:
        if not 0 <= r < self.size:
            raise ValueError("rank out of range")
        coeffs = []
        for _ in range(self.m):
            coeffs.append(r % self.p)
            r //= self.p
        coeffs.reverse()
        return self.from_coeffs(coeffs)

    # -- arithmetic on raw packed ints --------------------------------------

    def add(self, a: int, b: int) -> int:
        return self.canon(a + b)

    def sub(self, a: int, b: int) -> int:
        return self.canon(a + self.ones_sub - b)

    def neg(self, a: int) -> int:
        return self.canon(self.ones_sub - a) if a else 0

    def mul(self, a: int, b: int) -> int:
        if not a or not b:
            return 0
        lg = self._log
        if lg is not None:
            return self._exp[(lg[a] + lg[b]) % self._n1]
        t = a * b
        m, w, mask = self.m, self.w, self.mask
        lim = m * w
        if t >> lim:
            rows = self.fold_rows
            for s in range(2 * m - 2, m - 1, -1):
                c = (t >> (s * w)) & mask
                if c:
                    t = (t & ((1 << (s * w)) - 1)) + c * rows[s - m]
                else:
                    t &= (1 << (s * w)) - 1
        return self.canon(t)

    def fold_block(self, t: int) -> int:
        """Canonical element from an unreduced block of up to 2m-1 digits."""
        m, w, mask = self.m, self.w, self.mask
        if t >> (m * w):
            rows = self.fold_rows
            for s in range(2 * m - 2, m - 1, -1):
                c = (t >> (s * w)) & mask
                if c:
                    t = (t & ((1 << (s * w)) - 1)) + c * rows[s - m]
                else:
                    t &= (1 << (s * w)) - 1
        return self.canon(t)

    def mul_small(self, a: int, c: int) -> int:
        """Multiply by an F_p scalar given as an int."""
        c %= self.p
        if c == 0 or a == 0:
            return 0
        if c == 1:
            return a
        lg = self._log
        if lg is not None:
            return self._exp[(lg[a] + lg[c]) % self._n1]
        return self.canon(a * c)

    def sqr(self, a: int) -> int:
        return self.mul(a, a)

    def inv(self, a: int) -> int:
        if not a:
            raise ZeroDivisionError("inverse of zero in %s" % self.name)
        lg = self._log
        if lg is not None:
            return self._exp[-lg[a] % self._n1]
        g, s, _ = fp_xgcd(fp_trim(self.to_coeffs(a)), list(self.f), self.p)
        if len(g) != 1:
            raise ArithmeticError("defining polynomial is not irreducible")
        inv_c = pow(g[0], -1, self.p)
        return self.from_coeffs([x * inv_c % self.p for x in s])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow_(self, a: int, e: int) -> int:
        if a and self._log is not None:
            return self._exp[(self._log[a] * e) % self._n1]
        if e < 0:
            return self.pow_(self.inv(a), -e)
        result = 1
        base = a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def enable_log_tables(self, cap: int = 1 << 13):
        """Discrete log/exp tables for O(1) mul, inv, pow_ and frob_p.

        Only worth the memory at small levels; a no-op above cap.  The
        tables change nothing observable but the speed: every fast path
        lands on the same canonical packed ints as the generic one.
        """
        if self._exp is not None or self.size > cap or self.m == 0:
            return
        n1 = self.size - 1
        fac = []
        t, d = n1, 2
        while d * d <= t:
            if t % d == 0:
                fac.append(d)
                while t % d == 0:
                    t //= d
            d += 1
        if t > 1:
            fac.append(t)
        gen = None
        for r in range(1, self.size):
            cand = self.from_rank(r)
            if all(self.pow_(cand, n1 // pr) != 1 for pr in fac):
                gen = cand
                break
        if gen is None:
            raise ArithmeticError("no generator; level modulus not irreducible?")
        exp = [0] * n1
        log = {}
        cur = 1
        for j in range(n1):
            exp[j] = cur
            log[cur] = j
            cur = self.mul(cur, gen)
        if cur != 1:
            raise ArithmeticError("generator order mismatch at %s" % self.name)
        self._n1 = n1
        self._exp = exp
        self._log = log

    # -- Frobenius ----------------------------------------------------------

    def frob_matrix(self, s: int):
        """Columns of x -> x^(p^s) as packed ints; s taken mod m."""
        s %= self.m
        mat = self._frob_mats.get(s)
        if mat is None:
            if s == 0:
                mat = tuple(1 << (j * self.w) for j in range(self.m))
            else:
                t = self.pow_(1 << self.w, self.p ** s)  # T^(p^s) mod f
                col = 1
                cols = []
                for _ in range(self.m):
                    cols.append(col)
                    col = self.mul(col, t)
                mat = tuple(cols)
            self._frob_mats[s] = mat
        return mat

    def frob_p(self, a: int, s: int) -> int:
        """a^(p^s) via the cached linear map."""
        s %= self.m
        if s == 0 or a == 0:
            return a
        lg = self._log
        if lg is not None:
            return self._exp[(lg[a] * pow(self.p, s, self._n1)) % self._n1]
        cols = self.frob_matrix(s)
        w, mask = self.w, self.mask
        acc = 0
        j = 0
        while a:
            d = a & mask
            if d:
                acc += d * cols[j] if d > 1 else cols[j]
            a >>= w
            j += 1
        return self.canon(acc)

    def matvec(self, cols, a: int) -> int:
        """Apply a digit-matrix (tuple of packed columns) to a packed vector."""
        w, mask = self.w, self.mask
        acc = 0
        j = 0
        while a:
            d = a & mask
            if d:
                acc += d * cols[j] if d > 1 else cols[j]
            a >>= w
            j += 1
        return self.canon(acc)

    def elt(self, coeffs) -> "FieldElt":
        if isinstance(coeffs, int):
            return FieldElt(self, self.from_coeffs([coeffs]))
        return FieldElt(self, self.from_coeffs(list(coeffs)))

    @property
    def zero(self) -> "FieldElt":
        return FieldElt(self, 0)

    @property
    def one(self) -> "FieldElt":
        return FieldElt(self, 1)

    def __repr__(self):
        return "Level(%s)" % self.name


class FieldElt:
    """A field element: a level handle plus the packed coefficient vector."""

    __slots__ = ("level", "n")

    def __init__(self, level: Level, n: int):
        self.level = level
        self.n = n

    @property
    def coeffs(self) -> list:
        return self.level.to_coeffs(self.n)

    def encode(self) -> str:
        return "%s:%s" % (self.level.name, self.coeffs)

    def _need(self, other):
        if not isinstance(other, FieldElt):
            raise TypeError("expected FieldElt, got %r" % type(other).__name__)
        if other.level is not self.level:
            raise LevelMismatchError(
                "mixed levels %s and %s" % (self.level.name, other.level.name))
        return other

    def __add__(self, other):
        other = self._need(other)
        return FieldElt(self.level, self.level.add(self.n, other.n))

    def __sub__(self, other):
        other = self._need(other)
        return FieldElt(self.level, self.level.sub(self.n, other.n))

    def __neg__(self):
        return FieldElt(self.level, self.level.neg(self.n))

    def __mul__(self, other):
        other = self._need(other)
        return FieldElt(self.level, self.level.mul(self.n, other.n))

    def __truediv__(self, other):
        other = self._need(other)
        return FieldElt(self.level, self.level.div(self.n, other.n))

    def __pow__(self, e: int):
        return FieldElt(self.level, self.level.pow_(self.n, e))

    def inverse(self):
        return FieldElt(self.level, self.level.inv(self.n))

    def frobenius(self, j: int = 1):
        """q^j-power Frobenius, where q is the tower's base field size."""
        i = self.level.tower.i if self.level.tower is not None else 1
        return FieldElt(self.level, self.level.frob_p(self.n, (i * j) % self.level.m))

    def __eq__(self, other):
        return (isinstance(other, FieldElt) and other.level.p == self.level.p
                and other.level.f == self.level.f and other.n == self.n)

    def __hash__(self):
        return hash((self.level.p, self.level.f, self.n))

    def __bool__(self):
        return self.n != 0

    def __repr__(self):
        return "FieldElt(%s)" % self.encode()


class Embedding:
    """F_p-linear embedding between two levels, with an exact section."""

    __slots__ = ("src", "dst", "cols", "_section")

    def __init__(self, src: Level, dst: Level, cols):
        self.src = src
        self.dst = dst
        self.cols = tuple(cols)
        self._section = None

    def apply(self, a: int) -> int:
        # Decode with the source width; columns are destination-packed.
        if not a:
            return 0
        w, mask = self.src.w, self.src.mask
        cols = self.cols
        acc = 0
        j = 0
        while a:
            d = a & mask
            if d:
                acc += cols[j] if d == 1 else d * cols[j]
            a >>= w
            j += 1
        return self.dst.canon(acc)

    def _section_rows(self):
        if self._section is None:
            digit_cols = [self.dst.to_coeffs(c) for c in self.cols]
            self._section = _fp_gauss_solve(digit_cols, self.src.p, self.dst.m)
        return self._section

    def project(self, y: int) -> int:
        """Inverse image of y; raises if y is not in the subfield."""
        if y == 0:
            return 0
        rows = self._section_rows()
        p = self.src.p
        ydig = self.dst.to_coeffs(y)
        coeffs = [sum(r * d for r, d in zip(row, ydig)) % p for row in rows]
        x = self.src.from_coeffs(coeffs)
        if self.apply(x) != y:
            raise ValueError("element is not in the image of %s" % self.src.name)
        return x

    def contains(self, y: int) -> bool:
        try:
            self.project(y)
        except ValueError:
            return False
        return True


class FieldTower:
    """The chain F_p within F_q within F_q^k within F_q^(2k) ... F_q^(2^emax k).

    Levels are indexed two ways: by absolute degree over F_p, and for the
    main chain by the extension index D (level(D) is F_q^(kD)).  The tower is
    immutable after construction; build a wider one if more levels are needed.
    """

    def __init__(self, p: int, i: int, k: int, emax: int, levels, embeddings):
        self.p = p
        self.i = i
        self.k = k
        self.q = p ** i
        self.emax = emax
        self.by_degree = {lv.m: lv for lv in levels}
        self.chain = sorted(levels, key=lambda lv: lv.m)
        self._embed = dict(embeddings)
        for lv in levels:
            lv.tower = self
            lv.enable_log_tables()

    @property
    def prime_level(self) -> Level:
        return self.by_degree[1]

    @property
    def q_level(self) -> Level:
        return self.by_degree[self.i]

    def level(self, d: int) -> Level:
        """Level D of the main chain: the field F_q^(kD)."""
        deg = self.i * self.k * d
        lv = self.by_degree.get(deg)
        if lv is None:
            raise KeyError("tower has no level %d (degree %d)" % (d, deg))
        return lv

    def level_index(self, lv: Level) -> int:
        """Extension index D of a main-chain level."""
        deg = lv.m
        base = self.i * self.k
        if deg % base:
            raise ValueError("%s is not on the main chain" % lv.name)
        return deg // base

    def embedding(self, src: Level, dst: Level) -> Embedding:
        if src is dst:
            key = (src.m, dst.m)
            emb = self._embed.get(key)
            if emb is None:
                emb = Embedding(src, dst, tuple(1 << (j * src.w) for j in range(src.m)))
                self._embed[key] = emb
            return emb
        key = (src.m, dst.m)
        emb = self._embed.get(key)
        if emb is None:
            if dst.m % src.m:
                raise ValueError("no embedding %s -> %s" % (src.name, dst.name))
            # compose along the chain
            path = [lv for lv in self.chain if lv.m % src.m == 0 and dst.m % lv.m == 0
                    and src.m <= lv.m <= dst.m]
            cols = [1 << (j * src.w) for j in range(src.m)]
            for a, b in zip(path, path[1:]):
                step = self._embed[(a.m, b.m)]
                cols = [step.apply(c) for c in cols]
            emb = Embedding(src, dst, cols)
            self._embed[key] = emb
        return emb

    def embed(self, x: FieldElt, dst: Level) -> FieldElt:
        return FieldElt(dst, self.embedding(x.level, dst).apply(x.n))

    def project(self, y: FieldElt, dst: Level) -> FieldElt:
        return FieldElt(dst, self.embedding(dst, y.level).project(y.n))

    def decode(self, text: str) -> FieldElt:
        """Parse the `p^m:[c0,c1,...]` element encoding."""
        try:
            head, _, body = text.partition(":")
            ps, _, ms = head.partition("^")
            p, m = int(ps), int(ms)
            body = body.strip()
            if not (body.startswith("[") and body.endswith("]")):
                raise ValueError
            inner = body[1:-1].strip()
            coeffs = [int(t) for t in inner.split(",")] if inner else []
        except ValueError as exc:
            raise EncodingError("bad element encoding %r" % text) from exc
        if p != self.p:
            raise EncodingError("encoding is for characteristic %d, tower has %d" % (p, self.p))
        lv = self.by_degree.get(m)
        if lv is None:
            raise EncodingError("tower has no level of degree %d" % m)
        if len(coeffs) != m:
            raise EncodingError("expected %d coefficients, got %d" % (m, len(coeffs)))
        if any(not 0 <= c < p for c in coeffs):
            raise EncodingError("coefficients must lie in [0, %d)" % p)
        return FieldElt(lv, lv.from_coeffs(coeffs))

    def defining_polys(self) -> dict:
        return {str(lv.m): list(lv.f) for lv in self.chain}

    def __repr__(self):
        return "FieldTower(p=%d, i=%d, k=%d, emax=%d)" % (self.p, self.i, self.k, self.emax)


def lex_least_irreducible(prime_level: Level, degree: int) -> list:
    """Lexicographically least monic irreducible of the given degree over F_p.

    Coefficients are compared from the highest degree down, which is the
    enumeration order of the integer counter below.
    """
    from . import factor
    from .poly import DensePoly

    p = prime_level.p
    if degree == 1:
        return [0, 1]
    for n in range(p ** degree):
        coeffs = []
        t = n
        for _ in range(degree):
            coeffs.append(t % p)
            t //= p
        cand = DensePoly(prime_level, [prime_level.from_coeffs([c]) for c in coeffs] + [1])
        if factor.is_irreducible(cand):
            return coeffs + [1]
    raise ArithmeticError("no irreducible of degree %d found" % degree)


def build_tower(p: int, i: int, k: int, emax: int,
                degree_budget: int = DEFAULT_DEGREE_BUDGET) -> FieldTower:
    """Construct the tower for q = p^i, base extension k, top level 2^emax.

    Deterministic: defining polynomials are the lex-least monic irreducibles,
    adjacent embeddings pick the lex-least root.  Raises on composite p and
    on towers whose top absolute degree exceeds the budget.
    """
    from . import factor

    if not is_prime(p):
        raise ValueError("p = %d is not prime" % p)
    if i < 1 or k < 1 or emax < 0:
        raise ValueError("need i >= 1, k >= 1, emax >= 0")
    top = i * k * (1 << emax)
    if top > degree_budget:
        raise ArithmeticBudgetError(
            "top level degree %d exceeds budget %d" % (top, degree_budget))

    degrees = sorted({1, i, i * k} | {i * k * (1 << t) for t in range(emax + 1)})
    prime = Level(p, [0, 1])
    levels = [prime]
    embeddings = {}
    for deg in degrees[1:]:
        f = lex_least_irreducible(prime, deg)
        lv = Level(p, f)
        prev = levels[-1]
        # Lex-least root of prev's defining polynomial gives the embedding.
        root = _least_root(prev, lv)
        cols = []
        col = 1
        for _ in range(prev.m):
            cols.append(col)
            col = lv.mul(col, root)
        embeddings[(prev.m, lv.m)] = Embedding(prev, lv, cols)
        levels.append(lv)
    tower = FieldTower(p, i, k, emax, levels, embeddings)
    return tower


def _least_root(src: Level, dst: Level) -> int:
    """Least root of src's defining polynomial inside dst.

    One root comes from a seeded search; the rest are its p-power conjugates,
    so the lex-least choice does not depend on the search's randomness.
    """
    from . import factor
    from .poly import DensePoly
    from .rng import Stream

    if src.m == 1:
        # F_p embeds by constants; the defining polynomial is T itself.
        return 0 if src.f == (0, 1) else dst.from_coeffs([(-src.f[0]) % src.p])
    target = DensePoly(dst, [dst.from_coeffs([c]) for c in src.f])
    rng = Stream.from_seed(0xF1E1D, "embedding", src.m, dst.m, dst.p)
    root = factor.any_root_in_subfield(target, src.m, rng)
    if root is None:
        raise ArithmeticError("defining polynomial has no root upstairs")
    orbit = []
    r = root
    for _ in range(src.m):
        orbit.append(r)
        r = dst.frob_p(r, 1)
    best = min(orbit, key=dst.to_coeffs)
    return best
