"""Row echelonization over Z/NZ with composite N.

The relation matrix has m+1 rows and m columns, so some invertible row
transformation sends its first row to zero.  We get there with gcd-based
2x2 combines: columns are processed right to left, each column's pivot
(the gcd of the active entries, not necessarily a unit mod N) is parked
in the bottommost active row, that row retires, and the survivors are
zero in every processed column.  With one more row than columns, row 0
of the result is all-zero and the transformed (alpha, beta) carried
vectors at row 0 give the final congruence.

Every operation is an elementary swap or a 2x2 combine of determinant
+-1 mod N, so the accumulated transformation is invertible and the row
space is preserved.  The log of operations replays exactly; logging can
be switched off for large solves where only the carried vectors matter.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "ZnMatrix", "TransformLog", "RetrySignal",
    "lower_row_echelon", "solve_final", "xgcd",
]

# s*ri + t*rj with four factors below N stays inside int64 for N up to here
_I64_N_CAP = (1 << 31) - 1


def xgcd(a: int, b: int):
    """(g, s, t) with s*a + t*b = g = gcd(a, b), g >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        qt, rm = divmod(a, b)
        a, b = b, rm
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


class ZnMatrix:
    """Dense (m+1) x m matrix over Z/NZ, entries reduced into [0, N)."""

    def __init__(self, N: int, rows):
        if N < 2:
            raise ValueError("modulus must be at least 2")
        self.N = N
        dtype = np.int64 if N <= _I64_N_CAP else object
        a = np.array([[int(v) % N for v in row] for row in rows], dtype=dtype)
        if a.ndim != 2:
            raise ValueError("rows must form a rectangular matrix")
        self.a = a

    @classmethod
    def zeros(cls, N: int, nrows: int, ncols: int) -> "ZnMatrix":
        m = cls.__new__(cls)
        m.N = N
        dtype = np.int64 if N <= _I64_N_CAP else object
        m.a = np.zeros((nrows, ncols), dtype=dtype)
        return m

    @property
    def shape(self):
        return self.a.shape

    def copy(self) -> "ZnMatrix":
        m = ZnMatrix.__new__(ZnMatrix)
        m.N = self.N
        m.a = self.a.copy()
        return m

    def row_lists(self) -> list:
        return [[int(v) for v in row] for row in self.a]

    def __eq__(self, other):
        return (isinstance(other, ZnMatrix) and self.N == other.N
                and self.a.shape == other.a.shape
                and bool((self.a == other.a).all()))

    def __repr__(self):
        return "ZnMatrix(N=%d, %dx%d)" % (self.N, *self.a.shape)


class TransformLog:
    """Replayable list of elementary row operations.

    Ops are ("swap", i, j) and ("combine", i, j, s, t, sp, tp) meaning
    rows (i, j) <- (s*ri + t*rj, sp*ri + tp*rj) with s*tp - t*sp == +-1
    mod N.  Swaps have determinant -1, combines are checked per step.
    """

    def __init__(self, N: int):
        self.N = N
        self.ops = []

    def __len__(self):
        return len(self.ops)

    def swap(self, i: int, j: int):
        self.ops.append(("swap", i, j))

    def combine(self, i: int, j: int, s: int, t: int, sp: int, tp: int):
        N = self.N
        self.ops.append(("combine", i, j, s % N, t % N, sp % N, tp % N))

    def det_units(self) -> bool:
        """Every combine block has determinant +-1 mod N."""
        N = self.N
        for op in self.ops:
            if op[0] == "combine":
                _, _, _, s, t, sp, tp = op
                if (s * tp - t * sp) % N not in (1, N - 1):
                    return False
        return True

    def apply(self, rows, N: int = None) -> list:
        """Replay onto a fresh copy of `rows` (list of int lists)."""
        N = self.N if N is None else N
        out = [[int(v) % N for v in row] for row in rows]
        for op in self.ops:
            if op[0] == "swap":
                _, i, j = op
                out[i], out[j] = out[j], out[i]
            else:
                _, i, j, s, t, sp, tp = op
                ri, rj = out[i], out[j]
                out[i] = [(s * a + t * b) % N for a, b in zip(ri, rj)]
                out[j] = [(sp * a + tp * b) % N for a, b in zip(ri, rj)]
        return out

    def apply_vector(self, vec, N: int = None) -> list:
        cols = self.apply([[v] for v in vec], N)
        return [row[0] for row in cols]


def _apply_combine(a, carried, N, i, j, s, t, sp, tp):
    ri = a[i] % N
    rj = a[j] % N
    a[i] = (s * ri + t * rj) % N
    a[j] = (sp * ri + tp * rj) % N
    for vec in carried:
        vi, vj = vec[i], vec[j]
        vec[i] = (s * vi + t * vj) % N
        vec[j] = (sp * vi + tp * vj) % N


def lower_row_echelon(R: ZnMatrix, carried, log: bool = True):
    """Echelonize bottom-up, right to left; returns (R', carried', log).

    carried: list of length-(nrows) column vectors (plain int lists),
    transformed in lockstep with the matrix rows.  With log=False the
    returned TransformLog is None (used for large solves; the carried
    vectors are still exact) and a faster deferred-reduction sweep is
    used when the modulus leaves enough int64 headroom.
    """
    R = R.copy()
    N = R.N
    a = R.a
    nrows, ncols = a.shape
    carried = [[int(v) % N for v in vec] for vec in carried]
    for vec in carried:
        if len(vec) != nrows:
            raise ValueError("carried vector length != row count")
    tl = TransformLog(N) if log else None

    # entries may drift up to ncols*N^2 between reductions on this path;
    # within float64's exact-integer range that is both safe and fast
    lazy = (tl is None and a.dtype == np.int64
            and (ncols + 2) * N * N < (1 << 53))
    if lazy:
        _echelon_lazy(a, carried, N)
        R.a = a
        return R, carried, None

    a_end = nrows - 1
    for col in range(ncols - 1, -1, -1):
        if a_end < 0:
            break
        column = a[: a_end + 1, col]
        nz = np.flatnonzero(column != 0) if a.dtype != object else \
            np.array([i for i in range(a_end + 1) if column[i]], dtype=int)
        if len(nz) == 0:
            continue
        if column[a_end] == 0:
            src = int(nz[-1])
            a[[src, a_end]] = a[[a_end, src]]
            for vec in carried:
                vec[src], vec[a_end] = vec[a_end], vec[src]
            if tl is not None:
                tl.swap(src, a_end)
        # fold rows into the pivot until it holds the column gcd
        target = 0
        for i in range(a_end + 1):
            v = int(a[i, col])
            if v:
                target = math.gcd(target, v)
        g = int(a[a_end, col])
        for i in range(a_end):
            if g == target:
                break
            v = int(a[i, col])
            if v % g == 0:
                continue
            gn, s, t = xgcd(g, v)
            sp, tp = -v // gn, g // gn
            _apply_combine(a, carried, N, a_end, i, s, t, sp, tp)
            if tl is not None:
                tl.combine(a_end, i, s, t, sp, tp)
            g = gn
        # sweep: every remaining entry is a multiple of the pivot
        pivot_row = a[a_end, : col + 1].copy()
        quots = a[:a_end, col] // g
        if a.dtype == object:
            for i in range(a_end):
                qv = int(quots[i])
                if qv:
                    a[i, : col + 1] = (a[i, : col + 1]
                                       - qv * pivot_row) % N
        else:
            upd = np.flatnonzero(quots != 0)
            if len(upd):
                blk = a[upd, : col + 1]
                blk -= quots[upd, None] * pivot_row[None, :]
                blk %= N
                a[upd, : col + 1] = blk
        for i in range(a_end):
            qv = int(quots[i])
            if qv:
                for vec in carried:
                    vec[i] = (vec[i] - qv * vec[a_end]) % N
                if tl is not None:
                    tl.combine(i, a_end, 1, -qv, 0, 1)
        a_end -= 1

    R.a = a
    return R, carried, tl


def _echelon_lazy(a, carried, N):
    """Unlogged echelonization with deferred entry reduction.

    Same pivots and row operations as the logged path, but entries are
    only reduced mod N where a true value is needed (the working column,
    the pivot row, rows touched by a gcd fold) and once at the end.  All
    quotients come from reduced values, so every intermediate is bounded
    in magnitude by (ncols+2)*N^2; the caller checks that fits below 2^53,
    where float64 arithmetic on integers is exact and the vectorized
    sweep runs several times faster than int64.
    """
    nrows, ncols = a.shape
    nvec = len(carried)
    f = a.astype(np.float64)
    carr = np.array(carried, dtype=np.int64).reshape(nvec, nrows)

    a_end = nrows - 1
    for col in range(ncols - 1, -1, -1):
        if a_end < 0:
            break
        f[: a_end + 1, col] %= N
        column = f[: a_end + 1, col].astype(np.int64)
        nz = np.flatnonzero(column)
        if len(nz) == 0:
            continue
        if column[a_end] == 0:
            src = int(nz[-1])
            f[[src, a_end]] = f[[a_end, src]]
            carr[:, [src, a_end]] = carr[:, [a_end, src]]
            column[a_end], column[src] = column[src], column[a_end]
        target = int(np.gcd.reduce(column[nz]))
        g = int(column[a_end])
        for i in range(a_end):
            if g == target:
                break
            v = int(column[i])
            if v % g == 0:
                continue
            gn, s, t = xgcd(g, v)
            sp, tp = -v // gn, g // gn
            rp = f[a_end, : col + 1] % N
            ri = f[i, : col + 1] % N
            f[a_end, : col + 1] = (s * rp + t * ri) % N
            f[i, : col + 1] = (sp * rp + tp * ri) % N
            vp = carr[:, a_end].copy()
            vi = carr[:, i].copy()
            carr[:, a_end] = (s * vp + t * vi) % N
            carr[:, i] = (sp * vp + tp * vi) % N
            column[i] = int(f[i, col])
            g = gn
        f[a_end, : col + 1] %= N
        pivot_row = f[a_end, :col].copy()
        quots = column[:a_end] // g
        upd = np.flatnonzero(quots)
        if len(upd):
            # fancy indexing gathers and scatters; past half density the
            # contiguous full-block update is cheaper
            if len(upd) * 2 >= a_end:
                qf = quots.astype(np.float64)
                f[:a_end, :col] -= qf[:, None] * pivot_row[None, :]
                f[:a_end, col] = 0.0
            else:
                qf = quots[upd].astype(np.float64)
                f[upd, :col] -= qf[:, None] * pivot_row[None, :]
                f[upd, col] = 0.0
            carr[:, upd] = (carr[:, upd]
                            - quots[upd][None, :] * carr[:, a_end, None]) % N
        a_end -= 1

    f %= N
    a[:, :] = f.astype(np.int64)
    for vi in range(nvec):
        carried[vi][:] = [int(v) for v in carr[vi]]


class RetrySignal:
    """gcd(beta1, N) > 1: the final congruence is not invertible."""

    def __init__(self, gcd: int):
        self.gcd = gcd

    def __repr__(self):
        return "RetrySignal(gcd=%d)" % self.gcd


def solve_final(alpha1: int, beta1: int, N: int):
    """x with alpha1 + x*beta1 == 0 mod N, or a RetrySignal."""
    g = math.gcd(beta1 % N, N)
    if g > 1:
        return RetrySignal(g)
    return (-alpha1 * pow(beta1, -1, N)) % N
