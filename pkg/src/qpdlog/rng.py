"""Deterministic, named random streams.

Every randomized routine takes an explicit Stream.  Streams are keyed by a
SHA-256 state and derive independent children by label, so a run is fully
reproducible from one integer seed and the derivation tree is stable under
code reorganization: the child for ("row", 17) is the same bytes no matter
which worker asks for it.  That is what makes multi-process relation
collection bitwise reproducible at any worker count.
"""

import hashlib

__all__ = ["Stream"]

_SEP = b"\x1f"


class Stream:
    """Counter-mode SHA-256 byte stream with labeled child derivation."""

    __slots__ = ("_key", "_counter", "_buf", "_pos")

    def __init__(self, key: bytes):
        self._key = key
        self._counter = 0
        self._buf = b""
        self._pos = 0

    @classmethod
    def from_seed(cls, seed: int, *labels) -> "Stream":
        root = hashlib.sha256(b"qpdlog-stream" + _SEP + str(int(seed)).encode()).digest()
        s = cls(root)
        return s.child(*labels) if labels else s

    def child(self, *labels) -> "Stream":
        h = hashlib.sha256()
        h.update(self._key)
        for lab in labels:
            h.update(_SEP)
            if isinstance(lab, bytes):
                h.update(lab)
            else:
                h.update(str(lab).encode())
        return Stream(h.digest())

    def _refill(self):
        h = hashlib.sha256()
        h.update(self._key)
        h.update(_SEP)
        h.update(self._counter.to_bytes(8, "big"))
        self._buf = h.digest()
        self._pos = 0
        self._counter += 1

    def bytes(self, n: int) -> bytes:
        out = bytearray()
        while n > 0:
            if self._pos >= len(self._buf):
                self._refill()
            take = min(n, len(self._buf) - self._pos)
            out += self._buf[self._pos:self._pos + take]
            self._pos += take
            n -= take
        return bytes(out)

    def randbits(self, k: int) -> int:
        nbytes = (k + 7) // 8
        v = int.from_bytes(self.bytes(nbytes), "big")
        return v >> (nbytes * 8 - k)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        if n == 1:
            return 0
        k = (n - 1).bit_length()
        while True:
            v = self.randbits(k)
            if v < n:
                return v

    def randrange(self, lo: int, hi: int) -> int:
        return lo + self.randbelow(hi - lo)

    def choice(self, seq):
        return seq[self.randbelow(len(seq))]

    # -- field and polynomial sampling --------------------------------------

    def field_elt(self, level) -> int:
        """Uniform raw element of a tower level."""
        return level.from_rank(self.randbelow(level.size))

    def nonzero_field_elt(self, level) -> int:
        return level.from_rank(1 + self.randbelow(level.size - 1))

    def poly(self, level, deg: int):
        """Uniform polynomial of degree at most deg (possibly lower)."""
        from .poly import DensePoly
        return DensePoly(level, [self.field_elt(level) for _ in range(deg + 1)])

    def monic_poly(self, level, deg: int):
        from .poly import DensePoly
        coeffs = [self.field_elt(level) for _ in range(deg)]
        return DensePoly(level, coeffs + [1])

    def monic_irreducible(self, level, deg: int, max_tries: int = 10000):
        from . import factor
        for _ in range(max_tries):
            f = self.monic_poly(level, deg)
            if factor.is_irreducible(f):
                return f
        raise RuntimeError("no irreducible of degree %d found in %d tries" % (deg, max_tries))
