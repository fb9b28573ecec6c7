"""Recursive descent: rewrite any nonzero target-field element over the
factor base.

The pipeline is lift-then-halve.  A target element z is first lifted to a
monic irreducible good polynomial of 2-power degree congruent to z's
representative mod I; each polynomial of degree 2d is then factored into
conjugate quadratics over the degree-d extension, one quadratic is
eliminated there, and the resulting linear factors are pushed back down by
Galois norms.  Degrees halve at every stage until everything is a constant,
a linear, or h1, all of which the factor base indexes directly.

Failure is a first-class outcome at small parameters: a quadratic may have
no splitting candidate, or all candidates may produce bad descendants.
Budgeted retries climb outward (re-randomize the failing node's parent,
then abandon the lift) instead of aborting the whole descent.
"""

from __future__ import annotations

import time

from . import factor as factorlib
from .elim import (BSET_CAP, Exhausted, Rewrite, eliminate_quadratic, is_good,
                   norm_elt, verify_rewrite)
from .poly import DensePoly, poly_encode
from .tower import FieldElt

__all__ = [
    "DescentConfig", "DescentError", "RelationVec", "ProofLog",
    "LiftStep", "ElimStep", "minimal_lift_exponent",
    "lift_target", "eliminate_even", "descend", "verify_relation",
]


class DescentError(RuntimeError):
    """Structural misuse; budget failures raise Exhausted instead."""


def minimal_lift_exponent(l: int) -> int:
    """Smallest e with 2^e > 4l."""
    e = 3
    while (1 << e) <= 4 * l:
        e += 1
    return e


class DescentConfig:
    """Budgets and policy for one descent.

    e is the lift exponent; None picks the minimal e with 2^e > 4l at use
    time.  backtrack_budget bounds elimination re-runs per tree node,
    max_restarts bounds fresh lifts per descend call.
    """

    __slots__ = ("e", "lift_budget", "elim_budget", "backtrack_budget",
                 "vet_budget", "policy", "max_restarts")

    def __init__(self, e=None, lift_budget=1000, elim_budget=4096,
                 backtrack_budget=8, vet_budget=64, policy="auto",
                 max_restarts=16):
        if e is not None and e < 1:
            raise ValueError("lift exponent must be positive")
        for name, v in (("lift_budget", lift_budget),
                        ("elim_budget", elim_budget),
                        ("backtrack_budget", backtrack_budget),
                        ("vet_budget", vet_budget),
                        ("max_restarts", max_restarts)):
            if v < 1:
                raise ValueError("%s must be positive" % name)
        self.e = e
        self.lift_budget = lift_budget
        self.elim_budget = elim_budget
        self.backtrack_budget = backtrack_budget
        self.vet_budget = vet_budget
        self.policy = policy
        self.max_restarts = max_restarts

    def lift_exponent(self, l: int) -> int:
        if self.e is None:
            return minimal_lift_exponent(l)
        if (1 << self.e) <= 4 * l:
            raise ValueError("2^e = %d does not exceed 4l = %d"
                             % (1 << self.e, 4 * l))
        return self.e


class RelationVec:
    """Sparse factor-base exponent vector, entries reduced mod N."""

    __slots__ = ("exps",)

    def __init__(self, exps=None):
        self.exps = dict(exps) if exps else {}

    def add(self, j: int, e: int, N: int):
        v = (self.exps.get(j, 0) + e) % N
        if v:
            self.exps[j] = v
        else:
            self.exps.pop(j, None)

    def items(self):
        return sorted(self.exps.items())

    def __len__(self):
        return len(self.exps)

    def __eq__(self, other):
        return isinstance(other, RelationVec) and other.exps == self.exps

    def __hash__(self):
        return hash(tuple(sorted(self.exps.items())))

    def encode(self) -> dict:
        return {str(j): e for j, e in self.items()}

    def __repr__(self):
        return "RelationVec(%d entries)" % len(self.exps)


class LiftStep:
    __slots__ = ("z_enc", "lifted", "tries")

    def __init__(self, z_enc, lifted, tries):
        self.z_enc = z_enc
        self.lifted = lifted
        self.tries = tries

    def encode(self):
        return {"step": "lift", "degree": self.lifted.deg, "tries": self.tries,
                "poly": poly_encode(self.lifted)}


class ElimStep:
    """One elimination in the descent tree.

    parent/slot address the factor this step consumed: slot i of step
    `parent`'s rewrite (the lift counts as step 0 with its lifted
    polynomial in slot 0).  exp is the exponent carried into this node.
    """

    __slots__ = ("parent", "slot", "exp", "rewrite", "attempt",
                 "_parent_ref")

    def __init__(self, exp, rewrite, attempt, parent_ref, slot):
        self.exp = exp
        self.rewrite = rewrite
        self.attempt = attempt
        self._parent_ref = parent_ref
        self.slot = slot
        self.parent = None  # patched once the step order is final

    def encode(self):
        rw = self.rewrite
        return {
            "step": "eliminate",
            "parent": self.parent,
            "slot": self.slot,
            "degree": rw.lhs.deg,
            "level": rw.level.name,
            "exp": self.exp,
            "attempt": self.attempt,
            "h1_exp": rw.h1_exp,
            "unit": rw.unit.encode(),
            "factors": [[poly_encode(f), e] for f, e, _ in rw.factors],
        }


class ProofLog:
    """Ordered, replayable record of one descent."""

    __slots__ = ("steps", "stats")

    def __init__(self, steps, stats):
        self.steps = steps
        self.stats = stats

    def encode(self) -> list:
        return [st.encode() for st in self.steps]

    def replay(self, s, z, rel: RelationVec) -> bool:
        """Re-verify every step and re-derive the RelationVec from scratch."""
        if not self.steps or not isinstance(self.steps[0], LiftStep):
            return False
        lift = self.steps[0]
        if s.target_reduce(lift.lifted) != z:
            return False
        N = s.N
        got = RelationVec()
        pending = {(0, 0): (lift.lifted, 1)}
        for eid in range(1, len(self.steps)):
            st = self.steps[eid]
            key = (st.parent, st.slot)
            if key not in pending:
                return False
            P, exp = pending.pop(key)
            rw = st.rewrite
            if rw.lhs != P or st.exp != exp:
                return False
            if not verify_rewrite(s, rw):
                return False
            for j, d in _step_credits(s, rw, exp):
                got.add(j, d, N)
            for i, (f, fe, _lvl) in enumerate(rw.factors):
                ce = (exp * fe) % N
                direct = _credit(s, f, ce)
                if direct is None:
                    pending[(eid, i)] = (f, ce)
                else:
                    for j, d in direct:
                        got.add(j, d, N)
        if pending:
            return False
        return got == rel and verify_relation(s, z, rel)


# ---------------------------------------------------------------------------
# factor-base crediting


def _credit(s, P: DensePoly, e: int):
    """Credit deltas [(index, exp)] for P^e, or None if P must recurse."""
    fb = s.factor_base
    if P.deg <= 1:
        return [(fb.index_of(P), e)]
    if P.deg == 2 and s.h1.deg == 2:
        if P == s.h1:
            return [(fb.index_of(s.h1), e)]
        h1m, lead = s.h1.monic()
        if P == h1m:
            # h1 = lead * P, so P^e = h1^e * lead^-e
            return [(fb.index_of(s.h1), e),
                    (fb.constant_index(s.level1.inv(lead)), e)]
    return None


def _step_credits(s, rw: Rewrite, exp: int):
    """Unit and h1 contributions of one rewrite, scaled by the carried exp."""
    out = []
    lvl1 = s.level1
    un = norm_elt(rw.level, lvl1, rw.unit.n)
    if un != 1:
        out.append((s.factor_base.constant_index(un), exp))
    if rw.h1_exp and not (s.h1.deg == 0 and s.h1.c[0] == 1):
        D = rw.level.m // lvl1.m
        out.append((s.factor_base.index_of(s.h1),
                    (rw.h1_exp * D * exp) % s.N))
    return out


# ---------------------------------------------------------------------------
# lifting


def lift_target(s, z, cfg: DescentConfig, rng):
    """Lift z to a monic irreducible good polynomial of degree 2^e.

    Returns (Q_lift, tries) with Q_lift = rep(z) + I*r for a random monic r,
    hence Q_lift mod I = rep(z) exactly and the lift carries unit 1.
    """
    if z.is_zero:
        raise ValueError("cannot lift zero")
    e = cfg.lift_exponent(s.l)
    n = 1 << e
    rep = z.poly
    for t in range(cfg.lift_budget):
        r = rng.child("r", t).monic_poly(s.level1, n - s.l)
        cand = rep + s.I * r
        if not factorlib.is_irreducible(cand):
            continue
        ok, _report = is_good(s, cand)
        if ok:
            return cand, t + 1
    raise Exhausted("no good irreducible lift of degree %d in %d tries"
                    % (n, cfg.lift_budget), {"tries": cfg.lift_budget})


# ---------------------------------------------------------------------------
# one even-degree elimination


def _usable_descendant(s, mu: DensePoly, h1m) -> bool:
    if mu.deg == 2 and h1m is not None and mu == h1m:
        return True  # credited directly, goodness irrelevant
    ok, _report = is_good(s, mu)
    return ok


def _policy_for(cfg, level):
    # at levels too large for a splitting-constant table a split test per
    # random candidate dominates; sampling the constant first is ~2x cheaper
    if cfg.policy == "auto" and level.size > BSET_CAP:
        return "bluher"
    return cfg.policy


def eliminate_even(s, Q: DensePoly, cfg: DescentConfig, rng,
                   vet: bool = True, check_good: bool = True) -> Rewrite:
    """Rewrite an irreducible good Q of 2-power degree 2d at level D.

    For d = 1 this is a plain quadratic elimination.  Otherwise Q is
    factored over the degree-d extension into d conjugate quadratics, the
    canonically first one is eliminated there, and every linear factor is
    normed back to level D, where it lands as mu^d1 for an irreducible mu
    of degree dividing d.  With vet=True a candidate is only accepted when
    all even-degree descendants are again good (or are h1 itself).
    check_good=False skips the quadratic trap gate; only for callers that
    vetted Q themselves.
    """
    n = Q.deg
    if n < 2 or n & (n - 1):
        raise DescentError("degree must be a power of 2, got %d" % n)
    if Q.deg == 2:
        return eliminate_quadratic(s, Q, rng, policy=_policy_for(cfg, Q.level),
                                   elim_budget=cfg.elim_budget,
                                   vet_budget=cfg.vet_budget,
                                   check_good=check_good)
    level = Q.level
    d = n // 2
    rel = level.m // (s.i * s.k)
    up = level.tower.level(rel * d)
    # walk up one quadratic extension at a time, halving the degree per
    # hop: the early splits run at the cheap small levels and the costly
    # top level only ever sees a short polynomial
    Q1 = Q
    dj = rel
    for hop in range(d.bit_length() - 1):
        dj *= 2
        nxt = level.tower.level(dj)
        Q1 = factorlib.one_equal_degree_factor(Q1.map_level(nxt),
                                               Q1.deg // 2,
                                               rng.child("edf", hop))
    # the quadratic factors are exactly the Galois conjugates of Q1 over
    # `level`; the canonical pick is the least encoding among them
    Qp = Q1
    best = factorlib.poly_sort_key(Q1)
    cur = Q1
    for _ in range(d - 1):
        cur = DensePoly(up, [up.frob_p(c, level.m) if c else 0
                             for c in cur.c])
        key = factorlib.poly_sort_key(cur)
        if key < best:
            best = key
            Qp = cur

    h1m = None
    if s.h1.deg == 2:
        h1m = s.h1.monic()[0].map_level(level)

    norms = {}

    def vetter(rts, cof):
        pts = list(rts)
        if cof is not None:
            pts.append(up.neg(cof.c[0]))
        dec = {}
        for r in pts:
            mu, d1 = factorlib.norm_linear_decomposed(r, up, level)
            if mu.deg >= 2 and not _usable_descendant(s, mu, h1m):
                return False
            dec[r] = (mu, d1)
        norms.clear()
        norms.update(dec)
        return True

    rw_up = eliminate_quadratic(s, Qp, rng.child("elim"),
                                policy=_policy_for(cfg, up),
                                elim_budget=cfg.elim_budget,
                                vet_budget=cfg.vet_budget,
                                vetter=vetter if vet else None)

    factors = []
    for f, fe, _lvl in rw_up.factors:
        r = up.neg(f.c[0])
        hit = norms.get(r)
        if hit is None:
            hit = factorlib.norm_linear_decomposed(r, up, level)
        mu, d1 = hit
        factors.append((mu, fe * d1, level))
    unit = FieldElt(level, norm_elt(up, level, rw_up.unit.n))
    return Rewrite(level, Q, factors, rw_up.h1_exp * d, unit)


# ---------------------------------------------------------------------------
# the full descent


def _node(s, P, exp, cfg, nrng, stats, out, parent_ref, slot):
    """Process one worklist item (P, exp) at level 1; returns credit deltas.

    Appends this subtree's ElimSteps to out in preorder; on failure the
    appended steps are rolled back and Exhausted propagates to the parent,
    which re-runs its own elimination with fresh randomness.
    """
    direct = _credit(s, P, exp)
    if direct is not None:
        return direct
    if P.deg < 2 or P.deg & (P.deg - 1):
        raise DescentError("worklist degree must be a power of 2, got %d"
                           % P.deg)
    # a quadratic at a small level falls back to an exhaustive scan, whose
    # outcome cannot change under a fresh stream; do not retry those
    deterministic = (P.deg == 2 and cfg.policy in ("auto", "exhaust")
                     and s.level1.size <= (1 << 16))
    attempts = 1 if deterministic else cfg.backtrack_budget
    last = None
    for attempt in range(attempts):
        mark = len(out)
        try:
            # P was vetted good by lift_target or the parent's vetter
            rw = eliminate_even(s, P, cfg, nrng.child("try", attempt),
                                check_good=False)
        except Exhausted as ex:
            stats["exhausted"] += 1
            last = ex
            continue
        stats["eliminations"] += 1
        step = ElimStep(exp, rw, attempt, parent_ref, slot)
        out.append(step)
        credits = list(_step_credits(s, rw, exp))
        try:
            for i, (f, fe, _lvl) in enumerate(rw.factors):
                credits.extend(_node(s, f, (exp * fe) % s.N, cfg,
                                     nrng.child("sub", attempt, i), stats,
                                     out, step, i))
            return credits
        except Exhausted as ex:
            stats["backtracks"] += 1
            last = ex
            del out[mark:]
            continue
    raise Exhausted("node of degree %d gave up after %d attempts"
                    % (P.deg, attempts),
                    getattr(last, "stats", None) or {})


def descend(s, z, cfg: DescentConfig = None, rng=None):
    """Rewrite z over the factor base; returns (RelationVec, ProofLog).

    The result is verified before it is returned; an unverifiable relation
    is a bug, never an output.
    """
    if rng is None:
        raise ValueError("descend needs an explicit random stream")
    if z.is_zero:
        raise ValueError("cannot descend zero")
    if s.l < 2:
        # with a linear modulus the factor base contains X - root, a zero
        # divisor in the target field, and elimination cofactors may hit it
        raise DescentError("descent needs deg I >= 2")
    cfg = cfg or DescentConfig()
    t0 = time.monotonic()
    stats = {"lift_tries": 0, "eliminations": 0, "backtracks": 0,
             "exhausted": 0, "restarts": 0, "wall_ms": 0}
    last = None
    for restart in range(cfg.max_restarts):
        if restart:
            stats["restarts"] += 1
        try:
            lifted, tries = lift_target(s, z, cfg, rng.child("lift", restart))
        except Exhausted as ex:
            stats["lift_tries"] += cfg.lift_budget
            last = ex
            continue
        stats["lift_tries"] += tries
        lift_step = LiftStep(z.encode(), lifted, tries)
        out = [lift_step]
        try:
            credits = _node(s, lifted, 1, cfg, rng.child("tree", restart),
                            stats, out, None, 0)
        except Exhausted as ex:
            last = ex
            continue
        rel = RelationVec()
        for j, d in credits:
            rel.add(j, d, s.N)
        for st in out[1:]:
            st.parent = 0 if st._parent_ref is None else out.index(
                st._parent_ref)
        stats["wall_ms"] = int((time.monotonic() - t0) * 1000)
        log = ProofLog(out, dict(stats))
        if not verify_relation(s, z, rel):
            raise DescentError("descent produced an unverifiable relation")
        return rel, log
    stats["wall_ms"] = int((time.monotonic() - t0) * 1000)
    raise Exhausted("descent gave up after %d lifts" % cfg.max_restarts,
                    dict(stats, last=str(last)))


def verify_relation(s, z, rel: RelationVec) -> bool:
    """Exact target-field check that z equals the factor-base product."""
    return s.eval_product(rel.items()) == z
