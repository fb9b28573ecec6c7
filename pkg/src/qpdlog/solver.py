"""Randomized discrete-log solver over the descent machinery.

One round: draw (alpha_i, beta_i) uniformly from Z/NZ for each of the
m+1 rows, descend g^alpha_i * h^beta_i to a factor-base relation, stack
the exponent vectors into an (m+1) x m matrix, echelonize with carried
(alpha, beta), and read the final congruence alpha' + x*beta' = 0 mod N
off the all-zero first row.  A non-invertible beta' regenerates every
relation (retrying with reused rows would correlate the rounds).  Any
emitted x is re-verified by exponentiation, so wrong answers cannot
escape regardless of parameter regime.

Rows derive their randomness from per-row child streams of the master
seed, which makes the relation matrix bitwise identical at any worker
count.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .descent import DescentConfig, descend
from .linalg import RetrySignal, ZnMatrix, lower_row_echelon, solve_final
from .rng import Stream
from .setup import Setup, TargetElt, loads_setup

__all__ = [
    "SolveConfig", "RunReport", "SolveError", "Member", "ProbablyNotMember",
    "collect_relations", "solve_dlp", "membership_test",
    "write_relations", "read_relations",
]

# past this row count the per-operation transform log is not worth its
# memory; the carried vectors stay exact either way
_LOG_ROW_CAP = 1 << 10


class SolveError(RuntimeError):
    pass


class SolveConfig:
    """Master seed, worker count, outer retry cap, descent budgets."""

    def __init__(self, seed: int, threads: int = 1, max_outer_retries: int = 8,
                 descent: DescentConfig = None, relations_path: str = None):
        if threads < 1 or max_outer_retries < 1:
            raise ValueError("threads and max_outer_retries must be positive")
        self.seed = int(seed)
        self.threads = int(threads)
        self.max_outer_retries = int(max_outer_retries)
        self.descent = descent if descent is not None else DescentConfig()
        self.relations_path = relations_path


class RunReport:
    def __init__(self, x, outer_retries, obstructions, descent_stats,
                 wall_ms, params):
        self.x = x
        self.outer_retries = outer_retries
        self.obstructions = obstructions
        self.descent_stats = descent_stats
        self.wall_ms = wall_ms
        self.params = params

    def to_json_dict(self) -> dict:
        d = {
            "x": None if self.x is None else str(self.x),
            "outer_retries": self.outer_retries,
            "obstructions": [str(g) for g in self.obstructions],
            "descent_stats": self.descent_stats,
            "wall_ms": self.wall_ms,
            "params": self.params,
        }
        return d


class Member:
    def __init__(self, x: int):
        self.x = x

    def __repr__(self):
        return "Member(x=%d)" % self.x


class ProbablyNotMember:
    def __init__(self, gcds):
        self.gcds = list(gcds)

    def __repr__(self):
        return "ProbablyNotMember(gcds=%s)" % (self.gcds,)


def _row_relation(s: Setup, g: TargetElt, h: TargetElt, row_rng: Stream,
                  dcfg: DescentConfig):
    """One relation row: (alpha, beta, {index: exp}, stats)."""
    N = s.N
    alpha = row_rng.child("alpha").randbelow(N)
    beta = row_rng.child("beta").randbelow(N)
    z = (g ** alpha) * (h ** beta)
    rel, log = descend(s, z, dcfg, rng=row_rng.child("descent"))
    return alpha, beta, rel.encode(), log.stats


_worker_state = None


def _pool_init(setup_json: str, dcfg_kw: dict, g_enc, h_enc):
    global _worker_state
    s = loads_setup(setup_json)
    g = s.decode_target(g_enc)
    h = s.decode_target(h_enc)
    _worker_state = (s, g, h, DescentConfig(**dcfg_kw))


def _pool_row(args):
    i, key_hex = args
    s, g, h, dcfg = _worker_state
    return i, _row_relation(s, g, h, Stream(bytes.fromhex(key_hex)), dcfg)


def _dcfg_kwargs(dcfg: DescentConfig) -> dict:
    return {
        "e": dcfg.e,
        "lift_budget": dcfg.lift_budget,
        "elim_budget": dcfg.elim_budget,
        "backtrack_budget": dcfg.backtrack_budget,
        "vet_budget": dcfg.vet_budget,
        "policy": dcfg.policy,
        "max_restarts": dcfg.max_restarts,
    }


def collect_relations(s: Setup, g: TargetElt, h: TargetElt, cfg: SolveConfig,
                      rng: Stream):
    """(m+1) x m relation matrix plus the carried alpha, beta vectors.

    Row i descends g^alpha_i * h^beta_i with randomness from the child
    stream ("row", i), so the result does not depend on cfg.threads.
    """
    if g.is_zero or h.is_zero:
        raise SolveError("g and h must be nonzero")
    m = s.m
    nrows = m + 1
    N = s.N
    results = [None] * nrows
    if cfg.threads == 1:
        for i in range(nrows):
            results[i] = _row_relation(s, g, h, rng.child("row", i),
                                       cfg.descent)
    else:
        tasks = [(i, rng.child("row", i)._key.hex()) for i in range(nrows)]
        init_args = (s.dumps(), _dcfg_kwargs(cfg.descent),
                     g.encode(), h.encode())
        chunk = max(1, nrows // (cfg.threads * 8))
        with ProcessPoolExecutor(max_workers=cfg.threads,
                                 initializer=_pool_init,
                                 initargs=init_args) as pool:
            for i, payload in pool.map(_pool_row, tasks, chunksize=chunk):
                results[i] = payload
    alpha = []
    beta = []
    stats = []
    R = ZnMatrix.zeros(N, nrows, m)
    arr = R.a
    for i, (a, b, exps, st) in enumerate(results):
        alpha.append(a)
        beta.append(b)
        stats.append(st)
        for j_str, e in exps.items():
            arr[i, int(j_str)] = int(e) % N
    return R, alpha, beta, stats


def _aggregate(stats_rows) -> dict:
    agg = {"rows": len(stats_rows)}
    for st in stats_rows:
        for key, v in st.items():
            if key == "wall_ms":
                continue
            agg[key] = agg.get(key, 0) + v
    return agg


def solve_dlp(s: Setup, g: TargetElt, h: TargetElt, cfg: SolveConfig) -> RunReport:
    """x with g^x = h, found by relation collection and echelonization.

    Retries with fresh relations while gcd(beta', N) > 1, up to
    cfg.max_outer_retries rounds; raises SolveError when the cap is hit
    (either h is outside <g> or the round luck was extreme).
    """
    t0 = time.monotonic()
    master = Stream.from_seed(cfg.seed, "solve")
    obstructions = []
    all_stats = []
    params = {
        "q": s.q, "k": s.k, "l": s.l, "N": str(s.N), "m": s.m,
        "flavor": s.flavor, "seed": cfg.seed, "threads": cfg.threads,
        "complexity_reference": "q^(log2 l + O(k))",
        "q_pow_log2_l": round(s.q ** math.log2(s.l), 3),
    }
    for round_no in range(cfg.max_outer_retries):
        rng = master.child("round", round_no)
        R, alpha, beta, stats = collect_relations(s, g, h, cfg, rng)
        all_stats.extend(stats)
        want_log = R.shape[0] <= _LOG_ROW_CAP
        Rp, (ap, bp), _tl = lower_row_echelon(R, [alpha, beta], log=want_log)
        if any(Rp.row_lists()[0]):
            raise SolveError("echelonization left a nonzero first row")
        if (g ** ap[0]) * (h ** bp[0]) != s.one():
            raise SolveError("transformed first row broke the relation "
                             "product; relation collection is unsound")
        res = solve_final(ap[0], bp[0], s.N)
        if isinstance(res, RetrySignal):
            obstructions.append(res.gcd)
            continue
        if g ** res != h:
            raise SolveError("final x failed re-verification")
        if cfg.relations_path:
            rows = [{int(j): int(R.a[i, j]) for j in np.flatnonzero(R.a[i])}
                    for i in range(R.shape[0])]
            write_relations(cfg.relations_path, alpha, beta, rows)
        wall = int((time.monotonic() - t0) * 1000)
        return RunReport(res, round_no, obstructions, _aggregate(all_stats),
                         wall, params)
    wall = int((time.monotonic() - t0) * 1000)
    report = RunReport(None, cfg.max_outer_retries, obstructions,
                       _aggregate(all_stats), wall, params)
    raise SolveError("retry cap exceeded; gcd obstructions %s"
                     % obstructions, report)


def membership_test(s: Setup, g: TargetElt, h: TargetElt, t: int,
                    cfg: SolveConfig):
    """Monte Carlo membership: Member(x) or ProbablyNotMember after t rounds.

    A success certifies h in <g> exactly; t straight gcd obstructions
    only make non-membership likely.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    gcds = []
    for rnd in range(t):
        sub = SolveConfig(seed=Stream.from_seed(cfg.seed, "member", rnd)
                          .randbits(63),
                          threads=cfg.threads, max_outer_retries=1,
                          descent=cfg.descent)
        try:
            report = solve_dlp(s, g, h, sub)
        except SolveError as exc:
            if len(exc.args) > 1:
                gcds.extend(exc.args[1].obstructions)
                continue
            raise
        return Member(report.x)
    return ProbablyNotMember(gcds)


# -- relation files ---------------------------------------------------------

def write_relations(path: str, alpha, beta, exps_rows):
    """JSON lines, one per row: {"alpha": dec, "beta": dec, "exps": {j: dec}}."""
    with open(path, "w", encoding="utf-8") as fh:
        for a, b, exps in zip(alpha, beta, exps_rows):
            fh.write(json.dumps({
                "alpha": str(a),
                "beta": str(b),
                "exps": {str(j): str(e) for j, e in sorted(
                    (int(j), int(e)) for j, e in exps.items())},
            }) + "\n")


def read_relations(path: str):
    alpha, beta, rows = [], [], []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            d = json.loads(line)
            alpha.append(int(d["alpha"]))
            beta.append(int(d["beta"]))
            rows.append({int(j): int(e) for j, e in d["exps"].items()})
    return alpha, beta, rows
