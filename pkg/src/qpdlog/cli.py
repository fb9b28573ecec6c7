"""Command-line surface: setups, solves, descents, eliminations, Bluher
queries, relation verification, benchmarks.

Results are printed to stdout as JSON; notes and progress go to stderr.
Exit codes: 0 success, 2 budget or retry-cap exhaustion, 3 invalid input,
4 validation failure (trap refusals, failed verification).
"""

import json
import time

import click

from . import __version__
from .bluher import ENUM_CAP, bluher_from_u, enumerate_bluher, is_bluher
from .descent import (DescentConfig, DescentError, descend, eliminate_even,
                      minimal_lift_exponent, verify_relation)
from .elim import Exhausted, TrapError, eliminate_quadratic, verify_rewrite
from .linalg import ZnMatrix, lower_row_echelon
from .poly import poly_decode, poly_encode
from .rng import Stream
from .setup import (guardrail_warnings, load_setup, make_kummer, save_setup,
                    search_general, validate_setup)
from .solver import RunReport, SolveConfig, SolveError, read_relations, solve_dlp
from .tower import build_tower


class _VerifyFailed(RuntimeError):
    pass


def _prime_power(q: int):
    """(p, i) with q = p^i, p prime."""
    if q < 2:
        raise ValueError("q must be at least 2")
    p = q
    d = 2
    while d * d <= q:
        if q % d == 0:
            p = d
            break
        d += 1
    i, t = 0, q
    while t % p == 0:
        t //= p
        i += 1
    if t != 1:
        raise ValueError("q = %d is not a prime power" % q)
    return p, i


def _decode_target(s, text: str):
    data = json.loads(text)
    if isinstance(data, str):
        data = [data]
    return s.decode_target(data)


def _decode_elt(tower, text: str):
    # tolerate a JSON-quoted element string
    if text.startswith('"'):
        text = json.loads(text)
    return tower.decode(text)


def _rewrite_dict(rw) -> dict:
    return {
        "level": rw.level.name,
        "lhs": poly_encode(rw.lhs),
        "unit": rw.unit.encode(),
        "h1_exp": rw.h1_exp,
        "factors": [[poly_encode(f), e, lvl.name] for f, e, lvl in rw.factors],
    }


def _emit(obj):
    click.echo(json.dumps(obj, sort_keys=True, default=str))


@click.group()
@click.version_option(__version__, prog_name="qpdlog")
def cli():
    """Discrete logarithms in F_q^(kl) at fixed small characteristic."""


# -- setup --------------------------------------------------------------


@cli.group()
def setup():
    """Construct a field setup and save it as JSON."""


def _finish_setup(s, out: str) -> dict:
    for w in guardrail_warnings(s.q, s.k):
        click.echo("note: %s" % w, err=True)
    problems = validate_setup(s)
    if problems:
        raise _VerifyFailed("; ".join(problems))
    save_setup(s, out)
    return {"flavor": s.flavor, "q": s.q, "k": s.k, "l": s.l,
            "m": s.m, "N": str(s.N), "h1_degree": s.h1.deg, "out": out}


@setup.command("kummer")
@click.option("--q", type=int, required=True, help="base field order, prime power >= 3")
@click.option("--k", type=int, required=True, help="base extension degree")
@click.option("--emax", type=int, default=None,
              help="tower height (default: minimal for descents at l = q-1)")
@click.option("--degree-budget", type=int, default=128, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def setup_kummer(q, k, emax, degree_budget, out):
    """Kummer setup: h1 = 1, h0 = aX, I = X^(q-1) - a."""
    p, i = _prime_power(q)
    if emax is None:
        emax = minimal_lift_exponent(q - 1) - 1
    tower = build_tower(p, i, k, emax, degree_budget=degree_budget)
    _emit(_finish_setup(make_kummer(tower), out))


@setup.command("search")
@click.option("--q", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--l", type=int, required=True, help="target modulus degree")
@click.option("--seed", type=int, required=True)
@click.option("--budget", type=int, default=10000, show_default=True)
@click.option("--emax", type=int, default=None)
@click.option("--degree-budget", type=int, default=128, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def setup_search(q, k, l, seed, budget, emax, degree_budget, out):
    """Random search for a general setup with a degree-l modulus."""
    p, i = _prime_power(q)
    if emax is None:
        emax = minimal_lift_exponent(l) - 1
    tower = build_tower(p, i, k, emax, degree_budget=degree_budget)
    s, stats = search_general(tower, q, k, l, Stream.from_seed(seed, "setup"),
                              budget=budget)
    if s is None:
        raise Exhausted("no setup within %d tries" % budget, stats)
    info = _finish_setup(s, out)
    info["search_stats"] = stats
    _emit(info)


# -- solve / verify -----------------------------------------------------


@cli.command()
@click.option("--setup", "setup_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--g", "g_enc", required=True, help="base element, JSON encoding")
@click.option("--h", "h_enc", required=True, help="target element, JSON encoding")
@click.option("--seed", type=int, required=True)
@click.option("--threads", type=int, default=None, envvar="QPDLOG_THREADS",
              help="relation-collection workers [env: QPDLOG_THREADS]")
@click.option("--max-retries", type=int, default=8, show_default=True)
@click.option("--relations-out", type=click.Path(dir_okay=False), default=None,
              help="write the successful round's relations as JSON lines")
def solve(setup_path, g_enc, h_enc, seed, threads, max_retries, relations_out):
    """Find x with g^x = h; the result is verified before it is printed."""
    s = load_setup(setup_path)
    g = _decode_target(s, g_enc)
    h = _decode_target(s, h_enc)
    if g.is_zero or h.is_zero:
        raise ValueError("g and h must be nonzero")
    cfg = SolveConfig(seed, threads=threads or 1, max_outer_retries=max_retries,
                      relations_path=relations_out)
    rep = solve_dlp(s, g, h, cfg)
    _emit(rep.to_json_dict())


@cli.command()
@click.option("--setup", "setup_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--relations", "rel_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--g", "g_enc", required=True)
@click.option("--h", "h_enc", required=True)
def verify(setup_path, rel_path, g_enc, h_enc):
    """Re-check every relation row exactly in the target field."""
    s = load_setup(setup_path)
    g = _decode_target(s, g_enc)
    h = _decode_target(s, h_enc)
    alpha, beta, rows = read_relations(rel_path)
    failed = [i for i, (a, b, row) in enumerate(zip(alpha, beta, rows))
              if (g ** a) * (h ** b) != s.eval_product(row.items())]
    _emit({"rows": len(rows), "failed": failed, "ok": not failed})
    if failed:
        raise _VerifyFailed("%d of %d rows failed" % (len(failed), len(rows)))


# -- descent / elimination ----------------------------------------------


@cli.command("descend")
@click.option("--setup", "setup_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--z", "z_enc", required=True, help="target element, JSON encoding")
@click.option("--seed", type=int, required=True)
@click.option("--lift-exponent", type=int, default=None)
@click.option("--lift-budget", type=int, default=1000, show_default=True)
@click.option("--elim-budget", type=int, default=4096, show_default=True)
@click.option("--backtrack-budget", type=int, default=8, show_default=True)
@click.option("--vet-budget", type=int, default=64, show_default=True)
@click.option("--max-restarts", type=int, default=16, show_default=True)
@click.option("--policy", type=click.Choice(["auto", "random", "exhaust", "bluher"]),
              default="auto", show_default=True)
def descend_cmd(setup_path, z_enc, seed, lift_exponent, lift_budget,
                elim_budget, backtrack_budget, vet_budget, max_restarts, policy):
    """Rewrite one target element over the factor base."""
    s = load_setup(setup_path)
    z = _decode_target(s, z_enc)
    cfg = DescentConfig(e=lift_exponent, lift_budget=lift_budget,
                        elim_budget=elim_budget, backtrack_budget=backtrack_budget,
                        vet_budget=vet_budget, policy=policy,
                        max_restarts=max_restarts)
    rel, log = descend(s, z, cfg, Stream.from_seed(seed, "descend"))
    ok = verify_relation(s, z, rel)
    _emit({"relation": rel.encode(), "verified": ok, "proof": log.encode(),
           "stats": log.stats})
    if not ok:
        raise _VerifyFailed("relation failed re-verification")


@cli.command("eliminate")
@click.option("--setup", "setup_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--level", "level_d", type=int, required=True,
              help="chain level D; the field F_q^(kD)")
@click.option("--Q", "q_enc", required=True, help="monic irreducible, JSON encoding")
@click.option("--policy", type=click.Choice(["auto", "random", "exhaust", "bluher"]),
              default="auto", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--elim-budget", type=int, default=4096, show_default=True)
@click.option("--vet-budget", type=int, default=64, show_default=True)
def eliminate_cmd(setup_path, level_d, q_enc, policy, seed, elim_budget, vet_budget):
    """Rewrite one even-degree irreducible at a chain level."""
    s = load_setup(setup_path)
    lv = s.tower.level(level_d)
    Q = poly_decode(s.tower, json.loads(q_enc), level=lv)
    rng = Stream.from_seed(seed, "eliminate")
    if Q.deg == 2:
        rw = eliminate_quadratic(s, Q, rng, policy=policy,
                                 elim_budget=elim_budget, vet_budget=vet_budget)
    else:
        cfg = DescentConfig(elim_budget=elim_budget, vet_budget=vet_budget,
                            policy=policy)
        rw = eliminate_even(s, Q, cfg, rng)
    ok = verify_rewrite(s, rw)
    _emit({"rewrite": _rewrite_dict(rw), "verified": ok})
    if not ok:
        raise _VerifyFailed("rewrite failed re-verification")


@cli.command("bluher")
@click.option("--setup", "setup_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--level", "level_d", type=int, required=True)
@click.option("--enumerate", "do_enum", is_flag=True,
              help="walk the whole level; exhaustible levels only")
@click.option("--u", "u_enc", default=None, help="parameterization input element")
@click.option("--b", "--B", "b_enc", default=None, help="membership query element")
@click.option("--cap", type=int, default=ENUM_CAP, show_default=True)
def bluher_cmd(setup_path, level_d, do_enum, u_enc, b_enc, cap):
    """Splitting constants of X^(q+1) - BX + B at a chain level."""
    s = load_setup(setup_path)
    lv = s.tower.level(level_d)
    if sum(map(bool, (do_enum, u_enc, b_enc))) != 1:
        raise ValueError("exactly one of --enumerate, --u, --b is required")
    if u_enc:
        sample = bluher_from_u(lv, _decode_elt(s.tower, u_enc))
        _emit({"u": sample.u.encode(), "B": sample.B.encode(), "member": True})
        return
    if b_enc:
        B = _decode_elt(s.tower, b_enc)
        _emit({"B": B.encode(), "member": is_bluher(lv, B)})
        return
    enum = enumerate_bluher(lv, cap)
    for elt in enum.elements():
        _emit({"B": elt.encode(), "preimages": enum.counts[elt.n]})
    _emit({"count": len(enum), "domain": enum.domain_size,
           "estimate_q^(kD-3)": enum.estimate})


# -- bench --------------------------------------------------------------


def _bench_descents(s, rng, n: int) -> float:
    cfg = DescentConfig()
    t0 = time.perf_counter()
    for i in range(n):
        z = s.random_target(rng.child("z", i))
        descend(s, z, cfg, rng.child("run", i))
    return time.perf_counter() - t0


def _bench_echelon(N: int, m: int, rng) -> float:
    R = ZnMatrix.zeros(N, m + 1, m)
    arr = R.a
    for i in range(m + 1):
        for j in range(m):
            arr[i, j] = rng.randbelow(N)
    carried = [[rng.randbelow(N) for _ in range(m + 1)] for _ in range(2)]
    t0 = time.perf_counter()
    lower_row_echelon(R, carried, log=False)
    return time.perf_counter() - t0


@cli.command()
@click.option("--suite", type=click.Choice(["small", "medium"]), required=True)
@click.option("--seed", type=int, default=0, show_default=True)
def bench(suite, seed):
    """Timed end-to-end exercises at desk-scale parameters."""
    rng = Stream.from_seed(seed, "bench")
    steps = []
    t_all = time.perf_counter()

    def step(name, wall):
        steps.append({"name": name, "wall_s": round(wall, 3)})
        click.echo("bench: %-28s %8.3fs" % (name, wall), err=True)

    t0 = time.perf_counter()
    tower = build_tower(2, 1, 4, 3)
    sg, _ = search_general(tower, 2, 4, 3, Stream.from_seed(1, "setup"),
                           budget=4000)
    step("setup q=2 k=4 l=3", time.perf_counter() - t0)
    step("descents x5 (2,4,3)", _bench_descents(sg, rng.child("d1"), 5))
    step("echelon 257x256 N=4095", _bench_echelon(4095, 256, rng.child("e1")))
    if suite == "medium":
        t0 = time.perf_counter()
        sk = make_kummer(build_tower(3, 1, 4, 3))
        step("setup kummer q=3 k=4", time.perf_counter() - t0)
        step("descents x5 kummer", _bench_descents(sk, rng.child("d2"), 5))
        step("echelon 1025x1024 N=6560", _bench_echelon(6560, 1024, rng.child("e2")))
        g = sg.random_target(rng.child("g"))
        x0 = rng.child("x0").randbelow(sg.N)
        t0 = time.perf_counter()
        rep = solve_dlp(sg, g, g ** x0, SolveConfig(seed))
        step("solve (2,4,3), %d retries" % rep.outer_retries,
             time.perf_counter() - t0)
    _emit({"suite": suite, "steps": steps,
           "total_s": round(time.perf_counter() - t_all, 3)})


# -- entry point ---------------------------------------------------------


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as ex:
        return ex.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return 130
    except click.ClickException as ex:
        ex.show()
        return 3
    except (ValueError, KeyError, OSError) as ex:
        # EncodingError and SetupError are Valueerrors; KeyError covers
        # missing tower levels; OSError covers unreadable files
        click.echo("error: %s" % ex, err=True)
        return 3
    except TrapError as ex:
        click.echo("trap: %s" % ex, err=True)
        return 4
    except (_VerifyFailed, DescentError) as ex:
        click.echo("validation failure: %s" % ex, err=True)
        return 4
    except Exhausted as ex:
        click.echo("budget exhausted: %s" % ex, err=True)
        return 2
    except SolveError as ex:
        report = ex.args[1] if len(ex.args) > 1 else None
        if isinstance(report, RunReport):
            _emit(report.to_json_dict())
        click.echo("solve failed: %s" % ex.args[0], err=True)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
