"""Command-line interface: ``quadsys <subcommand> [options]``.

Exit codes: 0 success, 1 negative mathematical verdict (no zero, no
subspace, not minimized, anisotropic, ...), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .bounds import ANNOTATIONS, bound_table, lower_bound, recompute, upper_bound
from .errors import FormatError, QuadsysError
from .fields import FieldDesc
from .ffred import reduce_ft_form, solution_to_polynomials
from .formlang import _poly_str, format_basis, parse_ft_system, parse_system, serialize_forms
from .forms import FormSystem
from .hensel import NO_SEED, SOLVED, lift_nonsingular, padic_solve
from .minimize import check_transform, is_Fq_minimized, minimize_heuristic
from .oneform import is_isotropic_qp
from .subspace import explore_beta, find_totally_singular
from .zeros import enumerate_common_zeros, find_nonsingular_zero

OK, NEGATIVE, ERROR = 0, 1, 2


class Report:
    """Accumulates text lines and a JSON payload; prints one of them."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list[str] = []
        self.data: dict = {}

    def line(self, s: str = ""):
        self.lines.append(s)

    def emit(self, out=None):
        out = out or sys.stdout
        if self.fmt == "json":
            out.write(json.dumps(self.data, sort_keys=True, default=_json_default) + "\n")
        else:
            out.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _json_default(o):
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(type(o))


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if not p.exists():
        corpus = resources.files("quadsys") / "corpus" / Path(path).name
        if path.startswith("corpus/") and corpus.is_file():
            return corpus.read_text()
    return p.read_text()


def _system(args) -> FormSystem:
    return parse_system(_read(args.file)).system()


def _frac_matrix(M) -> list[list[str]]:
    return [[str(v) for v in row] for row in M]


# ---------------------------------------------------------------------------
# subcommands


def cmd_zeros(args, rep: Report) -> int:
    S = _system(args)
    if args.nonsingular:
        res = find_nonsingular_zero(S, samples=args.samples, seed=args.seed)
        rep.data = {"found": res.found, "certified": res.certified, "points_visited": res.points_visited}
        if res.found:
            rep.data["zero"] = res.report.as_dict()
            rep.line(f"nonsingular common zero {list(res.report.point)} (Jacobian rank {res.report.jacobian_rank})")
            return OK
        rep.line("no nonsingular common zero " + ("(certified)" if res.certified else "(sampled, not certified)"))
        return NEGATIVE
    res = enumerate_common_zeros(S, limit=args.limit, projective=args.projective, samples=args.samples, seed=args.seed)
    sing = sum(1 for r in res.reports if r.singular)
    nonzero = [r for r in res.reports if any(r.point)]
    rep.data = {
        "count": res.count,
        "exhaustive": res.exhaustive,
        "truncated": res.truncated,
        "singular": sing,
        "nonsingular": len(res.reports) - sing,
        "zeros": [r.as_dict() for r in res.reports[: args.show]],
    }
    what = "projective" if args.projective else "affine"
    rep.line(f"{res.count} {what} common zeros" + ("" if res.exhaustive else " (sampled)"))
    if res.truncated:
        rep.line(f"stopped after {args.limit}")
    rep.line(f"singular: {sing}, nonsingular: {len(res.reports) - sing}")
    for r in res.reports[: args.show]:
        rep.line(f"  {list(r.point)} rank {r.jacobian_rank}{' singular' if r.singular else ''}")
    return OK if nonzero else NEGATIVE


def cmd_subspace(args, rep: Report) -> int:
    S = _system(args)
    res = find_totally_singular(S, args.dim, budget=args.budget)
    rep.data = {"found": res.found, "certified": res.certified, "nodes": res.nodes, "dim": args.dim}
    if res.found:
        basis = [[int(v) for v in b] for b in res.subspace.basis]
        rep.data["basis"] = basis
        rep.line(f"totally singular subspace of dimension {args.dim}:")
        rep.line(format_basis(basis).rstrip("\n"))
        return OK
    rep.line(
        f"no totally singular subspace of dimension {args.dim} "
        + ("(certified)" if res.certified else "(search budget exhausted, not certified)")
    )
    return NEGATIVE


def cmd_explore_beta(args, rep: Report) -> int:
    F = FieldDesc.gf(args.q)
    res = explore_beta(args.r, F, args.m, args.trials, args.n, seed=args.seed, probe_below=args.probe_below)
    rep.data = {
        "r": args.r,
        "q": args.q,
        "m": args.m,
        "n": args.n,
        "trials": args.trials,
        "successes": res.successes,
        "unknown": res.unknown,
        "failures": len(res.failures),
        "witnesses_below": len(res.witnesses_below),
        "seed": args.seed,
        "empirical": True,
    }
    rep.line(f"empirical: {res.successes}/{args.trials} random systems of {args.r} forms over F_{args.q} in {args.n} variables")
    rep.line(f"vanish on a linear space of projective dimension {args.m} (unknown: {res.unknown})")
    if args.probe_below:
        rep.line(f"certified failures at n = {args.n - 1}: {len(res.witnesses_below)}")
    for S in res.failures[:1]:
        rep.line("first failure:")
        rep.line(serialize_forms(S).rstrip("\n"))
    return OK if res.holds_at_n else NEGATIVE


def _cache_dir() -> Path:
    return Path(os.environ.get("QUADSYS_CACHE", Path.home() / ".cache" / "quadsys"))


def _minimized_payload(S: FormSystem, budget: int) -> dict:
    v = is_Fq_minimized(S, budget=budget)
    d = {"minimized": v.minimized, "certified": v.certified, "searches": len(v.searches)}
    d["targets"] = [s[2] for s in v.searches]
    if v.minimized is False:
        d["k"] = v.k
        d["span"] = [[int(a) for a in row] for row in v.span_basis]
        d["V"] = [[int(a) for a in row] for row in v.V.basis]
    return d


def cmd_minimized(args, rep: Report) -> int:
    text = _read(args.file)
    S = parse_system(text).system()
    key = hashlib.sha256(f"{serialize_forms(S)}|{args.budget}|{__version__}".encode()).hexdigest()
    path = _cache_dir() / f"minimized-{key}.json"
    d = None
    if not args.no_cache and path.exists():
        try:
            d = json.loads(path.read_text())
        except (OSError, ValueError):
            d = None
    if d is None:
        d = _minimized_payload(S, args.budget)
        if not args.no_cache:
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(json.dumps(d, sort_keys=True))
            except OSError:
                pass
    rep.data = d
    if d["minimized"] is True:
        rep.line(f"minimized: true ({d['searches']} certified subspace searches)")
        return OK
    if d["minimized"] is None:
        rep.line("minimized: unknown (search budget exhausted)")
        return NEGATIVE
    rep.line(f"minimized: false; {d['k']} form(s) vanish on a subspace of dimension {S.n - 2 * d['k']}")
    rep.line("span rows: " + "; ".join(" ".join(map(str, r)) for r in d["span"]))
    rep.line(format_basis(d["V"]).rstrip("\n"))
    return NEGATIVE


def cmd_minimize(args, rep: Report) -> int:
    S = _system(args)
    res = minimize_heuristic(S, max_iter=args.max_iter, budget=args.budget)
    steps = []
    for T in res.log:
        chk = check_transform(S, T)  # classification only depends on the valuations
        steps.append({"M": _frac_matrix(T.M), "P": _frac_matrix(T.P), "vM": T.vM, "vP": T.vP, "classification": chk.classification})
    rep.data = {
        "converged": res.converged,
        "reason": res.reason,
        "steps": steps,
        "normalization": _frac_matrix(res.normalization.P),
        "model": serialize_forms(res.model),
    }
    rep.line(f"converged: {str(res.converged).lower()} ({res.reason}); {len(res.log)} improving step(s)")
    if args.trace:
        for i, s in enumerate(steps, 1):
            rep.line(f"step {i}: vM = {s['vM']}, vP = {s['vP']}, {s['classification']}")
            rep.line(f"  M = {s['M']}")
            rep.line(f"  P = {s['P']}")
    rep.line(serialize_forms(res.model).rstrip("\n"))
    return OK if res.converged else NEGATIVE


def _parse_point(s: str) -> list[int]:
    return [int(v) for v in s.replace(",", " ").split()]


def cmd_lift(args, rep: Report) -> int:
    S = _system(args)
    v = lift_nonsingular(S, _parse_point(args.point), args.precision)
    rep.data = v.as_dict()
    rep.line(f"lifted to precision {v.k} in {v.iterations} Newton step(s), columns {[c + 1 for c in v.columns]}")
    rep.line("coords: " + " ".join(map(str, v.coords)))
    rep.line("base-p: " + " ".join(v.digits()))
    return OK


def cmd_solve(args, rep: Report) -> int:
    S = _system(args)
    res = padic_solve(S, k=args.precision, seed=args.seed)
    rep.data = res.as_dict()
    rep.line(f"{res.status}: {res.reason}")
    if res.status == SOLVED:
        rep.line("coords: " + " ".join(map(str, res.vector.coords)))
        rep.line("base-p: " + " ".join(res.vector.digits()))
        return OK
    if res.status == NO_SEED:
        rep.line("certified: " + str(res.certified).lower())
    return NEGATIVE


def cmd_isotropy(args, rep: Report) -> int:
    S = _system(args)
    if S.r != 1:
        raise QuadsysError("isotropy expects a single form")
    q = S.forms[0]
    dec = is_isotropic_qp(q)
    inv = dec.invariants
    rep.data = {
        "isotropic": dec.isotropic,
        "reason": dec.reason,
        "rank": inv.rank,
        "diagonal": [str(a) for a in inv.diagonal],
        "discriminant": str(inv.discriminant),
        "hasse": inv.hasse,
    }
    rep.line(f"{'isotropic' if dec.isotropic else 'anisotropic'} over Q_{q.field.p}: {dec.reason}")
    rep.line(f"diagonal square classes: {[str(a) for a in inv.diagonal]}, discriminant {inv.discriminant}, Hasse {inv.hasse}")
    if dec.isotropic and q.n <= 8:
        sol = padic_solve(S, k=args.precision, seed=args.seed)
        if sol.status == SOLVED:
            rep.data["zero"] = list(sol.vector.coords)
            rep.line(f"zero mod {q.field.p}^{args.precision}: {list(sol.vector.coords)}")
    return OK if dec.isotropic else NEGATIVE


def cmd_ffreduce(args, rep: Report) -> int:
    doc = parse_ft_system(_read(args.file))
    if len(doc.forms) != 1:
        raise QuadsysError("ffreduce expects a single form")
    f = next(iter(doc.forms.values()))
    res = reduce_ft_form(f, args.d)
    rep.data = {"n": f.n, "D": f.D, "d": args.d, "N": res.N, "R": res.R}
    rep.line(f"n = {f.n}, D = {f.D}, d = {args.d}: N = {res.N} unknowns, R = {res.R} forms")
    if not args.solve:
        rep.data["system"] = serialize_forms(res.system)
        rep.line(serialize_forms(res.system).rstrip("\n"))
        return OK
    en = enumerate_common_zeros(res.system, projective=True, limit=args.limit)
    sols = []
    for z in en.reports:
        xs = solution_to_polynomials(res, z.point)
        sols.append([_poly_str([int(c) for c in x], "T") for x in xs])
    rep.data["solutions"] = sols
    rep.data["exhaustive"] = en.exhaustive and not en.truncated
    if not sols:
        rep.line(f"only the trivial zero among polynomials of degree <= {args.d} (exhaustive)")
        return NEGATIVE
    for s in sols:
        rep.line("(" + ", ".join(s) + ")")
    return OK


def cmd_bounds(args, rep: Report) -> int:
    if args.table:
        rows = bound_table(args.table)
        rep.data = {"rows": [r.as_dict() for r in rows], "annotations": list(ANNOTATIONS)}
        rep.line("r\tlower\tupper\trule\tmartin")
        for r in rows:
            rep.line(f"{r.r}\t{r.lower}\t{r.upper}\t{r.rule}\t{r.martin}")
        for a in ANNOTATIONS:
            rep.line(f"# {a}")
        return OK
    r = args.r
    up = upper_bound(r)
    recompute(up)
    lo = lower_bound(r).value
    rep.data = {"r": r, "lower": lo, "upper": up.value, "rule": up.rule}
    rep.line(f"{lo} <= beta({r};Qp) <= {up.value}" if lo < up.value else f"beta({r};Qp) = {up.value}")
    if args.trace:
        rep.data["trace"] = up.as_dict() if r <= 200 else None
        rep.line(up.render())
    return OK


def cmd_verify_paper(args, rep: Report) -> int:
    from .corpus_checks import run_corpus

    results = run_corpus(args.filter, seed=args.seed, corpus_dir=args.corpus)
    rep.data = {"results": [r.as_dict() for r in results]}
    failed = [r for r in results if not r.ok]
    for r in results:
        rep.line(f"{'PASS' if r.ok else 'FAIL'} {r.id} [{r.anchor}]" + ("" if r.ok else f": expected {r.expected}; got {r.actual}"))
    rep.line(f"{len(results) - len(failed)}/{len(results)} passed")
    return OK if not failed else NEGATIVE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=int, default=20)
    common.add_argument("--limit", type=int, default=None)
    common.add_argument("--trace", action="store_true")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--budget", type=int, default=5_000_000, help="node budget for subspace searches")

    ap = argparse.ArgumentParser(prog="quadsys", description="Systems of quadratic forms over finite and p-adic fields.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, file=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if file:
            p.add_argument("file", help=".qfs file, or - for standard input")
        p.set_defaults(fn=fn)
        return p

    p = add("zeros", cmd_zeros, "common zeros over a finite field")
    p.add_argument("--nonsingular", action="store_true", help="search for a nonsingular zero only")
    p.add_argument("--projective", action="store_true")
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--show", type=int, default=10)

    p = add("subspace", cmd_subspace, "totally singular subspace search")
    p.add_argument("--dim", type=int, required=True)

    p = add("explore-beta", cmd_explore_beta, "empirical beta(r;F_q,m) exploration", file=False)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--probe-below", action="store_true")

    add("minimized", cmd_minimized, "F_q-minimized test")
    p = add("minimize", cmd_minimize, "heuristic minimization over Q_p")
    p.add_argument("--max-iter", type=int, default=64)

    p = add("lift", cmd_lift, "Hensel-lift a nonsingular zero mod p")
    p.add_argument("--point", required=True, help="seed coordinates, e.g. 1,1,1,1,0")
    add("solve", cmd_solve, "minimize, find a nonsingular zero mod p, lift")
    add("isotropy", cmd_isotropy, "isotropy of a single form over Q_p")

    p = add("ffreduce", cmd_ffreduce, "compile a form over F_q(T) into forms over F_q")
    p.add_argument("--d", type=int, required=True, help="ansatz degree")
    p.add_argument("--solve", action="store_true", help="enumerate zeros of the compiled system")

    p = add("bounds", cmd_bounds, "upper/lower bounds for beta(r;Q_p)", file=False)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--r", type=int)
    g.add_argument("--table", type=int, metavar="R_MAX")

    p = add("verify-paper", cmd_verify_paper, "replay every corpus check", file=False)
    p.add_argument("--filter", default=None, help="substring of entry id or group")
    p.add_argument("--corpus", default=None, help="directory with the .qfs corpus (default: bundled)")
    return ap


def run_command(argv, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else ERROR
    rep = Report(args.format)
    try:
        code = args.fn(args, rep)
    except FormatError as exc:
        err.write(f"error: {exc}\n")
        return ERROR
    except (QuadsysError, OSError, ValueError) as exc:
        err.write(f"error: {type(exc).__name__}: {exc}\n")
        return ERROR
    rep.emit(out)
    return code


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    raise SystemExit(main())
