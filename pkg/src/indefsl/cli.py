"""Command-line front end: ``indefsl <subcommand> [problem options]``.

Exit codes: 0 success, 1 computation error, 2 Undecided verdict,
64 usage error, 65 malformed JSON input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .classify import classify_similarity
from .criteria import (char_function, dissipative_part_check, muckenhoupt_pair_scan, necessary_ratio,
                       poisson_condition, sufficient_sum_ratio)
from .errors import IndefSLError, PoleHit
from .harness import FDOperator, default_seed, evidence_flag, fd_resolvent_rows, growth_statistic, q1, q2
from .spectrum import definitizable, eigenvalues, supports
from .tolerances import get_profile
from .weyl import WeylPair, eval_D, eval_M

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _problem_options(p: argparse.ArgumentParser):
    g = p.add_argument_group("problem")
    g.add_argument("--const-a", type=float, help="constant potential q = a")
    g.add_argument("--family", choices=["ex1", "ex2"], help="one-zone elliptic family")
    g.add_argument("--xi", type=float, help="shift parameter of the family")
    g.add_argument("--k2", type=float, help="squared modulus of the family, in (0, 1)")
    g.add_argument("--bands", metavar="FILE", help="band-structure or closed-form JSON file")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--tol-profile", default="default", choices=["default", "strict"])


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="indefsl", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"indefsl {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    for name, hlp in [("classify", "similarity verdict"), ("eigs", "eigenvalues and essential spectrum"),
                      ("check", "similarity criteria report"), ("definitizable", "definitizability decision")]:
        _problem_options(sub.add_parser(name, help=hlp))
    p = sub.add_parser("weyl-eval", help="M+, M- and D at one point")
    _problem_options(p)
    p.add_argument("--lambda", dest="lam", required=True, metavar="RE,IM")
    p = sub.add_parser("sweep", help="verdicts over a grid of xi")
    _problem_options(p)
    p.add_argument("--xi-grid", required=True, metavar="A:B:STEP")
    p.add_argument("--jobs", type=int, default=1)
    p = sub.add_parser("harness", help="finite-difference resolvent integrals (CSV)")
    _problem_options(p)
    p.add_argument("--X", type=float, default=40.0, help="half-width of the truncated line")
    p.add_argument("--h", type=float, default=0.05, help="grid step")
    p.add_argument("--eps-grid", default="1,0.1,0.01,0.001")
    p.add_argument("--n-random", type=int, default=20, help="random test vectors besides the origin Gaussian")
    return ap


# problem construction

def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: {exc}") from None
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if not isinstance(data, dict):
        raise DataError(f"{path}: expected a JSON object")
    return data


def _family_pair(family: str, xi: float, k2: float) -> WeylPair:
    return (WeylPair.example1 if family == "ex1" else WeylPair.example2)(xi, k2)


def problem_from_args(args, need_xi: bool = True) -> WeylPair:
    given = [args.const_a is not None, args.family is not None, args.bands is not None]
    if sum(given) != 1:
        raise UsageError("give exactly one of --const-a, --family, --bands")
    if args.const_a is not None:
        return WeylPair.const(args.const_a)
    if args.bands is not None:
        data = _load_json(args.bands)
        try:
            return WeylPair.from_spec(data)
        except (KeyError, TypeError) as exc:
            raise DataError(f"{args.bands}: missing or invalid field {exc}") from None
    if args.k2 is None or (need_xi and args.xi is None):
        raise UsageError("--family needs --k2 and --xi")
    return _family_pair(args.family, args.xi, args.k2)


def _parse_grid(text: str) -> np.ndarray:
    try:
        a, b, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"--xi-grid expects A:B:STEP, got {text!r}") from None
    if step == 0 or (b - a) / step < 0:
        raise UsageError("--xi-grid step has the wrong sign or is zero")
    n = int(np.floor((b - a) / step + 1e-9)) + 1
    return np.round(a + step * np.arange(n), 12)


def _parse_complex(text: str) -> complex:
    try:
        re_, im_ = (float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"--lambda expects RE,IM, got {text!r}") from None
    return complex(re_, im_)


# report helpers

def header(profile) -> dict:
    return {"version": __version__, "tol_profile": profile.to_dict()}


def _cplx(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _fmt_num(x: float) -> str:
    return "inf" if x == float("inf") else f"{x:.10g}"


def _fmt_z(z: complex) -> str:
    return _fmt_num(z.real) if z.imag == 0 else f"{z.real:.10g}{z.imag:+.10g}j"


def _emit_csv(rows: List[dict], columns: Sequence[str], profile, out) -> None:
    out.write(f"# indefsl {__version__} tol_profile={profile.name}\n")
    wr = csv.DictWriter(out, fieldnames=list(columns), lineterminator="\n")
    wr.writeheader()
    for r in rows:
        wr.writerow({c: r[c] for c in columns})


def _emit_json(obj: dict, profile, out) -> None:
    json.dump({**header(profile), **obj}, out, indent=2, default=_json_default)
    out.write("\n")


def _json_default(o):
    if isinstance(o, complex):
        return _cplx(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(obj):
    """Replace non-finite floats by strings so the output stays strict JSON."""
    if isinstance(obj, float) and not np.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def verdict_row(xi: float, v) -> dict:
    sings = ";".join(_fmt_num(s.point) for s in v.singularities)
    eigs = ";".join(_fmt_z(e.value) for e in v.spectrum.eigenvalues)
    return {"xi": f"{xi:.10g}", "verdict": v.short, "singularities": sings, "eigenvalues": eigs,
            "boundary": "BOUNDARY" if v.boundary else ""}


SWEEP_COLUMNS = ("xi", "verdict", "singularities", "eigenvalues", "boundary")
HARNESS_COLUMNS = ("epsilon", "integral", "f_id")
# max/min across the epsilon grid below which the integrals count as bounded (calibration)
FD_BOUNDED_RATIO = 3.0


def _sweep_one(job):
    family, k2, xi, kw = job
    v = classify_similarity(_family_pair(family, xi, k2), **kw)
    return xi, v


# commands

def cmd_classify(args, profile, out) -> int:
    v = classify_similarity(problem_from_args(args), **profile.classify_kwargs())
    if args.format == "csv":
        _emit_csv([verdict_row(args.xi if args.xi is not None else float("nan"), v)], SWEEP_COLUMNS,
                  profile, out)
    else:
        _emit_json(_clean(v.to_dict()), profile, out)
    return EXIT_UNDECIDED if v.overall == "Undecided" else EXIT_OK


def cmd_eigs(args, profile, out) -> int:
    res = eigenvalues(problem_from_args(args))
    if args.format == "csv":
        rows = [{"re": _fmt_num(e.value.real), "im": _fmt_num(e.value.imag), "mult": e.alg_mult}
                for e in res.eigenvalues]
        _emit_csv(rows, ("re", "im", "mult"), profile, out)
    else:
        _emit_json(_clean(res.to_dict()), profile, out)
    return EXIT_OK


def cmd_weyl_eval(args, profile, out) -> int:
    w = problem_from_args(args)
    lam = _parse_complex(args.lam)
    rep = {"lambda": _cplx(lam)}
    for key, fn in (("M_plus", lambda: eval_M(w, "+", lam)), ("M_minus", lambda: eval_M(w, "-", lam)),
                    ("D", lambda: eval_D(w, lam))):
        try:
            rep[key] = _cplx(fn())
        except PoleHit as exc:
            rep[key] = {"pole": {"theta": exc.theta, "side": exc.side, "mass": exc.mass}}
    if args.format == "csv":
        rows = [{"quantity": k, "re": v.get("re", ""), "im": v.get("im", ""),
                 "pole": "pole" if "pole" in v else ""} for k, v in rep.items() if k != "lambda"]
        _emit_csv(rows, ("quantity", "re", "im", "pole"), profile, out)
    else:
        _emit_json(rep, profile, out)
    return EXIT_OK


def cmd_sweep(args, profile, out) -> int:
    if args.family is None or args.k2 is None:
        raise UsageError("sweep needs --family and --k2")
    if args.jobs < 1:
        raise UsageError("--jobs must be positive")
    grid = _parse_grid(args.xi_grid)
    jobs = [(args.family, args.k2, float(xi), profile.classify_kwargs()) for xi in grid]
    if args.jobs == 1:
        results = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_sweep_one, jobs))
    results.sort(key=lambda r: r[0])
    if args.format == "csv":
        _emit_csv([verdict_row(xi, v) for xi, v in results], SWEEP_COLUMNS, profile, out)
    else:
        _emit_json({"family": args.family, "k2": args.k2,
                    "rows": [_clean({"xi": xi, **v.to_dict()}) for xi, v in results]}, profile, out)
    return EXIT_UNDECIDED if any(v.overall == "Undecided" for _, v in results) else EXIT_OK


def cmd_check(args, profile, out) -> int:
    w = problem_from_args(args)
    reps = {}
    for fn in (necessary_ratio, sufficient_sum_ratio, muckenhoupt_pair_scan, dissipative_part_check,
               poisson_condition):
        try:
            r = fn(w)
            reps[fn.__name__] = r.to_dict()
        except IndefSLError as exc:
            reps[fn.__name__] = {"value": None, "status": "ERROR", "witness": None,
                                 "notes": [f"{type(exc).__name__}: {exc}"]}
    try:
        cf = char_function(w, 1j)
        reps["char_function"] = {"value": abs(cf.det - 1.0), "status": "EVALUATED", "witness": [0.0, 1.0],
                                 "notes": ["value is |det theta - 1| at lambda = i"],
                                 "conds": cf.conds}
    except IndefSLError as exc:
        reps["char_function"] = {"value": None, "status": "ERROR", "witness": [0.0, 1.0],
                                 "notes": [f"{type(exc).__name__}: {exc}"]}
    if args.format == "csv":
        rows = [{"criterion": k, "value": v["value"], "status": v["status"],
                 "witness": json.dumps(_clean(v["witness"]), default=_json_default)} for k, v in reps.items()]
        _emit_csv(rows, ("criterion", "value", "status", "witness"), profile, out)
    else:
        _emit_json({"criteria": _clean(reps)}, profile, out)
    return EXIT_OK


def cmd_definitizable(args, profile, out) -> int:
    sp, sm = supports(problem_from_args(args))
    d = definitizable(sp, sm).to_dict()
    rep = {"decision": "Definitizable" if d["definitizable"] else "No", **d}
    if args.format == "csv":
        _emit_csv([{"decision": rep["decision"], "witness": json.dumps(rep["witness"]),
                    "alphas": ";".join(_fmt_num(a) if a is not None else "inf" for a in rep["alphas"])}],
                  ("decision", "witness", "alphas"), profile, out)
    else:
        _emit_json(rep, profile, out)
    return EXIT_OK


def fd_problem(args) -> FDOperator:
    if args.const_a is not None:
        a = args.const_a
        q = lambda x: np.full_like(x, a)  # noqa: E731
    elif args.family is not None:
        if args.k2 is None or args.xi is None:
            raise UsageError("--family needs --k2 and --xi")
        k = float(np.sqrt(args.k2))
        pot = q1 if args.family == "ex1" else q2
        q = lambda x: pot(x, args.xi, k)  # noqa: E731
    else:
        raise UsageError("harness needs --const-a or --family")
    if args.X <= 0 or args.h <= 0:
        raise UsageError("--X and --h must be positive")
    return FDOperator(args.X, args.h, q)


def harness_vectors(x: np.ndarray, n_random: int, seed: int) -> List[np.ndarray]:
    """Origin Gaussian exp(-x^2) first, then smooth random vectors."""
    rng = np.random.default_rng(seed)
    fs = [np.exp(-x ** 2)]
    for _ in range(n_random):
        c, s = rng.uniform(-0.5, 0.5) * x.max(), rng.uniform(0.5, 4.0)
        fs.append(np.exp(-((x - c) / s) ** 2) * rng.standard_normal() + 0.1 * np.exp(-((x - c) / (2 * s)) ** 2)
                  * np.cos(rng.uniform(0, 3) * x))
    return fs


def cmd_harness(args, profile, out) -> int:
    op = fd_problem(args)
    try:
        eps = [float(e) for e in args.eps_grid.split(",")]
    except ValueError:
        raise UsageError(f"--eps-grid expects comma-separated numbers, got {args.eps_grid!r}") from None
    fs = harness_vectors(op.x, args.n_random, default_seed())
    rows = fd_resolvent_rows(op.matrix(), fs, eps)
    if args.format == "json":
        growth = growth_statistic(rows, 0)
        bounded = growth <= FD_BOUNDED_RATIO
        overall = classify_similarity(problem_from_args(args), **profile.classify_kwargs()).overall
        _emit_json({"X": args.X, "h": args.h, "seed": default_seed(), "rows": rows,
                    "origin_growth": growth, "bounded": bounded, "verdict": overall,
                    "evidence": evidence_flag(overall, bounded)}, profile, out)
    else:
        _emit_csv([{"epsilon": f"{r['epsilon']:g}", "integral": f"{r['integral']:.12g}", "f_id": r["f_id"]}
                   for r in rows], HARNESS_COLUMNS, profile, out)
    return EXIT_OK


COMMANDS = {"classify": cmd_classify, "eigs": cmd_eigs, "weyl-eval": cmd_weyl_eval, "sweep": cmd_sweep,
            "check": cmd_check, "definitizable": cmd_definitizable, "harness": cmd_harness}


_VALUE_FLAGS = ("--xi-grid", "--lambda", "--xi", "--const-a", "--k2", "--eps-grid")


def _join_values(argv: Sequence[str]) -> List[str]:
    """Attach values such as ``-2:1:0.05`` or ``-1,0`` to their flag so argparse keeps them."""
    out: List[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(_join_values(argv))
        if args.command is None:
            raise UsageError("missing subcommand")
        profile = get_profile(args.tol_profile)
        buf = io.StringIO()
        code = COMMANDS[args.command](args, profile, buf)
        out.write(buf.getvalue())
        return code
    except UsageError as exc:
        err.write(f"indefsl: usage error: {exc}\n")
        return EXIT_USAGE
    except DataError as exc:
        err.write(f"indefsl: malformed input: {exc}\n")
        return EXIT_DATA
    except (IndefSLError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        err.write(f"indefsl: error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
