"""``repwitness analyze|check|solve|degree``.

Exit codes: 0 success / hypotheses hold, 1 negative result (hypothesis fails
or budget exhausted), 2 parse error, 3 I/O error, 4 precondition violation.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Sequence

import numpy as np

from . import kernels
from .config import DEFAULT, Tolerances
from .homology import (
    HypothesisError,
    analyze,
    check_thm1,
    check_thm2,
    mu_form,
    sigma_generator,
)
from .liegrp import degree_formula, empirical_degree, random_unit
from .presfile import PresentationFile, PresentationFileError, load
from .solver import (
    BudgetExhausted,
    ConstraintSystem,
    klein_four_diagnostic,
    solve,
    solve_thm1,
    solve_thm2,
)
from .words import WordParseError, parse_word

EXIT_OK, EXIT_NEGATIVE, EXIT_PARSE, EXIT_IO, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        self.code = code
        super().__init__(message)


def _round(x: float) -> float:
    return round(float(x), 12) + 0.0  # normalizes -0.0


def _quat(q) -> list[float]:
    return [_round(x) for x in q]


def _mu_report(form, labels) -> dict:
    return {
        "basis": list(labels),
        "terms": [[p + 1, q + 1, c] for (p, q), c in sorted(form.items())],
        "text": form.format(labels),
    }


def _load(args) -> PresentationFile:
    path = args.path
    try:
        return load(path, args.max_letters)
    except (PresentationFileError, WordParseError) as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    except UnicodeDecodeError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror or exc}", EXIT_IO) from None


def _gammas(pf: PresentationFile, override: Sequence[str] | None):
    texts = list(override) if override else pf.gammas
    try:
        return texts, [parse_word(t, pf.n, pf.generators, pf.max_letters) for t in texts]
    except WordParseError as exc:
        raise CliError(str(exc), EXIT_PARSE) from None


def cmd_analyze(args) -> tuple[dict, int]:
    pf = _load(args)
    P = pf.presentation()
    prof = analyze(P)
    report = {
        "command": "analyze",
        "generators": list(pf.generators),
        "relators": [w.format(pf.generators) for w in P.relators],
        "profile": {"b1": prof.b1, "b2": prof.b2, "torsion_order": prof.torsion_order},
        "sigma": None,
        "mu": None,
    }
    if prof.b2 == 1:
        sigma = sigma_generator(prof)
        mu = mu_form(P, prof, sigma).mu
        report["sigma"] = list(sigma.coefficients)
        report["mu"] = _mu_report(mu, prof.basis_labels(pf.generators))
    return report, EXIT_OK


def cmd_check(args) -> tuple[dict, int]:
    pf = _load(args)
    P = pf.presentation()
    texts, gammas = _gammas(pf, args.gamma)
    report: dict = {"command": "check", "theorem": args.theorem, "gammas": texts}
    if args.theorem == 1:
        cert = check_thm1(P, gammas, rank_m=args.rank)
        report.update(
            holds=cert.holds,
            reason=cert.reason,
            b2=cert.b2,
            torsion_order=cert.torsion_order,
            rank_m=cert.rank_m,
            degree=cert.degree,
            predicted_degree=cert.predicted_degree,
        )
    else:
        cert = check_thm2(P, gammas)
        prof = analyze(P)
        report.update(
            holds=cert.holds,
            reason=cert.reason,
            b1=cert.b1,
            b2=cert.b2,
            torsion_order=cert.torsion_order,
            sigma=list(cert.sigma.coefficients) if cert.sigma else None,
            mu=_mu_report(cert.mu, prof.basis_labels(pf.generators)) if cert.mu is not None else None,
            completed_gammas=[g.format(pf.generators) for g in cert.gammas],
            prediction=cert.prediction,
        )
    return report, EXIT_OK if report["holds"] else EXIT_NEGATIVE


def _witness_report(w, names) -> dict:
    return {
        "rep": {name: _quat(q) for name, q in zip(names, w.rep)},
        "residuals": [float(f"{r:.3e}") for r in w.residuals],
        "max_residual": float(f"{w.max_residual:.3e}"),
        "restarts_used": w.restarts_used,
    }


def cmd_solve(args) -> tuple[dict, int]:
    pf = _load(args)
    P = pf.presentation()
    texts, gammas = _gammas(pf, args.gamma)
    seed = args.seed if args.seed is not None else (pf.seed or 0)
    budget = args.budget if args.budget is not None else (pf.budget or 200)
    if not 0 <= seed < 2**64:
        raise CliError("--seed must be a 64-bit unsigned integer", EXIT_PRECONDITION)
    tol = Tolerances(success=args.tol) if args.tol else DEFAULT
    mode = "raw" if args.raw else f"theorem {args.theorem}"
    report: dict = {
        "command": "solve",
        "mode": mode,
        "gammas": texts,
        "settings": {"seed": seed, "budget": budget, "tol": tol.success},
    }
    targets = [np.asarray(t, dtype=float) for t in pf.targets]
    try:
        if args.raw or args.theorem == 1:
            if args.raw and len(targets) != len(gammas):
                raise CliError("--raw needs one target per gamma", EXIT_PRECONDITION)
            if not targets and gammas:
                rng = np.random.default_rng(seed)
                targets = [random_unit(rng) for _ in gammas]
            if len(targets) != len(gammas):
                raise CliError("need one target per gamma", EXIT_PRECONDITION)
            report["targets"] = [_quat(t / np.linalg.norm(t)) for t in targets]
            if args.raw:
                cons = [(w, np.array([1.0, 0, 0, 0])) for w in P.relators] + list(zip(gammas, targets))
                wit = solve(ConstraintSystem(P.n, cons, "raw"), budget, seed, tol=tol)
            else:
                wit = solve_thm1(P, gammas, targets, budget, seed, tol=tol)
            report["witness"] = _witness_report(wit, pf.generators)
        else:
            res = solve_thm2(P, gammas, pf.eta, budget, seed, tol=tol)
            c = res.constraints
            report["witness"] = _witness_report(res.witness, pf.generators)
            report["thm2"] = {
                "sigma": list(res.sigma),
                "eta": list(c.eta),
                "epsilons": list(c.epsilons),
                "rewritten_relators": [w.format(pf.generators) for w in c.v_words],
                "gammas": [g.format(pf.generators) for g in c.gammas],
                "lift_signs": list(res.w2.lift_signs),
                "w2_sigma": res.w2.pairing[res.sigma],
                "nonabelian": res.nonabelian,
                "in_maximal_torus": res.in_torus,
                "half_turn_diagnostic": klein_four_diagnostic(res.so3),
            }
    except HypothesisError as exc:
        raise CliError(f"hypothesis not satisfied: {exc}", EXIT_PRECONDITION) from None
    except BudgetExhausted as exc:
        report["failure"] = {"best_residual": float(f"{exc.best_residual:.3e}"), "restarts": exc.restarts}
        return report, EXIT_NEGATIVE
    return report, EXIT_OK


def _split_words(args: Sequence[str]) -> list[str]:
    out = []
    for arg in args:
        depth, cur = 0, []
        for ch in arg:
            if ch in "([":
                depth += 1
            elif ch in ")]":
                depth -= 1
            if ch == "," and depth == 0:
                out.append("".join(cur))
                cur = []
            else:
                cur.append(ch)
        out.append("".join(cur))
    return [w.strip() for w in out if w.strip()]


def cmd_degree(args) -> tuple[dict, int]:
    texts = _split_words(args.words)
    n = len(texts)
    if args.generators is not None and args.generators != n:
        raise CliError(f"{n} words given for {args.generators} generators", EXIT_PARSE)
    if n == 0:
        raise CliError("no words given", EXIT_PARSE)
    try:
        words = [parse_word(t, n, max_letters=args.max_letters) for t in texts]
    except WordParseError as exc:
        raise CliError(f"{exc} (word count must equal generator count)", EXIT_PARSE) from None
    formula = degree_formula(words, args.rank)
    report: dict = {"command": "degree", "words": texts, "rank_m": args.rank, "formula": formula}
    code = EXIT_OK
    if args.verify:
        if n != 1 or args.rank != 1:
            raise CliError("--verify is available for a single word with --rank 1", EXIT_PRECONDITION)
        est = empirical_degree(words[0], seeds=args.starts, seed=args.seed)
        verdict = "INCONCLUSIVE" if est.degree is None else ("AGREE" if est.degree == formula else "DISAGREE")
        report["verify"] = {
            "target": _quat(est.target),
            "empirical": est.degree,
            "solutions": len(est.solutions),
            "starts_used": est.starts_used,
            "verdict": verdict,
            "reason": est.reason,
        }
        code = EXIT_OK if verdict == "AGREE" else EXIT_NEGATIVE
    return report, code


# --- human-readable output ----------------------------------------------------

def _fmt_sigma(s) -> str:
    return "(" + ", ".join(str(x) for x in s) + ")"


def render(report: dict) -> str:
    cmd = report["command"]
    lines = []
    if cmd == "analyze":
        p = report["profile"]
        lines.append(f"b1={p['b1']} b2={p['b2']} |T|={p['torsion_order']}")
        if report["sigma"] is not None:
            lines.append(f"sigma = {_fmt_sigma(report['sigma'])}")
            lines.append(f"mu = {report['mu']['text']}")
    elif cmd == "check":
        lines.append(f"theorem {report['theorem']}: {'HOLDS' if report['holds'] else 'FAILS'}"
                     + (f" ({report['reason']})" if report["reason"] else ""))
        if report["theorem"] == 1:
            if report["predicted_degree"] is not None:
                lines.append(f"predicted degree = ±{report['predicted_degree']}  (degree {report['degree']})")
        else:
            if report["mu"] is not None:
                lines.append(f"sigma = {_fmt_sigma(report['sigma'])}")
                lines.append(f"mu = {report['mu']['text']}")
            if report["holds"]:
                lines.append(f"prediction |T|·det(mu∧gammas) = {report['prediction']}")
                if report["completed_gammas"]:
                    lines.append("gammas used: " + ", ".join(report["completed_gammas"]))
    elif cmd == "solve":
        lines.append(f"solve ({report['mode']}), seed {report['settings']['seed']}")
        if "failure" in report:
            f = report["failure"]
            lines.append(f"NO WITNESS after {f['restarts']} restarts (best residual {f['best_residual']:.3e})")
        else:
            w = report["witness"]
            for name, q in w["rep"].items():
                lines.append(f"  {name} -> " + " ".join(f"{x:+.12f}" for x in q))
            lines.append(f"max residual {w['max_residual']:.3e} after {w['restarts_used']} restart(s)")
            if "thm2" in report:
                t = report["thm2"]
                lines.append(f"eta = {_fmt_sigma(t['eta'])}, epsilons = {_fmt_sigma(t['epsilons'])}")
                lines.append(f"<w2, sigma> = {t['w2_sigma']}")
                lines.append(f"nonabelian image: {t['nonabelian']}")
                lines.append(f"image in a maximal torus: {t['in_maximal_torus']}")
    elif cmd == "degree":
        lines.append(f"formula {report['formula']}")
        if "verify" in report:
            v = report["verify"]
            emp = "n/a" if v["empirical"] is None else f"{v['empirical']:+d}"
            lines[-1] = f"formula {report['formula']}, empirical {emp}, {v['verdict']}"
    if "timing_s" in report:
        lines.append(f"time {report['timing_s']:.3f} s")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repwitness", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", action="store_true", help="machine-readable report on stdout")
        p.add_argument("--timing", action="store_true", help="include wall time in the report")
        p.add_argument("--max-letters", type=int, default=10**6, help="reject longer words (default 10^6)")

    p = sub.add_parser("analyze", help="Betti numbers, torsion, sigma and mu")
    p.add_argument("path")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="decide the hypotheses of the b2 = 0 / b2 = 1 criteria")
    p.add_argument("path")
    p.add_argument("--theorem", type=int, choices=(1, 2), required=True)
    p.add_argument("--gamma", action="append", help="override the file's gammas (repeatable)")
    p.add_argument("--rank", type=int, default=1, help="rank m of G for the degree prediction")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="construct a witness representation")
    p.add_argument("path")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--theorem", type=int, choices=(1, 2))
    mode.add_argument("--raw", action="store_true", help="solve relators = 1, gammas = targets")
    p.add_argument("--gamma", action="append")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--tol", type=float, default=None, help=f"max residual (default {DEFAULT.success})")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("degree", help="degree of a word map G^n -> G^n")
    p.add_argument("words", nargs="+", help="comma- or argument-separated words")
    p.add_argument("--rank", type=int, default=1)
    p.add_argument("-n", "--generators", type=int, default=None)
    p.add_argument("--verify", action="store_true", help="count preimages numerically (n = 1)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=10_000)
    common(p)
    p.set_defaults(func=cmd_degree)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        report, code = args.func(args)
    except CliError as exc:
        print(f"repwitness: {exc}", file=sys.stderr)
        return exc.code
    if args.timing:
        report["timing_s"] = round(time.perf_counter() - t0, 6)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        print(render(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
