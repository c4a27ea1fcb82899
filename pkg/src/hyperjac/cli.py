"""Command line front end: ``hyperjac {eval-theta,period-matrix,gen-cubics,verify}``.

Structured output is JSON on stdout (or ``--output``); short summaries go to
stderr.  Exit codes: 0 success, 1 verification mismatch, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass
from importlib import resources
from typing import List, Optional, Sequence

import numpy as np

from . import verifier as V
from .chars import BinaryVector, Characteristic
from .identities import family_to_json, gen_cubics, parse_cubic
from .periods import DEFAULT_NODES, BranchConfig, PeriodError, period_matrix, weierstrass_images
from .theta import DEFAULT_EPS, PeriodMatrix, ThetaError, TruncationSpec, theta_char

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2
THREADS_ENV = "THETA_SECANT_THREADS"


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a run's output.  The worker count is left out on purpose."""

    genus: Optional[int]
    tolerance: Optional[float]
    truncation_eps: float
    quad_nodes: int
    seed: Optional[int]
    output_path: Optional[str]

    def __post_init__(self):
        if self.tolerance is not None:
            if not self.tolerance > 0:
                raise UsageError("tolerance must be positive")
            if not self.truncation_eps < self.tolerance:
                raise UsageError("truncation eps must be below the tolerance")


def _dump(obj, path: Optional[str]) -> None:
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _config(args, genus=None, seed=None) -> RunConfig:
    return RunConfig(genus, getattr(args, "tolerance", None), args.truncation_eps,
                     getattr(args, "quad_nodes", DEFAULT_NODES), seed, args.output)


def _parse_entry(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise UsageError(f"complex entry must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, str):
        return complex(x.replace(" ", "").replace("i", "j"))
    return complex(x)


def load_tau(path: str) -> PeriodMatrix:
    """Read ``tau`` from JSON: a matrix (or ``{"tau": matrix}``) of numbers, strings or ``[re, im]`` pairs."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from None
    if isinstance(data, dict):
        data = data.get("tau")
    try:
        rows = [[_parse_entry(x) for x in row] for row in data]
        return PeriodMatrix(np.array(rows, dtype=complex))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path}: malformed period matrix ({exc})") from None


def parse_vector(text: str, g: int) -> np.ndarray:
    try:
        z = np.array([_parse_entry(p) for p in text.split(",")], dtype=complex)
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None
    if z.shape != (g,):
        raise UsageError(f"vector {text!r} has {z.size} entries, genus is {g}")
    return z


# -- commands -----------------------------------------------------------------

def cmd_eval_theta(args) -> int:
    tau = load_tau(args.tau)
    z = parse_vector(args.z, tau.g)
    try:
        c = Characteristic.parse(args.char) if args.char else Characteristic.zero(tau.g)
    except ValueError as exc:
        raise UsageError(f"invalid characteristic {args.char!r}: {exc}") from None
    if c.eps.g != tau.g:
        raise UsageError(f"characteristic {args.char} does not have genus {tau.g}")
    value, used = theta_char(tau, z, c, TruncationSpec(eps_abs=args.truncation_eps), full_output=True)
    out = {
        "config": asdict(_config(args, tau.g)),
        "characteristic": str(c),
        "z": V.pairs(z),
        "value": V.pairs(value),
        "radius": used.radius,
        "term_count": used.term_count,
        "tail_bound": used.tail_bound,
        "vanishing": bool(abs(value) <= used.tail_bound),
    }
    _dump(out, args.output)
    return EXIT_OK


def cmd_period_matrix(args) -> int:
    try:
        cfg = BranchConfig.parse(args.branches)
    except ValueError as exc:
        raise UsageError(f"invalid branch points: {exc}") from None
    data = period_matrix(cfg, quad_nodes=args.quad_nodes)
    w = weierstrass_images(data.tau)
    out = {
        "config": asdict(_config(args, cfg.g)),
        "branches": list(cfg.points),
        **data.to_json(),
        "weierstrass_images": [V.pairs(p) for p in w.images],
        "half_periods": [[a.tolist(), b.tolist()] for a, b in w.half_periods],
        "R": V.pairs(w.r_shift),
    }
    _dump(out, args.output)
    print(f"genus {cfg.g}: symmetry error {data.symmetry_error:.2e}, "
          f"{data.nodes} nodes, delta {data.convergence_delta:.2e}", file=sys.stderr)
    return EXIT_OK


def load_fixtures() -> dict:
    text = resources.files("hyperjac").joinpath("data/printed_cubics.json").read_text()
    return json.loads(text)


def check_fixtures(genus: int, family) -> Optional[str]:
    """First difference between ``family`` and the stored printed cubics, or ``None``."""
    stored = load_fixtures().get(f"genus{genus}", {})
    for s, text in sorted(stored.items()):
        sigma = BinaryVector.from_str(s)
        want = parse_cubic(text, genus, sigma).monomials
        got = family[sigma].monomials
        for i, (a, b) in enumerate(zip(want, got)):
            if a != b:
                return f"sigma={s}, monomial {i}: expected {a.key()} ({a.coefficient:+d}), got {b.key()} ({b.coefficient:+d})"
        if len(want) != len(got):
            return f"sigma={s}: expected {len(want)} monomials, got {len(got)}"
    return None


def cmd_gen_cubics(args) -> int:
    if not 2 <= args.genus <= 6:
        raise UsageError(f"genus must be between 2 and 6, got {args.genus}")
    family = gen_cubics(args.genus)
    text = family_to_json(family)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    sizes = sorted({len(c.monomials) for c in family.values()})
    print(f"genus {args.genus}: {len(family)} identities, monomial counts {sizes}", file=sys.stderr)
    if args.check_fixtures:
        diff = check_fixtures(args.genus, family)
        if diff:
            print(f"fixture mismatch: {diff}", file=sys.stderr)
            return EXIT_MISMATCH
        print("fixtures match", file=sys.stderr)
    return EXIT_OK


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if n < 1:
        raise UsageError("thread count must be at least 1")
    return n


def _suites(values: Sequence[str]) -> List[str]:
    names = [s.strip() for v in values for s in v.split(",") if s.strip()]
    bad = [s for s in names if s not in V.SUITES]
    if bad:
        raise UsageError(f"unknown suite {bad[0]!r}; choose from {', '.join(V.SUITES)}")
    return names


def cmd_verify(args) -> int:
    suites = _suites(args.suite)
    threads = _threads(args)
    rng = np.random.default_rng(args.seed)
    if args.branches:
        try:
            cfg = BranchConfig.parse(args.branches)
        except ValueError as exc:
            raise UsageError(f"invalid branch points: {exc}") from None
        tau = period_matrix(cfg, quad_nodes=args.quad_nodes).tau
        source = {"kind": "branches", "branches": list(cfg.points)}
    elif args.tau:
        tau = load_tau(args.tau)
        source = {"kind": "file", "path": args.tau}
    else:
        if args.genus is None:
            raise UsageError("--random-tau needs --genus")
        tau = V.random_siegel(args.genus, rng)
        source = {"kind": "random"}
    if args.genus is not None and args.genus != tau.g:
        raise UsageError(f"--genus {args.genus} does not match tau of genus {tau.g}")
    if args.random_points or source["kind"] == "random":
        data = V.random_addition_data(tau, rng)
        source["points"] = "random"
    else:
        data = V.hyperelliptic_data(tau)
        source["points"] = "weierstrass"
    config = _config(args, tau.g, args.seed)
    spec = TruncationSpec(eps_abs=args.truncation_eps)

    reports = [V.run_suite(name, tau, data, rng, samples=args.samples, tolerance=args.tolerance,
                           threads=threads, spec=spec) for name in suites]
    mismatches = [r["identity_id"] for r in reports
                  if r["verdict"] != "report" and r["verdict"] != args.expect]
    out = {
        "config": asdict(config),
        "source": source,
        "tau": V.pairs(tau.matrix),
        "expect": args.expect,
        "reports": reports,
        "all_match": not mismatches,
    }
    _dump(out, args.output)
    for r in reports:
        extra = f" max_residual {r['max_residual']:.3e}" if "max_residual" in r else ""
        print(f"{r['identity_id']}: {r['verdict']}{extra}", file=sys.stderr)
    if mismatches:
        print(f"expected {args.expect}, mismatch in: {', '.join(mismatches)}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperjac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--truncation-eps", type=float, default=DEFAULT_EPS,
                        help="absolute truncation error per theta value")
        sp.add_argument("--output", "-o", help="write JSON here instead of stdout")

    sp = sub.add_parser("eval-theta", help="evaluate theta with characteristic")
    sp.add_argument("--tau", required=True, help="JSON file holding the period matrix")
    sp.add_argument("--z", required=True, help="comma separated complex entries, e.g. 0.1+0.2j,0")
    sp.add_argument("--char", help='characteristic like "[01;10]" (default: zero)')
    common(sp)
    sp.set_defaults(func=cmd_eval_theta)

    sp = sub.add_parser("period-matrix", help="period matrix of a real hyperelliptic curve")
    sp.add_argument("--branches", required=True, help="increasing real branch points, comma separated")
    sp.add_argument("--quad-nodes", type=int, default=DEFAULT_NODES)
    common(sp)
    sp.set_defaults(func=cmd_period_matrix)

    sp = sub.add_parser("gen-cubics", help="generate the cubic identities for one genus")
    sp.add_argument("--genus", type=int, required=True)
    sp.add_argument("--check-fixtures", action="store_true",
                    help="compare with the stored printed cubics (genus 3 and 4)")
    sp.add_argument("--output", "-o", help="write JSON here instead of stdout")
    sp.set_defaults(func=cmd_gen_cubics, truncation_eps=DEFAULT_EPS)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("--suite", action="append", required=True,
                    help=f"suite name(s), comma separated or repeated: {', '.join(V.SUITES)}")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--branches", help="hyperelliptic tau from these real branch points")
    src.add_argument("--random-tau", action="store_true", help="random tau in the Siegel space")
    src.add_argument("--tau", help="JSON file holding the period matrix")
    sp.add_argument("--genus", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--expect", choices=("pass", "fail"), default="pass")
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--tolerance", type=float, help="override the per-suite tolerance")
    sp.add_argument("--quad-nodes", type=int, default=DEFAULT_NODES)
    sp.add_argument("--random-points", action="store_true",
                    help="generic Q, A_k, R instead of Weierstrass half periods")
    sp.add_argument("--threads", type=int, help=f"worker threads (default: ${THREADS_ENV} or 1)")
    common(sp)
    sp.set_defaults(func=cmd_verify)
    return p


def _glue_negative_values(argv: Sequence[str]) -> List[str]:
    # argparse reads "-5,-3,..." as an option; attach such values to their flag
    out: List[str] = []
    for tok in argv:
        if out and out[-1] in ("--branches", "--z") and tok[:1] == "-" and tok[1:2].isdigit():
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_glue_negative_values(sys.argv[1:] if argv is None else list(argv)))
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"hyperjac: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PeriodError, ThetaError, V.DenominatorError) as exc:
        print(f"hyperjac: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
