"""Command-line interface.

Subcommands: bound (bound/regime queries), estimate (rank estimate + CI +
classification from a sample CSV), test-regression (overall significance),
posi (simultaneous-inference bound), and simulate trichotomy / coverage.

Every run with an --out directory writes a manifest.json recording the
command, parameters, seed, library version, timestamp, and input digests;
re-running the same parameters reproduces every result file byte for byte
(the manifest's timestamp is the only thing that varies). Errors exit
nonzero with a JSON error object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, bounds, inference, simulation
from .errors import DomainError, RexError
from .sampling import SampleMatrix

_JSON_KW = dict(indent=2, sort_keys=True)


class _JsonArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        print(json.dumps({"error": {"type": "UsageError", "message": message}}), file=sys.stderr)
        self.exit(2)


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def _manifest(command: str, params: dict, seed, inputs=()) -> dict:
    return {
        "command": command,
        "params": params,
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "input_digests": {str(p): _sha256(p) for p in inputs},
    }


def _emit(results: dict, manifest: dict, out_dir, extra_writers=()) -> None:
    """Write results.json (+ any CSVs) and manifest.json under out_dir,
    or print a single JSON payload when no directory was given."""
    if out_dir is None:
        payload = dict(results)
        payload["manifest"] = manifest
        print(json.dumps(payload, **_JSON_KW))
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.json").write_text(json.dumps(results, **_JSON_KW) + "\n")
    (out / "manifest.json").write_text(json.dumps(manifest, **_JSON_KW) + "\n")
    for write in extra_writers:
        write(out)
    print(json.dumps(results, **_JSON_KW))


def _parse_int_list(text: str, p: int | None = None) -> list:
    """Rank lists: comma-separated integers, a:b ranges, and the token iid
    (mapped to d = p)."""
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if token.lower() == "iid":
            if p is None:
                raise DomainError("the iid token needs --p")
            values.append(p)
        elif ":" in token:
            a, b = token.split(":", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise DomainError(f"empty range {token!r}")
            values.extend(range(lo, hi + 1))
        else:
            values.append(int(token))
    if not values:
        raise DomainError(f"no values in {text!r}")
    return values


def cmd_bound(args) -> int:
    regime = bounds.classify_regime(args.d, args.p, margin=args.margin)
    results = {
        "procedure": "bound",
        "inputs": {"p": args.p, "d": args.d, "margin": args.margin},
        "max_corr_bound": bounds.max_corr_bound(args.p, args.d),
        "rex_bound": bounds.rex_bound(args.p, args.d),
        "regime": regime.tag.value,
        "beta": regime.beta,
        "trichotomy_limit": bounds.trichotomy_limit(regime.beta),
    }
    if args.json:
        print(json.dumps(results, **_JSON_KW))
    else:
        print(f"p = {args.p}, d = {args.d}")
        print(f"  max correlation bound  {results['max_corr_bound']:.10f}")
        print(f"  sup-norm bound         {results['rex_bound']:.10f}")
        print(f"  beta = d/ln p          {results['beta']:.6f}  [{results['regime']}]")
        print(f"  trichotomy limit       {results['trichotomy_limit']:.10f}")
    return 0


def cmd_estimate(args) -> int:
    samples = SampleMatrix.load_csv(args.input_csv)
    mean_k_sq = float((samples.extremes**2).mean())
    estimate = bounds.estimate_rank(mean_k_sq, samples.p)
    interval = inference.rex_confidence_interval(samples.extremes, samples.p, args.alpha)
    classification = inference.classify_from_extremes(samples.extremes, samples.p)
    results = inference.make_report(
        "rank-estimate",
        {"p": samples.p, "n": samples.n, "alpha": args.alpha},
        seed=args.seed,
        estimate=estimate,
        interval=interval,
        classification=classification,
    )
    manifest = _manifest(
        "estimate",
        {"input_csv": str(args.input_csv), "alpha": args.alpha},
        args.seed,
        inputs=[args.input_csv],
    )
    _emit(results, manifest, args.out)
    return 0


def cmd_test_regression(args) -> int:
    design = SampleMatrix.load_csv(args.design_csv)
    response = SampleMatrix.load_csv(args.response_csv)
    y = response.values.ravel()
    outcome = inference.overall_significance_test(
        design.values, y, alpha=args.alpha, center=args.center
    )
    results = inference.make_report(
        "overall-significance",
        {"p": outcome.p, "n": outcome.n, "alpha": args.alpha},
        seed=args.seed,
        statistic=outcome.max_abs_corr,
        threshold=outcome.threshold,
        decision="reject" if outcome.reject else "fail-to-reject",
        p_value_bound=outcome.p_value_bound,
        argmax_index=outcome.argmax_index,
    )
    manifest = _manifest(
        "test-regression",
        {
            "design_csv": str(args.design_csv),
            "response_csv": str(args.response_csv),
            "alpha": args.alpha,
            "center": args.center,
        },
        args.seed,
        inputs=[args.design_csv, args.response_csv],
    )
    _emit(results, manifest, args.out)
    return 0


def cmd_posi(args) -> int:
    mode = inference.CountMode(args.mode)
    result = inference.posi_bound(args.p, args.m, mode)
    results = inference.make_report(
        "posi-bound",
        {"p": args.p, "m": args.m, "mode": mode.value},
        bound=result,
        bound_over_sqrt_p=result.bound / math.sqrt(args.p),
    )
    manifest = _manifest("posi", {"p": args.p, "m": args.m, "mode": mode.value}, None)
    _emit(results, manifest, args.out)
    return 0


def cmd_simulate(args) -> int:
    if args.study == "trichotomy":
        ranks = _parse_int_list(args.ranks, p=args.p)
        config = simulation.TrichotomyConfig(
            p=args.p,
            ranks=tuple(ranks),
            reps=args.reps,
            n_for_means=args.n,
            seed=args.seed,
        )
        result = simulation.run_trichotomy(config)
        results = {
            "procedure": "simulate-trichotomy",
            "inputs": {"p": args.p, "ranks": ranks, "reps": args.reps, "n": args.n},
            "seed": args.seed,
            "threshold": result.threshold,
            "per_rank": [
                {
                    "rank": rr.rank,
                    "iid": rr.iid,
                    "mean": rr.mean,
                    "below_threshold_fraction": rr.below_threshold_fraction,
                    "bandwidth": rr.density.bandwidth,
                }
                for rr in result.per_rank
            ],
            "metadata": result.metadata,
        }
        writers = [
            lambda out: result.export_density_csv(out / "density.csv"),
            lambda out: result.export_extremes_csv(out / "extremes.csv"),
        ]
        manifest = _manifest(
            "simulate trichotomy",
            {"p": args.p, "ranks": ranks, "reps": args.reps, "n": args.n},
            args.seed,
        )
        _emit(results, manifest, args.out, writers)
        return 0

    p_values = _parse_int_list(args.p_list)
    d_values = _parse_int_list(args.d)
    config = simulation.CoverageConfig(
        p_values=tuple(p_values),
        d_values=tuple(d_values),
        alpha=args.alpha,
        reps=args.reps,
        seed=args.seed,
    )
    table = simulation.run_coverage(config)
    results = {
        "procedure": "simulate-coverage",
        "inputs": {
            "p_values": p_values,
            "d_values": d_values,
            "alpha": args.alpha,
            "reps": args.reps,
        },
        "seed": args.seed,
        "rows": [
            {
                "p": r.p,
                "d": r.d,
                "n": r.n,
                "coverage": r.coverage,
                "coverage_int": r.coverage_int,
                "mc_stderr": r.mc_stderr,
            }
            for r in table.rows
        ],
        "metadata": table.metadata,
    }
    writers = [lambda out: table.export_csv(out / "coverage.csv")]
    manifest = _manifest(
        "simulate coverage",
        {"p_values": p_values, "d_values": d_values, "alpha": args.alpha, "reps": args.reps},
        args.seed,
    )
    _emit(results, manifest, args.out, writers)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _JsonArgumentParser(prog="rex", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="bounds and regime for one (p, d)")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--margin", type=float, default=0.10)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_bound)

    e = sub.add_parser("estimate", help="rank estimate, CI, and classification from a CSV")
    e.add_argument("input_csv")
    e.add_argument("--alpha", type=float, default=0.05)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_estimate)

    t = sub.add_parser("test-regression", help="overall significance of a regression")
    t.add_argument("design_csv")
    t.add_argument("response_csv")
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--center", action="store_true")
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_test_regression)

    q = sub.add_parser("posi", help="simultaneous-inference bound at size cap m")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--mode", choices=[m.value for m in inference.CountMode], default="exact")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_posi)

    s = sub.add_parser("simulate", help="Monte Carlo studies")
    ssub = s.add_subparsers(dest="study", required=True)

    st = ssub.add_parser("trichotomy", help="single-observation extremes across ranks")
    st.add_argument("--p", type=int, default=3000)
    st.add_argument("--ranks", default="3,10,100,300,iid")
    st.add_argument("--reps", type=int, default=5000)
    st.add_argument("--n", type=int, default=30)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--out", default=None)
    st.set_defaults(func=cmd_simulate)

    sc = ssub.add_parser("coverage", help="confidence-interval coverage grid")
    sc.add_argument("--p", dest="p_list", default="3000")
    sc.add_argument("--d", default="5:12")
    sc.add_argument("--alpha", type=float, default=0.05)
    sc.add_argument("--reps", type=int, default=1000)
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--out", default=None)
    sc.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RexError as exc:
        error = {"type": type(exc).__name__, "message": str(exc)}
        for attr in ("index", "line"):
            if hasattr(exc, attr):
                error[attr] = getattr(exc, attr)
        print(json.dumps({"error": error}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(
            json.dumps({"error": {"type": "IOError", "message": str(exc)}}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
