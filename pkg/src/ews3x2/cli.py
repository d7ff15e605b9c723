"""Command-line front end.

Commands: validate, ews, classify, solve, rybczynski, estimate, sweep, plot.
Exit codes: 0 success, 1 model/assertion failure, 2 I/O or parse failure.
The EWS3X2_OUT environment variable sets the default output directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import estimate as est
from . import geometry, model, production, statics
from .errors import Ews3x2Error

EXIT_OK = 0
EXIT_MODEL = 1
EXIT_IO = 2


def _out_dir(args) -> Path:
    base = args.out_dir or os.environ.get("EWS3X2_OUT") or "."
    p = Path(base)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(_fail_io(f"cannot read {path}: {exc}"))


def _fail_io(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_IO


def _load_economy(path: str) -> model.Economy:
    d = _load_json(path)
    try:
        return model.Economy.from_dict(d)
    except (KeyError, ValueError, TypeError) as exc:
        raise SystemExit(_fail_io(f"malformed economy document {path}: {exc}"))


OBSERVATION_CSV_COLUMNS = (
    "one row; share columns theta_T1 theta_K1 theta_L1 theta_T2 theta_K2 "
    "theta_L2 theta_good1 theta_good2; rate columns p1_star p2_star wT_star "
    "wK_star wL_star; either aT1_star..aL2_star or aT0_prime aK0_prime aL0_prime"
)


def _load_observation(path: str) -> est.Observation:
    if path.endswith(".csv"):
        try:
            with open(path, newline="") as fh:
                row = next(csv.DictReader(fh))
            row = {k.strip(): float(v) for k, v in row.items()}
            theta_share = [[row["theta_T1"], row["theta_T2"]],
                           [row["theta_K1"], row["theta_K2"]],
                           [row["theta_L1"], row["theta_L2"]]]
            theta_good = [row["theta_good1"], row["theta_good2"]]
            p_star = [row["p1_star"], row["p2_star"]]
            w_star = [row["wT_star"], row["wK_star"], row["wL_star"]]
            a_star = a0 = None
            if "aT1_star" in row:
                a_star = [[row["aT1_star"], row["aT2_star"]],
                          [row["aK1_star"], row["aK2_star"]],
                          [row["aL1_star"], row["aL2_star"]]]
            else:
                a0 = [row["aT0_prime"], row["aK0_prime"], row["aL0_prime"]]
            return est.Observation(theta_share=theta_share, theta_good=theta_good,
                                   p_star=p_star, w_star=w_star,
                                   a_star=a_star, a0_prime=a0)
        except (OSError, KeyError, ValueError, StopIteration) as exc:
            raise SystemExit(_fail_io(
                f"malformed observation CSV {path}: {exc} "
                f"(expected {OBSERVATION_CSV_COLUMNS})"))
    d = _load_json(path)
    try:
        return est.Observation.from_dict(d)
    except (KeyError, ValueError, TypeError, Ews3x2Error) as exc:
        raise SystemExit(_fail_io(f"malformed observation document {path}: {exc}"))


def _emit(payload: dict, args):
    text = json.dumps(payload, indent=2, default=str)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)


def cmd_validate(args) -> int:
    e = _load_economy(args.economy)
    rep = model.validate_economy(e, check_ranking=args.ranking,
                                 tol=args.tolerance or model.STRUCT_TOL)
    print(rep)
    _emit(rep.to_dict(), args)
    return EXIT_OK if rep.ok else EXIT_MODEL


def cmd_ews(args) -> int:
    e = _load_economy(args.economy)
    g = model.ews_matrix(e)
    lhs, mid, rhs = g.determinant_identity()
    payload = {
        "g": g.g.tolist(),
        "row_sums": g.row_sums().tolist(),
        "sign_triple": list(g.sign_triple()),
        "determinant_identity": {"lhs": lhs, "mid": mid, "rhs": rhs},
        "pair_labels": {f"{a}-{b}": v
                        for (a, b), v in model.classify_substitutes(g).items()},
    }
    _emit(payload, args)
    return EXIT_OK


def cmd_classify(args) -> int:
    e = _load_economy(args.economy)
    g = model.ews_matrix(e)
    try:
        p = model.ews_ratio_vector(g)
    except Ews3x2Error as exc:
        print(f"error: ratio vector undefined: {exc}", file=sys.stderr)
        return EXIT_MODEL
    quad, triple = geometry.quadrant(p)
    label = geometry.classify_subregion(p, e)
    payload = {
        "ratio_point": [p.s, p.u],
        "quadrant": quad.value,
        "implied_sign_triple": triple,
        "subregion": label.value,
    }
    if label in geometry.RYBCZYNSKI_PATTERNS:
        payload["rybczynski_pattern"] = geometry.rybczynski_pattern(label).tolist()
    _emit(payload, args)
    return EXIT_OK


def cmd_solve(args) -> int:
    e = _load_economy(args.economy)
    d = _load_json(args.shock)
    try:
        shock = statics.Shock.from_dict(d)
    except (KeyError, ValueError, TypeError) as exc:
        return _fail_io(f"malformed shock document {args.shock}: {exc}")
    try:
        r = statics.solve_linear(e, shock)
    except Ews3x2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    _emit(r.to_dict(), args)
    return EXIT_OK


def cmd_rybczynski(args) -> int:
    e = _load_economy(args.economy)
    try:
        values, signs = statics.rybczynski_matrix(e)
    except Ews3x2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    payload = {"values": values.tolist(), "signs": signs.tolist()}
    try:
        p = model.ews_ratio_vector(model.ews_matrix(e))
        label = geometry.classify_subregion(p, e)
        payload["subregion"] = label.value
        if label in geometry.RYBCZYNSKI_PATTERNS:
            expected = geometry.rybczynski_pattern(label)
            payload["pattern_match"] = bool(np.array_equal(expected, signs))
    except Ews3x2Error:
        payload["subregion"] = None
    _emit(payload, args)
    if payload.get("pattern_match") is False:
        return EXIT_MODEL
    return EXIT_OK


def cmd_estimate(args) -> int:
    obs = _load_observation(args.observation)
    try:
        rep = est.run_pipeline(obs, time_reversal=args.time_reversal)
    except Ews3x2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    _emit(rep.to_dict(), args)
    if args.svg:
        _write_estimate_svg(obs, rep, args.svg)
    return EXIT_OK


def _write_estimate_svg(obs, rep, path):
    from .svgfig import Figure, autoscale_viewport
    norm, _ = est.preprocess(obs, time_reversal=rep.preprocess.reversed)
    r = float(norm.theta_factor[model.L] / norm.theta_factor[model.K])
    t1 = rep.theorem1
    pts = [t1.point_a, t1.point_b]
    fig = Figure(viewport=autoscale_viewport(pts, r))
    fig.add_boundary(r)
    if t1.point_a is not None and t1.point_b is not None:
        fig.add_segment(t1.point_a, t1.point_b)
    th = norm.theta_share
    fig.add_threshold(float(th[model.K, 0] / th[model.T, 0]), "S'(R_L1)")
    fig.add_threshold(float(th[model.K, 1] / th[model.T, 1]), "S'(R_L2)")
    Path(path).write_text(fig.to_svg())


SWEEP_HEADER = [
    "row", "seed", "family_1", "family_2",
    "theta_T1", "theta_K1", "theta_L1", "theta_T2", "theta_K2", "theta_L2",
    "s_prime", "u_prime", "quadrant", "subregion", "ranking",
    "ryb_signs", "oracle_agrees", "ok",
]


def _sweep_row(row_idx: int, seed: int, constraint: str) -> list:
    cons = production.SampleConstraints(
        ranked=True, quadrant="IV" if constraint == "quadrant4" else None)
    sample = production.sample_economy(seed, cons)
    e = sample.economy
    g = model.ews_matrix(e)
    p = model.ews_ratio_vector(g)
    quad, _ = geometry.quadrant(p)
    label = geometry.classify_subregion(p, e)
    resp = statics.stolper_samuelson(e, 1.0)
    _, signs = statics.rybczynski_matrix(e)
    agrees = ""
    ok = resp.ranking in statics.RANKINGS_UNDER_ASSUMPTIONS
    if label in geometry.RYBCZYNSKI_PATTERNS:
        agrees = bool(np.array_equal(geometry.rybczynski_pattern(label), signs))
        ok = ok and agrees
    th = e.theta_share
    fams = [s.to_dict()["form"] for s in sample.specs]
    return [
        row_idx, seed, fams[0], fams[1],
        f"{th[0, 0]:.12g}", f"{th[1, 0]:.12g}", f"{th[2, 0]:.12g}",
        f"{th[0, 1]:.12g}", f"{th[1, 1]:.12g}", f"{th[2, 1]:.12g}",
        f"{p.s:.12g}", f"{p.u:.12g}", quad.value, label.value, resp.ranking,
        "".join("+" if v > 0 else "-" for v in signs.flatten()),
        agrees, ok,
    ]


def cmd_sweep(args) -> int:
    if args.seed is None:
        return _fail_io("--seed is mandatory for sweep (reproducibility)")
    rows = []
    seeds = [args.seed + k for k in range(args.count)]
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, range(args.count), seeds,
                                 [args.constraint] * args.count))
    else:
        rows = [_sweep_row(k, s, args.constraint)
                for k, s in zip(range(args.count), seeds)]

    out_path = Path(args.out) if args.out else _out_dir(args) / "sweep.csv"
    with open(out_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        w.writerows(rows)

    quad_counts, rank_counts, failures = {}, {}, 0
    for r in rows:
        quad_counts[r[12]] = quad_counts.get(r[12], 0) + 1
        rank_counts[r[14]] = rank_counts.get(r[14], 0) + 1
        if r[17] is not True:
            failures += 1
    summary = {
        "rows": len(rows),
        "csv": str(out_path),
        "quadrants": quad_counts,
        "rankings": rank_counts,
        "violations": failures,
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK if failures == 0 else EXIT_MODEL


def cmd_plot(args) -> int:
    from .svgfig import Figure, autoscale_viewport
    e = _load_economy(args.economy)
    r = e.theta_L_over_K
    g = model.ews_matrix(e)
    try:
        p = model.ews_ratio_vector(g)
    except Ews3x2Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    extra = [p]
    q = rl1 = rl2 = seg = None
    try:
        q = geometry.point_q(e)
        rl1, rl2 = geometry.points_r(e)
        extra += [q, rl1, rl2]
    except Ews3x2Error:
        pass
    try:
        resp = statics.stolper_samuelson(e, 1.0)
        line = geometry.vector_line(resp, e)
        seg = geometry.segment_ab(line, resp, e)
        extra += [seg.point_a, seg.point_b]
    except Ews3x2Error:
        line = None
    fig = Figure(viewport=autoscale_viewport(extra, r))
    fig.add_boundary(r)
    if line is not None:
        fig.add_line(line.a1, line.b1)
    if seg is not None:
        fig.add_segment(seg.point_a, seg.point_b)
    if q is not None:
        fig.add_point(q.s, q.u, "Q", "#9467bd")
        fig.add_point(rl1.s, rl1.u, "R_L1", "#8c564b")
        fig.add_point(rl2.s, rl2.u, "R_L2", "#8c564b")
    fig.add_point(p.s, p.u, "E", "#17becf")
    out_path = Path(args.out) if args.out else _out_dir(args) / "figure.svg"
    out_path.write_text(fig.to_svg())
    if args.csv:
        Path(args.csv).write_text(fig.coords_csv())
    print(f"wrote {out_path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ews3x2",
        description="Comparative statics and EWS-ratio geometry for the "
                    "three-factor two-good trade model")
    ap.add_argument("--tolerance", type=float, default=None,
                    help="override the structural validation tolerance")
    ap.add_argument("--out", default=None, help="output file path")
    ap.add_argument("--out-dir", default=None,
                    help="output directory (default: $EWS3X2_OUT or .)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check all structural invariants")
    p.add_argument("economy")
    p.add_argument("--ranking", action="store_true",
                   help="also enforce the factor-intensity ranking")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("ews", help="economy-wide substitution matrix")
    p.add_argument("economy")
    p.set_defaults(func=cmd_ews)

    p = sub.add_parser("classify", help="ratio point, quadrant, subregion")
    p.add_argument("economy")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", help="solve the hat-system for a shock")
    p.add_argument("economy")
    p.add_argument("shock")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("rybczynski", help="output responses to endowments")
    p.add_argument("economy")
    p.set_defaults(func=cmd_rybczynski)

    p = sub.add_parser("estimate", help="run the two-period estimation pipeline")
    p.add_argument("observation", help="Observation JSON or CSV")
    p.add_argument("--time-reversal", action="store_true")
    p.add_argument("--svg", default=None, help="also write a segment figure")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="seeded Monte Carlo sweep with oracle checks")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--constraint", choices=["ranked", "quadrant4"],
                   default="ranked")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("plot", help="SVG figure of the ratio plane")
    p.add_argument("economy")
    p.add_argument("--csv", default=None, help="also write plotted coordinates")
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
