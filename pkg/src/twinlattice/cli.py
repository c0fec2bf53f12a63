"""Command-line front end.

Exit codes: 0 success, 2 bad input, 3 certificate failure, 4 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

from .coxeter import INF, CoxeterSystem, growth_coefficients
from .diagrams import QI_MAX_K, flat_rank, qi_table
from .distortion import CSV_COLUMNS, build_sigma, distortion_experiment, factorize
from .errors import CertificateError, NoSolverError, ResourceLimitError
from .integrability import integrability_check
from .laurent import check_prime, parse_matrix

EXIT_INPUT, EXIT_CERT, EXIT_RESOURCE = 2, 3, 4


class InputError(ValueError):
    pass


def load_diagram(path: str) -> CoxeterSystem:
    """Read {"generators": [...], "m": [[...]]}; entries are integers or "inf"."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read diagram file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"diagram file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "generators" not in data or "m" not in data:
        raise InputError('diagram file needs keys "generators" and "m"')
    try:
        return CoxeterSystem(data["generators"], data["m"])
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid Coxeter matrix: {exc}") from exc


def diagram_to_json(sys_: CoxeterSystem) -> dict:
    return {
        "generators": list(sys_.generators),
        "m": [["inf" if x == INF else x for x in row] for row in sys_.matrix],
    }


# -- commands --------------------------------------------------------------------

def cmd_flat_rank(args, out) -> int:
    cs = load_diagram(args.diagram)
    rep = flat_rank(cs)
    if args.json:
        out.write(json.dumps(rep.as_dict(cs), indent=2) + "\n")
        return 0
    out.write(f"R = {rep.R}\n")
    out.write(f"bounds = ({rep.bounds[0]}, {rep.bounds[1]})\n")
    out.write("witness = " + (" ".join(c.render(cs) for c in rep.witness) or "none") + "\n")
    out.write("components = " + " ".join(c.render(cs) for c in rep.components) + "\n")
    if rep.indefinite:
        out.write("note: the diagram has an indefinite component\n")
    return 0


def cmd_qi_table(args, out) -> int:
    if not 1 <= args.max_k <= QI_MAX_K:
        raise InputError(f"--max-k must be between 1 and {QI_MAX_K}")
    out.write("k,generators,R,bounds\n")
    for row in qi_table(args.max_k):
        lo, hi = row["bounds"]
        out.write(f"{row['k']},{row['generators']},{row['R']},({lo},{hi})\n")
    return 0


def cmd_growth(args, out) -> int:
    if args.n < 0:
        raise InputError("--n must be non-negative")
    cs = load_diagram(args.diagram)
    table = growth_coefficients(cs, args.n)
    out.write(",".join(str(c) for c in table.coefficients) + "\n")
    return 0


def cmd_integrability(args, out) -> int:
    cs = load_diagram(args.diagram)
    try:
        rep = integrability_check(cs, args.qmin, args.p, args.n, diagram=args.diagram)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out.write(json.dumps(rep.as_dict(), indent=2) + "\n")
    return 0


def cmd_distortion(args, out) -> int:
    if args.p not in (2, 3, 5):
        raise InputError("--p must be 2, 3 or 5")
    if args.samples < 1 or args.max_len < 0:
        raise InputError("--samples must be >= 1 and --max-len >= 0")
    result = distortion_experiment(args.p, args.samples, args.max_len, args.seed)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in result["rows"]:
            writer.writerow(row.csv_fields())
    summary = dict(result["summary"])
    if not args.timing:
        summary["runtime_ms"] = None
    out.write(json.dumps(summary) + "\n")
    return 0


def cmd_factorize(args, out) -> int:
    try:
        check_prime(args.p)
        gamma = parse_matrix(args.matrix, args.p)
    except (ValueError, SyntaxError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse matrix: {exc}") from exc
    if not gamma.is_lattice_element():
        raise InputError("matrix entries must be Laurent polynomials in t")
    sigma = build_sigma(args.p)
    cert = factorize(gamma, sigma)
    out.write(f"target = {gamma}\n")
    out.write(f"word = {list(cert.word)}\n")
    for i in cert.word:
        out.write(f"  sigma[{i}] = {sigma[i]}\n")
    out.write(f"d_plus = {cert.d_plus}\nd_minus = {cert.d_minus}\nd_X = {cert.d_x}\n")
    out.write(f"length = {len(cert)}\n")
    out.write(f"length <= max(1, 2 d_X): {'yes' if cert.bound_holds() else 'NO'}\n")
    out.write(f"d_X <= 2 length: {'yes' if cert.d_x <= 2 * len(cert) else 'NO'}\n")
    if cert.stabilizer_flag:
        out.write("note: the base-pair stabilizer letter was kept separate\n")
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinlattice",
        description="Twin tree lattices of SL2(F_p[t,1/t]) and Coxeter diagram invariants.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("flat-rank", help="flat rank R and the bounds (R, 2R) of a diagram")
    p.add_argument("--diagram", required=True, help='JSON file {"generators": [...], "m": [[...]]}')
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_flat_rank)

    p = sub.add_parser("qi-table", help="flat ranks of k commuting ~A2 triangles")
    p.add_argument("--max-k", type=int, required=True)
    p.set_defaults(func=cmd_qi_table)

    p = sub.add_parser("growth", help="growth coefficients c_0..c_N")
    p.add_argument("--diagram", required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("integrability", help="partial sums of sum n^p c_n q_min^-n")
    p.add_argument("--diagram", required=True)
    p.add_argument("--qmin", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_integrability)

    p = sub.add_parser(
        "distortion",
        help="random non-distortion experiment",
        description="Writes one CSV row per sample with columns " + ",".join(CSV_COLUMNS)
        + " and prints the JSON summary {samples, violations, max_ratio, runtime_ms}.",
    )
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--max-len", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--timing", action="store_true",
                   help="report runtime_ms (otherwise null, keeping output reproducible)")
    p.set_defaults(func=cmd_distortion)

    p = sub.add_parser("factorize", help="factorize a lattice element over Sigma")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--matrix", required=True, help='e.g. "[[1, 2*t^-1],[0,1]]"')
    p.set_defaults(func=cmd_factorize)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (CertificateError, NoSolverError) as exc:
        sys.stderr.write(f"certificate failure: {exc}\n")
        return EXIT_CERT
    except ResourceLimitError as exc:
        sys.stderr.write(f"resource limit: {exc}\n")
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
