"""Command line front end.

Subcommands:

  dims       parameter-block dimensions for K attributes
  optimize   compute and certify a D-optimal depth weighting
  tables     regenerate the three reference tables from scratch
  verify     certify a design file (JSON document or exported CSV)
  enumerate  dump one comparison-depth orbit as CSV
  hvalues    print the per-depth block informations as exact fractions

Exit codes: 0 ok, 2 usage or parse failure, 3 optimizer non-convergence,
4 singular (non-identifiable) design.  All output is deterministic.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from .design_space import (
    ComparisonPair,
    DepthDesign,
    ExplicitDesign,
    ModelSpec,
    Profile,
    Weight,
    count_pairs,
    enumerate_orbit,
    param_dims,
    realize_design,
)
from .equivalence import (
    DEFAULT_CERTIFY_TOL,
    kw_certify,
    variance_profile,
    variance_sweep_max_deviation,
)
from .information import SingularDesignError, h_values, info_matrix_exact, mix_h
from .optimizer import OptimResult, optimize_full

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGED = 3
EXIT_SINGULAR = 4

# Reference values the --check flag diffs against.  Regeneration never reads
# these; they exist only to flag drift.
EXPECTED_THIRD_ORDER_DEPTHS = {
    4: 1, 5: 1, 6: 1, 7: 1, 8: 2, 9: 2, 10: 2, 11: 3, 12: 3,
}
EXPECTED_TWO_DEPTH_DESIGNS = {
    5: (2, 0.667, 4, 0.333),
    6: (2, 0.714, 5, 0.286),
    7: (2, 0.750, 6, 0.250),
    8: (3, 0.667, 6, 0.333),
    9: (3, 0.700, 7, 0.300),
    10: (3, 0.727, 8, 0.273),
    11: (4, 0.667, 8, 0.333),
    12: (4, 0.692, 9, 0.308),
}
EXPECTED_NORMALIZED_VARIANCES = {
    5: (0.938, 1.000, 0.938, 1.000, 0.938),
    6: (0.850, 1.000, 0.950, 0.950, 1.000, 0.850),
    7: (0.792, 1.000, 0.982, 0.952, 0.982, 1.000, 0.792),
    8: (0.759, 0.998, 1.000, 0.954, 0.954, 1.000, 0.998, 0.759),
    9: (0.693, 0.958, 1.000, 0.966, 0.945, 0.966, 1.000, 0.958, 0.693),
    10: (0.644, 0.925, 1.000, 0.985, 0.958, 0.958, 0.985, 1.000, 0.925, 0.644),
    11: (0.609, 0.901, 0.999, 1.000, 0.973, 0.960, 0.973, 1.000, 0.999, 0.901, 0.609),
    12: (0.566, 0.860, 0.979, 1.000, 0.982, 0.963, 0.963, 0.982, 1.000, 0.979, 0.860, 0.566),
}


@dataclass
class DesignDocument:
    """Serializable design: spec, depth weights, optional explicit rows and report."""

    spec: ModelSpec
    depth_weights: dict[int, Weight]
    explicit_rows: list[tuple[tuple[int, ...], tuple[int, ...], float]] | None = None
    certification: dict | None = None

    def to_json_dict(self) -> dict:
        weights = {}
        for depth, weight in sorted(self.depth_weights.items()):
            weights[str(depth)] = {
                "fraction": str(Fraction(weight)),
                "decimal": float(weight),
            }
        document = {
            "K": self.spec.n_attributes,
            "S": self.spec.strength,
            "depth_weights": weights,
        }
        if self.explicit_rows is not None:
            document["explicit_rows"] = [
                [list(i), list(j), w] for i, j, w in self.explicit_rows
            ]
        if self.certification is not None:
            document["certification"] = self.certification
        return document

    @classmethod
    def from_json_dict(cls, document: dict) -> "DesignDocument":
        spec = ModelSpec(int(document["K"]), int(document["S"]))
        weights: dict[int, Weight] = {}
        for key, value in document["depth_weights"].items():
            weights[int(key)] = _parse_weight(value)
        rows = None
        if document.get("explicit_rows") is not None:
            rows = [
                (tuple(int(v) for v in i), tuple(int(v) for v in j), float(w))
                for i, j, w in document["explicit_rows"]
            ]
        return cls(spec, weights, rows, document.get("certification"))

    def depth_design(self) -> DepthDesign:
        return DepthDesign(self.depth_weights, self.spec)

    def explicit_design(self) -> ExplicitDesign:
        """Explicit form: the stored rows if present, else realized from weights."""
        if self.explicit_rows is None:
            return realize_design(self.depth_design())
        entries = tuple(
            (ComparisonPair(Profile(i), Profile(j)), w)
            for i, j, w in self.explicit_rows
        )
        return ExplicitDesign(entries, self.spec)


def _parse_weight(value) -> Weight:
    """Accept a bare number, a fraction string, or {"fraction":..., "decimal":...}."""
    if isinstance(value, dict):
        if "fraction" in value:
            return Fraction(value["fraction"])
        return float(value["decimal"])
    if isinstance(value, str):
        return Fraction(value)
    return float(value)


def _fraction_label(weight: Weight) -> str:
    """Fraction suffix for weights that are exact rationals, empty otherwise."""
    if isinstance(weight, (int, Fraction)):
        return f" ({Fraction(weight)})"
    return ""


def _write_plan_csv(path: str, design: DepthDesign) -> int:
    """Export explicit rows; returns the row count."""
    explicit = realize_design(design)
    k = design.spec.n_attributes
    header = (
        ["pair_id"]
        + [f"i_{n}" for n in range(1, k + 1)]
        + [f"j_{n}" for n in range(1, k + 1)]
        + ["weight"]
    )
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for pair_id, (pair, weight) in enumerate(explicit.entries, start=1):
            writer.writerow(
                [pair_id]
                + list(pair.first.levels)
                + list(pair.second.levels)
                + [f"{float(weight):.17g}"]
            )
    return len(explicit.entries)


def _read_plan_csv(path: str) -> DesignDocument:
    """Re-ingest an exported plan: infers K from the header, S from the rows."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        i_cols = [c for c in header if c.startswith("i_")]
        j_cols = [c for c in header if c.startswith("j_")]
        if not i_cols or len(i_cols) != len(j_cols) or header[-1] != "weight":
            raise ValueError(f"{path} does not look like an exported plan")
        k = len(i_cols)
        rows = []
        for row in reader:
            i = tuple(int(v) for v in row[1 : 1 + k])
            j = tuple(int(v) for v in row[1 + k : 1 + 2 * k])
            rows.append((i, j, float(row[1 + 2 * k])))
    if not rows:
        raise ValueError(f"{path} contains no rows")
    strength = sum(1 for v in rows[0][0] if v != 0)
    spec = ModelSpec(k, strength)
    weights: dict[int, float] = {}
    for i, j, w in rows:
        pair = ComparisonPair(Profile(i), Profile(j))
        weights[pair.depth] = weights.get(pair.depth, 0.0) + w
    return DesignDocument(spec, weights, rows)


def load_design_document(path: str) -> DesignDocument:
    """Load a design from a JSON document or an exported CSV plan."""
    if path.endswith(".csv"):
        return _read_plan_csv(path)
    with open(path) as handle:
        return DesignDocument.from_json_dict(json.load(handle))


def cmd_dims(args: argparse.Namespace) -> int:
    try:
        dims = param_dims(args.k)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(" ".join(str(v) for v in dims))
    return EXIT_OK


def _print_optimize_text(spec: ModelSpec, result: OptimResult, report) -> None:
    print(f"K={spec.n_attributes} S={spec.strength} p={spec.n_params}")
    print("support: " + " ".join(str(d) for d in result.support))
    for depth in result.support:
        weight = result.design.weights[depth]
        print(f"  d={depth}  w={float(weight):.3f}{_fraction_label(weight)}")
    print(f"log det: {result.log_det:.12f}")
    if result.certified:
        print(
            f"certified D-optimal: max excess {result.kw_excess:.3e} "
            f"(tol {report.tol:g} relative to p)"
        )
    else:
        print(
            f"NOT certified within iteration budget: best iterate shown, "
            f"max excess {result.kw_excess:.3e}"
        )


def cmd_optimize(args: argparse.Namespace) -> int:
    try:
        spec = ModelSpec(args.k, args.s)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    result = optimize_full(spec, tol=args.tol)
    report = kw_certify(result.design)
    rows = None
    if args.export:
        n_rows = _write_plan_csv(args.export, result.design)
        explicit = realize_design(result.design)
        rows = [
            (pair.first.levels, pair.second.levels, float(weight))
            for pair, weight in explicit.entries
        ]
        if not args.json:
            print(f"exported {n_rows} rows to {args.export}")
    if args.json:
        document = DesignDocument(
            spec, dict(result.design.weights), rows, report.to_dict()
        )
        print(json.dumps(document.to_json_dict(), indent=2, sort_keys=True))
    else:
        _print_optimize_text(spec, result, report)
    return EXIT_OK if result.certified else EXIT_NONCONVERGED


def _table_1() -> dict[int, int]:
    from .optimizer import optimal_depth_third_order

    return {s: min(optimal_depth_third_order(s)) for s in range(4, 13)}


def _table_2() -> dict[int, tuple[int, float, int, float]]:
    table = {}
    for s in range(5, 13):
        result = optimize_full(ModelSpec(s, s))
        d_low, d_high = result.support
        table[s] = (
            d_low,
            float(result.design.weights[d_low]),
            d_high,
            float(result.design.weights[d_high]),
        )
    return table


def _table_3() -> dict[int, tuple[tuple[float, ...], tuple[int, ...]]]:
    from .optimizer import conjectured_design

    table = {}
    for k in range(5, 13):
        spec = ModelSpec(k, k)
        design = conjectured_design(spec)
        profile = variance_profile(design)
        row = tuple(float(profile.values[d]) / spec.n_params for d in spec.depths)
        table[k] = (row, design.support)
    return table


def _render_table_1(table: dict[int, int]) -> str:
    strengths = sorted(table)
    lines = [
        "S   " + "".join(f"{s:>4d}" for s in strengths),
        "d*  " + "".join(f"{table[s]:>4d}" for s in strengths),
    ]
    return "\n".join(lines)


def _render_table_2(table: dict[int, tuple[int, float, int, float]]) -> str:
    strengths = sorted(table)
    rows = [
        ("S", [f"{s:d}" for s in strengths]),
        ("d*", [f"{table[s][0]:d}" for s in strengths]),
        ("w*", [f"{table[s][1]:.3f}" for s in strengths]),
        ("d1*", [f"{table[s][2]:d}" for s in strengths]),
        ("w1*", [f"{table[s][3]:.3f}" for s in strengths]),
    ]
    return "\n".join(label.ljust(4) + "".join(f"{v:>7s}" for v in row) for label, row in rows)


def _render_table_3(table: dict[int, tuple[tuple[float, ...], tuple[int, ...]]]) -> str:
    max_depth = max(len(row) for row, _ in table.values())
    lines = ["K\\d " + "".join(f"{d:>7d}" for d in range(1, max_depth + 1))]
    for k in sorted(table):
        row, support = table[k]
        cells = []
        for d, value in enumerate(row, start=1):
            mark = "*" if d in support else " "
            cells.append(f"{value:>6.3f}{mark}")
        lines.append(f"{k:<4d}" + "".join(cells))
    lines.append("(* marks the supported depths)")
    return "\n".join(lines)


def cmd_tables(args: argparse.Namespace) -> int:
    failures: list[str] = []
    if args.which == 1:
        table = _table_1()
        print(_render_table_1(table))
        if args.check:
            for s, expected in EXPECTED_THIRD_ORDER_DEPTHS.items():
                if table[s] != expected:
                    failures.append(f"S={s}: got {table[s]}, expected {expected}")
    elif args.which == 2:
        table = _table_2()
        print(_render_table_2(table))
        if args.check:
            for s, expected in EXPECTED_TWO_DEPTH_DESIGNS.items():
                got = table[s]
                if got[0] != expected[0] or got[2] != expected[2]:
                    failures.append(f"S={s}: support ({got[0]},{got[2]}) != ({expected[0]},{expected[2]})")
                if round(got[1], 3) != expected[1] or round(got[3], 3) != expected[3]:
                    failures.append(f"S={s}: weights {got[1]:.3f}/{got[3]:.3f} != {expected[1]}/{expected[3]}")
    else:
        table = _table_3()
        print(_render_table_3(table))
        if args.check:
            for k, expected_row in EXPECTED_NORMALIZED_VARIANCES.items():
                row, _ = table[k]
                for d, (got, expected) in enumerate(zip(row, expected_row), start=1):
                    if round(got, 3) != expected:
                        failures.append(f"K={k} d={d}: {got:.3f} != {expected}")
    if args.check:
        if failures:
            for failure in failures:
                print(f"check FAILED: {failure}", file=sys.stderr)
            return 1
        print("check: OK")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        document = load_design_document(args.design)
        design = document.depth_design()
    except (OSError, ValueError, KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: cannot parse {args.design}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = kw_certify(design, tol=args.tol)
    except SingularDesignError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_SINGULAR
    print(report.to_text())
    if args.oracle:
        explicit = document.explicit_design()
        dense = info_matrix_exact(explicit)
        block = mix_h(design).as_matrix()
        block_dev = float(abs(dense.entries - block).max())
        variance_dev = variance_sweep_max_deviation(design, explicit)
        print(f"oracle block deviation: {block_dev:.3e}")
        print(f"oracle variance deviation: {variance_dev:.3e}")
    return EXIT_OK


def cmd_enumerate(args: argparse.Namespace) -> int:
    try:
        spec = ModelSpec(args.k, args.s)
        n_pairs = count_pairs(spec, args.d)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handle = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(handle)
        writer.writerow(
            ["pair_id"]
            + [f"i_{n}" for n in range(1, args.k + 1)]
            + [f"j_{n}" for n in range(1, args.k + 1)]
            + ["weight"]
        )
        weight = f"{1.0 / n_pairs:.17g}"
        for pair_id, pair in enumerate(enumerate_orbit(spec, args.d), start=1):
            writer.writerow(
                [pair_id] + list(pair.first.levels) + list(pair.second.levels) + [weight]
            )
    finally:
        if args.out:
            handle.close()
    return EXIT_OK


def cmd_hvalues(args: argparse.Namespace) -> int:
    try:
        spec = ModelSpec(args.k, args.s)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(f"K={spec.n_attributes} S={spec.strength}")
    print("d   " + "".join(f"{name:>10s}" for name in ("h1", "h2", "h3", "h4")))
    for depth in range(0, spec.strength + 1):
        values = h_values(spec, depth).values
        print(f"{depth:<4d}" + "".join(f"{str(Fraction(v)):>10s}" for v in values))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairdesign",
        description="D-optimal designs for two-level paired comparison experiments",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    dims = subparsers.add_parser("dims", help="parameter-block dimensions")
    dims.add_argument("--k", type=int, required=True, help="number of attributes")
    dims.set_defaults(handler=cmd_dims)

    optimize = subparsers.add_parser("optimize", help="compute a D-optimal design")
    optimize.add_argument("--k", type=int, required=True, help="number of attributes")
    optimize.add_argument("--s", type=int, required=True, help="profile strength")
    optimize.add_argument("--tol", type=float, default=1e-9, help="optimizer tolerance")
    optimize.add_argument("--json", action="store_true", help="emit a JSON design document")
    optimize.add_argument("--export", metavar="FILE", help="write explicit pair rows as CSV")
    optimize.set_defaults(handler=cmd_optimize)

    tables = subparsers.add_parser("tables", help="regenerate a reference table")
    tables.add_argument("which", type=int, choices=(1, 2, 3))
    tables.add_argument("--check", action="store_true", help="diff against embedded values")
    tables.set_defaults(handler=cmd_tables)

    verify = subparsers.add_parser("verify", help="certify a design file")
    verify.add_argument("design", help="JSON document or exported CSV plan")
    verify.add_argument("--tol", type=float, default=DEFAULT_CERTIFY_TOL)
    verify.add_argument(
        "--oracle", action="store_true",
        help="also cross-check closed forms against the brute-force oracle",
    )
    verify.set_defaults(handler=cmd_verify)

    enumerate_cmd = subparsers.add_parser("enumerate", help="dump one depth orbit as CSV")
    enumerate_cmd.add_argument("--k", type=int, required=True)
    enumerate_cmd.add_argument("--s", type=int, required=True)
    enumerate_cmd.add_argument("--d", type=int, required=True)
    enumerate_cmd.add_argument("--out", metavar="FILE", help="write to a file instead of stdout")
    enumerate_cmd.set_defaults(handler=cmd_enumerate)

    hvalues_cmd = subparsers.add_parser("hvalues", help="per-depth block informations")
    hvalues_cmd.add_argument("--k", type=int, required=True)
    hvalues_cmd.add_argument("--s", type=int, required=True)
    hvalues_cmd.set_defaults(handler=cmd_hvalues)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
