"""Text output: json/csv/ascii tables and equation text."""
import csv
import io
import json

from classify import format_terms
from dynkin import DynkinDiagram, height, positive_roots
from exactnum import format_scalar

FORMATS = ("ascii", "csv", "json")


def format_vector(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def format_curve_class(curve_class) -> str:
    return " + ".join(f"C{v}" if m == 1 else f"{m}*C{v}" for v, m in curve_class)


def render_table(columns: list[str], rows: list[dict], fmt: str = "ascii") -> str:
    if fmt == "json":
        return json.dumps([{c: row[c] for c in columns} for row in rows], indent=2) + "\n"

    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row[c] for c in columns})
        return buf.getvalue()

    if fmt != "ascii":
        raise ValueError(f"unknown format {fmt!r}")

    cells = [[str(row[c]) for c in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    lines = [
        "  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for r in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"


# ------------------------------
# Row builders
# ------------------------------
def roots_table(d: DynkinDiagram, fmt: str = "ascii") -> str:
    rows = [
        {"index": i, "root": format_vector(r), "height": height(r)}
        for i, r in enumerate(positive_roots(d), start=1)
    ]
    return render_table(["index", "root", "height"], rows, fmt)


def entries_table(entries, fmt: str = "ascii") -> str:
    rows = []
    for e in entries:
        rows.append({
            "root": format_vector(e.root),
            "lambda": format_scalar(e.lam),
            "word": " ".join(str(k) for k in e.word) or "-",
            "base": e.base,
            "curve": format_curve_class(e.curve_class),
            "config": e.config_type,
        })
    return render_table(["root", "lambda", "word", "base", "curve", "config"], rows, fmt)


def curves_table(records, fmt: str = "ascii") -> str:
    rows = []
    for r in records:
        rows.append({
            "lambda": format_scalar(r.lam),
            "root": format_vector(r.root),
            "config": r.config_type,
            "curve": format_curve_class(r.curve_class),
            "dims": format_vector(r.dims),
            "condition": r.condition,
        })
    return render_table(["lambda", "root", "config", "curve", "dims", "condition"], rows, fmt)


def groups_table(groups, fmt: str = "ascii") -> str:
    rows = [
        {
            "root": format_vector(root),
            "count": len(lams),
            "lambdas": " ".join(format_scalar(lam) for lam in lams),
        }
        for root, lams in groups
    ]
    return render_table(["root", "count", "lambdas"], rows, fmt)


def star_table(report, fmt: str = "ascii") -> str:
    rows = [
        {
            "root": format_vector(v.root),
            "other": format_vector(v.other),
            "common_factor": v.common.format(),
            "shared_lambda": " ".join(str(x) for x in v.shared_roots) or "-",
        }
        for v in report.violations
    ]
    return render_table(["root", "other", "common_factor", "shared_lambda"], rows, fmt)


def irrational_summary(counts) -> str | None:
    total = sum(n for _, n in counts)
    if not total:
        return None
    roots = sum(1 for _, n in counts if n)
    return f"# {total} irrational lambda value(s) over {roots} root(s) not listed (use --mode numeric)"


def relation_summary(report) -> str:
    lines = [f"max residual: {format_scalar(report.max_magnitude)}"]
    bad = report.failing()
    lines.append("relations hold" if not bad else "relations fail at: " + ", ".join(bad))
    return "\n".join(lines) + "\n"


def equation_text(poly) -> str:
    return "\n".join(format_terms(poly)) + "\n" if not poly.is_zero else "0\n"


def charts_text(relations) -> str:
    return "".join(r.format() + "\n" for r in relations)
