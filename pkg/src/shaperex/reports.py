"""Aligned text tables for the stored JSON artifacts.

Formatting is fixed (four decimals, "-" for undefined) so rerenders of the
same data are byte-identical.
"""

from __future__ import annotations


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def render_table(headers: list[str], rows: list[list]) -> str:
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in cells)) if cells else len(headers[i])
        for i in range(len(headers))
    ]

    def line(parts, pad):
        out = []
        for i, part in enumerate(parts):
            out.append(part.ljust(widths[i]) if i == 0 else part.rjust(widths[i]))
        return pad.join(out).rstrip()

    sep = "-+-".join("-" * w for w in widths)
    body = [line(headers, " | "), sep]
    body.extend(line(r, " | ") for r in cells)
    return "\n".join(body) + "\n"


def distill_table(report: dict) -> str:
    headers = ["predicate", "initial", "after rules", "found", "part found"]
    rows = []
    for prop, counts in sorted(report["properties"].items()):
        rows.append(
            [
                prop,
                counts["initial"],
                counts["after_rules"],
                counts["found"],
                counts["part_found"],
            ]
        )
    entities = report["entities"]
    rows.append(
        [
            "entities",
            entities["initial"],
            entities["after_rules"],
            entities["found"],
            entities["retention"],
        ]
    )
    return render_table(headers, rows)


def stats_table(stats_rows: list[dict]) -> str:
    scorer_names = sorted(
        {name for s in stats_rows for name in (s.get("scorer_means") or {})}
    )
    headers = ["dataset", "size", "mean props", "patterns", "r_s*", *scorer_names]
    rows = []
    for s in stats_rows:
        row = [
            s["name"],
            s["size"],
            s["mean_properties"],
            s["realized_pattern_count"],
            s["shape_valid_rate"],
        ]
        means = s.get("scorer_means") or {}
        row.extend(means.get(name) for name in scorer_names)
        rows.append(row)
    return render_table(headers, rows)


def eval_table(reports: dict[str, dict]) -> str:
    headers = [
        "run", "size", "r_tll", "r_URI+", "loss", "F1-", "F1+",
        "r_FP", "r_FN", "r_eq",
    ]
    rows = []
    for label, r in reports.items():
        rows.append(
            [
                label,
                r["size"],
                r["r_tll"],
                r["r_uri_ok"],
                r["mean_loss"],
                r["f1_micro"],
                r["f1_macro"],
                r["r_fp"],
                r["r_fn"],
                r["r_pattern_eq"],
            ]
        )
    return render_table(headers, rows)


def mismatch_table(reports: dict[str, dict]) -> str:
    headers = [
        "run", "r_neq", "|P_neq|", "|P^_neq|", "r_s*(G)", "r_s*(G^)", "PEC",
    ]
    rows = []
    for label, r in reports.items():
        rows.append(
            [
                label,
                r["r_pattern_neq"],
                r["mismatch_expected_patterns"],
                r["mismatch_predicted_patterns"],
                r["shape_valid_expected_mismatch"],
                r["shape_valid_predicted_mismatch"],
                r["pec"],
            ]
        )
    return render_table(headers, rows)


def annotation_table(metrics: dict) -> str:
    headers = ["FN-", "FN+", "r_omis", "FP-", "FP+", "r_disco"]
    rows = [
        [
            metrics["fn_minus"],
            metrics["fn_plus"],
            metrics["omission_rate"],
            metrics["fp_minus"],
            metrics["fp_plus"],
            metrics["discovery_rate"],
        ]
    ]
    return render_table(headers, rows)
