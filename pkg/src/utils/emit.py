"""Report serialization: JSON for machines, CSV rows for plotting."""
import csv
import io

from src.models.reports import Report

CSV_COLUMNS = ("m", "variety", "point", "height", "radius", "exact")


def _rows(report: Report) -> list[dict]:
    rows = []
    if report.growth is not None:
        for row in report.growth.rows:
            rows.append(
                {
                    "m": row.m,
                    "variety": f"example {report.growth.example_id}",
                    "point": "; ".join(row.point),
                    "height": row.height,
                    "radius": row.radius,
                    "exact": row.exact,
                }
            )
    for sample in report.samples:
        rows.append(
            {
                "m": sample.D_V if sample.D_V is not None else "",
                "variety": sample.variety,
                "point": "; ".join(sample.point),
                "height": sample.height.value,
                "radius": sample.height.radius,
                "exact": sample.height.exact,
            }
        )
    return sorted(rows, key=lambda r: (r["m"] == "", r["m"] if r["m"] != "" else 0, r["height"], r["point"]))


def emit(report: Report, fmt: str = "json") -> bytes:
    """
    Serialize a report.

    JSON keeps the model's field order and validates back into a Report.
    CSV holds one (m, point, height) row per growth row or sampled point,
    sorted by (m, height); m is D(V) for sampled points and empty when infinite.

    Raises:
        ValueError: On an unknown format
    """
    if fmt == "json":
        return (report.model_dump_json(indent=2) + "\n").encode("utf-8")
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}; expected json or csv")

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(_rows(report))
    return buffer.getvalue().encode("utf-8")
