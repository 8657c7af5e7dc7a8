"""CSV serialization with ``#``-prefixed metadata and 17-digit floats."""

from __future__ import annotations

import csv
import io
import math


def format_value(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    return str(v)


def render_csv(columns, rows, metadata=()) -> str:
    buf = io.StringIO()
    for line in metadata:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def write_csv(path, columns, rows, metadata=()) -> None:
    text = render_csv(columns, rows, metadata)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _parse(text):
    try:
        v = int(text)
        # "-0" is a negative-zero float, not an integer
        if str(v) == text:
            return v
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path):
    """Return ``(metadata_lines, columns, rows)`` with numeric fields parsed."""
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    meta = [ln[2:] if ln.startswith("# ") else ln[1:] for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    reader = csv.reader(body)
    columns = next(reader)
    rows = [{c: _parse(v) for c, v in zip(columns, rec)} for rec in reader]
    return meta, columns, rows


PLOT_TEMPLATE = """\
# gnuplot script generated for {csv}
set datafile separator ","
set datafile commentschars "#"
set key outside autotitle columnhead
set grid
set xlabel "{xlabel}"
set ylabel "{ylabel}"
plot {series}
"""


def plot_script(csv_name: str, x: str, ys, xlabel=None, ylabel="value") -> str:
    series = ", \\\n     ".join(
        f'"{csv_name}" using (column("{x}")):(column("{y}")) with linespoints title "{y}"'
        for y in ys)
    return PLOT_TEMPLATE.format(csv=csv_name, xlabel=xlabel or x, ylabel=ylabel, series=series)
