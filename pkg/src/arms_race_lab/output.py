"""Result tables and their CSV / SVG serializations.

CSV cells use 17 significant digits so every double round-trips exactly.
Metadata is written as leading ``# key: value`` lines.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

LOG_AXES = {"fig2a": (True, False), "fig2b": (True, True)}


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    x: str
    y: str
    series: str | None = None


@dataclass
class ResultTable:
    name: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict)
    plot: PlotSpec | None = None

    def __post_init__(self):
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"table {self.name!r}: row {i} has {len(row)} cells, expected {width}")

    def column(self, name):
        j = self.columns.index(name)
        return [row[j] for row in self.rows]


def format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        text = format(value, ".17g")
        if all(c in "-0123456789" for c in text):
            text += ".0"
        return text
    if isinstance(value, str):
        if any(c in value for c in ',"\n'):
            raise ValueError(f"string cell {value!r} contains a separator")
        return value
    if isinstance(value, np.integer):
        return str(int(value))
    return format_cell(float(value))


def parse_cell(text: str):
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def render_csv(t: ResultTable) -> str:
    lines = [f"# {key}: {value}" for key, value in t.metadata.items()]
    lines.append(",".join(t.columns))
    lines.extend(",".join(format_cell(v) for v in row) for row in t.rows)
    return "\n".join(lines) + "\n"


def emit_csv(t: ResultTable, path) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_csv(t))
    except OSError as exc:
        raise OSError(f"cannot write {os.fspath(path)}: {exc.strerror}") from exc


def parse_csv(text: str, name: str) -> ResultTable:
    metadata, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            metadata[key.strip()] = value.strip()
        else:
            body.append(line)
    if not body:
        raise ValueError(f"{name}: missing header row")
    columns = body[0].split(",")
    rows = [tuple(parse_cell(c) for c in line.split(",")) for line in body[1:]]
    return ResultTable(name, columns, rows, metadata)


def read_csv(path) -> ResultTable:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_csv(text, os.path.splitext(os.path.basename(os.fspath(path)))[0])


def emit_svg(t: ResultTable, kind: str, path, x: str | None = None, y: str | None = None,
             series: str | None = None) -> None:
    """Line chart of ``y`` against ``x``, one line per distinct ``series`` value.

    Axis columns default to the table's plot spec.
    """
    if x is None or y is None:
        if t.plot is None:
            raise ValueError(f"table {t.name!r} has no plot spec")
        x, y, series = t.plot.x, t.plot.y, t.plot.series
    logx, logy = LOG_AXES.get(kind, (False, False))
    with plt.rc_context({"svg.hashsalt": "arms-race-lab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 4))
        groups: dict = {}
        for row in t.rows:
            key = row[t.columns.index(series)] if series else None
            groups.setdefault(key, []).append((row[t.columns.index(x)], row[t.columns.index(y)]))
        for key, points in groups.items():
            xs, ys = zip(*points) if points else ((), ())
            ax.plot(xs, ys, label=None if key is None else f"{series}={key}")
        if logx:
            ax.set_xscale("log")
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(x)
        ax.set_ylabel(y)
        ax.set_title(t.name)
        if series and groups:
            ax.legend()
        try:
            scales = f"xscale={ax.get_xscale()} yscale={ax.get_yscale()}"
            fig.savefig(path, format="svg", metadata={"Date": None, "Description": scales})
        except OSError as exc:
            raise OSError(f"cannot write {os.fspath(path)}: {exc.strerror}") from exc
        finally:
            plt.close(fig)
