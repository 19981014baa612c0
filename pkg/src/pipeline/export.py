"""
Writers for sampled series: CSV, JSON, SVG 1.1 and Wavefront OBJ polylines.

Numbers are written as the shortest round-trip repr of the float, so CSV and
JSON carry identical text for identical values. Every file is written to a
temporary sibling first and moved into place with os.replace.
"""

import json
import logging
import os
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from src.core.errors import ExportError
from src.pipeline.sample_pipeline import STATUS_OK, SampleRecord

logger = logging.getLogger(__name__)

CSV_FORMAT = "toroidal-samples/1"
CSV_COLUMNS = (
    "t", "arc", "status",
    "alpha_x", "alpha_y", "f",
    "gamma_x", "gamma_y", "gamma_z",
    "s_dot", "K",
    "T_x", "T_y", "T_z",
    "N_x", "N_y", "N_z",
    "B_x", "B_y", "B_z",
    "kappa", "tau", "c1", "c2",
    "C_x", "C_y", "C_z",
    "beta_x", "beta_y", "f_tilde",
)  # fmt: skip

SVG_NS = "http://www.w3.org/2000/svg"
SVG_MARGIN = 0.05
ALPHA_COLOR = "red"
BETA_COLOR = "purple"
GAMMA_COLOR = "blue"
FOCAL_COLOR = "green"


def format_number(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _flatten(record: SampleRecord) -> List[Optional[float]]:
    def parts(vector, size):
        return list(vector) if vector is not None else [None] * size

    return (
        parts(record.alpha, 2)
        + [record.f]
        + parts(record.gamma, 3)
        + [record.s_dot, record.K]
        + parts(record.T, 3)
        + parts(record.N, 3)
        + parts(record.B, 3)
        + [record.kappa, record.tau, record.c1, record.c2]
        + parts(record.C_gamma, 3)
        + parts(record.beta, 2)
        + [record.f_tilde]
    )


def csv_text(records: Sequence[SampleRecord]) -> str:
    lines = [f"# format={CSV_FORMAT}", ",".join(CSV_COLUMNS)]
    for record in records:
        arc = "" if record.arc is None else str(record.arc)
        cells = [format_number(record.t), arc, record.status] + [format_number(v) for v in _flatten(record)]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def json_text(records: Sequence[SampleRecord]) -> str:
    return json.dumps([record.to_dict() for record in records], indent=2) + "\n"


def write_atomic(path: Path, text: str) -> Path:
    """Write text to path through a temporary file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except OSError as exc:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise ExportError(f"cannot write {path}: {exc}", path=str(path))
    logger.info("wrote %s", path)
    return path


def load_json(path: Path) -> List[SampleRecord]:
    """Read records written by json_text."""
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError:
        raise ExportError(f"sample file not found: {path}", path=str(path))
    except json.JSONDecodeError as exc:
        raise ExportError(f"sample file {path} is not valid JSON: {exc}", path=str(path))
    if not isinstance(data, list):
        raise ExportError(f"sample file {path} must hold a JSON array of records", path=str(path))
    try:
        return [SampleRecord.from_dict(item) for item in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise ExportError(f"malformed record in {path}: {exc}", path=str(path))


def split_arcs(records: Iterable[SampleRecord]) -> List[List[SampleRecord]]:
    """Runs of consecutive ok records sharing an arc index."""
    arcs: List[List[SampleRecord]] = []
    current: List[SampleRecord] = []
    for record in records:
        if record.status != STATUS_OK:
            if current:
                arcs.append(current)
            current = []
            continue
        if current and current[-1].arc != record.arc:
            arcs.append(current)
            current = []
        current.append(record)
    if current:
        arcs.append(current)
    return arcs


def _bounds(points: Iterable[Tuple[float, float]]) -> Tuple[float, float, float, float]:
    xs, ys = zip(*points)
    return min(xs), min(ys), max(xs), max(ys)


def svg_document(records: Sequence[SampleRecord], title: str = "generalized focal curve") -> str:
    """
    SVG with one polyline per arc for alpha (red) and beta (purple).

    Raises:
        ExportError: no ok records to draw
    """
    arcs = split_arcs(records)
    if not arcs:
        raise ExportError("nothing to export: the series has no regular samples")

    all_points = [r.alpha for arc in arcs for r in arc] + [r.beta for arc in arcs for r in arc]
    x_min, y_min, x_max, y_max = _bounds(all_points)
    extent = max(x_max - x_min, y_max - y_min, 1e-12)
    pad = SVG_MARGIN * extent
    # y grows downward in SVG
    view = (x_min - pad, -(y_max + pad), (x_max - x_min) + 2 * pad, (y_max - y_min) + 2 * pad)

    svg = ET.Element(
        "svg",
        xmlns=SVG_NS,
        version="1.1",
        viewBox=" ".join(format_number(v) for v in view),
    )
    ET.SubElement(svg, "title").text = title
    stroke_width = format_number(extent / 500.0)
    for name, color, key in (("alpha", ALPHA_COLOR, "alpha"), ("beta", BETA_COLOR, "beta")):
        group = ET.SubElement(svg, "g", id=name, stroke=color, fill="none")
        group.set("stroke-width", stroke_width)
        for arc in arcs:
            points = " ".join(
                f"{format_number(p[0])},{format_number(-p[1])}" for p in (getattr(r, key) for r in arc)
            )
            ET.SubElement(group, "polyline", points=points)
    body = ET.tostring(svg, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def obj_document(records: Sequence[SampleRecord]) -> str:
    """OBJ with objects gamma (blue) and C_gamma (green), one `l` element per arc."""
    arcs = split_arcs(records)
    if not arcs:
        raise ExportError("nothing to export: the series has no regular samples")
    lines = ["# toroidal curve export"]
    index = 1
    for name, color, key in (("gamma", GAMMA_COLOR, "gamma"), ("C_gamma", FOCAL_COLOR, "C_gamma")):
        lines.append(f"o {name}")
        lines.append(f"# color {color}")
        for arc in arcs:
            start = index
            for record in arc:
                x, y, z = getattr(record, key)
                lines.append(f"v {format_number(x)} {format_number(y)} {format_number(z)}")
                index += 1
            lines.append("l " + " ".join(str(i) for i in range(start, index)))
    return "\n".join(lines) + "\n"


_RENDERERS = {
    "csv": csv_text,
    "json": json_text,
    "svg": svg_document,
    "obj": obj_document,
}


def export_records(
    records: Sequence[SampleRecord],
    outputs: Iterable[str],
    out_dir: Path,
    stem: str = "samples",
) -> Dict[str, str]:
    """
    Render every requested format, then write them.

    Rendering happens before any write so a failing format leaves no files.
    """
    documents = {}
    for fmt in sorted(outputs):
        if fmt not in _RENDERERS:
            raise ExportError(f"unknown output format {fmt!r}", format=fmt)
        documents[fmt] = _RENDERERS[fmt](records)
    written = {}
    for fmt, text in documents.items():
        written[fmt] = str(write_atomic(Path(out_dir) / f"{stem}.{fmt}", text))
    return written
