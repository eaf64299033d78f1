"""Byte-stable artifact writers: certificate JSON/CSV/markdown and plain CSV tables."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from .opnorms import CertificateReport
from .opnorms.certificate import DESCRIPTIONS

__all__ = ["FORMATS", "emit_report", "render_report", "write_csv", "write_json"]

FORMATS = ("json", "csv", "markdown")
_SUFFIX = {"json": ".json", "csv": ".csv", "markdown": ".md"}


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _json(report: CertificateReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv(report: CertificateReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "name", "level", "value", "flag"])
    for name in sorted(report.gates):
        g = report.gates[name]
        w.writerow(["gate", name, "", "pass" if g.passed else "fail", ""])
    for name in sorted(report.quantities):
        q = report.quantities[name]
        if not q.levels:
            w.writerow(["quantity", name, "", _fmt(q.value), q.flag])
        for i, v in enumerate(q.levels):
            w.writerow(["quantity", name, i, _fmt(float(v)), q.flag])
    return buf.getvalue()


def _markdown(report: CertificateReport) -> str:
    d = report.to_dict()
    space = d["space"]
    lines = [
        f"# Certificate: {d['multiplier']}",
        "",
        f"Space (m_alpha, m_2alpha) = ({space['m_alpha']}, {space['m_2alpha']}), "
        f"p = {d['p']:g}, q = {d['q']:g}, variant {d['variant']}, seed {d['seed']}.",
        "",
        f"**Verdict: {d['verdict']}**",
        "",
        "| gate | result | detail |",
        "|---|---|---|",
    ]
    for name, g in d["gates"].items():
        lines.append(f"| {name} | {'pass' if g['passed'] else 'FAIL'} | {_cell(g['detail'])} |")
    lines += ["", "| quantity | meaning | value | flag | proxy | note |", "|---|---|---|---|---|---|"]
    for name, q in d["quantities"].items():
        value = "" if q["value"] is None else f"{q['value']:.6g}"
        meaning = _cell(DESCRIPTIONS.get(name, ""))
        proxy = "yes" if q["proxy"] else ""
        lines.append(f"| {name} | {meaning} | {value} | {q['flag']} | {proxy} | {_cell(q['note'])} |")
    return "\n".join(lines) + "\n"


def _cell(text: str) -> str:
    return text.replace("|", "\\|").replace("\n", " ")


_RENDER = {"json": _json, "csv": _csv, "markdown": _markdown}


def render_report(report: CertificateReport, fmt: str) -> str:
    if fmt not in _RENDER:
        raise ValueError(f"format must be one of {FORMATS}")
    return _RENDER[fmt](report)


def emit_report(report: CertificateReport, out_dir, stem: str = "certificate",
                formats: Sequence[str] = FORMATS) -> list[Path]:
    """Write one file per format into ``out_dir``; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for fmt in formats:
        path = out_dir / f"{stem}{_SUFFIX[fmt]}"
        path.write_text(render_report(report, fmt), encoding="utf-8")
        paths.append(path)
    return paths


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n", encoding="utf-8")
    return path
