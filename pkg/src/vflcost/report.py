"""Experiment result containers and the CSV / SVG emitters.

CSV output is deterministic: fixed headers, values at 12 significant
digits, ``\\n`` newlines, rows in sweep order.  The SVG chart is a
dependency-free static line chart with one polyline per scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import ConfigError, OutputError
from .schemes import ALL_SCHEMES

__all__ = [
    "SweepRow",
    "SweepResult",
    "CostTableRow",
    "CostTableResult",
    "LossTableResult",
    "AuditRow",
    "AuditResult",
    "emit_csv",
    "parse_sweep_csv",
    "emit_svg_chart",
    "SCHEME_COLUMNS",
]

#: CSV column name per scheme, in fixed emission order.
SCHEME_COLUMNS = (("CL/CI", "clci_bits"), ("CL/DI", "cldi_bits"),
                  ("DL/CI", "dlci_bits"), ("DL/DI", "dldi_bits"))


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    losses: Mapping[str, float]  # scheme code -> worst-case bits
    mechanism_s: float | None = None


@dataclass(frozen=True)
class SweepResult:
    kind: str  # "r" | "eps"
    axis_label: str
    rows: tuple[SweepRow, ...]

    def column(self, code: str) -> list[float]:
        return [row.losses[code] for row in self.rows]


@dataclass(frozen=True)
class CostTableRow:
    scheme_a: str
    scheme_b: str
    loss_gap_bits: float
    cmi_bits: float

    @property
    def abs_gap(self) -> float:
        return abs(self.loss_gap_bits - self.cmi_bits)


@dataclass(frozen=True)
class CostTableResult:
    rows: tuple[CostTableRow, ...]


@dataclass(frozen=True)
class LossTableResult:
    per_agent: Mapping[str, tuple[float, ...]]  # scheme code -> per-agent bits
    epsilon: float | None = None


@dataclass(frozen=True)
class AuditRow:
    agent: int
    audited_cmi_bits: float
    closed_form_bits: float | None
    feasible: bool


@dataclass(frozen=True)
class AuditResult:
    s: float
    epsilon: float
    rows: tuple[AuditRow, ...]


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _csv_lines(result) -> list[str]:
    if isinstance(result, SweepResult):
        header = ["sweep_value"] + [col for _, col in SCHEME_COLUMNS]
        if result.kind == "eps":
            header.append("mechanism_s")
        lines = [",".join(header)]
        for row in result.rows:
            cells = [_fmt(row.sweep_value)] + [
                _fmt(row.losses[code]) for code, _ in SCHEME_COLUMNS]
            if result.kind == "eps":
                cells.append(_fmt(row.mechanism_s if row.mechanism_s is not None
                                  else float("nan")))
            lines.append(",".join(cells))
        return lines
    if isinstance(result, CostTableResult):
        lines = ["scheme_a,scheme_b,loss_gap_bits,cmi_bits,abs_gap"]
        for row in result.rows:
            lines.append(",".join([row.scheme_a, row.scheme_b,
                                   _fmt(row.loss_gap_bits), _fmt(row.cmi_bits),
                                   _fmt(row.abs_gap)]))
        return lines
    if isinstance(result, LossTableResult):
        n_agents = len(next(iter(result.per_agent.values())))
        header = ["scheme", "worst_bits"] + [f"agent{k}_bits"
                                             for k in range(1, n_agents + 1)]
        lines = [",".join(header)]
        for scheme in ALL_SCHEMES:
            losses = result.per_agent[scheme.code]
            lines.append(",".join([scheme.code, _fmt(max(losses))]
                                  + [_fmt(v) for v in losses]))
        return lines
    if isinstance(result, AuditResult):
        lines = ["agent,audited_cmi_bits,closed_form_bits,abs_gap,feasible"]
        for row in result.rows:
            closed = "" if row.closed_form_bits is None else _fmt(row.closed_form_bits)
            gap = "" if row.closed_form_bits is None else _fmt(
                abs(row.audited_cmi_bits - row.closed_form_bits))
            lines.append(",".join([str(row.agent), _fmt(row.audited_cmi_bits),
                                   closed, gap, str(row.feasible).lower()]))
        return lines
    raise ConfigError(f"cannot emit {type(result).__name__} as CSV")


def emit_csv(result, path: str) -> None:
    """Write a result as a deterministic CSV file."""
    text = "\n".join(_csv_lines(result)) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write CSV to {path}: {exc}") from exc


def parse_sweep_csv(path: str) -> SweepResult:
    """Read back a sweep CSV (inverse of :func:`emit_csv` for sweeps)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().split("\n") if ln]
    except OSError as exc:
        raise OutputError(f"cannot read CSV from {path}: {exc}") from exc
    header = lines[0].split(",")
    kind = "eps" if header[-1] == "mechanism_s" else "r"
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        losses = {code: float(cells[1 + i])
                  for i, (code, _) in enumerate(SCHEME_COLUMNS)}
        mech = float(cells[5]) if kind == "eps" else None
        rows.append(SweepRow(sweep_value=float(cells[0]), losses=losses,
                             mechanism_s=mech))
    axis = "privacy budget (bits)" if kind == "eps" else "feature mutual information (bits)"
    return SweepResult(kind=kind, axis_label=axis, rows=tuple(rows))


# ---------------------------------------------------------------------------
# static SVG chart
# ---------------------------------------------------------------------------

_COLORS = {"CL/CI": "#1f77b4", "CL/DI": "#d95f02", "DL/CI": "#2ca02c",
           "DL/DI": "#d62728"}

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 72, 20, 20, 52


def _pad_range(lo: float, hi: float) -> tuple[float, float]:
    span = hi - lo
    pad = 0.05 * span if span > 0 else 0.5
    return lo - pad, hi + pad


def emit_svg_chart(result: SweepResult, path: str) -> None:
    """Render a sweep as a static SVG line chart, one polyline per scheme."""
    if len(result.rows) < 2:
        raise ConfigError("an SVG chart needs at least 2 sweep rows")
    xs = [row.sweep_value for row in result.rows]
    ys = [row.losses[code] for row in result.rows for code, _ in SCHEME_COLUMNS]
    x_lo, x_hi = _pad_range(min(xs), max(xs))
    y_lo, y_hi = _pad_range(min(ys), max(ys))

    def px(x: float) -> float:
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def py(y: float) -> float:
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for i in range(5):
        xv = x_lo + (x_hi - x_lo) * i / 4
        yv = y_lo + (y_hi - y_lo) * i / 4
        parts.append(f'<line x1="{px(xv):.2f}" y1="{_H - _MB}" x2="{px(xv):.2f}" '
                     f'y2="{_H - _MB + 4}" stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{px(xv):.2f}" y="{_H - _MB + 18}" font-size="11" '
                     f'text-anchor="middle">{xv:.4g}</text>')
        parts.append(f'<line x1="{_ML - 4}" y1="{py(yv):.2f}" x2="{_ML}" '
                     f'y2="{py(yv):.2f}" stroke="black" stroke-width="1"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py(yv) + 4:.2f}" font-size="11" '
                     f'text-anchor="end">{yv:.5g}</text>')
    parts.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" font-size="13" '
                 f'text-anchor="middle">{_escape(result.axis_label)}</text>')
    parts.append(f'<text x="16" y="{(_MT + _H - _MB) / 2}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 16 '
                 f'{(_MT + _H - _MB) / 2})">predictive loss (bits)</text>')
    for idx, (code, _) in enumerate(SCHEME_COLUMNS):
        pts = " ".join(f"{px(x):.2f},{py(row.losses[code]):.2f}"
                       for x, row in zip(xs, result.rows))
        parts.append(f'<polyline points="{pts}" fill="none" '
                     f'stroke="{_COLORS[code]}" stroke-width="1.8"/>')
        ly = _MT + 16 + 18 * idx
        parts.append(f'<line x1="{_ML + 10}" y1="{ly}" x2="{_ML + 34}" y2="{ly}" '
                     f'stroke="{_COLORS[code]}" stroke-width="1.8"/>')
        parts.append(f'<text x="{_ML + 40}" y="{ly + 4}" font-size="12">'
                     f'{_escape(code)}</text>')
    parts.append("</svg>")
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(parts) + "\n")
    except OSError as exc:
        raise OutputError(f"cannot write SVG to {path}: {exc}") from exc


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;"))
