from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

try:  # Plotly is optional in certain environments
    import plotly.graph_objects as go  # type: ignore[import-untyped]
    from plotly.subplots import make_subplots  # type: ignore[import-untyped]

    PLOTLY_AVAILABLE = True
except Exception:  # pragma: no cover - exercised only when plotly is absent
    go = None  # type: ignore[assignment]
    make_subplots = None  # type: ignore[assignment]
    PLOTLY_AVAILABLE = False

from .analysis import ambiguity_surface
from .signals import Signal

_PAPER = "#050c1a"
_PLOT = "#0b152c"
_TEXT = "#e2e8f0"
_GRID = "#15233f"


def _require_plotly() -> None:
    if not PLOTLY_AVAILABLE:  # pragma: no cover - triggered when plotly missing
        raise RuntimeError("Plotly is not installed; install plotly to render interactive charts.")


def _dark_layout(fig: "go.Figure", title: str, height: int) -> None:
    fig.update_layout(
        height=height,
        title=dict(text=title, x=0.01, xanchor="left", font=dict(size=20, color=_TEXT, family="Inter, sans-serif")),
        paper_bgcolor=_PAPER,
        plot_bgcolor=_PLOT,
        font=dict(family="Inter, sans-serif", color=_TEXT),
        margin=dict(l=40, r=40, t=70, b=40),
    )


def plot_ambiguity_surface(
    signal: Signal,
    other: Signal | None = None,
    *,
    bound: float | None = None,
    title: str | None = None,
) -> "go.Figure":
    """
    Heatmap of |<phi, M_w L_tau phi'>| over the time-frequency plane, with a
    profile of the largest off-origin value per time shift underneath.
    """
    _require_plotly()
    p = signal.p
    magnitudes = np.abs(ambiguity_surface(signal, other))
    off_origin = magnitudes.copy()
    if other is None:
        off_origin[0, 0] = 0.0
    profile = off_origin.max(axis=1)

    fig = make_subplots(rows=2, cols=1, row_heights=[0.75, 0.25], vertical_spacing=0.08)
    fig.add_trace(
        go.Heatmap(
            z=magnitudes,
            x=list(range(p)),
            y=list(range(p)),
            zmin=0.0,
            zmax=1.0,
            colorscale="Viridis",
            colorbar=dict(title="|m|", len=0.7, y=0.63),
            hovertemplate="tau=%{y}<br>w=%{x}<br>|m|=%{z:.4f}<extra></extra>",
            name="ambiguity",
        ),
        row=1,
        col=1,
    )
    fig.add_trace(
        go.Bar(
            x=list(range(p)),
            y=profile,
            marker=dict(color="#38bdf8"),
            name="max over w",
            hovertemplate="tau=%{x}<br>max=%{y:.4f}<extra></extra>",
        ),
        row=2,
        col=1,
    )
    if bound is not None:
        fig.add_hline(y=bound, line=dict(color="#ef4444", dash="dot"), row=2, col=1)

    label = ", ".join(f"{k}={v}" for k, v in signal.provenance.items() if not isinstance(v, (list, dict)))
    _dark_layout(fig, title or f"Ambiguity over F_{p} ({label})", 720)
    fig.update_xaxes(title_text="w", row=1, col=1, color="#9ca3c0")
    fig.update_yaxes(title_text="tau", row=1, col=1, color="#9ca3c0")
    fig.update_xaxes(title_text="tau", row=2, col=1, color="#9ca3c0")
    fig.update_yaxes(title_text="off-origin max", range=[0, 1.05], gridcolor=_GRID, row=2, col=1)
    fig.update_layout(showlegend=False)
    return fig


def plot_ber_curve(table: pd.DataFrame, *, sqrt_p: float | None = None) -> "go.Figure":
    """
    BER and minimum decode margin against the number of simultaneous users.
    """
    _require_plotly()
    if table.empty:
        raise ValueError("Cannot plot a BER curve from an empty table.")

    fig = make_subplots(specs=[[{"secondary_y": True}]])
    fig.add_trace(
        go.Scatter(
            x=table["users"],
            y=table["ber"],
            mode="lines+markers",
            line=dict(color="#0ea5e9", width=2.2),
            name="BER",
        ),
        secondary_y=False,
    )
    fig.add_trace(
        go.Scatter(
            x=table["users"],
            y=table["min_margin"],
            mode="lines+markers",
            line=dict(color="#a855f7", width=1.5, dash="dot"),
            name="min margin",
        ),
        secondary_y=True,
    )
    if sqrt_p is not None:
        fig.add_vline(x=sqrt_p, line=dict(color="#f97316", dash="dash"))
    fig.update_layout(
        height=420,
        title="CDMA bit-error rate",
        xaxis_title="Users",
        template="plotly_white",
        margin=dict(l=20, r=20, t=60, b=40),
    )
    fig.update_yaxes(title_text="BER", secondary_y=False)
    fig.update_yaxes(title_text="margin", secondary_y=True)
    return fig


def write_html(fig: "go.Figure", path: str | Path) -> Path:
    target = Path(path).expanduser()
    target.parent.mkdir(parents=True, exist_ok=True)
    fig.write_html(str(target), include_plotlyjs="cdn")
    return target
