"""
Analytics for embedding runs: histogram comparisons, convergence curves and
benchmark summaries, rendered with Plotly.
"""
from pathlib import Path
from typing import Dict, Mapping, Union

import numpy as np
import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from src.errors import InputError
from src.image_store import RasterImage
from src.logger_config import get_logger
from src.optimizer_core import OptimizationResult
from src.quality_metrics import CHANNEL_NAMES, channel_histograms

logger = get_logger("analytics")

CHANNEL_COLORS = {"red": "rgba(214, 39, 40, 0.55)", "green": "rgba(44, 160, 44, 0.55)", "blue": "rgba(31, 119, 180, 0.55)"}
SUMMARY_COLUMNS = ["best_fitness", "iterations_run", "evaluations", "psnr", "ssim"]


def _empty_figure(title: str, message: str) -> go.Figure:
    fig = go.Figure()
    fig.add_annotation(
        text=message,
        xref="paper", yref="paper",
        x=0.5, y=0.5, xanchor='center', yanchor='middle',
        showarrow=False, font=dict(size=16)
    )
    fig.update_layout(title=title, height=400)
    return fig


def histogram_figure(cover: RasterImage, stego: RasterImage) -> go.Figure:
    """Cover vs stego 256-bin histograms, one row per channel, plus the bin-wise difference."""
    cover_counts = channel_histograms(cover)
    stego_counts = channel_histograms(stego)
    bins = np.arange(256)

    fig = make_subplots(
        rows=3, cols=2,
        column_widths=[0.7, 0.3],
        subplot_titles=[
            title
            for name in CHANNEL_NAMES
            for title in (f"{name.capitalize()} channel histogram", f"{name.capitalize()} stego - cover")
        ],
    )

    for row, name in enumerate(CHANNEL_NAMES, start=1):
        channel = row - 1
        fig.add_trace(
            go.Scatter(
                x=bins, y=cover_counts[channel],
                mode='lines', name=f'{name} cover',
                line=dict(color='rgba(60, 60, 60, 0.8)', width=1),
                hovertemplate='<b>Value %{x}</b><br>Cover count: %{y}<extra></extra>'
            ),
            row=row, col=1
        )
        fig.add_trace(
            go.Scatter(
                x=bins, y=stego_counts[channel],
                mode='lines', name=f'{name} stego',
                line=dict(color=CHANNEL_COLORS[name], width=2, dash='dot'),
                hovertemplate='<b>Value %{x}</b><br>Stego count: %{y}<extra></extra>'
            ),
            row=row, col=1
        )
        fig.add_trace(
            go.Bar(
                x=bins, y=stego_counts[channel] - cover_counts[channel],
                name=f'{name} difference',
                marker_color=CHANNEL_COLORS[name],
                hovertemplate='<b>Value %{x}</b><br>Difference: %{y}<extra></extra>'
            ),
            row=row, col=2
        )
        fig.update_xaxes(title_text="Intensity", row=row, col=1)
        fig.update_yaxes(title_text="Pixels", row=row, col=1)

    fig.update_layout(
        title_text=f"Histogram comparison ({cover.width}x{cover.height})",
        title_x=0.5,
        height=900,
        showlegend=False,
        plot_bgcolor='rgba(240,240,240,0.3)'
    )
    fig.update_xaxes(showgrid=True, gridwidth=1, gridcolor='rgba(0,0,0,0.1)')
    fig.update_yaxes(showgrid=True, gridwidth=1, gridcolor='rgba(0,0,0,0.1)')
    return fig


def convergence_figure(results: Mapping[str, OptimizationResult]) -> go.Figure:
    """Best-so-far fitness per iteration, one line per labelled run."""
    if not results:
        return _empty_figure("Convergence", "No optimization runs to plot")

    fig = go.Figure()
    for label, result in results.items():
        frame = result.history_frame()
        fig.add_trace(
            go.Scatter(
                x=frame['iteration'],
                y=frame['best_fitness'],
                mode='lines',
                name=label,
                customdata=frame['evaluations'],
                hovertemplate='<b>%{fullData.name}</b><br>Iteration %{x}<br>Best: %{y:.6f}<br>Evaluations: %{customdata}<extra></extra>'
            )
        )

    fig.update_layout(
        title_text="Best-so-far fitness",
        title_x=0.5,
        height=500,
        hovermode='x unified',
        plot_bgcolor='rgba(240,240,240,0.3)'
    )
    fig.update_xaxes(title_text="Iteration", showgrid=True, gridcolor='rgba(0,0,0,0.1)')
    fig.update_yaxes(title_text="Fitness Z", showgrid=True, gridcolor='rgba(0,0,0,0.1)')
    return fig


def summarize_bench(frame: pd.DataFrame) -> pd.DataFrame:
    """Per-optimizer medians of the benchmark metrics (plus the run count)."""
    if frame.empty:
        return pd.DataFrame(columns=["optimizer", "runs", *SUMMARY_COLUMNS])

    numeric = frame[["optimizer", *SUMMARY_COLUMNS]].copy()
    numeric["psnr"] = pd.to_numeric(numeric["psnr"], errors='coerce')
    grouped = numeric.groupby("optimizer", sort=True)
    summary = grouped[SUMMARY_COLUMNS].median()
    summary.insert(0, "runs", grouped.size())
    return summary.reset_index()


def write_figure(fig: go.Figure, path: Union[str, Path]) -> None:
    """Standalone HTML; plotly.js is loaded from the CDN."""
    path = Path(path)
    try:
        fig.write_html(str(path), include_plotlyjs='cdn', full_html=True)
    except OSError as e:
        raise InputError(f"{path}: cannot write figure: {e.strerror or e}") from e
    logger.info(f"Wrote figure {path}")


def bench_convergence_runs(results: Dict[tuple, OptimizationResult]) -> Dict[str, OptimizationResult]:
    """Label (cover, optimizer, seed) keyed runs as 'cover/optimizer/seed' in sorted order."""
    return {f"{cover}/{optimizer}/{seed}": results[(cover, optimizer, seed)] for cover, optimizer, seed in sorted(results)}
