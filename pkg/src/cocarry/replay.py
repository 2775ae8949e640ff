"""Render recorded runs: warned-region colored paths and time-series plots."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

from .world import TelemetryFrame

REGION_COLORS = {
    None: "0.6",
    "front": "tab:red",
    "right": "tab:orange",
    "back": "tab:purple",
    "left": "tab:blue",
}


def load_telemetry(path: str | Path) -> list[TelemetryFrame]:
    frames = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                frames.append(TelemetryFrame.from_json(line))
    if not frames:
        raise ValueError(f"telemetry log {path} is empty")
    return frames


def region_episodes(frames: list[TelemetryFrame]) -> list[tuple[str | None, float, float, float]]:
    """Contiguous same-region intervals: (region, t_start, t_end, max_intensity)."""
    episodes = []
    cur = None
    t0 = frames[0].time
    peak = 0.0
    for fr in frames:
        region = fr.vibration.get("region")
        if region != cur:
            if cur is not None or peak > 0:
                episodes.append((cur, t0, fr.time, peak))
            cur, t0, peak = region, fr.time, 0.0
        peak = max(peak, fr.vibration.get("intensity", 0.0))
    episodes.append((cur, t0, frames[-1].time, peak))
    return episodes


def render_path_plot(frames: list[TelemetryFrame], out_path: Path) -> None:
    """Base path colored by warned region, line thickness scaled by intensity."""
    fig, ax = plt.subplots(figsize=(8, 5))
    xs = np.array([fr.base[0] for fr in frames])
    ys = np.array([fr.base[1] for fr in frames])
    segs, colors, widths = [], [], []
    for i in range(len(frames) - 1):
        segs.append([(xs[i], ys[i]), (xs[i + 1], ys[i + 1])])
        vib = frames[i].vibration
        colors.append(REGION_COLORS.get(vib.get("region"), "0.6"))
        widths.append(0.8 + 5.0 * vib.get("intensity", 0.0))
    ax.add_collection(LineCollection(segs, colors=colors, linewidths=widths))

    last = frames[-1]
    for poly in last.obstacles:
        arr = np.array(poly + poly[:1])
        ax.plot(arr[:, 0], arr[:, 1], "k-", lw=0.7, alpha=0.6)
    fp = np.array(last.footprint)
    ax.plot(fp[:, 0], fp[:, 1], ".", color="tab:green", ms=3)
    handles = [
        plt.Line2D([], [], color=c, lw=2, label=r if r else "no warning")
        for r, c in REGION_COLORS.items()
    ]
    ax.legend(handles=handles, fontsize=8, loc="upper left")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_aspect("equal")
    ax.autoscale()
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def render_timeseries_plot(frames: list[TelemetryFrame], out_path: Path) -> None:
    """Base position, vibration region/intensity and warned vs closest distance."""
    t = np.array([fr.time for fr in frames])
    fig, axes = plt.subplots(3, 1, figsize=(8, 8), sharex=True)

    axes[0].plot(t, [fr.base[0] for fr in frames], label="x")
    axes[0].plot(t, [fr.base[1] for fr in frames], label="y")
    axes[0].set_ylabel("base position [m]")
    axes[0].legend(fontsize=8)

    intensity = np.array([fr.vibration.get("intensity", 0.0) for fr in frames])
    regions = [fr.vibration.get("region") for fr in frames]
    for region, color in REGION_COLORS.items():
        if region is None:
            continue
        mask = np.array([r == region for r in regions])
        axes[1].fill_between(t, 0, np.where(mask, intensity, 0.0),
                             step="post", color=color, alpha=0.8, label=region)
    axes[1].set_ylabel("vibration intensity")
    axes[1].set_ylim(0, 1.05)
    axes[1].legend(fontsize=8)

    warned = np.array([np.nan if fr.warned_distance is None else fr.warned_distance
                       for fr in frames])
    closest = np.array([np.nan if fr.min_distance is None else fr.min_distance
                        for fr in frames])
    axes[2].plot(t, warned, label="warned obstacle")
    axes[2].plot(t, closest, "--", label="closest obstacle")
    hold = ~np.isnan(warned) & ~np.isnan(closest) & (warned > closest + 1e-9)
    axes[2].fill_between(t, 0, np.where(hold, np.nanmax(closest[~np.isnan(closest)],
                                                        initial=1.0), 0.0),
                         step="post", color="tab:green", alpha=0.2,
                         label="switch prevented")
    axes[2].set_ylabel("min distance [m]")
    axes[2].set_xlabel("time [s]")
    axes[2].legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=130)
    plt.close(fig)


def replay(log_path: str | Path, out_dir: str | Path) -> dict:
    """Render both figures from a telemetry log; returns the artifact paths."""
    frames = load_telemetry(log_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path_png = out / "path.png"
    series_png = out / "timeseries.png"
    render_path_plot(frames, path_png)
    render_timeseries_plot(frames, series_png)
    episodes = region_episodes(frames)
    (out / "episodes.json").write_text(json.dumps(
        [{"region": r, "t0": round(a, 3), "t1": round(b, 3), "peak": round(p, 4)}
         for r, a, b, p in episodes], indent=2) + "\n")
    return {"path_plot": str(path_png), "timeseries_plot": str(series_png),
            "episodes": str(out / "episodes.json")}
