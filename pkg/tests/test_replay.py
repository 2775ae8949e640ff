"""Replay rendering and episode reduction from recorded telemetry."""

import json

import pytest

from cocarry.replay import load_telemetry, region_episodes, replay
from cocarry.world import Script, run_headless


def _frame(t, region, intensity):
    from cocarry.world import TelemetryFrame

    return TelemetryFrame(
        tick=int(round(t / 0.05)) * 5, time=t, base=(t, 0.0, 0.0), q=[0.0] * 9,
        ee=[0.0] * 6, hand=[0.0] * 3, alpha=1.0, force=[0.0] * 3, scan_points=[],
        obstacles=[], footprint=[[0.0, 0.0]],
        vibration={"region": region, "intensity": intensity},
        warned_distance=None, min_distance=None, collision=False,
    )


def test_region_episodes_merges_contiguous_regions():
    frames = [
        _frame(0.00, None, 0.0),
        _frame(0.05, "front", 0.2),
        _frame(0.10, "front", 0.6),
        _frame(0.15, "left", 0.3),
        _frame(0.20, None, 0.0),
        _frame(0.25, None, 0.0),
    ]
    eps = region_episodes(frames)
    named = [(r, t0, t1, peak) for r, t0, t1, peak in eps if r]
    assert named == [("front", 0.05, 0.15, 0.6), ("left", 0.15, 0.2, 0.3)]
    # episodes tile the run without gaps
    for (_, _, end, _), (_, start, _, _) in zip(eps, eps[1:]):
        assert end == start


def test_replay_artifacts(mini_block_spec, tmp_path):
    log = run_headless(
        mini_block_spec, Script([(0.0, 0.35, 0.0)]), out_dir=tmp_path / "run"
    )
    assert log.result == "collision"
    artifacts = replay(log.telemetry_path, tmp_path / "plots")
    for key in ("path_plot", "timeseries_plot", "episodes"):
        path = tmp_path / "plots" / json.loads(json.dumps(artifacts))[key].rsplit("/", 1)[-1]
        assert path.exists() and path.stat().st_size > 0

    episodes = json.loads((tmp_path / "plots" / "episodes.json").read_text())
    direct = region_episodes(load_telemetry(log.telemetry_path))
    assert len(episodes) == len(direct)
    for got, (region, t0, t1, peak) in zip(episodes, direct):
        assert got["region"] == region
        assert got["peak"] == pytest.approx(peak, abs=1e-4)
    # driving into the block must end on an intense front warning
    last = [e for e in episodes if e["region"]][-1]
    assert last["region"] == "front"
    assert last["peak"] == pytest.approx(1.0)


def test_load_telemetry_rejects_empty(tmp_path):
    empty = tmp_path / "telemetry.jsonl"
    empty.write_text("\n")
    with pytest.raises(ValueError, match="empty"):
        load_telemetry(empty)
