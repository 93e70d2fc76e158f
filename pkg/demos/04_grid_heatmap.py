"""Receiver-grid sweep with SVG heatmaps and an error CDF.

Writes to demos_out/ in the current directory."""

import os

from chirpranging import ExperimentConfig, RoomSpec, run_grid_sweep
from chirpranging.experiments import DESK_GRID
from chirpranging.plots import cdf_svg, heatmap_svg

out = "demos_out"
os.makedirs(out, exist_ok=True)
cfg = ExperimentConfig(room=RoomSpec(absorption=0.3), receivers=DESK_GRID, snr_db=3.0,
                       master_seed=1, workers=2)
res = run_grid_sweep(cfg)
for label, st in res.stats.items():
    print(f"{label:22s} mean {st.mean:.3f}  P50 {st.p50:.3f}  P95 {st.p95:.3f}")
    heatmap_svg(res.heatmaps[label], os.path.join(out, f"heatmap_{label}.svg"), label,
                DESK_GRID.margin, DESK_GRID.margin, DESK_GRID.spacing)
curves = {}
for r in res.records:
    curves.setdefault(r.estimator, []).append(r.abs_error)
cdf_svg(curves, os.path.join(out, "cdf.svg"), "alpha 0.3, 3 dB")
print(f"SVGs written to {out}/")
