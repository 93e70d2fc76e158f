"""Prominence-factor sweep at two SNRs and the near-optimal PPF band."""

from chirpranging import ExperimentConfig, GridSpec, RoomSpec, run_ppf_sweep

cfg = ExperimentConfig(room=RoomSpec(absorption=0.3), receivers=GridSpec(8, 5, 0.4, 0.2, 1.0),
                       master_seed=1)
res = run_ppf_sweep(cfg, [10, 25, 35, 50, 65, 80], [3.0, 20.0])
for snr in (3.0, 20.0):
    row = "  ".join(f"{p:g}:{res.stats[snr][p].p95:.2f}" for p in res.ppf_values)
    print(f"SNR {snr:4.1f} dB  P95 by PPF  {row}")
    print(f"  optimum {res.optimum[snr]:g}, near-optimal band {res.bands[snr]}")
