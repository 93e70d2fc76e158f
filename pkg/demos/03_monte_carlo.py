"""Monte Carlo at the 1.553 m receiver: bias and spread versus SNR."""

from chirpranging import ExperimentConfig, RoomSpec, run_monte_carlo
from chirpranging.estimators import MAXIMUM, PROMINENCE
from chirpranging.experiments import flagship_receiver

room = RoomSpec(absorption=0.9)
src = room.default_source()
for snr in (20.0, 10.0, 0.0, -10.0):
    cfg = ExperimentConfig(room=room, receivers=[flagship_receiver(src)], snr_db=snr,
                           estimators=(MAXIMUM, PROMINENCE), trials=300, master_seed=0)
    res = run_monte_carlo(cfg)
    for label, st in res.stats.items():
        print(f"SNR {snr:6.1f} dB  {label:14s} eps {st.epsilon:+.4f} m  sigma {st.sigma:.4f} m"
              f"  P95 {st.p95:.4f} m")
