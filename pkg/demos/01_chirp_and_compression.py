"""Generate the 45->25 kHz chirp, record a 1 ms snippet at 1.553 m in free
field and recover the distance by pulse compression."""

import numpy as np

from chirpranging import ChirpSpec, TimingSpec, extract_window, generate_chirp, pulse_compress
from chirpranging.estimators import MAXIMUM, estimate_distance
from chirpranging.ranging import compression_ratio, coverage, received_bandwidth

spec = ChirpSpec()
timing = TimingSpec()
chirp = generate_chirp(spec)
print(f"chirp: {len(chirp)} samples at {spec.sample_rate:.0f} Hz, bandwidth {spec.bandwidth:.0f} Hz")

d = 1.553
snippet = extract_window(chirp, timing.wake_offset - d / timing.speed_of_sound, timing.tau_rx)
snippet = snippet.with_samples(snippet.samples / (4 * np.pi * d))

corr = pulse_compress(snippet, chirp)
print(f"correlation: {len(corr.values)} lags")
print(f"received bandwidth {received_bandwidth(timing.tau_rx, spec.tau_tx, spec.bandwidth):.0f} Hz, "
      f"compression ratio {compression_ratio(timing.tau_rx, spec.tau_tx, spec.bandwidth):.3f}")
print(f"coverage: {coverage(timing)}")
est = estimate_distance(snippet, chirp, timing, MAXIMUM)
print(f"true {d} m, estimated {est:.4f} m, error {1e3 * abs(est - d):.3f} mm")
