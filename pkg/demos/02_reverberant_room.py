"""Same receiver in rooms of decreasing absorption: the four estimators
against the image-source simulation."""

import math

from chirpranging import (DEFAULT_ESTIMATORS, ChirpSpec, NoiseSpec, RoomSpec, TimingSpec,
                          generate_chirp, simulate_reception)
from chirpranging.estimators import estimate_distances

spec, timing = ChirpSpec(), TimingSpec()
template = generate_chirp(spec)
for alpha in (0.9, 0.3, 0.05):
    room = RoomSpec(absorption=alpha)
    src = room.default_source()
    rx = (1.2, 0.9, 1.0)
    d = math.dist(src, rx)
    snip = simulate_reception(spec, room, src, rx, NoiseSpec(10.0, seed=3),
                              timing.wake_offset, timing.tau_rx)
    ests = estimate_distances(snip, template, timing, DEFAULT_ESTIMATORS)
    cells = ", ".join(f"{s.label} {e - d:+.3f}" for s, e in zip(DEFAULT_ESTIMATORS, ests))
    print(f"alpha {alpha}: true {d:.3f} m; errors (m): {cells}")
