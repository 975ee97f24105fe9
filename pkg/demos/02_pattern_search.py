# Which flicker order should each up-sample factor use?
#
# Every pattern is scored on an ensemble of random tones; the error profile
# against frequency shows where each N stops helping. The band table at the
# end picks the best (N, pattern) per band.

import matplotlib.pyplot as plt
import numpy as np

from flickertsr import analysis
from flickertsr.analysis import APPENDIX_PATTERNS, CHOSEN_PATTERNS, EnsembleSpec
from flickertsr.sensor import CameraConfig

fps = 10.0
spec = EnsembleSpec(n_trials=400, freq_range_hz=(5.0, 30.0), seed=1)

# the pattern space grows quickly: full-rank 4x3 patterns without a dark sub-step
print("N=4 candidates:", len(analysis.pattern_matrices(4, 3)))
print("N=5 candidates:", len(analysis.pattern_matrices(5, 3)))

profiles = []
for n, pats in sorted(APPENDIX_PATTERNS.items()):
    for p in pats:
        if not p.full_rank:
            print(f"{p.pattern_id}: skipped, channels are linearly dependent")
            continue
        profiles.append(analysis.evaluate_pattern(p, spec, CameraConfig(fps, n)))
profiles.append(analysis.evaluate_pattern(CHOSEN_PATTERNS[3], spec, CameraConfig(fps, 3)))
base = analysis.evaluate_baseline(spec, fps)

for w in analysis.band_winner_table(profiles, fps):
    print(f"{w.f_lo:4.0f}-{w.f_hi:<4.0f} Hz  N={w.n_factor}  {w.pattern_id:<12} mean L2 {w.error:.3f}")

centres = [0.5 * (lo + hi) for lo, hi in spec.bins()]
plt.figure(figsize=(8, 4))
for pr in profiles:
    plt.plot(centres, pr.mean_l2, lw=1, label=pr.pattern_id)
plt.plot(centres, base.mean_l2, "k--", label="plain camera")
plt.xlabel("tone frequency [Hz]")
plt.ylabel("mean L2 error")
plt.legend(fontsize=6, ncol=2)
plt.tight_layout()
plt.savefig("pattern_search.png", dpi=100)

# random pattern per frame, for comparison
rnd = analysis.evaluate_pattern(CHOSEN_PATTERNS[4], EnsembleSpec(400, (5.0, 20.0)), CameraConfig(fps, 4),
                                "random_per_frame")
b20 = analysis.evaluate_baseline(EnsembleSpec(400, (5.0, 20.0)), fps)
print("random-per-frame / plain camera, 5-20 Hz:",
      round(analysis.band_error(rnd, 5, 20) / analysis.band_error(b20, 5, 20), 3))
