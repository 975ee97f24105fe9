# How much does ambient light hurt?
#
# alpha is flicker intensity over ambient intensity. Ambient light adds counts
# that carry no timing information, so both the reconstruction and its
# signal-to-noise ratio improve as alpha grows.

import math

import matplotlib.pyplot as plt

from flickertsr import analysis
from flickertsr.analysis import CHOSEN_PATTERNS, EnsembleSpec
from flickertsr.sensor import CameraConfig

alphas = [0.5, 1, 2, 5, 10, 50, math.inf]
spec = EnsembleSpec(n_trials=100, freq_range_hz=(5.0, 15.0), amplitude=0.5)
rows = analysis.alpha_sweep(alphas, CHOSEN_PATTERNS[3], spec, CameraConfig(10.0, 3), snr_trials=5000)

print(" alpha   SNR gain   (1+a)^1.5   (1+a)^0.5   cosine err")
for r in rows:
    half = math.sqrt(1 + r.alpha) if math.isfinite(r.alpha) else math.inf
    print(f"{r.alpha:6g}   {r.snr_ratio:8.3f}   {r.bound:9.3f}   {half:9.3f}   {r.mean_cosine:.3f}")

fin = [r for r in rows if math.isfinite(r.alpha)]
plt.figure(figsize=(6, 4))
plt.semilogx([r.alpha for r in fin], [r.snr_ratio for r in fin], "o-", label="measured")
plt.semilogx([r.alpha for r in fin], [r.bound for r in fin], "--", label="(1+alpha)^1.5")
plt.semilogx([r.alpha for r in fin], [math.sqrt(1 + r.alpha) for r in fin], ":", label="(1+alpha)^0.5")
plt.xlabel("alpha")
plt.ylabel("SNR with flicker / without")
plt.legend()
plt.tight_layout()
plt.savefig("ambient_light.png", dpi=100)
