# Scanning: one window per up-sample factor, stitched into a single spectrum.
#
# Four square waves at 12, 19, 23 and 27 Hz are watched by a 10 fps camera for
# 10 s. Each 2.5 s window uses a larger N, so each reaches 5 Hz further. The
# stitched spectrum still carries folded copies of content from the band above;
# the anti-aliasing pass mirrors each band down and subtracts it.

import matplotlib.pyplot as plt
import numpy as np

from flickertsr import scanning, signals
from flickertsr.analysis import CHOSEN_PATTERNS
from flickertsr.sensor import fine_grid_rate

fps = 10.0
seq = [3, 4, 5, 6]
tones = (12.0, 19.0, 23.0, 27.0)
rate = fine_grid_rate(max(tones), fps, seq)
x = np.sum([signals.gen_square_wave(f, 10.0, rate).samples for f in tones], axis=0)
sig = signals.FineSignal(x, rate)

windows = scanning.run_scan(sig, fps, seq, CHOSEN_PATTERNS)
for w in windows:
    print(f"window N={w.n_factor}: {w.start_s:.1f}-{w.end_s:.1f} s, reach {w.n_factor * fps / 2:.0f} Hz")

stitched = scanning.stitch(windows, fps)
cleaned = scanning.anti_alias(stitched, seq, fps)

fig, axes = plt.subplots(2, 1, figsize=(9, 5), sharex=True)
for ax, (label, sv) in zip(axes, (("stitched", stitched.combined), ("after anti-aliasing", cleaned.combined))):
    ax.plot(sv.freqs, signals.amplitudes(sv), lw=1)
    for b in stitched.bands:
        ax.axvline(b.f_hi, color="0.8", lw=0.8)
    ax.set_ylabel(label)
axes[-1].set_xlabel("frequency [Hz]")
fig.tight_layout()
fig.savefig("scanning.png", dpi=100)

amp0, amp1 = signals.amplitudes(stitched.combined), signals.amplitudes(cleaned.combined)
df = stitched.combined.df
for f in (11.0, 17.0):
    k = int(round(f / df))
    print(f"ghost at {f:g} Hz: {amp0[k]:.3f} -> {amp1[k]:.3f}")
