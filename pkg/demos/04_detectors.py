"""
Detectors: formant changes, glottal openings and closures
=========================================================

The sequential detector merges 16 ms segments until the merged record is
nonstationary.  The glottal detectors slide a 50-sample window through each
pitch period.
"""

import numpy as np

from tvarglrt import (
    DetectorConfig,
    ImpulseTrain,
    WhiteNoise,
    detect_formant_changes,
    detect_gci_periodic,
    detect_goi,
    detect_goi_wmg,
    formant_speech,
    glottal_cycle_train,
)

fs = 16000

# a vowel whose formants jump at sample 4000
n = 8000
f1 = np.where(np.arange(n) < 4000, 730.0, 300.0)
f2 = np.where(np.arange(n) < 4000, 1090.0, 2300.0)
x = formant_speech([(f1, 90), (f2, 110)], WhiteNoise(), fs, n, seed=0)
ch = detect_formant_changes(x, DetectorConfig.formant())
# The segment holding the change triggers, and after the reset the new
# accumulation still straddles sample 4000, so a second marker follows.
# About 30 boundaries are tested at 1% CFAR: other seeds show a stray marker.
print("formant change markers (samples):", ch.marker_indices)

# glottal openings in a synthetic train with known closures
tr = glottal_cycle_train(20, 147, 60, fs, [(730, 90), (1090, 110)], [(900, 300), (1150, 200)],
                         0.1, 0.2, seed=5, amplitude_range=(0.2, 5.0), lead_in=147,
                         pulse="impulse", open_ramp=30)
cfg = DetectorConfig.goi()
ends = np.append(tr.gci[1:], tr.signal.size)
for g1, g2, go in list(zip(tr.gci, ends, tr.goi))[:5]:
    d = detect_goi(tr.signal, g1, g2, cfg)
    # eta is tiny on this noise-free source; its threshold is a free tuning knob
    w = detect_goi_wmg(tr.signal, g1, g2, cfg, 3e-5)
    print(f"closure {g1}: true opening {go}, GLRT {d.index}, WMG {w.index}")

# closures from the window with the largest statistic in each period
P = 147
y = formant_speech([(730, 90), (1090, 110), (2440, 170)], ImpulseTrain(109, offset=P), fs, 10 * P)
y = y + 1e-3 * np.std(y) * np.random.default_rng(0).standard_normal(y.size)
truth = np.arange(P, y.size, P)
for d in detect_gci_periodic(y, DetectorConfig.gci(), P, offset=P + P // 2):
    near = truth[np.argmin(np.abs(truth - d.index))]
    print(f"estimated closure {d.index}, nearest true closure {near}, offset {d.index - near:+d}")
