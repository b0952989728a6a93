"""Phase-noise generators against their target spectra.

Draws one long realization from the Wiener (free-running) model and from two
piecewise-linear PLL masks, estimates each PSD, and overlays the targets.  The
same comparison, reduced to a pass/fail verdict, is available as
`losmimo psd ...` on the command line.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from losmimo.harness import psd_check
from losmimo.phasenoise import StationaryModel, WienerModel, beta_from_sigma2, builtin_mask

SAMPLES = 2**19

cases = [
    ("Wiener sigma2=1e-4", WienerModel(1e-4)),
    ("Wiener sigma2=1e-5", WienerModel(1e-5)),
    ("mask reynolds85", StationaryModel(builtin_mask("reynolds85"))),
    ("mask dancila115", StationaryModel(builtin_mask("dancila115"))),
]

fig, axes = plt.subplots(2, 2, figsize=(11, 7), sharex=True)
for ax, (label, model) in zip(axes.ravel(), cases):
    rep = psd_check(model, samples=SAMPLES, rs=7)
    word = "PASS" if rep.passed else "FAIL"
    print(f"{word}  {label}: max in-band |err| {rep.max_abs_err_db:.2f} dB over {rep.in_band.sum()} bands")
    ax.semilogx(rep.freq_hz, rep.est_db, label="estimated")
    ax.semilogx(rep.freq_hz, rep.target_db, "k--", lw=1, label="target")
    ax.semilogx(rep.freq_hz[rep.in_band], rep.est_db[rep.in_band], ".", ms=4, label="scored bands")
    if isinstance(model, WienerModel):
        beta = beta_from_sigma2(model.sigma2_delta, model.ts)
        label += f"  (beta {beta:.0f} Hz)"
    ax.set_title(label, fontsize=10)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
for ax in axes[1]:
    ax.set_xlabel("offset frequency (Hz)")
for ax in axes[:, 0]:
    ax.set_ylabel("S_theta (dBc/Hz)")
fig.suptitle("Generated phase-noise spectra vs targets")

os.makedirs("demos/out", exist_ok=True)
out = "demos/out/oscillator_spectra.png"
fig.savefig(out, dpi=130, bbox_inches="tight")
print(f"wrote {out}")
