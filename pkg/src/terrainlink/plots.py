"""Figure rendering for the CLI's ``--plot`` option.

Figures are written with the non-interactive Agg backend; the format
follows the output file's extension (png, pdf, svg).
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGSIZE = (7.0, 4.3)


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def attenuation_figure(distances_m, losses_db, model_name, path, log_x=False):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(np.asarray(distances_m) / 1000.0, losses_db, lw=1.5, label=model_name)
    if log_x:
        ax.set_xscale("log")
    ax.set_xlabel("Distance (km)")
    ax.set_ylabel("Attenuation (dB)")
    ax.set_title("Attenuation vs distance")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save(fig, path)


def link_figure(stats, path):
    """Received power, SNR and cumulative packets received against time."""
    t = np.array([r.t_s for r in stats.records])
    power = np.array([r.rx_power_dBm for r in stats.records])
    snr = np.array([r.snr_dB for r in stats.records])
    valid = np.cumsum([r.verdict.value == "Valid" for r in stats.records])

    fig, axes = plt.subplots(3, 1, figsize=(FIGSIZE[0], 7.5), sharex=True)
    axes[0].plot(t, power, ".-", ms=3)
    axes[0].set_ylabel("Received power (dBm)")
    axes[1].plot(t, snr, ".-", ms=3, color="tab:orange")
    axes[1].set_ylabel("SNR (dB)")
    axes[2].step(t, valid, where="post", color="tab:green")
    axes[2].set_ylabel("Packets received")
    axes[2].set_xlabel("Time (s)")
    for ax in axes:
        ax.grid(True, alpha=0.3)
    _save(fig, path)


def envelope_figure(trace, path):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    with np.errstate(divide="ignore"):
        ax.plot(trace.t_s, 10.0 * np.log10(trace.power_norm), lw=0.8)
    ax.set_xlabel("Time (s)")
    ax.set_ylabel("Normalized power (dB)")
    ax.set_title("Rician fading power envelope")
    ax.grid(True, alpha=0.3)
    _save(fig, path)
