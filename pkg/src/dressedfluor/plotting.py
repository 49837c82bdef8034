"""Static figures: log-scale spectra and dressed-level diagrams."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_spectrum(spectrum, peaks=None, assignment=None, path=None, title=None):
    """Log-scale spectrum with the elastic line drawn as a one-bin spike.

    Peaks are annotated ``T1, T2, ...`` from the centre outwards on the
    negative-frequency side; their mirror images carry primes.
    """
    fig, ax = plt.subplots(figsize=(10, 4))
    y = spectrum.with_elastic_spike()
    ax.semilogy(spectrum.omega, np.maximum(y, y.max() * 1e-14), lw=0.8, color="k")
    if peaks is not None:
        side = sorted((p for p in peaks if p.center < -1.0), key=lambda p: -p.center)
        for k, p in enumerate(side, start=1):
            ax.annotate(f"T{k}", (p.center, p.height), textcoords="offset points", xytext=(0, 6),
                        ha="center", fontsize=7, color="tab:red")
            mirror = min(peaks, key=lambda q: abs(q.center + p.center))
            ax.annotate(f"T{k}'", (mirror.center, mirror.height), textcoords="offset points",
                        xytext=(0, 6), ha="center", fontsize=7, color="tab:blue")
    ax.set_xlabel(r"$(\omega-\omega_L)/\Gamma$")
    ax.set_ylabel(r"$S(\omega)$ (arb. units)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return fig


def _level_groups(energies, tol):
    groups = []
    for k in np.argsort(energies):
        if groups and abs(energies[k] - energies[groups[-1][-1]]) <= tol:
            groups[-1].append(int(k))
        else:
            groups.append([int(k)])
    return groups


def plot_level_diagram(diagram: dict, path=None, title=None, max_lines: int = 200):
    """Two neighbouring manifolds with allowed transitions as arrows."""
    fig, ax = plt.subplots(figsize=(6, 7))
    upper = np.asarray(diagram["manifolds"][0]["energies"])
    lower = np.asarray(diagram["manifolds"][1]["energies"])
    span = max(upper.max() - upper.min(), 1.0)
    offset = 1.6 * span  # stands in for omega_L
    colors = plt.cm.tab10(np.arange(len(diagram["blocks"])) % 10)
    for shift, levels in ((offset, upper), (0.0, lower)):
        for group in _level_groups(levels, 1e-3 * span):
            e = levels[group[0]] + shift
            ax.hlines(e, 0, 1, color="k")
            ax.text(1.02, e, ",".join(f"u{k}" for k in group), va="center", fontsize=7)
    trans = sorted(diagram["transitions"], key=lambda t: -t["amplitude"])[:max_lines]
    for i, t in enumerate(trans):
        x = 0.05 + 0.9 * i / max(1, len(trans) - 1)
        ax.annotate("", xy=(x, lower[t["lower"]]), xytext=(x, upper[t["upper"]] + offset),
                    arrowprops=dict(arrowstyle="->", lw=0.5, color=colors[t["block"]]))
    ax.set_xlim(0, 1.15)
    ax.set_xticks([])
    ax.set_ylabel(r"energy / $\Gamma$ (manifold spacing $\omega_L$ not to scale)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    if path is not None:
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return fig
