"""Matplotlib figures rendered alongside the CSV output of each scenario."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .effective import BASIS_LABELS  # noqa: E402

_STATE_TEX = {"00": r"$|00\rangle$", "S": r"$|S\rangle$",
              "T": r"$|T\rangle$", "11": r"$|11\rangle$"}


def _fig_path(out_path, suffix=""):
    stem, dot, _ = out_path.rpartition(".")
    base = stem if dot else out_path
    return f"{base}{suffix}.png"


def render(scenario, data, out_path):
    """Dispatch on the scenario name; writes PNG(s) next to the CSV."""
    if scenario == "simulate":
        _populations(data["times"], data["populations"], _fig_path(out_path))
    elif scenario == "effective-vs-full":
        _comparison(data["times"], data["full"], data["eff"], _fig_path(out_path))
    elif scenario == "scaling":
        _scaling(data["result"], _fig_path(out_path))
    elif scenario == "robustness":
        for axes, (fracs, grid, csv_path) in data.items():
            _heatmap(fracs, grid, axes, _fig_path(csv_path))


def _populations(times, pops, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    for label in BASIS_LABELS:
        if label in pops:
            ax.plot(times, pops[label], label=_STATE_TEX[label])
    ax.set_xlabel(r"$gt$")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _comparison(times, full, eff, path):
    fig, (ax, axd) = plt.subplots(
        2, 1, figsize=(6, 5), sharex=True,
        gridspec_kw={"height_ratios": [3, 1]},
    )
    ax.plot(times, full, label="full model")
    ax.plot(times, eff, "--", label="effective model")
    ax.set_ylabel(r"$P_S$")
    ax.legend()
    axd.plot(times, abs(full - eff), color="k")
    axd.set_xlabel(r"$gt$")
    axd.set_ylabel(r"$|\Delta P_S|$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _scaling(result, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(result.C_values, result.infidelities, "o", label="steady state")
    fit = [result.fit_prefactor / c for c in result.C_values]
    ax.loglog(result.C_values, fit,
              label=f"{result.fit_prefactor:.2f}/C")
    ax.set_xlabel("C")
    ax.set_ylabel(r"$1-F$")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _heatmap(fracs, grid, axes, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    extent = [100 * fracs[0], 100 * fracs[-1], 100 * fracs[0], 100 * fracs[-1]]
    im = ax.imshow(grid.T, origin="lower", extent=extent, aspect="auto")
    ax.set_xlabel(f"{axes[0]} fluctuation (%)")
    ax.set_ylabel(f"{axes[1]} fluctuation (%)")
    fig.colorbar(im, ax=ax, label=r"$F_S$")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
