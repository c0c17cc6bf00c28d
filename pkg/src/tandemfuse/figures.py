"""Figure rendering for the CLI reports.

Each report command writes its delimited output first; these helpers draw a
companion PNG from the same rows.  The CSV stays the deterministic contract;
figures are a convenience view of it.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def _column(rows, name):
    return [row[name] for row in rows]


def render_fig3(rows, path, alpha):
    fig, ax = plt.subplots(figsize=(7, 5))
    sx = _column(rows, "sigma_x")
    ax.plot(sx, _column(rows, "pd_centralized"), "k-", label="centralized")
    ax.plot(sx, _column(rows, "pd_xyx"), "b-o", ms=4, label="interactive (XYX)")
    ax.plot(sx, _column(rows, "pd_yx"), "r--s", ms=4, label="one-way (YX)")
    ax.set_xlabel(r"$\sigma_x$")
    ax.set_ylabel("detection probability")
    ax.set_title(f"Fixed-sample performance at pf = {alpha:g}")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_fig4(rows, path):
    fig, ax = plt.subplots(figsize=(7, 5))
    sx = _column(rows, "sigma_x")
    ax.plot(sx, _column(rows, "k_yx"), "r-", label="YX (final at X)")
    ax.plot(sx, _column(rows, "k_xyx"), "b--", label="XYX (final at X)")
    ax.plot(sx, _column(rows, "k_xy"), "g-", label="XY (final at Y)")
    ax.plot(sx, _column(rows, "k_yxy"), "m--", label="YXY (final at Y)")
    ax.set_xlabel(r"$\sigma_x$")
    ax.set_ylabel("KL distance (nats)")
    ax.set_title("Error exponents by communication direction")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_mif(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    n = _column(rows, "n_steps")
    ax.plot(n, _column(rows, "k_mif_max"), "b-o", label="best MIF exponent")
    ax.plot(n, _column(rows, "k_yx_max"), "r--", label="one-way exponent")
    ax.set_xlabel("interaction steps N")
    ax.set_ylabel("KL distance (nats)")
    ax.set_title("Memoryless interaction buys no exponent")
    ax.set_xticks(n)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_multisensor(rows, path):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    labels = [f"K={row['n_sensors']}" for row in rows]
    x = range(len(rows))
    width = 0.35
    ax.bar([i - width / 2 for i in x], _column(rows, "k_vecyx"), width, label="one-way (vecYX)")
    ax.bar([i + width / 2 for i in x], _column(rows, "k_xvecyx"), width, label="interactive (XvecYX)")
    ax.set_xticks(list(x), labels)
    ax.set_ylabel("KL distance (nats)")
    ax.set_title("Multi-sensor exponents")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
