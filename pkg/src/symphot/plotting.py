"""File-based figure rendering for sweep results.

Imported lazily by the CLI so headless installs only pay for matplotlib
when a figure is actually requested.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np

from .experiments import HomResult


def render_hom_figure(result: HomResult, out_path: str) -> None:
    """Render the coincidence surface (or slice) to an image file."""
    dtaus = np.asarray(result.config.dtau_values)
    domegas = np.asarray(result.config.domega_values)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        if dtaus.size > 1 and domegas.size > 1:
            mesh = ax.pcolormesh(domegas, dtaus, result.p_coinc,
                                 shading="nearest", vmin=0.0, vmax=0.5,
                                 cmap="viridis")
            fig.colorbar(mesh, ax=ax, label="coincidence probability")
            ax.set_xlabel("carrier detuning")
            ax.set_ylabel("arrival-time delay")
        else:
            if domegas.size > 1:
                xs, ys = domegas, result.p_coinc[0, :]
                ana = result.analytic_coincidence()[0, :]
                ax.set_xlabel("carrier detuning")
            else:
                xs, ys = dtaus, result.p_coinc[:, 0]
                ana = result.analytic_coincidence()[:, 0]
                ax.set_xlabel("arrival-time delay")
            ax.plot(xs, ys, "o", ms=3, label="simulated")
            ax.plot(xs, ana, "-", lw=1, label="analytic (1 - |overlap|^2)/2")
            ax.set_ylabel("coincidence probability")
            ax.set_ylim(-0.02, 0.52)
            ax.legend()
        ax.set_title("two-photon coincidence dip")
        fig.savefig(out_path, dpi=150, bbox_inches="tight")
    finally:
        plt.close(fig)
