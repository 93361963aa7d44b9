"""Render sweep results to an image file.

matplotlib is imported lazily and forced onto the Agg backend so the CLI
works on headless machines and importing the package never pulls in a GUI
toolkit.
"""

from __future__ import annotations

from .errors import ContractError
from .harness import SweepRow


def render_sweep_plot(rows: list[SweepRow], path: str) -> None:
    """Fidelity and success probability against the light-shift ratio."""
    if not rows:
        raise ContractError("nothing to plot, the sweep produced no rows")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ratios = [r.chi_ratio for r in rows]
    fids = [r.fidelity if r.fidelity is not None else float("nan") for r in rows]
    probs = [r.success_prob for r in rows]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogx(ratios, fids, "o-", color="tab:blue", label="fidelity")
    ax.set_xlabel("light-shift ratio")
    ax.set_ylabel("fidelity", color="tab:blue")
    ax.grid(True, which="both", alpha=0.3)
    ax2 = ax.twinx()
    ax2.semilogx(ratios, probs, "s--", color="tab:orange", label="success probability")
    ax2.set_ylabel("success probability", color="tab:orange")
    first = rows[0]
    ax.set_title(f"{first.target}, dim {first.n_dim}, {first.mode.value} mode")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
