"""Static figures rendered from report tables (requires matplotlib)."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

from . import results


def _curves(path: Path):
    groups = defaultdict(lambda: ([], [], []))
    for r in results.read_curves(path):
        k, m, se = groups[(r["metric"], r["scope"], r["strategy"])]
        k.append(int(r["iteration"]))
        m.append(results.parse_float(r["mean"]))
        se.append(results.parse_float(r["stderr"]) if r["stderr"] else 0.0)
    return groups


def render_all(report_dir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    written = []
    for table, fname in ((results.DISCOVERY_CURVES_FILE, "discovery.png"),
                         (results.ERROR_CURVES_FILE, "errors.png")):
        groups = _curves(report_dir / table)
        panels = sorted({(metric, scope) for metric, scope, _ in groups})
        fig, axes = plt.subplots(1, len(panels), figsize=(4.5 * len(panels), 3.5), squeeze=False)
        for ax, (metric, scope) in zip(axes[0], panels):
            for (m, s, strategy), (k, mean, se) in sorted(groups.items()):
                if (m, s) != (metric, scope):
                    continue
                mean, se = np.array(mean), np.nan_to_num(np.array(se))
                ax.plot(k, mean, label=strategy)
                ax.fill_between(k, mean - se, mean + se, alpha=0.2)
            ax.set_xlabel("iteration")
            ax.set_title(metric if scope == "acquired" else f"{metric} ({scope})")
        axes[0][0].legend(fontsize="small")
        fig.tight_layout()
        path = report_dir / fname
        fig.savefig(path, dpi=100, metadata={"Software": None})
        plt.close(fig)
        written.append(path)
    return written
