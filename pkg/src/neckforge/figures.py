"""Optional PNG rendering of report tables (``--figures``)."""
from __future__ import annotations

from pathlib import Path

# (suite, table, x column, y columns, log axes)
PLOTS = (
    ("obstruction", "uhat", "s", ("uhat",), False),
    ("obstruction", "vhat", "s", ("vhat",), False),
    ("potentials", "horn_profile", "t", ("dpsi",), False),
    ("glue", "defect_profile", "t", ("f_rad",), False),
    ("toy", "toy_sweep", "s", ("lambda",), False),
    ("limitode", "coefficient_errors", "b", ("error",), True),
)


def render(results, out_dir: Path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_suite = {r.suite: r for r in results}
    for suite, table, xcol, ycols, logs in PLOTS:
        res = by_suite.get(suite)
        if res is None or table not in res.tables:
            continue
        header, rows = res.tables[table]
        ix = header.index(xcol)
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for yc in ycols:
            iy = header.index(yc)
            ax.plot([r[ix] for r in rows], [r[iy] for r in rows], ".-", ms=2, label=yc)
        if logs:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xcol)
        ax.legend()
        ax.set_title(f"{suite}: {table}")
        fig.tight_layout()
        fig.savefig(out_dir / f"{suite}_{table}.png", dpi=120)
        plt.close(fig)
