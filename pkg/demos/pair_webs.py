"""Sample the two pair webs and compare them.

Traces a time-zero slice of rescaled coalescing walks next to a Brownian
ensemble started from the same positions, prints their Hausdorff distance,
and shows how the segment-persistence functional concentrates as the
lattice refines.
"""

import argparse

import numpy as np

from pairweb import (
    EnsembleConfig,
    MetricParams,
    build_slice_web,
    hausdorff_distance,
    sample_arrow_field,
    sample_coalescing_ensemble,
)
from pairweb.experiments import _even_width, slice_s_samples


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--save", default=None)
    parser.add_argument("--delta", type=float, default=0.1)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    delta, seed = args.delta, args.seed

    width = _even_width(delta)
    height = int(np.ceil(1.0 / delta ** 2)) + 2
    field = sample_arrow_field(seed, width, height)
    web = build_slice_web(field, 0.0, delta, window=(-1.0, 1.0))
    starts = web.meta["starts"]
    print(f"slice web at delta={delta}: {len(starts)} walks, {len(web)} ordered pairs")

    cfg = EnsembleConfig(tuple((delta * int(i), 0.0) for i in starts),
                         step_h=delta ** 2, horizon=1.0, seed=seed + 1)
    reference = sample_coalescing_ensemble(cfg)
    params = MetricParams(n_max=16, grid_m=32)
    hints = np.arange(len(web))
    d = hausdorff_distance(web, reference, params, hints_ab=hints, hints_ba=hints)
    print(f"Hausdorff distance to an independent Brownian ensemble: {d:.3f}")
    print("(independent samples stay order-one apart; convergence shows up "
          "in distribution, not per seed)\n")

    print("segment-persistence samples, 40 seeds per delta:")
    for d_ in (0.1, 0.05):
        s = slice_s_samples(d_, 0.25, 40, seed, 2.0)
        finite = s[np.isfinite(s)]
        print(f"  delta={d_}: median {np.median(s):.3f}, "
              f"{np.isinf(s).mean():.0%} past the horizon")

    if args.save:
        import pathlib

        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        out = pathlib.Path(args.save)
        out.mkdir(parents=True, exist_ok=True)
        fig, axes = plt.subplots(1, 2, figsize=(9, 3.2), sharey=True)
        pos = web.meta["positions"]
        ts = delta ** 2 * np.arange(pos.shape[1])
        for row in pos:
            axes[0].plot(delta * row, ts, lw=0.7)
        axes[0].set_title("walk web")
        for p in reference.meta["paths"]:
            axes[1].plot(p.values, p.grid_times(), lw=0.7)
        axes[1].set_title("Brownian ensemble")
        for ax in axes:
            ax.set_xlabel("space")
        axes[0].set_ylabel("time")
        fig.tight_layout()
        fig.savefig(out / "webs.png", dpi=120)
        print(f"\nwrote {out / 'webs.png'}")


if __name__ == "__main__":
    main()
