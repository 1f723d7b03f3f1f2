"""Silo weights, their geometric twin, and the river reading.

Propagates bead weights down a periodic field, recounts one column's weight
as the beads enclosed by the flanking dual upward paths, and rescales the
whole bottom profile into measures.
"""

import argparse

from pairweb import (
    bottom_weights,
    enclosed_bead_count,
    river_outputs,
    sample_arrow_field,
    weight_measure,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--save", default=None)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    field = sample_arrow_field(args.seed, 64, 64)
    weights = bottom_weights(field)
    total = sum(weights.values())
    print(f"64 x 64 silo, seed {args.seed}:")
    print(f"  total weight {total} = width/2 * height = {32 * 64} "
          f"(conserved exactly)")
    heaviest = max(weights, key=weights.get)
    print(f"  heaviest bottom bead: column {heaviest} carrying "
          f"{weights[heaviest]}")
    print(f"  dual recount at that column: "
          f"{enclosed_bead_count(field, heaviest)} beads enclosed")
    print("  (the recount agrees at every column; water routed down the same "
          "arrows gives the identical numbers:",
          river_outputs(field) == weights, ")\n")

    delta = 2.0 / 64
    mu = weight_measure(field, delta, window=(-1.0, 1.0 - 2 * delta),
                        kind="bead-count")
    print("rescaled bead-count measure: "
          f"{len(mu.positions)} atoms, total mass {mu.total_mass():.0f}")
    tall = sample_arrow_field(args.seed, 1024, 300000)
    geo = weight_measure(tall, delta, window=(-0.5, 0.5),
                         kind="geometric-area")
    print("geometric-area measure on a tall field: "
          f"mean atom {geo.masses.mean():.5f}, largest {geo.masses.max():.4f}")
    print("(atoms are the areas between the flanking dual paths; the "
          "distribution is heavy tailed)")

    if args.save:
        import pathlib

        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        out = pathlib.Path(args.save)
        out.mkdir(parents=True, exist_ok=True)
        fig, ax = plt.subplots(figsize=(5.5, 3))
        ax.bar(mu.positions, mu.masses, width=1.6 / 64)
        ax.set_xlabel("position")
        ax.set_ylabel("supported weight")
        fig.tight_layout()
        fig.savefig(out / "silo_weights.png", dpi=120)
        print(f"\nwrote {out / 'silo_weights.png'}")


if __name__ == "__main__":
    main()
