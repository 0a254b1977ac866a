"""
Method comparison across a parameter grid
=========================================

The experiments module sweeps (cutoff, measurement count, noise, method)
cells: in each cell it draws one image per class, runs the full
measure-and-reconstruct pipeline, and records the Pearson correlation.
Aggregation then averages over the classes. This demo runs a small grid
with the two l1 solvers against the diffraction-limited reference and
prints the resulting table.
"""

from pathlib import Path

from speckle_cs import (
    LabeledSample,
    SweepGrid,
    aggregate,
    aggregate_to_csv,
    records_to_csv,
    run_sweep,
    synthetic_digits,
)

out = Path(__file__).parent / "output"
out.mkdir(parents=True, exist_ok=True)

images, labels = synthetic_digits(seed=5, count=60)
samples = [LabeledSample(img, int(lab)) for img, lab in zip(images, labels)]

grid = SweepGrid(
    cutoffs=(0.2, 0.5),
    measurements=(100, 300),
    noise_levels=(0.0,),
    methods=("bp", "bpdn", "diffraction"),
    seed=12,
)
print(f"{grid.cell_count} cells, {grid.record_count} records\n")

records = run_sweep(grid, samples,
                    progress=lambda done, total: print(f"  cell {done}/{total}"))
records_to_csv(records, out / "records.csv")

cells = aggregate(records)
aggregate_to_csv(cells, out / "aggregate.csv")

print(f"\n{'nu':>4} {'m':>4} {'method':>12} {'mean r':>8} {'std':>7}")
for cell in cells:
    print(f"{cell.nu:>4g} {cell.m:>4d} {cell.method:>12} "
          f"{cell.mean_r:>8.3f} {cell.std_r:>7.3f}")

print(f"\nCSV written to {out / 'records.csv'} and {out / 'aggregate.csv'}")
print("diffraction ignores m (one optical exposure is all it gets); with")
print("enough measurements at nu=0.5 the l1 solvers overtake it, because")
print("speckle intensity carries frequencies up to twice the field cutoff")
