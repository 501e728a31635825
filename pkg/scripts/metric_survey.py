"""Survey the truncation metric r and the energy metric |dE| over state sets.

For each model the pairwise table is written to ``<out>/<model>/metrics.csv``
and the axiom check results are printed.
"""

import argparse
from pathlib import Path

from bundlemps.experiments import SpectrumCache, run_metrics
from bundlemps.io import atomic_write
from bundlemps.models import ModelSpec

SURVEYS = [
    (ModelSpec("tfim", 12, transverse_field=0.01), (1, 2, 3, 29, 30, 4096), 6),
    (ModelSpec("tfim", 12, transverse_field=1.0), (1, 2, 3, 29, 30, 4096), 6),
    (ModelSpec("xxz", 12, anisotropy=1.0), (1, 2, 11, 2048, 4096), None),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("out/metrics"))
    args = parser.parse_args()

    cache = SpectrumCache()
    for model, states, m in SURVEYS:
        result = run_metrics(cache.get(model), states, m=m)
        atomic_write(args.out / model.key() / "metrics.csv", result.table_csv())
        atomic_write(args.out / model.key() / "report.txt", result.report_text())
        line = f"{model.key()}: {len(result.rows)} pairs, m={result.m}"
        for title, rep in (("r", result.r_report), ("|dE|", result.energy_report)):
            line += f", {title} violations {len(rep.violations)}"
        print(line)


if __name__ == "__main__":
    main()
