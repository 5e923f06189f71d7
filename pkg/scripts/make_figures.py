#!/usr/bin/env python3
"""
Script to regenerate the order-statistics table and figure.
"""
import sys
from pathlib import Path

from recoupler.services.analysis import c_table, gap_summary, plot_c_table, write_c_table_csv


def make_figures(max_n: int = 10000, out_dir: str = "figures"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    print(f"Building c table for n = 1..{max_n}...")
    stats = c_table(max_n)
    write_c_table_csv(stats, out / "c_table.csv")
    plot_c_table(stats, out / "c_table.png")
    (out / "c_summary.json").write_text(gap_summary(stats).model_dump_json(indent=2) + "\n")
    print(f"Wrote c_table.csv, c_table.png and c_summary.json to {out}/")


if __name__ == "__main__":
    make_figures(*(int(a) if i == 0 else a for i, a in enumerate(sys.argv[1:3])))
