"""Generic plotting script written next to the figure CSVs.

The package itself never plots; the script is documentation of how the CSVs
map to curves and needs matplotlib only when a user runs it.
"""

SCRIPT = '''\
"""Plot every figure CSV in this directory: first column d on a log axis,
remaining columns as curves. Usage: python plot_figures.py [--log-rho]"""

import csv
import glob
import os
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
log_rho = "--log-rho" in sys.argv[1:]

for path in sorted(glob.glob(os.path.join(here, "*.csv"))):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], [[float(x) for x in r] for r in rows[1:]]
    d = [r[0] for r in data]
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for j, name in enumerate(header[1:], start=1):
        ax.plot(d, [r[j] for r in data], label=name)
    ax.set_xscale("log")
    if log_rho:
        ax.set_yscale("log")
    ax.set_xlabel("d")
    ax.set_ylabel("rho")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path[:-4] + ".png", dpi=150)
    plt.close(fig)
'''
