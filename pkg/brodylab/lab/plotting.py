import os
import logging

import numpy as np
import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt

logger = logging.getLogger(__name__)

LOG_AXES = {'epsilon', 'eps', 'radius', 'distance'}


def plot_series(csv_path: str, png_path: str = None) -> str:
    """Plot every column of a report CSV against the first one."""
    with open(csv_path) as fh:
        header = fh.readline().strip().split(',')
    data = np.atleast_2d(np.loadtxt(csv_path, delimiter=',', skiprows=1))
    png_path = png_path or os.path.splitext(csv_path)[0] + '.png'

    fig, ax = plt.subplots(figsize=(6, 4.5))
    x = data[:, 0]
    for k, label in enumerate(header[1:], start=1):
        ax.plot(x, data[:, k], marker='o', label=label)
    if header[0] in LOG_AXES and np.all(x > 0):
        ax.set_xscale('log')
    ax.set_xlabel(header[0])
    ax.grid(True, alpha=0.3)
    ax.legend()
    ax.set_title(os.path.basename(os.path.splitext(csv_path)[0]))
    plt.tight_layout()
    fig.savefig(png_path)
    plt.close(fig)
    logger.debug(f"Saved plot to {png_path}")
    return png_path
