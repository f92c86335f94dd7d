from pathlib import Path
from typing import Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.backends.backend_pdf import PdfPages

from ..harness.report import FAIL, SKIPPED, SuiteReport, reports_to_frame

# Page layout [inch].
PAGE_W_IN, PAGE_H_IN = 8.27, 11.69
LEFT, RIGHT = 2.6, 0.6
TOP, BOTTOM = 0.8, 0.9

# Deviations are drawn on a log axis; exact zeros sit at this floor.
FLOOR = 1e-18

_COLORS = {FAIL: 'tab:red', SKIPPED: 'tab:gray'}


def plot_deviation(reports: Sequence[SuiteReport], pdf_out: Path, tol: float) -> None:
    '''
    Horizontal bar chart of the largest deviation of every law, with the
    tolerance as a vertical line. Failing laws are red, skipped ones grey.
    '''
    frame = reports_to_frame(reports)
    labels = [f'{s}: {l}' for s, l in zip(frame['suite'], frame['law'])]
    values = np.maximum(frame['max_deviation'].to_numpy(dtype=float), FLOOR)
    colors = [_COLORS.get(status, 'tab:blue') for status in frame['status']]

    fig, ax = plt.subplots(figsize=(PAGE_W_IN, PAGE_H_IN))
    fig.subplots_adjust(
        left=LEFT / PAGE_W_IN, right=1 - RIGHT / PAGE_W_IN,
        top=1 - TOP / PAGE_H_IN, bottom=BOTTOM / PAGE_H_IN
    )
    y = np.arange(len(labels))
    ax.barh(y, values, color=colors)
    ax.axvline(tol, color='black', lw=0.8, ls='--', label=f'tol = {tol:g}')
    ax.set_xscale('log')
    ax.set_yticks(y)
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel('Max deviation', fontsize=9)
    ax.legend(fontsize=7, frameon=True, loc='lower right')
    ax.tick_params(labelsize=7)

    pdf_out.parent.mkdir(parents=True, exist_ok=True)
    with PdfPages(pdf_out) as pdf:
        pdf.savefig(fig, dpi=300)
    plt.close(fig)
