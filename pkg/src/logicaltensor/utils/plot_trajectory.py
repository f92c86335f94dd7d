from pathlib import Path
from typing import Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.backends.backend_pdf import PdfPages

from ..dynamics_examples import LineConfig, occupation_profile, particle_number
from ..state_algebra import Ket

# Applied only inside plot_trajectory.
TRAJECTORY_STYLE = {
    'axes.linewidth': 0.6,
    'axes.grid': False,
    'image.cmap': 'viridis',
    'xtick.direction': 'out',
    'ytick.direction': 'out',
    'xtick.labelsize': 7,
    'ytick.labelsize': 7,
    'axes.labelsize': 9,
    'legend.fontsize': 7,
}

# Page layout [inch].
PAGE_W_IN, PAGE_H_IN = 8.27, 11.69
LEFT, RIGHT = 1.2, 1.2
TOP, BOTTOM = 1.2, 4.5
VSPACE = 0.35


def trajectory_profiles(trajectory: Sequence[Ket], line: LineConfig) -> np.ndarray:
    '''(steps + 1, n) array of expected movers per vertex.'''
    return np.array([occupation_profile(psi, line) for psi in trajectory])


def mean_particle_number(psi: Ket) -> float:
    return float(sum(abs(a) ** 2 * particle_number(g) for g, a in psi.items()))


def plot_trajectory(trajectory: Sequence[Ket], line: LineConfig, pdf_out: Path,
                    title: str = '') -> None:
    '''
    Occupation of every vertex over time, as a heat map, with the norm and
    the mean particle number below it.

    Parameters
    ----------
    trajectory : Sequence[Ket]
        States ψ_0, ψ_1, ... of one evolution.
    line : LineConfig
        Line the states live on.
    pdf_out : Path
        Output PDF path.
    '''
    profiles = trajectory_profiles(trajectory, line)
    steps = np.arange(len(trajectory))
    metadata = {'Title': title or 'trajectory',
                'Subject': f'{line.length}-vertex line, {len(trajectory) - 1} steps'}

    with plt.rc_context(TRAJECTORY_STYLE):
        fig, axes = plt.subplots(2, 1, figsize=(PAGE_W_IN, PAGE_H_IN),
                                 gridspec_kw={'height_ratios': [3, 1]})
        fig.subplots_adjust(
            left=LEFT / PAGE_W_IN, right=1 - RIGHT / PAGE_W_IN,
            top=1 - TOP / PAGE_H_IN, bottom=BOTTOM / PAGE_H_IN,
            hspace=VSPACE
        )

        ax = axes[0]
        image = ax.imshow(profiles, aspect='auto', origin='lower',
                          extent=(-0.5, line.length - 0.5, -0.5, len(trajectory) - 0.5))
        ax.set_xticks(range(line.length))
        ax.set_xticklabels(line.vertices)
        ax.set_xlabel('Vertex')
        ax.set_ylabel('Step')
        fig.colorbar(image, ax=ax, label='Expected movers')
        if title:
            ax.set_title(title, fontsize=10)

        ax = axes[1]
        ax.plot(steps, [psi.norm() for psi in trajectory], lw=0.8, label='norm')
        ax.plot(steps, [mean_particle_number(psi) for psi in trajectory], lw=0.8, label='movers')
        ax.set_xlabel('Step')
        ax.grid(True, linestyle=':', linewidth=0.4)
        ax.legend(frameon=True)

        pdf_out.parent.mkdir(parents=True, exist_ok=True)
        with PdfPages(pdf_out, metadata=metadata) as pdf:
            pdf.savefig(fig, dpi=300)
    plt.close(fig)
