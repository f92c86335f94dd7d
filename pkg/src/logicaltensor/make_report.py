'''
Multi-page PDF reports: a text page and a chart per verification run,
merged and stamped with a run footer.
'''
import logging
import tempfile
from io import BytesIO
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from pypdf import PageObject, PdfReader, PdfWriter
from reportlab.pdfgen import canvas

from . import __version__
from .config import EQ_TOL, format_number
from .harness.report import SuiteReport
from .utils.build_text_section import build_text_section
from .utils.plot_deviation import plot_deviation

logger = logging.getLogger(__name__)

FOOTER_FONT = ('Helvetica', 8)
FOOTER_Y = 20  # pt above the bottom edge
FOOTER_MARGIN = 40


def run_footer(reports: Sequence[SuiteReport]) -> str:
    '''
    One-line description of a run: suites with their verdicts, universe
    sizes and seed.

    >>> run_footer([])
    'no suites'
    '''
    if not reports:
        return 'no suites'
    parts = []
    for r in reports:
        u = r.universe
        verdict = 'pass' if r.passed else 'FAIL'
        parts.append(f'{r.suite} {verdict} ({len(u.vertices)} vertices, {len(u.states)} states)')
    seeds = sorted({r.seed for r in reports})
    return '; '.join(parts) + f' | seed {", ".join(map(str, seeds))}'


def footer_overlay(width: float, height: float, left: str, right: str) -> PageObject:
    buf = BytesIO()
    can = canvas.Canvas(buf, pagesize=(width, height))
    can.setFont(*FOOTER_FONT)
    can.drawString(FOOTER_MARGIN, FOOTER_Y, left)
    can.drawRightString(width - FOOTER_MARGIN, FOOTER_Y, right)
    can.save()
    buf.seek(0)
    return PdfReader(buf).pages[0]


def merge_pdfs(pdf_paths: Iterable[Path], out_pdf: Path, footer: str = '',
               title: Optional[str] = None) -> None:
    '''
    Concatenate ``pdf_paths`` into ``out_pdf``.

    Every page gets ``footer`` on the left and "i / total" on the right;
    ``title`` and ``footer`` also go into the document metadata.
    '''
    pages: List[PageObject] = []
    for path in pdf_paths:
        pages.extend(PdfReader(path).pages)

    writer = PdfWriter()
    total = len(pages)
    for i, page in enumerate(pages, start=1):
        box = page.mediabox
        page.merge_page(footer_overlay(float(box.width), float(box.height), footer, f'{i} / {total}'))
        writer.add_page(page)
    writer.add_metadata({'/Title': title or out_pdf.stem, '/Subject': footer,
                         '/Producer': f'logicaltensor {__version__}'})

    out_pdf.parent.mkdir(parents=True, exist_ok=True)
    with out_pdf.open('wb') as f:
        writer.write(f)


def make_verification_pdf(reports: Sequence[SuiteReport], out_pdf: Path,
                          tol: float = EQ_TOL) -> Path:
    '''
    Write the PDF form of a ``verify`` run: the per-law tables, then the
    deviation chart. Pages carry the run footer of :func:`run_footer`.

    Returns
    -------
    Path
        ``out_pdf``.
    '''
    footer = run_footer(reports)
    with tempfile.TemporaryDirectory() as tmp:
        tmp_dir = Path(tmp)
        pdfs = [tmp_dir / 'text_section.pdf', tmp_dir / 'plot_deviation.pdf']
        build_text_section(reports, pdfs[0])
        plot_deviation(reports, pdfs[1], tol)
        merge_pdfs(pdfs, out_pdf, footer=footer,
                   title=f'verification report (tol {format_number(tol)})')
    logger.info('verification report written to %s', out_pdf)
    return out_pdf
