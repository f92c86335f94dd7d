import datetime
from pathlib import Path
from typing import List, Sequence, cast

from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.platypus import Paragraph, Preformatted, SimpleDocTemplate, Spacer

from ..config import REPORT_SCHEMA, format_number
from ..harness.report import SuiteReport


def _report_to_flowables(report: SuiteReport,
                         paragraph_style: ParagraphStyle,
                         section_style: ParagraphStyle) -> List:
    '''
    One underlined heading per suite, then its law table and the reasons
    and counterexamples that do not fit in the table.
    '''
    flows: List = [Paragraph(f'<u>{report.suite}</u>', section_style)]
    verdict = 'pass' if report.passed else 'FAIL'
    flows.append(Preformatted(
        f'verdict {verdict}, max deviation {format_number(report.max_deviation)}',
        paragraph_style))
    flows.append(Spacer(0, 4))
    frame = report.to_frame()[['law', 'status', 'max_deviation', 'checked', 'coverage']]
    frame['max_deviation'] = frame['max_deviation'].map(format_number)
    frame = frame.fillna('')
    flows.append(Preformatted(frame.to_string(index=False), paragraph_style))

    notes = [(r.law, r.counterexample or r.reason) for r in report.laws
             if r.counterexample or r.reason]
    if notes:
        flows.append(Spacer(0, 6))
        for law, note in notes:
            flows.append(Preformatted(f'{law}: {note}', paragraph_style))
    return flows


def build_text_section(reports: Sequence[SuiteReport], pdf_out: Path,
                       margin_inch: tuple[float, float, float, float] = (0.6, 0.6, 0.6, 0.6),
                       font_size: int = 9) -> None:
    '''
    Write the text page of a verification report.

    Parameters
    ----------
    reports : Sequence[SuiteReport]
        Suite reports, all over the same universe.
    pdf_out : Path
        Output PDF path.
    margin_inch : tuple, optional
        Page margins in inches (left, right, top, bottom).
    font_size : int, optional
        Font size [pt].
    '''
    left, right, top, bottom = margin_inch
    styles = getSampleStyleSheet()

    mono = cast(ParagraphStyle, styles['Code'])
    mono.fontSize = font_size
    mono.leading = font_size + 1

    section_style = ParagraphStyle(
        'section', parent=styles['Code'],
        fontSize=font_size + 1, leading=font_size + 3,
        spaceBefore=8, spaceAfter=2
    )

    story: List = []
    today = datetime.datetime.now().strftime('%Y-%m-%d %H:%M:%S')
    story.append(Preformatted(REPORT_SCHEMA, mono))
    story.append(Preformatted(today, mono))
    if reports:
        universe = reports[0].universe
        story.append(Preformatted(f'vertices {", ".join(universe.vertices)}', mono))
        story.append(Preformatted(f'states   {", ".join(universe.states)}', mono))
        story.append(Preformatted(f'seed     {reports[0].seed}', mono))
    story.append(Spacer(0, 4))
    for report in reports:
        story.extend(_report_to_flowables(report, mono, section_style))

    pdf_out.parent.mkdir(parents=True, exist_ok=True)
    doc = SimpleDocTemplate(
        str(pdf_out), pagesize=A4,
        leftMargin=left * inch,
        rightMargin=right * inch,
        topMargin=top * inch,
        bottomMargin=bottom * inch
    )
    doc.build(story)
