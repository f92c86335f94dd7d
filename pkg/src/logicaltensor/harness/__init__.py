from .mutations import MUTATIONS, kernels_for
from .proposition_suite import PROPOSITION_LAWS, run_proposition_suite
from .report import FAIL, PASS, SKIPPED, LawResult, SuiteReport, reports_to_frame, reports_to_json
from .theorem_suite import MAX_LINE_LENGTH, run_theorem_suite
from .toolbox_suite import TOOLBOX_LAWS, run_toolbox_suite
