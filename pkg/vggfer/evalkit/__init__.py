from .split import Fold, SplitPlan, make_split
from .metrics import Metrics, metrics, per_class_accuracy
from .protocol import SvmParams, SchemeResult, EvalResult, run_layer, run_config, evaluate_grid, make_plans
from .selection import Candidate, SelectionResult, select_parameters
from .report import write_report, load_report, report_results, append_selection, selection_record
