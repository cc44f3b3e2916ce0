"""File formats, built-in fans, reports and the command line."""

from .builtins import builtin_fan
from .report import RunReport, dumps_report, loads_report, parse_fan, run_check

__all__ = ["RunReport", "builtin_fan", "dumps_report", "loads_report", "parse_fan", "run_check"]
