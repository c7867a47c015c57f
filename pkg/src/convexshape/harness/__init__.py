from .families import ClosedFormOnlyError, ClosedFormValues, FamilySpec, random_polygon, realize, table2_values
from .runs import run_suite, sweep, sweep_rows, table2_report

__all__ = [
    "ClosedFormOnlyError",
    "ClosedFormValues",
    "FamilySpec",
    "random_polygon",
    "realize",
    "run_suite",
    "sweep",
    "sweep_rows",
    "table2_report",
    "table2_values",
]
