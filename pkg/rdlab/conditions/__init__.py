# conditions/__init__.py
"""
Structural condition checks.
Importing the package registers the checks defined in structural.py.
"""

from rdlab.conditions.manager import ConditionManager, StructureReport, analyse_structure
from rdlab.conditions.structural import (
    CheckResult,
    check_entropy_dissipation,
    check_entropy_variant,
    check_gradient_growth,
    check_mass_conservation,
    check_mass_dissipation,
    check_quasi_positivity,
    check_9prime,
)

__all__ = [
    "CheckResult",
    "ConditionManager",
    "StructureReport",
    "analyse_structure",
    "check_quasi_positivity",
    "check_mass_dissipation",
    "check_mass_conservation",
    "check_entropy_dissipation",
    "check_gradient_growth",
    "check_9prime",
    "check_entropy_variant",
]
