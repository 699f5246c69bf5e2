# conditions/registry.py
"""Registry for structural condition checks with automatic discovery."""

import importlib
import logging
import os
from typing import Callable, Dict, List, Optional

logger = logging.getLogger(__name__)

# Storage for registered checks, in registration order
CONDITIONS: Dict[str, Dict] = {}
_conditions_discovered = False

_NON_CHECK_MODULES = {"__init__", "registry", "sampling", "manager", "result"}


def condition(name: str, label: str, description: str, theorem: bool = False):
    """
    Decorator to register a structural condition check.

    Args:
        name: Field name of the check in a StructureReport
        label: Condition label as printed in reports, e.g. "(4)"
        description: One-line statement of the condition
        theorem: True if the condition is a hypothesis of the global existence theorem

    Returns:
        Decorator function
    """
    def decorator(func: Callable):
        CONDITIONS[name] = {
            "function": func,
            "label": label,
            "description": description,
            "theorem": theorem,
        }
        return func
    return decorator


def get_condition(name: str) -> Optional[Callable]:
    discover_conditions()
    entry = CONDITIONS.get(name)
    return entry["function"] if entry else None


def list_conditions(theorem_only: bool = False) -> List[str]:
    """Registered check names in registration order."""
    discover_conditions()
    return [name for name, entry in CONDITIONS.items() if entry["theorem"] or not theorem_only]


def discover_conditions() -> None:
    """Automatically import check modules in this package."""
    global _conditions_discovered
    if _conditions_discovered:
        return

    current_dir = os.path.dirname(os.path.abspath(__file__))
    for filename in sorted(os.listdir(current_dir)):
        if not filename.endswith(".py") or filename[:-3] in _NON_CHECK_MODULES:
            continue
        module_name = filename[:-3]
        try:
            importlib.import_module(f".{module_name}", package="rdlab.conditions")
            logger.debug("Registered condition module: %s", module_name)
        except Exception as e:
            logger.error("Error importing condition module %s: %s", module_name, e)

    _conditions_discovered = True
