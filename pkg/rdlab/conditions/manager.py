# conditions/manager.py
"""Runs the registered structural checks on a network and renders the condition table."""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from colorama import Fore, Style
from tqdm import tqdm

from rdlab.callbacks import Events, callbacks
from rdlab.conditions.registry import CONDITIONS, discover_conditions, get_condition, list_conditions
from rdlab.conditions.structural import CheckResult
from rdlab.config import UI_SETTINGS
from rdlab.ledger import ledger
from rdlab.networks.model import ReactionNetwork

logger = logging.getLogger(__name__)


@dataclass
class StructureReport:
    """Per-condition check results for one network."""

    network: str
    quasi_positivity: CheckResult
    mass_dissipation: CheckResult
    mass_conservation: CheckResult
    entropy_dissipation: CheckResult
    gradient_growth: CheckResult
    alt_growth_9prime: CheckResult
    entropy_variant: Optional[CheckResult] = None
    elapsed: float = 0.0
    extra: Dict[str, CheckResult] = field(default_factory=dict)

    @property
    def results(self) -> List[CheckResult]:
        ordered = [self.quasi_positivity, self.mass_dissipation, self.mass_conservation,
                   self.entropy_dissipation, self.gradient_growth, self.alt_growth_9prime]
        if self.entropy_variant is not None:
            ordered.append(self.entropy_variant)
        return ordered + list(self.extra.values())

    @property
    def theorem_conditions_hold(self) -> bool:
        """True iff (3), (4), (8) and (9) all hold."""
        return all(r.holds for r in (self.quasi_positivity, self.mass_dissipation,
                                     self.entropy_dissipation, self.gradient_growth))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "network": self.network,
            "theorem_conditions_hold": self.theorem_conditions_hold,
            "elapsed": self.elapsed,
            "conditions": {r.name: r.to_dict() for r in self.results},
        }


class ConditionManager:
    """Manager for structural check execution with ledger tracking."""

    def __init__(self, settings: Optional[dict] = None):
        discover_conditions()
        self.settings = settings

    def run_check(self, name: str, net: ReactionNetwork, search_budget: Optional[int] = None,
                  parent_id: Optional[str] = None) -> CheckResult:
        """Execute one registered check and record it in the ledger."""
        check_fn = get_condition(name)
        if check_fn is None:
            raise KeyError(f"Unknown condition: {name}")

        op_id = ledger.generate_id(prefix=name)
        ledger.record_start(op_id, kind="condition", label=f"{CONDITIONS[name]['label']} {name}",
                            params={"network": net.name, "search_budget": search_budget},
                            parent_id=parent_id)
        try:
            result = check_fn(net, search_budget=search_budget, settings=self.settings)
        except Exception as e:
            ledger.record_error(op_id, e)
            raise

        status = {True: "success", False: "failed", None: "success"}[result.holds]
        ledger.record_end(op_id, status=status, summary=self._summary(result))
        callbacks.trigger(Events.CHECK_COMPLETE, network=net.name, result=result, op_id=op_id)
        return result

    def analyse(self, net: ReactionNetwork, search_budget: Optional[int] = None,
                parent_id: Optional[str] = None, progress: Optional[bool] = None) -> StructureReport:
        """Run every registered check on net and assemble the report."""
        progress = UI_SETTINGS["progress"] if progress is None else progress
        start = time.time()
        names = tqdm(list_conditions(), desc=f"conditions {net.name}", disable=not progress, leave=False)
        results = {name: self.run_check(name, net, search_budget, parent_id) for name in names}
        known = StructureReport.__dataclass_fields__.keys()
        report = StructureReport(
            network=net.name,
            **{name: r for name, r in results.items() if name in known},
            extra={name: r for name, r in results.items() if name not in known},
        )
        report.elapsed = time.time() - start
        logger.info("Structure of '%s': global existence conditions %s (%.2fs)", net.name,
                    "hold" if report.theorem_conditions_hold else "fail", report.elapsed)
        return report

    @staticmethod
    def _summary(result: CheckResult) -> str:
        if result.holds is None:
            return f"fitted {result.fitted:.6g}"
        text = "holds" if result.holds else f"violated at u = {[float(f'{x:.6g}') for x in result.witness]}"
        if result.fitted is not None:
            text += f", fitted M = {result.fitted:.10g}"
        elif result.margin is not None:
            text += f", margin {result.margin:.3e}"
        return text

    def format_report(self, report: StructureReport, colored: bool = True) -> str:
        """Human-readable condition table."""
        reset = Style.RESET_ALL if colored else ""
        lines = [f"Structural conditions for '{report.network}':"]
        for r in report.results:
            if r.holds is True:
                mark, color = "✅", Fore.GREEN
            elif r.holds is False:
                mark, color = "❌", Fore.RED
            else:
                mark, color = "ℹ️", Fore.CYAN
            color = color if colored else ""
            lines.append(f"  {mark} {color}{r.label:<6} {r.name:<22}{reset} {self._summary(r)}")
        verdict = "hold" if report.theorem_conditions_hold else "do NOT hold"
        lines.append(f"Global existence conditions (3), (4), (8), (9) {verdict} ({report.elapsed:.2f}s)")
        return "\n".join(lines)


def analyse_structure(net: ReactionNetwork, search_budget: Optional[int] = None,
                      settings: Optional[dict] = None) -> StructureReport:
    return ConditionManager(settings).analyse(net, search_budget)
