# lab.py
"""Console front end: one Lab object runs a command from a RunConfig and writes its outputs."""

import argparse
import logging
import math
import multiprocessing
import os
import sys
import time
from typing import Any, Dict, List, Optional, Tuple

from colorama import Fore, Style

from rdlab.callbacks import Events, callbacks
from rdlab.conditions import ConditionManager, StructureReport
from rdlab.config import LEMMA2_SETTINGS, UI_SETTINGS
from rdlab.errors import BlowupSuspectedError, RdlabError, ValidationError
from rdlab.grid import Grid
from rdlab.ledger import ledger
from rdlab.lemma2 import (
    amplitude_sweep,
    estimate_smoothing_constants,
    linearity_check,
    optimal_k_identity,
    resolution_comparison,
    standard_family,
)
from rdlab.log import configure_logging
from rdlab.persistence import ensure_dir, run_summary, write_json, write_rows, write_trajectory
from rdlab.plots import trajectory_plots, write_svg
from rdlab.proof import ProofDiagnostics, amplitude_scan, compute_K, k_sensitivity, run_proof_harness
from rdlab.run_config import COMMANDS, DOMAINS, RunConfig, load_run_config
from rdlab.simulator import Trajectory, simulate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1

SWEEP_COLUMNS = ("index", "label", "status", "exit_code", "error", "network", "amplitude", "points", "t_end",
                 "sup_norm", "mass_drift_rel", "entropy_drift_rel", "min_value", "proof_passes",
                 "feedback_max_ratio", "wall_time")


class Lab:
    """Runs checks, simulations and verifications with ledger tracking."""

    def __init__(self, colored: Optional[bool] = None, progress: Optional[bool] = None):
        self.colored = UI_SETTINGS["colored_reports"] if colored is None else colored
        self.progress = UI_SETTINGS["progress"] if progress is None else progress

        # Run statistics
        self.total_runs = 0
        self.total_rejections = 0

        callbacks.register(Events.RUN_COMPLETE, self._on_run_complete)
        callbacks.register(Events.STEP_REJECTED, self._on_step_rejected)

    def _on_run_complete(self, **kwargs):
        self.total_runs += 1

    def _on_step_rejected(self, **kwargs):
        self.total_rejections += 1

    def close(self):
        callbacks.unregister(Events.RUN_COMPLETE, self._on_run_complete)
        callbacks.unregister(Events.STEP_REJECTED, self._on_step_rejected)

    # --- commands --------------------------------------------------------------------------

    def execute(self, config: RunConfig) -> int:
        handlers = {
            "check": self.run_check,
            "simulate": self.run_simulate,
            "verify-proof": self.run_verify_proof,
            "verify-lemma2": self.run_verify_lemma2,
            "sweep": self.run_sweep,
        }
        _, code = handlers[config.command](config)
        return code

    def _tracked(self, kind: str, label: str, config: RunConfig, fn):
        op_id = ledger.generate_id(prefix=kind)
        ledger.record_start(op_id, kind=kind, label=label,
                            params={"network": config.network, "points": config.points, "t_end": config.t_end})
        try:
            result, code, summary = fn(op_id)
        except Exception as e:
            ledger.record_error(op_id, e)
            raise
        ledger.record_end(op_id, status="success" if code == EXIT_OK else "failed", summary=summary)
        return result, code

    def run_check(self, config: RunConfig) -> Tuple[StructureReport, int]:
        """Structural conditions; exit 0 iff (3), (4), (8) and (9) hold."""
        net = config.resolve_network()

        def body(op_id):
            manager = ConditionManager(settings={"seed": config.seed})
            report = manager.analyse(net, config.search_budget, parent_id=op_id, progress=self.progress)
            ensure_dir(config.out)
            write_json(report.to_dict(), os.path.join(config.out, "check.json"))
            print(manager.format_report(report, colored=self.colored))
            code = EXIT_OK if report.theorem_conditions_hold else EXIT_FAILED
            verdict = "hold" if code == EXIT_OK else "fail"
            return report, code, f"global existence conditions {verdict}"

        return self._tracked("check", f"check {net.name}", config, body)

    def _simulate(self, config: RunConfig) -> Trajectory:
        solver = config.solver_config()
        return simulate(solver, progress=self.progress)

    def _write_run(self, trajectory: Trajectory, config: RunConfig, K: float,
                   extra: Optional[Dict[str, Any]] = None) -> Dict[str, str]:
        paths = write_trajectory(trajectory, config.out, config.snapshot_format, K=K, extra_summary=extra)
        if config.write_plots:
            paths.update(trajectory_plots(trajectory, config.out))
        return paths

    def run_simulate(self, config: RunConfig) -> Tuple[Optional[Trajectory], int]:
        """Diagnostics CSV, snapshots, summary JSON and plots; exit 4 with partial outputs on blowup."""
        net = config.resolve_network()

        def body(op_id):
            K = compute_K(net)
            try:
                trajectory = self._simulate(config)
            except BlowupSuspectedError as e:
                if e.trajectory is not None:
                    self._write_run(e.trajectory, config, K, {"error": str(e)})
                raise
            self._write_run(trajectory, config, K)
            summary = run_summary(trajectory, K)
            print(self.format_summary(summary))
            return trajectory, EXIT_OK, f"sup {summary['sup_norm']:.6g}, mass drift {summary['mass_drift_rel']:.2e}"

        return self._tracked("simulate", f"simulate {net.name}", config, body)

    def run_verify_proof(self, config: RunConfig) -> Tuple[Optional[ProofDiagnostics], int]:
        """Proof harness along a fresh run; exit 0 iff every margin is within tolerance."""
        net = config.resolve_network()

        def body(op_id):
            K = config.k_scale * compute_K(net)
            try:
                trajectory = self._simulate(config)
            except BlowupSuspectedError as e:
                if e.trajectory is not None:
                    self._write_run(e.trajectory, config, K, {"error": str(e)})
                raise
            diag = run_proof_harness(trajectory, net, K=K)
            sensitivity = k_sensitivity(trajectory, compute_K(net), network=net)
            self._write_run(trajectory, config, K)
            report = {**diag.to_dict(), "k_scale": config.k_scale, "k_sensitivity": sensitivity,
                      "amplitude_scan": amplitude_scan(net, compute_K(net))}
            write_json(report, os.path.join(config.out, "proof.json"))
            if config.write_plots:
                write_svg(os.path.join(config.out, "phi.svg"),
                          {"sup phi": (diag.times, diag.phi_fields.reshape(len(diag.times), -1).max(axis=1)),
                           "C1": (diag.times, [diag.C1] * len(diag.times))}, "Maximum principle for phi")
            print(self.format_margins(diag))
            code = EXIT_OK if diag.passes else EXIT_FAILED
            failed = [k for k, m in diag.margins.items() if not m.holds]
            return diag, code, "all margins hold" if not failed else f"violated: {', '.join(failed)}"

        return self._tracked("verify-proof", f"verify-proof {net.name}", config, body)

    def run_verify_lemma2(self, config: RunConfig) -> Tuple[Dict[str, Any], int]:
        """Family constants, resolution stability, amplitude sweep, smoothing table and identities."""

        def body(op_id):
            settings = {"seed": config.seed}
            grid = Grid.uniform(config.dim, LEMMA2_SETTINGS["extent"], config.points)
            comparison = resolution_comparison(config.points, config.dim, settings, progress=self.progress)
            member = standard_family(settings=settings)[2]
            sweep = amplitude_sweep(member, points=config.points)
            smoothing = estimate_smoothing_constants(grid)
            c0_to_c1 = [row["c0_to_c1"] for row in smoothing]
            identity = optimal_k_identity(member.initial(grid), member.source(grid), 1.0, 1.0,
                                          shifts=(0.25, 4.0))
            linearity = linearity_check(grid)
            checks = {
                "constants_finite": all(math.isfinite(v) for key in ("base", "double")
                                        for v in comparison[key].values()),
                "resolution_stable": comparison["stable"],
                "amplitude_spread_below_2": sweep.parameters["spread"] < 2.0,
                "smoothing_band_below_3": max(c0_to_c1) / min(c0_to_c1) < 3.0,
                "c1_contraction": max(row["c1_to_c1"] for row in smoothing) <= 1.0 + 1e-9,
                "shift_identity": identity["holds"],
                "linearity": max(linearity.values()) <= 1e-10,
            }
            report = {"checks": checks, "resolution": comparison, "amplitude_sweep": sweep.to_dict(),
                      "smoothing": smoothing, "shift_identity": identity, "linearity": linearity}
            ensure_dir(config.out)
            write_json(report, os.path.join(config.out, "lemma2.json"))
            write_rows(os.path.join(config.out, "smoothing.csv"), list(smoothing[0]),
                       [list(row.values()) for row in smoothing])
            print(self.format_checks("Interpolation estimates", checks))
            code = EXIT_OK if all(checks.values()) else EXIT_FAILED
            failed = [k for k, ok in checks.items() if not ok]
            return report, code, "all checks hold" if not failed else f"failed: {', '.join(failed)}"

        return self._tracked("verify-lemma2", "verify-lemma2", config, body)

    def run_sweep(self, config: RunConfig) -> Tuple[List[Dict[str, Any]], int]:
        """
        One row per sweep entry, in entry order. Runs go to a process pool when workers > 1;
        a failing run is flagged in its row and the sweep continues.
        """

        def body(op_id):
            payloads = [(i, c.to_dict()) for i, c in enumerate(config.sweep_configs())]
            if config.workers > 1 and len(payloads) > 1:
                with multiprocessing.Pool(processes=config.workers) as pool:
                    rows = pool.map(sweep_row, payloads)
            else:
                rows = [sweep_row(p) for p in payloads]
            for row in rows:
                child = ledger.generate_id(prefix="sweep_row")
                ledger.record_start(child, kind="sweep_row", label=row["label"], parent_id=op_id)
                ledger.record_end(child, status="success" if row["status"] == "ok" else "failed",
                                  summary=row["error"] or f"sup {row['sup_norm']}")
                callbacks.trigger(Events.SWEEP_ROW, kind="run", row=row)
            ensure_dir(config.out)
            write_rows(os.path.join(config.out, "sweep.csv"), SWEEP_COLUMNS,
                       [[row[c] for c in SWEEP_COLUMNS] for row in rows])
            flagged = [row for row in rows if row["status"] != "ok"]
            code = EXIT_OK if not flagged else EXIT_FAILED
            return rows, code, f"{len(rows)} rows, {len(flagged)} flagged"

        return self._tracked("sweep", f"sweep of {len(config.sweep)}", config, body)

    # --- reports ---------------------------------------------------------------------------

    def _mark(self, ok: bool) -> str:
        """Status emoji followed by an opening color code; callers reset after the label."""
        color = (Fore.GREEN if ok else Fore.RED) if self.colored else ""
        return f"{'✅' if ok else '❌'} {color}"

    def format_summary(self, summary: Dict[str, Any]) -> str:
        return "\n".join([
            f"Run of '{summary['network']}' to T={summary['t_final']:g} ({summary['snapshots']} snapshots)",
            f"  sup norm         {summary['sup_norm']:.6g}",
            f"  min value        {summary['min_value']:.3e}",
            f"  mass drift (rel) {summary['mass_drift_rel']:.3e}",
            f"  entropy drift    {summary['entropy_drift_rel']:.3e} (K={summary['entropy_K']:g})",
            f"  steps            {summary['stats'].get('accepted')} accepted, "
            f"{summary['stats'].get('rejected')} rejected",
        ])

    def format_margins(self, diag: ProofDiagnostics) -> str:
        reset = Style.RESET_ALL if self.colored else ""
        lines = [f"Proof harness: K={diag.K:g}, d={diag.d_aux:g}, C1={diag.C1:.6g}"]
        for name, m in diag.margins.items():
            lines.append(f"  {self._mark(m.holds)}{m.label:<18} {name:<22}{reset} "
                         f"worst {m.worst:+.3e} (tol {m.tolerance:.1e})")
        fb = diag.feedback
        lines.append(f"  ℹ️ feedback ratio max {fb['max_ratio']:.6g}, log feedback {fb['feedback']:.6g}")
        return "\n".join(lines)

    def format_checks(self, title: str, checks: Dict[str, bool]) -> str:
        reset = Style.RESET_ALL if self.colored else ""
        return "\n".join([f"{title}:"] + [f"  {self._mark(ok)}{name}{reset}" for name, ok in checks.items()])

    def get_report(self) -> str:
        """Ledger of everything this process ran, as an indented tree."""
        records = ledger.get_all_records()
        if not records:
            return "Nothing was run."
        children = ledger.get_parent_child_map()
        by_id = {r["id"]: r for r in records}
        lines = ["📊 Operations:"]
        for record in records:
            if record.get("parent_id") is None:
                self._format_record(record, lines, children, by_id, indent=1)
        return "\n".join(lines)

    def _format_record(self, record, lines, children, by_id, indent=0):
        status = record.get("status", "unknown")
        emoji, color = {"success": ("✅", Fore.GREEN), "failed": ("❌", Fore.RED),
                        "error": ("❌", Fore.RED)}.get(status, ("⚠️", Fore.YELLOW))
        color = color if self.colored else ""
        reset = Style.RESET_ALL if self.colored else ""
        lines.append(f"{'  ' * indent}{emoji} {color}{record['label']}{reset} "
                     f"({record.get('duration', 0.0):.2f}s): {record.get('summary', status)}")
        for child_id in children.get(record["id"], []):
            if child_id in by_id:
                self._format_record(by_id[child_id], lines, children, by_id, indent + 1)


def sweep_row(payload: Tuple[int, Dict[str, Any]]) -> Dict[str, Any]:
    """Run one sweep entry; failures are returned in the row instead of raised."""
    index, data = payload
    row = {c: "" for c in SWEEP_COLUMNS}
    row.update(index=index, status="ok", exit_code=EXIT_OK)
    started = time.time()
    try:
        config = RunConfig.from_dict(data)
        row.update(label=", ".join(f"{k}={getattr(config, k)}" for k in ("network", "amplitude", "points", "t_end")),
                   network=config.network, amplitude=config.amplitude, points=config.points,
                   t_end=config.t_end)
        net = config.resolve_network()
        K = compute_K(net)
        trajectory = simulate(config.solver_config(net), progress=False)
        summary = run_summary(trajectory, K)
        row.update(sup_norm=summary["sup_norm"], mass_drift_rel=summary["mass_drift_rel"],
                   entropy_drift_rel=summary["entropy_drift_rel"], min_value=summary["min_value"])
        if config.command == "verify-proof":
            diag = run_proof_harness(trajectory, net, K=config.k_scale * K)
            row.update(proof_passes=diag.passes, feedback_max_ratio=diag.feedback["max_ratio"])
            if not diag.passes:
                row.update(status="failed", exit_code=EXIT_FAILED)
    except RdlabError as e:
        row.update(status="error", exit_code=e.exit_code, error=str(e))
    except Exception as e:
        row.update(status="error", exit_code=EXIT_FAILED, error=f"{type(e).__name__}: {e}")
    row["wall_time"] = round(time.time() - started, 3)
    return row


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Run config JSON file; flags given here override it")
    common.add_argument("--network", help="Built-in network name or network description file")
    common.add_argument("--seed", type=int, help="Seed for the structural condition search")
    common.add_argument("--out", help="Output directory")
    common.add_argument("--resolution", type=int, help="Grid points per axis")
    common.add_argument("--t-end", type=float, dest="t_end", help="Final time T")
    common.add_argument("--amplitude", type=float, help="Initial data amplitude")
    common.add_argument("--k-scale", type=float, dest="k_scale", help="Multiplier applied to K = m^{3/2} M")
    common.add_argument("--domain", choices=DOMAINS, help="Neumann box, or a large box approximating R^n")
    common.add_argument("--workers", type=int, help="Worker processes for sweeps")
    common.add_argument("--quiet", action="store_true", help="Warnings only, no progress bars")
    common.add_argument("--no-color", action="store_true", dest="no_color", help="Plain console output")

    parser = argparse.ArgumentParser(
        prog="rdlab", description="Reaction-diffusion laboratory: structural checks, simulation and "
                                  "verification of global existence estimates")
    sub = parser.add_subparsers(dest="command", required=True)
    help_text = {
        "check": "Structural conditions of a network",
        "simulate": "Integrate the system and write diagnostics",
        "verify-proof": "Entropy, auxiliary problem and feedback inequalities along a run",
        "verify-lemma2": "Empirical constants of the interpolation estimates",
        "sweep": "Run the 'sweep' entries of a config and tabulate them",
    }
    for command in COMMANDS:
        sub.add_parser(command, parents=[common], help=help_text[command])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config) if args.config else RunConfig(command=args.command)
    overrides = {"command": args.command}
    for key, attr in (("network", "network"), ("seed", "seed"), ("out", "out"), ("points", "resolution"),
                      ("t_end", "t_end"), ("amplitude", "amplitude"), ("k_scale", "k_scale"),
                      ("domain", "domain"), ("workers", "workers")):
        value = getattr(args, attr)
        if value is not None:
            overrides[key] = value
    return config.with_overrides(**overrides)


def _format_error(error: Exception) -> str:
    """One line per error class, with its exit code."""
    code = getattr(error, "exit_code", EXIT_FAILED)
    return f"❌ {type(error).__name__} (exit {code}): {error}"


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point for the rdlab console application."""
    args = build_parser().parse_args(argv)
    colored = UI_SETTINGS["colored_reports"] and not args.no_color
    configure_logging("WARNING" if args.quiet else UI_SETTINGS["log_level"], colored=colored)

    lab = Lab(colored=colored, progress=UI_SETTINGS["progress"] and not args.quiet)
    try:
        config = config_from_args(args)
        code = lab.execute(config)
    except RdlabError as e:
        print(_format_error(e), file=sys.stderr)
        code = e.exit_code
    except ValueError as e:
        print(_format_error(ValidationError(str(e))), file=sys.stderr)
        code = ValidationError.exit_code
    finally:
        lab.close()
    if not args.quiet:
        print(f"\n{lab.get_report()}")
    return code
