# ledger.py
"""Thread-safe ledger of checks, runs and verifications executed in this process."""

import threading
import time
import uuid
from typing import Any, Dict, List, Optional


class RunLedger:
    """Thread-safe service for generating operation IDs and tracking their outcome."""

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        with cls._lock:
            if cls._instance is None:
                cls._instance = super(RunLedger, cls).__new__(cls)
                cls._instance._counter = 0
                cls._instance._parent_child_map = {}
                cls._instance._records = {}
        return cls._instance

    def generate_id(self, prefix: str = "op") -> str:
        """Generate a unique ID with optional prefix."""
        with self._lock:
            self._counter += 1
            return f"{prefix}_{self._counter}_{uuid.uuid4().hex[:6]}"

    def record_start(self, op_id: str, kind: str, label: str,
                     params: Optional[Dict[str, Any]] = None, parent_id: Optional[str] = None) -> None:
        """Record the start of an operation (check, simulate, verify, sweep row)."""
        with self._lock:
            self._records[op_id] = {
                "id": op_id,
                "kind": kind,
                "label": label,
                "params": dict(params or {}),
                "parent_id": parent_id,
                "start_time": time.time(),
                "status": "running",
            }
            if parent_id:
                self._parent_child_map.setdefault(parent_id, []).append(op_id)

    def record_end(self, op_id: str, status: str = "success", summary: Optional[str] = None) -> None:
        """Record the completion of an operation; status is success, failed or error."""
        with self._lock:
            record = self._records.get(op_id)
            if record is None:
                return
            record["end_time"] = time.time()
            record["duration"] = record["end_time"] - record["start_time"]
            record["status"] = status
            record["summary"] = summary or "Completed"

    def record_error(self, op_id: str, error: Any = "Unknown error") -> None:
        """Record an error in an operation."""
        self.record_end(op_id, status="error", summary=str(error))

    def get_record(self, op_id: str) -> Optional[Dict[str, Any]]:
        with self._lock:
            record = self._records.get(op_id)
            return dict(record) if record else None

    def get_all_records(self) -> List[Dict[str, Any]]:
        """Get all records in insertion order."""
        with self._lock:
            return [dict(r) for r in self._records.values()]

    def get_parent_child_map(self) -> Dict[str, List[str]]:
        with self._lock:
            return {k: list(v) for k, v in self._parent_child_map.items()}

    def clear_history(self) -> None:
        """Clear history but keep the counter."""
        with self._lock:
            self._parent_child_map = {}
            self._records = {}


# Global instance
ledger = RunLedger()
