# test_ledger.py
"""Operation ledger and callback manager."""

import threading

from rdlab.callbacks import Events, callbacks
from rdlab.ledger import RunLedger, ledger


class TestLedger:
    def test_singleton(self):
        assert RunLedger() is ledger

    def test_ids_are_unique_across_threads(self):
        ids = []

        def draw():
            ids.extend(ledger.generate_id("run") for _ in range(200))

        threads = [threading.Thread(target=draw) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(set(ids)) == 800
        assert all(i.startswith("run_") for i in ids)

    def test_lifecycle(self):
        op = ledger.generate_id("simulate")
        ledger.record_start(op, kind="simulate", label="simulate four_species", params={"points": 16})
        assert ledger.get_record(op)["status"] == "running"
        ledger.record_end(op, status="failed", summary="margin violated")
        record = ledger.get_record(op)
        assert record["status"] == "failed"
        assert record["summary"] == "margin violated"
        assert record["duration"] >= 0.0

    def test_error_and_children(self):
        parent = ledger.generate_id("sweep")
        child = ledger.generate_id("sweep_row")
        ledger.record_start(parent, kind="sweep", label="sweep of 1")
        ledger.record_start(child, kind="sweep_row", label="row 0", parent_id=parent)
        ledger.record_error(child, ValueError("bad row"))
        assert ledger.get_parent_child_map() == {parent: [child]}
        assert ledger.get_record(child)["status"] == "error"
        assert ledger.get_record(child)["summary"] == "bad row"

    def test_end_of_unknown_id_is_ignored(self):
        ledger.record_end("never_started")
        assert ledger.get_record("never_started") is None
        assert ledger.get_all_records() == []

    def test_clear_keeps_counter(self):
        first = ledger.generate_id("x")
        ledger.record_start(first, kind="check", label="check")
        ledger.clear_history()
        assert ledger.get_all_records() == []
        assert ledger.generate_id("x") != first


class TestCallbacks:
    def test_trigger_passes_keywords(self):
        seen = []
        callbacks.register(Events.SNAPSHOT, lambda **kw: seen.append(kw["time"]))
        callbacks.trigger(Events.SNAPSHOT, time=0.5, record=None)
        assert seen == [0.5]

    def test_unregister(self):
        seen = []

        def handler(**kw):
            seen.append(1)

        callbacks.register(Events.RUN_COMPLETE, handler)
        callbacks.unregister(Events.RUN_COMPLETE, handler)
        callbacks.unregister(Events.RUN_COMPLETE, handler)
        callbacks.trigger(Events.RUN_COMPLETE, network="x", trajectory=None)
        assert seen == []

    def test_failing_handler_does_not_stop_others(self):
        seen = []

        def broken(**kw):
            raise RuntimeError("boom")

        callbacks.register(Events.SWEEP_ROW, broken)
        callbacks.register(Events.SWEEP_ROW, lambda **kw: seen.append(kw["row"]))
        callbacks.trigger(Events.SWEEP_ROW, kind="run", row={"index": 0})
        assert seen == [{"index": 0}]
