"""Shared pytest wiring: a per-gate verdict block for the acceptance suite."""

_ACCEPTANCE = "test_acceptance.py"
_order: list[str] = []


def pytest_collection_modifyitems(items):
    for item in items:
        if _ACCEPTANCE in item.nodeid:
            _order.append(item.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts: dict[str, str] = {}
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if _ACCEPTANCE not in nodeid:
                continue
            if status != "error" and getattr(rep, "when", "call") != "call":
                continue
            verdicts[nodeid.split("::")[-1]] = label
    if not verdicts:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in _order:
        if name in verdicts:
            terminalreporter.write_line(f"{verdicts[name]} {name}")
