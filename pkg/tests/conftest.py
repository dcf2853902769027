from __future__ import annotations

from hypothesis import HealthCheck, settings

settings.register_profile("artifact", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("artifact")

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def record(criterion: str, ok: bool, detail: str = "") -> None:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"{criterion}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[1])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
