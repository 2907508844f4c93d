import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines, key=lambda k: (int(k.split()[0]), k)):
        terminalreporter.write_line(lines[key])
