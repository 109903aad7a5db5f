import hypothesis

hypothesis.settings.register_profile("default", max_examples=25, deadline=None, derandomize=True)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    import strategies

    if strategies.ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(strategies.ACCEPTANCE_RESULTS):
            terminalreporter.write_line(line)
