import pytest

_LINES = {}


class Criterion:
    """Collects the sub-checks of one acceptance criterion."""

    def __init__(self, number, title):
        self.number = number
        self.title = title
        self.checks = []
        self.notes = []
        self.finished = False

    def check(self, label, ok, detail=""):
        self.checks.append((label, bool(ok), detail))
        return ok

    def note(self, text):
        self.notes.append(text)

    @property
    def ok(self):
        return bool(self.checks) and all(c[1] for c in self.checks)

    def failed(self):
        return [f"{label} ({detail})" if detail else label
                for label, ok, detail in self.checks if not ok]

    def line(self):
        status = "PASS" if self.finished and self.ok else "FAIL"
        text = f"criterion {self.number} {status}: {self.title}"
        if not self.finished:
            text += " [aborted before all checks ran]"
        elif not self.ok:
            text += " [failed: " + "; ".join(self.failed()) + "]"
        return text


@pytest.fixture
def criterion(request):
    holder = {}

    def make(number, title):
        holder["c"] = Criterion(number, title)
        return holder["c"]

    yield make
    c = holder.get("c")
    if c is not None:
        _LINES[c.number] = c


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_LINES):
        c = _LINES[number]
        terminalreporter.write_line(c.line())
        for label, ok, detail in c.checks:
            mark = "ok  " if ok else "FAIL"
            terminalreporter.write_line(f"    {mark} {label}" + (f": {detail}" if detail else ""))
        for text in c.notes:
            terminalreporter.write_line(f"    note {text}")
