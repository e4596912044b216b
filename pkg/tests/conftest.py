import csv
import pathlib
import sys

import pytest

HERE = pathlib.Path(__file__).parent
ROOT = HERE.parent
CORPUS = ROOT / "corpus"
GOLDEN = HERE / "golden"

sys.path.insert(0, str(HERE))


def manifest():
    with open(CORPUS / "manifest.tsv", encoding="utf-8") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


def read(path):
    from bilateral import parse
    return parse(pathlib.Path(path).read_text(encoding="utf-8"))


@pytest.fixture
def corpus():
    return lambda name: read(CORPUS / name)


def pytest_terminal_summary(terminalreporter):
    results = {}
    for name, module in list(sys.modules.items()):
        if name.rpartition(".")[2] == "test_acceptance":
            results.update(getattr(module, "RESULTS", {}))
    if results:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
