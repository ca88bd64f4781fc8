import numpy as np
import pytest

from gcolex.group import make_group
from gcolex.stabilizer import factor_matrix


@pytest.fixture(scope="session")
def Z2():
    return make_group("Z2")


@pytest.fixture(scope="session")
def Z3():
    return make_group("Z3")


@pytest.fixture(scope="session")
def S3():
    return make_group("S3")


def product_matrix(G, factors, support):
    """Integer matrix of den * (product of factors) on ``support``; last factor acts first."""
    out = None
    den = 1
    for f in factors:
        m = factor_matrix(G, f, support)
        den *= f.denominator
        out = m if out is None else out @ m
    return out, den


def same_operator(G, fa, fb, support) -> bool:
    a, da = product_matrix(G, fa, support)
    b, db = product_matrix(G, fb, support)
    diff = (a * db - b * da).tocsr()
    diff.eliminate_zeros()
    return diff.nnz == 0


def gf2_rank(rows) -> int:
    M = np.array(rows, dtype=np.uint8) % 2
    rank = 0
    for col in range(M.shape[1]):
        piv = next((r for r in range(rank, len(M)) if M[r, col]), None)
        if piv is None:
            continue
        M[[rank, piv]] = M[[piv, rank]]
        for r in range(len(M)):
            if r != rank and M[r, col]:
                M[r] ^= M[rank]
        rank += 1
    return rank


# one summary line per acceptance criterion, printed after the run
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    if report.when == "call" or report.outcome != "passed":
        state = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        if _ACCEPTANCE.get(name) in (None, "PASS"):
            _ACCEPTANCE[name] = state


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        num, label = name.split("_")[2], " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {num} ({label}): {_ACCEPTANCE[name]}")
