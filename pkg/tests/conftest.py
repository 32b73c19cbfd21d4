import numpy as np
import pytest

_CRITERIA: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    """Remember one acceptance verdict; printed at the end of the session."""
    _CRITERIA[number] = (bool(ok), detail)
    print(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_spd(rng, L, ridge=None):
    a = rng.standard_normal((L, L))
    return a @ a.T + (L if ridge is None else ridge) * np.eye(L)


def monotone_sample(rng, L, n_max=12, n_min=3, sigma=None, mu=None):
    """Random ragged sample whose row lengths are nonincreasing after sorting."""
    from bayesrs.samples import RaggedSample

    n = rng.integers(n_min, n_max + 1, size=L)
    sigma = random_spd(rng, L) if sigma is None else sigma
    mu = np.zeros(L) if mu is None else mu
    cols = rng.multivariate_normal(mu, sigma, size=int(n.max())).T
    return RaggedSample.from_rows([cols[i, : n[i]] for i in range(L)]), sigma
