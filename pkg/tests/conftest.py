import numpy as np
import pytest

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: long-running test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "items": []})
    if rep.failed:
        entry["ok"] = False
        entry["items"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "PASS" if e["ok"] else "FAIL"
        extra = "" if e["ok"] else f"  (failed: {', '.join(e['items'])})"
        terminalreporter.write_line(f"criterion {number:2d} {status}: {e['title']}{extra}")


def _xpxp_orthosymplectic(u):
    # 2x2 unitary -> real passive symplectic in (x_L, p_L, x_G, p_G) order
    o = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            re, im = u[i, j].real, u[i, j].imag
            o[2 * i:2 * i + 2, 2 * j:2 * j + 2] = [[re, -im], [im, re]]
    return o


def random_unitary(rng):
    z = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_symplectic(rng, max_squeeze=1.0):
    """Bloch-Messiah product O1 diag(e^r, e^-r, e^s, e^-s) O2."""
    r = rng.uniform(-max_squeeze, max_squeeze, size=2)
    sq = np.diag([np.exp(r[0]), np.exp(-r[0]), np.exp(r[1]), np.exp(-r[1])])
    return _xpxp_orthosymplectic(random_unitary(rng)) @ sq @ _xpxp_orthosymplectic(random_unitary(rng))


def random_covariance(rng, bound=10.0, max_squeeze=1.0, max_nu=4.0):
    """Random physical two-mode covariance matrix with entries below ``bound``."""
    while True:
        nu = rng.uniform(1.0, max_nu, size=2)
        s = random_symplectic(rng, max_squeeze)
        sigma = s @ np.diag([nu[0], nu[0], nu[1], nu[1]]) @ s.T
        sigma = 0.5 * (sigma + sigma.T)
        if np.max(np.abs(sigma)) < bound:
            return sigma


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
