import random
from itertools import combinations

import pytest

from repositories import AuditRepo
from services.fan_service import make_fan
from services.polytope_service import convex_hull

# The three worked examples of quartic linear systems, as point sets inside
# the quartic polytope.
DELTA0 = [(-1, -1, -1), (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, 0)]
DELTA88 = [(-1, -1, -1), (-1, -1, 0), (0, 0, 0), (-1, 1, 0), (2, -1, 0), (-1, -1, 1)]
DELTA221 = DELTA88 + [(0, -1, 1)]

CROSS3 = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
CUBE3 = [(a, b, c) for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)]


def _projective_fan(n):
    """Fan of P^n on e_1, ..., e_n, -sum e_i with every n-subset a cone."""
    rays = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    return make_fan(n, rays, combinations(range(n + 1), n))


def _random_unimodular(rng, d, steps=6):
    M = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    for _ in range(steps):
        i, j = rng.sample(range(d), 2)
        kind = rng.random()
        if kind < 0.15:
            M[i], M[j] = M[j], M[i]
        elif kind < 0.3:
            M[i] = [-x for x in M[i]]
        else:
            c = rng.choice([-2, -1, 1, 2])
            M[i] = [x + c * y for x, y in zip(M[i], M[j])]
    return M


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    for name in ("RK_CACHE_BACKEND", "RK_DB_DSN", "RK_OUTPUT_FORMAT", "RK_JOBS",
                 "RK_DATA_DIR", "RK_LOG_LEVEL", "RK_AUDIT"):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv("RK_CACHE_PATH", str(tmp_path / "cache"))
    # keep a developer's local .env out of the tests
    monkeypatch.setattr("config.load_dotenv", lambda **kwargs: False)
    yield
    AuditRepo.configure(None)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def random_unimodular():
    return _random_unimodular


@pytest.fixture
def projective_fan():
    return _projective_fan


@pytest.fixture
def p2_fan():
    return _projective_fan(2)


@pytest.fixture
def p3_fan():
    return _projective_fan(3)


@pytest.fixture
def p4_fan():
    return _projective_fan(4)


@pytest.fixture
def cross_polytope():
    return convex_hull(CROSS3)


@pytest.fixture
def cube():
    return convex_hull(CUBE3)


@pytest.fixture
def delta0_points():
    return list(DELTA0)


@pytest.fixture
def delta88_points():
    return list(DELTA88)


@pytest.fixture
def delta221_points():
    return list(DELTA221)


@pytest.fixture(scope="session")
def reid_classification():
    from services.reid_service import classify_reid

    return classify_reid()
