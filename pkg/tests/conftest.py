import itertools
import math

import pytest


def brute_sphere(d: int, lam: int) -> list[tuple[int, ...]]:
    """Every x in Z^d with |x|^2 = lam, by exhaustive search over the cube."""
    t = math.isqrt(lam)
    return [x for x in itertools.product(range(-t, t + 1), repeat=d) if sum(v * v for v in x) == lam]


@pytest.fixture
def brute():
    return brute_sphere
