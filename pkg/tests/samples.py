"""Shared arrangements and a seeded sampler of valid unimodular ones."""

from __future__ import annotations

import random
from itertools import combinations

from artifact.arrangement import Arrangement, validate

A1 = Arrangement([[1], [1]], [1], [1])
COUNTEREXAMPLE = Arrangement(
    [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 0, -1], [0, 1, -1]], [1, 2], [1, -3, 1]
)


def _graphic_rows(d: int) -> list[tuple[int, ...]]:
    """e_i and e_i - e_j: a totally unimodular row pool."""
    rows = [tuple(int(k == i) for k in range(d)) for i in range(d)]
    for i, j in combinations(range(d), 2):
        rows.append(tuple(int(k == i) - int(k == j) for k in range(d)))
    return rows


def random_unimodular(rng: random.Random, n_max: int = 7, d_max: int = 3, d: int | None = None,
                      n: int | None = None, tries: int = 500) -> Arrangement:
    """A random arrangement passing every validation check.

    Rows are drawn with repetition from a totally unimodular pool, so every
    minor is 0 or +-1; theta and xi are resampled until generic.  The shape
    (n, d) is drawn once so that small d is not favoured by the retries.
    """
    d = d if d is not None else rng.randint(1, d_max)
    n = n if n is not None else rng.randint(d + 1, n_max)
    pool = _graphic_rows(d)
    for _ in range(tries):
        gamma = [list(rng.choice(pool)) for _ in range(n)]
        for _ in range(20):
            theta = [rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(n - d)]
            xi = [rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(d)]
            if validate(gamma, theta, xi).ok:
                return Arrangement(gamma, theta, xi)
    raise RuntimeError("no valid arrangement found")


def sample_arrangements(seed: int, count: int, **kwargs) -> list[Arrangement]:
    rng = random.Random(seed)
    return [random_unimodular(rng, **kwargs) for _ in range(count)]
