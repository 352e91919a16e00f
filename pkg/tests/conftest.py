import random

import pytest

from mvbound.family import (
    canonical_family,
    crt_product,
    lift_family,
    pad_family,
    random_greedy_family,
    subfamily,
    unit_family,
)


def assorted_families(seed=0):
    """Families over m in {2, 3, 4, 6} with t <= 600 used by the engine tests."""
    rng = random.Random(seed)
    fams = [
        unit_family(2, 200),
        unit_family(3, 40),
        unit_family(4, 25),
        unit_family(6, 600),
        canonical_family(2),
        canonical_family(3),
        canonical_family(4),
        canonical_family(6),
        pad_family(canonical_family(6), 4),
        lift_family(canonical_family(2), 2),
        lift_family(canonical_family(3), 2),
        lift_family(canonical_family(2), 3),
        lift_family(unit_family(2, 30), 2),
        lift_family(unit_family(3, 30), 2),
        crt_product(canonical_family(2), canonical_family(3)),
        crt_product(unit_family(2, 8), unit_family(3, 8)),
    ]
    for m in (2, 3, 4, 6):
        for n in (2, 3, 4):
            for _ in range(3):
                fams.append(random_greedy_family(m, n, rng.randint(3, 50), rng))
    big = unit_family(4, 300)
    fams.append(subfamily(big, sorted(rng.sample(range(300), 120))))
    return fams


@pytest.fixture(scope="session")
def families():
    return assorted_families()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
