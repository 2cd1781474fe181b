"""Shared families and base functions for the test suite."""

import math

import pytest

from weierdim import SequenceSpec, make_base, wide_triangle

LN2 = math.log(2.0)


@pytest.fixture(scope="session")
def sawtooth():
    return make_base("sawtooth")


@pytest.fixture(scope="session")
def sine():
    return make_base("sine")


@pytest.fixture(scope="session")
def triangle():
    return wide_triangle()


def wingren_spec(n_max: int = 6) -> SequenceSpec:
    """a_n = 2**-n, b_n = 2**(2**n): tabulated up to a representable index."""
    return SequenceSpec.explicit_table(
        [(-n * LN2, (2 ** n) * LN2, 0.0) for n in range(1, n_max + 1)])


def halving_spec(n_max: int = 32) -> SequenceSpec:
    """a_n = 2**-n with moderate frequencies b_n = 2**(2n)."""
    return SequenceSpec.explicit_table(
        [(-n * LN2, 2 * n * LN2, 0.0) for n in range(1, n_max + 1)])


def lipschitz_spec(n_max: int = 24) -> SequenceSpec:
    """a_n b_n = 4**-n with b_n = 2**(n*n): bounded d_n, Lipschitz sum."""
    return SequenceSpec.explicit_table(
        [(-(n * n + 2 * n) * LN2, (n * n) * LN2, 0.0) for n in range(1, n_max + 1)])


def lipschitz_scaffold_spec(n_max: int = 12) -> SequenceSpec:
    """a_n b_n = 2**-n with b_n = 2**(5n): bounded d_n, buildable scaffold."""
    return SequenceSpec.explicit_table(
        [(-6 * n * LN2, 5 * n * LN2, 0.0) for n in range(1, n_max + 1)])


def sqrt_decay_spec(n_max: int = 8) -> SequenceSpec:
    """a_n = b_n**(-1/2) with b_n = 2**(n^2+n): buildable scaffold family."""
    return SequenceSpec.explicit_table(
        [(-0.5 * (n * n + n) * LN2, (n * n + n) * LN2, 0.0)
         for n in range(1, n_max + 1)])
