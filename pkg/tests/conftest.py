import pytest

from cubicmonodromy import monodromy


@pytest.fixture(scope="session")
def claim_results():
    """One shared run of the full claim suite (budget 40, seed 0)."""
    return monodromy.run_claim_suite(budget=40, seed=0)
