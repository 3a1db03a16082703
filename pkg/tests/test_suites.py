"""Full verification suites: the only failing checks are the documented ones."""

import pytest

from genfourier import Params
from genfourier.suites import SUITES, GridConfig, run_suites

# algebra.f_tilde: the three f~ constructions disagree for l >= 1.
# schwartz.sandwich_lower: counterexample at n = 1 (odd_pow_s1, alpha = beta = l = 1).
KNOWN = {
    (1.0, 1): {"algebra.f_tilde", "schwartz.sandwich_lower"},
    (0.8, 2): {"algebra.f_tilde"},
    (1.0, 3): {"algebra.f_tilde"},
}


@pytest.mark.parametrize("kn", list(KNOWN), ids=lambda kn: f"k={kn[0]:g},n={kn[1]}")
def test_only_known_failures(kn):
    reports = run_suites(Params(*kn), GridConfig(), suites=SUITES)
    failed = {r.name for r in reports if r.status != "pass"}
    assert failed == KNOWN[kn]
    assert {r.name.split(".")[0] for r in reports} == set(SUITES)
