"""Shared Hypothesis profiles for property tests.

Use these instead of inline @settings(max_examples=...):

    from tests.settings import STANDARD_SETTINGS

    @STANDARD_SETTINGS
    @given(...)
    def test_something(...): ...
"""
from hypothesis import HealthCheck, settings

# exact arithmetic on sparse polynomials has no useful per-example deadline
STANDARD_SETTINGS = settings(max_examples=100, deadline=None)

# matrix elimination and substitution properties
QUICK_SETTINGS = settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])

# fraction-free elimination over k[s,t] on row subsets of the quadric table
ELIMINATION_SETTINGS = settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow])
