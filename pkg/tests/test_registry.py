"""Problem registry: keys, defaults, parameter merging, bundled forms."""

import math

import pytest

from sddlab.closed_forms import max_abs_residual
from sddlab.errors import DomainError
from sddlab.registry import (REGISTRY, build_problem, const_phi_solution,
                             entry_for, key_history, resolve_params,
                             solutions_for)

ALL_KEYS = {"driver1963", "example2010", "key2026", "linear-ic", "const-phi",
            "quadratic-delay", "zero-f"}


def test_registry_keys():
    assert set(REGISTRY) == ALL_KEYS
    assert entry_for("key2026").supports_families
    assert sum(e.supports_families for e in REGISTRY.values()) == 1


def test_unknown_key_lists_known_ones():
    with pytest.raises(DomainError, match="key2026"):
        entry_for("missing")


def test_resolve_params():
    assert resolve_params("key2026") == {
        "A": 1.0, "B": 1.0, "alpha": 0.5, "beta": 0.5, "delta": 0.5}
    merged = resolve_params("key2026", {"A": 2, "beta": 0.25})
    assert merged["A"] == 2.0 and merged["beta"] == 0.25
    with pytest.raises(DomainError, match="does not take"):
        resolve_params("key2026", {"gamma": 1.0})
    with pytest.raises(DomainError, match="does not take"):
        resolve_params("const-phi", {"alpha": 0.5})


def test_build_all_defaults():
    for key in ALL_KEYS:
        p = build_problem(key)
        assert p.name == key


def test_horizons_and_planes():
    assert entry_for("key2026").working_horizon == 3.0
    assert entry_for("driver1963").working_horizon == 2.0
    assert entry_for("driver1963").plane == (1.0, 0.0)
    assert entry_for("quadratic-delay").plane is None
    assert entry_for("zero-f").plane is None


def test_key_history_connector_is_continuous():
    phi = key_history(resolve_params("key2026"))
    assert phi.evaluate(0.0) == 1.0
    assert phi.evaluate(-1.0) == -1.0
    left = -1.0 + (1.0 - 0.5) ** 0.5
    assert phi.evaluate(-0.5) == pytest.approx(left, abs=1e-15)
    assert not phi.continuity_violations()


def test_quadratic_variant_extends_history_flat():
    p = build_problem("quadratic-delay")
    assert p.phi.span == (-4.0, 0.0)
    assert p.phi.evaluate(-3.0) == -2.0
    assert p.delay.h == 4.0


def test_const_phi_solution_validation():
    t_max = 0.5 - math.log(0.75)
    with pytest.raises(DomainError):
        const_phi_solution(t_max + 1e-6)
    with pytest.raises(DomainError):
        const_phi_solution(0.0)
    sol = const_phi_solution(t_max)
    assert sol.window == (0.0, t_max)


def test_solutions_for_counts():
    assert len(solutions_for("driver1963")) == 2
    assert len(solutions_for("key2026"))  == 3
    assert len(solutions_for("key2026", taus=(0.0, 0.3))) == 5
    assert len(solutions_for("example2010", {"alpha": 0.25})) == 3
    assert len(solutions_for("linear-ic")) == 1
    for key in ("quadratic-delay", "zero-f"):
        with pytest.raises(DomainError, match="no registered closed forms"):
            solutions_for(key)


def test_registered_forms_actually_solve():
    for key in ("driver1963", "example2010", "key2026", "linear-ic", "const-phi"):
        p = build_problem(key)
        for sol in solutions_for(key):
            assert max_abs_residual(p, sol, n=60) <= 1e-11, (key, sol.label)
