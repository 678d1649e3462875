import math

import numpy as np
import pytest

from hermspec import (
    BasisIndexSet,
    ControlProblem,
    GramMatrix,
    HermiteVector,
    InputError,
    NonControllableError,
    NonObservableError,
    Region,
    SensorSet,
    gram_over_set,
    hum_control,
    norm2_over_set,
    observability_constant_num,
    observability_gramian,
    observability_gramian_quadrature,
    semigroup_apply,
    worst_case_initial_state,
)
from hermspec.rng import SplitMix64


def make_system(N=6, window=True):
    basis = BasisIndexSet(1, N)
    if window:
        S = SensorSet((Region.interval(-20.0, 20.0),))
    else:
        S = SensorSet((Region.interval(0.5, 1.5), Region.interval(-2.0, -1.0)))
    return basis, gram_over_set(basis, S)


def test_semigroup_apply_coefficients():
    basis = BasisIndexSet(1, 2)
    f = HermiteVector(basis, np.array([1.0, 2.0, -1.0]))
    g = semigroup_apply(f, 0.5)
    lam = basis.semigroup_eigenvalues()
    assert g.coeffs == pytest.approx(f.coeffs * np.exp(-lam * 0.5))
    with pytest.raises(InputError):
        semigroup_apply(f, -0.1)


def test_semigroup_contraction():
    basis = BasisIndexSet(2, 3)
    rng = SplitMix64(59)
    f = HermiteVector(basis, rng.unit_coeffs(basis.size))
    assert semigroup_apply(f, 1.0).norm2() < f.norm2()


def test_gramian_scalar_case():
    # N = 0, d = 1: B = G (1 - exp(-2T)) / 2
    basis = BasisIndexSet(1, 0)
    G = GramMatrix(basis, np.array([[0.7]]))
    B = observability_gramian(G, basis, 2.0)
    assert B.entries[0, 0] == pytest.approx(0.7 * (1.0 - math.exp(-4.0)) / 2.0)


def test_gramian_closed_form_vs_quadrature():
    basis, G = make_system(8, window=False)
    B = observability_gramian(G, basis, 1.0)
    Bq = observability_gramian_quadrature(G, basis, 1.0, nodes=100)
    assert np.max(np.abs(B.entries - Bq.entries)) < 1e-12


def test_gramian_requires_positive_horizon():
    basis, G = make_system(2)
    with pytest.raises(InputError):
        observability_gramian(G, basis, 0.0)


def test_nonobservable_empty_set():
    basis = BasisIndexSet(1, 3)
    G = gram_over_set(basis, SensorSet(()))
    B = observability_gramian(G, basis, 1.0)
    with pytest.raises(NonObservableError):
        observability_constant_num(B, basis, 1.0)


def test_noncontrollable_empty_set():
    basis = BasisIndexSet(1, 3)
    G = gram_over_set(basis, SensorSet(()))
    phi0 = HermiteVector(basis, np.array([1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(NonControllableError):
        hum_control(ControlProblem(basis, G, 1.0, phi0))


def test_hum_drives_state_to_zero():
    basis, G = make_system(6, window=False)
    rng = SplitMix64(61)
    phi0 = HermiteVector(basis, rng.unit_coeffs(basis.size))
    res = hum_control(ControlProblem(basis, G, 1.0, phi0))
    assert res.terminal_residual < 1e-10
    assert res.simulated_residual < 1e-10
    assert res.cost > 0.0


def test_hum_cost_identity():
    # minimal-norm cost^2 equals -<eta, exp(-TH) phi0>
    basis, G = make_system(5, window=False)
    rng = SplitMix64(67)
    phi0 = HermiteVector(basis, rng.unit_coeffs(basis.size))
    T = 0.8
    res = hum_control(ControlProblem(basis, G, T, phi0))
    lam = basis.semigroup_eigenvalues()
    g = np.exp(-lam * T) * phi0.coeffs
    assert res.cost ** 2 == pytest.approx(-float(res.eta @ g), rel=1e-10)


def test_hum_trajectory_running_cost_converges_to_total():
    basis, G = make_system(4, window=False)
    rng = SplitMix64(71)
    phi0 = HermiteVector(basis, rng.unit_coeffs(basis.size))
    res = hum_control(ControlProblem(basis, G, 1.0, phi0), with_trajectory=True)
    final_running = res.trajectory[-1][-1]
    assert final_running == pytest.approx(res.cost, rel=1e-4)
    csv = res.trajectory_csv()
    assert csv.splitlines()[0].startswith("t,phi_0")
    assert len(csv.splitlines()) == 1 + len(res.trajectory)


def test_zero_initial_state_costs_nothing():
    basis, G = make_system(3)
    phi0 = HermiteVector(basis, np.zeros(basis.size))
    res = hum_control(ControlProblem(basis, G, 1.0, phi0))
    assert res.cost == 0.0
    assert res.terminal_residual == 0.0


def test_cost_bounded_by_observability_constant():
    basis, G = make_system(6, window=False)
    B = observability_gramian(G, basis, 1.0)
    c_obs = observability_constant_num(B, basis, 1.0)
    rng = SplitMix64(73)
    for _ in range(10):
        phi0 = HermiteVector(basis, rng.unit_coeffs(basis.size))
        res = hum_control(ControlProblem(basis, G, 1.0, phi0))
        assert res.cost <= c_obs * (1.0 + 1e-10)


def test_worst_case_duality():
    basis, G = make_system(6, window=False)
    B = observability_gramian(G, basis, 1.0)
    c_obs = observability_constant_num(B, basis, 1.0)
    phi0 = worst_case_initial_state(G, basis, 1.0)
    assert np.linalg.norm(phi0) == pytest.approx(1.0)
    res = hum_control(ControlProblem(basis, G, 1.0, HermiteVector(basis, phi0)))
    assert res.cost == pytest.approx(c_obs, rel=1e-8)


def test_observability_constant_brute_force():
    # direct maximization of ||exp(-TH) phi|| / sqrt(phi^T B phi) over random phi
    basis, G = make_system(4, window=False)
    T = 1.0
    B = observability_gramian(G, basis, T)
    c_obs = observability_constant_num(B, basis, T)
    lam = basis.semigroup_eigenvalues()
    rng = SplitMix64(79)
    best = 0.0
    for _ in range(2000):
        phi = rng.unit_coeffs(basis.size)
        num = float(np.linalg.norm(np.exp(-lam * T) * phi))
        den = math.sqrt(float(phi @ B.entries @ phi))
        best = max(best, num / den)
    assert best <= c_obs * (1.0 + 1e-12)
    assert best > 0.8 * c_obs  # random search comes close in low dimension


def test_full_window_control_is_cheapest():
    basis = BasisIndexSet(1, 4)
    G_full = gram_over_set(basis, SensorSet((Region.interval(-20, 20),)))
    G_small = gram_over_set(basis, SensorSet((Region.interval(0.0, 1.0),)))
    T = 1.0
    c_full = observability_constant_num(observability_gramian(G_full, basis, T), basis, T)
    c_small = observability_constant_num(observability_gramian(G_small, basis, T), basis, T)
    assert c_full < c_small
