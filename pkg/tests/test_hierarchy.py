import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermosteady import hierarchy
from thermosteady.errors import DomainError, IntegrationError, ValidationError
from thermosteady.hierarchy import (
    Boundary,
    ConductiveLink,
    RadiativeLink,
    Reservoir,
    ReservoirChain,
    Surface,
)
from thermosteady.runner import find_shipped, run_scenario

SIGMA = 5.670374419e-8


def test_worked_example_arithmetic():
    v = hierarchy.reservoir_validity(1000.0, 0.1, 10.0, 0.01)
    assert v.bound_seconds == pytest.approx(100.0, rel=1e-15)
    assert v.margin == pytest.approx(10.0, rel=1e-15)
    assert v.holds
    edge = hierarchy.reservoir_validity(1000.0, 0.1, 100.0, 0.01)
    assert edge.margin == pytest.approx(1.0) and not edge.holds
    with pytest.raises(DomainError):
        hierarchy.reservoir_validity(1000.0, 0.0, 10.0, 0.01)


def test_single_linear_reservoir_drift_matches_bound():
    c, k, t0, tb = 1000.0, 0.1, 4.0, 300.0
    chain = ReservoirChain([Reservoir("bath", c, t0)], [], Boundary(tb, ConductiveLink(k)))
    tau = 0.05 * c / k
    run = hierarchy.simulate_chain(chain, tau, n_samples=11)
    drift = run.temperatures[-1, 0] - t0
    q_dot = k * (tb - t0)
    predicted = hierarchy.reservoir_validity(c, q_dot, tau, 0.01).predicted_drift(tau, 0.01)
    assert predicted == pytest.approx(q_dot * tau / c)
    assert drift == pytest.approx(predicted, rel=0.05)
    # closed form of the linear ODE
    assert drift == pytest.approx((tb - t0) * (1 - math.exp(-k * tau / c)), rel=1e-7)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 1e6), st.floats(1e-3, 10.0), st.floats(0.01, 1.0))
def test_bound_is_at_most_ten_times_pessimistic(c, k, x):
    # experiments no longer than one relaxation time C/k
    tb, t0, tol = 310.0, 300.0, 10.0
    chain = ReservoirChain([Reservoir("bath", c, t0)], [], Boundary(tb, ConductiveLink(k)))
    tau = x * c / k
    run = hierarchy.simulate_chain(chain, tau, n_samples=5)
    drift = abs(run.temperatures[-1, 0] - t0)
    q_peak = float(np.abs(run.boundary_flows[:, 0]).max())
    predicted = hierarchy.reservoir_validity(c, q_peak, tau, tol).predicted_drift(tau, tol)
    assert drift <= predicted * (1 + 1e-6)
    assert predicted <= 10 * drift


def test_insulated_equal_chain_is_constant():
    nodes = [Reservoir(f"r{i}", 10.0 ** i, 77.0) for i in range(4)]
    chain = ReservoirChain(nodes, [ConductiveLink(1.0)] * 3, Boundary())
    run = hierarchy.simulate_chain(chain, 1e4)
    assert np.all(run.temperatures == 77.0)
    rows = hierarchy.effective_reservoir_report(chain, 0, 100.0, 0.01, run=run)
    assert all(r.margin == math.inf and r.holds for r in rows)


def test_single_node_radiative_fixed_point():
    p, eps, area = 1000.0, 0.8, 2.0
    t_star = (p / (SIGMA * eps * area)) ** 0.25
    chain = ReservoirChain([Reservoir("body", 5e4, t_star, generation=p, surface=Surface(area, eps))])
    run = hierarchy.simulate_chain(chain, 1e5)
    assert np.max(np.abs(run.temperatures[:, 0] - t_star)) < 1e-6 * t_star
    # relaxes to it from either side
    for start in (0.5 * t_star, 1.5 * t_star):
        c2 = ReservoirChain([Reservoir("body", 5e3, start, generation=p, surface=Surface(area, eps))])
        r2 = hierarchy.simulate_chain(c2, 1e6)
        assert r2.temperatures[-1, 0] == pytest.approx(t_star, rel=1e-6)


def test_cryostat_warms_monotonically():
    chain = ReservoirChain(
        [Reservoir("sample", 1.0, 4.0), Reservoir("cryostat", 100.0, 4.0)],
        [ConductiveLink(0.01)],
        Boundary(300.0, ConductiveLink(0.01)),
    )
    run = hierarchy.simulate_chain(chain, 2e5)
    t = run.temperatures[:, 0]
    assert np.all(np.diff(t) >= 0)
    assert t[-1] == pytest.approx(300.0, rel=1e-3)
    assert run.second_law_ok()


def test_radiative_link_sign():
    link = RadiativeLink(1.0, 1.0)
    assert link.flow(300.0, 200.0) > 0 > link.flow(200.0, 300.0)
    assert link.flow(250.0, 250.0) == 0.0
    assert link.flow(300.0, 0.0) == pytest.approx(SIGMA * 300.0 ** 4, rel=1e-9)


def random_chain(data):
    n = data.draw(st.integers(1, 4))
    nodes = []
    for i in range(n):
        surf = Surface(data.draw(st.floats(0.1, 10.0)), data.draw(st.floats(0.1, 1.0))) if i == n - 1 else None
        nodes.append(Reservoir(
            f"n{i}", data.draw(st.floats(10.0, 1e5)), data.draw(st.floats(50.0, 500.0)),
            generation=data.draw(st.floats(0.0, 100.0)), surface=surf,
        ))
    links = [
        data.draw(st.sampled_from([ConductiveLink(data.draw(st.floats(0.01, 10.0))),
                                   RadiativeLink(data.draw(st.floats(0.1, 5.0)), 0.9)]))
        for _ in range(n - 1)
    ]
    return ReservoirChain(nodes, links, Boundary())


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_energy_closure_and_second_law(data):
    chain = random_chain(data)
    run = hierarchy.simulate_chain(chain, data.draw(st.floats(10.0, 1e4)), n_samples=21)
    assert run.energy_residual() < 1e-6
    assert run.second_law_ok()
    for k, temps in enumerate(run.temperatures):
        for i, f in enumerate(run.link_flows[k]):
            assert f == 0 or np.sign(f) == np.sign(temps[i] ** 4 - temps[i + 1] ** 4)


@settings(max_examples=20, deadline=None)
@given(st.data())
def test_unmaintained_chain_cools(data):
    chain = random_chain(data)
    bare = ReservoirChain(
        [Reservoir(r.name, r.capacity, r.temperature, surface=r.surface) for r in chain.reservoirs],
        chain.links, Boundary(),
    )
    run = hierarchy.simulate_chain(bare, 1e4, n_samples=21)
    assert np.all(np.diff(run.total_energy()) <= 1e-9 * abs(run.total_energy()[0]))


def test_positivity_floor_raises():
    chain = ReservoirChain([Reservoir("a", 1.0, 1.0, extraction=1.0)])
    with pytest.raises(IntegrationError) as info:
        hierarchy.simulate_chain(chain, 10.0)
    assert info.value.node == "a"
    assert 0.9 < info.value.time < 1.0


def test_chain_validation():
    with pytest.raises(ValidationError):
        Reservoir("x", 0.0, 300.0)
    with pytest.raises(ValidationError):
        ReservoirChain([Reservoir("a", 1.0, 1.0), Reservoir("b", 1.0, 1.0)], [])
    single = ReservoirChain([Reservoir("a", 1.0, 1.0)])
    assert hierarchy.effective_reservoir_report(single, 0, 10.0, 0.01) == []


def test_five_level_margins_increase():
    result = run_scenario(find_shipped("five-level-hierarchy"))
    margins = [r.margin for r in result.data["report"]]
    assert margins == sorted(margins) and len(set(margins)) == len(margins)
    assert all(r.holds for r in result.data["report"])
    assert result.data["closure"] < 1e-6
    # steady: each level stays within 1 mK over the hour
    temps = result.data["run"].temperatures
    assert np.max(np.abs(temps - temps[0])) < 1e-3
