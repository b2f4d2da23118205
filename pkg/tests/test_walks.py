import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergodiclab.groups import FreeGroup, GroupError, Heisenberg, IntegerLattice, growth_rates
from ergodiclab.walks import (StepDistribution, WalkError, character_check, character_drift, drift,
                              empirical_stationary_measure, fk_check, first_letter_probability,
                              harmonicity_residual, random_elements, sample_walk)

import oracles

F2 = FreeGroup(2)
SRW = StepDistribution.uniform(F2.generators())


def test_lattice_delta_walk():
    Z = IntegerLattice(1)
    w = sample_walk(Z, StepDistribution([1], [1.0]), 5)
    assert w.lengths.tolist() == [0, 1, 2, 3, 4, 5]


def test_free_group_drift():
    wd = drift(F2, SRW, 10 ** 5, trials=10, seed=1)
    assert abs(wd.value - oracles.free_group_drift(2)) < 0.01


def test_heisenberg_centered_drift():
    H = Heisenberg()
    wd = drift(H, StepDistribution.uniform(H.generators()), 10 ** 4, trials=10, seed=2)
    assert wd.value <= 0.05


def test_heisenberg_ball_counts_match_matrix_bfs():
    assert Heisenberg(exact_radius=8).ball_counts(8) == oracles.heisenberg_ball_counts(8)
    rates = growth_rates(Heisenberg(exact_radius=12).ball_counts(12))
    assert rates[-1] < rates[len(rates) // 2]


def test_heisenberg_length_bounds_bracket_exact():
    H = Heisenberg(exact_radius=10)
    for g, r in list(H.table.items())[::37]:
        lo, hi = H.length_bounds(*g)
        assert lo <= r <= hi


def test_heisenberg_word_length_outside_ball():
    H = Heisenberg(exact_radius=4)
    assert H.word_length((20, 0, 0)) == 20
    with pytest.raises(GroupError):
        H.word_length((3, 3, 40))


def test_lattice_character_drift():
    Z2 = IntegerLattice(2)
    nu = StepDistribution([(1, 0), (-1, 0), (0, 1), (0, -1)], [0.5, 1 / 6, 1 / 6, 1 / 6])
    T, value = character_drift(Z2, nu)
    assert value == pytest.approx(1 / 3)
    rep = character_check(Z2, nu, 10 ** 4, trials=10, seed=3)
    assert rep.passed and abs(rep.drift - 1 / 3) < 0.01


def test_lattice_line_character():
    Z = IntegerLattice(1)
    T, value = character_drift(Z, StepDistribution([1, -1], [0.7, 0.3]))
    assert T.coeffs == (1.0,) and value == pytest.approx(0.4)


def test_symmetric_character_zero():
    for G in (IntegerLattice(3), Heisenberg()):
        nu = StepDistribution.uniform(G.generators())
        assert character_drift(G, nu)[1] == 0.0


def test_free_group_is_not_liouville():
    with pytest.raises(WalkError):
        character_drift(F2, SRW)


def test_identity_step_has_zero_drift():
    nu = StepDistribution([()], [1.0])
    assert drift(F2, nu, 100, trials=2).value == 0.0
    Z = IntegerLattice(2)
    assert drift(Z, StepDistribution([(0, 0)], [1.0]), 100, trials=2).value == 0.0


def test_stationary_measure_cylinders():
    mu = empirical_stationary_measure(F2, SRW, 5000, trials=40, seed=4, depth=2)
    first = {}
    for word, p in mu.cylinders.items():
        first[word[0]] = first.get(word[0], 0.0) + p
    for letter in (1, -1, 2, -2):
        assert abs(first[letter] - 0.25) < 0.01
    # hitting measure of a depth-2 cylinder: 1/4 * 1/3
    assert abs(mu.mass((1, 1)) - oracles.harmonic_cylinder(2)) < 0.01


def test_stationarity_residual_shrinks():
    r1 = empirical_stationary_measure(F2, SRW, 64, trials=1000, seed=5, depth=1).residual
    r2 = empirical_stationary_measure(F2, SRW, 128, trials=1000, seed=5, depth=1).residual
    assert r2 < r1


def test_lattice_delta_measure():
    mu = empirical_stationary_measure(IntegerLattice(1), StepDistribution([1], [1.0]), 50, trials=2)
    assert mu.cylinders == {(1,): 1.0}


def test_fk_free_group():
    wd = drift(F2, SRW, 10 ** 4, trials=10, seed=6)
    mu = empirical_stationary_measure(F2, SRW, 10 ** 4, trials=10, seed=7, depth=2)
    rep = fk_check(F2, SRW, mu, wd, samples=10 ** 4, seed=8)
    assert rep.passed
    assert abs(rep.rhs - 0.5) < 0.02


def test_fk_lattice_delta_exact():
    Z = IntegerLattice(1)
    nu = StepDistribution([1], [1.0])
    wd = drift(Z, nu, 200, trials=2)
    mu = empirical_stationary_measure(Z, nu, 200, trials=2)
    rep = fk_check(Z, nu, mu, wd, samples=500)
    assert rep.rhs == 1.0 and rep.drift == 1.0 and rep.passed


def test_fk_identity_step():
    nu = StepDistribution([()], [1.0])
    mu = empirical_stationary_measure(F2, nu, 50, trials=2, depth=1)
    rep = fk_check(F2, nu, mu, drift(F2, nu, 50, trials=2), samples=100)
    assert rep.rhs == 0 and rep.drift == 0 and rep.passed


def test_harmonic_functions():
    f = first_letter_probability(1, 2)
    pts = random_elements(F2, 300, seed=9)
    assert harmonicity_residual(F2, SRW, f, pts) <= 1e-9
    assert harmonicity_residual(F2, SRW, lambda g: 3.0, pts) == 0
    Z = IntegerLattice(1)
    assert harmonicity_residual(Z, StepDistribution([1, -1], [0.5, 0.5]), lambda g: g[0],
                                random_elements(Z, 50)) == 0
    # nonconstant and bounded
    assert f(()) == 0.25 and f((1,) * 30) > 0.99 and f((2,) * 30) < 1e-10


def test_first_letter_probability_matches_chain():
    f = first_letter_probability(1, 2)
    for m in (1, 2, 5):
        # from b^m the walk must come back to e to pick up the letter a
        assert abs(f((2,) * m) - 0.25 * oracles.return_probability(m)) < 1e-12


def test_step_distribution_validation():
    with pytest.raises(WalkError):
        StepDistribution([(1,)], [0.5])
    nu = StepDistribution([(1,)], [1.0]).validate(F2)
    assert nu.nondegenerate is False
    assert SRW.validate(F2).nondegenerate and SRW.is_symmetric(F2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_word_metric_axioms(seed):
    for G in (F2, IntegerLattice(2), Heisenberg(exact_radius=10)):
        x, y, z = random_elements(G, 3, seed=seed, max_len=4)
        assert G.distance(x, x) == 0
        assert G.distance(x, y) == G.distance(y, x)
        assert G.distance(x, z) <= G.distance(x, y) + G.distance(y, z)
        g = random_elements(G, 1, seed=seed + 1, max_len=4)[0]
        assert G.distance(G.multiply(g, x), G.multiply(g, y)) == G.distance(x, y)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32), n=st.integers(1, 300))
def test_walk_lengths_are_one_lipschitz(seed, n):
    w = sample_walk(F2, SRW, n, seed=seed)
    assert np.all(np.abs(np.diff(w.lengths)) == 1)
    assert w.lengths[-1] == len(w.final)
