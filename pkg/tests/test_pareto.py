import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from molts import pareto
from molts.errors import ArgumentError
from molts.pareto import TOL_DOM, FrontKind

from oracles import grid_effective_gaps, mixing_grid_gap, pairwise_pareto, simplex_grid

TRIANGLE = [(1.0, 0.0), (0.0, 1.0), (0.4, 0.4)]


def tables(max_arms=8, max_obj=4, lo=-1.0, hi=1.0):
    return st.tuples(st.integers(1, max_arms), st.integers(1, max_obj)).flatmap(
        lambda s: arrays(np.float64, s, elements=st.floats(lo, hi, allow_nan=False, width=32)))


def test_dominates_examples():
    assert pareto.dominates((1, 1), (0.5, 0.5))
    assert not pareto.dominates((1, 0), (0, 1))
    assert not pareto.dominates((0, 1), (1, 0))
    assert not pareto.dominates((1, 1), (1, 1))
    with pytest.raises(ArgumentError):
        pareto.dominates((1, 1), (1, 1, 1))


def test_pareto_front_examples():
    assert pareto.pareto_front([(1, 1), (0.5, 0.5)]).members == (0,)
    assert pareto.pareto_front(TRIANGLE).members == (0, 1, 2)
    assert pareto.pareto_front([(1, 1), (1, 1)]).members == (0, 1)
    assert pareto.pareto_front(TRIANGLE).kind is FrontKind.PARETO


def test_effective_front_examples():
    front = pareto.effective_front(TRIANGLE)
    assert front.members == (0, 1) and front.kind is FrontKind.EFFECTIVE
    assert pareto.effective_front([(1, 1), (0.5, 0.5)]).members == (0,)
    assert pareto.effective_front([(0.3, -0.2, 0.9)]).members == (0,)


def test_triangle_against_beta_grid():
    # Arm 2 is beaten by the midpoint mix: grid optimum 0.1 at (0.5, 0.5, 0).
    grid = simplex_grid(3, 1e-2)
    t = np.array(TRIANGLE)
    vals = np.min(grid @ t - t[2], axis=1)
    assert vals.max() == pytest.approx(0.1)
    assert pareto.effective_gap(TRIANGLE, 2) == pytest.approx(0.1, abs=1e-12)


def test_gap_examples():
    assert pareto.pareto_gap([(1, 1), (0.5, 0.5)], 1) == pytest.approx(0.5)
    assert pareto.effective_gap([(1, 1), (0.5, 0.5)], 1) == pytest.approx(0.5)
    assert pareto.pareto_gap(TRIANGLE, 2) == 0.0
    assert pareto.pareto_gap(TRIANGLE, 0) == 0.0
    assert pareto.effective_gap(TRIANGLE, 0) == 0.0
    assert mixing_grid_gap([(1, 1), (0.5, 0.5)], 1, 1e-3) == pytest.approx(0.5)


def test_index_errors():
    with pytest.raises(ArgumentError):
        pareto.pareto_gap(TRIANGLE, 3)
    with pytest.raises(ArgumentError):
        pareto.effective_gap(TRIANGLE, -1)
    with pytest.raises(ArgumentError):
        pareto.weight_for_arm(TRIANGLE, 5)


def test_table_validation():
    with pytest.raises(ArgumentError):
        pareto.pareto_front([[np.nan, 1.0]])
    with pytest.raises(ArgumentError):
        pareto.pareto_front(np.zeros((0, 2)))


def test_scalarized_argmax_examples():
    assert pareto.scalarized_argmax([(1, 0), (0, 1)], (1, 0)) == (0,)
    assert pareto.scalarized_argmax([(1, 0), (0, 1)], (0.5, 0.5)) == (0, 1)
    with pytest.raises(ArgumentError):
        pareto.scalarized_argmax([(1, 0), (0, 1)], (0.7, 0.7))
    with pytest.raises(ArgumentError):
        pareto.scalarized_argmax([(1, 0), (0, 1)], (1.5, -0.5))


def test_weight_for_arm_examples():
    assert np.allclose(pareto.weight_for_arm([(0.2, 0.5, 0.1)], 0), [1 / 3] * 3)
    w = pareto.weight_for_arm([(1, 0), (0, 1)], 0)
    assert w[0] >= w[1] and abs(w.sum() - 1) < 1e-9
    assert pareto.weight_for_arm(TRIANGLE, 2) is None
    # Grid cross-check: no weight lets arm 2 catch both others.
    W = simplex_grid(2, 1e-3)
    lead = W @ (np.array(TRIANGLE[2]) - np.array(TRIANGLE[:2])).T
    assert lead.min(axis=1).max() < 0


def test_duplicates_all_members():
    t = [(0.5, 0.5), (0.5, 0.5), (1.0, 0.0)]
    assert pareto.pareto_front(t).members == (0, 1, 2)
    assert pareto.effective_front(t).members == (0, 1, 2)


def test_dominated_below_hull_is_excluded():
    t = [(1.0, 0.0), (0.0, 1.0), (0.5, 0.4)]
    assert pareto.effective_front(t).members == (0, 1)
    assert pareto.effective_gap(t, 2) == pytest.approx(0.05, abs=1e-12)


def test_zero_gap_without_membership():
    # Beaten in one coordinate and tied in the other: both gaps vanish,
    # yet the arm is in neither front.
    t = [(1.0, 1.0), (1.0, 0.5)]
    assert pareto.pareto_front(t).members == (0,)
    assert pareto.effective_front(t).members == (0,)
    assert pareto.pareto_gap(t, 1) == 0.0 and pareto.effective_gap(t, 1) == 0.0


def test_on_hull_point_is_kept():
    # Exactly on the segment between the two extremes: coincidence, not dominance.
    t = [(1.0, 0.0), (0.0, 1.0), (0.5, 0.5)]
    assert pareto.effective_front(t).members == (0, 1, 2)


def test_support_choices_agree():
    rng = np.random.default_rng(3)
    for _ in range(300):
        K, L = rng.integers(2, 12), rng.integers(2, 5)
        t = rng.uniform(-1, 1, (K, L))
        everyone = np.arange(K)
        front = pareto.effective_front(t)
        assert front == pareto.effective_front(t, support=everyone)
        for a in range(K):
            # Leaving the candidate out of the mix does not change membership.
            others = np.delete(everyone, a)
            assert (a in front) == (a in pareto.effective_front(t, support=np.r_[others, a]))
            if K > 1 and a in pareto.pareto_front(t):
                excl = pareto._is_effective(t, a, others)
                assert excl == (a in front)
        full = np.array([pareto.effective_gap(t, a) for a in range(K)])
        assert np.allclose(full, pareto.effective_gaps(t), atol=1e-9)
        assert np.allclose(full, pareto.effective_gaps(t, support=front.members), atol=1e-9)


def test_pareto_front_matches_pairwise_loop():
    rng = np.random.default_rng(8)
    for _ in range(500):
        K, L = rng.integers(1, 15), rng.integers(1, 5)
        # Coarse values force ties and duplicates.
        t = rng.integers(0, 4, (K, L)) / 4.0
        assert pareto.pareto_front(t).members == pairwise_pareto(t)


def test_grid_oracle_small_tables():
    rng = np.random.default_rng(12)
    for _ in range(60):
        K, L = rng.integers(1, 7), rng.integers(1, 4)
        t = rng.uniform(0, 1, (K, L))
        grid = grid_effective_gaps(t)
        members = {a for a in range(K) if grid[a] == 0.0}
        assert set(pareto.effective_front(t)) == members
        assert np.all(np.abs(pareto.effective_gaps(t) - grid) <= 2e-3)


def test_max_effective_gap_matches_full_scan():
    rng = np.random.default_rng(4)
    for _ in range(200):
        K, L = rng.integers(1, 30), rng.integers(1, 5)
        t = rng.uniform(-1, 1, (K, L))
        assert pareto.max_effective_gap(t) == pytest.approx(pareto.effective_gaps(t).max(), abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(tables())
def test_front_and_gap_laws(t):
    pf = pareto.pareto_front(t)
    ef = pareto.effective_front(t)
    assert len(pf) >= 1 and len(ef) >= 1
    assert set(ef) <= set(pf)
    pg = pareto.pareto_gaps(t)
    eg = pareto.effective_gaps(t)
    assert np.all(pg >= 0) and np.all(pg <= eg)
    assert all(pg[a] == 0.0 for a in pf)
    assert all(eg[a] == 0.0 for a in ef)
    for a in range(t.shape[0]):
        assert pareto.pareto_gap(t, a) == pg[a]


@settings(max_examples=200, deadline=None)
@given(tables(), st.floats(-3, 3))
def test_uniform_shift_invariance(t, shift):
    # Shifts well above the dominance tolerance cannot flip a decision made on a
    # margin of at least 1e-6; keep entries on a coarse lattice so none are that close.
    t = np.round(t * 64) / 64
    shift = round(shift * 64) / 64
    s = t + shift
    assert pareto.pareto_front(t) == pareto.pareto_front(s)
    assert pareto.effective_front(t) == pareto.effective_front(s)
    assert np.allclose(pareto.pareto_gaps(t), pareto.pareto_gaps(s), atol=1e-12)
    assert np.allclose(pareto.effective_gaps(t), pareto.effective_gaps(s), atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.integers(1, 12), elements=st.floats(-1, 1, allow_nan=False, width=32)))
def test_single_objective_degenerates_to_argmax(mu):
    t = mu[:, None]
    best = tuple(int(a) for a in np.flatnonzero(mu >= mu.max() - TOL_DOM))
    assert pareto.pareto_front(t).members == best
    assert pareto.effective_front(t).members == best
    gaps = np.where(mu.max() - mu > TOL_DOM, mu.max() - mu, 0.0)
    assert np.allclose(pareto.pareto_gaps(t), gaps, atol=1e-12)
    assert np.allclose(pareto.effective_gaps(t), gaps, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(tables(max_arms=8, max_obj=4), st.randoms(use_true_random=False))
def test_scalarization_correspondence(t, rnd):
    ef = pareto.effective_front(t)
    L = t.shape[1]
    rng = np.random.default_rng(rnd.getrandbits(32))
    for w in rng.dirichlet(np.ones(L), size=20):
        arg = pareto.scalarized_argmax(t, w)
        if len(arg) == 1:
            assert arg[0] in ef
    for a in ef:
        w = pareto.weight_for_arm(t, a)
        assert w is not None
        assert a in pareto.scalarized_argmax(t, w)


@settings(max_examples=100, deadline=None)
@given(tables(max_arms=4, max_obj=2, lo=0.0, hi=1.0))
def test_effective_gap_matches_mixing_grid(t):
    assume(t.shape[0] <= 3)
    step = 1e-2 if t.shape[0] == 3 else 1e-3
    for a in range(t.shape[0]):
        g = max(0.0, mixing_grid_gap(t, a, step))
        assert abs(pareto.effective_gap(t, a) - g) <= 2 * step
