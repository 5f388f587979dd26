import pytest

from seqcavity import cavity, lattice, oracle
from conftest import box_region, make_state, oracle_box, random_instance

HC1 = cavity.hardcore_model(1.0, 1)
MD1 = cavity.dimer_model(1.0, 1)


def edge_state(model):
    # two vertices {0, 1} on the line
    return make_state(model, (0,), (1,))


def path3_state(model):
    return make_state(model, (-1,), (1,))


def test_seed_base_cases():
    st = edge_state(HC1)
    assert cavity.hardcore_cavity(st, (0,), 0, cavity.PHI) == 1.0
    assert cavity.hardcore_cavity(st, (0,), 0, cavity.PSI) == 0.0
    std = edge_state(MD1)
    assert cavity.dimer_cavity(std, (0,), 0, cavity.PHI) == 1.0
    assert cavity.dimer_cavity(std, (0,), 0, cavity.PSI) == 0.0


def test_isolated_vertex_hardcore():
    st = make_state(HC1, (0,), (0,))
    for seed in (cavity.PHI, cavity.PSI):
        assert cavity.hardcore_cavity(st, (0,), 1, seed) == 0.5


def test_edge_graph_phi_exact():
    """Depth 2 on the 2-vertex graph is already the exact marginal 2/3."""
    st = edge_state(HC1)
    val = cavity.hardcore_cavity(st, (0,), 2, cavity.PHI)
    assert abs(val - 2.0 / 3.0) < 1e-15
    exact = oracle.exact_marginal(oracle_box((0,), (1,)), (0,), HC1)
    assert abs(val - float(exact.value)) < 1e-12


def test_path3_center_phi():
    st = path3_state(HC1)
    val = cavity.hardcore_cavity(st, (0,), 2, cavity.PHI)
    assert abs(val - 0.8) < 1e-15


def test_dimer_single_edge():
    st = edge_state(MD1)
    for t in (2, 3, 5):
        assert abs(cavity.dimer_cavity(st, (0,), t, cavity.PHI) - 0.5) < 1e-15


def test_dimer_path3_center():
    st = path3_state(MD1)
    val = cavity.dimer_cavity(st, (0,), 3, cavity.PHI)
    assert abs(val - 1.0 / 3.0) < 1e-15


def test_dimer_star_lambda2():
    # center at the origin with 3 leaves: remove one of the four unit
    # neighbors from a radius-1 window
    model = cavity.dimer_model(2.0, 2)
    corners = frozenset({(1, -1), (-1, -1)})
    st = make_state(model, (-1, -1), (1, 0), corners)
    val = cavity.dimer_cavity(st, (0, 0), 2, cavity.PHI)
    assert abs(val - 1.0 / 7.0) < 1e-15
    z = oracle.exact_partition_function(
        oracle_box((-1, -1), (1, 0), corners), model)
    assert z.value == 7


def test_memo_key_horizon():
    region = lattice.prec_origin(30)
    far = cavity.CavityState(region, frozenset({(-9, -3)}), HC2())
    near = cavity.CavityState(region, frozenset({(0, -1)}), HC2())
    base = cavity.CavityState(region, frozenset(), HC2())
    v = (0, 0)
    assert cavity.memo_key(far, v, 4, cavity.PHI) == \
        cavity.memo_key(base, v, 4, cavity.PHI)
    assert cavity.memo_key(near, v, 4, cavity.PHI) != \
        cavity.memo_key(base, v, 4, cavity.PHI)
    assert cavity.memo_key(base, v, 4, cavity.PHI) == \
        cavity.memo_key(base, v, 4, cavity.PHI)
    assert cavity.memo_key(base, v, 4, cavity.PHI) != \
        cavity.memo_key(base, v, 4, cavity.PSI)


def HC2():
    return cavity.hardcore_model(1.0, 2)


def test_memoized_and_unmemoized_identical():
    model = cavity.hardcore_model(0.7, 2)
    st = cavity.CavityState(lattice.prec_origin_even(6), frozenset(), model)
    a = cavity.cavity_pair(st, (0, 0), 6, memoize=True)
    b = cavity.cavity_pair(st, (0, 0), 6, memoize=False)
    assert a == b
    modeld = cavity.dimer_model(2.5, 2)
    std = cavity.CavityState(lattice.prec_origin(6), frozenset(), modeld)
    a = cavity.cavity_pair(std, (0, 0), 6, memoize=True)
    b = cavity.cavity_pair(std, (0, 0), 6, memoize=False)
    assert a == b


def test_lambda_monotone_at_depth_one():
    """Phi at depth 1 is 1/(1+lambda), strictly decreasing in lambda."""
    prev = 1.0
    for lam in (0.25, 0.5, 1.0, 2.0, 4.0):
        st = make_state(cavity.hardcore_model(lam, 1), (-1,), (1,))
        val = cavity.hardcore_cavity(st, (0,), 1, cavity.PHI)
        assert abs(val - 1.0 / (1.0 + lam)) < 1e-15
        assert val < prev
        prev = val


def test_lambda_monotonicity_fails_at_depth_two():
    """Deeper values track the exact marginal, which is not monotone.

    On the 3-path the exact center unoccupied probability is
    (1+lam)^2 / ((1+lam)^2 + lam), which increases again for lam > 1;
    the depth-2 recursion is exact there and reproduces that, so no
    global monotonicity in lambda can hold.
    """
    vals = []
    for lam in (1.0, 3.0):
        st = make_state(cavity.hardcore_model(lam, 1), (-1,), (1,))
        vals.append(cavity.hardcore_cavity(st, (0,), 2, cavity.PHI))
        exact = (1 + lam) ** 2 / ((1 + lam) ** 2 + lam)
        assert abs(vals[-1] - exact) < 1e-12
    assert vals[1] > vals[0]


def test_dimer_psi_equals_previous_phi():
    """Psi(t) = Phi(t-1) for the monomer-dimer recursion."""
    model = cavity.dimer_model(1.7, 2)
    st = cavity.CavityState(lattice.prec_origin_even(8), frozenset(), model)
    for t in (2, 5, 8):
        pair_t = cavity.cavity_pair(st, (0, 0), t)
        pair_p = cavity.cavity_pair(st, (0, 0), t - 1)
        assert pair_t[1] == pair_p[0]


def test_exact_convergence_on_finite_graphs(rng):
    for _ in range(12):
        d, lows, highs, removed, target = random_instance(rng, max_vertices=10)
        n = len(lattice.region_points(box_region(lows, highs), d))
        for model_f in (cavity.hardcore_model, cavity.dimer_model):
            model = model_f(1.0, d)
            st = make_state(model, lows, highs, removed)
            phi, psi = cavity.cavity_pair(st, target, n + 1)
            exact = oracle.exact_marginal(
                oracle_box(lows, highs, removed), target, model)
            assert abs(phi - psi) < 1e-13
            assert abs(phi - float(exact.value)) < 1e-12


def test_values_in_unit_interval(rng):
    for _ in range(8):
        d, lows, highs, removed, target = random_instance(rng)
        for lam in (0.3, 3.0):
            st = make_state(cavity.hardcore_model(lam, d), lows, highs,
                            removed)
            for t in (1, 2, 5):
                phi, psi = cavity.cavity_pair(st, target, t)
                assert 0.0 < phi <= 1.0 and 0.0 < psi <= 1.0


def test_lambda_zero_degenerates_to_one():
    st = cavity.CavityState(lattice.prec_origin(4), frozenset(),
                            cavity.hardcore_model(0.0, 2))
    assert cavity.cavity_pair(st, (0, 0), 3) == (1.0, 1.0)


def test_window_too_small_raises():
    st = cavity.CavityState(lattice.prec_origin(3), frozenset(), HC2())
    with pytest.raises(ValueError):
        cavity.hardcore_cavity(st, (0, 0), 5, cavity.PHI)


def test_finite_box_allows_depth_beyond_window():
    # the box dies out well inside the window, so deep recursion is fine
    st = make_state(HC1, (-1,), (1,))
    val = cavity.hardcore_cavity(st, (0,), 25, cavity.PHI)
    assert abs(val - 0.8) < 1e-15


def test_model_kind_mismatch():
    st = edge_state(HC1)
    with pytest.raises(ValueError):
        cavity.dimer_cavity(st, (0,), 2, cavity.PHI)


def test_marginal_bounds_degenerate_cases():
    iv = cavity.marginal_bounds(edge_state(HC1), (0,), 2)
    assert iv.contains(2.0 / 3.0)
    assert iv.width < 1e-12
    iv = cavity.marginal_bounds(path3_state(MD1), (0,), 3)
    assert iv.contains(1.0 / 3.0)
    assert iv.width < 1e-12


def test_marginal_bounds_t1_isolated():
    st = make_state(cavity.hardcore_model(1.0, 1), (0,), (0,))
    iv = cavity.marginal_bounds(st, (0,), 1)
    assert iv.contains(0.5) and iv.width < 1e-12


def test_marginal_bounds_requires_positive_depth():
    with pytest.raises(ValueError):
        cavity.marginal_bounds(edge_state(HC1), (0,), 0)
