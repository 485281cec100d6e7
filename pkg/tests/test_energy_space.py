import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from energynet import families as fam
from energynet.energy_space import (
    dipole,
    effective_resistance,
    energy_kernel,
    harmonic_subspace,
    resistance_matrix,
    royden_project,
    schur_reduce,
)
from energynet.graph_core import (
    Network,
    NetworkError,
    VertexFunction,
    apply_laplacian,
    energy_form,
    energy_norm,
    laplacian_values,
    random_connected_network,
    sup_seminorm,
)

from conftest import pinv_dipole, pinv_resistance, random_function, random_networks


class TestDipole:
    def test_path(self):
        v = dipole(fam.path(2), "2", "0")
        assert v.values.tolist() == pytest.approx([0.0, 1.0, 2.0], abs=1e-14)

    def test_triangle(self):
        net = fam.complete(3)
        v = dipole(net, "1", "2")
        assert v["1"] - v["2"] == pytest.approx(2 / 3, abs=1e-14)
        # pseudo-inverse oracle
        np.testing.assert_allclose(v.values, pinv_dipole(net, "1", "2"), atol=1e-12)

    def test_same_vertex_is_zero(self):
        assert np.all(dipole(fam.path(3), "2", "2").values == 0.0)

    def test_dipole_equation_on_random(self, rng):
        net = random_connected_network(rng, 11)
        for x, y in [("3", "7"), ("0", "10"), ("5", "0")]:
            v = dipole(net, x, y)
            lap = laplacian_values(net, v.values)
            expected = np.zeros(11)
            expected[net.index[x]] += 1
            expected[net.index[y]] -= 1
            assert np.max(np.abs(lap - expected)) <= 1e-9
            np.testing.assert_allclose(v.values, pinv_dipole(net, x, y), atol=1e-9)

    def test_disconnected_names_components(self):
        net = Network("abcd", [("a", "b", 1), ("c", "d", 1)], "a")
        with pytest.raises(NetworkError, match=r"\{a, b\}.*\{c, d\}"):
            dipole(net, "a", "c")

    def test_geometric_matches_closed_form(self):
        net = fam.geometric_integers(30, 2.0)
        for n in (1, 2, 5, -5):
            assert dipole(net, str(n), "0").max_abs_diff(fam.closed_form_dipole(2.0, 30, n)) <= 1e-6


class TestEnergyKernel:
    def test_origin_dipole_is_zero(self, rng):
        net = random_connected_network(rng, 7)
        assert np.all(energy_kernel(net)[net.origin].values == 0.0)

    def test_kernel_symmetry(self, rng):
        net = random_connected_network(rng, 8)
        k = energy_kernel(net)
        for x, y in itertools.product(net.vertices, repeat=2):
            assert energy_form(net, k[x], k[y]) == pytest.approx(k[y][x], abs=1e-10)

    def test_triangle_self_energy(self):
        net = fam.complete(3)
        k = energy_kernel(net)
        assert energy_form(net, k["1"], k["1"]) == pytest.approx(2 / 3, abs=1e-14)

    def test_span_dimension(self, rng):
        net = random_connected_network(rng, 9)
        assert np.linalg.matrix_rank(energy_kernel(net).matrix) == 8

    def test_reproducing(self, rng):
        net = random_connected_network(rng, 10)
        k = energy_kernel(net)
        for _ in range(20):
            u = random_function(rng, net)
            np.testing.assert_allclose(k.reproduce(u), u.values, atol=1e-8)

    def test_nonnegative_and_bounded(self):
        for net in random_networks(3, 15):
            k = energy_kernel(net)
            for x in net.vertices:
                if x == net.origin:
                    continue
                v = k[x]
                others = np.delete(v.values, net.origin_index)
                assert np.all(others >= -1e-12)
                assert v[x] > 0
                assert sup_seminorm(v) <= effective_resistance(net, x, net.origin) + 1e-9

    def test_green_identity(self, rng):
        net = random_connected_network(rng, 9)
        k = energy_kernel(net)
        for x, y in itertools.product(net.vertices, repeat=2):
            if net.origin in (x, y):
                continue
            value = energy_form(net, k[x], apply_laplacian(net, k[y]))
            assert value == pytest.approx((x == y) + 1.0, abs=1e-8)


class TestResistance:
    def test_self(self, rng):
        net = random_connected_network(rng, 6)
        assert effective_resistance(net, "3", "3") == 0.0

    @pytest.mark.parametrize("n", [1, 2, 7])
    def test_series(self, n):
        assert effective_resistance(fam.path(n), "0", str(n)) == pytest.approx(n, abs=1e-12)

    @pytest.mark.parametrize("n", [3, 4, 6])
    def test_complete_graph(self, n):
        # pseudo-inverse oracle gives 2/n
        net = fam.complete(n)
        assert pinv_resistance(net, "1", "2") == pytest.approx(2 / n, abs=1e-12)
        assert effective_resistance(net, "1", "2") == pytest.approx(2 / n, abs=1e-12)

    def test_complete_four_is_one_half(self):
        assert effective_resistance(fam.complete(4), "0", "3") == pytest.approx(0.5, abs=1e-12)

    def test_matrix_matches(self, rng):
        net = random_connected_network(rng, 9)
        r = resistance_matrix(net)
        for x, y in itertools.combinations(net.vertices, 2):
            assert r[net.index[x], net.index[y]] == pytest.approx(effective_resistance(net, x, y), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 10))
def test_resistance_is_metric(seed, n):
    rng = np.random.default_rng(seed)
    net = random_connected_network(rng, n)
    r = resistance_matrix(net)
    assert np.allclose(r, r.T, atol=1e-12)
    assert np.all(r[~np.eye(n, dtype=bool)] > 0)
    for a, b, c in itertools.permutations(range(n), 3):
        assert r[a, c] <= r[a, b] + r[b, c] + 1e-9


class TestSchur:
    def test_path_series(self):
        red = schur_reduce(fam.path(2), ["0", "2"])
        assert red.conductances == {("0", "2"): pytest.approx(0.5, abs=1e-15)}

    def test_complete_four(self):
        red = schur_reduce(fam.complete(4), ["1", "3"], origin="1")
        ((pair, c),) = red.conductances.items()
        assert pair == ("1", "3")
        assert c == pytest.approx(2.0, abs=1e-12)
        assert effective_resistance(red, "1", "3") == pytest.approx(0.5, abs=1e-12)

    def test_dense_schur_oracle(self, rng):
        net = random_connected_network(rng, 9)
        keep = ["0", "2", "5", "8"]
        lap = np.diag(net.weight_matrix.sum(1)) - net.weight_matrix
        k = [net.index[x] for x in keep]
        r = [i for i in range(9) if i not in k]
        dense = lap[np.ix_(k, k)] - lap[np.ix_(k, r)] @ np.linalg.inv(lap[np.ix_(r, r)]) @ lap[np.ix_(r, k)]
        red = schur_reduce(net, keep)
        red_lap = np.diag(red.weight_matrix.sum(1)) - red.weight_matrix
        np.testing.assert_allclose(red_lap, dense, atol=1e-10)

    def test_preserves_resistance(self):
        rng = np.random.default_rng(11)
        for net in random_networks(12, 20, min_size=3):
            n = len(net.vertices)
            size = int(rng.integers(2, n + 1))
            keep = [net.origin] + list(rng.choice([x for x in net.vertices if x != net.origin], size - 1, replace=False))
            red = schur_reduce(net, keep)
            assert all(c > 0 for c in red.conductances.values())
            for x, y in itertools.combinations(keep, 2):
                assert effective_resistance(red, x, y) == pytest.approx(effective_resistance(net, x, y), abs=1e-9)

    def test_errors(self):
        with pytest.raises(NetworkError):
            schur_reduce(fam.path(3), ["0", "9"])
        with pytest.raises(NetworkError):
            schur_reduce(fam.path(3), ["1", "2"])
        with pytest.raises(NetworkError):
            schur_reduce(fam.path(3), [])


class TestHarmonic:
    def test_all_interior_is_empty(self):
        net = fam.complete(3)
        assert harmonic_subspace(net, net.vertices) == []

    def test_geometric_integers_one_dimensional(self):
        spec = fam.FamilySpec("geometric_integers", 12, base=2.0)
        basis = harmonic_subspace(fam.generate(spec), fam.natural_interior(spec))
        assert len(basis) == 1

    def test_path_ramp(self):
        net = fam.path(6)
        (h,) = harmonic_subspace(net, [str(k) for k in range(1, 6)])
        ramp = np.arange(7) / np.sqrt(6.0)
        np.testing.assert_allclose(h.values, ramp, atol=1e-12)
        assert energy_norm(net, h) == pytest.approx(1.0, abs=1e-12)

    def test_orthonormal_and_harmonic(self, rng):
        net = random_connected_network(rng, 12, extra_edge_prob=0.3)
        interior = net.vertices[:7]
        basis = harmonic_subspace(net, interior)
        assert len(basis) == 12 - 7 - 1
        gram = np.array([[energy_form(net, a, b) for b in basis] for a in basis])
        np.testing.assert_allclose(gram, np.eye(len(basis)), atol=1e-9)
        for h in basis:
            lap = laplacian_values(net, h.values)
            assert np.max(np.abs(lap[[net.index[x] for x in interior]])) <= 1e-9

    def test_unknown_interior(self):
        with pytest.raises(NetworkError):
            harmonic_subspace(fam.path(2), ["7"])


class TestRoyden:
    def test_harmonic_input_has_no_fin_part(self):
        net = fam.path(5)
        interior = ["1", "2", "3", "4"]
        u = VertexFunction(net, 3.0 * np.arange(6.0))
        fin, harm = royden_project(net, u, interior)
        assert energy_norm(net, fin) <= 1e-9
        assert harm.max_abs_diff(u) <= 1e-9

    def test_all_interior(self, rng):
        net = random_connected_network(rng, 6)
        u = random_function(rng, net)
        fin, harm = royden_project(net, u, net.vertices)
        assert np.all(harm.values == 0)
        assert fin.max_abs_diff(u) == 0.0

    def test_pythagoras(self, rng):
        net = random_connected_network(rng, 12)
        interior = net.vertices[:6]
        u = random_function(rng, net)
        fin, harm = royden_project(net, u, interior)
        assert abs(energy_form(net, fin, harm)) <= 1e-9
        total = energy_form(net, u, u)
        assert energy_form(net, fin, fin) + energy_form(net, harm, harm) == pytest.approx(total, abs=1e-8)

    def test_geometric_closed_form_harmonic(self):
        h = fam.closed_form_harmonic(2.0, 40)
        spec = fam.FamilySpec("geometric_integers", 40, base=2.0)
        fin, _ = royden_project(h.network, h, fam.natural_interior(spec))
        assert energy_norm(h.network, fin) <= 1e-3
