import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_table, random_raw_graph, random_spins
from ising_robust import (
    DimensionMismatch,
    InteractionMatrix,
    ParseError,
    TooLargeForEnumeration,
    conditional_prob_plus,
    exact_summary,
    hamiltonian,
    local_fields,
    read_samples_csv,
    read_spins,
    validate_spins,
    write_samples_csv,
    write_spins,
)
from ising_robust.model import configuration_index, enumerate_configurations


class TestValidateSpins:
    def test_accepts_plus_minus_one(self):
        out = validate_spins([1, -1, 1])
        assert out.dtype == np.int8
        assert list(out) == [1, -1, 1]

    @pytest.mark.parametrize("bad", [[0, 1], [2, -1], [0.5, 1], ["a", "b"]])
    def test_rejects_non_spin_entries(self, bad):
        with pytest.raises(DimensionMismatch):
            validate_spins(bad)

    def test_rejects_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            validate_spins([1, -1], n=3)

    def test_rejects_matrix(self):
        with pytest.raises(DimensionMismatch):
            validate_spins([[1, -1]])


class TestHamiltonian:
    def test_single_edge(self, single_edge):
        assert hamiltonian(single_edge, [1, 1]) == 1.0
        assert hamiltonian(single_edge, [1, -1]) == -1.0

    def test_cycle_adjacent_pairs_cancel(self, cycle4_half):
        assert hamiltonian(cycle4_half, [1, 1, -1, -1]) == 0.0

    def test_no_edges(self):
        assert hamiltonian(InteractionMatrix(3, [], [], []), [1, 1, -1]) == 0.0

    def test_dimension_mismatch(self, single_edge):
        with pytest.raises(DimensionMismatch):
            hamiltonian(single_edge, [1, 1, 1])

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_global_flip_invariance(self, seed):
        J = random_raw_graph(seed, n=7)
        x = random_spins(seed + 1, 7)
        assert hamiltonian(J, x) == hamiltonian(J, -x)


class TestLocalFields:
    def test_path_raw(self, path3_raw):
        m = local_fields(path3_raw, [1, -1, 1])
        assert list(m) == [-1.0, 2.0, -1.0]

    def test_zero_graph(self):
        m = local_fields(InteractionMatrix(4, [], [], []), [1, -1, 1, -1])
        assert np.all(m == 0.0)

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_energy_identity(self, seed):
        # 2 H(x) = sum_i m_i(x) x_i since every edge is counted twice
        J = random_raw_graph(seed, n=8)
        x = random_spins(seed + 1, 8)
        m = local_fields(J, x)
        assert math.isclose(2.0 * hamiltonian(J, x), float(m @ x), rel_tol=0, abs_tol=1e-10)


class TestConditional:
    def test_beta_zero_is_fair(self):
        assert conditional_prob_plus(0.0, 3.7) == 0.5

    def test_matches_logistic_form(self):
        for beta, m in [(1.0, 1.0), (0.5, -2.0), (2.0, 0.3)]:
            direct = math.exp(2 * beta * m) / (1 + math.exp(2 * beta * m))
            assert math.isclose(conditional_prob_plus(beta, m), direct, abs_tol=1e-14)

    def test_extreme_fields_saturate_cleanly(self):
        with np.errstate(all="raise"):
            assert conditional_prob_plus(1.0, 1e8) == 1.0
            assert conditional_prob_plus(1.0, -1e8) == 0.0

    @settings(max_examples=50, deadline=None)
    @given(m=st.floats(-50, 50), beta=st.floats(0, 5))
    def test_symmetry(self, m, beta):
        assert math.isclose(
            conditional_prob_plus(beta, m) + conditional_prob_plus(beta, -m),
            1.0,
            abs_tol=1e-12,
        )

    def test_vectorized(self):
        p = conditional_prob_plus(1.0, np.array([0.0, 1.0, -1.0]))
        assert p.shape == (3,)
        assert p[0] == 0.5

    @pytest.mark.parametrize("n", [4, 6])
    def test_conditional_consistency_with_joint(self, n):
        # conditional from the exact table must match the closed form
        J = random_raw_graph(seed=n, n=n, p=0.6)
        beta = 0.8
        table = exact_summary(J, beta, want_table=True).probabilities
        configs = enumerate_configurations(n)
        for c in range(1 << n):
            x = configs[c].astype(np.float64)
            m = local_fields(J, x)
            for i in range(n):
                c_plus = c | (1 << i)
                c_minus = c & ~(1 << i)
                denom = table[c_plus] + table[c_minus]
                assert math.isclose(
                    table[c_plus] / denom,
                    conditional_prob_plus(beta, m[i]),
                    abs_tol=1e-12,
                )


class TestExactSummary:
    def test_single_edge_normalizer_is_cosh(self, single_edge):
        for beta in (0.0, 0.37, 1.1):
            s = exact_summary(single_edge, beta)
            assert math.isclose(s.z, math.cosh(beta), rel_tol=1e-14)

    def test_beta_zero_uniform(self, cycle4_half):
        s = exact_summary(cycle4_half, 0.0, want_table=True)
        assert s.z == 1.0
        assert s.log_z_over_n == 0.0
        assert np.allclose(s.probabilities, 1.0 / 16.0, atol=1e-15)

    def test_table_sums_to_one(self, cycle4_half):
        s = exact_summary(cycle4_half, 0.7, want_table=True)
        assert abs(s.probabilities.sum() - 1.0) < 1e-12

    def test_spin_flip_symmetry_exact(self, cycle4_half):
        p = exact_summary(cycle4_half, 0.9, want_table=True).probabilities
        n = 4
        for c in range(1 << n):
            flipped = (~c) & ((1 << n) - 1)
            assert p[c] == p[flipped]

    def test_against_independent_oracle(self):
        J = random_raw_graph(seed=21, n=6, p=0.5)
        beta = 1.3
        expected, _ = oracle_table(J, beta)
        got = exact_summary(J, beta, want_table=True).probabilities
        assert np.allclose(got, expected, atol=1e-14)

    def test_cap_enforced(self):
        J = InteractionMatrix(21, [0], [1], [1.0])
        with pytest.raises(TooLargeForEnumeration):
            exact_summary(J, 0.5)

    def test_enumeration_round_trip(self):
        configs = enumerate_configurations(5)
        assert configs.shape == (32, 5)
        for c in (0, 7, 19, 31):
            assert configuration_index(configs[c]) == c


class TestSpinIO:
    def test_round_trip(self, tmp_path):
        x = np.array([1, -1, -1, 1], dtype=np.int8)
        path = tmp_path / "s.spins"
        write_spins(path, x)
        text = path.read_text()
        assert text == "+1\n-1\n-1\n+1\n"
        assert np.array_equal(read_spins(path), x)

    def test_accepts_bare_one(self, tmp_path):
        path = tmp_path / "s.spins"
        path.write_text("1\n-1\n")
        assert list(read_spins(path)) == [1, -1]

    def test_rejects_junk(self, tmp_path):
        path = tmp_path / "s.spins"
        path.write_text("+1\n2\n")
        with pytest.raises(ParseError):
            read_spins(path)

    def test_rejects_empty(self, tmp_path):
        path = tmp_path / "s.spins"
        path.write_text("\n")
        with pytest.raises(ParseError):
            read_spins(path)

    def test_samples_csv_round_trip(self, tmp_path):
        samples = [np.array([1, -1, 1], dtype=np.int8), np.array([-1, -1, 1], dtype=np.int8)]
        path = tmp_path / "s.csv"
        write_samples_csv(path, samples)
        assert path.read_text().endswith("\n")
        back = read_samples_csv(path, n=3)
        assert len(back) == 2
        assert np.array_equal(back[0], samples[0])
        assert np.array_equal(back[1], samples[1])

    def test_samples_csv_length_checked(self, tmp_path):
        path = tmp_path / "s.csv"
        path.write_text("1,-1\n1,-1,1\n")
        with pytest.raises(ParseError):
            read_samples_csv(path, n=2)
