import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_spins
from ising_robust import ContaminationScheme, InvalidSpec, ParseError, contaminate
from ising_robust.contamination import parse_scheme


class TestScheme:
    def test_accepts_both_kinds(self):
        ContaminationScheme("pin_plus", 0.5)
        ContaminationScheme("flip", 1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(kind="pin_minus", fraction=0.5),
            dict(kind="flip", fraction=-0.1),
            dict(kind="flip", fraction=1.5),
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(InvalidSpec):
            ContaminationScheme(**kwargs)


class TestContaminate:
    def test_zero_fraction_is_identity(self):
        x = random_spins(0, 12)
        out = contaminate(x, ContaminationScheme("flip", 0.0))
        assert np.array_equal(out, x)
        assert out is not x

    def test_full_pin_saturates(self):
        x = random_spins(1, 15)
        out = contaminate(x, ContaminationScheme("pin_plus", 1.0))
        assert np.all(out == 1)

    def test_flip_touches_exact_count(self):
        x = random_spins(2, 10)
        out = contaminate(x, ContaminationScheme("flip", 0.2, seed=7))
        assert int(np.sum(out != x)) == 2

    def test_input_never_mutated(self):
        x = random_spins(3, 20)
        before = x.copy()
        contaminate(x, ContaminationScheme("pin_plus", 0.5, seed=1))
        contaminate(x, ContaminationScheme("flip", 0.5, seed=1))
        assert np.array_equal(x, before)

    def test_deterministic_under_seed(self):
        x = random_spins(4, 30)
        a = contaminate(x, ContaminationScheme("flip", 0.3, seed=9))
        b = contaminate(x, ContaminationScheme("flip", 0.3, seed=9))
        c = contaminate(x, ContaminationScheme("flip", 0.3, seed=10))
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(0, 10_000),
        fraction=st.floats(0, 1),
        kind=st.sampled_from(["pin_plus", "flip"]),
    )
    def test_hamming_distance_bound(self, seed, fraction, kind):
        n = 17
        x = random_spins(seed, n)
        out = contaminate(x, ContaminationScheme(kind, fraction, seed=seed))
        k = int(np.floor(fraction * n))
        changed = int(np.sum(out != x))
        assert changed <= k
        if kind == "flip":
            assert changed == k

    def test_pin_only_raises_entries(self):
        x = -np.ones(10, dtype=np.int8)
        out = contaminate(x, ContaminationScheme("pin_plus", 0.4, seed=5))
        assert int(np.sum(out == 1)) == 4

    def test_index_selection_uniform(self):
        # each of the 10 indices should be hit with frequency ~ k/n = 0.2
        x = np.ones(10, dtype=np.int8)
        counts = np.zeros(10)
        draws = 10_000
        for seed in range(draws):
            out = contaminate(x, ContaminationScheme("flip", 0.2, seed=seed))
            counts += out != x
        freq = counts / draws
        assert np.all(np.abs(freq - 0.2) < 0.02)


class TestParseScheme:
    def test_round_trip(self):
        s = parse_scheme("pin_plus:0.2", seed=3)
        assert s == ContaminationScheme("pin_plus", 0.2, seed=3)
        assert parse_scheme("flip:0.05").kind == "flip"

    @pytest.mark.parametrize("text", ["pin_plus", "flip:a", "flip:0.1:2", "smudge:0.1", "flip:1.2"])
    def test_rejects_malformed(self, text):
        with pytest.raises(ParseError):
            parse_scheme(text)
