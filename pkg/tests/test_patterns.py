"""Pattern sampling, exhaustive enumeration, and eta statistics."""

import itertools
import math

import numpy as np
import pytest
from scipy import stats as sstats

from framelab import frames, patterns


def test_sample_pattern_deterministic():
    a = patterns.sample_pattern(20, 5, seed=7)
    b = patterns.sample_pattern(20, 5, seed=7)
    assert a == b
    assert a.indices == tuple(sorted(a.indices))
    assert patterns.sample_pattern(20, 5, seed=8) != a
    # tuple seeds give independent substreams
    assert patterns.sample_pattern(20, 5, seed=(7, 0)) != patterns.sample_pattern(20, 5, seed=(7, 1))


def test_sample_pattern_validation():
    with pytest.raises(ValueError):
        patterns.sample_pattern(10, 0)
    with pytest.raises(ValueError):
        patterns.sample_pattern(10, 11)


def test_sample_pattern_uniform_chi_square():
    # 4500 draws over the 45 two-element patterns of [0, 10)
    counts = {}
    for t in range(4500):
        s = patterns.sample_pattern(10, 2, seed=(0, t))
        counts[s.indices] = counts.get(s.indices, 0) + 1
    observed = np.array([counts.get(c, 0)
                         for c in itertools.combinations(range(10), 2)])
    _, p = sstats.chisquare(observed)
    assert p > 0.001  # seed 0 actually lands near 0.23


def test_erasure_pattern_validation():
    with pytest.raises(ValueError):
        patterns.ErasurePattern((3, 1, 2))
    with pytest.raises(ValueError):
        patterns.ErasurePattern((1, 1, 2))
    pat = patterns.ErasurePattern((0, 4, 6))
    assert pat.k == 3
    with pytest.raises(AttributeError):
        pat.indices = (0, 1)


def test_enumerate_patterns_lexicographic():
    pats = list(patterns.enumerate_patterns(7, 3))
    assert len(pats) == 35
    assert pats[0].indices == (0, 1, 2)
    assert pats[-1].indices == (4, 5, 6)
    assert pats == sorted(pats, key=lambda s: s.indices)
    assert [s.indices for s in patterns.enumerate_patterns(5, 5)] == [tuple(range(5))]


def test_enumerate_patterns_guard_names_count():
    with pytest.raises(patterns.PatternGuardError) as exc:
        list(patterns.enumerate_patterns(40, 20))
    assert str(math.comb(40, 20)) in str(exc.value)
    assert issubclass(patterns.PatternGuardError, ValueError)


def test_ie_statistics_full_dft_is_orthonormal_everywhere():
    # square unitary frame: every k-row Gram is the identity, so eta = k/m
    # for all patterns and the mean-log reduces to (1/2) log2(k/n)
    f = frames.build_bandlimited_dft(8, 8)
    st = patterns.ie_statistics(f, 3, mode="exhaustive")
    assert st.mode == "exhaustive"
    assert st.trials == math.comb(8, 3)
    assert abs(st.mean - 3 / 8) < 1e-12
    assert abs(st.median - 3 / 8) < 1e-12
    assert st.fraction_singular == 0.0
    assert abs(st.mlie - 0.5 * math.log2(3 / 8)) < 1e-12
    # keeping everything: zero bits of interpolation loss
    assert abs(patterns.ie_statistics(f, 8, mode="exhaustive").mlie) < 1e-12


def test_ie_statistics_exhaustive_matches_monte_carlo():
    f = frames.build_dss(11)
    ex = patterns.ie_statistics(f, 3, mode="exhaustive")
    mc = patterns.ie_statistics(f, 3, mode="monte_carlo", trials=2000, seed=1)
    se = np.std(mc.samples, ddof=1) / math.sqrt(mc.trials)
    assert abs(ex.mean - mc.mean) < 3.0 * se
    assert abs(ex.mlie - mc.mlie) < 0.02
    assert ex.seed is None and mc.seed == 1


def test_ie_statistics_deterministic_and_order_free():
    f = frames.build_dss(11)
    a = patterns.ie_statistics(f, 4, mode="monte_carlo", trials=300, seed=5)
    b = patterns.ie_statistics(f, 4, mode="monte_carlo", trials=300, seed=5)
    assert np.array_equal(a.samples, b.samples)
    assert a.mean == b.mean and a.mlie == b.mlie
    c = patterns.ie_statistics(f, 4, mode="monte_carlo", trials=300, seed=6)
    assert not np.array_equal(a.samples, c.samples)


def test_ie_statistics_respects_eta_floor():
    f = frames.build_dss(19)
    st = patterns.ie_statistics(f, 5, mode="monte_carlo", trials=200, seed=0)
    finite = st.samples[np.isfinite(st.samples)]
    assert (finite >= st.k / st.m - 1e-9).all()


def test_ie_statistics_divergent_bin():
    # aliased even spectrum on n=8: rows t and t+4 coincide, so the four
    # patterns {t, t+4} are exactly singular
    f = frames.build_dft_spectrum(8, [0, 2, 4, 6])
    st = patterns.ie_statistics(f, 2, mode="exhaustive")
    assert st.fraction_singular == pytest.approx(4 / 28)
    assert st.log_counts.sum() == 28
    assert st.log_counts[-1] >= 4  # divergent bin holds the singular patterns
    assert np.isfinite(st.mean)  # summary stats ignore the infs


def test_ie_statistics_auto_mode_switch():
    small = frames.build_dss(11)
    assert patterns.ie_statistics(small, 3, mode="auto").mode == "exhaustive"
    big = frames.build_random_iid(500, 320, seed=0)
    st = patterns.ie_statistics(big, 3, mode="auto", trials=50, seed=0)
    assert st.mode == "monte_carlo" and st.trials == 50


def test_ie_statistics_validation():
    f = frames.build_dss(11)
    with pytest.raises(ValueError):
        patterns.ie_statistics(f, 6)  # k > m
    with pytest.raises(ValueError):
        patterns.ie_statistics(f, 3, mode="bogus")


def test_square_random_divergence_growth():
    rows = patterns.square_random_divergence([2, 3], trials=200, seed=0)
    assert [r.k for r in rows] == [2, 3]
    assert rows[0].median < rows[1].median
    for r in rows:
        assert 0.0 <= r.fraction_above <= 1.0
        assert r.lower_bound < r.upper_bound
        assert r.zeta == 1.0
        assert r.trials == 200
    # the square case is heavy-tailed from the start: most mass already
    # far above the tight-frame value 1
    assert rows[1].fraction_above > 0.5


def test_square_random_divergence_validation():
    with pytest.raises(ValueError):
        patterns.square_random_divergence([3, 2])
