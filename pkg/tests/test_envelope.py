import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from perfenvelope import (
    CheckpointSchedule,
    MarginPolicy,
    PerformanceProfile,
    QualityMatrix,
    exact_cutoff_line,
    top_fraction,
    violates,
    worst_case_envelope,
)
from perfenvelope.envelope import CutoffLine, pool_size

# Published 1% cutoff line of the SPLP panel (quality vs time)
SPLP_CUTOFF_1 = (0.935431148010446, 0.898058772483269, 0.894458366803756, 0.894458366803756,
                 0.766057434160886, 0.204886098440359, 0.101287400234949, 0.0385895630887643,
                 0.00801767385429572, 0.0064128552689275, 0.00177013160892996)


def test_envelope_identity_and_pointwise_max():
    p = PerformanceProfile(0, (0.5, 0.2, 0.0))
    assert worst_case_envelope([p]).value == p.quality
    assert worst_case_envelope([[0.5, 0.2, 0.0], [0.4, 0.3, 0.1]]).value == (0.5, 0.3, 0.1)
    with pytest.raises(ValueError):
        worst_case_envelope([])
    with pytest.raises(ValueError):
        worst_case_envelope([[0.5, 0.2], [0.5]])


def test_published_cutoff_round_trips_through_figure_export():
    from perfenvelope.metrics import figure_csv, read_figure_csv
    schedule = CheckpointSchedule()
    line = worst_case_envelope([SPLP_CUTOFF_1])
    rows = [(t, "cutoff_1", v) for t, v in zip(schedule.times, line.value)]
    back = read_figure_csv(figure_csv(rows))["cutoff_1"]
    assert [t for t, _ in back] == list(schedule.times)
    assert [v for _, v in back] == [float(f"{v:.9g}") for v in SPLP_CUTOFF_1]
    assert back[5] == (32, pytest.approx(0.204886098, abs=1e-9))


def matrix_from_finals(finals):
    rows = [[1.0, (1 + f) / 2, f] for f in finals]
    return QualityMatrix(CheckpointSchedule(count=3), tuple(range(len(finals))), np.array(rows))


def test_top_fraction():
    m = matrix_from_finals([0.3, 0.1, 0.1, 0.5])
    assert top_fraction(m, 1.0) == [1, 2, 0, 3]
    assert top_fraction(m, 0.5) == [1, 2]
    assert top_fraction(m, 0.01) == [1]
    with pytest.raises(ValueError):
        top_fraction(m, 0.0)


def test_pool_size_ceil_rule():
    assert pool_size(0.01, 26608) == 267 == math.ceil(0.01 * 26608)
    assert pool_size(0.01, 400) == 4
    assert pool_size(0.01, 1) == 1
    assert pool_size(0.01, 300) == 3
    assert pool_size(0.4, 5) == 2


def test_exact_cutoff_single_config():
    m = matrix_from_finals([0.2])
    assert exact_cutoff_line(m, 0.3).value == tuple(m.values[0])


def test_exact_cutoff_brute_force(five_matrix):
    size = 2
    finals = five_matrix.final
    # brute force: the subset whose members all beat every non-member
    chosen = [s for s in combinations(range(5), size)
              if all(finals[a] <= finals[b] for a in s for b in range(5) if b not in s)]
    assert len(chosen) == 1
    expected = np.max(five_matrix.values[list(chosen[0])], axis=0)
    np.testing.assert_array_equal(exact_cutoff_line(five_matrix, 0.4).as_array(), expected)


def test_exact_cutoff_full_fraction_is_matrix_max(five_matrix):
    np.testing.assert_array_equal(exact_cutoff_line(five_matrix, 1.0).as_array(), five_matrix.values.max(axis=0))


def test_violates_examples():
    cut = CutoffLine((0.5, 0.5, 0.5))
    pol = MarginPolicy()
    assert violates([0.61], cut, pol, 0)
    assert not violates([0.60], cut, pol, 0)
    assert violates([0.9, 0.01], CutoffLine((1.0, 0.0, 0.0)), pol, 1)
    assert not violates([0.9, 0.0], CutoffLine((1.0, 0.0, 0.0)), pol, 1)
    with pytest.raises(IndexError):
        violates([0.1, 0.1, 0.1], cut, pol, 2)
    with pytest.raises(IndexError):
        violates([0.1], cut, pol, 1)


def test_violates_exact_boundary_is_not_a_violation():
    for c in np.linspace(0.01, 0.8, 40):
        thr = 1.2 * c
        assert not violates([thr], CutoffLine((c, c)), MarginPolicy(), 0)
        assert violates([np.nextafter(thr, 2)], CutoffLine((c, c)), MarginPolicy(), 0)


def test_additive_and_floor_and_disabled():
    cut = CutoffLine((0.1, 0.0))
    add = MarginPolicy.additive(0.2)
    assert not violates([0.3], cut, add, 0)
    assert violates([0.31], cut, add, 0)
    floored = MarginPolicy.multiplicative(1.2, floor=0.05)
    assert not violates([0.169], cut, floored, 0)
    assert violates([0.171], cut, floored, 0)
    assert not violates([1.0], CutoffLine((0.0, 0.0)), MarginPolicy.disabled(), 0)


def test_margin_parsing():
    assert MarginPolicy.parse("x1.2") == MarginPolicy.multiplicative(1.2)
    assert MarginPolicy.parse("+0.2") == MarginPolicy.additive(0.2)
    assert MarginPolicy.parse("off").is_disabled
    for text in ("x1.2", "+0.2", "off"):
        assert str(MarginPolicy.parse(text)) == text
    for bad in ("1.2", "x0.9", "+-1", "xabc"):
        with pytest.raises(ValueError):
            MarginPolicy.parse(bad)
    with pytest.raises(ValueError):
        MarginPolicy("multiplicative", 1.2, 0.1)


profile_sets = st.lists(st.lists(st.floats(0, 1), min_size=6, max_size=6).map(
    lambda v: np.minimum.accumulate(v)), min_size=1, max_size=8)


@given(profile_sets, profile_sets)
def test_envelope_properties(a, b):
    env_a = worst_case_envelope(a).as_array()
    env_ab = worst_case_envelope(a + b).as_array()
    for p in a:
        assert (env_a >= p).all()
    assert (env_ab >= env_a).all()
    assert (np.diff(env_a) <= 0).all()


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_violates_monotone_in_quality(c, q, extra):
    cut = CutoffLine((c, c))
    if violates([q], cut, MarginPolicy(), 0):
        assert violates([min(1.0, q + extra)], cut, MarginPolicy(), 0) or q + extra > 1
