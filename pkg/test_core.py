import numpy as np
import pytest
from numpy.testing import assert_allclose

from tropicore.utils.algebra import Matrix, Semiring, mat_power, proportional, same_cone
from tropicore.utils.core import (
    PeriodicityClass,
    act,
    classify_periodicity,
    compute_core,
    default_horizon,
    normalized_powers,
    span_stabilization,
)
from tropicore.utils.errors import (
    CoreMembershipError,
    PeriodUndeterminedError,
    UnsupportedAlgebraError,
)
from tropicore.utils.periodicity import detect_period


def assert_same_rays(found, expected, atol=1e-3):
    assert len(found) == len(expected)
    remaining = [np.asarray(v, dtype=float) / max(v) for v in found]
    for target in expected:
        target = np.asarray(target, dtype=float) / max(target)
        matches = [i for i, v in enumerate(remaining) if np.allclose(v, target, atol=atol)]
        assert matches, f"no extremal matches {target}"
        remaining.pop(matches[0])


EXAMPLE1_CORE = [
    (0, 1, 0.6807, 0.7738, 0.8797),
    (0, 0.8797, 1, 0.6807, 0.7738),
    (0, 0.7738, 0.8797, 1, 0.6807),
    (0, 0.6807, 0.7738, 0.8797, 1),
]

EXAMPLE1_POWER10 = np.array([
    [0.4511, 0.7738, 0.6807, 1, 0.8797],
    [0.5128, 0.8797, 0.7738, 0.6807, 1],
    [0.5830, 1, 0.8797, 0.7738, 0.6807],
    [0.5895, 0.6807, 1, 0.8797, 0.7738],
])


def test_core_example1(example1, tol):
    core = compute_core(example1, Semiring.MAX_TIMES, tol)
    assert core.sigma_lambda == 4
    assert core.census == 4
    assert_same_rays(core.extremals, EXAMPLE1_CORE)
    assert [len(o) for o in core.orbits] == [4]
    assert core.orbits[0].members[0] == 0
    assert core.orbits[0].sigma == 4


def test_core_example2_max(example2, tol):
    core = compute_core(example2, Semiring.MAX_TIMES, tol)
    assert core.sigma_lambda == 2
    assert core.census == 3
    assert_same_rays(core.extremals, [
        (1, 0, 0.3900, 0.6678),
        (0, 1, 0.6718, 0.6951),
        (0, 0, 0.5805, 0.4753),
    ])
    assert core.successors == (1, 0, 2)
    assert [o.members for o in core.orbits] == [(0, 1), (2,)]


def test_core_example2_plus(example2_plus, tol):
    core = compute_core(example2_plus, Semiring.PLUS_TIMES, tol)
    assert core.census == 3
    assert sorted(len(o) for o in core.orbits) == [1, 2]
    assert_same_rays(core.extremals, [
        (0.2646, 0, 0.5815, 0.7693),
        (0, 0.2566, 0.6391, 0.7251),
        (0, 0, 0.6612, 0.7502),
    ])


def test_zero_core(nilpotent, tol):
    for sr in (Semiring.MAX_TIMES, Semiring.PLUS_TIMES):
        core = compute_core(nilpotent, sr, tol)
        assert core.is_zero
        assert core.census == 0
        assert core.sigma_lambda == 1
        assert core.orbits == ()


def test_act_permutes_extremal_rays(example2, tol):
    core = compute_core(example2, Semiring.MAX_TIMES, tol)
    for index, g in enumerate(core.extremals):
        image = act(example2, core, g, tol)
        target = core.extremals[core.successors[index]]
        assert proportional(image, target, 1e-6, 1e-12)
    with pytest.raises(CoreMembershipError):
        act(example2, core, np.array([1.0, 0.0, 0.0, 0.0]), tol)


def test_power10_example1(example1):
    powered = mat_power(example1, 10).entries
    assert 0 < powered[0, 0] < 1e-4
    assert_allclose(powered[1:, :], EXAMPLE1_POWER10, atol=1e-4)


def test_example1_critical_block_is_periodic(example1, tol):
    block = [mat_power(example1, t).entries[1:, 1:] for t in range(1, 41)]
    found = detect_period(block, equal=tol.equal)
    assert found.period == 4
    assert found.threshold <= 11


def test_detect_period_edges():
    assert detect_period([1, 2, 3, 3, 3, 3]).period == 1
    assert detect_period([1, 2, 3, 3, 3, 3]).threshold == 3
    assert detect_period([5, 1, 2, 1, 2, 1, 2]).period == 2
    assert detect_period([5, 1, 2, 1, 2, 1, 2]).threshold == 2
    with pytest.raises(PeriodUndeterminedError):
        detect_period([1, 2, 3, 4])


def test_normalized_powers_track_scale(example2):
    frames, scales = normalized_powers(example2.entries, np.eye(4), 6)
    assert len(frames) == 6
    powered = mat_power(example2, 6).entries
    rebuilt = frames[-1] * np.exp(scales[-1])[None, :]
    assert_allclose(rebuilt, powered, rtol=1e-9)


def test_finite_stabilization_example2(example2, tol):
    core = compute_core(example2, Semiring.MAX_TIMES, tol)
    assert span_stabilization(example2, core, 20, tol) == 4
    columns = [mat_power(example2, 4).entries[:, i] for i in range(4)]
    assert same_cone(columns, list(core.extremals), Semiring.MAX_TIMES, tol.strict())


def test_classify_example2(example2, tol):
    report = classify_periodicity(example2, tol)
    assert report.kind is PeriodicityClass.COLUMN_PERIODIC
    assert report.stabilization_step == 4
    assert report.core_gap == 0.0
    assert not report.undetermined
    assert all(c is not None for c in report.columns)
    assert [c.period for c in report.columns[:2]] == [2, 2]
    assert report.columns[2].growth == pytest.approx(0.5805)


def test_classify_with_probes(example2, tol):
    probes = [np.ones(4), np.array([1.0, 2.0, 3.0, 4.0])]
    report = classify_periodicity(example2, tol, probes=probes)
    assert report.kind is PeriodicityClass.ORBIT_PERIODIC_CANDIDATE
    assert len(report.probes) == 2


def test_classify_example1(example1, tol):
    report = classify_periodicity(example1, tol)
    assert report.kind is PeriodicityClass.GENERAL
    assert report.undetermined
    assert report.stabilization_step is None
    assert report.columns[0] is None
    for column in report.columns[1:]:
        assert column.period == 4
        assert column.threshold <= 11
        assert column.growth == pytest.approx(1.0)
    assert report.core_gap < 1e-6


@pytest.mark.parametrize("entries,kind", [
    ([[0.0, 1.0], [2.0, 0.0]], PeriodicityClass.IRREDUCIBLE),
    ([[1.0, 0.0], [1.0, 1.0]], PeriodicityClass.ULTIMATELY_PERIODIC),
    ([[0.0, 1.0, 0.5], [0.0, 0.0, 2.0], [0.0, 0.0, 0.0]], PeriodicityClass.ULTIMATELY_PERIODIC),
])
def test_classify_small_cases(entries, kind, tol):
    assert classify_periodicity(Matrix(entries), tol).kind is kind


def test_nilpotent_stabilizes(nilpotent, tol):
    report = classify_periodicity(nilpotent, tol)
    assert report.stabilization_step == 3
    assert report.core_gap == 0.0


def test_classify_rejects_nonnegative_algebra(example2_plus, tol):
    with pytest.raises(UnsupportedAlgebraError):
        classify_periodicity(example2_plus, tol)


def test_default_horizon():
    assert default_horizon(1) == 12
    assert default_horizon(5, 4) == 208
