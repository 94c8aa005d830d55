import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from .lattice import (
    defect,
    elementary_rotation,
    normalize,
    disk_geometry,
    row_contraction,
    column_contraction,
    schur_params_from_matrix,
    matrix_from_schur_params,
    lattice_test,
    cp_test,
    random_cp,
    random_schur_params,
)
from .models import SchurParams, OffEntry, traversal_order
from .violation import ViolationKind
from .exceptions import (
    OutsideUnitDiskException,
    NegativeDiagonalException,
    NonzeroRowAtZeroDiagonalException,
    NonHermitianInputException,
    ParameterExceedsDiskException,
    InvariantViolationException,
    UndefinedParameterException,
)
from ..channel.channel import choi_from_kraus
from ..channel.models import ChoiMatrix
from ..linalg.linalg import is_psd_oracle
from ..qubit.models import KingRuskaiForm
from ..qubit.qubit import choi_forward, analysis_matrix
from ...test_utils.matrix_generator import MatrixCriteria, MatrixGenerator

unit_disk = st.builds(
    lambda r, phi: complex(r * np.exp(1j * phi)),
    st.floats(min_value=0.0, max_value=1.0),
    st.floats(min_value=0.0, max_value=2 * np.pi),
)


def params_with(size: int, diag, values: dict) -> SchurParams:
    entries = {pair: (values.get(pair, 0j), True) for pair in traversal_order(size)}
    return SchurParams.from_entries(diag, entries)


def random_disk_values(rng, size: int, radius: float = 0.99) -> dict:
    return {
        pair: complex(radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()))
        for pair in traversal_order(size)
    }


def test_defect_examples():
    assert defect(0) == 1.0
    assert defect(1) == 0.0
    assert defect(0.6) == pytest.approx(0.8)
    assert defect(0.6j) == pytest.approx(0.8)


def test_defect_outside_unit_disk_raises():
    with pytest.raises(OutsideUnitDiskException):
        defect(1.5)


def test_elementary_rotation_examples():
    assert np.array_equal(elementary_rotation(0), [[0, 1], [1, 0]])
    assert np.array_equal(elementary_rotation(1), [[1, 0], [0, -1]])


@given(gamma=unit_disk)
def test_elementary_rotation_is_unitary(gamma):
    u = elementary_rotation(gamma)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-14)


def test_normalize_diagonal_matrix():
    normalized, d = normalize(np.diag([4.0, 9.0]))
    assert np.array_equal(d, [4.0, 9.0])
    assert np.allclose(normalized, np.eye(2))


def test_normalize_zeroes_rows_of_vanishing_diagonal(identity_analysis_matrix):
    normalized, d = normalize(identity_analysis_matrix)
    assert np.array_equal(d, [2.0, 0.0, 0.0, 2.0])
    assert normalized[0, 3] == pytest.approx(1.0)
    assert np.all(normalized[1:3, :] == 0)
    assert np.all(normalized[:, 1:3] == 0)


def test_normalize_rejects_nonzero_row_at_zero_diagonal():
    with pytest.raises(NonzeroRowAtZeroDiagonalException) as info:
        normalize([[0, 1], [1, 1]])
    assert info.value.violation.location == (1,)
    assert info.value.violation.magnitude == pytest.approx(1.0)


def test_normalize_reports_first_negative_diagonal():
    with pytest.raises(NegativeDiagonalException) as info:
        normalize(np.diag([1.0, -0.5, -2.0]))
    assert info.value.violation.location == (2,)
    assert info.value.violation.magnitude == pytest.approx(0.5)


def test_normalize_checks_hermiticity_before_diagonal():
    with pytest.raises(NonHermitianInputException) as info:
        normalize([[-1, 1], [0, 1]])
    assert info.value.violation.location == (1, 2)


def test_non_real_diagonal_is_not_hermitian():
    with pytest.raises(NonHermitianInputException) as info:
        normalize([[1 + 0.1j, 0], [0, 1]])
    assert info.value.violation.location == (1, 1)


def test_disk_of_zero_intermediate_block_is_centered_at_zero(identity_analysis_matrix):
    normalized, _ = normalize(identity_analysis_matrix)
    geometry = disk_geometry(normalized, 1, 4)
    assert geometry.center == 0
    assert geometry.radius == pytest.approx(1.0)


def test_gap_two_disk_matches_cascade_formula(rng):
    for _ in range(1000):
        values = random_disk_values(rng, 3)
        params = params_with(3, (1.0, 1.0, 1.0), values)
        normalized = matrix_from_schur_params(params)
        geometry = disk_geometry(normalized, 1, 3)
        g12, g23 = values[(1, 2)], values[(2, 3)]
        assert abs(geometry.center - g12 * g23) < 1e-12
        assert abs(geometry.radius - defect(g12) * defect(g23)) < 1e-12


def test_qubit_corner_disk_matches_cascade_formula(rng):
    for _ in range(1000):
        values = random_disk_values(rng, 4)
        values[(1, 2)] = 0j
        values[(3, 4)] = 0j
        params = params_with(4, (1.0, 1.0, 1.0, 1.0), values)
        normalized = matrix_from_schur_params(params)
        geometry = disk_geometry(normalized, 1, 4)
        g13, g23, g24 = values[(1, 3)], values[(2, 3)], values[(2, 4)]
        assert abs(geometry.center - (-g13 * np.conj(g23) * g24)) < 1e-12
        assert abs(geometry.radius - defect(g13) * defect(g24)) < 1e-12


def test_disks_stay_inside_unit_disk(rng):
    for size in (4, 9):
        for _ in range(20):
            normalized = matrix_from_schur_params(params_with(size, (1.0,) * size, random_disk_values(rng, size)))
            for k, j in traversal_order(size):
                geometry = disk_geometry(normalized, k, j)
                assert abs(geometry.center) + geometry.radius <= 1 + 1e-9


def test_contractions_of_zero_parameters_vanish():
    params = params_with(4, (1.0,) * 4, {})
    assert np.all(row_contraction(params, 1, 4) == 0)
    assert np.all(column_contraction(params, 1, 4) == 0)


def test_contractions_of_single_step():
    params = params_with(3, (1.0,) * 3, {(1, 2): 0.3 + 0.1j, (2, 3): -0.2j})
    assert np.allclose(row_contraction(params, 1, 2), [0.3 + 0.1j])
    assert np.allclose(column_contraction(params, 2, 3), [-0.2j])


def test_contractions_with_boundary_parameter():
    params = params_with(3, (1.0,) * 3, {(1, 2): 0.6, (1, 3): 1.0, (2, 3): 0.6})
    assert np.allclose(row_contraction(params, 1, 3), [0.6, 0.8])
    assert np.linalg.norm(row_contraction(params, 1, 3)) == pytest.approx(1.0)
    assert np.allclose(column_contraction(params, 1, 3), [0.6, 0.8])


def test_contraction_of_undefined_pair_raises():
    params = params_with(3, (1.0,) * 3, {})
    with pytest.raises(UndefinedParameterException):
        row_contraction(params, 2, 2)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), size=st.integers(min_value=2, max_value=7))
def test_contractions_have_norm_at_most_one(seed, size):
    params = random_schur_params(size, np.random.default_rng(seed))
    for k, j in traversal_order(size):
        assert np.linalg.norm(row_contraction(params, k, j)) <= 1 + 1e-12
        assert np.linalg.norm(column_contraction(params, k, j)) <= 1 + 1e-12


def test_identity_matrix_has_zero_active_parameters():
    params = schur_params_from_matrix(np.eye(4))
    assert params.diag == (1.0, 1.0, 1.0, 1.0)
    assert all(e.active and e.value == 0 for e in params.off)


def test_identity_channel_analysis_matrix(identity_analysis_matrix):
    params = schur_params_from_matrix(identity_analysis_matrix)
    assert params.diag == (2.0, 0.0, 0.0, 2.0)
    assert params.entry(1, 4).active
    assert params.value(1, 4) == pytest.approx(1.0)
    assert [(e.k, e.j) for e in params.active_entries()] == [(1, 4)]
    assert np.allclose(matrix_from_schur_params(params), identity_analysis_matrix)
    assert is_psd_oracle(identity_analysis_matrix)


def test_sample_channel_parameters(sample_analysis_matrix):
    params = schur_params_from_matrix(sample_analysis_matrix)
    assert params.diag == pytest.approx((1.6, 0.6, 0.4, 1.4))
    assert params.value(1, 2) == 0
    assert params.value(3, 4) == 0
    assert params.value(2, 3) == pytest.approx(0.2041241, abs=1e-7)
    assert params.value(1, 3) == pytest.approx(0.2553784, abs=1e-7)
    assert params.value(2, 4) == pytest.approx(0.2229096, abs=1e-7)


def test_reconstruction_with_zero_corner_parameter(sample_analysis_matrix):
    params = schur_params_from_matrix(sample_analysis_matrix)
    entries = {(e.k, e.j): (e.value, e.active) for e in params.off}
    entries[(1, 4)] = (0j, True)
    rebuilt = matrix_from_schur_params(SchurParams.from_entries(params.diag, entries))
    for k, j in [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]:
        assert rebuilt[k - 1, j - 1] == pytest.approx(sample_analysis_matrix[k - 1, j - 1], abs=1e-12)
    normalized, _ = normalize(rebuilt)
    center = disk_geometry(normalized, 1, 4).center
    assert rebuilt[0, 3] == pytest.approx(np.sqrt(1.6 * 1.4) * center, abs=1e-12)


def test_diagonal_only_params_give_diagonal_matrix():
    params = params_with(3, (1.0, 2.0, 3.0), {})
    assert np.allclose(matrix_from_schur_params(params), np.diag([1.0, 2.0, 3.0]))


def test_params_outside_unit_disk_are_rejected():
    with pytest.raises(InvariantViolationException):
        params_with(2, (1.0, 1.0), {(1, 2): 1.5})
    with pytest.raises(InvariantViolationException):
        params_with(2, (1.0, -1.0), {})


def test_inactive_entries_must_carry_zero():
    with pytest.raises(ValueError):
        OffEntry(k=1, j=2, value=0.5, active=False)


@pytest.mark.parametrize("size, radius", [(4, 0.99), (9, 0.9)])
def test_params_round_trip_through_matrix(rng, size, radius):
    for _ in range(100):
        diag = tuple(float(x) for x in rng.uniform(0.2, 3.0, size))
        params = params_with(size, diag, random_disk_values(rng, size, radius))
        recovered = schur_params_from_matrix(matrix_from_schur_params(params))
        assert np.allclose(recovered.diag, params.diag, atol=1e-9)
        for original, extracted in zip(params.off, recovered.off):
            assert extracted.active
            assert abs(original.value - extracted.value) < 1e-9


@pytest.mark.parametrize("size", [4, 9])
def test_psd_matrices_round_trip_through_params(size):
    generator = MatrixGenerator(MatrixCriteria(dimension=size, seed=size))
    for _ in range(100):
        s = generator.psd()
        rebuilt = matrix_from_schur_params(schur_params_from_matrix(s))
        assert np.max(np.abs(rebuilt - s)) < 1e-9 * np.linalg.norm(s)


def test_identity_channel_is_cp(identity_kraus):
    verdict = cp_test(choi_from_kraus(identity_kraus))
    assert verdict.is_cp
    assert verdict.params.value(1, 4) == pytest.approx(1.0)


def test_depolarizing_beyond_boundary_exceeds_disk():
    verdict = cp_test(choi_forward(KingRuskaiForm.depolarizing(-0.5)))
    assert not verdict.is_cp
    assert verdict.violation.kind == ViolationKind.PARAMETER_EXCEEDS_DISK
    assert verdict.violation.location == (1, 4)
    assert verdict.violation.value == pytest.approx(-2.0)
    assert verdict.violation.magnitude == pytest.approx(2.0)


@pytest.mark.parametrize("lam", np.linspace(-1.2, 1.2, 25))
def test_depolarizing_family_verdict(lam):
    choi = choi_forward(KingRuskaiForm.depolarizing(lam))
    expected = -1.0 / 3.0 - 1e-12 <= lam <= 1.0 + 1e-12
    assert cp_test(choi).is_cp == expected
    assert is_psd_oracle(choi.matrix) == expected


@pytest.mark.parametrize("offset, expected", [(1e-6, True), (-1e-6, False), (0.0, True)])
def test_depolarizing_boundary(offset, expected):
    form = KingRuskaiForm.depolarizing(-1.0 / 3.0 + offset)
    assert lattice_test(analysis_matrix(form)).is_cp == expected


def test_non_hermitian_input_is_a_verdict():
    verdict = lattice_test([[1, 0.5], [0, 1]])
    assert not verdict.is_cp
    assert verdict.violation.kind == ViolationKind.NOT_HERMITIAN


def test_zero_diagonal_with_nonzero_row_is_a_verdict():
    verdict = lattice_test([[0, 1], [1, 1]])
    assert verdict.violation.kind == ViolationKind.NONZERO_ROW_AT_ZERO_DIAGONAL
    assert verdict.violation.location == (1,)


def test_collapsed_disk_off_center_is_a_residual():
    # rank-one block fixes S_13 = S_12 S_23 / S_22
    s = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]], dtype=np.complex128)
    verdict = lattice_test(s)
    assert verdict.violation.kind == ViolationKind.COMPATIBILITY_RESIDUAL
    assert verdict.violation.location == (1, 3)
    assert verdict.violation.magnitude == pytest.approx(1.0)


def oracle_samples(generator: MatrixGenerator, count: int):
    """Pairs (matrix, PSD by construction), mixing full-rank, rank-deficient, near-boundary and indefinite samples."""
    size = generator.criteria.dimension
    for i in range(count):
        rank = int(generator.rng.integers(1, size))
        case = i % 6
        if case == 0:
            yield generator.psd(), True
        elif case == 1:
            yield generator.low_rank_psd(rank), True
        elif case == 2:
            yield generator.perturbed(rank, 1e-6), True
        elif case == 3:
            yield generator.indefinite(), False
        elif case == 4:
            yield generator.perturbed(rank, -1e-3), False
        else:
            yield generator.perturbed(rank, -1e-2), False


@pytest.mark.parametrize("size", [4, 9])
def test_verdict_agrees_with_eigenvalue_oracle(size):
    generator = MatrixGenerator(MatrixCriteria(dimension=size, seed=1000 + size))
    for s, constructed_psd in oracle_samples(generator, 500):
        assert is_psd_oracle(s, tol=1e-8) == constructed_psd
        assert lattice_test(s, tol=1e-8).is_cp == constructed_psd


def test_rank_deficient_psd_has_inactive_parameters():
    generator = MatrixGenerator(MatrixCriteria(dimension=9, seed=3))
    verdict = lattice_test(generator.low_rank_psd(2), tol=1e-8)
    assert verdict.is_cp
    assert any(not e.active for e in verdict.params.off)


def test_violation_is_found_no_later_than_perturbed_gap(rng):
    generator = MatrixGenerator(MatrixCriteria(dimension=5, seed=5))
    for _ in range(50):
        s = np.array(generator.psd())
        k0, j0 = sorted(rng.choice(5, size=2, replace=False) + 1)
        bump = 10.0 * np.sqrt(s[k0 - 1, k0 - 1].real * s[j0 - 1, j0 - 1].real)
        s[k0 - 1, j0 - 1] += bump
        s[j0 - 1, k0 - 1] += bump
        verdict = lattice_test(s)
        assert not verdict.is_cp
        k, j = verdict.violation.location
        assert j - k <= j0 - k0


def test_random_cp_is_deterministic_and_cp():
    first = random_cp(2, seed=7)
    second = random_cp(2, seed=7)
    assert np.array_equal(first.matrix, second.matrix)
    assert cp_test(first).is_cp


def test_random_cp_passes_oracle():
    for seed in range(1, 101):
        choi = random_cp(3, seed=seed)
        assert isinstance(choi, ChoiMatrix)
        assert is_psd_oracle(choi.matrix)


@pytest.mark.parametrize("seed", [0, 2, 5, 9, 10])
def test_random_cp_seeds_with_decayed_pivots(seed):
    verdict = cp_test(random_cp(3, seed=seed))
    assert verdict.is_cp
    assert np.all(np.isfinite(matrix_from_schur_params(verdict.params)))


def test_random_cp_is_cp_for_many_seeds():
    assert all(cp_test(random_cp(3, seed=seed)).is_cp for seed in range(300))


def test_to_table_layout():
    params = params_with(3, (2.0, 1.0, 0.5), {(1, 2): 0.5j, (2, 3): -0.25})
    params = SchurParams.from_entries(
        params.diag, {(e.k, e.j): (e.value, (e.k, e.j) != (1, 3)) for e in params.off}
    )
    table = params.to_table()
    assert table.shape == (3, 3)
    assert np.allclose(np.diag(table), [2.0, 1.0, 0.5])
    assert table[0, 1] == 0.5j
    assert table[1, 2] == -0.25
    assert np.isnan(table[0, 2])
    assert np.all(np.tril(table, -1) == 0)


def test_general_four_by_four_tests_are_fast():
    chois = [random_cp(2, seed=seed).matrix for seed in range(100)]
    start = time.perf_counter()
    for i in range(10_000):
        lattice_test(chois[i % 100])
    assert time.perf_counter() - start < 5.0
