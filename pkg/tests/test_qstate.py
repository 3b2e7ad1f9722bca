import math

import numpy as np
import pytest

from photonlab.qstate import (
    BELL_LABELS,
    KET_D,
    KET_H,
    KET_V,
    TomographyRecord,
    WaveplateSetting,
    assert_density_matrix,
    bell_parameter,
    bell_state,
    bell_state_measure,
    bsm_outcome_probabilities,
    canonical_settings,
    concurrence,
    density_matrix_from_json,
    density_matrix_to_json,
    entanglement_swap_demo,
    expected_coincidences,
    fidelity,
    ket_to_density,
    mle_reconstruct,
    partial_trace_two_qubit,
    projector_from_waveplates,
    purity,
    records_from_json,
    records_to_json,
    setting_projector,
    simulate_tomography,
    werner_state,
)

RHO_HH = ket_to_density(np.kron(KET_H, KET_H))
RHO_BELL = ket_to_density(bell_state("phi_plus"))


def _haar_unitary(rng, n=2):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


class TestWaveplateProjectors:
    def test_zero_angles_give_horizontal(self):
        assert np.allclose(projector_from_waveplates(0.0, 0.0), ket_to_density(KET_H), atol=1e-12)

    def test_diagonal_setting_matches_jones_oracle(self):
        # Independent oracle: literal Jones matrices multiplied by hand.
        hwp = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)  # 22.5 deg
        qwp = np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2  # 45 deg
        u = hwp @ qwp
        ket = u.conj().T @ KET_H
        oracle = np.outer(ket, ket.conj())
        produced = projector_from_waveplates(22.5, 45.0)
        assert np.allclose(produced, oracle, atol=1e-12)
        assert np.allclose(produced, ket_to_density(KET_D), atol=1e-12)

    def test_projector_algebra(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            p = projector_from_waveplates(rng.uniform(0, 180), rng.uniform(0, 180))
            assert np.allclose(p @ p, p, atol=1e-12)
            assert np.trace(p).real == pytest.approx(1.0, abs=1e-12)
            assert np.allclose(p, p.conj().T, atol=1e-12)

    def test_canonical_set_informationally_complete(self):
        mats = [setting_projector(s).reshape(-1) for s in canonical_settings()]
        assert np.linalg.matrix_rank(np.stack(mats), tol=1e-10) == 16

    def test_sixteen_distinct_settings(self):
        settings = canonical_settings()
        assert len(settings) == len(set(settings)) == 16


class TestExpectedCoincidences:
    def test_aligned_setting_full_rate(self):
        setting = WaveplateSetting(0.0, 0.0, 0.0, 0.0)
        assert expected_coincidences(RHO_HH, setting, 1000) == pytest.approx(1000.0, abs=1e-9)

    def test_crossed_arm_blocks(self):
        # HWP at 45 on arm 2 projects onto V.
        setting = WaveplateSetting(0.0, 0.0, 45.0, 0.0)
        assert expected_coincidences(RHO_HH, setting, 1000) == pytest.approx(0.0, abs=1e-9)

    def test_bell_state_in_diagonal_basis(self):
        setting = WaveplateSetting(22.5, 45.0, 22.5, 45.0)
        assert expected_coincidences(RHO_BELL, setting, 1000) == pytest.approx(500.0, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            expected_coincidences(np.eye(2) / 2, WaveplateSetting(0, 0, 0, 0), 10)


class TestSimulateTomography:
    def test_zero_reference_count(self):
        records = simulate_tomography(RHO_BELL, 0, seed=1)
        assert all(rec.coincidences == 0 for rec in records)

    def test_noiseless_equals_expectation(self):
        records = simulate_tomography(RHO_BELL, 1234, seed=1, noiseless=True)
        for rec in records:
            assert rec.coincidences == pytest.approx(
                expected_coincidences(RHO_BELL, rec.setting, 1234), abs=1e-9
            )

    def test_empirical_mean_tracks_expectation(self):
        n_ref, n_seeds = 500, 10_000
        totals = np.zeros(16)
        for seed in range(n_seeds):
            records = simulate_tomography(RHO_BELL, n_ref, seed=seed)
            totals += [rec.coincidences for rec in records]
        means = totals / n_seeds
        for k, rec in enumerate(simulate_tomography(RHO_BELL, n_ref, seed=0, noiseless=True)):
            lam = rec.coincidences
            tol = 3 * math.sqrt(max(lam, 1e-9) / n_seeds)
            assert abs(means[k] - lam) <= tol

    def test_deterministic_per_seed(self):
        a = simulate_tomography(RHO_BELL, 1000, seed=7)
        b = simulate_tomography(RHO_BELL, 1000, seed=7)
        assert [r.coincidences for r in a] == [r.coincidences for r in b]


class TestMleReconstruct:
    def test_noiseless_product_state(self):
        records = simulate_tomography(RHO_HH, 10_000, seed=1, noiseless=True)
        result = mle_reconstruct(records)
        assert fidelity(result.rho, RHO_HH) >= 0.999
        assert_density_matrix(result.rho, herm_tol=1e-9, trace_tol=1e-9, eig_tol=-1e-9)

    def test_uniform_counts_give_maximally_mixed(self):
        records = [TomographyRecord(s, 2500, 10_000) for s in canonical_settings()]
        result = mle_reconstruct(records)
        eigs = np.linalg.eigvalsh(result.rho - np.eye(4) / 4)
        assert 0.5 * np.sum(np.abs(eigs)) < 0.01

    def test_poisson_bell_state_fidelity(self):
        fids = []
        for seed in range(10):
            records = simulate_tomography(RHO_BELL, 10_000, seed=seed)
            result = mle_reconstruct(records)
            fids.append(fidelity(result.rho, RHO_BELL))
        assert np.mean(fids) >= 0.99

    def test_likelihood_monotone(self):
        records = simulate_tomography(RHO_BELL, 5_000, seed=3)
        result = mle_reconstruct(records)
        gains = np.diff(np.array(result.loglik_history))
        assert np.all(gains >= 0)

    def test_incomplete_set_rejected(self):
        records = simulate_tomography(RHO_BELL, 100, seed=1)[:-1]
        with pytest.raises(ValueError, match="canonical"):
            mle_reconstruct(records)

    def test_duplicate_setting_rejected(self):
        records = simulate_tomography(RHO_BELL, 100, seed=1)
        records[1] = TomographyRecord(records[0].setting, 5, 100)
        with pytest.raises(ValueError, match="duplicated"):
            mle_reconstruct(records)


class TestFidelity:
    def test_self_fidelity(self):
        assert fidelity(RHO_BELL, RHO_BELL) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_pure_states(self):
        rho_vv = ket_to_density(np.kron(KET_V, KET_V))
        assert fidelity(RHO_HH, rho_vv) == pytest.approx(0.0, abs=1e-12)

    def test_werner_closed_form(self):
        assert fidelity(werner_state(0.96), RHO_BELL) == pytest.approx(0.97, abs=1e-10)

    def test_symmetric(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            a = _random_state(rng)
            b = _random_state(rng)
            assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-9)

    def test_unit_fidelity_implies_equal(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            a = _random_state(rng)
            b = _random_state(rng)
            if fidelity(a, b) > 1 - 1e-12:
                assert 0.5 * np.sum(np.abs(np.linalg.eigvalsh(a - b))) < 1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fidelity(np.eye(2) / 2, np.eye(4) / 4)


def _random_state(rng, d=4):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


class TestConcurrence:
    def test_bell_state(self):
        assert concurrence(RHO_BELL) == pytest.approx(1.0, abs=1e-9)

    def test_product_state(self):
        assert concurrence(RHO_HH) == pytest.approx(0.0, abs=1e-9)

    def test_werner_closed_form(self):
        assert concurrence(werner_state(0.9)) == pytest.approx(0.85, abs=1e-10)
        assert concurrence(werner_state(1 / 3)) == pytest.approx(0.0, abs=1e-10)

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(9)
        base = concurrence(werner_state(0.8))
        for _ in range(100):
            u = np.kron(_haar_unitary(rng), _haar_unitary(rng))
            rotated = u @ werner_state(0.8) @ u.conj().T
            assert abs(concurrence(rotated) - base) < 1e-10

    def test_wrong_dimension(self):
        with pytest.raises(ValueError):
            concurrence(np.eye(2) / 2)


class TestBellParameter:
    def test_tsirelson_saturation(self):
        assert abs(bell_parameter(RHO_BELL) - 2 * math.sqrt(2)) < 1e-12

    def test_maximally_mixed(self):
        assert bell_parameter(np.eye(4) / 4) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("p", [0.5, 0.9, 0.9855])
    def test_werner_linear_scaling(self, p):
        assert bell_parameter(werner_state(p)) == pytest.approx(2 * math.sqrt(2) * p, abs=1e-10)

    def test_never_exceeds_tsirelson(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            assert bell_parameter(_random_state(rng)) <= 2 * math.sqrt(2) + 1e-9


class TestPurity:
    def test_pure_state(self):
        assert purity(RHO_BELL) == pytest.approx(1.0, abs=1e-12)

    def test_maximally_mixed(self):
        assert purity(np.eye(4) / 4) == pytest.approx(0.25, abs=1e-12)

    def test_werner_against_matrix_square(self):
        rho = werner_state(0.5)
        oracle = float(np.trace(rho @ rho).real)
        assert purity(rho) == pytest.approx(oracle, abs=1e-14)
        assert oracle == pytest.approx(0.4375, abs=1e-12)


class TestBellStateMeasure:
    def test_product_input_keeps_remainder(self):
        psi = np.zeros(16, dtype=complex)
        psi[0] = 1.0  # |0000>
        outcomes = bsm_outcome_probabilities(psi, (2, 3))
        assert outcomes["phi_plus"][0] == pytest.approx(0.5, abs=1e-12)
        assert outcomes["phi_minus"][0] == pytest.approx(0.5, abs=1e-12)
        assert outcomes["psi_plus"][0] == pytest.approx(0.0, abs=1e-12)
        expected_rem = np.zeros(4, dtype=complex)
        expected_rem[0] = 1.0
        for label in ("phi_plus", "phi_minus"):
            rem = outcomes[label][1]
            assert abs(abs(np.vdot(rem, expected_rem)) - 1.0) < 1e-12
        result = bell_state_measure(psi, (2, 3), seed=4)
        assert result.outcome.startswith("phi_")

    def test_double_bell_outcomes_uniform(self):
        psi = np.kron(bell_state("phi_plus"), bell_state("phi_plus"))
        outcomes = bsm_outcome_probabilities(psi, (1, 2))
        for label in BELL_LABELS:
            prob, rem = outcomes[label]
            assert prob == pytest.approx(0.25, abs=1e-12)
            assert concurrence(ket_to_density(rem)) == pytest.approx(1.0, abs=1e-9)

    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            psi = rng.normal(size=16) + 1j * rng.normal(size=16)
            psi /= np.linalg.norm(psi)
            outcomes = bsm_outcome_probabilities(psi, (0, 2))
            assert sum(p for p, _ in outcomes.values()) == pytest.approx(1.0, abs=1e-12)

    def test_invalid_pair(self):
        psi = np.zeros(16, dtype=complex)
        psi[0] = 1.0
        with pytest.raises(ValueError):
            bell_state_measure(psi, (1, 1), seed=0)
        with pytest.raises(ValueError):
            bell_state_measure(psi, (0, 4), seed=0)


class TestEntanglementSwap:
    def test_concurrence_before_and_after(self):
        for seed in range(25):
            result = entanglement_swap_demo(seed)
            assert result.concurrence_before == pytest.approx(0.0, abs=1e-9)
            assert result.concurrence_after == pytest.approx(1.0, abs=1e-9)

    def test_outcome_frequencies_uniform(self):
        n = 2_000
        counts = {label: 0 for label in BELL_LABELS}
        psi = np.kron(bell_state("phi_plus"), bell_state("phi_plus"))
        for seed in range(n):
            counts[bell_state_measure(psi, (1, 2), seed=seed).outcome] += 1
        sigma = math.sqrt(n * 0.25 * 0.75)
        for label in BELL_LABELS:
            assert abs(counts[label] - n * 0.25) <= 3 * sigma


class TestHelpers:
    def test_partial_trace_of_bell_pair(self):
        psi = np.kron(bell_state("phi_plus"), bell_state("phi_plus"))
        reduced = partial_trace_two_qubit(ket_to_density(psi), keep=(0, 3))
        assert np.allclose(reduced, np.eye(4) / 4, atol=1e-12)

    def test_density_matrix_validation(self):
        with pytest.raises(ValueError):
            assert_density_matrix(np.eye(4))  # trace 4
        bad = np.diag([1.5, -0.5, 0.0, 0.0]).astype(complex)
        with pytest.raises(ValueError):
            assert_density_matrix(bad)

    def test_werner_parameter_range(self):
        with pytest.raises(ValueError):
            werner_state(1.5)

    def test_density_matrix_json_round_trip(self):
        back = density_matrix_from_json(density_matrix_to_json(RHO_BELL))
        assert np.allclose(back, RHO_BELL, atol=1e-15)

    def test_records_json_round_trip(self):
        records = simulate_tomography(RHO_BELL, 100, seed=1)
        back = records_from_json(records_to_json(records))
        assert back == records
