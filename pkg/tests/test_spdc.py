import math

import numpy as np
import pytest

from photonlab.spdc import (
    CrystalSpec,
    PolarizationTriple,
    SpdcType,
    WavelengthNm,
    builtin_crystals,
    conversion_efficiency,
    effective_nonlinearity,
    expand_tensor,
    fourier_coefficient,
    idler_uncertainty,
    idler_wavelength,
    load_crystal_file,
    pair_amplitude,
    qpm_residual,
    reduce_tensor,
    required_poling_period,
    spdc_polarizations,
    tuning_curve,
    write_tuning_curve_csv,
)


def _crystal(poling_period_um=40.0, qpm_order=1, length_mm=10.0, duty=0.5):
    return CrystalSpec(
        d_contracted=np.zeros((3, 6)),
        length_mm=length_mm,
        poling_period_um=poling_period_um,
        duty_cycle=duty,
        qpm_order=qpm_order,
        spdc_type=SpdcType.TYPE0,
    )


class TestIdlerWavelength:
    def test_source_design_point(self):
        li = idler_wavelength(WavelengthNm(396.1), WavelengthNm(532.0))
        assert li.value == pytest.approx(1550.5901398086833, rel=1e-12)
        assert li.uncertainty == 0.0

    def test_degenerate_point(self):
        lp = 405.0
        li = idler_wavelength(lp, 2 * lp)
        assert li.value == pytest.approx(2 * lp, rel=1e-12)

    def test_involution(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            lp = rng.uniform(300.0, 800.0)
            ls = rng.uniform(lp * 1.01, lp * 3.0)
            li = idler_wavelength(lp, ls)
            back = idler_wavelength(lp, li)
            assert back.value == pytest.approx(ls, rel=1e-9)

    def test_energy_conservation_exact(self):
        rng = np.random.default_rng(8)
        for _ in range(200):
            lp = rng.uniform(300.0, 800.0)
            ls = rng.uniform(lp * 1.01, lp * 3.0)
            li = idler_wavelength(lp, ls).value
            assert 1.0 / lp == pytest.approx(1.0 / ls + 1.0 / li, rel=1e-12)

    def test_rejects_non_physical(self):
        with pytest.raises(ValueError):
            idler_wavelength(532.0, 532.0)
        with pytest.raises(ValueError):
            idler_wavelength(532.0, 396.1)


class TestIdlerUncertainty:
    def test_zero_inputs(self):
        assert idler_uncertainty(WavelengthNm(396.1), WavelengthNm(532.0)) == 0.0

    def test_matches_finite_difference(self):
        # Independent oracle: central differences through idler_wavelength.
        p = WavelengthNm(396.1, 0.1)
        s = WavelengthNm(532.0, 0.1)
        h = 1e-5
        dp = abs(
            idler_wavelength(p.value + h, s.value).value
            - idler_wavelength(p.value - h, s.value).value
        ) / (2 * h)
        ds = abs(
            idler_wavelength(p.value, s.value + h).value
            - idler_wavelength(p.value, s.value - h).value
        ) / (2 * h)
        oracle = dp * p.uncertainty + ds * s.uncertainty
        assert idler_uncertainty(p, s) == pytest.approx(oracle, rel=0.01)

    def test_linearity(self):
        p1 = WavelengthNm(396.1, 0.1)
        s1 = WavelengthNm(532.0, 0.2)
        p2 = WavelengthNm(396.1, 0.2)
        s2 = WavelengthNm(532.0, 0.4)
        assert idler_uncertainty(p2, s2) == pytest.approx(2 * idler_uncertainty(p1, s1), rel=1e-12)


class TestQuasiPhaseMatching:
    def test_matched_period_zero_residual(self):
        dk = 2 * math.pi / 40.0
        assert qpm_residual(dk, _crystal(poling_period_um=40.0)) == pytest.approx(0.0, abs=1e-15)

    def test_required_period_unit_case(self):
        assert required_poling_period(2 * math.pi, 1) == pytest.approx(1.0, rel=1e-12)

    def test_short_period_catalog_value(self):
        assert required_poling_period(2 * math.pi / 2.7, 1) == pytest.approx(2.7, rel=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            dk = rng.uniform(1e-3, 10.0)
            m = int(rng.integers(1, 6))
            period = required_poling_period(dk, m)
            res = qpm_residual(dk, _crystal(poling_period_um=period, qpm_order=m))
            assert abs(res) <= 1e-12 * max(1.0, dk)

    def test_degenerate_inputs_rejected(self):
        with pytest.raises(ValueError):
            required_poling_period(0.0, 1)
        with pytest.raises(ValueError):
            required_poling_period(1.0, 0)


class TestFourierCoefficient:
    def test_half_duty_first_order(self):
        assert fourier_coefficient(1, 0.5) == pytest.approx(2 / math.pi, rel=1e-12)

    def test_half_duty_second_order_vanishes(self):
        assert fourier_coefficient(2, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_full_duty_no_modulation(self):
        assert fourier_coefficient(1, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_magnitude_bound(self):
        for m in range(1, 6):
            for duty in np.linspace(0.01, 1.0, 50):
                assert abs(fourier_coefficient(m, duty)) <= 2 / (math.pi * m) + 1e-15

    def test_rejects_bad_duty(self):
        with pytest.raises(ValueError):
            fourier_coefficient(1, 0.0)
        with pytest.raises(ValueError):
            fourier_coefficient(1, 1.2)


class TestPairAmplitude:
    def test_phase_matched_maximum(self):
        crystal = _crystal(length_mm=10.0)
        amp = pair_amplitude(0.0, crystal, d_eff_pm_v=2.0, constant_c=3.0)
        assert amp.value == pytest.approx(3.0 * 2.0 * 10.0, rel=1e-12)

    def test_first_zero(self):
        crystal = _crystal(length_mm=10.0)
        dk = 2 * math.pi / 10.0  # puts dk*L/2 at pi
        amp = pair_amplitude(dk, crystal, d_eff_pm_v=1.0)
        assert amp.value == pytest.approx(0.0, abs=1e-12)

    def test_half_pi_point(self):
        crystal = _crystal(length_mm=10.0)
        dk = math.pi / 10.0  # dk*L/2 = pi/2, sinc = 2/pi
        amp = pair_amplitude(dk, crystal, d_eff_pm_v=1.0, constant_c=1.0)
        assert amp.value == pytest.approx(10.0 * 2 / math.pi, rel=1e-12)

    def test_bounded_and_symmetric(self):
        crystal = _crystal(length_mm=7.0)
        rng = np.random.default_rng(3)
        for _ in range(200):
            dk = rng.uniform(-5, 5)
            plus = pair_amplitude(dk, crystal, 1.5, 2.0)
            minus = pair_amplitude(-dk, crystal, 1.5, 2.0)
            assert abs(plus.value) <= abs(2.0 * 1.5 * 7.0) + 1e-12
            assert plus.value == pytest.approx(minus.value, rel=1e-12)


def _random_symmetric_tensor(rng):
    chi = rng.normal(size=(3, 3, 3))
    return (chi + chi.transpose(0, 2, 1)) / 2


def _random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


class TestTensorAlgebra:
    def test_contracted_index_map(self):
        chi = np.zeros((3, 3, 3))
        chi[0, 1, 2] = chi[0, 2, 1] = 5.0
        d = reduce_tensor(chi)
        assert d[0, 3] == 5.0
        assert np.count_nonzero(d) == 1

    def test_zero_tensor(self):
        assert np.all(reduce_tensor(np.zeros((3, 3, 3))) == 0)

    def test_round_trip_idempotent(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            chi = _random_symmetric_tensor(rng)
            d = reduce_tensor(chi)
            chi2 = expand_tensor(d)
            assert np.allclose(chi, chi2, atol=1e-14)
            assert np.allclose(reduce_tensor(chi2), d, atol=1e-14)

    def test_asymmetric_rejected_with_indices(self):
        chi = np.zeros((3, 3, 3))
        chi[1, 0, 2] = 1.0
        with pytest.raises(ValueError, match=r"\(2,1,3\)"):
            reduce_tensor(chi)


class TestEffectiveNonlinearity:
    def test_zero_matrix(self):
        x = np.array([1.0, 0.0, 0.0])
        assert effective_nonlinearity(np.zeros((3, 6)), x, x, x) == 0.0

    def test_single_element_pickout(self):
        d = np.zeros((3, 6))
        d[0, 0] = 1.0
        x = np.array([1.0, 0.0, 0.0])
        assert effective_nonlinearity(d, x, x, x) == pytest.approx(1.0, rel=1e-12)

    def test_matches_full_contraction(self):
        # Independent oracle: 27-term sum over the expanded tensor.
        rng = np.random.default_rng(13)
        for _ in range(100):
            chi = _random_symmetric_tensor(rng)
            d = reduce_tensor(chi)
            p, s, i = (_random_unit(rng) for _ in range(3))
            brute = float(np.einsum("abc,a,b,c->", chi, p, s, i))
            assert effective_nonlinearity(d, p, s, i) == pytest.approx(brute, abs=1e-12)

    def test_non_unit_vector_rejected(self):
        d = np.zeros((3, 6))
        with pytest.raises(ValueError):
            effective_nonlinearity(d, [1, 1, 0], [1, 0, 0], [1, 0, 0])


class TestConversionEfficiency:
    def test_zero_pairs(self):
        assert conversion_efficiency(0, 10**6) == 0.0

    def test_poled_crystal_order_of_magnitude(self):
        assert conversion_efficiency(10, 10**10) == pytest.approx(1e-9, rel=1e-12)

    def test_rejects_zero_pump(self):
        with pytest.raises(ValueError):
            conversion_efficiency(1, 0)

    def test_consistent_with_pair_sampler(self):
        # |psi|^2 plays the role of mean pairs per pulse in the Monte Carlo
        # pair source; the sampled total must sit within 3 sigma.
        from photonlab.photostats import PulseTrainSpec, simulate_streams, DetectorSpec

        mu = 0.05
        n = 200_000
        spec = PulseTrainSpec(mean_pairs_per_pulse=mu, n_pulses=n)
        ideal = DetectorSpec(efficiency=1.0)
        a, _ = simulate_streams(spec, (1.0, 1.0), (ideal, ideal), seed=42)
        expected = mu * n
        assert abs(len(a) - expected) <= 3 * math.sqrt(expected)


class TestPolarizations:
    @pytest.mark.parametrize(
        "spdc_type,pump,expected",
        [
            (SpdcType.TYPE0, "V", ("V", "V", "V")),
            (SpdcType.TYPE0, "H", ("H", "H", "H")),
            (SpdcType.TYPE1, "V", ("V", "H", "H")),
            (SpdcType.TYPE1, "H", ("H", "V", "V")),
            (SpdcType.TYPE2, "H", ("H", "H", "V")),
            (SpdcType.TYPE2, "V", ("V", "V", "H")),
        ],
    )
    def test_table_rows(self, spdc_type, pump, expected):
        triple = spdc_polarizations(spdc_type, pump)
        assert (triple.pump, triple.signal, triple.idler) == expected

    def test_accepts_string_type(self):
        triple = spdc_polarizations("TypeII", "H")
        assert triple.idler == "V"

    def test_rejects_unknown(self):
        with pytest.raises(ValueError):
            spdc_polarizations(SpdcType.TYPE0, "X")


class TestTuningCurveAndConfig:
    def test_curve_rows(self):
        rows = tuning_curve(WavelengthNm(396.1, 0.1), [WavelengthNm(532.0, 0.1)])
        assert len(rows) == 1
        lp, ls, li, dli = rows[0]
        assert (lp, ls) == (396.1, 532.0)
        assert li == pytest.approx(1550.5901398086833)
        assert dli > 0

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "curve.csv"
        signals = [WavelengthNm(v, 0.1) for v in (520.0, 532.0, 540.0)]
        write_tuning_curve_csv(path, WavelengthNm(396.1, 0.1), signals)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "lambda_p_nm,lambda_s_nm,lambda_i_nm,d_lambda_i_nm"
        assert len(lines) == 4

    def test_builtin_crystals_load(self):
        crystals = builtin_crystals()
        assert "ppktp-type2-degenerate" in crystals
        assert crystals["ppktp-type2-degenerate"].poling_period_um == 40.0

    def test_user_config_file(self, tmp_path):
        path = tmp_path / "crystals.json"
        path.write_text(
            '{"crystals": {"custom": {"d_contracted": '
            "[[0,0,0,0,0,0],[0,0,0,0,0,0],[0,0,16.9,0,0,0]], "
            '"length_mm": 2, "poling_period_um": 10, "duty_cycle": 0.5, '
            '"qpm_order": 1, "spdc_type": "TypeI"}}}'
        )
        crystals = load_crystal_file(path)
        assert crystals["custom"].spdc_type is SpdcType.TYPE1


class TestTypeInvariants:
    def test_wavelength_validation(self):
        with pytest.raises(ValueError):
            WavelengthNm(-1.0)
        with pytest.raises(ValueError):
            WavelengthNm(500.0, -0.1)

    def test_crystal_validation(self):
        with pytest.raises(ValueError):
            _crystal(duty=1.5)
        with pytest.raises(ValueError):
            _crystal(qpm_order=0)
        with pytest.raises(ValueError):
            _crystal(poling_period_um=-1.0)

    def test_polarization_triple_validation(self):
        with pytest.raises(ValueError):
            PolarizationTriple("H", "V", "X")
