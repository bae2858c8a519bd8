import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from nmosc.errors import DivergenceError, DomainError, UnsupportedVariantError
from nmosc.spectral import (BandGap, Discrete, DiscreteBath, PowerLawExpCutoff,
                            Tabulated, discretize, evaluate, frequency_shift,
                            integrate_density, read_tabulated_csv)

power_laws = st.builds(
    PowerLawExpCutoff,
    alpha=st.floats(0.0, 5.0),
    s=st.floats(0.2, 4.0),
    omega_c=st.floats(0.1, 10.0),
)


class TestEvaluate:
    def test_vanishes_at_zero(self, ohmic):
        assert evaluate(ohmic, 0.0) == 0.0

    def test_direct_substitution(self, ohmic):
        assert evaluate(ohmic, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)

    def test_inside_gap_is_zero(self, ohmic):
        assert evaluate(BandGap(ohmic, 1.0, 2.0), 1.5) == 0.0

    def test_array_input(self, ohmic):
        w = np.array([0.5, 1.0, 2.0])
        np.testing.assert_allclose(evaluate(ohmic, w), w * np.exp(-w), rtol=1e-15)

    def test_negative_frequency_rejected(self, ohmic):
        with pytest.raises(DomainError):
            evaluate(ohmic, -0.1)

    def test_discrete_unsupported(self):
        J = Discrete(DiscreteBath.from_modes([(1.0, 1.0)]))
        with pytest.raises(UnsupportedVariantError):
            evaluate(J, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(power_laws)
    def test_nonnegative_on_dense_scan(self, J):
        w = np.linspace(0.0, 60.0 * J.omega_c, 2001)
        assert np.all(evaluate(J, w) >= 0)
        assert np.all(evaluate(BandGap(J, 0.3 * J.omega_c, 0.9 * J.omega_c), w) >= 0)

    @settings(max_examples=50, deadline=None)
    @given(power_laws, st.floats(0.05, 2.0), st.floats(0.05, 2.0))
    def test_band_gap_equals_base_outside(self, J, lo, width):
        G = BandGap(J, lo, lo + width)
        w = np.linspace(0.0, 10.0, 997)
        out = (w < G.lo) | (w > G.hi)
        assert np.array_equal(evaluate(G, w)[out], evaluate(J, w)[out])
        assert np.all(evaluate(G, w)[~out] == 0.0)

    def test_tabulated_is_linear_and_zero_outside(self):
        J = Tabulated((1.0, 2.0, 3.0), (0.0, 2.0, 1.0))
        assert evaluate(J, 1.5) == 1.0
        assert evaluate(J, 2.5) == 1.5
        assert evaluate(J, 0.5) == 0.0
        assert evaluate(J, 4.0) == 0.0


class TestValidation:
    def test_discrete_bath_rules(self):
        with pytest.raises(DomainError):
            DiscreteBath((), ())
        with pytest.raises(DomainError):
            DiscreteBath.from_modes([(2.0, 1.0), (1.0, 1.0)])
        with pytest.raises(DomainError):
            DiscreteBath.from_modes([(1.0, 0.0)])
        with pytest.raises(DomainError):
            DiscreteBath.from_modes([(-1.0, 1.0)])

    def test_tabulated_rules(self):
        with pytest.raises(DomainError):
            Tabulated((0.0, 0.0), (1.0, 1.0))
        with pytest.raises(DomainError):
            Tabulated((0.0, 1.0), (1.0, -1.0))

    @pytest.mark.parametrize("kw", [dict(alpha=-1, s=1, omega_c=1),
                                    dict(alpha=1, s=0, omega_c=1),
                                    dict(alpha=1, s=1, omega_c=0)])
    def test_power_law_rules(self, kw):
        with pytest.raises(DomainError):
            PowerLawExpCutoff(**kw)

    def test_gap_rules(self, ohmic):
        with pytest.raises(DomainError):
            BandGap(ohmic, 2.0, 1.0)
        with pytest.raises(UnsupportedVariantError):
            BandGap(Discrete(DiscreteBath.from_modes([(1, 1)])), 1.0, 2.0)


class TestFrequencyShift:
    def test_single_mode(self):
        assert frequency_shift(Discrete(DiscreteBath.from_modes([(1.0, 2.0)]))) == -4.0

    def test_ohmic_closed_form(self):
        assert frequency_shift(PowerLawExpCutoff(0.5, 1.0, 2.0)) == pytest.approx(-1.0, rel=1e-15)

    def test_sub_ohmic_against_quadrature(self):
        J = PowerLawExpCutoff(1.0, 0.5, 1.0)
        assert frequency_shift(J) == pytest.approx(-1.772453850905516, rel=1e-14)
        # independent oracle: QUADPACK on the raw integrand over [0, inf)
        head, _ = integrate.quad(lambda w: w ** -0.5 * math.exp(-w), 0, 1, limit=200)
        tail, _ = integrate.quad(lambda w: w ** -0.5 * math.exp(-w), 1, np.inf, limit=200)
        assert frequency_shift(J) == pytest.approx(-(head + tail), rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(power_laws)
    def test_closed_form_matches_density_quadrature(self, J):
        q = integrate_density(J, lambda w: 1.0, singular_power=-1.0)
        assert -q == pytest.approx(frequency_shift(J), rel=1e-10, abs=1e-14)

    def test_band_gap_removes_gap_share(self, ohmic):
        G = BandGap(ohmic, 1.0, 2.0)
        # int_1^2 e^-w dw removed from the Ohmic shift -1
        assert frequency_shift(G) == pytest.approx(-1.0 + (math.exp(-1) - math.exp(-2)), rel=1e-12)

    def test_tabulated_trapezoid(self):
        J = Tabulated((0.0, 1.0, 2.0), (0.0, 1.0, 0.0))
        # J/w samples: limit 1 at 0, 1 at 1, 0 at 2 -> trapezoid 1 + 0.5
        assert frequency_shift(J) == pytest.approx(-1.5)

    def test_tabulated_divergent(self):
        with pytest.raises(DivergenceError):
            frequency_shift(Tabulated((0.0, 1.0), (1.0, 1.0)))

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.1, 3.0), st.floats(0.7, 4.0), st.floats(0.2, 5.0))
    def test_discretization_converges(self, alpha, s, wc):
        J = PowerLawExpCutoff(alpha, s, wc)
        disc = frequency_shift(Discrete(discretize(J, 2000, 20 * wc)))
        assert disc == pytest.approx(frequency_shift(J), rel=0.01)

    def test_sub_ohmic_discretization_error_follows_threshold_law(self):
        # midpoint misses ~ dw^s (1/s - 2^(1-s)) / Gamma(s) of the shift
        J = PowerLawExpCutoff(1.0, 0.5, 1.0)
        exact = frequency_shift(J)
        errs = []
        for K in (2000, 8000, 32000):
            dw = 20.0 / K
            rel = abs(frequency_shift(Discrete(discretize(J, K, 20.0))) / exact - 1)
            predicted = dw ** 0.5 * (2.0 - 2 ** 0.5) / special.gamma(0.5)
            assert rel == pytest.approx(predicted, rel=0.1)
            errs.append(rel)
        assert errs[0] > errs[1] > errs[2]


class TestDiscretize:
    def test_constant_tabulated_by_hand(self):
        bath = discretize(Tabulated((0.0, 1.0), (1.0, 1.0)), 2, 1.0)
        assert bath.omega == (0.25, 0.75)
        np.testing.assert_allclose(bath.coupling, [math.sqrt(0.5)] * 2, rtol=1e-15)

    def test_single_interval(self, ohmic):
        bath = discretize(ohmic, 1, 2.0)
        assert bath.omega == (1.0,)
        assert bath.coupling[0] ** 2 == pytest.approx(2.0 * evaluate(ohmic, 1.0), rel=1e-15)

    def test_ohmic_shift_within_one_percent(self, ohmic):
        disc = frequency_shift(Discrete(discretize(ohmic, 200, 10.0)))
        assert disc == pytest.approx(-0.9995, rel=0.01)

    def test_gap_modes_dropped(self, ohmic):
        bath = discretize(BandGap(ohmic, 1.0, 2.0), 100, 5.0)
        w = np.array(bath.omega)
        assert not np.any((w >= 1.0) & (w <= 2.0))
        assert bath.size == 80

    def test_all_zero_rejected(self):
        with pytest.raises(DomainError):
            discretize(PowerLawExpCutoff(0.0, 1.0, 1.0), 10, 5.0)

    @pytest.mark.parametrize("K,wmax", [(0, 1.0), (2.5, 1.0), (3, 0.0)])
    def test_bad_input(self, ohmic, K, wmax):
        with pytest.raises(DomainError):
            discretize(ohmic, K, wmax)


class TestTabulatedCsv:
    def test_header_skipped(self, tmp_path):
        p = tmp_path / "j.csv"
        p.write_text("omega,J\n0,0\n1,2\n2,0.5\n")
        J = read_tabulated_csv(p)
        assert J.omega == (0.0, 1.0, 2.0)
        assert J.values == (0.0, 2.0, 0.5)

    def test_headerless(self, tmp_path):
        p = tmp_path / "j.csv"
        p.write_text("0.5,1\n1.5,2\n")
        assert read_tabulated_csv(p).omega == (0.5, 1.5)

    def test_bad_row(self, tmp_path):
        p = tmp_path / "j.csv"
        p.write_text("0,0\nx,1\n")
        with pytest.raises(DomainError):
            read_tabulated_csv(p)

    def test_not_increasing(self, tmp_path):
        p = tmp_path / "j.csv"
        p.write_text("1,0\n0.5,1\n")
        with pytest.raises(DomainError):
            read_tabulated_csv(p)
