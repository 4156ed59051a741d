"""
Tests for the Radial Symbol Catalog
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spectral import (
    MultiplierError,
    MultiplierSpec,
    SymbolFamily,
    check_dissipation_condition,
    dissipation_margin,
    divergence,
    eval_symbol,
    make_grid,
    rescaled_limit_gap,
    symbol_on_grid,
    velocity_from_scalar,
)
from dynamics import random_band


LOG10 = MultiplierSpec(family=SymbolFamily.LOG10)


class TestMultiplierSpec:
    """Test suite for symbol parameter validation."""

    def test_defaults(self):
        """Test default shift and sign."""
        assert LOG10.shift == 10.0
        assert LOG10.sign == 1

    @pytest.mark.parametrize("family", [SymbolFamily.POWER_SHIFT, SymbolFamily.RESCALED])
    def test_delta_required(self, family):
        """Test power and rescaled families need delta in (0, 1)."""
        with pytest.raises(ValueError):
            MultiplierSpec(family=family)
        with pytest.raises(ValueError):
            MultiplierSpec(family=family, delta=1.0)

    def test_parameter_ranges(self):
        """Test beta, alpha, mu, shift and sign ranges."""
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.LOG_POW, beta=0.0)
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.FRAC_LAP)
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.LOG_LAPLACIAN, mu=-1.0)
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.LOG10, shift=0.5)
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.LOG10, sign=2)

    def test_unknown_keys_rejected(self):
        """Test extra keys are refused."""
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.LOG10, gamma=1.0)

    def test_tabulated_validation(self):
        """Test knots must start at zero, increase and be monotone."""
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.TABULATED, table=((0.0, 1.0),))
        with pytest.raises(ValueError):
            MultiplierSpec(family=SymbolFamily.TABULATED, table=((1.0, 1.0), (2.0, 2.0)))
        with pytest.raises(ValueError):
            MultiplierSpec(
                family=SymbolFamily.TABULATED,
                table=((0.0, 1.0), (1.0, 3.0), (2.0, 2.0)),
            )

    def test_describe(self):
        """Test the short textual form."""
        assert LOG10.with_sign(-1).describe() == "-log10()"
        spec = MultiplierSpec(family=SymbolFamily.POWER_SHIFT, delta=0.5)
        assert spec.describe() == "+power_shift(delta=0.5)"

    def test_hashable(self):
        """Test equal specs hash equally so grid caches are shared."""
        a = MultiplierSpec(family=SymbolFamily.LOG_POW, beta=2.0)
        b = MultiplierSpec(family=SymbolFamily.LOG_POW, beta=2.0)

        assert a == b
        assert hash(a) == hash(b)


class TestEvalSymbol:
    """Test suite for pointwise symbol values."""

    def test_log10_at_zero(self):
        """Test log(a + 0) = log 10."""
        assert eval_symbol(LOG10, 0.0) == pytest.approx(math.log(10.0))

    def test_power_shift(self):
        """Test (a + r)^-delta."""
        spec = MultiplierSpec(family=SymbolFamily.POWER_SHIFT, delta=0.5)

        assert spec(0.0) == pytest.approx(10.0**-0.5)
        assert spec(90.0) == pytest.approx(0.1)

    def test_rescaled_value(self):
        """Test ((a + r)^-delta - 1)/delta."""
        spec = MultiplierSpec(family=SymbolFamily.RESCALED, delta=0.1)

        assert spec(0.0) == pytest.approx((10.0**-0.1 - 1.0) / 0.1, rel=1e-14)

    def test_other_families(self):
        """Test log_pow, log_of_log, frac_lap, identity and log_laplacian."""
        r = 5.0
        assert MultiplierSpec(family=SymbolFamily.LOG_POW, beta=2.0)(r) == pytest.approx(math.log(15.0) ** 2)
        assert MultiplierSpec(family=SymbolFamily.LOG_OF_LOG, alpha=1.0)(r) == pytest.approx(
            math.log(10.0 + math.log(15.0))
        )
        assert MultiplierSpec(family=SymbolFamily.FRAC_LAP, alpha=0.5)(r) == pytest.approx(5.0)
        assert MultiplierSpec(family=SymbolFamily.IDENTITY)(r) == 1.0
        assert MultiplierSpec(family=SymbolFamily.LOG_LAPLACIAN, mu=1.0)(r) == pytest.approx(math.log(35.0))

    def test_tabulated_interpolates_in_log(self):
        """Test the tabulated family is linear in log(a + r) between knots."""
        spec = MultiplierSpec(family=SymbolFamily.TABULATED, table=((0.0, 0.0), (90.0, 1.0)))
        r = math.sqrt(10.0 * 100.0) - 10.0  # log(a + r) halfway between log 10 and log 100

        assert spec(0.0) == pytest.approx(0.0)
        assert spec(90.0) == pytest.approx(1.0)
        assert spec(r) == pytest.approx(0.5)

    def test_array_input(self):
        """Test array arguments keep their shape."""
        out = eval_symbol(LOG10, np.array([[0.0, 1.0], [2.0, 3.0]]))

        assert out.shape == (2, 2)

    def test_negative_argument(self):
        """Test negative r raises MultiplierError."""
        with pytest.raises(MultiplierError):
            eval_symbol(LOG10, -1.0)

    @settings(max_examples=50, deadline=None)
    @given(r=st.floats(0.0, 1e8), delta=st.floats(0.01, 0.99))
    def test_rescaled_tends_to_minus_log(self, r, delta):
        """Test |rescaled + log(a + r)| <= delta log^2(a + r) / 2 + round-off."""
        spec = MultiplierSpec(family=SymbolFamily.RESCALED, delta=delta)
        log_a = math.log(10.0 + r)
        gap = abs(spec(r) + log_a)

        assert gap <= 0.5 * delta * log_a**2 + 1e-12 * log_a


class TestGridSymbols:
    """Test suite for symbols sampled on a grid."""

    def test_cached_and_read_only(self):
        """Test the grid table is shared and immutable."""
        grid = make_grid(16)
        a = symbol_on_grid(grid, LOG10)
        b = LOG10.on_grid(grid)

        assert a is b
        assert not a.flags.writeable

    def test_velocity_is_divergence_free(self):
        """Test u = sign grad-perp Gamma theta has zero divergence."""
        grid = make_grid(32)
        theta = random_band(grid, 1, 8, seed=0)
        u = velocity_from_scalar(theta, LOG10.with_sign(-1))

        assert np.max(np.abs(divergence(u).coeffs)) <= 1e-10

    def test_velocity_sign(self):
        """Test flipping the sign flips the velocity."""
        grid = make_grid(16)
        theta = random_band(grid, 1, 4, seed=1)
        plus = velocity_from_scalar(theta, LOG10)
        minus = velocity_from_scalar(theta, LOG10.with_sign(-1))

        assert np.array_equal(plus.u1.coeffs, -minus.u1.coeffs)


class TestRescaledLimit:
    """Test suite for the rescaled-symbol limit gap."""

    @pytest.mark.parametrize("delta", [1e-1, 1e-2, 1e-3])
    def test_within_envelope(self, delta):
        """Test the gap stays below delta log^2(a + r)."""
        report = rescaled_limit_gap(delta, r_max=1e4)

        assert report.within_envelope
        assert report.sup_weighted <= 0.5 + 1e-12

    def test_gap_shrinks_with_delta(self):
        """Test the raw gap decreases as delta decreases."""
        gaps = [rescaled_limit_gap(d, r_max=1e4).sup_raw for d in (0.1, 0.01, 0.001)]

        assert gaps[0] > gaps[1] > gaps[2]

    def test_single_sample(self):
        """Test samples=1 evaluates r = 0 only."""
        report = rescaled_limit_gap(0.1, r_max=5.0, samples=1)
        y = 0.1 * math.log(10.0)

        assert report.samples == 1
        assert report.sup_raw == pytest.approx((math.expm1(-y) + y) / 0.1)

    def test_bad_inputs(self):
        """Test delta, r_max and samples are validated."""
        with pytest.raises(MultiplierError):
            rescaled_limit_gap(1.5, 10.0)
        with pytest.raises(MultiplierError):
            rescaled_limit_gap(0.1, 0.0)
        with pytest.raises(MultiplierError):
            rescaled_limit_gap(0.1, 10.0, samples=0)


class TestDissipationCondition:
    """Test suite for the dissipation lower bound."""

    def test_log10_meets_condition_exactly(self):
        """Test psi = log(a + |xi|) sits on the bound."""
        grid = make_grid(16)

        assert dissipation_margin(grid, LOG10) == pytest.approx(1.0)
        assert check_dissipation_condition(grid, LOG10)

    def test_stronger_and_weaker_symbols(self):
        """Test log^2 passes and log^(1/2) fails."""
        grid = make_grid(16)
        strong = MultiplierSpec(family=SymbolFamily.LOG_POW, beta=2.0)
        weak = MultiplierSpec(family=SymbolFamily.LOG_POW, beta=0.5)

        assert check_dissipation_condition(grid, strong)
        assert not check_dissipation_condition(grid, weak)
        assert dissipation_margin(grid, strong) == pytest.approx(math.log(10.0 + grid.kmag[1, 0]))

    def test_threshold_excludes_low_modes(self):
        """Test modes at or below xi0 are ignored."""
        grid = make_grid(16)
        frac = MultiplierSpec(family=SymbolFamily.FRAC_LAP, alpha=0.5)

        # |xi| < log(a + |xi|) near the origin, not beyond |xi| = 3
        assert not check_dissipation_condition(grid, frac)
        assert check_dissipation_condition(grid, frac, xi0=3.0)

    def test_empty_region(self):
        """Test a threshold above every mode gives an infinite margin."""
        grid = make_grid(8)

        assert dissipation_margin(grid, LOG10, xi0=1e9) == math.inf
