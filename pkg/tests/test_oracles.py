"""
Tests for the Inequality Oracles
"""

import math

import numpy as np
import pytest

from oracles import (
    ORACLES,
    KatoPonceOracle,
    OracleInputError,
    OracleReport,
    RiccatiOracle,
    SqrtCommutatorOracle,
    TaylorSymbolOracle,
    build_broken,
    check_elementary_inequality,
    check_kato_ponce,
    check_riccati_bound,
    check_sqrt_commutator,
    check_taylor_symbol_bounds,
    elementary_terms,
    integrate_riccati,
    random_admissible_tuples,
    reference_pair,
    relative_change,
    run_lemma,
    taylor_terms,
)
from spectral import SpectralField, make_grid


def constant_one(t):
    return np.ones_like(t)


class TestOracleReport:
    """Test suite for the common report type."""

    def test_non_finite_ratio_fails(self):
        """Test a NaN or infinite ratio can never pass."""
        report = OracleReport(lemma="x", samples=1, worst_ratio=math.inf,
                              empirical_constant=math.inf, passed=True)

        assert not report.passed

    def test_breaks_build(self):
        """Test only failing build-breaking reports break the build."""
        ok = OracleReport(lemma="a", samples=1, worst_ratio=0.5, empirical_constant=0.5,
                          passed=True, build_breaking=True)
        soft = OracleReport(lemma="b", samples=1, worst_ratio=5.0, empirical_constant=5.0,
                            passed=False)
        hard = OracleReport(lemma="c", samples=1, worst_ratio=5.0, empirical_constant=5.0,
                            passed=False, build_breaking=True)

        assert not build_broken([ok, soft])
        assert build_broken([ok, hard])
        assert hard.to_dict()["lemma"] == "c"


class TestElementaryInequality:
    """Test suite for the power-difference inequality."""

    def test_hand_case(self):
        """Test s = 3, xi = (2, 0), eta = (1, 0): LHS 3, RHS 2."""
        lhs, rhs = elementary_terms(np.array([2.0, 0.0]), np.array([1.0, 0.0]), 3.0)

        assert float(lhs) == pytest.approx(3.0)
        assert float(rhs) == pytest.approx(2.0)

    def test_coincident_vectors(self):
        """Test xi = eta gives zero on both sides."""
        lhs, rhs = elementary_terms(np.array([1.0, 1.0]), np.array([1.0, 1.0]), 4.0)

        assert float(lhs) == pytest.approx(0.0, abs=1e-12)
        assert float(rhs) == 0.0

    def test_random_sup_is_finite_and_reproducible(self):
        """Test the empirical constant is finite and seed-determined."""
        a = check_elementary_inequality(3.0, 5_000, seed=1)
        b = check_elementary_inequality(3.0, 5_000, seed=1)

        assert a.passed
        assert math.isfinite(a.empirical_constant)
        assert a.worst_ratio == b.worst_ratio
        assert a.lemma == "2.1"

    def test_input_range(self):
        """Test s below 3 and empty samples are refused."""
        with pytest.raises(OracleInputError):
            check_elementary_inequality(2.5, 10)
        with pytest.raises(OracleInputError):
            check_elementary_inequality(3.0, 0)

    def test_run_lemma(self):
        """Test one report per default s."""
        reports = run_lemma("2.1", samples=1_000)

        assert [r.details["s"] for r in reports] == [3.0, 4.0, 5.0]
        assert all(r.samples == 1_000 for r in reports)


class TestTaylorSymbolBounds:
    """Test suite for the shifted power-symbol Taylor bounds."""

    def test_spot_value(self):
        """Test delta = 0.1, r = 0."""
        terms = taylor_terms(0.1, np.array([0.0]))

        assert terms["lhs_second"][0] == pytest.approx(0.024587, abs=1e-6)
        assert terms["rhs_second"][0] == pytest.approx(0.053019, abs=1e-6)
        assert terms["lhs_first"][0] <= terms["rhs_first"][0]

    @pytest.mark.parametrize("delta", [1e-1, 1e-2, 1e-3])
    def test_no_violations(self, delta):
        """Test both bounds hold on the default grid."""
        report = check_taylor_symbol_bounds(delta)

        assert report.passed
        assert report.details["violations"] == 0
        assert report.worst_ratio <= 1.0
        assert report.build_breaking

    def test_input_range(self):
        """Test delta and r are validated."""
        with pytest.raises(OracleInputError):
            check_taylor_symbol_bounds(1.0)
        with pytest.raises(OracleInputError):
            check_taylor_symbol_bounds(0.1, r_grid=np.array([-1.0, 0.0]))

    def test_oracle_merges_deltas(self):
        """Test the oracle merges one check per delta."""
        report = TaylorSymbolOracle().run()

        assert report.passed
        assert len(report.details["per_delta"]) == 3
        assert not build_broken([report])


class TestRiccati:
    """Test suite for the Riccati comparison."""

    def test_closed_form(self):
        """Test y' = 0.1 + y^2 against sqrt(0.1) tan(sqrt(0.1) t)."""
        report = check_riccati_bound(0.1, 1.0, 1.0, constant_one)
        root = math.sqrt(0.1)

        assert report.details["y_end"] == pytest.approx(root * math.tan(root), rel=1e-8)
        assert report.details["y_end"] == pytest.approx(0.10347, abs=1e-5)
        assert report.details["bound"] == pytest.approx(1.2)
        assert report.details["admissibility"] == pytest.approx(0.8)
        assert report.passed

    def test_sampled_forcing(self):
        """Test a sampled constant forcing matches the callable one."""
        sampled = check_riccati_bound(0.1, 1.0, 1.0, [1.0, 1.0, 1.0])
        called = check_riccati_bound(0.1, 1.0, 1.0, constant_one)

        assert sampled.details["y_end"] == pytest.approx(called.details["y_end"])

    def test_integrator_linear_case(self):
        """Test the RK4 helper on y' = 1 (G = 0 forcing only)."""
        t, y = integrate_riccati(1.0, 0.0, constant_one, 2.0, 10)

        assert t[-1] == 2.0
        assert y[-1] == pytest.approx(2.0)

    @pytest.mark.parametrize(
        "args",
        [
            (1.0, 1.0, 1.0, constant_one),   # 8 nu T G int F = 8
            (-0.1, 1.0, 1.0, constant_one),
            (0.1, 0.0, 1.0, constant_one),
            (0.1, 1.0, 0.0, constant_one),
            (0.1, 1.0, 1.0, lambda t: -np.ones_like(t)),
            (0.1, 1.0, 1.0, [1.0]),
        ],
    )
    def test_inadmissible(self, args):
        """Test inputs outside the hypotheses are refused."""
        with pytest.raises(OracleInputError):
            check_riccati_bound(*args)

    def test_random_tuples_are_admissible(self):
        """Test every generated tuple satisfies 8 nu T G int F <= 1."""
        for nu, T, G, F in random_admissible_tuples(10, seed=3):
            report = check_riccati_bound(nu, T, G, F)
            assert report.details["admissibility"] <= 1.0 + 1e-9
            assert report.passed

    def test_sweep(self):
        """Test the oracle sweep passes and reports the closed form."""
        report = RiccatiOracle().run(action="sweep", count=5)

        assert report.passed
        assert report.samples == 6
        assert report.details["closed_form_bound"] == pytest.approx(1.2)

    def test_unknown_action(self):
        """Test unknown actions are refused."""
        with pytest.raises(OracleInputError):
            RiccatiOracle().run(action="plot")


class TestKatoPonce:
    """Test suite for the Kato-Ponce commutator."""

    def test_reference_value(self):
        """Test cos x1, cos x2 at s = 2, eps = 0.5."""
        f, g = reference_pair(16)
        report = check_kato_ponce(f, g, 2.0, 0.5)
        expected = 0.5 / (2**0.25 + 2**-0.25)

        assert report.empirical_constant == pytest.approx(expected, rel=1e-10)
        assert report.details["ratio_refined"] == pytest.approx(expected, rel=1e-10)
        assert report.passed

    def test_commuting_inputs(self):
        """Test a constant f commutes with every multiplier."""
        grid = make_grid(16)
        c = np.zeros((16, 16), dtype=complex)
        c[0, 0] = 1.0
        _, g = reference_pair(16)
        report = check_kato_ponce(SpectralField(grid, c), g, 2.0, 0.5)

        assert report.worst_ratio == 0.0
        assert report.details["ratio_refined"] == 0.0
        assert report.passed

    def test_resolution_drift_fails(self, monkeypatch):
        """Test a ratio that moves under grid doubling fails the check."""
        import oracles.commutators as commutators

        def drifting(f, g, s, eps):
            return (1.0 if f.grid.n == 16 else 1.5), 1.0, 1.0

        monkeypatch.setattr(commutators, "kato_ponce_ratio", drifting)
        f, g = reference_pair(16)
        report = check_kato_ponce(f, g, 2.0, 0.5)

        assert report.details["relative_change"] == pytest.approx(0.5)
        assert report.worst_ratio <= report.ceiling
        assert not report.passed

    def test_band_limit(self):
        """Test inputs above n/3 are refused."""
        grid = make_grid(16)
        c = np.zeros((16, 16), dtype=complex)
        c[6, 0] = c[10, 0] = 0.5
        _, g = reference_pair(16)
        with pytest.raises(OracleInputError):
            check_kato_ponce(SpectralField(grid, c), g, 2.0, 0.5)

    def test_grid_mismatch(self):
        """Test f and g must share a grid."""
        f, _ = reference_pair(16)
        _, g = reference_pair(32)
        with pytest.raises(OracleInputError):
            check_kato_ponce(f, g, 2.0, 0.5)

    def test_parameters(self):
        """Test s and eps must be positive."""
        f, g = reference_pair(16)
        with pytest.raises(OracleInputError):
            check_kato_ponce(f, g, 0.0, 0.5)
        with pytest.raises(OracleInputError):
            check_kato_ponce(f, g, 2.0, 0.0)

    def test_oracle(self):
        """Test the oracle default run."""
        report = KatoPonceOracle().run(n=16)

        assert report.passed
        assert report.lemma == "2.2"


class TestSqrtCommutator:
    """Test suite for the square-root symbol commutator."""

    def test_single_delta(self):
        """Test one ratio is finite and positive."""
        f, g = reference_pair(16)
        report = check_sqrt_commutator(f, g, 2.0, 0.1, 0.5)

        assert report.passed
        assert report.worst_ratio > 0
        assert report.details["ratio_refined"] == pytest.approx(report.worst_ratio, rel=1e-8)
        assert report.details["relative_change"] <= 0.1

    def test_commuting_inputs(self):
        """Test a constant f gives an exact zero ratio."""
        grid = make_grid(16)
        c = np.zeros((16, 16), dtype=complex)
        c[0, 0] = 1.0
        _, g = reference_pair(16)
        report = check_sqrt_commutator(SpectralField(grid, c), g, 2.0, 0.1, 0.5)

        assert report.worst_ratio == 0.0
        assert report.passed

    def test_resolution_drift_fails(self, monkeypatch):
        """Test a rung whose ratio moves under grid doubling fails, and so does the ladder."""
        import oracles.commutators as commutators

        def drifting(f, g, s, delta, eps):
            return (1.0 if f.grid.n == 16 else 1.3), 1.0, 1.0

        monkeypatch.setattr(commutators, "sqrt_commutator_ratio", drifting)
        f, g = reference_pair(16)

        assert not check_sqrt_commutator(f, g, 2.0, 0.1, 0.5).passed
        ladder = SqrtCommutatorOracle().run(n=16)
        assert max(ladder.details["steps"]) <= 1.2
        assert not ladder.passed

    def test_relative_change(self):
        """Test the change measure, including a zero base ratio."""
        assert relative_change(2.0, 2.2) == pytest.approx(0.1)
        assert relative_change(0.0, 0.0) == 0.0
        assert relative_change(0.0, 0.3) == 0.3

    def test_delta_range(self):
        """Test delta outside (0, 1) is refused."""
        f, g = reference_pair(16)
        with pytest.raises(OracleInputError):
            check_sqrt_commutator(f, g, 2.0, 1.0, 0.5)

    def test_ladder_stays_bounded(self):
        """Test the ratio grows by at most 20% per halving of delta."""
        report = SqrtCommutatorOracle().run(n=16)

        assert report.passed
        assert len(report.details["ratios"]) == 4
        assert max(report.details["steps"]) <= 1.2
        assert all(c <= 0.1 for c in report.details["relative_changes"])


class TestBattery:
    """Test suite for the lemma registry."""

    def test_registry(self):
        """Test the five lemma ids."""
        assert sorted(ORACLES) == ["2.1", "2.2", "2.3", "2.4", "2.5"]

    def test_unknown_lemma(self):
        """Test unknown ids are refused."""
        with pytest.raises(OracleInputError):
            run_lemma("3.1")
