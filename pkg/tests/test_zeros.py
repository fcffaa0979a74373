import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dini.errors import DomainError, RegimeMismatchError
from dini.specfun import SpectralParams, bessel_j, bessel_jh
from dini.zeros import (
    ZeroTable,
    bessel_j_zeros,
    build_zero_table,
    cached_zero_table,
    x0_bound,
)

# Plain-bisection golden value for the first zero of the nu=0, H=1/2
# combination (see test_numerics for the oracle construction).
Z1_NU0_H_HALF = 0.9407705639497375


class TestBesselJZeros:
    def test_against_reference_integer_orders(self):
        import scipy.special as sp

        for order in (0, 1, 5):
            ours = bessel_j_zeros(float(order), 6)
            ref = sp.jn_zeros(order, 6)
            assert np.max(np.abs(ours - ref)) < 1e-11

    def test_near_minus_one(self):
        z = bessel_j_zeros(-0.999, 3)
        assert 0.0 < z[0] < 0.1
        assert np.all(np.abs(bessel_j(-0.999, z)) < 1e-10)

    def test_large_order_mcmahon_fallback(self):
        z = bessel_j_zeros(10.0, 3)
        assert z[0] == pytest.approx(14.47550068655454, rel=1e-10)


class TestBuildZeroTable:
    def test_neumann_case_closed_form(self):
        table = build_zero_table(SpectralParams(-0.5, 0.5), 25)
        ref = math.pi * np.arange(1, 26)
        assert np.max(np.abs(table.zeros[1:] - ref)) < 1e-12
        assert table.zeros[0] == 0.0

    def test_dirichlet_case_closed_form(self):
        table = build_zero_table(SpectralParams(0.5, 0.5), 25)
        ref = math.pi * (np.arange(1, 26) - 0.5)
        assert np.max(np.abs(table.zeros[1:] - ref)) < 1e-12

    def test_first_zero_golden(self):
        table = build_zero_table(SpectralParams(0.0, 0.5), 1)
        assert table.zeros[1] == pytest.approx(Z1_NU0_H_HALF, abs=1e-12)

    def test_interlacing(self):
        p = SpectralParams(0.7, 0.5)
        table = build_zero_table(p, 30)
        j = table.j_zeros
        for n in range(1, 30):
            inside = np.sum((j > table.zeros[n]) & (j < table.zeros[n + 1]))
            assert inside == 1

    def test_residuals(self):
        for nu, h in ((-0.9, 0.5), (0.0, 2.0), (3.0, -1.0)):
            table = build_zero_table(SpectralParams(nu, h), 40)
            z = table.zeros[1:]
            res = np.abs(bessel_jh(table.params, z))
            assert np.all(res <= 1e-10 * (1.0 + z))

    def test_asymptotic_offset_stabilizes(self):
        table = build_zero_table(SpectralParams(1.3, 0.5), 100)
        dev = np.abs(table.zeros[1:] - math.pi * np.arange(1, 101))
        tail = dev[-20:]
        # The last 20% of offsets drift monotonically toward the limit.
        diffs = np.diff(tail)
        assert np.all(diffs <= 1e-6) or np.all(diffs >= -1e-6)
        assert table.pi_offset_sup < 4.0

    def test_minus_regime_has_z0(self):
        p = SpectralParams(-0.8, 0.5)
        table = build_zero_table(p, 3)
        assert 0.0 < table.zeros[0] < 0.5
        br = table.brackets[0]
        assert br.lo <= table.zeros[0] <= br.hi

    def test_plus_regime_rejects_z0(self):
        table = build_zero_table(SpectralParams(0.5, 0.5), 3)
        with pytest.raises(RegimeMismatchError):
            table.zero(0)

    def test_brackets_certify(self):
        p = SpectralParams(0.2, 0.5)
        table = build_zero_table(p, 10)
        for n in range(1, 11):
            br = table.brackets[n]
            assert br.lo < table.zeros[n] < br.hi
            assert br.width <= max(table.tol, 8.0 * np.spacing(br.hi))

    def test_tolerance_floor(self):
        with pytest.raises(DomainError):
            build_zero_table(SpectralParams(0.0, 0.5), 5, tol=1e-14)

    @given(st.floats(-0.95, 3.0), st.floats(-1.5, 2.0))
    @settings(max_examples=25, deadline=None)
    def test_interlacing_property(self, nu, h):
        p = SpectralParams(nu, h)
        table = build_zero_table(p, 8)
        j = table.j_zeros
        for n in range(1, 8):
            inside = np.sum((j > table.zeros[n]) & (j < table.zeros[n + 1]))
            assert inside == 1


class TestX0Bound:
    def test_value(self):
        nu = -0.75
        ref = (2.0 / 3.0) * math.sqrt(
            -(6 * nu**3 + 21 * nu**2 + 21 * nu + 6) / (2 * nu + 3)
        )
        assert x0_bound(nu) == pytest.approx(ref, rel=1e-15)
        assert x0_bound(nu) == pytest.approx(0.37267799624996495, rel=1e-13)

    def test_endpoint_continuity(self):
        assert x0_bound(-0.5 - 1e-6) < 0.01

    def test_below_half(self):
        for nu in np.linspace(-0.999, -0.501, 64):
            assert x0_bound(float(nu)) < 0.5

    def test_dominates_z0(self):
        for nu in (-0.9, -0.75, -0.6):
            table = build_zero_table(SpectralParams(nu, 0.5), 1)
            assert table.zeros[0] < x0_bound(nu) < 0.5

    def test_domain(self):
        for bad in (-0.5, -1.0, 0.2):
            with pytest.raises(DomainError):
                x0_bound(bad)


class TestSerialization:
    def test_csv_round_trip(self, tmp_path):
        table = build_zero_table(SpectralParams(-0.8, 0.5), 12)
        path = tmp_path / "zeros.csv"
        table.to_csv(path)
        loaded = ZeroTable.from_csv(path)
        assert loaded.params == table.params
        assert loaded.n_max == table.n_max
        assert np.array_equal(loaded.zeros[loaded.n_min :], table.zeros[table.n_min :])
        for n in range(table.n_min, table.n_max + 1):
            if table.brackets[n] is not None:
                assert loaded.brackets[n].lo == table.brackets[n].lo
                assert loaded.brackets[n].hi == table.brackets[n].hi

    def test_cache_dir(self, tmp_path):
        p = SpectralParams(0.3, 0.5)
        t1 = cached_zero_table(p, 6, cache_dir=str(tmp_path))
        files = list(tmp_path.glob("*.csv"))
        assert len(files) == 1
        t2 = cached_zero_table(p, 6, cache_dir=str(tmp_path))
        assert np.array_equal(t1.zeros[1:], t2.zeros[1:])

    def test_cache_env_var(self, tmp_path, monkeypatch):
        monkeypatch.setenv("DINI_CACHE_DIR", str(tmp_path))
        cached_zero_table(SpectralParams(1.5, 0.5), 4)
        assert list(tmp_path.glob("*.csv"))
