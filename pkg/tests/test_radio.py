"""Path loss and correlated shadowing: closed-form oracles, statistics."""

import math

import numpy as np
import pytest

from ranloop.errors import ValidationError
from ranloop.mobility import Static, Wobble
from ranloop.radio import (
    RadioParams, ShadowProcess, link_rng, rsrp_at, sample_links,
)

WOBBLE_PARAMS = RadioParams(ref_power_dBm=-40.0, exponent=1.9)


class TestPathLoss:
    def test_closed_form_at_16m(self):
        # -40 - 19*log10(16) = -62.878...
        value = rsrp_at(WOBBLE_PARAMS, 0.0, 16.0)
        assert value == pytest.approx(-40.0 - 19.0 * math.log10(16.0))
        assert value == pytest.approx(-62.878, abs=5e-3)

    def test_symmetric_in_distance(self):
        assert rsrp_at(WOBBLE_PARAMS, 20.0, 4.0) == rsrp_at(WOBBLE_PARAMS, 0.0, 16.0)

    def test_min_distance_clamps(self):
        at_zero = rsrp_at(WOBBLE_PARAMS, 5.0, 5.0)
        assert at_zero == rsrp_at(WOBBLE_PARAMS, 5.0, 5.5)  # min_distance 1 m
        assert at_zero == WOBBLE_PARAMS.ref_power_dBm

    def test_max_gap_between_facing_cells(self):
        # Two cells 20 m apart, UE at 16 m: gap = 19*log10(16/4) = 19*log10(4).
        near = rsrp_at(WOBBLE_PARAMS, 20.0, 16.0)
        far = rsrp_at(WOBBLE_PARAMS, 0.0, 16.0)
        assert near - far == pytest.approx(19.0 * math.log10(4.0))
        assert near - far == pytest.approx(11.44, abs=5e-3)

    def test_monotone_decreasing_in_distance(self):
        values = [rsrp_at(WOBBLE_PARAMS, 0.0, d) for d in (1, 2, 5, 10, 50, 200)]
        assert values == sorted(values, reverse=True)

    def test_validation(self):
        with pytest.raises(ValidationError):
            RadioParams(-40, 0.0)
        with pytest.raises(ValidationError):
            RadioParams(-40, 2.0, shadowing_sigma_dB=-1)
        with pytest.raises(ValidationError):
            RadioParams(-40, 2.0, min_distance_m=0)
        with pytest.raises(ValidationError):
            RadioParams(-40, 2.0, decorrelation_m=0)


class TestShadowing:
    def test_zero_sigma_is_seed_independent(self):
        params = RadioParams(-40, 1.9, shadowing_sigma_dB=0.0)
        cells = [("c0", 0.0), ("c1", 20.0)]
        trajs = {"ue1": Wobble(4.0, 16.0, 10.0 / 3.0)}
        a = sample_links(params, cells, trajs, 0.2, 20.0, seed=1)
        b = sample_links(params, cells, trajs, 0.2, 20.0, seed=999)
        assert a == b

    def test_marginal_std_matches_sigma(self):
        sigma = 4.0
        params = RadioParams(-40, 1.9, shadowing_sigma_dB=sigma, decorrelation_m=5.0)
        values = []
        for seed in range(40):
            for ue in range(4):
                proc = ShadowProcess(params, link_rng(seed, ue, 0))
                # Steps far beyond the decorrelation distance: near-independent.
                pos = 0.0
                for _ in range(80):
                    pos += 50.0
                    values.append(proc.step(pos))
        values = np.asarray(values)
        assert len(values) >= 10_000
        assert abs(values.std() - sigma) <= 0.1 * sigma
        assert abs(values.mean()) <= 0.1 * sigma

    def test_lag1_correlation_matches_exponential_model(self):
        sigma, decorr, step = 3.0, 25.0, 10.0
        params = RadioParams(-40, 1.9, shadowing_sigma_dB=sigma, decorrelation_m=decorr)
        xs, ys = [], []
        for seed in range(300):
            proc = ShadowProcess(params, link_rng(seed, 0, 0))
            series = [proc.step(i * step) for i in range(60)]
            xs.extend(series[:-1])
            ys.extend(series[1:])
        rho_hat = np.corrcoef(xs, ys)[0, 1]
        assert rho_hat == pytest.approx(math.exp(-step / decorr), abs=0.05)

    def test_static_ue_shadow_is_frozen(self):
        params = RadioParams(-40, 1.9, shadowing_sigma_dB=4.0)
        proc = ShadowProcess(params, link_rng(0, 0, 0))
        first = proc.step(5.0)
        # Zero displacement means rho = 1: the value must not move.
        assert proc.step(5.0) == first
        assert proc.step(5.0) == first


class TestLinkRng:
    def test_reproducible(self):
        a = link_rng(3, 1, 2).standard_normal(8)
        b = link_rng(3, 1, 2).standard_normal(8)
        assert np.array_equal(a, b)

    def test_links_get_distinct_streams(self):
        base = link_rng(3, 0, 0).standard_normal(8)
        for ue, cell in ((0, 1), (1, 0), (1, 1)):
            assert not np.array_equal(base, link_rng(3, ue, cell).standard_normal(8))

    def test_seed_changes_stream(self):
        assert not np.array_equal(
            link_rng(1, 0, 0).standard_normal(8),
            link_rng(2, 0, 0).standard_normal(8),
        )


class TestSampleLinks:
    def test_canonical_order(self):
        params = RadioParams(-40, 1.9)
        cells = [("b", 20.0), ("a", 0.0)]
        trajs = {"u2": Static(5.0), "u1": Static(10.0)}
        out = sample_links(params, cells, trajs, 0.5, 1.0)
        keys = [(s.t_s, s.ue_id, s.cell_id) for s in out]
        assert keys == sorted(keys)
        assert len(out) == 3 * 2 * 2  # 3 instants, 2 UEs, 2 cells

    def test_values_match_direct_formula_when_deterministic(self):
        params = RadioParams(-40, 1.9)
        out = sample_links(params, [("a", 0.0)], {"u": Static(16.0)}, 1.0, 2.0)
        for sample in out:
            assert sample.rsrp_dBm == rsrp_at(params, 0.0, 16.0)
