import math

import numpy as np
import pytest

from mmwhybrid import (
    ChannelParams,
    SystemConfig,
    array_response,
    generate_channel,
    load_channel,
    sample_path_angles,
    save_channel,
)
from mmwhybrid.channel import _grid_dims, _user_stream, planar_response


def small_cfg(**overrides):
    base = dict(
        n_tx=16, n_rx=4, n_users=2, n_subcarriers=8, n_streams=1,
        n_rf_tx=2, n_rf_rx=1,
    )
    base.update(overrides)
    return SystemConfig(**base)


class TestArrayResponse:
    def test_broadside_is_uniform(self):
        v = array_response(4, 0.0, math.pi / 2)
        assert np.allclose(v, 0.5)

    @pytest.mark.parametrize("n", [4, 9, 16, 64])
    def test_unit_modulus_entries(self, n, rng):
        v = array_response(n, rng.uniform(0, 2 * math.pi), rng.uniform(0, math.pi))
        assert np.allclose(np.abs(v), 1 / math.sqrt(n))
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_matches_direct_formula(self):
        az, el = math.pi / 2, math.pi / 2
        v = array_response(4, az, el)
        # direct elementwise evaluation of the phase formula on the 2x2 grid
        expected = np.empty(4, dtype=complex)
        i = 0
        for m in range(2):
            for n in range(2):
                phase = math.pi * (
                    m * math.sin(az) * math.sin(el) + n * math.cos(el)
                )
                expected[i] = complex(math.cos(phase), math.sin(phase)) / 2
                i += 1
        assert np.allclose(v, expected, atol=1e-15)
        assert np.allclose(np.angle(v / v[0]) % (2 * math.pi), [0, 0, math.pi, math.pi])

    def test_non_square_size_rejected(self):
        with pytest.raises(ValueError, match="perfect square"):
            array_response(8, 0.0, 0.0)

    def test_rectangular_grid_dims(self):
        assert _grid_dims(8) == (2, 4)
        assert _grid_dims(9) == (3, 3)
        assert _grid_dims(7) == (1, 7)
        v = planar_response(2, 4, 0.3, 1.1)
        assert np.linalg.norm(v) == pytest.approx(1.0)


class TestPathSampling:
    def test_zero_spread_collapses_to_cluster_mean(self):
        params = ChannelParams(angle_spread_deg=0.0)
        rng = np.random.default_rng(0)
        paths = sample_path_angles(rng, params)
        for arr in (paths.az_aod, paths.el_aod, paths.az_aoa, paths.el_aoa):
            assert np.allclose(arr, arr[:, :1])

    def test_laplacian_spread_std(self):
        params = ChannelParams(n_clusters=1, n_rays=8)
        rng = np.random.default_rng(1)
        offsets = []
        for _ in range(12500):  # 1e5 ray offsets total
            paths = sample_path_angles(rng, params)
            offsets.append(paths.az_aod[0] - np.mean(paths.az_aod[0]))
        # std of (offset - mean offset) over many rays approaches sqrt(2)*b
        draws = rng.laplace(0.0, params.laplacian_scale, size=100_000)
        expected = math.sqrt(2.0) * params.laplacian_scale
        assert np.std(draws) == pytest.approx(expected, rel=0.02)
        spread = np.std(np.concatenate(offsets))
        # within-cluster dispersion reflects the same scale (mean removed)
        assert spread == pytest.approx(expected * math.sqrt(7 / 8), rel=0.05)

    def test_gain_moments(self):
        params = ChannelParams(n_clusters=2, n_rays=5)
        rng = np.random.default_rng(2)
        gains = np.concatenate(
            [sample_path_angles(rng, params).gains.ravel() for _ in range(10_000)]
        )
        assert abs(np.mean(gains)) < 0.01
        assert np.var(gains) == pytest.approx(1.0, rel=0.02)


class TestGenerateChannel:
    def test_single_tap_is_flat(self):
        cfg = small_cfg()
        chan = generate_channel(cfg, ChannelParams(n_delay_taps=1), seed=3)
        for f in range(1, cfg.n_subcarriers):
            assert np.allclose(chan.h[:, f], chan.h[:, 0])

    def test_deterministic_given_seed(self):
        cfg = small_cfg()
        params = ChannelParams()
        a = generate_channel(cfg, params, seed=11, realization=5)
        b = generate_channel(cfg, params, seed=11, realization=5)
        assert np.array_equal(a.h, b.h)
        c = generate_channel(cfg, params, seed=11, realization=6)
        assert not np.allclose(a.h, c.h)

    def test_frobenius_normalization(self):
        cfg = small_cfg(n_users=1, n_subcarriers=4)
        params = ChannelParams(n_delay_taps=4)
        acc = 0.0
        count = 0
        for r in range(1000):
            chan = generate_channel(cfg, params, seed=17, realization=r)
            acc += float(np.mean(np.abs(chan.h) ** 2 * np.prod(chan.h.shape[2:])))
            count += 1
        mean_norm2 = acc / count
        assert 0.95 * cfg.n_tx * cfg.n_rx <= mean_norm2 <= 1.05 * cfg.n_tx * cfg.n_rx

    def test_rank_bounded_by_path_count(self):
        params = ChannelParams(n_clusters=2, n_rays=2)
        cfg = small_cfg(n_tx=16, n_rx=9)
        chan = generate_channel(cfg, params, seed=23)
        for k in range(cfg.n_users):
            for f in range(cfg.n_subcarriers):
                assert np.linalg.matrix_rank(chan.h[k, f]) <= 4

    def test_inverse_dft_recovers_taps(self):
        cfg = small_cfg(n_subcarriers=16)
        params = ChannelParams(n_delay_taps=8)
        chan = generate_channel(cfg, params, seed=29)
        ff = cfg.n_subcarriers
        for k in range(cfg.n_users):
            freqs = chan.h[k]  # (F, nr, nt)
            for d in range(params.n_delay_taps):
                phases = np.exp(2j * np.pi * np.arange(ff) * d / ff)
                recovered = np.tensordot(phases, freqs, axes=(0, 0)) / ff
                assert np.max(np.abs(recovered - chan.taps[k, d])) < 1e-10

    def test_users_on_independent_substreams(self):
        s1 = _user_stream(99, 0, 0).standard_normal(4)
        s2 = _user_stream(99, 0, 1).standard_normal(4)
        assert not np.allclose(s1, s2)

    def test_dump_load_round_trip(self, tmp_path):
        cfg = small_cfg()
        chan = generate_channel(cfg, ChannelParams(), seed=31, realization=2)
        path = tmp_path / "chan.txt"
        save_channel(chan, path)
        loaded = load_channel(path)
        assert np.array_equal(loaded.h, chan.h)
        assert loaded.seed == 31 and loaded.realization == 2

    def test_load_rejects_bad_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not-a-channel\n")
        with pytest.raises(ValueError, match="header"):
            load_channel(path)
