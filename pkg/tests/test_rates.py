import numpy as np
import pytest

from mmwhybrid import (
    KFMatrixBundle,
    NumericalError,
    PrecoderBundle,
    SystemConfig,
    interference_matrix,
    spectral_efficiency,
    sum_rate,
)
from mmwhybrid.bundles import FULLY_CONNECTED, FULLY_DIGITAL
from mmwhybrid.channel import ChannelRealization
from oracles import naive_sum_rate, rnd_complex


def scalar_cfg(kk, noise_var=1.0):
    return SystemConfig(
        n_tx=2, n_rx=1, n_users=kk, n_subcarriers=1, n_streams=1,
        n_rf_tx=max(kk, 1), n_rf_rx=1, noise_var=noise_var, snr_grid_db=(0.0,),
    )


def make_bundle(f_rf, f_b_blocks, w_rf, w_bb_blocks, structure=FULLY_CONNECTED):
    return PrecoderBundle(
        f_rf=np.asarray(f_rf, dtype=complex),
        f_bb=KFMatrixBundle(np.asarray(f_b_blocks, dtype=complex)),
        f_b=KFMatrixBundle(np.asarray(f_b_blocks, dtype=complex)),
        w_rf=np.asarray(w_rf, dtype=complex),
        w_bb=KFMatrixBundle(np.asarray(w_bb_blocks, dtype=complex)),
        structure=structure,
    )


def random_setup(rng, kk=2, ff=2, ns=2, n_tx=8, n_rx=4, jt=4, jr=2):
    chan = ChannelRealization(
        h=rnd_complex(rng, kk, ff, n_rx, n_tx), seed=0, realization=0
    )
    bundle = PrecoderBundle(
        f_rf=0.3 * rnd_complex(rng, n_tx, jt),
        f_bb=KFMatrixBundle(0.3 * rnd_complex(rng, kk, ff, jt, ns)),
        f_b=KFMatrixBundle(0.3 * rnd_complex(rng, kk, ff, jt, ns)),
        w_rf=0.3 * rnd_complex(rng, kk, n_rx, jr),
        w_bb=KFMatrixBundle(0.3 * rnd_complex(rng, kk, ff, jr, ns)),
        structure=FULLY_CONNECTED,
    )
    cfg = SystemConfig(
        n_tx=n_tx, n_rx=n_rx, n_users=kk, n_subcarriers=ff, n_streams=ns,
        n_rf_tx=jt, n_rf_rx=jr, noise_var=0.5,
    )
    return chan, bundle, cfg


class TestInterferenceMatrix:
    def test_single_user_is_noise_only(self, rng):
        chan = ChannelRealization(h=rnd_complex(rng, 1, 1, 3, 4), seed=0, realization=0)
        w_rf = rnd_complex(rng, 1, 3, 2)
        bundle = make_bundle(
            rnd_complex(rng, 4, 2),
            rnd_complex(rng, 1, 1, 2, 1),
            w_rf,
            rnd_complex(rng, 1, 1, 2, 1),
        )
        omega = interference_matrix(0, 0, chan, bundle, noise_var=0.7)
        w = bundle.effective_combiner(0, 0)
        assert np.allclose(omega, 0.7 * w.conj().T @ w, atol=1e-12)

    def test_orthonormal_combiner_gives_scaled_identity(self, rng):
        chan = ChannelRealization(h=rnd_complex(rng, 1, 1, 3, 4), seed=0, realization=0)
        q, _ = np.linalg.qr(rnd_complex(rng, 3, 2))
        bundle = make_bundle(
            rnd_complex(rng, 4, 2),
            rnd_complex(rng, 1, 1, 2, 2),
            q[None, :, :],
            np.eye(2, dtype=complex)[None, None, :, :],
        )
        omega = interference_matrix(0, 0, chan, bundle, noise_var=0.9)
        assert np.allclose(omega, 0.9 * np.eye(2), atol=1e-12)

    def test_two_user_scalar_hand_computed(self):
        # K=2, Ns=1, F=1: everything is a scalar product
        h = np.zeros((2, 1, 1, 2), dtype=complex)
        h[0, 0] = [[1.0, 2.0j]]
        h[1, 0] = [[1.0 - 1.0j, 0.5]]
        chan = ChannelRealization(h=h, seed=0, realization=0)
        f_rf = np.eye(2, dtype=complex)
        f_b = np.zeros((2, 1, 2, 1), dtype=complex)
        f_b[0, 0] = [[1.0], [0.0]]
        f_b[1, 0] = [[0.0], [1.0j]]
        w_rf = np.ones((2, 1, 1), dtype=complex)
        w_bb = np.full((2, 1, 1, 1), 2.0, dtype=complex)
        bundle = make_bundle(f_rf, f_b, w_rf, w_bb)
        omega = interference_matrix(0, 0, chan, bundle, noise_var=0.25)
        # interference power: |h_0 . f_1|^2 / (K Ns F) = |2j*1j|^2 / 2 = 2
        # omega = |w|^2 (2 + 0.25) = 4 * 2.25 = 9
        assert omega.shape == (1, 1)
        assert omega[0, 0] == pytest.approx(9.0)

    def test_singular_noise_free_case_raises(self, rng):
        chan = ChannelRealization(h=rnd_complex(rng, 1, 1, 2, 2), seed=0, realization=0)
        bundle = make_bundle(
            np.eye(2),
            rnd_complex(rng, 1, 1, 2, 1),
            np.zeros((1, 2, 1)),  # rank-deficient combiner
            np.ones((1, 1, 1, 1)),
        )
        with pytest.raises(NumericalError, match="singular"):
            interference_matrix(0, 0, chan, bundle, noise_var=0.0)


class TestSumRate:
    def test_zero_precoders_give_zero_rate(self, rng):
        chan = ChannelRealization(h=rnd_complex(rng, 2, 1, 2, 3), seed=0, realization=0)
        bundle = make_bundle(
            np.zeros((3, 2)),
            np.zeros((2, 1, 2, 1)),
            rnd_complex(rng, 2, 2, 1),
            rnd_complex(rng, 2, 1, 1, 1),
        )
        cfg = SystemConfig(
            n_tx=3, n_rx=2, n_users=2, n_subcarriers=1, n_streams=1,
            n_rf_tx=2, n_rf_rx=1, noise_var=1.0,
        )
        assert sum_rate(0, chan, bundle, cfg) == pytest.approx(0.0, abs=1e-12)

    def test_unit_scalar_case_is_one_bit(self):
        chan = ChannelRealization(
            h=np.ones((1, 1, 1, 1), dtype=complex), seed=0, realization=0
        )
        bundle = make_bundle(
            np.ones((1, 1)), np.ones((1, 1, 1, 1)), np.ones((1, 1, 1)),
            np.ones((1, 1, 1, 1)),
        )
        cfg = SystemConfig(
            n_tx=1, n_rx=1, n_users=1, n_subcarriers=1, n_streams=1,
            n_rf_tx=1, n_rf_rx=1, noise_var=1.0,
        )
        assert sum_rate(0, chan, bundle, cfg) == pytest.approx(1.0, abs=1e-12)

    def test_matches_naive_loop_evaluation(self, rng):
        chan, bundle, cfg = random_setup(rng)
        for f in range(cfg.n_subcarriers):
            ours = sum_rate(f, chan, bundle, cfg)
            naive = naive_sum_rate(f, chan, bundle, cfg)
            assert ours == pytest.approx(naive, abs=1e-10)
            assert ours >= 0.0

    def test_monotone_in_noise(self, rng):
        chan, bundle, cfg = random_setup(rng)
        from dataclasses import replace

        r1 = sum_rate(0, chan, bundle, cfg)
        r2 = sum_rate(0, chan, bundle, replace(cfg, noise_var=2 * cfg.noise_var))
        assert r2 < r1

    def test_unitary_rotation_invariance(self, rng):
        chan, bundle, cfg = random_setup(rng)
        q, _ = np.linalg.qr(rnd_complex(rng, 2, 2))
        rotated = bundle.w_bb.blocks.copy()
        for k in range(2):
            for f in range(2):
                rotated[k, f] = rotated[k, f] @ q
        bundle2 = PrecoderBundle(
            f_rf=bundle.f_rf,
            f_bb=bundle.f_bb,
            f_b=bundle.f_b,
            w_rf=bundle.w_rf,
            w_bb=KFMatrixBundle(rotated),
            structure=FULLY_CONNECTED,
        )
        assert sum_rate(0, chan, bundle2, cfg) == pytest.approx(
            sum_rate(0, chan, bundle, cfg), abs=1e-10
        )

    def test_interference_free_closed_form_at_any_snr(self, rng):
        # single user: rate must equal the closed-form eigenvalue expression
        chan = ChannelRealization(h=rnd_complex(rng, 1, 1, 3, 4), seed=0, realization=0)
        f = rnd_complex(rng, 4, 2)
        q, _ = np.linalg.qr(rnd_complex(rng, 3, 2))
        bundle = make_bundle(
            f, np.eye(2, dtype=complex)[None, None, :, :], q[None, :, :],
            np.eye(2, dtype=complex)[None, None, :, :],
            structure=FULLY_DIGITAL,
        )
        cfg = SystemConfig(
            n_tx=4, n_rx=3, n_users=1, n_subcarriers=1, n_streams=2,
            n_rf_tx=2, n_rf_rx=2, noise_var=0.01,
        )
        t = q.conj().T @ chan.h[0, 0] @ f
        eig = np.linalg.eigvalsh(t @ t.conj().T)
        expected = float(np.sum(np.log2(1 + eig / (2 * 0.01))))
        assert sum_rate(0, chan, bundle, cfg) == pytest.approx(expected, abs=1e-9)


def test_spectral_efficiency_averages_subcarriers(rng):
    chan, bundle, cfg = random_setup(rng)
    per_f = [sum_rate(f, chan, bundle, cfg) for f in range(cfg.n_subcarriers)]
    assert spectral_efficiency(chan, bundle, cfg) == pytest.approx(np.mean(per_f))
