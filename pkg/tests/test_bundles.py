import numpy as np
import pytest

from mmwhybrid import KFMatrixBundle, MappingSets, PrecoderBundle
from mmwhybrid.bundles import FULLY_CONNECTED, FULLY_DIGITAL, PARTIALLY_CONNECTED
from oracles import rnd_complex


class TestKFMatrixBundle:
    def test_concat_ordering(self):
        blocks = np.arange(2 * 3 * 1 * 2).reshape(2, 3, 1, 2).astype(complex)
        bundle = KFMatrixBundle(blocks)
        concat = bundle.concat
        assert concat.shape == (1, 12)
        # user-major, then subcarrier, then column
        np.testing.assert_array_equal(concat[0, :2], blocks[0, 0, 0])
        np.testing.assert_array_equal(concat[0, 2:4], blocks[0, 1, 0])
        np.testing.assert_array_equal(concat[0, 6:8], blocks[1, 0, 0])

    def test_round_trip(self, rng):
        blocks = rnd_complex(rng, 3, 4, 5, 2)
        bundle = KFMatrixBundle(blocks)
        back = KFMatrixBundle.from_concat(bundle.concat, 3, 4)
        assert np.allclose(back.blocks, blocks)

    def test_per_carrier_composite(self, rng):
        blocks = rnd_complex(rng, 2, 3, 4, 2)
        bundle = KFMatrixBundle(blocks)
        comp = bundle.per_carrier(1)
        assert comp.shape == (4, 4)
        assert np.allclose(comp[:, :2], blocks[0, 1])
        assert np.allclose(comp[:, 2:], blocks[1, 1])

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError, match="4-D"):
            KFMatrixBundle(np.zeros((2, 3, 4)))

    def test_from_concat_divisibility(self, rng):
        with pytest.raises(ValueError, match="divisible"):
            KFMatrixBundle.from_concat(rnd_complex(rng, 2, 7), 2, 2)


def minimal_bundle(rng, structure=FULLY_CONNECTED, **overrides):
    kk, ff, ns, n_tx, n_rx, jt, jr = 2, 2, 1, 4, 3, 2, 1
    fields = dict(
        f_rf=rnd_complex(rng, n_tx, jt) * 0.5,
        f_bb=KFMatrixBundle(rnd_complex(rng, kk, ff, jt, ns)),
        w_rf=rnd_complex(rng, kk, n_rx, jr) * 0.5,
        w_bb=KFMatrixBundle(rnd_complex(rng, kk, ff, jr, ns)),
        structure=structure,
    )
    fields["f_b"] = fields["f_bb"]
    fields.update(overrides)
    return PrecoderBundle(**fields)


class TestPrecoderBundle:
    def test_shape_mismatch_rejected(self, rng):
        with pytest.raises(ValueError, match="does not match analog column count"):
            minimal_bundle(
                rng, f_bb=KFMatrixBundle(rnd_complex(rng, 2, 2, 3, 1))
            )
        with pytest.raises(ValueError, match="user count"):
            minimal_bundle(rng, w_rf=rnd_complex(rng, 3, 3, 1))
        with pytest.raises(ValueError, match="unknown structure"):
            minimal_bundle(rng, structure="mesh")

    def test_partial_requires_mapping(self, rng):
        with pytest.raises(ValueError, match="mapping"):
            minimal_bundle(rng, structure=PARTIALLY_CONNECTED)

    def test_amplitude_check(self, rng):
        bundle = minimal_bundle(rng)
        bundle.f_rf[0, 0] = 2.5
        with pytest.raises(ValueError, match="modulus"):
            bundle.check(power_budget=1e6)

    def test_power_check(self, rng):
        bundle = minimal_bundle(rng)
        with pytest.raises(ValueError, match="power"):
            bundle.check(power_budget=bundle.transmit_power() / 2)
        bundle.check(power_budget=bundle.transmit_power() * 1.01)

    def test_partial_support_check(self, rng):
        mapping = MappingSets(4, ((0, 1), (2, 3)))
        f_rf = np.zeros((4, 2), dtype=complex)
        f_rf[[0, 1], 0] = 1.0
        f_rf[[2, 3], 1] = 1.0
        bundle = minimal_bundle(
            rng, structure=PARTIALLY_CONNECTED, mapping=mapping, f_rf=f_rf
        )
        bundle.check(power_budget=bundle.transmit_power() * 1.01)
        bundle.f_rf[0, 1] = 0.5  # second non-zero in a row
        with pytest.raises(ValueError, match="one non-zero"):
            bundle.check(power_budget=1e6)

    def test_fully_digital_skips_amplitude(self, rng):
        bundle = minimal_bundle(rng, structure=FULLY_DIGITAL)
        bundle.f_rf[0, 0] = 9.0
        bundle.check(power_budget=bundle.transmit_power() * 1.01)

    def test_normalized_power_equality(self, rng):
        bundle = minimal_bundle(rng, power_normalized=True)
        with pytest.raises(ValueError, match="!= budget"):
            bundle.check(power_budget=bundle.transmit_power() * 1.001)
        bundle.check(power_budget=bundle.transmit_power())
