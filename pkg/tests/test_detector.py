import numpy as np
import pytest

from shapedapsk.exitlab import DetectorFamily, detector_characteristic
from shapedapsk.shaping import SHAPING_4_2

GRID = np.linspace(0, 1, 6)


def test_uniform_curve_increasing_in_apriori(uniform_32apsk):
    ie = detector_characteristic(uniform_32apsk, None, 9.0, GRID, 20_000).ie_values
    assert np.all(np.diff(ie) > 0)
    assert 0.4 < ie[0] < ie[-1] < 1


@pytest.mark.parametrize("shaped", [False, True])
def test_monotone_in_snr(uniform_32apsk, shaped_32apsk, shaped):
    c, code = (shaped_32apsk, SHAPING_4_2) if shaped else (uniform_32apsk, None)
    a = detector_characteristic(c, code, 9.0, GRID, 20_000).ie_values
    b = detector_characteristic(c, code, 9.1, GRID, 20_000).ie_values
    # common random numbers make a 0.1 dB step visible at small sample counts
    assert np.all(b > a)


def test_seeded_determinism(shaped_32apsk):
    a = detector_characteristic(shaped_32apsk, SHAPING_4_2, 9.0, GRID, 5_000, seed=3)
    b = detector_characteristic(shaped_32apsk, SHAPING_4_2, 9.0, GRID, 5_000, seed=3)
    assert np.array_equal(a.ie_values, b.ie_values)
    assert a.params["shaping"] == SHAPING_4_2.fingerprint()


def test_shaped_zero_apriori_between_bounds(shaped_32apsk):
    ie = detector_characteristic(shaped_32apsk, SHAPING_4_2, 9.0, GRID, 20_000).ie_values
    assert np.all((ie > 0) & (ie < 1))


def test_minimum_samples(uniform_32apsk):
    with pytest.raises(ValueError):
        detector_characteristic(uniform_32apsk, None, 9.0, GRID, 999)


def test_family_cache_roundtrip(tmp_path, uniform_32apsk):
    fam = DetectorFamily(uniform_32apsk, None, GRID, 2_000, cache_dir=tmp_path)
    a = fam.ie_at(9.0)
    assert len(list(tmp_path.glob("det_*.npz"))) == 1
    fresh = DetectorFamily(uniform_32apsk, None, GRID, 2_000, cache_dir=tmp_path)
    assert np.array_equal(fresh.ie_at(9.0), a)


def test_family_interpolates_between_lattice_points(uniform_32apsk):
    fam = DetectorFamily(uniform_32apsk, None, GRID, 2_000, step_db=0.5)
    lo, hi = fam.ie_at(9.0), fam.ie_at(9.5)
    assert np.allclose(fam.ie_at(9.1), 0.8 * lo + 0.2 * hi)
    snrs, table = fam.lattice(9.0, 9.5)
    assert np.allclose(snrs, [9.0, 9.5]) and table.shape == (2, 6)
