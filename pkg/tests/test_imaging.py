import math

import numpy as np
import pytest
from PIL import Image

from conftest import OMEGA, curve_tree
from submig.bessel import closed_form_single
from submig.forward import assemble_msr, make_directions
from submig.geometry import CurveSample
from submig.imaging import (
    ImageMap,
    ImagingGrid,
    TestVectorSpec,
    apply_filter,
    closed_form_map,
    evaluate_functional,
    load_map_csv,
    normalize_map,
    region_split_filter,
    save_map,
    test_vector_geomfree as geomfree,
    test_vector_weighted as weighted,
)
from submig.spectral import decompose

SMALL = ImagingGrid(nx=33, ny=29)


def test_grid_layout():
    g = ImagingGrid((0, 1), (2, 4), 3, 5)
    pts = g.points()
    assert pts.shape == (5, 3, 2)
    np.testing.assert_allclose(pts[0, 0], [0, 2])
    np.testing.assert_allclose(pts[-1, -1], [1, 4])
    with pytest.raises(ValueError):
        ImagingGrid(nx=1)


def test_test_vectors_are_unit(dirs64):
    z = np.array([[0.1, 0.2], [-0.3, 0.0]])
    assert np.linalg.norm(geomfree(z, dirs64, OMEGA), axis=-1) == pytest.approx([1, 1])
    assert np.linalg.norm(weighted(z, dirs64, OMEGA, (1, 0, 1)), axis=-1) == pytest.approx([1, 1])
    with pytest.raises(ValueError):
        TestVectorSpec("weighted", (0, 0, 0))


def _point_decomposition(dirs, omega):
    s = CurveSample.from_tangent(np.array([0.1, -0.15]), [0.8, 0.6])
    theta = dirs.directions
    phase = np.exp(1j * omega * (theta @ s.point))
    H = np.stack([phase, (theta @ s.tangent) * phase, (theta @ s.normal) * phase], axis=1)
    K = (H * np.array([4.0, -0.8, -4.0])) @ H.T
    dec = decompose(K)
    return s, type(dec)(dec.singular_values, dec.left_vectors, dec.right_vectors, omega)


def test_isolated_point_matches_signed_structure(dirs64):
    s, dec = _point_decomposition(dirs64, OMEGA)
    sf = evaluate_functional("SF", SMALL, dec, 3, dirs64).values
    ref = closed_form_single(SMALL.points(), [s], OMEGA, form="signed")
    np.testing.assert_allclose(sf, ref, atol=1e-12)


def test_multi_frequency_is_average_of_singles(dirs64):
    omegas = [OMEGA, 1.2 * OMEGA]
    decs = [_point_decomposition(dirs64, w)[1] for w in omegas]
    mf = evaluate_functional("MF", SMALL, decs, [3, 3], dirs64).values
    singles = [evaluate_functional("SF", SMALL, d, 3, dirs64).values for d in decs]
    # all terms are positive at every point here, so |mean| = mean of |.|
    np.testing.assert_allclose(mf, np.mean(singles, axis=0), atol=1e-12)


def test_functional_argument_checks(inc1, dirs64):
    dec = decompose(assemble_msr([inc1], dirs64, OMEGA))
    with pytest.raises(ValueError):
        evaluate_functional("XX", SMALL, dec, 3, dirs64)
    with pytest.raises(ValueError):
        evaluate_functional("MF", SMALL, dec, 3, dirs64)
    with pytest.raises(ValueError):
        evaluate_functional("SF", SMALL, [dec, dec], 3, dirs64)
    with pytest.raises(ValueError):
        evaluate_functional("SF", SMALL, dec, 0, dirs64)
    with pytest.raises(ValueError):
        evaluate_functional("SM", SMALL, dec, 3, dirs64, TestVectorSpec())


def test_weighted_map_peaks_near_curve(inc1, dirs64):
    dec = decompose(assemble_msr([inc1], dirs64, OMEGA))
    sm = evaluate_functional("SM", ImagingGrid(nx=64, ny=64), dec, 6, dirs64)
    assert curve_tree(inc1.curve).query(sm.argmax_point())[0] < 0.1


def test_chunking_does_not_change_values(inc1, dirs64):
    dec = decompose(assemble_msr([inc1], dirs64, OMEGA))
    a = evaluate_functional("SF", SMALL, dec, 6, dirs64).values
    b = evaluate_functional("SF", SMALL, dec, 6, dirs64, chunk=7).values
    np.testing.assert_allclose(a, b, atol=1e-14)


def _ramp():
    g = ImagingGrid((0, 1), (0, 1), 5, 4)
    return ImageMap(g, np.arange(20, dtype=float).reshape(4, 5) / 2)


def test_normalize_and_filter():
    n = normalize_map(_ramp())
    assert n.values.max() == 1.0
    f = apply_filter(n, 0.5)
    assert np.all((f.values == 0) | (f.values >= 0.5))
    assert f.meta["threshold"] == 0.5
    with pytest.raises(ValueError):
        apply_filter(n, 1.0)
    with pytest.raises(ValueError):
        normalize_map(ImageMap(n.grid, np.zeros(n.grid.shape)))


def test_region_split_normalizes_each_rectangle():
    g = ImagingGrid((0, 1), (0, 1), 11, 11)
    vals = np.zeros(g.shape)
    vals[2, 5] = 10.0   # bottom region peak
    vals[8, 5] = 1.0    # top region peak, masked by a global filter
    img = ImageMap(g, vals)
    assert apply_filter(normalize_map(img), 0.678).values[8, 5] == 0
    out = region_split_filter(img, [(0, 1, 0, 0.5), (0, 1, 0.5, 1)], 0.678).values
    assert out[2, 5] == 1.0 and out[8, 5] == 1.0


def test_region_split_validation():
    img = _ramp()
    with pytest.raises(ValueError):
        region_split_filter(img, [(0, 1, 0, 0.6), (0, 1, 0.4, 1)], 0.5)
    with pytest.raises(ValueError):
        region_split_filter(img, [(1, 0, 0, 1)], 0.5)


def test_region_split_shared_edge_goes_to_first():
    g = ImagingGrid((0, 1), (0, 1), 3, 3)
    img = ImageMap(g, np.array([[1.0, 1, 1], [4, 4, 4], [2, 2, 2]]))
    out = region_split_filter(img, [(0, 1, 0, 0.5), (0, 1, 0.5, 1)], 0.9).values
    np.testing.assert_allclose(out[1], 1.0)   # middle row claimed by region 0
    np.testing.assert_allclose(out[2], 1.0)   # region 1 renormalized to its own max
    np.testing.assert_allclose(out[0], 0.0)


def test_closed_form_map_single(dirs64):
    s = CurveSample.from_tangent(np.zeros(2), [1, 0])
    m = closed_form_map(ImagingGrid(nx=21, ny=21), [s], OMEGA)
    assert m.values[10, 10] == pytest.approx(1.0)


def test_save_and_reload(tmp_path):
    img = apply_filter(normalize_map(_ramp()), 0.3)
    paths = save_map(img, tmp_path / "m", ("csv", "pgm", "png"), {"seed": 4})
    assert {p.suffix for p in paths} == {".csv", ".pgm", ".png", ".json"}
    back = load_map_csv(tmp_path / "m")
    np.testing.assert_array_equal(back.values, img.values)
    assert back.meta["threshold"] == 0.3
    pgm = (tmp_path / "m.pgm").read_bytes()
    assert pgm.startswith(b"P5\n5 4\n65535\n")
    top_right = int.from_bytes(pgm[len(b"P5\n5 4\n65535\n") + 8:][:2], "big")
    assert top_right == 65535  # y_max row first, brightest pixel at its right end
    png = np.asarray(Image.open(tmp_path / "m.png"))
    assert png.shape == (4, 5) and png[0, -1] == 255
