import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holomimo.clarke import AngularSpectrum, clarke_correlation
from holomimo.errors import DataError, FormatError, InvalidArgumentError, ParseError
from holomimo.geometry import build_linear_2d, build_linear_3d
from holomimo.kronecker import cap_power_spectrum, pattern_correlation
from holomimo.patterns import (
    CSV_HEADER,
    PatternGrid,
    angle_axes,
    dipole_field,
    element_over_reflector,
    isotropic_pattern,
    load_pattern_grid,
    lower_element,
    place_patterns,
    reflector_factor,
    save_pattern_grid,
    surrogate_patterns,
    translate_pattern,
    upper_element,
)

from conftest import COARSE


def test_isotropic_definition():
    p = isotropic_pattern((18, 36))
    assert p.shape == (18, 36)
    np.testing.assert_array_equal(p.e_theta, 1.0)
    np.testing.assert_array_equal(p.e_phi, 0.0)
    np.testing.assert_array_equal(p.element_position, 0.0)


@pytest.mark.parametrize("res", [(91, 180), (181, 360), (361, 720)])
def test_isotropic_power_is_four_pi(res):
    assert isotropic_pattern(res).total_power() == pytest.approx(4 * np.pi, rel=1e-3)


def test_isotropic_correlation_matches_point_model():
    g = build_linear_2d(2, 0.37)
    pats = place_patterns(g, [isotropic_pattern(), isotropic_pattern()])
    p = pats[0]
    rho = pattern_correlation(pats, cap_power_spectrum(p.theta, p.phi, np.pi / 2))
    ref = clarke_correlation(g, AngularSpectrum(np.pi / 2))
    np.testing.assert_allclose(rho, ref, atol=1e-3)


def test_half_wave_offset_decorrelates_isotropic_pair():
    a = isotropic_pattern()
    b = translate_pattern(isotropic_pattern(), (0.5, 0, 0))
    rho = pattern_correlation([a, b], cap_power_spectrum(a.theta, a.phi, np.pi))
    assert abs(rho[0, 1]) < 1e-3


@pytest.mark.parametrize(
    "height,phase,expected",
    [(0.5, 0.0, 2.0), (0.25, np.pi, 2.0), (0.0, np.pi, 0.0), (0.0, 0.0, 2.0)],
)
def test_reflector_factor_broadside(height, phase, expected):
    assert reflector_factor(0.0, height, phase) == pytest.approx(expected, abs=1e-12)


def test_reflector_shadow():
    assert reflector_factor(np.radians(120), 0.3, 0.0) == 0.0


def test_horizon_takes_mean_power_of_the_step():
    # |1 + 1|^2 = 4 just above the horizon and 0 below: 2 on the horizon itself
    assert reflector_factor(np.pi / 2, 0.3, 0.0) ** 2 == pytest.approx(2.0)


def test_half_wave_height_matches_end_fire_pair():
    # |1 + exp(-j 2 pi cos theta)| is a two-element in-phase pair 1 wavelength apart
    theta = np.linspace(0, np.pi / 2, 50, endpoint=False)
    pair = np.abs(np.exp(1j * np.pi * np.cos(theta)) + np.exp(-1j * np.pi * np.cos(theta)))
    np.testing.assert_allclose(reflector_factor(theta, 0.5, 0.0), pair, atol=1e-12)
    # null at cos(theta) = 1/2 gives the side-lobe structure
    assert reflector_factor(np.pi / 3, 0.5, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_shorted_element_is_dark():
    p = element_over_reflector(0.0, np.pi, COARSE)
    assert np.max(np.abs(p.e_theta)) < 1e-12 and np.max(np.abs(p.e_phi)) < 1e-12
    # validity demands positive power, so the dark pattern is flagged when used
    with pytest.raises(Exception):
        pattern_correlation([p, p], cap_power_spectrum(p.theta, p.phi, 1.0))


def test_low_height_doubles_broadside():
    free = dipole_field(0.0, 0.0)
    low = element_over_reflector(1e-6, 0.0, COARSE)
    et = np.hypot(np.abs(low.e_theta[0, 0]), np.abs(low.e_phi[0, 0]))
    assert et == pytest.approx(2 * np.hypot(*free), rel=1e-6)


def test_negative_height():
    with pytest.raises(InvalidArgumentError):
        element_over_reflector(-0.1)


def test_dipole_peak_and_null():
    et, ep = dipole_field(np.pi / 2, np.pi / 2)  # along the y axis
    assert abs(et) < 1e-12 and abs(ep) < 1e-12
    et, ep = dipole_field(0.0, 0.0)
    assert np.hypot(et, ep) == pytest.approx(1.0)


def test_canonical_scale():
    lo = lower_element(COARSE)
    up = upper_element(COARSE)
    assert np.sqrt(lo.intensity().max()) == pytest.approx(1.0, abs=1e-12)
    ratio = up.intensity().max() / lo.intensity().max()
    raw = element_over_reflector(0.5, 0.0, COARSE).intensity().max() / element_over_reflector(0.02, 0.0, COARSE).intensity().max()
    assert ratio == pytest.approx(raw)


@settings(max_examples=30, deadline=None)
@given(st.tuples(*[st.floats(-3, 3) for _ in range(3)]))
def test_translation_is_pure_phase(offset):
    p = lower_element(COARSE)
    q = translate_pattern(p, offset)
    np.testing.assert_allclose(np.abs(q.e_theta), np.abs(p.e_theta), atol=1e-12)
    assert q.total_power() == pytest.approx(p.total_power(), rel=1e-12)
    np.testing.assert_allclose(q.element_position, offset)


def test_zero_translation_identity():
    p = upper_element(COARSE)
    q = translate_pattern(p, (0, 0, 0))
    np.testing.assert_array_equal(q.e_theta, p.e_theta)
    np.testing.assert_array_equal(q.e_phi, p.e_phi)


def test_refinement_changes_power_little():
    a = element_over_reflector(0.5, 0.0, (181, 360)).total_power()
    b = element_over_reflector(0.5, 0.0, (361, 720)).total_power()
    assert abs(a - b) / b < 1e-3


def test_surrogate_assignment():
    g = build_linear_3d(4, 0.3, 0.5)
    pats = surrogate_patterns(g, COARSE)
    lo, up = lower_element(COARSE), upper_element(COARSE)
    np.testing.assert_array_equal(pats[0].e_theta, lo.e_theta)
    np.testing.assert_array_equal(pats[1].e_theta, up.e_theta)
    assert all(np.array_equal(p.e_theta, lo.e_theta) for p in surrogate_patterns(build_linear_2d(3, 0.3), COARSE))


def test_sample_reproduces_grid_nodes():
    p = upper_element(COARSE)
    i, j = 17, 33
    t, ph = p.theta[i], p.phi[j]
    d = np.array([[np.sin(t) * np.cos(ph), np.sin(t) * np.sin(ph), np.cos(t)]])
    et, ep = p.sample(d)
    assert et[0] == pytest.approx(p.e_theta[i, j], abs=1e-12)
    assert ep[0] == pytest.approx(p.e_phi[i, j], abs=1e-12)


def test_sample_wraps_phi():
    p = upper_element(COARSE)
    eps = 1e-9
    a = p.sample(np.array([[np.sin(1.0) * np.cos(-eps), np.sin(1.0) * np.sin(-eps), np.cos(1.0)]]))
    b = p.sample(np.array([[np.sin(1.0), 0.0, np.cos(1.0)]]))
    assert a[0][0] == pytest.approx(b[0][0], abs=1e-6)


def test_grid_validation():
    theta, phi = angle_axes(5, 8)
    z = np.ones((5, 8), complex)
    with pytest.raises(InvalidArgumentError):
        PatternGrid(theta[::-1], phi, z, z)
    with pytest.raises(InvalidArgumentError):
        PatternGrid(theta, phi, z, np.ones((4, 8)))
    bad = z.copy()
    bad[1, 1] = np.nan
    with pytest.raises(InvalidArgumentError):
        PatternGrid(theta, phi, bad, z)


# -- CSV -------------------------------------------------------------------------


def test_csv_round_trip_is_bit_exact(tmp_path):
    p = translate_pattern(upper_element((37, 72)), (0.2, -0.1, 0.5))
    path = tmp_path / "p.csv"
    save_pattern_grid(p, path)
    q = load_pattern_grid(path)
    for a in ("theta", "phi", "e_theta", "e_phi", "element_position"):
        np.testing.assert_array_equal(getattr(q, a), getattr(p, a))


def test_csv_header_format(tmp_path):
    path = tmp_path / "p.csv"
    save_pattern_grid(isotropic_pattern((3, 4)), path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1].startswith("0.00,0.00,")
    assert len(lines) == 1 + 12


def _write_grid(path, rows, header=",".join(CSV_HEADER)):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return path


def _rows(thetas=(0.0, 90.0, 180.0), phis=(0.0, 180.0)):
    return [f"{t:.2f},{p:.2f},1.0,0.0,0.0,0.0" for t in thetas for p in phis]


def test_minimal_hand_written_grid(tmp_path):
    p = load_pattern_grid(_write_grid(tmp_path / "g.csv", _rows()))
    assert p.shape == (3, 2)


def test_descending_theta_is_format_error(tmp_path):
    with pytest.raises(FormatError):
        load_pattern_grid(_write_grid(tmp_path / "g.csv", _rows(thetas=(180.0, 90.0, 0.0))))


def test_truncated_row_is_parse_error_with_line(tmp_path):
    rows = _rows()
    rows[-1] = "180.00,180.00,1.0,0.0"
    with pytest.raises(ParseError) as exc:
        load_pattern_grid(_write_grid(tmp_path / "g.csv", rows))
    assert exc.value.line == 7


def test_bad_header_is_parse_error(tmp_path):
    with pytest.raises(ParseError) as exc:
        load_pattern_grid(_write_grid(tmp_path / "g.csv", _rows(), header="theta,phi,a,b,c,d"))
    assert exc.value.line == 1


def test_nan_is_data_error(tmp_path):
    rows = _rows()
    rows[2] = "90.00,0.00,nan,0.0,0.0,0.0"
    with pytest.raises(DataError) as exc:
        load_pattern_grid(_write_grid(tmp_path / "g.csv", rows))
    assert exc.value.line == 4


def test_missing_row_is_format_error(tmp_path):
    with pytest.raises(FormatError):
        load_pattern_grid(_write_grid(tmp_path / "g.csv", _rows()[:-1]))


def test_non_numeric_is_parse_error(tmp_path):
    rows = _rows()
    rows[0] = "0.00,0.00,one,0.0,0.0,0.0"
    with pytest.raises(ParseError):
        load_pattern_grid(_write_grid(tmp_path / "g.csv", rows))
