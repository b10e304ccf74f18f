import warnings

import mpmath as mp
import numpy as np
import pytest

from liouville.blocks import (
    BlockParams,
    BlockSeries,
    beta_n,
    block_coefficients,
    block_eval,
    coefficients_csv,
    radius_diagnostic,
    v_weight,
)
from liouville.errors import DivergenceWarning
from liouville.partitions import YoungDiagram
from liouville.special import LiouvilleParams


def c1_block(z, dP):
    """Series part of the c = 1 block with external weights 1/16 (elliptic closed form)."""
    q = mp.qfrom(m=z)
    return complex((16 * q / z) ** dP * (1 - z) ** (-mp.mpf(1) / 8) / mp.jtheta(3, 0, q))


def test_beta_one_closed_form():
    p = BlockParams(0.3, 0.55, 0.8, 1.1, 1.7, 26.0)
    expected = (p.dP + p.d2 - p.d1) * (p.dP + p.d3 - p.d4) / (2 * p.dP)
    assert beta_n(1, p) == pytest.approx(expected, rel=1e-14)
    assert beta_n(0, p) == 1


def test_v_weight_product():
    nu = YoungDiagram((2, 1))
    # (2 d' - d + d'') (1 d' - d + d'' + 2)
    assert v_weight(1.0, 2.0, 3.0, nu) == (4 - 1 + 3) * (2 - 1 + 3 + 2)


@pytest.mark.parametrize("dP", [0.3, 1.1, 2.4])
def test_c1_elliptic_oracle(dP):
    p = BlockParams(1 / 16, 1 / 16, 1 / 16, 1 / 16, dP, 1.0)
    beta = block_coefficients(p, 8)
    for z in (0.05, 0.2):
        value, tail = block_eval(z, p, 8, coefficients=beta)
        ref = c1_block(z, dP)
        assert abs(value - ref) <= max(5 * tail, 1e-12)
    assert block_eval(0.05, p, 8, coefficients=beta)[0] == pytest.approx(c1_block(0.05, dP), rel=1e-11)


def test_pair_exchange_symmetry():
    p = BlockParams(0.3, 0.55, 0.8, 1.1, 1.7, 26.0)
    q = BlockParams(p.d4, p.d3, p.d2, p.d1, p.dP, p.cL)
    np.testing.assert_allclose(block_coefficients(p, 6), block_coefficients(q, 6), rtol=1e-12)


def test_crossed_swaps_first_and_third():
    p = BlockParams(0.3, 0.55, 0.8, 1.1, 1.7, 26.0)
    c = p.crossed()
    assert (c.d1, c.d3) == (p.d3, p.d1)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_inverse_and_solve_agree(n):
    params = LiouvilleParams(1.0)
    p = BlockParams.from_alphas((1.6, 1.4, 1.6, 1.4), 0.8, params)
    assert p.on_spectrum_line
    assert beta_n(n, p, "inverse") == pytest.approx(beta_n(n, p, "solve"), rel=1e-12)


def test_complex_weights_give_complex_coefficients():
    p = BlockParams(0.3 + 0.1j, 0.55, 0.8, 1.1, 1.7 + 0.2j, 26.0)
    beta = block_coefficients(p, 3)
    assert np.iscomplexobj(beta)
    assert beta_n(2, p, "inverse") == pytest.approx(beta[2], rel=1e-12)


def test_unknown_method():
    with pytest.raises(ValueError):
        beta_n(1, BlockParams(0.1, 0.1, 0.1, 0.1, 1.0, 25.0), "qr")


def test_csv_has_header_and_one_row_per_level():
    p = BlockParams(0.3, 0.55, 0.8, 1.1, 1.7, 26.0)
    text = coefficients_csv(block_coefficients(p, 5))
    lines = text.split("\r\n")
    assert lines[0] == "n,re_beta,im_beta,root_test"
    assert lines[-1] == ""
    assert len(lines) - 2 == 6
    assert lines[1].startswith("0,1.0,0.0,")


def test_divergence_warning():
    series = BlockSeries(np.array([1.0, 2.0, 4.0]), 2, 2.0)
    with pytest.warns(DivergenceWarning):
        value, tail = series.evaluate(0.6)
    assert tail == float("inf")


def test_no_warning_inside_radius():
    p = BlockParams(0.3, 0.55, 0.8, 1.1, 1.7, 26.0)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        value, tail = block_eval(0.1, p, 6)
    assert np.isfinite(tail)


def test_radius_diagnostic_shape():
    p = BlockParams(0.3, 0.55, 0.8, 1.1, 1.7, 26.0)
    assert radius_diagnostic(p, 5).shape == (5,)


def test_rejects_outside_unit_disc():
    p = BlockParams(0.3, 0.55, 0.8, 1.1, 1.7, 26.0)
    with pytest.raises(ValueError):
        block_eval(1.2, p, 3)


def test_kac_zero_intermediate_weight_is_singular():
    # Delta = 1 is degenerate at c = 1
    p = BlockParams(1 / 16, 1 / 16, 1 / 16, 1 / 16, 1.0, 1.0)
    with pytest.raises(np.linalg.LinAlgError):
        block_coefficients(p, 4)
