import numpy as np
import pytest
from scipy.stats import ks_2samp

from oracles import vmf_mean_resultant_bessel, vmf_mean_resultant_quad
from spheresync.sphere import normalize
from spheresync.synthetic import (
    VmfParams,
    householder_to,
    make_dat1,
    make_dat2,
    sample_vmf,
)

# frozen from the Bessel-ratio oracle; cross-checked by quadrature below
A3_K20 = 0.95
A5_K20 = 0.9026315789473683


def test_frozen_oracle_values():
    assert vmf_mean_resultant_bessel(20.0, 3) == pytest.approx(A3_K20, abs=1e-12)
    assert vmf_mean_resultant_bessel(20.0, 5) == pytest.approx(A5_K20, abs=1e-12)
    assert vmf_mean_resultant_quad(20.0, 3) == pytest.approx(A3_K20, abs=1e-9)
    assert vmf_mean_resultant_quad(20.0, 5) == pytest.approx(A5_K20, abs=1e-9)


def test_uniform_limit():
    x = sample_vmf(VmfParams(normalize([0, 0, 1.0]), 0.0, 10_000), seed=1).points
    assert np.linalg.norm(x.mean(axis=0)) <= 0.03


def test_concentrated_mean_direction():
    mu = normalize([1.0, 2.0, -1.0])
    x = sample_vmf(VmfParams(mu, 20.0, 1000), seed=2).points
    mean = x.mean(axis=0)
    assert float(normalize(mean) @ mu) >= 0.95
    assert np.linalg.norm(mean) == pytest.approx(A3_K20, abs=0.02)


def test_single_sample_and_unit_norm():
    for d in (2, 3, 7):
        mu = normalize(np.arange(1.0, d + 1))
        x = sample_vmf(VmfParams(mu, 5.0, 1), seed=0).points
        assert x.shape == (1, d)
        assert abs(np.linalg.norm(x) - 1) <= 1e-9


def test_negative_kappa_rejected():
    with pytest.raises(ValueError):
        VmfParams(normalize([1.0, 0]), -1.0, 3)


def test_householder_maps_pole():
    for mu in (normalize([0.3, -0.2, 0.9, 0.1]), np.array([1.0, 0, 0, 0]), np.array([-1.0, 0, 0, 0])):
        h = householder_to(mu)
        e1 = np.eye(4)[0]
        np.testing.assert_allclose(h @ e1, mu, atol=1e-15)
        np.testing.assert_allclose(h @ h.T, np.eye(4), atol=1e-14)


def test_reflection_equals_direct_sampling():
    mu = normalize([0.5, -1.0, 2.0, 0.3, 0.0])
    pole = np.eye(5)[0]
    direct = sample_vmf(VmfParams(mu, 12.0, 200), seed=9).points
    polar = sample_vmf(VmfParams(pole, 12.0, 200), seed=9).points
    np.testing.assert_allclose(polar @ householder_to(mu).T, direct, atol=1e-12)


def test_cosine_law_invariant_to_mu():
    n = 5000
    a_mu, b_mu = np.eye(3)[0], normalize([-0.3, 0.7, 0.65])
    a = sample_vmf(VmfParams(a_mu, 20.0, n), seed=10).points @ a_mu
    b = sample_vmf(VmfParams(b_mu, 20.0, n), seed=11).points @ b_mu
    assert ks_2samp(a, b).pvalue > 0.001


def test_seed_determinism():
    p = VmfParams(normalize([1.0, 1.0]), 3.0, 50)
    np.testing.assert_array_equal(sample_vmf(p, 4).points, sample_vmf(p, 4).points)
    assert not np.array_equal(sample_vmf(p, 4).points, sample_vmf(p, 5).points)


def test_dat1_shape():
    c = make_dat1(7)
    assert (c.n, c.dim) == (150, 3)
    assert sorted(set(c.labels)) == [1, 2, 3]
    assert all(c.labels.count(v) == 50 for v in (1, 2, 3))
    assert np.max(np.abs(np.linalg.norm(c.points, axis=1) - 1)) <= 1e-9
    np.testing.assert_array_equal(c.points, make_dat1(7).points)


def test_dat2_shape_and_concentration():
    c = make_dat2(7)
    assert (c.n, c.dim) == (200, 5)
    assert sorted(set(c.labels)) == [1, 2]
    assert np.max(np.abs(np.linalg.norm(c.points, axis=1) - 1)) <= 1e-9
    # population value is A5_K20 ~ 0.9026; 100 draws have sd ~ 0.006
    assert A5_K20 >= 0.9
    assert float(np.mean(c.points[:100, 0])) == pytest.approx(A5_K20, abs=0.03)
    assert float(np.mean(c.points[100:, 0])) == pytest.approx(-A5_K20, abs=0.03)
