import math

import numpy as np
import pytest

import lightmu


def test_kappa_zero_is_gibbs():
    r = lightmu.solve_lattice(sites=3, mu=0.4, J=0.1, gamma0=0.01, kappa=0.0, beta=10.0)
    e = np.asarray(r["energies"])
    w = np.exp(-10.0 * (e - e.min()))
    np.testing.assert_allclose(r["populations"], w / w.sum(), atol=1e-10)
    assert abs(sum(r["number_distribution"]) - 1.0) < 1e-12


def test_single_site_matches_lattice():
    p = lightmu.single_site_steady(mu=0.4, beta=3.0, gamma0=0.02, kappa=0.01, n_max=4)
    r = lightmu.solve_lattice(sites=1, mu=0.4, J=0.0, gamma0=0.02, kappa=0.01, beta=3.0, n_max=4)
    by_n = dict(zip(r["photon_number"], r["populations"]))
    for n, pn in enumerate(p):
        assert abs(by_n[n] - pn) < 1e-10


def test_breakdown_raises_typed_error():
    with pytest.raises(lightmu.BreakdownError):
        lightmu.n_eff_hole(0.3, 10.0, 0.02, 0.01)
    with pytest.raises(lightmu.Error):
        lightmu.t_c(0.3, 0.2, 0.05, 0.01, 0.01)
    assert issubclass(lightmu.CapacityError, lightmu.Error)


def test_lobes_and_excitations():
    particle, hole = lightmu.excitation_energies(1, 0.5, 0.0)
    assert particle == pytest.approx(0.5)
    assert hole == pytest.approx(0.5)
    d = lightmu.lobe_boundary(1, 2.0, [0.0, 0.02])
    assert d["mu_low"][0] < d["mu_high"][0]


def test_bath_discretization():
    d = lightmu.discretize(20, family="ohmic_exponential")
    assert len(d["omega"]) == 20
    assert all(np.diff(d["omega"]) > 0)
    # Zeroth moment of the Laguerre weight.
    assert sum(d["weight"]) == pytest.approx(1.0, rel=1e-12)
    disc, ref = lightmu.correlation(20, [0.0, 1.0])
    assert ref[0] == pytest.approx(1.0 / math.pi, rel=1e-10)
    assert abs(disc[1] - ref[1]) < 1e-3 * abs(ref[1])
    with pytest.raises(lightmu.ArgumentError):
        lightmu.discretize(5, family="nope")


def test_tls_decay_fit():
    tr = lightmu.tls_evolve(n=12, A=0.3, t_final=5.0)
    assert len(tr["t"]) == 51
    assert max(tr["norm_drift"]) < 1e-7
    t = np.arange(0, 40, 0.1)
    f = lightmu.fit_decay(t, 2 * np.exp(-t / 8.0) - 1)
    assert f["rate"] == pytest.approx(1 / 8.0, rel=1e-9)
