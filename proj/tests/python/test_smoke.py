import math

import pytest

import pendlim

A_NUM = [-10295.211457925559, -50233.202184311609, -83577.368139109079, -92741.284403669793]
A_DEN = [1.0, 31.070085372640776, 475.54855216645677, 4618.0920516596952]
P = 3.17991291607901643903816933272


def case_study(l0=1.0):
    return pendlim.PendulumParams(3.25, 0.1, 1.0, l0)


def test_fragility_with_rhp_zero():
    r = pendlim.fragility(case_study(0.8), 0.3)
    assert r["F"] == pytest.approx(1.93353355958, rel=1e-10)
    assert r["q"] == pytest.approx(7.00357051795725, rel=1e-12)
    assert r["regime"] == "RhpZero"


def test_fragility_without_zero():
    r = pendlim.fragility(case_study(1.0), 0.3)
    assert r["q"] is None
    assert r["F"] == pytest.approx(0.3 * P, rel=1e-12)


def test_poles_zeros():
    poles, zeros = pendlim.poles_zeros(case_study(0.8))
    assert len(poles) == 4
    assert max(z.real for z in poles) == pytest.approx(P, rel=1e-12)
    assert sorted(round(z.real, 9) for z in zeros) == [-7.003570518, 7.003570518]


def test_domain_errors_are_value_errors():
    with pytest.raises(ValueError):
        pendlim.PendulumParams(-1.0, 0.1, 1.0, 0.5)
    prm = case_study(1.0)
    l0s = pendlim.singular_fixation_point(prm)
    with pytest.raises(ValueError):
        pendlim.fragility(pendlim.PendulumParams(3.25, 0.1, 1.0, l0s), 0.3)


def test_fragility_curve_decreasing():
    x, F = pendlim.fragility_curve(case_study(0.5), 0.3, "fixation-point", 0.1, 1.0, 20)
    assert len(x) == 20
    assert all(a > b for a, b in zip(F, F[1:]))


def test_nyquist_and_bode():
    prm = case_study(1.0)
    assert pendlim.nyquist_stable(prm, A_NUM, A_DEN, 0.01)
    assert not pendlim.nyquist_stable(prm, A_NUM, A_DEN, 0.05)
    assert pendlim.bode_integral(prm, A_NUM, A_DEN, 0.01, P) == pytest.approx(0.01 * P, rel=1e-6)
    T = pendlim.complementary_response(prm, A_NUM, A_DEN, 0.01, [0.1, 1.0, 10.0])
    assert len(T) == 3


def test_simulate_is_deterministic():
    kw = dict(tau=0.01, dt=1e-3, duration=1.0, sensor_noise=1e-3, seed=11)
    a = pendlim.simulate(case_study(1.0), A_NUM, A_DEN, **kw)
    b = pendlim.simulate(case_study(1.0), A_NUM, A_DEN, **kw)
    assert a["z"] == b["z"]
    assert not a["diverged"]
    assert len(a["t"]) == 1001


def test_welch_psd_peak():
    fs = 200.0
    x = [math.sin(2 * math.pi * 5.0 * i / fs) for i in range(20000)]
    f, p = pendlim.welch_psd(x, fs, 1024)
    k = max(range(len(p)), key=p.__getitem__)
    assert abs(f[k] - 5.0) <= f[1]
