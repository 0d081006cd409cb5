import numpy as np
import pytest

from negham import qp
from negham.core import (
    Dispersion,
    TripartiteGeometry,
    binary_entropy,
    clip_filling,
    constant_occupation,
    dimer_state,
    entanglement_energy,
    midpoint_kgrid,
)

DIMER = dimer_state()


def overlap_length(a, b):
    return max(0.0, min(a[1], b[1]) - max(a[0], b[0]))


def test_bracket_equals_intersection_form():
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        ell = rng.uniform(0.5, 50)
        d = rng.uniform(0.5, 50)
        vt = rng.uniform(0, 80)
        window = overlap_length((d / 2, d / 2 + ell), (-d / 2 - ell + 2 * vt, -d / 2 + 2 * vt))
        if not (d / 2 < vt < ell + d / 2):
            window = 0.0
        assert abs(2 * qp.pure_pair_bracket(vt, ell, d) - window) < 1e-12


def test_pure_weight_examples():
    geom = TripartiteGeometry(10, 10, 4)
    # t = 0: window empty
    assert qp.pure_weight(np.pi / 2, 0.0, geom) == 0.0
    # |v| t = d/2 + l/2 -> full overlap l (interval-intersection oracle)
    t = (geom.d / 2 + geom.l1 / 2)  # k = pi/2 has unit speed
    assert abs(qp.pure_weight(np.pi / 2, t, geom) - geom.l1) < 1e-12
    # beyond l + d/2: zero
    assert qp.pure_weight(np.pi / 2, geom.l1 + geom.d / 2 + 1.0, geom) == 0.0
    with pytest.raises(ValueError):
        qp.pure_weight(0.3, 1.0, TripartiteGeometry(4, 5, 2))


def trajectory_mixed_weight(vt, ell, d, samples=2_000_001):
    """Pair-counting oracle on a fine origin grid: the weight at one signed
    momentum counts pairs whose surviving member moves with that sign, so at
    +k it is the pairs whose right mover sits in A with the left mover
    outside (summing both signs recovers every shared pair once)."""
    span = 2 * (ell + d + 2 * vt) + 10
    x0 = np.linspace(-span / 2, span / 2, samples)
    dx = x0[1] - x0[0]
    left, right = x0 - vt, x0 + vt

    def in_a(x):
        return ((x >= d / 2) & (x < d / 2 + ell)) | ((x >= -d / 2 - ell) & (x < -d / 2))

    return (in_a(right) & ~in_a(left)).sum() * dx


def test_mixed_weight_examples():
    geom = TripartiteGeometry(10, 10, 4)
    assert qp.mixed_weight(0.7, 0.0, geom) == 0.0
    # l=10, d=4, |v|t = 1 -> 4 (direct evaluation)
    t = 1.0 / np.sin(0.7)
    assert abs(qp.mixed_weight(0.7, t, geom) - 4.0) < 1e-12
    # trajectory-counting oracle agrees to well below one lattice site
    for vt in (1.0, 3.0, 6.0, 11.0, 30.0):
        mc = trajectory_mixed_weight(vt, 10, 4)
        t = vt  # unit speed mode
        assert abs(qp.mixed_weight(np.pi / 2, t, geom) - mc) < 0.01
    # exact saturation at large times
    assert qp.mixed_weight(np.pi / 2, 1e9, geom) == 2 * geom.l1
    assert qp.mixed_weight(np.pi / 2, 1e9, geom) == geom.l1 + geom.l2
    # even per-interval split
    w1, w2 = qp.mixed_weight_split(0.7, 3.0, geom)
    assert w1 == w2 and abs(w1 + w2 - qp.mixed_weight(0.7, 3.0, geom)) < 1e-15
    with pytest.raises(ValueError):
        qp.mixed_weight_split(0.7, 3.0, TripartiteGeometry(4, 5, 2))


def test_weight_budget():
    # w_m + 2 w_p never exceeds the total emitted weight captured by A
    geom = TripartiteGeometry(8, 8, 5)
    rng = np.random.default_rng(3)
    for _ in range(200):
        k, t = rng.uniform(-np.pi, np.pi), rng.uniform(0, 40)
        total = qp.mixed_weight(k, t, geom) + 2 * qp.pure_weight(k, t, geom)
        assert total <= 2 * (geom.l1 + geom.l2) + 1e-9
        assert qp.pure_weight(k, t, geom) >= 0
        assert qp.mixed_weight(k, t, geom) >= -1e-12


def test_entropy_limits():
    geom = TripartiteGeometry(12, 12, 6)
    assert qp.renyi_entropy(1, 0.0, DIMER, geom, nk=4096) == 0.0
    # maximally mixed filling saturates at (l1 + l2) log 2
    half = constant_occupation(0.5)
    s_inf = qp.renyi_entropy(1, 1e9, half, geom, nk=4096)
    assert abs(s_inf - 2 * geom.l1 * np.log(2)) < 1e-10


def test_single_interval_limit_matches_far_gap():
    # d -> infinity: half the pair entropy reproduces the single-interval formula
    ell, t = 9, 3.7
    geom = TripartiteGeometry(ell, ell, 10_000)
    s = qp.renyi_entropy(1, t, DIMER, geom) / 2
    k = midpoint_kgrid(qp.DEFAULT_KGRID)
    n = clip_filling(DIMER(k))
    single = np.sum(np.minimum(2 * np.abs(np.sin(k)) * t, ell) * binary_entropy(n)) / len(k)
    assert abs(s - single) < 1e-8


def test_negativity_identities():
    geom = TripartiteGeometry(10, 10, 6)
    occ = DIMER
    assert qp.renyi_negativity(2, 0.0, occ, geom, nk=8192) == 0.0
    for t in (2.0, 5.0, 9.0):
        e2 = qp.renyi_negativity(2, t, occ, geom, nk=8192)
        s2 = qp.renyi_entropy(2, t, occ, geom, nk=8192)
        assert abs(e2 + s2) < 1e-12  # E_2 = -S_2 exactly
        assert abs(qp.log_ratio(2, t, occ, geom, nk=8192)) < 1e-12
    # long-time limit: pure term gone, E_alpha -> (1 - alpha) S_alpha
    t = 1e7
    for alpha in (1, 3, 4):
        e = qp.renyi_negativity(alpha, t, occ, geom, nk=8192)
        s = qp.renyi_entropy(alpha, t, occ, geom, nk=8192)
        assert abs(e - (1 - alpha) * s) < 1e-10
    # before the cone (unit max speed) the pure bracket vanishes identically
    for alpha in (1, 3):
        assert qp.log_ratio(alpha, 0.9 * geom.d / 2, occ, geom, nk=4096) == 0.0


def test_flat_band_piecewise_linear():
    # constant speed: log R is piecewise linear with breakpoints d/2, (l+d)/2, l+d/2
    flat = Dispersion(energy=lambda k: k, velocity=lambda k: np.ones_like(k))
    occ = constant_occupation(0.3)
    geom = TripartiteGeometry(10, 10, 6)
    breaks = [geom.d / 2, (geom.l1 + geom.d) / 2, geom.l1 + geom.d / 2]
    f = lambda t: qp.log_ratio(3, t, occ, geom, dispersion=flat, nk=512)
    segments = [(0, breaks[0]), (breaks[0], breaks[1]), (breaks[1], breaks[2]), (breaks[2], breaks[2] + 5)]
    for a, b in segments:
        ts = np.linspace(a + 1e-6, b - 1e-6, 5)
        vals = np.array([f(t) for t in ts])
        second = np.diff(vals, 2)
        assert np.max(np.abs(second)) < 1e-10
    # continuity across the breakpoints
    for b in breaks:
        assert abs(f(b - 1e-7) - f(b + 1e-7)) < 1e-5


def test_log_ratio_continuity_in_time():
    geom = TripartiteGeometry(8, 8, 4)
    ts = np.linspace(0, 20, 81)
    vals = np.array([qp.log_ratio(3, t, DIMER, geom, nk=4096) for t in ts])
    assert np.max(np.abs(np.diff(vals))) < 0.6  # no jumps at this resolution


def test_figure_curve_peak_location():
    # production-scale curve: peak of |log R_3| between d/2 and d/2 + l
    geom = TripartiteGeometry(800, 800, 800)
    ts = np.linspace(0, 2400, 49)
    vals = np.array([qp.log_ratio(3, t, DIMER, geom, nk=8192) for t in ts])
    tpeak = ts[np.argmax(np.abs(vals))]
    assert 400 < tpeak < 1200
    assert vals.min() < -50  # substantial dip


def test_charged_moment_identities():
    geom = TripartiteGeometry(10, 10, 4)
    occ = DIMER
    t = 6.0
    for alpha in (1, 2, 3, 4):
        at0 = qp.charged_moment_log(alpha, 0.0, t, occ, geom, nk=8192)
        ref = qp.renyi_negativity(alpha, t, occ, geom, nk=8192)
        assert abs(at0 - ref) < 1e-12
        z = qp.charged_moment_log(alpha, 0.8, t, occ, geom, nk=8192)
        zc = qp.charged_moment_log(alpha, -0.8, t, occ, geom, nk=8192)
        assert abs(z - np.conj(zc)) < 1e-12
        zp = qp.charged_moment_log(alpha, 0.8 + 2 * np.pi, t, occ, geom, nk=8192)
        assert abs(z - zp) < 1e-10
        # real positive at lambda = 0
        assert abs(at0.imag) < 1e-12
    with pytest.raises(ValueError):
        qp.charged_moment_log(2, 0.3, t, constant_occupation(0.3), geom)


def test_mixed_indicator_integrates_to_weight():
    # measure of {x in A : partner outside} equals the closed-form weight,
    # by exact interval arithmetic for each signed k
    geom = TripartiteGeometry(9, 9, 5)
    rng = np.random.default_rng(7)
    a1, a2 = geom.continuum_a1(), geom.continuum_a2()

    def measure(shift):
        total = 0.0
        for lo, hi in (a1, a2):
            # {x in [lo,hi] : x - shift not in A}
            inside = overlap_length((lo, hi), (a1[0] + shift, a1[1] + shift)) + overlap_length(
                (lo, hi), (a2[0] + shift, a2[1] + shift)
            )
            total += (hi - lo) - inside
        return total

    for _ in range(300):
        k, t = rng.uniform(-np.pi, np.pi), rng.uniform(0, 30)
        shift = 2 * np.sin(k) * t
        assert abs(measure(shift) - qp.mixed_weight(k, t, geom)) < 1e-10


def test_kernel_mixed_limits():
    geom = TripartiteGeometry(40, 40, 20)
    xs = geom.to_continuum(geom.lattice_sites()[[3, 17, 50]])
    # t = 0: no mixed pairs anywhere
    assert np.max(np.abs(qp.kernel_mixed_profile(xs, 1, 0.0, DIMER, geom))) == 0.0
    # long times, z = 0: stationary-ensemble diagonal; for an asymmetric
    # filling this is the plain average of the mode energies
    occ = constant_occupation(0.3)
    val = qp.kernel_mixed(float(xs[1]), 0, 1e8, occ, geom)
    k = midpoint_kgrid(qp.KERNEL_KGRID)
    gge = np.sum(entanglement_energy(clip_filling(occ(k)))) / len(k)
    assert abs(val - gge) < 1e-12
    with pytest.raises(ValueError):
        qp.kernel_mixed(0.0, 1, 2.0, DIMER, geom)  # gap position


def test_kernel_plus_minus_lightcone():
    geom = TripartiteGeometry(30, 30, 20)
    x2 = float(geom.to_continuum(geom.lattice_sites_a2()[5]))
    x1 = float(geom.to_continuum(geom.lattice_sites_a1()[5]))
    # before d/2 (unit max speed) both kernels vanish
    for z in (0, 1, 3):
        kp, km = qp.kernel_plus_minus(x2, z, geom.d / 2 - 1.0, DIMER, geom)
        assert kp == 0j and km == 0j
        kp, km = qp.kernel_plus_minus(x1, z, geom.d / 2 - 1.0, DIMER, geom)
        assert kp == 0j and km == 0j
    # long times: shared pairs gone
    kp, km = qp.kernel_plus_minus(x2, 1, 1e7, DIMER, geom)
    assert abs(kp) == 0.0
    kp, km = qp.kernel_plus_minus(x1, 1, 1e7, DIMER, geom)
    assert abs(km) == 0.0
    # inside the window the A2 kernel is nonzero
    kp, _ = qp.kernel_plus_minus(x2, 1, (geom.d + geom.l1) / 2.0, DIMER, geom)
    assert abs(kp) > 1e-3
    with pytest.raises(ValueError):
        qp.kernel_plus_minus(0.0, 1, 5.0, DIMER, geom)


def test_quadrature_doubling_stability():
    geom = TripartiteGeometry(6, 6, 4)
    dev = qp.doubling_check(
        lambda nk: qp.renyi_negativity(3, 7.3, DIMER, geom, nk=nk), qp.DEFAULT_KGRID
    )
    assert dev < 1e-8
    dev = qp.doubling_check(
        lambda nk: qp.renyi_entropy(1, 4.1, DIMER, geom, nk=nk), qp.DEFAULT_KGRID
    )
    assert dev < 1e-8
