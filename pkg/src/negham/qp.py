"""Quasiparticle predictor for the tripartite quench.

Everything here is built from ballistic pair counting: a pair emitted at x0
has its right mover at x0 + |v_k| t and its left mover at x0 - |v_k| t. Pairs
shared between an interval and the complement drive the entanglement
Hamiltonian; pairs shared between the two intervals drive the negativity
Hamiltonian. Weights are continuum lengths (sites), times are real.

Scalar observables integrate over the full momentum range with measure
dk/2pi on a uniform midpoint grid; interval-resolved kernels restrict to
k > 0 with measure dk/4pi (one entry per pair, the per-member 1/2 absorbed).
"""

from __future__ import annotations

import numpy as np

from .core import (
    Dispersion,
    OccupationFunction,
    TripartiteGeometry,
    binary_entropy,
    clip_filling,
    entanglement_energy,
    hopping_dispersion,
    midpoint_kgrid,
    pair_log_moment,
    renyi_log_moment,
)

DEFAULT_KGRID = 65536
KERNEL_KGRID = 4096


def _vt(k, t, dispersion):
    return np.abs(dispersion.velocity(np.asarray(k, dtype=float))) * t


def pure_pair_bracket(vt, ell, d):
    """max(vt, d/2) - 2 max(vt, (l+d)/2) + max(vt, l+d/2).

    Equals half the shared-pair weight between the two intervals; vanishes
    for vt <= d/2 and vt >= l + d/2.
    """
    vt = np.asarray(vt, dtype=float)
    out = (
        np.maximum(vt, d / 2.0)
        - 2.0 * np.maximum(vt, (ell + d) / 2.0)
        + np.maximum(vt, ell + d / 2.0)
    )
    return out if out.ndim else float(out)


def pure_weight(k, t, geometry: TripartiteGeometry, dispersion: Dispersion | None = None):
    """Length of right-mover positions whose pair couples the two intervals.

    Intersection form: |[d/2, d/2+l] cap [-d/2-l+2vt, -d/2+2vt]| inside the
    window d/2 < vt < l + d/2, zero outside. Identically twice
    pure_pair_bracket(vt, l, d). Equal intervals only.
    """
    geometry.require_equal_intervals()
    if np.any(np.asarray(t) < 0):
        raise ValueError("t must be >= 0")
    dispersion = dispersion or hopping_dispersion()
    ell, d = geometry.l1, geometry.d
    vt = _vt(k, t, dispersion)
    lo = np.maximum(d / 2.0, -ell - d / 2.0 + 2.0 * vt)
    hi = np.minimum(d / 2.0 + ell, -d / 2.0 + 2.0 * vt)
    window = (vt > d / 2.0) & (vt < ell + d / 2.0)
    out = np.where(window, np.maximum(hi - lo, 0.0), 0.0)
    return out if out.ndim else float(out)


def mixed_weight(k, t, geometry: TripartiteGeometry, dispersion: Dispersion | None = None):
    """Weight of pairs shared between A1 u A2 and the complement.

    Per interval pair: 2 min(2 vt, l) from each interval against its own
    complement, minus the pairs the intervals share with each other.
    Saturates to l1 + l2 = 2l exactly once vt >= max(l/2, l + d/2).
    """
    geometry.require_equal_intervals()
    dispersion = dispersion or hopping_dispersion()
    ell = geometry.l1
    vt = _vt(k, t, dispersion)
    out = 2.0 * np.minimum(2.0 * vt, ell) - 2.0 * pure_pair_bracket(vt, ell, geometry.d)
    return out if out.ndim else float(out)


def mixed_weight_split(k, t, geometry: TripartiteGeometry, dispersion: Dispersion | None = None):
    """Per-interval mixed weights (w_1, w_2) with w_1 + w_2 = mixed_weight.

    Defined for equal intervals only, where symmetry fixes the even split;
    unequal intervals raise rather than extrapolate.
    """
    w = mixed_weight(k, t, geometry, dispersion)
    return 0.5 * w, 0.5 * w


def _grid(occupation, geometry, dispersion, nk):
    k = midpoint_kgrid(nk)
    n = clip_filling(occupation(k))
    vt1 = np.abs(dispersion.velocity(k))
    return k, n, vt1


def renyi_entropy(
    alpha: int,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = DEFAULT_KGRID,
) -> float:
    """Renyi entropy S_alpha(t) of A1 u A2 (von Neumann for alpha = 1).

    S_alpha = 1/(1-alpha) int dk/2pi w_m(k,t) log(n^alpha + (1-n)^alpha).
    """
    if not isinstance(alpha, (int, np.integer)) or alpha < 1:
        raise ValueError("alpha must be an integer >= 1")
    dispersion = dispersion or hopping_dispersion()
    k, n, _ = _grid(occupation, geometry, dispersion, nk)
    wm = mixed_weight(k, t, geometry, dispersion)
    if alpha == 1:
        dens = binary_entropy(n)
        return float(np.sum(wm * dens) / nk)
    return float(np.sum(wm * renyi_log_moment(alpha, n)) / (nk * (1 - alpha)))


def renyi_negativity(
    alpha: int,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = DEFAULT_KGRID,
) -> float:
    """Renyi negativity E_alpha(t); alpha = 1 gives the logarithmic negativity.

    E_alpha = int dk/2pi bracket(vt) s(alpha, n) + (1 - alpha) S_alpha(t)
    with the even/odd pair moment s = pair_log_moment. The bracket term is
    the shared-pair (pure) contribution, the entropy term the mixed one.
    """
    dispersion = dispersion or hopping_dispersion()
    pure = log_ratio(alpha, t, occupation, geometry, dispersion, nk)
    if alpha == 1:
        return pure
    return pure + (1 - alpha) * renyi_entropy(alpha, t, occupation, geometry, dispersion, nk)


def log_ratio(
    alpha: int,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = DEFAULT_KGRID,
) -> float:
    """log R_alpha(t) = E_alpha + (alpha - 1) S_alpha: the pure-pair term alone.

    Identically zero for alpha = 2 (the even pair moment vanishes).
    """
    geometry.require_equal_intervals()
    dispersion = dispersion or hopping_dispersion()
    k, n, vt1 = _grid(occupation, geometry, dispersion, nk)
    br = pure_pair_bracket(vt1 * t, geometry.l1, geometry.d)
    return float(np.sum(br * pair_log_moment(alpha, n)) / nk)


def charged_moment_log(
    alpha: int,
    lam: float,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = DEFAULT_KGRID,
) -> complex:
    """Log of the imbalance-resolved moment N_alpha(lambda, t).

    Mixed pairs contribute e^{-i lambda} on A1 and e^{+i lambda} on A2 with
    weight w_m/2 each (equal intervals); shared pairs carry the dressed pair
    moment with +lambda on the A2 member and -lambda on the A1 member.
    At lambda = 0 this reduces exactly to E_alpha. Symmetric states only.
    """
    if occupation.kind != "symmetric":
        raise ValueError("charged moments are defined for symmetric-kind occupations")
    geometry.require_equal_intervals()
    if not isinstance(alpha, (int, np.integer)) or alpha < 1:
        raise ValueError("alpha must be an integer >= 1")
    dispersion = dispersion or hopping_dispersion()
    k, n, vt1 = _grid(occupation, geometry, dispersion, nk)
    wm = mixed_weight(k, t, geometry, dispersion)
    br = pure_pair_bracket(vt1 * t, geometry.l1, geometry.d)
    ep, em = np.exp(1j * lam), np.exp(-1j * lam)
    na, nb = n ** alpha, (1.0 - n) ** alpha
    mixed = 0.5 * wm * (np.log(em * na + nb) + np.log(ep * na + nb))
    if alpha % 2 == 1 and alpha != 1:
        g = np.log(ep * na + em * nb)
    else:
        h = alpha / 2.0
        g = 2.0 * np.log(ep * n ** h + em * (1.0 - n) ** h)
    return complex(np.sum(mixed + br * g) / nk)


# ---------------------------------------------------------------------------
# real-space kernels
# ---------------------------------------------------------------------------

def mixed_indicator(x, k, t, geometry: TripartiteGeometry, dispersion: Dispersion | None = None):
    """1 if the mode (x, k) survives the trace over the complement.

    A mode at continuum position x with signed momentum k came from
    x - v_k t, so its partner sits at x - 2 v_k t; the mode contributes to
    the mixed part iff that partner lies outside A1 u A2. Broadcasts over
    x[:, None] against k[None, :].
    """
    dispersion = dispersion or hopping_dispersion()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.atleast_1d(np.asarray(k, dtype=float))
    partner = x[:, None] - 2.0 * dispersion.velocity(k)[None, :] * t
    return geometry.in_a(x)[:, None] & ~geometry.in_a(partner)


def pure_indicator(x, k, t, geometry: TripartiteGeometry, dispersion: Dispersion | None = None):
    """1 if a right mover (k > 0) at x belongs to a pair shared by A1 and A2.

    The window is A2 intersected with A1 shifted forward by 2|v_k|t.
    Broadcasts like mixed_indicator.
    """
    geometry.require_equal_intervals()
    dispersion = dispersion or hopping_dispersion()
    ell, d = geometry.l1, geometry.d
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vt = _vt(np.atleast_1d(k), t, dispersion)
    xx = x[:, None]
    lo = np.maximum(d / 2.0, -ell - d / 2.0 + 2.0 * vt)[None, :]
    hi = np.minimum(d / 2.0 + ell, -d / 2.0 + 2.0 * vt)[None, :]
    return (xx >= lo) & (xx < hi)


def kernel_mixed_profile(
    xs,
    z: int,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = KERNEL_KGRID,
) -> np.ndarray:
    """Hopping kernel of the mixed (entanglement-Hamiltonian) part at range z.

    K_m(x, z, t) = int dk/2pi chi_m(x, k, t) log((1-n)/n) e^{i k z},
    evaluated for every continuum position in xs.
    """
    dispersion = dispersion or hopping_dispersion()
    k = midpoint_kgrid(nk)
    eta = entanglement_energy(clip_filling(occupation(k)))
    chi = mixed_indicator(xs, k, t, geometry, dispersion)
    return (chi * (eta * np.exp(1j * k * z))[None, :]).sum(axis=1) / nk


def kernel_mixed(x, z, t, occupation, geometry, dispersion=None, nk=KERNEL_KGRID) -> complex:
    """Scalar kernel_mixed_profile; x must lie in A1 u A2."""
    if not bool(geometry.in_a(x)):
        raise ValueError(f"x = {x} outside both intervals")
    return complex(kernel_mixed_profile([x], z, t, occupation, geometry, dispersion, nk)[0])


def kernel_plus_profile(
    xs,
    z: int,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = KERNEL_KGRID,
) -> np.ndarray:
    """Shared-pair hopping kernel on the second interval (right movers).

    K_plus(x, z, t) = int_{k>0} dk/4pi chi_p(x, k, t) e^{i k z} log((1-n)/n).
    """
    dispersion = dispersion or hopping_dispersion()
    k = midpoint_kgrid(nk)
    pos = k > 0
    k = k[pos]
    eta = entanglement_energy(clip_filling(occupation(k)))
    chi = pure_indicator(xs, k, t, geometry, dispersion)
    return (chi * (eta * np.exp(1j * k * z))[None, :]).sum(axis=1) / (2.0 * nk)


def kernel_minus_profile(
    xs,
    z: int,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = KERNEL_KGRID,
) -> np.ndarray:
    """Shared-pair hopping kernel on the first interval (left movers).

    The left mover at x has its partner at x + 2|v_k|t, so the window is the
    right-mover one shifted back. Squeezed pairs carry momentum -k
    (phase e^{-ikz}); symmetric pairs carry k - pi (phase (-1)^z e^{ikz}).
    """
    dispersion = dispersion or hopping_dispersion()
    k = midpoint_kgrid(nk)
    pos = k > 0
    k = k[pos]
    eta = entanglement_energy(clip_filling(occupation(k)))
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    vt = _vt(k, t, dispersion)
    ell, d = geometry.l1, geometry.d
    xx = xs[:, None] + 2.0 * vt[None, :]
    lo = np.maximum(d / 2.0, -ell - d / 2.0 + 2.0 * vt)[None, :]
    hi = np.minimum(d / 2.0 + ell, -d / 2.0 + 2.0 * vt)[None, :]
    chi = (xx >= lo) & (xx < hi)
    if occupation.kind == "symmetric":
        phase = (-1.0) ** z * np.exp(1j * k * z)
    else:
        phase = np.exp(-1j * k * z)
    return (chi * (eta * phase)[None, :]).sum(axis=1) / (2.0 * nk)


def kernel_plus_minus(
    x,
    z: int,
    t: float,
    occupation: OccupationFunction,
    geometry: TripartiteGeometry,
    dispersion: Dispersion | None = None,
    nk: int = KERNEL_KGRID,
) -> tuple[complex, complex]:
    """(K_plus, K_minus) at continuum position x: the A2 slot is populated when
    x is in A2, the A1 slot when x is in A1, the other is zero."""
    in1, in2 = bool(geometry.in_a1(x)), bool(geometry.in_a2(x))
    if not (in1 or in2):
        raise ValueError(f"x = {x} outside both intervals")
    kp = complex(kernel_plus_profile([x], z, t, occupation, geometry, dispersion, nk)[0]) if in2 else 0j
    km = complex(kernel_minus_profile([x], z, t, occupation, geometry, dispersion, nk)[0]) if in1 else 0j
    return kp, km


def doubling_check(fn, nk: int, tol: float = 1e-8) -> float:
    """Evaluate fn(nk) and fn(2*nk); return |difference|, raise past tol."""
    from .core import NumericalError

    a, b = fn(nk), fn(2 * nk)
    dev = abs(a - b)
    if dev > tol:
        raise NumericalError(
            f"quadrature not converged: |f({nk}) - f({2*nk})| = {dev:.3e} > {tol:.1e}"
        )
    return dev
