"""Shared domain objects for the quench laboratory.

Momenta live on [-pi, pi] (radians). Mode fillings n(k) take values in [0, 1].
All scalar building blocks here are pure functions; the small dataclasses are
immutable views of the experiment geometry and the pre-quench state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

FILLING_EPS = 1e-12


class NumericalError(RuntimeError):
    """A numerical procedure failed its accuracy contract (diagnostics in args)."""


def midpoint_kgrid(npoints: int) -> np.ndarray:
    """Uniform midpoint grid on [-pi, pi].

    Midpoints avoid the band edges k = 0, +-pi where the dimer filling hits
    0 and 1 and log((1-n)/n) diverges.
    """
    if npoints < 2:
        raise ValueError("k grid needs at least 2 points")
    h = 2 * np.pi / npoints
    return -np.pi + (np.arange(npoints) + 0.5) * h


def clip_filling(n, eps: float = FILLING_EPS):
    """Clip a filling into [eps, 1-eps] before taking logits.

    The logit diverges on a measure-zero set (band edges); every integrand
    built from n*log-type combinations stays integrable, so clipping only
    regularizes the endpoints.
    """
    return np.clip(n, eps, 1.0 - eps)


def entanglement_energy(n):
    """Single-mode entanglement energy log((1-n)/n) of a filling n.

    Implemented as log(1-n) - log(n) so that the oddness under n <-> 1-n
    holds exactly in floating point.

    Raises ValueError outside the open interval (0, 1); callers clip first
    (see clip_filling).
    """
    n = np.asarray(n, dtype=float)
    if np.any(n <= 0.0) or np.any(n >= 1.0):
        raise ValueError("filling outside (0, 1); clip before calling")
    out = np.log(1.0 - n) - np.log(n)
    return out if out.ndim else float(out)


def binary_entropy(n):
    """Shannon entropy -n log n - (1-n) log(1-n), safe at n = 0, 1."""
    n = np.asarray(n, dtype=float)
    out = np.zeros_like(n)
    m = (n > 0) & (n < 1)
    out[m] = -n[m] * np.log(n[m]) - (1 - n[m]) * np.log(1 - n[m])
    return out if out.ndim else float(out)


def pair_log_moment(alpha: int, n):
    """Log of the alpha-th moment contributed by one transposed entangled pair.

    Parameters
    ----------
    alpha : int
        Moment order, alpha >= 1. Integer orders follow the parity split
        (odd: log(n^a + (1-n)^a), even: 2 log(n^(a/2) + (1-n)^(a/2))).
        alpha=1 is the replica limit of the even branch,
        2 log(sqrt(n) + sqrt(1-n)), which yields the logarithmic negativity.
    n : float or array
        Mode filling(s) in [0, 1].
    """
    if not isinstance(alpha, (int, np.integer)):
        raise ValueError(f"alpha must be an integer (sentinel 1 allowed), got {alpha!r}")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    n = np.asarray(n, dtype=float)
    if alpha == 1:
        out = 2.0 * np.log(np.sqrt(n) + np.sqrt(1.0 - n))
    elif alpha % 2 == 1:
        out = np.log(n ** alpha + (1.0 - n) ** alpha)
    else:
        h = alpha / 2.0
        out = 2.0 * np.log(n ** h + (1.0 - n) ** h)
    return out if out.ndim else float(out)


def renyi_log_moment(alpha: int, n):
    """Log of the plain alpha-th moment n^alpha + (1-n)^alpha of one mode."""
    n = np.asarray(n, dtype=float)
    out = np.log(n ** alpha + (1.0 - n) ** alpha)
    return out if out.ndim else float(out)


def dimer_occupation(k):
    """Mode filling (1 + cos k)/2 of the nearest-neighbor dimer product state."""
    k = np.asarray(k, dtype=float)
    out = 0.5 * (1.0 + np.cos(k))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Dispersion:
    """Single-band dispersion: energy(k) and group velocity(k) on [-pi, pi]."""

    energy: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"

    def check_velocity(self, tol: float = 1e-6, npoints: int = 2001) -> float:
        """Max deviation of velocity from the central finite difference of energy."""
        k = np.linspace(-np.pi + 1e-3, np.pi - 1e-3, npoints)
        h = 1e-5
        fd = (self.energy(k + h) - self.energy(k - h)) / (2 * h)
        dev = float(np.max(np.abs(fd - self.velocity(k))))
        if dev > tol:
            raise ValueError(f"velocity inconsistent with energy derivative: {dev:.3e} > {tol:.1e}")
        return dev


def hopping_dispersion() -> Dispersion:
    """Nearest-neighbor hopping band: energy -cos k, velocity sin k, max speed 1."""
    return Dispersion(energy=lambda k: -np.cos(k), velocity=np.sin, name="hopping")


@dataclass(frozen=True)
class OccupationFunction:
    """Mode filling n(k) defining the quench, with its symmetry class.

    kind "squeezed": pairs (k, -k), n even in k.
    kind "symmetric": pairs (k, k-pi), n(k) + n(k-pi) = 1.
    """

    n: Callable[[np.ndarray], np.ndarray]
    kind: str

    def __post_init__(self):
        if self.kind not in ("squeezed", "symmetric"):
            raise ValueError(f"unknown occupation kind {self.kind!r}")

    def __call__(self, k):
        return self.n(np.asarray(k, dtype=float))

    def check_constraint(self, npoints: int = 1000, tol: float = 1e-12) -> float:
        """Verify the defining symmetry on a midpoint grid; return max violation."""
        k = midpoint_kgrid(npoints)
        if self.kind == "squeezed":
            dev = float(np.max(np.abs(self.n(k) - self.n(-k))))
        else:
            km = np.where(k >= 0, k - np.pi, k + np.pi)
            dev = float(np.max(np.abs(self.n(k) + self.n(km) - 1.0)))
        if dev > tol:
            raise ValueError(f"occupation violates its {self.kind} constraint by {dev:.3e}")
        return dev


def dimer_state() -> OccupationFunction:
    return OccupationFunction(n=dimer_occupation, kind="symmetric")


def constant_occupation(n0: float, kind: str = "squeezed") -> OccupationFunction:
    if kind == "symmetric" and abs(2 * n0 - 1.0) > 1e-15:
        raise ValueError("a constant symmetric-kind filling must be 1/2")
    return OccupationFunction(n=lambda k: np.full_like(np.asarray(k, dtype=float), n0), kind=kind)


@dataclass(frozen=True)
class PhaseFunction:
    """Momentum-dependent phase of the pair coherence; cancels from all scalars."""

    phi: Callable[[np.ndarray], np.ndarray] = field(default=lambda k: np.zeros_like(np.asarray(k, dtype=float)))

    def __call__(self, k):
        return self.phi(np.asarray(k, dtype=float))


@dataclass(frozen=True)
class TripartiteGeometry:
    """Two intervals of l1 and l2 sites separated by a gap of d sites.

    Lattice view: A1 = {0 .. l1-1}, A2 = {l1+d .. l1+d+l2-1}.
    Centered continuum view: A1 = [-d/2 - l1, -d/2], A2 = [d/2, d/2 + l2],
    related to the lattice view by the affine map x = s + 1/2 - l1 - d/2
    (lattice cells map to their continuum centers).
    """

    l1: int
    l2: int
    d: int

    def __post_init__(self):
        for name in ("l1", "l2", "d"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")

    @property
    def equal_intervals(self) -> bool:
        return self.l1 == self.l2

    def require_equal_intervals(self):
        if not self.equal_intervals:
            raise ValueError(
                f"operation defined for equal intervals only (l1={self.l1}, l2={self.l2})"
            )

    @property
    def total_sites(self) -> int:
        return self.l1 + self.l2

    @property
    def span(self) -> int:
        """Number of chain sites from the left end of A1 to the right end of A2."""
        return self.l1 + self.d + self.l2

    def lattice_sites_a1(self) -> np.ndarray:
        return np.arange(self.l1)

    def lattice_sites_a2(self) -> np.ndarray:
        return np.arange(self.l1 + self.d, self.l1 + self.d + self.l2)

    def lattice_sites(self) -> np.ndarray:
        return np.concatenate([self.lattice_sites_a1(), self.lattice_sites_a2()])

    def to_continuum(self, site):
        """Map lattice site index -> centered continuum coordinate (cell center)."""
        return np.asarray(site, dtype=float) + 0.5 - self.l1 - self.d / 2.0

    def to_site(self, x):
        """Inverse of to_continuum, rounding to the nearest lattice cell."""
        s = np.rint(np.asarray(x, dtype=float) - 0.5 + self.l1 + self.d / 2.0)
        return s.astype(int) if s.ndim else int(s)

    def continuum_a1(self) -> tuple[float, float]:
        return (-self.d / 2.0 - self.l1, -self.d / 2.0)

    def continuum_a2(self) -> tuple[float, float]:
        return (self.d / 2.0, self.d / 2.0 + self.l2)

    def in_a1(self, x) -> np.ndarray:
        lo, hi = self.continuum_a1()
        x = np.asarray(x, dtype=float)
        return (x >= lo) & (x < hi)

    def in_a2(self, x) -> np.ndarray:
        lo, hi = self.continuum_a2()
        x = np.asarray(x, dtype=float)
        return (x >= lo) & (x < hi)

    def in_a(self, x) -> np.ndarray:
        return self.in_a1(x) | self.in_a2(x)
