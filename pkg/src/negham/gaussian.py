"""Exact lattice engine for the dimer quench.

The pipeline is: time-dependent correlation matrix -> restriction to the two
intervals -> entanglement Hamiltonian (Hermitian log) and, after the
covariance-level partial time reversal, the negativity Hamiltonian (general
complex log), its real/imaginary decomposition, spectra and moments.

Two evaluation routes coexist for the moments:

* spectrum formulas summing over single-particle eigenvalues h = h_R + i h_I;
  these assume the real and imaginary parts commute and are accurate in the
  ballistic regime;
* an exact determinant calculus in the "imbalance frame" (particle-hole
  rotation on the first interval, under which the transposed state conserves
  particle number), valid at any size and used for oracle-grade comparisons.

Site-resolved matrices use the doubled layout with 2x2 site blocks
[[<c_i^dag c_j>, <c_i c_j>], [<c_i^dag c_j^dag>, <c_i c_j^dag>]], i.e. the
particle slot of site pair (i, j) is entry (2i, 2j).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import jv

from .core import NumericalError, TripartiteGeometry

DEFAULT_CUTOFF = 1e-8
EIG_RESIDUAL_TOL = 1e-8
EIG_COND_LIMIT = 1e12


@dataclass(frozen=True)
class CorrelationMatrix:
    """Two-point function <c_x^dag c_x'> on a labelled site set."""

    entries: np.ndarray
    sites: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=complex))
        object.__setattr__(self, "sites", np.asarray(self.sites, dtype=int))
        if self.entries.shape != (len(self.sites), len(self.sites)):
            raise ValueError("entries shape does not match site labels")

    @property
    def nsites(self) -> int:
        return len(self.sites)

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


@dataclass(frozen=True)
class BdGMatrix:
    """Particle-hole doubled covariance; 2x2 site blocks, particle slot (2i, 2j)."""

    entries: np.ndarray
    sites: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=complex))
        object.__setattr__(self, "sites", np.asarray(self.sites, dtype=int))
        if self.entries.shape != (2 * len(self.sites), 2 * len(self.sites)):
            raise ValueError("doubled entries shape does not match site labels")

    @property
    def nsites(self) -> int:
        return len(self.sites)

    def particle_block(self) -> np.ndarray:
        return self.entries[0::2, 0::2]

    def hole_block(self) -> np.ndarray:
        return self.entries[1::2, 1::2]

    def pairing_blocks(self) -> tuple[np.ndarray, np.ndarray]:
        """(cc slot, c^dag c^dag slot)."""
        return self.entries[0::2, 1::2], self.entries[1::2, 0::2]


@dataclass(frozen=True)
class OperatorMatrix:
    """Quadratic-operator matrix (Peschel-log output), tagged by its role."""

    entries: np.ndarray
    label: str

    LABELS = ("K", "K_bdg", "N_full", "N_real", "N_imag", "N_diag", "N_offdiag")

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=complex))
        if self.label not in self.LABELS:
            raise ValueError(f"unknown operator label {self.label!r}")

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))


@dataclass(frozen=True)
class ModeSpectrum:
    """Single-particle eigenvalues h = h_R + i h_I of a quadratic operator."""

    eigenvalues: np.ndarray
    reduced: bool = False

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", np.asarray(self.eigenvalues, dtype=complex))


@dataclass(frozen=True)
class KernelSample:
    """One kernel value at continuum position x and hopping distance z."""

    x: float
    z: int
    value: complex


# ---------------------------------------------------------------------------
# correlation matrices
# ---------------------------------------------------------------------------

def correlation_dimer(t: float, sites) -> CorrelationMatrix:
    """Exact correlation matrix of the dimer quench under the hopping chain.

    Dimers sit on site pairs (2i, 2i+1). For t > 0,

        C_{x,x'}(t) = C^inf_{x,x'} + i (x-x')/(4t) e^{-i pi (x+x')/2} J_{x-x'}(2t)

    with C^inf = 1/2 delta + 1/4 (nearest neighbors). t = 0 returns the
    dimer-state correlations directly (1/2 inside each dimer block).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    x = np.asarray(sites, dtype=int)
    dx = x[:, None] - x[None, :]
    if t == 0:
        ent = np.where((dx == 0) | (x[:, None] // 2 == x[None, :] // 2), 0.5, 0.0)
        return CorrelationMatrix(ent.astype(complex), x)
    s = x[:, None] + x[None, :]
    cinf = 0.5 * (dx == 0) + 0.25 * (np.abs(dx) == 1)
    span = int(np.max(x) - np.min(x))
    orders = np.arange(-span, span + 1)
    bess = jv(orders, 2.0 * t)
    ent = cinf + 1j * dx / (4.0 * t) * np.exp(-0.5j * np.pi * s) * bess[dx + span]
    return CorrelationMatrix(ent, x)


def restrict(C: CorrelationMatrix, geometry: TripartiteGeometry) -> CorrelationMatrix:
    """Rows and columns restricted to A1 u A2, first interval first."""
    wanted = geometry.lattice_sites()
    pos = {s: i for i, s in enumerate(C.sites.tolist())}
    try:
        idx = np.array([pos[s] for s in wanted.tolist()])
    except KeyError as err:
        raise IndexError(f"site {err.args[0]} not present in the correlation matrix") from None
    return CorrelationMatrix(C.entries[np.ix_(idx, idx)], wanted)


# ---------------------------------------------------------------------------
# Hermitian route: entanglement Hamiltonian
# ---------------------------------------------------------------------------

def _clip_spectrum_real(nu: np.ndarray, cutoff: float) -> np.ndarray:
    return np.clip(nu, cutoff, 1.0 - cutoff)


def entanglement_hamiltonian(
    C: CorrelationMatrix, cutoff: float = DEFAULT_CUTOFF, pure: str = "clip"
) -> OperatorMatrix:
    """Hermitian log K = log[(1 - C)/C] by eigendecomposition.

    Eigenvalues within cutoff of 0 or 1 belong to (almost) pure modes that
    carry no entanglement. pure="clip" pins them at the cutoff (the matrix
    then inverts back to the correlation data, with single-mode energies
    capped at log(1/cutoff)); pure="drop" removes their contribution from
    the reassembled matrix altogether (the low-energy truncation used for
    real-space kernel profiles, where the capped energies would otherwise
    swamp the entangled-sector structure).
    """
    if pure not in ("clip", "drop"):
        raise ValueError("pure must be 'clip' or 'drop'")
    M = C.entries
    nu, W = np.linalg.eigh(M)
    resid = np.max(np.abs(M @ W - W * nu))
    if resid > EIG_RESIDUAL_TOL * max(1.0, np.linalg.norm(M)):
        raise NumericalError(f"eigendecomposition residual {resid:.3e}")
    outside = (nu < cutoff) | (nu > 1.0 - cutoff)
    nu = _clip_spectrum_real(nu, cutoff)
    h = np.log((1.0 - nu) / nu)
    if pure == "drop":
        h[outside] = 0.0
    K = (W * h) @ W.conj().T
    return OperatorMatrix(K, "K")


def renyi_entropy_exact(C: CorrelationMatrix, alpha: int, eps: float = 1e-14) -> float:
    """Renyi entropy from the restricted correlation spectrum."""
    nu = np.linalg.eigvalsh(C.entries)
    nu = np.clip(nu, eps, 1.0 - eps)
    if alpha == 1:
        return float(np.sum(-nu * np.log(nu) - (1 - nu) * np.log(1 - nu)))
    return float(np.sum(np.log(nu ** alpha + (1 - nu) ** alpha)) / (1 - alpha))


# ---------------------------------------------------------------------------
# covariance-level partial time reversal and the negativity Hamiltonian
# ---------------------------------------------------------------------------

def bdg_embed(C: CorrelationMatrix) -> BdGMatrix:
    """Double a plain hopping correlation matrix; pairing slots are zero."""
    n = C.nsites
    G = np.zeros((2 * n, 2 * n), dtype=complex)
    G[0::2, 0::2] = C.entries
    G[1::2, 1::2] = np.eye(n) - C.entries.T
    return BdGMatrix(G, C.sites)


def _reverse_first_interval_blocks(G: np.ndarray, n1: int) -> np.ndarray:
    """Covariance-level partial time reversal on a doubled matrix.

    Transposes the first-interval diagonal sector (site transpose within the
    particle and hole slots) and maps cross-interval site blocks through i
    times a particle-hole swap acting on their A2-side index, so hopping
    entries move into the pairing slots. Validated against the dense
    Majorana oracle.
    """
    G = G.copy()
    r1 = slice(0, 2 * n1)
    r2 = slice(2 * n1, None)
    # A1 diagonal sector: site transpose within each particle/hole slot
    blk = G[r1, r1].copy()
    out = blk.copy()
    out[0::2, 0::2] = blk[0::2, 0::2].T
    out[1::2, 1::2] = blk[1::2, 1::2].T
    out[0::2, 1::2] = blk[0::2, 1::2].T
    out[1::2, 0::2] = blk[1::2, 0::2].T
    G[r1, r1] = out
    # (A1, A2) blocks: swap the two columns of each site block, times i
    blk = G[r1, r2].copy()
    swapped = blk.copy()
    swapped[:, 0::2], swapped[:, 1::2] = blk[:, 1::2], blk[:, 0::2]
    G[r1, r2] = 1j * swapped
    # (A2, A1) blocks: swap the two rows of each site block, times i
    blk = G[r2, r1].copy()
    swapped = blk.copy()
    swapped[0::2, :], swapped[1::2, :] = blk[1::2, :], blk[0::2, :]
    G[r2, r1] = 1j * swapped
    return G


def fermionic_partial_transpose(C: CorrelationMatrix, geometry: TripartiteGeometry) -> BdGMatrix:
    """Covariance of the partially time-reversed state, in doubled form.

    The first-interval diagonal sector is transposed and the cross-interval
    site blocks pick up i times a particle-hole swap (hopping entries move
    to the pairing slots); the second-interval sector is untouched. Valid
    for states without pairing (the dimer quench); pairing input is
    rejected.
    """
    if isinstance(C, BdGMatrix):
        p, q = C.pairing_blocks()
        if max(np.max(np.abs(p)), np.max(np.abs(q))) > 1e-12:
            raise ValueError("input state has pairing correlations; not supported")
        C = CorrelationMatrix(C.particle_block(), C.sites)
    if C.nsites != geometry.total_sites:
        raise ValueError("correlation matrix is not restricted to the two intervals")
    G = _reverse_first_interval_blocks(bdg_embed(C).entries, geometry.l1)
    return BdGMatrix(G, C.sites)


def _clip_spectrum_radial(nu: np.ndarray, cutoff: float) -> np.ndarray:
    """Clip eigenvalues closer than cutoff to 0 or 1 onto the real values
    cutoff and 1 - cutoff.

    Eigenvalues that deep belong to (almost) pure modes whose contribution
    to every moment is below e^{-alpha log(1/cutoff)}; their computed phases
    are solver noise and, if kept (radial clipping), inject order-one junk
    into the anti-Hermitian part of the log. Landing on the real axis keeps
    the imaginary sector clean.
    """
    nu = nu.astype(complex).copy()
    nu[np.abs(nu) < cutoff] = cutoff
    nu[np.abs(1.0 - nu) < cutoff] = 1.0 - cutoff
    return nu


def nambu_form(Gamma: BdGMatrix) -> np.ndarray:
    """Proper Nambu covariance from the slot storage layout.

    The stored site blocks [[<c^dag c>, <c c>], [<c^dag c^dag>, <c c^dag>]]
    list the correlators but are not a consistent <V^dag (x) V> matrix; the
    two pairing slot planes must be swapped (internal partial transpose) so
    that rows carry a fixed operator family. Only on this form does the
    matrix log give the quadratic-operator representation (the stored and
    Nambu forms coincide when the pairing slots vanish).
    """
    G = Gamma.entries.copy()
    G[0::2, 1::2], G[1::2, 0::2] = Gamma.entries[1::2, 0::2], Gamma.entries[0::2, 1::2]
    return G


def negativity_hamiltonian(
    Gamma: BdGMatrix, cutoff: float = DEFAULT_CUTOFF, pure: str = "clip"
) -> OperatorMatrix:
    """General complex log N = log[(1 - Gamma)/Gamma] of the twisted covariance.

    Operates on the Nambu form of Gamma (see nambu_form), so the result is
    the doubled matrix of the quadratic negativity Hamiltonian. Diagonalizes
    with a general solver, verifies per-eigenpair residuals and the
    conditioning of the eigenvector matrix, regularizes the spectrum around
    0 and 1 (pure="clip" pins to the cutoff, pure="drop" removes those
    modes from the reassembly; see entanglement_hamiltonian), maps through
    the principal log and reassembles.
    """
    if pure not in ("clip", "drop"):
        raise ValueError("pure must be 'clip' or 'drop'")
    M = nambu_form(Gamma)
    nu, V = np.linalg.eig(M)
    scale = max(1.0, float(np.linalg.norm(M)))
    resid = float(np.max(np.linalg.norm(M @ V - V * nu, axis=0)))
    if resid > EIG_RESIDUAL_TOL * scale:
        raise NumericalError(f"eigenpair residual {resid:.3e} exceeds {EIG_RESIDUAL_TOL:.1e} * |Gamma|")
    cond = np.linalg.cond(V)
    if cond > EIG_COND_LIMIT:
        raise NumericalError(f"eigenvector matrix condition number {cond:.3e} > {EIG_COND_LIMIT:.1e}")
    outside = (np.abs(nu) < cutoff) | (np.abs(1.0 - nu) < cutoff)
    nu = _clip_spectrum_radial(nu, cutoff)
    h = np.log((1.0 - nu) / nu)  # principal branch; h_I in (-pi, pi]
    if pure == "drop":
        h[outside] = 0.0
    N = (V * h) @ np.linalg.inv(V)
    return OperatorMatrix(N, "N_full")


def embed_entanglement_bdg(K: OperatorMatrix) -> OperatorMatrix:
    """Double an N x N entanglement Hamiltonian: particle block K, hole block -K^T."""
    if K.label != "K":
        raise ValueError("expected an entanglement Hamiltonian")
    n = K.entries.shape[0]
    G = np.zeros((2 * n, 2 * n), dtype=complex)
    G[0::2, 0::2] = K.entries
    G[1::2, 1::2] = -K.entries.T
    return OperatorMatrix(G, "K_bdg")


def mixed_reference_bdg(K: OperatorMatrix, geometry: TripartiteGeometry) -> OperatorMatrix:
    """Doubled K as it appears inside the negativity Hamiltonian.

    The partial time reversal relabels the first-interval sector by a site
    transpose and moves cross-interval hopping into pairing, so the mixed
    part of the negativity Hamiltonian is K with its A1 diagonal sector
    transposed and the cross hopping slots emptied. This Hermitian doubled
    matrix is the reference to subtract when isolating the shared-pair
    (diagonal) part; with the plain embedding the subtraction leaves O(1)
    first-interval artifacts.
    """
    if K.label != "K":
        raise ValueError("expected an entanglement Hamiltonian")
    n1 = geometry.l1
    M = K.entries.copy()
    M[:n1, :n1] = M[:n1, :n1].T
    M[:n1, n1:] = 0.0
    M[n1:, :n1] = 0.0
    G = np.zeros((2 * len(M), 2 * len(M)), dtype=complex)
    G[0::2, 0::2] = M
    G[1::2, 1::2] = -M.T
    return OperatorMatrix(G, "K_bdg")


def decompose(N_full: OperatorMatrix, K_bdg: OperatorMatrix):
    """Split N into Hermitian/anti-Hermitian parts and subtract K.

    Returns (N_real, N_imag, N_diag, N_offdiag) with N_real = (N + N^dag)/2,
    N_imag = (N - N^dag)/(2i), N_diag = N_real - K, N_offdiag = i N_imag.
    """
    if N_full.entries.shape != K_bdg.entries.shape:
        raise ValueError(
            f"shape mismatch: N {N_full.entries.shape} vs K {K_bdg.entries.shape}"
        )
    N = N_full.entries
    nr = (N + N.conj().T) / 2.0
    ni = (N - N.conj().T) / 2.0j
    return (
        OperatorMatrix(nr, "N_real"),
        OperatorMatrix(ni, "N_imag"),
        OperatorMatrix(nr - K_bdg.entries, "N_diag"),
        OperatorMatrix(1j * ni, "N_offdiag"),
    )


def mode_spectrum(op: OperatorMatrix) -> ModeSpectrum:
    return ModeSpectrum(np.linalg.eigvals(op.entries), reduced=False)


def particle_hole_reduce(spectrum: ModeSpectrum, zero_tol: float = 1e-10) -> ModeSpectrum:
    """Keep one representative per +-h pair of a doubled spectrum.

    Rule: keep h with Re h > 0. Purely imaginary eigenvalues are their own
    negation partners up to conjugation, so each value (grouped by Im h,
    including exact zeros) keeps half its copies; this leaves the reduced
    set closed under conjugation, which the odd moments rely on.
    Deterministic and basis independent.
    """
    if spectrum.reduced:
        return spectrum
    h = spectrum.eigenvalues
    if len(h) % 2:
        raise ValueError("doubled spectrum must have even length")
    keep = [h[h.real > zero_tol]]
    border = h[np.abs(h.real) <= zero_tol]
    border = border[np.lexsort((border.real, border.imag))]
    i = 0
    while i < len(border):
        j = i
        while j < len(border) and abs(border[j].imag - border[i].imag) <= zero_tol:
            j += 1
        if (j - i) % 2:
            raise NumericalError(
                f"odd multiplicity {j - i} for borderline eigenvalue {border[i]:.3e}"
            )
        keep.append(border[i : i + (j - i) // 2])
        i = j
    kept = np.concatenate(keep)
    if len(kept) != len(h) // 2:
        raise NumericalError(
            f"particle-hole reduction kept {len(kept)} of {len(h)} eigenvalues; "
            "spectrum is not +-h symmetric"
        )
    return ModeSpectrum(kept, reduced=True)


def tilde_spectrum(C: CorrelationMatrix, geometry: TripartiteGeometry, cutoff: float = DEFAULT_CUTOFF) -> ModeSpectrum:
    """Reduced negativity-Hamiltonian spectrum straight from the imbalance frame.

    The N x N log of the imbalance-frame covariance carries exactly one
    eigenvalue per physical mode (the doubled matrix adds the -h mirrors),
    so no reduction heuristics are needed; the set is conjugate closed by
    construction.
    """
    nu = np.linalg.eigvals(imbalance_frame(C, geometry))
    nu = _clip_spectrum_radial(nu, cutoff)
    return ModeSpectrum(np.log((1.0 - nu) / nu), reduced=True)


def _log1pexp(z: np.ndarray) -> np.ndarray:
    """log(1 + e^z) for complex z, overflow safe."""
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    big = z.real > 0
    out[~big] = np.log1p(np.exp(z[~big]))
    out[big] = z[big] + np.log1p(np.exp(-z[big]))
    return out


def renyi_negativity_exact(spectrum: ModeSpectrum, alpha: int, imag_tol: float = 1e-8) -> float:
    """Moments from the single-particle eigenvalues of the negativity Hamiltonian.

    Even alpha:  sum_k [log(1 + e^{-alpha h_R}) - alpha log|1 + e^{-h}|]
    Odd alpha:   Re sum_k [log(1 + e^{-alpha h_R - i h_I}) - alpha log(1 + e^{-h})]
    alpha = 1:   sum_k [log(1 + e^{-h_R}) - log|1 + e^{-h}|]

    Assumes commuting real and imaginary parts (ballistic regime); see
    renyi_negativity_determinant for the exact-at-any-size evaluation.
    """
    if not spectrum.reduced:
        raise ValueError("spectrum must be particle-hole reduced")
    if not isinstance(alpha, (int, np.integer)) or alpha < 1:
        raise ValueError("alpha must be an integer >= 1")
    h = spectrum.eigenvalues
    norm = _log1pexp(-h)
    if alpha == 1 or alpha % 2 == 0:
        total = np.sum(_log1pexp(-alpha * h.real)) - alpha * np.sum(norm.real)
        return float(np.real(total))
    total = np.sum(_log1pexp(-alpha * h.real - 1j * h.imag)) - alpha * np.sum(norm)
    if abs(total.imag) > imag_tol * max(1.0, abs(total.real)):
        raise NumericalError(
            f"odd moment has imaginary residue {total.imag:.3e}; conjugate pairing violated"
        )
    return float(total.real)


# ---------------------------------------------------------------------------
# exact determinant calculus in the imbalance frame
# ---------------------------------------------------------------------------

def imbalance_frame(C: CorrelationMatrix, geometry: TripartiteGeometry) -> np.ndarray:
    """N x N covariance of the transposed state after particle-hole rotating A1.

    The time-reversed state conserves the particle imbalance, so with
    c_i -> c_i^dag on the first interval it is an ordinary number-conserving
    Gaussian; its correlation matrix is
    [[1 - C_11, i C_12], [i C_21, C_22]]
    (the reversal transposes the A1 sector, which combined with the
    particle-hole flip gives 1 - C_11 untransposed).
    """
    if C.nsites != geometry.total_sites:
        raise ValueError("correlation matrix is not restricted to the two intervals")
    n1 = geometry.l1
    M = C.entries
    out = M.copy().astype(complex)
    out[:n1, :n1] = np.eye(n1) - M[:n1, :n1]
    out[:n1, n1:] = 1j * M[:n1, n1:]
    out[n1:, :n1] = 1j * M[n1:, :n1]
    return out


def gaussian_log_moment(covs: list[np.ndarray]) -> complex:
    """log Tr[sigma(C_1) ... sigma(C_m)] for normalized Gaussian operators.

    Cyclic block determinant with diagonal blocks 1 - C_i^T and coupling
    blocks -C_i^T (last one +C_m^T closing the cycle); exact for any m,
    inverse free, evaluated through slogdet.
    """
    m = len(covs)
    if m == 1:
        return 0.0 + 0.0j
    n = covs[0].shape[0]
    B = np.zeros((m * n, m * n), dtype=complex)
    for i, Ci in enumerate(covs):
        T = Ci.T
        B[i * n:(i + 1) * n, i * n:(i + 1) * n] = np.eye(n) - T
        j = (i + 1) % m
        sgn = -1.0 if i < m - 1 else 1.0
        B[i * n:(i + 1) * n, j * n:(j + 1) * n] += sgn * T
    sign, logabs = np.linalg.slogdet(B)
    if sign == 0:
        raise NumericalError("vanishing Gaussian moment (singular cyclic determinant)")
    return complex(np.log(sign) + logabs)


def renyi_negativity_determinant(
    C: CorrelationMatrix, geometry: TripartiteGeometry, alpha: int, imag_tol: float = 1e-8
) -> float:
    """Exact E_alpha at any size via the imbalance-frame determinant calculus.

    Alternating products of the transposed covariance and its conjugate
    realize Tr[(rho rho^dag)^{alpha/2}] (even) and
    Tr[(rho rho^dag)^{(alpha-1)/2} rho] (odd); alpha = 1 is the trace norm,
    see negativity_determinant.
    """
    if not isinstance(alpha, (int, np.integer)) or alpha < 1:
        raise ValueError("alpha must be an integer >= 1")
    if alpha == 1:
        return negativity_determinant(C, geometry)
    Ct = imbalance_frame(C, geometry)
    seq = [Ct if i % 2 == 0 else Ct.conj().T for i in range(alpha)]
    lg = gaussian_log_moment(seq)
    if abs(lg.imag) > imag_tol * max(1.0, abs(lg.real)):
        raise NumericalError(f"moment has imaginary residue {lg.imag:.3e}")
    return float(lg.real)


def negativity_determinant(C: CorrelationMatrix, geometry: TripartiteGeometry) -> float:
    """Exact logarithmic negativity log Tr|rho^{R_1}| from covariances.

    Composes rho with rho^dag (the product matrix
    M = (1-C)(1-C^dag) + C C^dag is bounded below by 1/2, so this is well
    conditioned), then takes the square root modewise on the composed
    Hermitian covariance.
    """
    Ct = imbalance_frame(C, geometry)
    n = Ct.shape[0]
    eye = np.eye(n)
    M = (eye - Ct) @ (eye - Ct.conj().T) + Ct @ Ct.conj().T
    sign, logabs = np.linalg.slogdet(M)
    logc = float(np.real(np.log(sign) + logabs))
    Cx = eye - (eye - Ct.conj().T) @ np.linalg.solve(M, eye - Ct)
    zeta = np.clip(np.linalg.eigvalsh(Cx), 0.0, 1.0)
    return 0.5 * logc + float(np.sum(np.log(np.sqrt(zeta) + np.sqrt(1.0 - zeta))))


def log_ratio_exact(C: CorrelationMatrix, geometry: TripartiteGeometry, alpha: int) -> float:
    """Exact log R_alpha = E_alpha + (alpha - 1) S_alpha from one correlation matrix."""
    e = renyi_negativity_determinant(C, geometry, alpha)
    if alpha == 1:
        return e
    return e + (alpha - 1) * renyi_entropy_exact(C, alpha)


# ---------------------------------------------------------------------------
# coefficient extraction and profiles
# ---------------------------------------------------------------------------

def hopping_coefficients(op: OperatorMatrix) -> np.ndarray:
    """Coefficient matrix A with A[i, j] multiplying c_i^dag c_j.

    The Peschel log of <c^dag c> data is the transpose of the coefficient
    matrix, so this returns the transposed particle sector.
    """
    M = op.entries
    if op.label == "K":
        return M.T
    return M[0::2, 0::2].T


def pairing_entries(op: OperatorMatrix) -> np.ndarray:
    """Pairing-sector site matrix P[i, j] = doubled entry (2i+1, 2j).

    Used for the off-diagonal (pair-creation) profile; structural checks on
    it (light cone, plateau, alternation) do not depend on the slot choice.
    """
    return op.entries[1::2, 0::2]


def extract_offdiag_profile(
    N_offdiag: OperatorMatrix, geometry: TripartiteGeometry, z_values=(0,)
) -> list[KernelSample]:
    """Pair-creation coefficients linking mirrored positions of the intervals.

    For each z and each site x in A2 with partner y = x - (l1 + d) + z in A1,
    samples the pairing entry at (x, y). The sampled x is reported in
    continuum coordinates; use deoscillated() to strip the (-1)^x factor.
    """
    P = pairing_entries(N_offdiag)
    out = []
    offset = geometry.l1 + geometry.d
    for z in z_values:
        for jx, x in enumerate(geometry.lattice_sites_a2()):
            y = x - offset + z
            if 0 <= y < geometry.l1:
                row = geometry.l1 + jx
                out.append(KernelSample(float(geometry.to_continuum(x)), int(z), complex(P[row, y])))
    return out


def deoscillated(samples: list[KernelSample], geometry: TripartiteGeometry) -> np.ndarray:
    """Profile values with the site-alternating (-1)^x factor removed."""
    vals = []
    for s in samples:
        site = geometry.to_site(s.x)
        vals.append((-1.0) ** site * s.value)
    return np.asarray(vals, dtype=complex)


# ---------------------------------------------------------------------------
# textual matrix dumps
# ---------------------------------------------------------------------------

def write_matrix(M: np.ndarray, path) -> None:
    """Plain-text dump: header 'rows cols', then row-major 're,im' pairs."""
    M = np.asarray(M, dtype=complex)
    with open(path, "w") as fh:
        fh.write(f"{M.shape[0]} {M.shape[1]}\n")
        for row in M:
            fh.write(" ".join(f"{v.real:.17g},{v.imag:.17g}" for v in row) + "\n")


def read_matrix(path) -> np.ndarray:
    with open(path) as fh:
        rows, cols = (int(tok) for tok in fh.readline().split())
        M = np.empty((rows, cols), dtype=complex)
        for i in range(rows):
            toks = fh.readline().split()
            if len(toks) != cols:
                raise ValueError(f"row {i} has {len(toks)} entries, expected {cols}")
            for j, tok in enumerate(toks):
                re, im = tok.split(",")
                M[i, j] = float(re) + 1j * float(im)
    return M
