"""Ground truth at desk scale.

Two layers:

* exact 4x4 algebra of a single entangled quasiparticle pair (one member per
  interval): transposes, time reversal, exponential forms, moments and
  charged factors, all checkable against closed forms;
* dense Fock-space reconstruction (2^N) of Gaussian states from their
  correlation matrices, with the partial time reversal implemented by the
  Majorana monomial rule, validating the covariance-level engine.

Conventions. Fock bits are little endian with the first-interval modes
first; the Jordan-Wigner string of mode m covers modes below m. Pair
density matrices are reported in the quasiparticle register basis
|n1 n2> = {|00>, |10>, |01>, |11>} (mode 1 = the member in the first
interval), in which the coherences read sqrt(n(1-n)) e^{+-i phi} with no
string signs; the dictionary between the register and Jordan-Wigner
representations is conjugation by diag(1, 1, 1, -1).

The monomial rule for the partial time reversal: expand in ordered Majorana
monomials and multiply each real-type first-interval factor by +i and each
imaginary-type one by -i (order kept). This reproduces the closed pair
forms and the coherent-state definition; the naive uniform i^m rule does
not (it flips the diagonal sector).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

DENSE_STATE_LIMIT = 12
DENSE_REVERSAL_LIMIT = 10

_REGISTER_BRIDGE = np.diag([1.0, 1.0, 1.0, -1.0])


# ---------------------------------------------------------------------------
# Fock-space machinery
# ---------------------------------------------------------------------------

_FOCK_CACHE: dict[int, list[np.ndarray]] = {}


def fock_annihilators(nmodes: int) -> list[np.ndarray]:
    """Jordan-Wigner annihilation matrices, little-endian bits, string below."""
    if nmodes in _FOCK_CACHE:
        return _FOCK_CACHE[nmodes]
    dim = 1 << nmodes
    ops = []
    for m in range(nmodes):
        a = np.zeros((dim, dim))
        bit = 1 << m
        low = bit - 1
        for s in range(dim):
            if s & bit:
                sign = -1.0 if bin(s & low).count("1") % 2 else 1.0
                a[s ^ bit, s] = sign
        ops.append(a)
    _FOCK_CACHE[nmodes] = ops
    return ops


def majorana_pair(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(real, imaginary) Majorana partners of one annihilation matrix."""
    return a + a.conj().T, 1j * (a - a.conj().T)


def _pauli_forward(rho: np.ndarray, nmodes: int) -> np.ndarray:
    """Coefficients of rho in the (I, X, Y, Z)^(x)n basis, as a 4^n vector."""
    t = rho.reshape((2,) * (2 * nmodes))
    # interleave (row_q, col_q); row axis of qubit q is q, col axis nmodes+q
    perm = []
    for q in range(nmodes):
        perm.extend([q, nmodes + q])
    t = np.transpose(t, perm).reshape((4,) * nmodes)
    # per-qubit map (m00, m01, m10, m11) -> (cI, cX, cY, cZ)
    F = 0.5 * np.array(
        [[1, 0, 0, 1], [0, 1, 1, 0], [0, 1j, -1j, 0], [1, 0, 0, -1]], dtype=complex
    )
    for ax in range(nmodes):
        t = np.tensordot(F, t, axes=([1], [ax]))
        t = np.moveaxis(t, 0, ax)
    return t.reshape(-1)

_PAULI_BACK = np.array(
    [[1, 0, 0, 1], [0, 1, -1j, 0], [0, 1, 1j, 0], [1, 0, 0, -1]], dtype=complex
)


def _pauli_backward(coeffs: np.ndarray, nmodes: int) -> np.ndarray:
    t = coeffs.reshape((4,) * nmodes)
    for ax in range(nmodes):
        t = np.tensordot(_PAULI_BACK, t, axes=([1], [ax]))
        t = np.moveaxis(t, 0, ax)
    t = t.reshape((2, 2) * nmodes)
    perm = [2 * q for q in range(nmodes)] + [2 * q + 1 for q in range(nmodes)]
    t = np.transpose(t, perm)
    return t.reshape(1 << nmodes, 1 << nmodes)


def _monomial_tables(nmodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Map each ordered Majorana-monomial bitmask to its Pauli-basis index.

    Returns (pauli_index[mask], letter_counts[mask]) where letter_counts
    packs per-mode gamma content for phase assignment. Built once per size
    by symbolic Pauli multiplication in the (phase, xbits, zbits) encoding
    P = phase * X^x Z^z.
    """
    nmask = 1 << (2 * nmodes)
    # gamma_j as (x, z) with phase i for imaginary type
    gx = np.empty(2 * nmodes, dtype=np.int64)
    gz = np.empty(2 * nmodes, dtype=np.int64)
    gph = np.empty(2 * nmodes, dtype=complex)
    for m in range(nmodes):
        gx[2 * m] = 1 << m
        gz[2 * m] = (1 << m) - 1
        gph[2 * m] = 1.0
        gx[2 * m + 1] = 1 << m
        gz[2 * m + 1] = (2 << m) - 1
        gph[2 * m + 1] = 1j
    xs = np.zeros(nmask, dtype=np.int64)
    zs = np.zeros(nmask, dtype=np.int64)
    phs = np.ones(nmask, dtype=complex)
    for mask in range(1, nmask):
        top = mask.bit_length() - 1
        prev = mask ^ (1 << top)
        # multiply (ph,x,z)[prev] by gamma_top on the right
        x1, z1, p1 = xs[prev], zs[prev], phs[prev]
        x2, z2, p2 = gx[top], gz[top], gph[top]
        sign = -1.0 if bin(int(z1) & int(x2)).count("1") % 2 else 1.0
        xs[mask] = x1 ^ x2
        zs[mask] = z1 ^ z2
        phs[mask] = p1 * p2 * sign
    # convert (x, z) to a base-4 Pauli index with letters I=0, X=1, Y=2, Z=3,
    # folding the XZ = -iY phase into phs
    idx = np.zeros(nmask, dtype=np.int64)
    for mask in range(nmask):
        x, z, code = int(xs[mask]), int(zs[mask]), 0
        for q in range(nmodes):
            xb, zb = (x >> q) & 1, (z >> q) & 1
            if xb and zb:
                letter = 2
                phs[mask] *= -1j  # XZ = -i Y
            elif xb:
                letter = 1
            elif zb:
                letter = 3
            else:
                letter = 0
            code += letter << (2 * q)
        idx[mask] = code
    return idx, phs


_TABLE_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _tables(nmodes: int):
    if nmodes not in _TABLE_CACHE:
        _TABLE_CACHE[nmodes] = _monomial_tables(nmodes)
    return _TABLE_CACHE[nmodes]


def majorana_time_reversal(rho: np.ndarray, nmodes: int, a1_modes) -> np.ndarray:
    """Partial time reversal of a Jordan-Wigner matrix by the monomial rule.

    Real-type Majorana factors of the first-interval modes pick up +i,
    imaginary-type ones -i; the monomial's operator content is unchanged.
    """
    if nmodes > DENSE_REVERSAL_LIMIT:
        raise ValueError(f"dense time reversal limited to {DENSE_REVERSAL_LIMIT} modes")
    a1 = set(int(m) for m in a1_modes)
    idx, _ = _tables(nmodes)
    masks = np.arange(1 << (2 * nmodes), dtype=np.int64)
    phase = np.ones(len(masks), dtype=complex)
    for m in a1:
        real_bit = (masks >> (2 * m)) & 1
        imag_bit = (masks >> (2 * m + 1)) & 1
        phase = phase * np.where(real_bit == 1, 1j, 1.0) * np.where(imag_bit == 1, -1j, 1.0)
    # same multiplicative phase applies to the Pauli coefficients through the
    # monomial <-> Pauli bijection
    per_pauli = np.empty_like(phase)
    per_pauli[idx] = phase
    c = _pauli_forward(rho, nmodes)
    return _pauli_backward(c * per_pauli, nmodes)


def majorana_degrees(rho: np.ndarray, nmodes: int, tol: float = 1e-12) -> set[int]:
    """Set of Majorana-monomial degrees present in an operator."""
    idx, phs = _tables(nmodes)
    c = _pauli_forward(rho, nmodes)
    w = c[idx] / phs
    masks = np.arange(1 << (2 * nmodes), dtype=np.int64)
    degs = set()
    for mask, coeff in zip(masks, w):
        if abs(coeff) > tol:
            degs.add(int(bin(int(mask)).count("1")))
    return degs


# ---------------------------------------------------------------------------
# single-pair algebra (register basis)
# ---------------------------------------------------------------------------

_REGISTER_OPS: list = []


def register_pair_ops():
    """(b1, b2, n1, n2, identity) for the two-mode register representation."""
    if not _REGISTER_OPS:
        a1, a2 = fock_annihilators(2)
        D = _REGISTER_BRIDGE
        b1, b2 = D @ a1 @ D, D @ a2 @ D
        _REGISTER_OPS.append((b1, b2, b1.conj().T @ b1, b2.conj().T @ b2, np.eye(4)))
    return _REGISTER_OPS[0]


@dataclass(frozen=True)
class PairDensityMatrix:
    """Exact two-mode density matrix of one shared pair, plus its metadata."""

    matrix: np.ndarray
    kind: str
    n: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))
        if self.matrix.shape != (4, 4):
            raise ValueError("pair density matrix must be 4x4")


def pair_state(kind: str, n: float, phi: float = 0.0) -> PairDensityMatrix:
    """Shared-pair density matrix. Mode 1 is the A1 member.

    squeezed:  n on the doubly occupied sector, 1-n on the empty one,
               pair-creation coherence sqrt(n(1-n)) e^{i phi}.
    symmetric: n on (mode 2 occupied), 1-n on (mode 1 occupied),
               hopping coherence sqrt(n(1-n)) e^{i phi}.
    """
    if not 0.0 <= n <= 1.0:
        raise ValueError("filling must lie in [0, 1]")
    b1, b2, n1, n2, I = register_pair_ops()
    c = np.sqrt(n * (1.0 - n)) * np.exp(1j * phi)
    if kind == "squeezed":
        coh = c * b2.conj().T @ b1.conj().T
        rho = n * n2 @ n1 + (1 - n) * (I - n2) @ (I - n1) + coh + coh.conj().T
    elif kind == "symmetric":
        coh = c * b2.conj().T @ b1
        rho = n * n2 @ (I - n1) + (1 - n) * (I - n2) @ n1 + coh + coh.conj().T
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    return PairDensityMatrix(rho, kind, float(n), float(phi))


def transpose_mode1(rho: PairDensityMatrix) -> PairDensityMatrix:
    """Matrix partial transpose over the mode-1 register factor."""
    # reshape axes: (row n2, row n1, col n2, col n1); swap the mode-1 pair
    M = rho.matrix.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return PairDensityMatrix(M, rho.kind, rho.n, rho.phi)


def time_reversal_mode1(rho: PairDensityMatrix) -> PairDensityMatrix:
    """Partial time reversal of the A1 member (monomial rule, register output)."""
    D = _REGISTER_BRIDGE
    jw = D @ rho.matrix @ D
    out = majorana_time_reversal(jw, 2, [0])
    return PairDensityMatrix(D @ out @ D, rho.kind, rho.n, rho.phi)


def imbalance_operator() -> np.ndarray:
    """n2 - n1 in the register basis."""
    _, _, n1, n2, _ = register_pair_ops()
    return n2 - n1


def swap_operator(kind: str, phi: float, fermionic: bool) -> np.ndarray:
    """The Hermitian sign operator entering the exponential pair forms.

    Standard flavor: idempotent-like (O^2 = 2 O, eigenvalues within {0, 2});
    fermionic flavor: quadratic with eigenvalues {0, +-1}.
    """
    b1, b2, n1, n2, I = register_pair_ops()
    e = np.exp(1j * phi)
    if kind == "squeezed":
        coh = e * b2.conj().T @ b1
        if fermionic:
            return coh + coh.conj().T
        return n2 @ (I - n1) + n1 @ (I - n2) - coh - coh.conj().T
    if kind == "symmetric":
        coh = e * b2.conj().T @ b1.conj().T
        if fermionic:
            return coh + coh.conj().T
        return n2 @ n1 + (I - n2) @ (I - n1) - coh - coh.conj().T
    raise ValueError(f"unknown state kind {kind!r}")


@dataclass(frozen=True)
class ExponentialFormReport:
    kind: str
    flavor: str
    reconstruction_dev: float
    o_squared_dev: float
    o_spectrum_dev: float
    commutator_dev: float
    quadratic: bool
    tol: float

    @property
    def passed(self) -> bool:
        devs = (self.reconstruction_dev, self.o_squared_dev, self.o_spectrum_dev, self.commutator_dev)
        return max(devs) <= self.tol and self.quadratic


def verify_exponential_forms(
    rho_t: PairDensityMatrix, flavor: str, tol: float = 1e-12
) -> ExponentialFormReport:
    """Rebuild the transposed pair from its exponential form and compare.

    flavor "standard" checks the transposed matrix against
    (1+e^{-eta})^{-1} exp(-eta/2 * Nsum + i pi/2 * O) with the sign operator
    O; flavor "fermionic" the time-reversed matrix with the quadratic O.
    Also checks O^2 = 2O (standard), the spectra, the commutation with the
    exponent, and (fermionic) that O is quadratic in Majoranas.
    """
    if flavor not in ("standard", "fermionic"):
        raise ValueError("flavor must be 'standard' or 'fermionic'")
    n, phi, kind = rho_t.n, rho_t.phi, rho_t.kind
    if not 0.0 < n < 1.0:
        raise ValueError("exponential forms need a filling strictly inside (0, 1)")
    _, _, n1, n2, I = register_pair_ops()
    eta = float(np.log(1.0 - n) - np.log(n))
    nsum = n2 + n1 if kind == "squeezed" else n2 + (I - n1)
    fermionic = flavor == "fermionic"
    O = swap_operator(kind, phi, fermionic)
    recon = expm(-0.5 * eta * nsum + 0.5j * np.pi * O) / (1.0 + np.exp(-eta))
    dev = float(np.max(np.abs(recon - rho_t.matrix)))
    spec = np.linalg.eigvalsh(O)
    allowed = np.array([0.0, 1.0, -1.0]) if fermionic else np.array([0.0, 2.0, -2.0])
    spec_dev = float(np.max(np.min(np.abs(spec[:, None] - allowed[None, :]), axis=1)))
    if fermionic:
        o2_dev = 0.0
        quadratic = majorana_degrees(_REGISTER_BRIDGE @ O @ _REGISTER_BRIDGE, 2) <= {0, 2}
    else:
        o2_dev = float(np.max(np.abs(O @ O - 2.0 * O)))
        quadratic = True
    comm_dev = float(np.max(np.abs(O @ nsum - nsum @ O)))
    return ExponentialFormReport(kind, flavor, dev, o2_dev, spec_dev, comm_dev, quadratic, tol)


@dataclass(frozen=True)
class PairTraces:
    """Moments of one transposed pair: plain, time-reversal, and charged."""

    standard: complex
    fermionic: complex
    charged: complex
    charged_fermionic: complex


def pair_traces(rho: PairDensityMatrix, alpha: int, lam: float = 0.0) -> PairTraces:
    """Brute-force pair moments at order alpha.

    standard:  Tr[(rho^{T1})^alpha]
    fermionic: Tr[(rho^{R1} rho^{R1 dag})^{alpha/2}]          (alpha even)
               Tr[(rho^{R1} rho^{R1 dag})^{(alpha-1)/2} rho^{R1}] (alpha odd)
    charged:   Tr[e^{i lam (n2 - n1)} (rho^{T1})^alpha], and the analogous
               dressing of the time-reversal moment.
    """
    if not isinstance(alpha, (int, np.integer)) or alpha < 1:
        raise ValueError("alpha must be an integer >= 1")
    rt = transpose_mode1(rho).matrix
    rr = time_reversal_mode1(rho).matrix
    power_t = np.linalg.matrix_power(rt, alpha)
    std = complex(np.trace(power_t))
    prod = rr @ rr.conj().T
    if alpha % 2 == 0:
        power_f = np.linalg.matrix_power(prod, alpha // 2)
    else:
        power_f = np.linalg.matrix_power(prod, (alpha - 1) // 2) @ rr
    ferm = complex(np.trace(power_f))
    q = expm(1j * lam * imbalance_operator())
    return PairTraces(std, ferm, complex(np.trace(q @ power_t)), complex(np.trace(q @ power_f)))


def closed_form_moment(alpha: int, n: float) -> float:
    """Parity-split closed form of the transposed-pair moment."""
    if alpha % 2 == 1:
        return n ** alpha + (1.0 - n) ** alpha
    h = alpha / 2.0
    return (n ** h + (1.0 - n) ** h) ** 2


def closed_form_charged(alpha: int, n: float, lam: float) -> complex:
    """Closed form of the imbalance-dressed pair moment (symmetric kind).

    The occupied sectors carry imbalance +-1, so both parities dress the
    n^alpha terms with a single e^{+-i lam}; even orders add the
    imbalance-neutral coherence contribution 2 [n(1-n)]^{alpha/2}.
    """
    ep, em = np.exp(1j * lam), np.exp(-1j * lam)
    out = ep * n ** alpha + em * (1.0 - n) ** alpha
    if alpha % 2 == 0:
        out = out + 2.0 * (n * (1.0 - n)) ** (alpha / 2.0)
    return complex(out)


def diagonal_coherence_split(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(number-diagonal part, coherence part) of a register-basis matrix."""
    d = np.diag(np.diag(M))
    return d, M - d


# ---------------------------------------------------------------------------
# coherent-state (Grassmann) definition of the partial time reversal
# ---------------------------------------------------------------------------

_COHERENT_MAP: list[np.ndarray] = []


def _coherent_map() -> np.ndarray:
    """16x16 linear map (on vectorized JW matrices) realizing the coherent-state
    definition of the mode-1 partial time reversal.

    Works in a 6-mode space (2 physical modes = bits 0,1; four auxiliary
    fermions representing the Grassmann generators xi_1, xi_2, xibar_1,
    xibar_2 = bits 2..5). A matrix element between coherent states becomes a
    vector over auxiliary occupations; the defining relation

        <xi| rho^R |xibar> = <i xibar_1, xi_2| rho |i xi_1, xibar_2>

    is then a linear system connecting the two vectorized matrices.
    """
    if _COHERENT_MAP:
        return _COHERENT_MAP[0]
    a = fock_annihilators(6)
    b = a[:2]
    xi1, xi2 = a[2].conj().T, a[3].conj().T
    xb1, xb2 = a[4].conj().T, a[5].conj().T
    I = np.eye(64, dtype=complex)

    def vac_vector(bra1, bra2, mid, ket1, ket2):
        F = (I - b[0] @ bra1) @ (I - b[1] @ bra2) @ np.kron(np.eye(16), mid)
        F = F @ (I - ket1 @ b[0].conj().T) @ (I - ket2 @ b[1].conj().T)
        return F[:, 0].reshape(16, 4)[:, 0]  # phys-vacuum component per aux state

    L = np.zeros((16, 16), dtype=complex)
    R = np.zeros((16, 16), dtype=complex)
    for r in range(4):
        for c in range(4):
            unit = np.zeros((4, 4), dtype=complex)
            unit[r, c] = 1.0
            L[:, 4 * r + c] = vac_vector(xi1, xi2, unit, xb1, xb2)
            R[:, 4 * r + c] = vac_vector(1j * xb1, xi2, unit, 1j * xi1, xb2)
    _COHERENT_MAP.append(np.linalg.solve(L, R))
    return _COHERENT_MAP[0]


def coherent_time_reversal_two_mode(rho_register: np.ndarray) -> np.ndarray:
    """Partial time reversal from its Grassmann coherent-state definition."""
    D = _REGISTER_BRIDGE
    rho_jw = D @ np.asarray(rho_register, dtype=complex) @ D
    out_jw = (_coherent_map() @ rho_jw.reshape(16)).reshape(4, 4)
    return D @ out_jw @ D


# ---------------------------------------------------------------------------
# momentum-quadrature correlation oracle
# ---------------------------------------------------------------------------

def correlation_dimer_quadrature(t: float, sites, nk: int = 4096) -> np.ndarray:
    """Dimer-quench correlations from the exact mode evolution, by quadrature.

    The dimer state on pairs (2i, 2i+1) has mode occupations
    n(k) = (1 + cos k)/2 and the staggered coherence <c_k^dag c_{k-pi}> with
    amplitude i sin(k)/2; evolving the modes with energies -cos k gives

      C_xx'(t) = int dk/2pi n(k) e^{ik(x'-x)}
               + (-1)^{x'} (i/2) int dk/2pi sin k e^{ik(x'-x)} e^{-2 i t cos k}.

    Independent of the Bessel-function route; used to certify it.
    """
    x = np.asarray(sites, dtype=int)
    h = 2 * np.pi / nk
    k = -np.pi + (np.arange(nk) + 0.5) * h
    dx = x[None, :] - x[:, None]  # x' - x
    # stationary part: n(k) Fourier transform
    nk_vals = 0.5 * (1.0 + np.cos(k))
    stat = (np.exp(1j * np.outer(dx.ravel(), k)) * nk_vals).sum(axis=1) / nk
    # staggered coherence part
    osc = (np.exp(1j * np.outer(dx.ravel(), k)) * (np.sin(k) * np.exp(-2j * t * np.cos(k)))).sum(axis=1) / nk
    stag = (0.5j * osc).reshape(dx.shape) * ((-1.0) ** x)[None, :]
    return stat.reshape(dx.shape) + stag


# ---------------------------------------------------------------------------
# dense Gaussian oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DenseGaussianState:
    """2^N reconstruction of a Gaussian state from its correlation matrix."""

    nmodes: int
    rho: np.ndarray
    covariance: np.ndarray


def dense_from_covariance(C: np.ndarray) -> DenseGaussianState:
    """Build rho in Fock space with <c_i^dag c_j> = C_ij.

    Diagonalizes C = V diag(nu) V^dag and assembles the product of mode
    mixtures (1 - nu) + (2 nu - 1) n_q with f_q^dag = sum_i V*_iq c_i^dag.
    """
    C = np.asarray(C, dtype=complex)
    n = C.shape[0]
    if n > DENSE_STATE_LIMIT:
        raise ValueError(f"dense reconstruction limited to {DENSE_STATE_LIMIT} modes")
    if np.max(np.abs(C - C.conj().T)) > 1e-10:
        raise ValueError("correlation matrix must be Hermitian")
    nu, V = np.linalg.eigh(C)
    U = V.conj()  # modes of C^T, so that the rebuilt state reproduces C itself
    a = fock_annihilators(n)
    dim = 1 << n
    rho = np.eye(dim, dtype=complex)
    for q in range(n):
        fdag = sum(U[i, q] * a[i].conj().T for i in range(n))
        nq = fdag @ fdag.conj().T
        rho = rho @ ((1.0 - nu[q]) * np.eye(dim) + (2.0 * nu[q] - 1.0) * nq)
    return DenseGaussianState(n, rho, C)


def measure_covariance(rho: np.ndarray, nmodes: int) -> np.ndarray:
    a = fock_annihilators(nmodes)
    tr = np.trace(rho)
    return np.array(
        [[np.trace(rho @ a[i].conj().T @ a[j]) for j in range(nmodes)] for i in range(nmodes)]
    ) / tr


def dense_time_reversal(state: DenseGaussianState, a1_modes) -> np.ndarray:
    """Partial time reversal of the dense state over the given modes."""
    return majorana_time_reversal(state.rho, state.nmodes, a1_modes)


def trace_norm(M: np.ndarray) -> float:
    return float(np.sum(np.linalg.svd(M, compute_uv=False)))


def dense_renyi_moment(M: np.ndarray, alpha: int) -> complex:
    """Tr[(M M^dag)^{alpha/2}] (even) or Tr[(M M^dag)^{(alpha-1)/2} M] (odd)."""
    if not isinstance(alpha, (int, np.integer)) or alpha < 1:
        raise ValueError("alpha must be an integer >= 1")
    P = M @ M.conj().T
    if alpha % 2 == 0:
        return complex(np.trace(np.linalg.matrix_power(P, alpha // 2)))
    return complex(np.trace(np.linalg.matrix_power(P, (alpha - 1) // 2) @ M))


def dense_entropy(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log(w)))


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tol


def run_pair_suite(n_points: int = 20, phi_points: int = 20, tol: float = 1e-12) -> list[CheckResult]:
    """Every closed-form identity of the single-pair algebra, on an (n, phi) grid."""
    ns = np.linspace(0.04, 0.96, n_points)
    phis = np.linspace(0.0, 2 * np.pi, phi_points, endpoint=False)
    b1, b2, n1op, n2op, I = register_pair_ops()
    results: dict[str, float] = {}

    def track(name, dev):
        results[name] = max(results.get(name, 0.0), float(dev))

    for kind in ("squeezed", "symmetric"):
        for n in ns:
            base_traces = {}
            for phi in phis:
                rho = pair_state(kind, n, phi)
                rt = transpose_mode1(rho)
                rr = time_reversal_mode1(rho)
                track("state_trace_one", abs(np.trace(rho.matrix) - 1.0))
                track("state_hermitian", np.max(np.abs(rho.matrix - rho.matrix.conj().T)))
                # time reversal = diagonal part + i * coherence of the transpose
                d, coh = diagonal_coherence_split(rt.matrix)
                track("reversal_closed_form", np.max(np.abs(rr.matrix - (d + 1j * coh))))
                # Gaussian combination identity
                comb = 0.5 * (1 - 1j) * rr.matrix + 0.5 * (1 + 1j) * rr.matrix.conj().T
                track("combination_identity", np.max(np.abs(comb - rt.matrix)))
                # rho^R (rho^R)^dag = squared-exponent Gaussian
                eta = np.log(1 - n) - np.log(n)
                nsum = n2op + n1op if kind == "squeezed" else n2op + (I - n1op)
                target = expm(-eta * nsum) / (1 + np.exp(-eta)) ** 2
                track("reversal_product_form", np.max(np.abs(rr.matrix @ rr.matrix.conj().T - target)))
                # coherent-state definition
                gr = coherent_time_reversal_two_mode(rho.matrix)
                track("coherent_state_definition", np.max(np.abs(gr - rr.matrix)))
                # exponential forms
                for flavor in ("standard", "fermionic"):
                    src = rt if flavor == "standard" else rr
                    rep = verify_exponential_forms(src, flavor, tol)
                    track(f"exponential_form_{flavor}", rep.reconstruction_dev)
                    track("o_squared", rep.o_squared_dev)
                    track(f"o_spectrum_{flavor}", rep.o_spectrum_dev)
                    track("o_commutes_with_exponent", rep.commutator_dev)
                    if not rep.quadratic:
                        track("o_fermionic_quadratic", 1.0)
                # symmetry gained by the transpose: particle number for the
                # squeezed pair, imbalance for the symmetric pair
                Q = imbalance_operator()
                Ntot = n1op + n2op
                sym_op = Q if kind == "symmetric" else Ntot
                track(
                    f"transpose_symmetry_{kind}",
                    np.max(np.abs(rt.matrix @ sym_op - sym_op @ rt.matrix)),
                )
                # moments against closed forms; fermionic = standard
                for alpha in (1, 2, 3, 4, 5, 6):
                    tr = pair_traces(rho, alpha, lam=0.7)
                    track("moment_closed_form", abs(tr.standard - closed_form_moment(alpha, n)))
                    track("fermionic_equals_standard", abs(tr.fermionic - tr.standard))
                    if kind == "symmetric":
                        track("charged_closed_form", abs(tr.charged - closed_form_charged(alpha, n, 0.7)))
                        track("charged_fermionic_equals_standard", abs(tr.charged_fermionic - tr.charged))
                    else:
                        # squeezed sectors are imbalance neutral; only the even
                        # coherence blocks see the counting phase
                        ref = closed_form_moment(alpha, n)
                        if alpha % 2 == 0:
                            ref = ref + 2.0 * (np.cos(0.7) - 1.0) * (n * (1 - n)) ** (alpha / 2.0)
                        track("charged_squeezed_closed_form", abs(tr.charged - ref))
                # orthogonal split of the transposed squeezed state
                if kind == "squeezed":
                    A, B = diagonal_coherence_split(rt.matrix)
                    track("ab_orthogonality", np.max(np.abs(A @ B)) + np.max(np.abs(B @ A)))
                    p = 3
                    track(
                        "ab_power_split",
                        abs(
                            np.trace(np.linalg.matrix_power(rt.matrix, p))
                            - np.trace(np.linalg.matrix_power(A, p))
                            - np.trace(np.linalg.matrix_power(B, p))
                        ),
                    )
                base_traces[phi] = pair_traces(rho, 3, lam=0.4)
            # phase independence of scalars
            vals = [v.standard for v in base_traces.values()]
            track("phase_independence", np.max(np.abs(np.asarray(vals) - vals[0])))
    return [CheckResult(k, v, tol) for k, v in sorted(results.items())]


def run_dense_suite(tol: float = 1e-8) -> list[CheckResult]:
    """Dense Majorana oracle against the covariance engine, small dimer quenches."""
    from .core import TripartiteGeometry
    from . import gaussian as ge

    results: list[CheckResult] = []
    worst_cov = worst_e = worst_mom = 0.0
    cases = [(2, 2, 1), (3, 3, 2), (2, 3, 3), (3, 2, 1), (4, 4, 2)]
    for l1, l2, d in cases:
        geom = TripartiteGeometry(l1, l2, d)
        for t in (0.0, 1.7, 4.0):
            C = ge.restrict(ge.correlation_dimer(t, np.arange(geom.span)), geom)
            state = dense_from_covariance(C.entries)
            worst_cov = max(
                worst_cov,
                float(np.max(np.abs(measure_covariance(state.rho, state.nmodes) - C.entries))),
            )
            rr = dense_time_reversal(state, range(l1))
            worst_e = max(worst_e, abs(np.log(trace_norm(rr)) - ge.negativity_determinant(C, geom)))
            for alpha in (2, 3, 4):
                dm = dense_renyi_moment(rr, alpha)
                em = ge.renyi_negativity_determinant(C, geom, alpha)
                worst_mom = max(worst_mom, abs(np.log(dm.real) - em), abs(dm.imag))
    results.append(CheckResult("dense_covariance_roundtrip", worst_cov, 1e-10))
    results.append(CheckResult("dense_vs_engine_trace_norm", worst_e, tol))
    results.append(CheckResult("dense_vs_engine_moments", worst_mom, tol))
    # two-mode dense reversal against the pair-level operation
    D = _REGISTER_BRIDGE
    worst = 0.0
    for kind in ("squeezed", "symmetric"):
        for n in (0.2, 0.5, 0.8):
            rho = pair_state(kind, n, 0.9)
            dense = majorana_time_reversal(D @ rho.matrix @ D, 2, [0])
            worst = max(worst, float(np.max(np.abs(D @ dense @ D - time_reversal_mode1(rho).matrix))))
    results.append(CheckResult("dense_two_mode_matches_pair", worst, 1e-13))
    return results
