"""Operators and superoperators on qubit{g, e[, empty]} x Fock(N).

Vectorization is column-major (Fortran order): vec(A rho B) =
(B^T kron A) vec(rho), so superoperators are D^2 x D^2 matrices acting on
column-stacked density matrices.  Composite indices are q * n_fock + n with
qubit order (g, e, empty).

Qubit conventions: sigma_z = |g><g| - |e><e|, sigma_- = |g><e|.  All
fourth-order jump operators act on the charged sector only: the identity
slot of the 16-operator basis is the charge projector (equal to the identity
when qubit_dim = 2), and sigma_z annihilates the empty state.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (AmbiguousSteadyStateError, DomainError,
                     InvalidAMatrixError, NotTracePreservingError)
from .rates import (SystemParams, Variant, coefficients, dispersive_shifts,
                    dominant_rates, full_gamma_table, second_order_rates)
from .spectral import BathModel

#: switch from dense to sparse superoperator algebra above this Hilbert dim
DENSE_LIMIT = 64


class TruncationWarning(UserWarning):
    """Steady state has weight in the top Fock level; enlarge n_fock."""


class PositivityWarning(UserWarning):
    """Steady state has an eigenvalue below the clipping tolerance."""


@dataclass(frozen=True)
class HilbertSpace:
    """Truncated product space; qubit_dim = 3 adds the empty charge state."""

    n_fock: int
    qubit_dim: int = 2

    def __post_init__(self):
        if self.n_fock < 2:
            raise DomainError("n_fock must be >= 2")
        if self.qubit_dim not in (2, 3):
            raise DomainError("qubit_dim must be 2 or 3")

    @property
    def dim(self) -> int:
        return self.qubit_dim * self.n_fock

    @property
    def use_sparse(self) -> bool:
        return self.dim > DENSE_LIMIT

    # -- elementary operators (dense D x D arrays) ------------------------
    def _qubit(self, m: np.ndarray) -> np.ndarray:
        q = np.zeros((self.qubit_dim, self.qubit_dim), dtype=complex)
        q[:2, :2] = m
        return np.kron(q, np.eye(self.n_fock, dtype=complex))

    def destroy(self) -> np.ndarray:
        a = np.diag(np.sqrt(np.arange(1, self.n_fock, dtype=float)), 1)
        return np.kron(np.eye(self.qubit_dim, dtype=complex), a.astype(complex))

    def create(self) -> np.ndarray:
        return self.destroy().conj().T

    def number(self) -> np.ndarray:
        return np.kron(np.eye(self.qubit_dim, dtype=complex),
                       np.diag(np.arange(self.n_fock, dtype=complex)))

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def charge_projector(self) -> np.ndarray:
        return self._qubit(np.eye(2))

    def sigma_z(self) -> np.ndarray:
        return self._qubit(np.diag([1.0, -1.0]))

    def sigma_minus(self) -> np.ndarray:
        return self._qubit(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def sigma_plus(self) -> np.ndarray:
        return self._qubit(np.array([[0.0, 0.0], [1.0, 0.0]]))

    def qubit_outer(self, ket: np.ndarray, bra: np.ndarray) -> np.ndarray:
        """|ket><bra| on the qubit factor, identity on the Fock factor."""
        q = np.outer(np.asarray(ket, complex), np.asarray(bra, complex).conj())
        if q.shape != (self.qubit_dim, self.qubit_dim):
            raise DomainError("ket/bra length must equal qubit_dim")
        return np.kron(q, np.eye(self.n_fock, dtype=complex))

    def top_fock_projector(self) -> np.ndarray:
        pr = np.zeros((self.n_fock, self.n_fock), dtype=complex)
        pr[-1, -1] = 1.0
        return np.kron(np.eye(self.qubit_dim, dtype=complex), pr)


def operator_basis_16(space: HilbertSpace) -> list[np.ndarray]:
    """The ordered 16-operator basis of the fourth-order self-energy:

        [P, sz, a+a, sz a+a, a+, sz a+, a, sz a,
         s-, s+, s- a+a, s+ a+a, s- a+, s+ a, s- a, s+ a+]

    P is the charge projector (identity for qubit_dim = 2); every resonator
    factor is dressed with P so the whole set annihilates the empty state.
    """
    pr = space.charge_projector()
    sz = space.sigma_z()
    sm = space.sigma_minus()
    spl = space.sigma_plus()
    a = space.destroy()
    ad = space.create()
    n = space.number()
    return [pr, sz, pr @ n, sz @ n, pr @ ad, sz @ ad, pr @ a, sz @ a,
            sm, spl, sm @ n, spl @ n, sm @ ad, spl @ a, sm @ a, spl @ ad]


# ---------------------------------------------------------------------------
# Superoperator construction (column-major vectorization)
# ---------------------------------------------------------------------------

def vectorize(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, complex).reshape(-1, order="F")


def unvectorize(v: np.ndarray) -> np.ndarray:
    d = round(math.isqrt(v.size))
    if d * d != v.size:
        raise DomainError("vector length is not a perfect square")
    return np.asarray(v, complex).reshape((d, d), order="F")


def _kron(a, b, sparse: bool):
    if sparse:
        return sp.kron(sp.csr_matrix(a), sp.csr_matrix(b), format="csr")
    return np.kron(a, b)


def _eye(d: int, sparse: bool):
    return sp.identity(d, dtype=complex, format="csr") if sparse else np.eye(d, dtype=complex)


def hamiltonian_superop(h: np.ndarray, sparse: bool = False):
    """-i [H, .] as a matrix on vec(rho)."""
    d = h.shape[0]
    return -1j * (_kron(_eye(d, sparse), h, sparse) - _kron(h.T, _eye(d, sparse), sparse))


def dissipator_superop(o: np.ndarray, sparse: bool = False):
    """D[o] = o . o+ - {o+ o, .}/2 as a matrix on vec(rho)."""
    d = o.shape[0]
    odo = o.conj().T @ o
    out = _kron(o.conj(), o, sparse)
    out = out - 0.5 * (_kron(_eye(d, sparse), odo, sparse) + _kron(odo.T, _eye(d, sparse), sparse))
    return out


def sandwich_superop(o1: np.ndarray, o2: np.ndarray, sparse: bool = False):
    """o1 . o2+ - {o2+ o1, .}/2: one (i, j) term of the coefficient-matrix form."""
    d = o1.shape[0]
    k = o2.conj().T @ o1
    out = _kron(o2.conj(), o1, sparse)
    out = out - 0.5 * (_kron(_eye(d, sparse), k, sparse) + _kron(k.T, _eye(d, sparse), sparse))
    return out


def lindblad_apply(o: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """D[o] rho evaluated directly on a density matrix."""
    o = np.asarray(o, complex)
    rho = np.asarray(rho, complex)
    if o.shape != rho.shape or o.shape[0] != o.shape[1]:
        raise DomainError(f"shape mismatch: operator {o.shape}, state {rho.shape}")
    odo = o.conj().T @ o
    return o @ rho @ o.conj().T - 0.5 * (odo @ rho + rho @ odo)


def dissipator_sum_expand(o1: np.ndarray, o2: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Cross terms D[o1 + o2] rho - D[o1] rho - D[o2] rho, evaluated as

        o1 rho o2+ + o2 rho o1+ - {o1+ o2 + o2+ o1, rho}/2
    """
    o1 = np.asarray(o1, complex)
    o2 = np.asarray(o2, complex)
    rho = np.asarray(rho, complex)
    if not (o1.shape == o2.shape == rho.shape):
        raise DomainError("operator/state shapes must all match")
    k = o1.conj().T @ o2 + o2.conj().T @ o1
    return (o1 @ rho @ o2.conj().T + o2 @ rho @ o1.conj().T
            - 0.5 * (k @ rho + rho @ k))


# ---------------------------------------------------------------------------
# Self-energy coefficient matrices (A blocks) and their diagonalization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AMatrixBlocks:
    """One bath-frequency channel: 16 x 16 real symmetric coefficient
    matrices of the form  s A_m rho s+ - {s+ A_s s rho + rho s+ A_e s}/2.

    Trace conservation requires a_s = a_e; Lindblad form additionally makes
    them equal to a_m, which is how every channel here is built.
    """

    a_m: np.ndarray
    a_s: np.ndarray
    a_e: np.ndarray

    def validate(self) -> None:
        for name, m in (("a_m", self.a_m), ("a_s", self.a_s), ("a_e", self.a_e)):
            m = np.asarray(m)
            if m.shape != (16, 16):
                raise InvalidAMatrixError(f"{name} must be 16x16, got {m.shape}")
            if not np.allclose(m, m.T, atol=1e-13 * max(1.0, np.abs(m).max())):
                raise InvalidAMatrixError(f"{name} is not symmetric")
        if not np.allclose(self.a_s, self.a_e, atol=1e-13):
            raise NotTracePreservingError("a_s != a_e violates trace conservation")

    @classmethod
    def lindblad(cls, a_m: np.ndarray) -> "AMatrixBlocks":
        a = np.asarray(a_m, dtype=float)
        return cls(a_m=a, a_s=a, a_e=a)


def _block_embed(pieces: dict[int, np.ndarray]) -> np.ndarray:
    """Assemble a 16x16 from 4x4 sub-blocks keyed by block number 1..4."""
    a = np.zeros((16, 16))
    for k, b in pieces.items():
        i = 4 * (k - 1)
        a[i:i + 4, i:i + 4] = b
    return a


def build_a_blocks(p: SystemParams, bath: BathModel,
                   include_derivative_terms: bool = True) -> dict[str, AMatrixBlocks]:
    """All frequency channels of the fourth-order self-energy, each already
    multiplied by its bath factor.  Keys:

        'c0'            C(0) channel
        'c_minus_wq'    C(-w_q)
        'c_plus_wq'     C(+w_q)
        'cprime_plus'   C'(+w_q)
        'cprime_minus'  C'(-w_q)
        'dominant'      the six diagonal channels at +-w_r, +-(w_q -+ w_r)
    """
    cs = coefficients(p)
    c = lambda j: cs[j]

    b1_c0 = np.array([[c(1), c(2), c(1), 0.0],
                      [c(2), c(3), 0.0, c(3)],
                      [c(1), 0.0, 0.0, 0.0],
                      [0.0, c(3), 0.0, 0.0]])
    b2_c0 = np.diag([c(4), -c(4), c(4), -c(4)])
    a_c0 = _block_embed({1: b1_c0, 2: b2_c0})

    b1_m = np.array([[c(5), c(6), c(5), 0.0],
                     [c(6), c(7), c(5), c(8)],
                     [c(5), c(5), 0.0, 0.0],
                     [0.0, c(8), 0.0, 0.0]])
    b2_m = np.array([[c(9), c(10), 0.0, 0.0],
                     [c(10), c(11), 0.0, 0.0],
                     [0.0, 0.0, c(12), c(10)],
                     [0.0, 0.0, c(10), c(13)]])
    b3_m = np.array([[c(14), 0.0, -c(8), 0.0],
                     [0.0, c(15), 0.0, c(16)],
                     [-c(8), 0.0, 0.0, 0.0],
                     [0.0, c(16), 0.0, 0.0]])
    b4_m = np.diag([c(17), c(18), c(19), c(20)])
    a_m_wq = _block_embed({1: b1_m, 2: b2_m, 3: b3_m, 4: b4_m})

    b1_p = np.array([[c(5), c(21), c(5), 0.0],
                     [c(21), c(22), -c(5), c(8)],
                     [c(5), -c(5), 0.0, 0.0],
                     [0.0, c(8), 0.0, 0.0]])
    b2_p = np.array([[c(12), -c(10), 0.0, 0.0],
                     [-c(10), c(13), 0.0, 0.0],
                     [0.0, 0.0, c(9), -c(10)],
                     [0.0, 0.0, -c(10), c(11)]])
    b3_p = np.array([[c(23), 0.0, c(16), 0.0],
                     [0.0, c(24), 0.0, -c(8)],
                     [c(16), 0.0, 0.0, 0.0],
                     [0.0, -c(8), 0.0, 0.0]])
    b4_p = np.diag([c(18), c(17), c(20), c(19)])
    a_p_wq = _block_embed({1: b1_p, 2: b2_p, 3: b3_p, 4: b4_p})

    b1_dp = np.array([[c(25), c(26), 0.0, -c(27)],
                      [c(26), c(27), 0.0, c(27)],
                      [0.0, 0.0, 0.0, 0.0],
                      [-c(27), c(27), 0.0, 0.0]])
    b3_dp = np.array([[-4 * c(27), 0.0, -4 * c(27), 0.0],
                      [0.0, 0.0, 0.0, 0.0],
                      [-4 * c(27), 0.0, 0.0, 0.0],
                      [0.0, 0.0, 0.0, 0.0]])
    a_dp = _block_embed({1: b1_dp, 3: b3_dp})

    b1_dm = np.array([[c(25), c(28), 0.0, -c(27)],
                      [c(28), -c(27), 0.0, -c(27)],
                      [0.0, 0.0, 0.0, 0.0],
                      [-c(27), -c(27), 0.0, 0.0]])
    b3_dm = np.array([[0.0, 0.0, 0.0, 0.0],
                      [0.0, 4 * c(27), 0.0, 4 * c(27)],
                      [0.0, 0.0, 0.0, 0.0],
                      [0.0, 4 * c(27), 0.0, 0.0]])
    a_dm = _block_embed({1: b1_dm, 3: b3_dm})

    dom = dominant_rates(p, bath)
    a_dom = np.zeros((16, 16))
    a_dom[12, 12] = dom.down_plus    # D[s- a+],  C(w_q - w_r)
    a_dom[13, 13] = dom.up_minus     # D[s+ a],   C(-w_q + w_r)
    a_dom[14, 14] = dom.down_minus   # D[s- a],   C(w_q + w_r)
    a_dom[15, 15] = dom.up_plus      # D[s+ a+],  C(-w_q - w_r)
    a_dom[7, 7] = dom.phi_minus      # D[sz a],   C(w_r)
    a_dom[5, 5] = dom.phi_plus       # D[sz a+],  C(-w_r)

    if include_derivative_terms:
        dprime_p = bath.derivative(p.omega_q)
        dprime_m = bath.derivative(-p.omega_q)
    else:
        dprime_p = dprime_m = 0.0

    return {
        "c0": AMatrixBlocks.lindblad(a_c0 * bath.value(0.0)),
        "c_minus_wq": AMatrixBlocks.lindblad(a_m_wq * bath.value(-p.omega_q)),
        "c_plus_wq": AMatrixBlocks.lindblad(a_p_wq * bath.value(p.omega_q)),
        "cprime_plus": AMatrixBlocks.lindblad(a_dp * dprime_p),
        "cprime_minus": AMatrixBlocks.lindblad(a_dm * dprime_m),
        "dominant": AMatrixBlocks.lindblad(a_dom),
    }


def assemble_direct(blocks: AMatrixBlocks, basis: list[np.ndarray],
                    sparse: bool = False):
    """Superoperator of  s A_m rho s+ - {s+ A_s s, rho}/2  without any
    diagonalization: the brute-force side of the decomposition oracle."""
    blocks.validate()
    d = basis[0].shape[0]
    a_m = np.asarray(blocks.a_m)
    out = sp.csr_matrix((d * d, d * d), dtype=complex) if sparse \
        else np.zeros((d * d, d * d), dtype=complex)
    k_tot = np.zeros((d, d), dtype=complex)
    for i in range(16):
        for j in range(16):
            w = a_m[i, j]
            if w == 0.0:
                continue
            out = out + w * _kron(basis[j].conj(), basis[i], sparse)
            k_tot += w * (basis[j].conj().T @ basis[i])
    out = out - 0.5 * (_kron(_eye(d, sparse), k_tot, sparse)
                       + _kron(k_tot.T, _eye(d, sparse), sparse))
    return out


def decompose_a(blocks: AMatrixBlocks, basis: list[np.ndarray],
                verify: bool = True, rtol: float = 1e-10) -> list[tuple[str, np.ndarray, float]]:
    """Rewrite a coefficient-matrix channel as a weighted list of dissipators.

    Diagonal entries give weight A[i, i] on D[s_i]; each off-diagonal pair
    (i, j) gives weight A[i, j] on the triple {D[s_i + s_j], -D[s_i],
    -D[s_j]}.  Pairs of the identity slot with a Hermitian partner are
    dropped, since D[1 + o] = D[o] for Hermitian o; an identity pair with a
    non-Hermitian partner would leave a commutator (Hamiltonian) remainder
    and is rejected.  Returns (label, operator, weight) triples and, when
    ``verify`` is set, checks by reassembly that the emitted list reproduces
    the direct superoperator.
    """
    blocks.validate()
    a_m = np.asarray(blocks.a_m)
    terms: list[tuple[str, np.ndarray, float]] = []
    for i in range(16):
        if i > 0 and a_m[i, i] != 0.0:
            terms.append((f"D[s{i}]", basis[i], float(a_m[i, i])))
    for i in range(16):
        for j in range(i + 1, 16):
            w = a_m[i, j]
            if w == 0.0:
                continue
            if i == 0:
                op = basis[j]
                if not np.allclose(op, op.conj().T, atol=1e-13):
                    raise InvalidAMatrixError(
                        f"identity paired with non-Hermitian basis operator "
                        f"s{j}: remainder is not a dissipator")
                continue  # identity against a Hermitian partner cancels
            terms.append((f"D[s{i}+s{j}]", basis[i] + basis[j], float(w)))
            terms.append((f"D[s{i}]", basis[i], float(-w)))
            terms.append((f"D[s{j}]", basis[j], float(-w)))
    if verify:
        direct = assemble_direct(blocks, basis)
        if terms:
            rebuilt = assemble_from_terms(terms)
            scale = max(np.abs(direct).max(), 1e-300)
            err = np.abs(direct - rebuilt).max() / scale
        else:
            err = np.abs(direct).max()  # empty channel must assemble to zero
        if err > rtol:
            raise InvalidAMatrixError(
                f"decomposition does not reassemble the channel (rel err {err:.2e})")
    return terms


def assemble_from_terms(terms: list[tuple[str, np.ndarray, float]],
                        sparse: bool = False):
    if not terms:
        raise DomainError("no terms to assemble")
    d = terms[0][1].shape[0]
    out = sp.csr_matrix((d * d, d * d), dtype=complex) if sparse \
        else np.zeros((d * d, d * d), dtype=complex)
    for _, op, w in terms:
        out = out + w * dissipator_superop(op, sparse)
    return out


# ---------------------------------------------------------------------------
# Master-equation assembly
# ---------------------------------------------------------------------------

def _fourth_order_terms(p: SystemParams, bath: BathModel, space: HilbertSpace,
                        variant: Variant,
                        include_derivative_terms: bool) -> list[tuple[str, np.ndarray, float]]:
    b = operator_basis_16(space)
    if variant is Variant.FULL21:
        t = full_gamma_table(p, bath, include_derivative_terms)
        return [
            ("D[s-a+]", b[12], t.down_plus),
            ("D[s-a]", b[14], t.down_minus),
            ("D[s+a+]", b[15], t.up_plus),
            ("D[s+a]", b[13], t.up_minus),
            ("D[sza+]", b[5], t.phi_plus),
            ("D[sza]", b[7], t.phi_minus),
            ("D[a]", b[6], t.minus),
            ("D[a+]", b[4], t.plus),
            ("D[s+]", b[9], t.flip),
            ("D[s-]", b[8], t.flip),
            ("D[a+a]", b[2], t.number),
            ("D[sz+a+a]", b[1] + b[2], -t.number),
            ("D[sz]", b[1], t.phi4),
            ("D[a+sza]", b[6] + b[7], t.drive_phi),
            ("D[a++sza+]", b[4] + b[5], t.drive_phi),
            ("D[sza+a]", b[3], t.phi_number),
            ("D[sz+sza+a]", b[1] + b[3], -t.phi_number),
            ("D[s-a+a]", b[10], t.down_number),
            ("D[s-+s-a+a]", b[8] + b[10], -t.down_number),
            ("D[s+a+a]", b[11], t.up_number),
            ("D[s++s+a+a]", b[9] + b[11], -t.up_number),
        ]
    dom = dominant_rates(p, bath)
    terms = [
        ("D[s-a+]", b[12], dom.down_plus),
        ("D[s-a]", b[14], dom.down_minus),
        ("D[s+a+]", b[15], dom.up_plus),
        ("D[s+a]", b[13], dom.up_minus),
    ]
    if variant is Variant.DOMINANT6:
        terms += [("D[sza]", b[7], dom.phi_minus),
                  ("D[sza+]", b[5], dom.phi_plus)]
    return terms


def build_fourth_order(p: SystemParams, bath: BathModel, space: HilbertSpace,
                       variant: Variant = Variant.FULL21,
                       include_derivative_terms: bool = True):
    """The correlated photon-phonon superoperator: 21 dissipators weighted by
    the rate table (or the variant's restricted subset)."""
    terms = _fourth_order_terms(p, bath, space, variant, include_derivative_terms)
    return assemble_from_terms(terms, sparse=space.use_sparse)


def build_fourth_order_from_blocks(p: SystemParams, bath: BathModel,
                                   space: HilbertSpace,
                                   include_derivative_terms: bool = True):
    """Same superoperator assembled channel-by-channel from the raw
    coefficient matrices: the oracle counterpart of build_fourth_order."""
    basis = operator_basis_16(space)
    sparse = space.use_sparse
    chans = build_a_blocks(p, bath, include_derivative_terms)
    d = space.dim
    out = sp.csr_matrix((d * d, d * d), dtype=complex) if sparse \
        else np.zeros((d * d, d * d), dtype=complex)
    for blocks in chans.values():
        out = out + assemble_direct(blocks, basis, sparse=sparse)
    return out


def build_full_liouvillian(p: SystemParams, bath: BathModel, space: HilbertSpace,
                           variant: Variant = Variant.FULL21,
                           include_derivative_terms: bool = True):
    """Complete generator in the frame rotating at the drive frequency:

        -i[H, .] + L_2 + L_4 + L_res + L_leads

    H = (w_r - w_d) a+a - w_q sz/2 + chi_eff (sz + 2 sz a+a) + eps_d (a + a+)/2.
    Dissipators are frame-invariant.  Lead rates require the 3-level space;
    the source fills the position state raised by positive bias, the drain
    empties its orthogonal partner.
    """
    has_leads = p.gamma_left > 0.0 or p.gamma_right > 0.0
    if has_leads and space.qubit_dim != 3:
        raise DomainError("lead rates need qubit_dim = 3 (empty state)")
    sparse = space.use_sparse
    a = space.destroy()
    ad = space.create()
    n_full = space.number()
    sz = space.sigma_z()

    h = p.detuning * n_full - 0.5 * p.omega_q * sz
    if p.g != 0.0:
        _, chi_eff = dispersive_shifts(p)
        h = h + chi_eff * (sz + 2.0 * sz @ n_full)
    if p.drive_amplitude != 0.0:
        h = h + 0.5 * p.drive_amplitude * (a + ad)
    liou = hamiltonian_superop(h, sparse)

    so = second_order_rates(p, bath)
    for op, w in ((space.sigma_minus(), so.gamma_down),
                  (space.sigma_plus(), so.gamma_up),
                  (sz, so.gamma_phi)):
        if w != 0.0:
            liou = liou + w * dissipator_superop(op, sparse)

    if p.g != 0.0:
        liou = liou + build_fourth_order(p, bath, space, variant,
                                         include_derivative_terms)

    if p.kappa_minus_r != 0.0:
        liou = liou + p.kappa_minus_r * dissipator_superop(a, sparse)
    if p.kappa_plus_r != 0.0:
        liou = liou + p.kappa_plus_r * dissipator_superop(ad, sparse)

    if has_leads:
        ch, sh = half_angle(p)
        src = np.array([-sh, ch, 0.0])    # bias-raised position state
        drain = np.array([ch, sh, 0.0])
        empty = np.array([0.0, 0.0, 1.0])
        if p.gamma_left > 0.0:
            liou = liou + p.gamma_left * dissipator_superop(
                space.qubit_outer(src, empty), sparse)
        if p.gamma_right > 0.0:
            liou = liou + p.gamma_right * dissipator_superop(
                space.qubit_outer(empty, drain), sparse)
    return liou


def half_angle(p: SystemParams) -> tuple[float, float]:
    """(cos(theta/2), sin(theta/2)) from the algebraic cos(theta)."""
    c = p.cos_theta
    return math.sqrt(0.5 * (1.0 + c)), math.sqrt(0.5 * (1.0 - c))


# ---------------------------------------------------------------------------
# Steady state
# ---------------------------------------------------------------------------

def trace_vector(dim: int) -> np.ndarray:
    """Row vector t with t . vec(rho) = Tr rho (column-major stacking)."""
    t = np.zeros(dim * dim)
    t[:: dim + 1] = 1.0
    return t


def check_trace_preserving(liou, dim: int, tol: float = 1e-10) -> float:
    """Max |1+ . L| column-wise; raises if trace is not conserved."""
    t = trace_vector(dim)
    if sp.issparse(liou):
        res = np.abs(np.asarray(t @ liou)).max()
    else:
        res = np.abs(t @ liou).max()
    scale = _superop_scale(liou)
    if res > tol * scale:
        raise NotTracePreservingError(
            f"1+ . L = {res:.3e} exceeds {tol} x scale {scale:.3e}")
    return res


def _superop_scale(liou) -> float:
    if sp.issparse(liou):
        m = np.abs(liou.data).max() if liou.nnz else 0.0
    else:
        m = np.abs(liou).max()
    return max(m, 1.0)


def steady_state(liou, space: HilbertSpace | None = None,
                 check_positivity: bool = True) -> np.ndarray:
    """Null vector of the Liouvillian, normalized to a density matrix.

    One row of L is replaced by the trace constraint and the resulting
    system solved directly; if that fails (or leaves a large residual) the
    smallest singular vector is used instead, with the second singular value
    checked to rule out a degenerate null space.  The result is Hermitized;
    eigenvalues above -1e-8 are clipped to zero and the matrix renormalized,
    anything lower raises a PositivityWarning.
    """
    n2 = liou.shape[0]
    dim = round(math.isqrt(n2))
    t = trace_vector(dim)
    scale = _superop_scale(liou)

    rho = None
    try:
        if sp.issparse(liou):
            m = liou.tolil(copy=True)
            m[0, :] = t
            b = np.zeros(n2, dtype=complex)
            b[0] = 1.0
            x = spla.spsolve(m.tocsc(), b)
        else:
            m = np.array(liou, dtype=complex)
            m[0, :] = t
            b = np.zeros(n2, dtype=complex)
            b[0] = 1.0
            x = np.linalg.solve(m, b)
        resid = np.abs(liou @ x).max() / scale
        if math.isfinite(resid) and resid < 1e-8:
            rho = unvectorize(x)
    except (np.linalg.LinAlgError, RuntimeError):
        rho = None

    if rho is None:
        dense = liou.toarray() if sp.issparse(liou) else np.asarray(liou)
        _, s, vh = np.linalg.svd(dense)
        if s.size >= 2 and s[-2] < 1e-10 * max(s[0], 1.0):
            raise AmbiguousSteadyStateError(
                f"null space dimension > 1 (two smallest singular values "
                f"{s[-1]:.3e}, {s[-2]:.3e})")
        x = vh[-1].conj()
        tr = t @ x
        if abs(tr) < 1e-12:
            raise AmbiguousSteadyStateError("null vector is traceless")
        rho = unvectorize(x / tr)

    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    if check_positivity:
        evals = np.linalg.eigvalsh(rho)
        if evals.min() < -1e-8:
            warnings.warn(f"steady state eigenvalue {evals.min():.3e} below "
                          f"tolerance; generator may not be positivity-preserving",
                          PositivityWarning, stacklevel=2)
        else:
            w, v = np.linalg.eigh(rho)
            w = np.clip(w, 0.0, None)
            rho = (v * w) @ v.conj().T
            rho = rho / np.trace(rho).real
    if space is not None:
        leak = expectation(space.top_fock_projector(), rho).real
        if leak > 1e-6:
            warnings.warn(f"top Fock level holds population {leak:.2e}; "
                          f"increase n_fock", TruncationWarning, stacklevel=2)
    return rho


def expectation(op: np.ndarray, rho: np.ndarray) -> complex:
    return complex(np.trace(op @ rho))


def qubit_populations(rho: np.ndarray, space: HilbertSpace) -> tuple[float, float, float]:
    """(P_g, P_e, P_empty); P_empty = 0 on the 2-level space."""
    nf = space.n_fock
    pops = [np.trace(rho[q * nf:(q + 1) * nf, q * nf:(q + 1) * nf]).real
            for q in range(space.qubit_dim)]
    while len(pops) < 3:
        pops.append(0.0)
    return pops[0], pops[1], pops[2]


def field_amplitude(rho: np.ndarray, space: HilbertSpace) -> complex:
    return expectation(space.destroy(), rho)


def mean_photon_number(rho: np.ndarray, space: HilbertSpace) -> float:
    return expectation(space.number(), rho).real


# ---------------------------------------------------------------------------
# Text dumps (binary-free, cross-implementation diffable)
# ---------------------------------------------------------------------------

def dump_matrix(path, m) -> None:
    """Write a complex matrix as 'rows cols' header plus row-major re/im pairs."""
    m = m.toarray() if sp.issparse(m) else np.asarray(m, complex)
    with open(path, "w") as f:
        f.write(f"{m.shape[0]} {m.shape[1]}\n")
        for row in m:
            f.write(" ".join(f"{z.real:.17e} {z.imag:.17e}" for z in row) + "\n")


def load_matrix(path) -> np.ndarray:
    with open(path) as f:
        rows, cols = (int(x) for x in f.readline().split())
        out = np.empty((rows, cols), dtype=complex)
        for i in range(rows):
            vals = [float(x) for x in f.readline().split()]
            if len(vals) != 2 * cols:
                raise DomainError(f"row {i}: expected {2 * cols} numbers")
            re = np.array(vals[0::2])
            im = np.array(vals[1::2])
            out[i] = re + 1j * im
    return out
