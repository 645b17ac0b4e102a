"""Brute-force matrix-mechanics simulator for small instances.

Gates are built as explicit unitaries from their computational-basis
definitions and applied by tensor contraction; nothing in here knows the
symbolic shift rules it is used to validate.  Small instances run as full
density matrices; larger ensembles (up to 2**14 amplitudes) run as exact
classical mixtures of pure component vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionCapError
from .gates import CoarseParams, coarse_group
from .states import ErrorLabel, Family, StateSpec

#: Full density-matrix operations stay below this total dimension.
DM_DIM_CAP = 2048
#: Pure-component vectors may carry up to this many amplitudes.
VEC_DIM_CAP = 2 ** 14

HERM_ATOL = 1e-10
TRACE_ATOL = 1e-10
PSD_FLOOR = -1e-9


# ---------------------------------------------------------------------------
# elementary vectors and unitaries


def bell_vec(i: int, j: int) -> np.ndarray:
    """Two-qubit Bell state with phase index i and amplitude index j."""
    v = np.zeros(4, dtype=complex)
    # (|0, 0-j> + (-1)^i |1, 1-j>) / sqrt(2)
    v[0 * 2 + (0 - j) % 2] = 1.0
    v[1 * 2 + (1 - j) % 2] = (-1.0) ** i
    return v / math.sqrt(2.0)


def basis_vec(dim: int, k: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def phi_vec(d: int, m: int = 0, n: int = 0) -> np.ndarray:
    """Generalized d-level maximally entangled state |Phi^d_{mn}>."""
    v = np.zeros(d * d, dtype=complex)
    for k in range(d):
        v[k * d + (k - n) % d] = np.exp(2j * np.pi * k * m / d)
    return v / math.sqrt(d)


def shift_matrix(d: int) -> np.ndarray:
    """X_d with X|k> = |k-1 mod d>."""
    x = np.zeros((d, d), dtype=complex)
    for k in range(d):
        x[(k - 1) % d, k] = 1.0
    return x


def hybrid_cx(d: int) -> np.ndarray:
    """Qubit-controlled X_d on a (2, d) pair."""
    p0 = np.diag([1.0, 0.0]).astype(complex)
    p1 = np.diag([0.0, 1.0]).astype(complex)
    return np.kron(p0, np.eye(d, dtype=complex)) + np.kron(p1, shift_matrix(d))


def cnot() -> np.ndarray:
    return hybrid_cx(2)


def hadamard() -> np.ndarray:
    return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)


def coarse_transfer(params: CoarseParams) -> np.ndarray:
    """Transfer gate sum_k |k><k| (x) X_m^group(k) on a (d, m) pair."""
    d, m = params.d, params.m
    xm = shift_matrix(m)
    u = np.zeros((d * m, d * m), dtype=complex)
    for k in range(d):
        u[k * m:(k + 1) * m, k * m:(k + 1) * m] = np.linalg.matrix_power(
            xm, coarse_group(k, params))
    return u


def fourier_vec(m: int, l: int) -> np.ndarray:
    q = np.arange(m)
    return np.exp(-2j * np.pi * q * l / m) / math.sqrt(m)


def phase_correction(params: CoarseParams, l: int) -> np.ndarray:
    """Decorrelation phase gate on the d-level A register after the Fourier
    readout returned outcome l."""
    g = np.array([coarse_group(k, params) for k in range(params.d)])
    return np.diag(np.exp(2j * np.pi * g * l / params.m))


# ---------------------------------------------------------------------------
# tensor bookkeeping


def apply_unitary_vec(psi: np.ndarray, dims: tuple[int, ...], u: np.ndarray,
                      targets: tuple[int, ...]) -> np.ndarray:
    """Apply an operator on the given subsystems of a state vector
    (also used with projectors for measurement branches)."""
    tdims = tuple(dims[t] for t in targets)
    tdim = int(np.prod(tdims))
    if u.shape != (tdim, tdim):
        raise ValueError(f"gate shape {u.shape} does not match targets {tdims}")
    work = psi.reshape(dims)
    rest = [i for i in range(len(dims)) if i not in targets]
    work = np.transpose(work, list(targets) + rest)
    work = work.reshape(tdim, -1)
    work = u @ work
    work = work.reshape(tdims + tuple(dims[i] for i in rest))
    inv = np.argsort(list(targets) + rest)
    return np.transpose(work, inv).reshape(-1)


def reduced_dm_vec(psi: np.ndarray, dims: tuple[int, ...],
                   keep: tuple[int, ...]) -> np.ndarray:
    """Reduced density matrix of the kept subsystems of a pure state."""
    rest = [i for i in range(len(dims)) if i not in keep]
    kdim = int(np.prod([dims[i] for i in keep]))
    work = np.transpose(psi.reshape(dims), rest + list(keep)).reshape(-1, kdim)
    return np.einsum("rx,ry->xy", work, work.conj())


def embed_operator(op: np.ndarray, dims: tuple[int, ...],
                   targets: tuple[int, ...]) -> np.ndarray:
    """Expand an operator on the targets to the full space (kron + permute)."""
    n = len(dims)
    rest = [i for i in range(n) if i not in targets]
    full = np.kron(op, np.eye(int(np.prod([dims[i] for i in rest])) or 1,
                              dtype=complex))
    order = list(targets) + rest
    tensor = full.reshape([dims[i] for i in order] * 2)
    inv = np.argsort(order)
    perm = list(inv) + [n + i for i in inv]
    dim = int(np.prod(dims))
    return np.transpose(tensor, perm).reshape(dim, dim)


# ---------------------------------------------------------------------------
# dense states


@dataclass
class DenseState:
    """Density matrix over a labelled tensor factorisation."""

    matrix: np.ndarray
    dims: tuple[int, ...]
    parties: tuple[str, ...]

    def __post_init__(self):
        dim = int(np.prod(self.dims))
        if self.matrix.shape != (dim, dim):
            raise ValueError(f"matrix shape {self.matrix.shape} != dims {self.dims}")
        if len(self.parties) != len(self.dims):
            raise ValueError("one party tag per subsystem required")

    def validate(self) -> "DenseState":
        m = self.matrix
        if np.linalg.norm(m - m.conj().T) > HERM_ATOL:
            raise ValueError("state is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace is {np.trace(m).real}, expected 1")
        eigs = np.linalg.eigvalsh(m)
        if eigs.min() < PSD_FLOOR:
            raise ValueError(f"negative eigenvalue {eigs.min()}")
        return self

    def clamped(self) -> "DenseState":
        """Clamp tiny negative eigenvalues accumulated by round-off."""
        eigs, vecs = np.linalg.eigh(self.matrix)
        if eigs.min() < PSD_FLOOR:
            raise ValueError(f"negative eigenvalue {eigs.min()}")
        eigs = np.clip(eigs, 0.0, None)
        m = (vecs * eigs) @ vecs.conj().T
        return DenseState(m / np.trace(m).real, self.dims, self.parties)

    def apply_unitary(self, u: np.ndarray, targets: tuple[int, ...]) -> "DenseState":
        full = embed_operator(u, self.dims, targets)
        return DenseState(full @ self.matrix @ full.conj().T,
                          self.dims, self.parties)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def pure_components(spec: StateSpec) -> list[tuple[float, np.ndarray]]:
    """Orthogonal pure-state decomposition of one noisy copy.

    Bell-diagonal families decompose over Bell states, the amplitude-damping
    family over {Psi_00, |01>}.  Werner uses its Bell-diagonal form, which is
    valid at every fidelity.
    """
    if spec.family is Family.AMPLITUDE_DAMPING:
        return [(spec.F, bell_vec(0, 0)),
                (1 - spec.F, basis_vec(4, 1))]
    comps = []
    for (i, j), w in zip(((0, 0), (0, 1), (1, 0), (1, 1)),
                         spec.bell_diagonal_weights()):
        if w > 0.0:
            comps.append((w, bell_vec(i, j)))
    return comps


LABEL_VECTORS = {
    ErrorLabel.GOOD: bell_vec(0, 0),
    ErrorLabel.TYPE1: basis_vec(4, 1),
    ErrorLabel.TYPE2: basis_vec(4, 2),
    ErrorLabel.TYPE3: bell_vec(1, 0),
    ErrorLabel.Z00: basis_vec(4, 0),
    ErrorLabel.Z11: basis_vec(4, 3),
}


def density_of(spec: StateSpec) -> np.ndarray:
    """4x4 density matrix of one copy."""
    rho = np.zeros((4, 4), dtype=complex)
    for w, v in pure_components(spec):
        rho += w * np.outer(v, v.conj())
    return rho


def build_ensemble(spec: StateSpec, n: int, aux: int | None = None) -> DenseState:
    """rho^(x)n, optionally joined by a d-level maximally entangled auxiliary."""
    dim = 4 ** n * (aux ** 2 if aux else 1)
    if dim > DM_DIM_CAP:
        raise DimensionCapError(
            f"total dimension {dim} exceeds density-matrix cap {DM_DIM_CAP}")
    rho = density_of(spec)
    full = np.array([[1.0 + 0j]])
    for _ in range(n):
        full = np.kron(full, rho)
    dims: list[int] = [2, 2] * n
    parties: list[str] = ["A", "B"] * n
    if aux:
        v = phi_vec(aux)
        full = np.kron(full, np.outer(v, v.conj()))
        dims += [aux, aux]
        parties += ["A", "B"]
    return DenseState(full, tuple(dims), tuple(parties))


def measure(state: DenseState, povm: list[np.ndarray],
            targets: tuple[int, ...] | None = None):
    """Born-rule outcome probabilities and post-measurement states.

    POVM elements must sum to the identity on the measured factor; elements
    are applied as projector-style updates E rho E / p.
    """
    if targets is None:
        ops = povm
    else:
        ops = [embed_operator(e, state.dims, targets) for e in povm]
    total = sum(ops)
    if np.linalg.norm(total - np.eye(total.shape[0])) > 1e-10:
        raise ValueError("POVM elements do not sum to the identity")
    probs, posts = [], []
    for e in ops:
        p = float(np.trace(e @ state.matrix).real)
        probs.append(p)
        if p > 1e-14:
            posts.append(DenseState(e @ state.matrix @ e.conj().T / p,
                                    state.dims, state.parties))
        else:
            posts.append(None)
    return np.array(probs), posts


def fidelity_with(state: DenseState, reference: np.ndarray) -> float:
    """Overlap <ref| rho |ref> with a pure reference vector."""
    return float((reference.conj() @ state.matrix @ reference).real)


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    eigs = np.linalg.eigvalsh(rho - sigma)
    return 0.5 * float(np.abs(eigs).sum())


# ---------------------------------------------------------------------------
# ensemble pipelines (mixture-of-component-vectors route)


def _component_configs(spec: StateSpec, n: int):
    comps = pure_components(spec)
    for combo in itertools.product(comps, repeat=n):
        w = math.prod(c[0] for c in combo)
        yield w, [c[1] for c in combo]


def eng_distribution(spec: StateSpec, n: int, d: int) -> np.ndarray:
    """Index distribution of the auxiliary after the full counter cascade,
    read out in the generalized Z (x) Z difference basis.

    Every mixture component is evolved as a state vector through explicit
    hybrid controlled-X matrices; the result is exact.
    """
    dim = 4 ** n * d * d
    if dim > VEC_DIM_CAP:
        raise DimensionCapError(f"{dim} amplitudes exceed cap {VEC_DIM_CAP}")
    dims = tuple([2, 2] * n + [d, d])
    aux_a, aux_b = 2 * n, 2 * n + 1
    cx = hybrid_cx(d)
    probs = np.zeros(d)
    for w, copies in _component_configs(spec, n):
        psi = np.array([1.0 + 0j])
        for v in copies:
            psi = np.kron(psi, v)
        psi = np.kron(psi, phi_vec(d))
        for i in range(n):
            psi = apply_unitary_vec(psi, dims, cx, (2 * i, aux_a))
            psi = apply_unitary_vec(psi, dims, cx, (2 * i + 1, aux_b))
        rho_aux = reduced_dm_vec(psi, dims, (aux_a, aux_b))
        diag = np.diag(rho_aux).real.reshape(d, d)
        for j in range(d):
            a = np.arange(d)
            probs[j] += w * diag[a, (a - j) % d].sum()
    return probs


def pass_fail_prob(spec: StateSpec) -> float:
    """Single-copy pass probability of the family's local test, from the
    density matrix.

    Amplitude damping and Werner states are checked for computational-basis
    coincidence; dephasing states for conjugate-basis coincidence.
    """
    rho = density_of(spec)
    if spec.family is Family.DEPHASING:
        h2 = np.kron(hadamard(), hadamard())
        rho = h2 @ rho @ h2.conj().T
    diag = np.diag(rho).real
    return float(diag[0] + diag[3])


# ---------------------------------------------------------------------------
# coarse-graining pipeline


def _p2_state(j: int, params: CoarseParams) -> tuple[np.ndarray, tuple[int, ...]]:
    """Auxiliary at definite index j, extra registers attached and transfer
    gates applied.  Layout: (auxA, auxB, regA, regB)."""
    d, m = params.d, params.m
    dims = (d, d, m, m)
    psi = np.kron(phi_vec(d, 0, j), np.kron(basis_vec(m, 0), basis_vec(m, 0)))
    u = coarse_transfer(params)
    psi = apply_unitary_vec(psi, dims, u, (0, 2))
    psi = apply_unitary_vec(psi, dims, u, (1, 3))
    return psi, dims


def _povm_projector(params: CoarseParams) -> np.ndarray:
    """Outcome-M projector on the (regA, regB) pair.

    After the register teleport the A-side value plays the reference role l
    and the B-side value must read l + delta with delta below delta0."""
    m = params.m
    proj = np.zeros((m * m, m * m), dtype=complex)
    for delta in range(params.delta0):
        for l in range(m):
            idx = l * m + (l + delta) % m
            proj[idx, idx] = 1.0
    return proj


def p2_measure_prob(j: int, params: CoarseParams) -> float:
    """Dense-pipeline probability of the "above" outcome at definite j."""
    psi, dims = _p2_state(j, params)
    branch = apply_unitary_vec(psi, dims, _povm_projector(params), (2, 3))
    return float(np.vdot(branch, branch).real)


def p2_recovery(j: int, params: CoarseParams):
    """Run the full coarse-graining round at definite j and undo it.

    Returns (prob_M, recovered fidelity averaged over every outcome branch).
    The recovery applies the inverse transfer on the B side, a Fourier-basis
    readout of the teleported register and the conditional phase gate.
    """
    psi, dims = _p2_state(j, params)
    d, m = params.d, params.m
    proj_m = _povm_projector(params)
    proj_rest = np.eye(proj_m.shape[0]) - proj_m
    u_dag = coarse_transfer(params).conj().T
    target = phi_vec(d, 0, j)
    prob_m = 0.0
    avg_fid = 0.0
    for outcome, proj in enumerate((proj_m, proj_rest)):
        branch = apply_unitary_vec(psi, dims, proj, (2, 3))
        p_branch = float(np.vdot(branch, branch).real)
        if outcome == 0:
            prob_m = p_branch
        if p_branch < 1e-14:
            continue
        branch = branch / math.sqrt(p_branch)
        branch = apply_unitary_vec(branch, dims, u_dag, (1, 3))
        for l in range(m):
            # project the teleported register (layout slot 2) on |alpha_l>
            fv = fourier_vec(m, l)
            proj_l = np.outer(fv, fv.conj())
            sub = apply_unitary_vec(branch, dims, proj_l, (2,))
            p_l = float(np.vdot(sub, sub).real)
            if p_l < 1e-14:
                continue
            sub = sub / math.sqrt(p_l)
            sub = apply_unitary_vec(sub, dims, phase_correction(params, l), (0,))
            rho_aux = reduced_dm_vec(sub, dims, (0, 1))
            fid = float((target.conj() @ rho_aux @ target).real)
            avg_fid += p_branch * p_l * fid
    return prob_m, avg_fid


def p2_success_probability(spec: StateSpec, n: int, params: CoarseParams,
                           F0_above: bool) -> float:
    """Exact dense success probability of the coarse-grained protocol:
    counter cascade distribution folded with the readout response."""
    pr_j = eng_distribution(spec, n, params.d)
    pm = np.array([p2_measure_prob(j, params) for j in range(params.d)])
    if F0_above:
        return float(pr_j @ pm)
    return float(pr_j @ (1.0 - pm))


# ---------------------------------------------------------------------------
# blocking pipeline


def _conjugate_frame(spec: StateSpec) -> StateSpec:
    """Bilateral-Hadamard frame in which dephasing noise flips amplitudes."""
    if spec.family is Family.DEPHASING:
        return StateSpec(Family.BELL_DIAGONAL,
                         weights=(spec.F, 1 - spec.F, 0.0, 0.0))
    return StateSpec(Family.WERNER, F=spec.F)


def block_parity_distribution(spec: StateSpec, r: int) -> np.ndarray:
    """(p_even, p_odd) of one block of r copies, via explicit CNOT matrices
    and a computational-basis readout of the sacrificial copy."""
    frame = _conjugate_frame(spec)
    dim = 4 ** r
    if dim > VEC_DIM_CAP:
        raise DimensionCapError(f"{dim} amplitudes exceed cap {VEC_DIM_CAP}")
    dims = tuple([2, 2] * r)
    cx = cnot()
    target_a, target_b = 2 * (r - 1), 2 * (r - 1) + 1
    out = np.zeros(2)
    for w, copies in _component_configs(frame, r):
        psi = np.array([1.0 + 0j])
        for v in copies:
            psi = np.kron(psi, v)
        for i in range(r - 1):
            psi = apply_unitary_vec(psi, dims, cx, (2 * i, target_a))
            psi = apply_unitary_vec(psi, dims, cx, (2 * i + 1, target_b))
        rho_t = reduced_dm_vec(psi, dims, (target_a, target_b))
        diag = np.diag(rho_t).real
        p_even = diag[0] + diag[3]
        out[0] += w * p_even
        out[1] += w * (1.0 - p_even)
    return out


def kappa_distribution(spec: StateSpec, n_blocks: int, r: int) -> np.ndarray:
    """Distribution of the number of even-parity blocks, by convolving the
    independent per-block law."""
    p_even = block_parity_distribution(spec, r)[0]
    dist = np.array([1.0])
    for _ in range(n_blocks):
        dist = np.convolve(dist, [1.0 - p_even, p_even])
    return dist


def backaction_fidelity(spec: StateSpec, r: int = 2) -> float:
    """Mean fidelity of the surviving copies of one block after the parity
    readout, averaged over both outcomes with their Born weights."""
    frame = _conjugate_frame(spec)
    dims = tuple([2, 2] * r)
    cx = cnot()
    target_a, target_b = 2 * (r - 1), 2 * (r - 1) + 1
    ref = bell_vec(0, 0)
    mean_fid = 0.0
    for w, copies in _component_configs(frame, r):
        psi = np.array([1.0 + 0j])
        for v in copies:
            psi = np.kron(psi, v)
        for i in range(r - 1):
            psi = apply_unitary_vec(psi, dims, cx, (2 * i, target_a))
            psi = apply_unitary_vec(psi, dims, cx, (2 * i + 1, target_b))
        # parity readout: project the target pair on |ab><ab|
        for a in range(2):
            for b in range(2):
                proj = np.zeros((4, 4), dtype=complex)
                proj[a * 2 + b, a * 2 + b] = 1.0
                sub = apply_unitary_vec(psi, dims, proj, (target_a, target_b))
                p = float(np.vdot(sub, sub).real)
                if p < 1e-14:
                    continue
                sub = sub / math.sqrt(p)
                for i in range(r - 1):
                    rho_c = reduced_dm_vec(sub, dims, (2 * i, 2 * i + 1))
                    fid = float((ref.conj() @ rho_c @ ref).real)
                    mean_fid += w * p * fid / (r - 1)
    return mean_fid


# ---------------------------------------------------------------------------
# recurrence circuit


def _sqrt_ix(sign: int) -> np.ndarray:
    """exp(sign * i pi X / 4), the single-qubit rotation pair used by the
    two-pair recurrence round."""
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    return (np.eye(2) + sign * 1j * x) / math.sqrt(2.0)


def recurrence_circuit(weights: tuple[float, float, float, float]):
    """One dense recurrence round on two Bell-diagonal pairs.

    A rotates both her qubits by sqrt(-iX), B by sqrt(+iX); a bilateral CNOT
    maps pair 1 onto pair 2, pair 2 is read out in the computational basis
    and coincident outcomes are kept.  Returns (new weights, success prob).
    """
    spec = StateSpec(Family.BELL_DIAGONAL, weights=tuple(weights))
    rho = density_of(spec)
    rho2 = np.kron(rho, rho)
    dims = (2, 2, 2, 2)  # A1 B1 A2 B2
    ua, ub = _sqrt_ix(-1), _sqrt_ix(+1)
    rot = np.kron(np.kron(ua, ub), np.kron(ua, ub))
    rho2 = rot @ rho2 @ rot.conj().T
    full_cx_a = embed_operator(cnot(), dims, (0, 2))
    full_cx_b = embed_operator(cnot(), dims, (1, 3))
    u = full_cx_b @ full_cx_a
    rho2 = u @ rho2 @ u.conj().T
    kept = np.zeros((4, 4), dtype=complex)
    p_succ = 0.0
    for a in range(2):
        proj = np.zeros((4, 4), dtype=complex)
        proj[a * 2 + a, a * 2 + a] = 1.0
        full = embed_operator(proj, dims, (2, 3))
        sub = full @ rho2 @ full.conj().T
        # keep pair 1: trace out pair 2
        sub_t = sub.reshape(2, 2, 2, 2, 2, 2, 2, 2)
        red = np.einsum("abcdefcd->abef", sub_t).reshape(4, 4)
        kept += red
        p_succ += float(np.trace(red).real)
    kept = kept / p_succ
    new = [float((bell_vec(i, j).conj() @ kept @ bell_vec(i, j)).real)
           for (i, j) in ((0, 0), (0, 1), (1, 0), (1, 1))]
    return tuple(new), p_succ
