"""Finite-dimensional quantum-state kernel.

Polarization qubits with H -> |0>, V -> |1>. Covers waveplate-defined
projective measurements, the 16-setting two-qubit tomography pipeline with
iterative maximum-likelihood reconstruction, entanglement metrics, and
Bell-state measurement for entanglement swapping.

Waveplate convention: light traverses the quarter-wave plate, then the
half-wave plate, then a horizontal polarizer. Jones matrices are
fast-axis-at-angle rotations of diag(1, -1) (HWP, retardance pi) and
diag(1, i) (QWP, retardance pi/2). Under this composition the canonical
angle set {0, 22.5} x {0, 45} per arm measures H at (0, 0), L at (22.5, 0),
R at (0, 45) and D at (22.5, 45), and the 16 two-arm settings are
informationally complete.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "KET_H",
    "KET_V",
    "KET_D",
    "KET_A",
    "KET_R",
    "KET_L",
    "BELL_LABELS",
    "bell_state",
    "ket_to_density",
    "werner_state",
    "assert_density_matrix",
    "partial_trace_two_qubit",
    "projector_from_waveplates",
    "WaveplateSetting",
    "canonical_settings",
    "setting_projector",
    "expected_coincidences",
    "TomographyRecord",
    "simulate_tomography",
    "TomographyResult",
    "mle_reconstruct",
    "fidelity",
    "concurrence",
    "bell_parameter",
    "purity",
    "BsmResult",
    "bsm_outcome_probabilities",
    "bell_state_measure",
    "SwapResult",
    "entanglement_swap_demo",
    "density_matrix_to_json",
    "density_matrix_from_json",
    "records_to_json",
    "records_from_json",
]

KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
KET_D = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
KET_A = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
KET_R = np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0)
KET_L = np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2.0)

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

BELL_LABELS = ("phi_plus", "phi_minus", "psi_plus", "psi_minus")

_BELL_VECTORS = {
    "phi_plus": np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2.0),
    "phi_minus": np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2.0),
    "psi_plus": np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2.0),
    "psi_minus": np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2.0),
}


def bell_state(label: str) -> np.ndarray:
    """One of the four Bell kets, as a length-4 state vector."""
    if label not in _BELL_VECTORS:
        raise ValueError(f"unknown Bell label {label!r}; expected one of {BELL_LABELS}")
    return _BELL_VECTORS[label].copy()


def ket_to_density(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def werner_state(p: float) -> np.ndarray:
    """p |phi+><phi+| + (1-p) I/4, the standard noisy-entanglement family."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter must be in [0, 1], got {p}")
    return p * ket_to_density(bell_state("phi_plus")) + (1.0 - p) * np.eye(4) / 4.0


def assert_density_matrix(rho: np.ndarray, herm_tol=1e-12, trace_tol=1e-12, eig_tol=-1e-10):
    """Validate Hermiticity, unit trace and positivity at the given tolerances."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > herm_tol:
        raise ValueError("density matrix is not Hermitian at tolerance")
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise ValueError(f"density matrix trace {np.trace(rho).real} != 1 at tolerance")
    eigvals = np.linalg.eigvalsh((rho + rho.conj().T) / 2.0)
    if np.min(eigvals) < eig_tol:
        raise ValueError(f"density matrix has negative eigenvalue {np.min(eigvals)}")
    return rho


def partial_trace_two_qubit(rho4q: np.ndarray, keep: tuple[int, int]) -> np.ndarray:
    """Reduced two-qubit state of a four-qubit density matrix."""
    rho = np.asarray(rho4q, dtype=complex).reshape([2] * 8)
    drop = tuple(sorted(set(range(4)) - set(keep)))
    for q in sorted(drop, reverse=True):
        rho = np.trace(rho, axis1=q, axis2=q + rho.ndim // 2)
    d = int(round(math.sqrt(rho.size)))
    return rho.reshape(d, d)


# ---------------------------------------------------------------------------
# waveplate projectors and tomography settings


def _rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _hwp(theta_deg: float) -> np.ndarray:
    r = _rotation(math.radians(theta_deg))
    return r @ np.diag([1.0, -1.0]).astype(complex) @ r.conj().T


def _qwp(theta_deg: float) -> np.ndarray:
    r = _rotation(math.radians(theta_deg))
    return r @ np.diag([1.0, 1.0j]) @ r.conj().T


def projector_from_waveplates(hwp_deg: float, qwp_deg: float) -> np.ndarray:
    """Rank-1 projector measured by QWP -> HWP -> horizontal polarizer."""
    u = _hwp(hwp_deg) @ _qwp(qwp_deg)
    psi = u.conj().T @ KET_H
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class WaveplateSetting:
    """Waveplate angles (degrees) for both tomography arms."""

    hwp1_deg: float
    qwp1_deg: float
    hwp2_deg: float
    qwp2_deg: float


_ARM_ANGLES = ((0.0, 0.0), (22.5, 0.0), (0.0, 45.0), (22.5, 45.0))


def canonical_settings() -> list[WaveplateSetting]:
    """The 16 canonical two-arm settings, {0, 22.5} x {0, 45} per arm."""
    return [
        WaveplateSetting(h1, q1, h2, q2)
        for (h1, q1) in _ARM_ANGLES
        for (h2, q2) in _ARM_ANGLES
    ]


def setting_projector(setting: WaveplateSetting) -> np.ndarray:
    """Two-qubit coincidence projector P1 x P2 for a setting."""
    p1 = projector_from_waveplates(setting.hwp1_deg, setting.qwp1_deg)
    p2 = projector_from_waveplates(setting.hwp2_deg, setting.qwp2_deg)
    return np.kron(p1, p2)


def expected_coincidences(rho: np.ndarray, setting: WaveplateSetting, n_ref: int) -> float:
    """Expected coincidence count N * Tr[(P1 x P2) rho]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"two-qubit state required, got shape {rho.shape}")
    if n_ref < 0:
        raise ValueError("reference count must be non-negative")
    value = float(np.trace(setting_projector(setting) @ rho).real) * n_ref
    return max(value, 0.0)


@dataclass(frozen=True)
class TomographyRecord:
    setting: WaveplateSetting
    coincidences: float
    n_ref: int


def simulate_tomography(
    rho: np.ndarray, n_ref: int, seed: int, noiseless: bool = False
) -> list[TomographyRecord]:
    """Coincidence counts for the canonical settings, Poisson unless noiseless."""
    assert_density_matrix(rho, herm_tol=1e-9, trace_tol=1e-9, eig_tol=-1e-7)
    rng = np.random.default_rng(seed)
    records = []
    for setting in canonical_settings():
        lam = expected_coincidences(rho, setting, n_ref)
        count = lam if noiseless else int(rng.poisson(lam))
        records.append(TomographyRecord(setting=setting, coincidences=count, n_ref=n_ref))
    return records


# ---------------------------------------------------------------------------
# maximum-likelihood reconstruction


@dataclass
class TomographyResult:
    rho: np.ndarray
    converged: bool
    n_iter: int
    log_likelihood: float
    loglik_history: list[float] = field(default_factory=list)
    clipped_mass: float = 0.0


def _poisson_loglik(counts, n_ref, probs, scale):
    lam = np.maximum(scale * n_ref * probs, 1e-300)
    terms = -lam
    nz = counts > 0
    terms[nz] += counts[nz] * np.log(lam[nz])
    return float(np.sum(terms))


def mle_reconstruct(
    records: list[TomographyRecord],
    likelihood_tol: float = 1e-10,
    max_iter: int = 10_000,
) -> TomographyResult:
    """Maximum-likelihood density matrix from the 16-setting dataset.

    Fixed-point iteration rho <- G^-1 R rho R G^-1 with
    R = sum_k (n_k / lambda_k) Pi_k and G = sum_k Pi_k; G-normalization makes
    the truth a fixed point even though the canonical projectors do not sum
    to the identity. The Poisson scale is re-optimized in closed form every
    sweep. Steps are applied as an adaptive power of the Hermitian step
    operator: the exponent grows while the likelihood keeps rising and is
    diluted by a factor 0.5 on any decrease, so the likelihood is
    non-decreasing by construction and boundary (near-pure) solutions are
    reached without millions of sweeps.
    """
    canonical = canonical_settings()
    by_setting = {}
    for rec in records:
        key = (rec.setting.hwp1_deg, rec.setting.qwp1_deg, rec.setting.hwp2_deg, rec.setting.qwp2_deg)
        if key in by_setting:
            raise ValueError(f"duplicated setting {rec.setting}")
        by_setting[key] = rec
    keys = [(s.hwp1_deg, s.qwp1_deg, s.hwp2_deg, s.qwp2_deg) for s in canonical]
    missing = [k for k in keys if k not in by_setting]
    if missing or len(by_setting) != len(keys):
        raise ValueError(
            "records must cover the canonical informationally complete set exactly once; "
            f"missing={missing}, extra={sorted(set(by_setting) - set(keys))}"
        )
    ordered = [by_setting[k] for k in keys]
    counts = np.array([rec.coincidences for rec in ordered], dtype=float)
    if np.any(counts < 0):
        raise ValueError("coincidence counts must be non-negative")
    n_ref = np.array([rec.n_ref for rec in ordered], dtype=float)
    projectors = np.stack([setting_projector(s) for s in canonical])
    g = projectors.sum(axis=0)
    g_vals, g_vecs = np.linalg.eigh(g)
    g_sqrt = (g_vecs * np.sqrt(g_vals)) @ g_vecs.conj().T
    g_isqrt = (g_vecs / np.sqrt(g_vals)) @ g_vecs.conj().T

    def probs_of(rho):
        return np.maximum(np.einsum("kij,ji->k", projectors, rho).real, 1e-300)

    def scale_of(probs):
        denom = float(np.sum(n_ref * probs))
        if denom <= 0 or counts.sum() == 0:
            return 1.0
        return float(counts.sum()) / denom

    def loglik(rho):
        probs = probs_of(rho)
        return _poisson_loglik(counts, n_ref, probs, scale_of(probs))

    rho = np.eye(4, dtype=complex) / 4.0
    current = loglik(rho)
    history = [current]
    converged = False
    n_done = 0
    gamma = 1.0
    for n_done in range(1, max_iter + 1):
        probs = probs_of(rho)
        lam = np.maximum(scale_of(probs) * n_ref * probs, 1e-300)
        ratios = counts / lam
        r_op = np.einsum("k,kij->ij", ratios, projectors)
        s_op = g_isqrt @ r_op @ g_isqrt
        s_op = (s_op + s_op.conj().T) / 2.0
        s_vals, s_vecs = np.linalg.eigh(s_op)
        s_vals = np.maximum(s_vals, 0.0)
        top = s_vals.max()
        if top <= 0:
            converged = True
            break
        s_vals /= top  # scale-free after the final trace normalization

        def candidate(power):
            s_pow = (s_vecs * s_vals**power) @ s_vecs.conj().T
            m = g_isqrt @ s_pow @ g_sqrt
            cand = m @ rho @ m.conj().T
            cand = (cand + cand.conj().T) / 2.0
            tr = np.trace(cand).real
            if tr <= 0 or not np.isfinite(tr):
                return None, -np.inf
            return cand / tr, loglik(cand / tr)

        # Walk the exponent ladder down (dilution factor 0.5) until a step
        # with a meaningful likelihood gain appears; if none does, the
        # canonical step is already within tolerance of the optimum.
        accepted = False
        g_try = gamma
        best = (None, current)
        while g_try >= 1e-6:
            cand, cand_ll = candidate(g_try)
            if cand is not None and cand_ll >= current + likelihood_tol:
                rho = cand
                current = cand_ll
                history.append(current)
                accepted = True
                gamma = min(max(g_try, 1.0) * 1.5, 256.0)
                break
            if cand is not None and cand_ll > best[1]:
                best = (cand, cand_ll)
            g_try *= 0.5
        if not accepted:
            if best[0] is not None:
                rho = best[0]
                current = best[1]
                history.append(current)
            converged = True
            break

    eigvals, eigvecs = np.linalg.eigh(rho)
    clipped = float(-np.sum(eigvals[eigvals < 0.0]))
    eigvals = np.maximum(eigvals, 0.0)
    rho = (eigvecs * eigvals) @ eigvecs.conj().T
    rho /= np.trace(rho).real
    return TomographyResult(
        rho=rho,
        converged=converged,
        n_iter=n_done,
        log_likelihood=current,
        loglik_history=history,
        clipped_mass=clipped,
    )


# ---------------------------------------------------------------------------
# state metrics


def _clipped_eigvalsh(mat: np.ndarray) -> np.ndarray:
    # Square roots blow eigenvalue noise of order eps up to sqrt(eps), so
    # rank-deficiency noise must be zeroed before taking them.
    eigvals = np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)
    floor = max(eigvals.max(initial=0.0), 0.0) * 1e-13
    return np.where(eigvals > floor, eigvals, 0.0)


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh((mat + mat.conj().T) / 2.0)
    floor = max(eigvals.max(initial=0.0), 0.0) * 1e-13
    eigvals = np.where(eigvals > floor, eigvals, 0.0)
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


def fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) target sqrt(rho)))^2."""
    rho = np.asarray(rho, dtype=complex)
    target = np.asarray(target, dtype=complex)
    if rho.shape != target.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {target.shape}")
    sq = _sqrt_psd(rho)
    value = float(np.sum(np.sqrt(_clipped_eigvalsh(sq @ target @ sq)))) ** 2
    return min(max(value, 0.0), 1.0)


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"two-qubit state required, got shape {rho.shape}")
    yy = np.kron(_PAULI[1], _PAULI[1])
    rho_tilde = yy @ rho.conj() @ yy
    eigvals = np.linalg.eigvals(rho @ rho_tilde)
    lam = np.sqrt(np.maximum(np.sort(eigvals.real)[::-1], 0.0))
    return max(0.0, float(lam[0] - lam[1] - lam[2] - lam[3]))


def bell_parameter(rho: np.ndarray) -> float:
    """Maximal CHSH value 2*sqrt(t1 + t2) from the Pauli correlation matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"two-qubit state required, got shape {rho.shape}")
    t = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            t[i, j] = float(np.trace(rho @ np.kron(_PAULI[i], _PAULI[j])).real)
    eigvals = np.sort(np.linalg.eigvalsh(t.T @ t))[::-1]
    return 2.0 * math.sqrt(max(eigvals[0] + eigvals[1], 0.0))


def purity(rho: np.ndarray) -> float:
    """Tr rho^2."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)


# ---------------------------------------------------------------------------
# Bell-state measurement and entanglement swapping


@dataclass
class BsmResult:
    outcome: str
    probability: float
    remainder: np.ndarray


def bsm_outcome_probabilities(state: np.ndarray, pair: tuple[int, int]) -> dict[str, tuple[float, np.ndarray]]:
    """Projection of an indexed qubit pair onto the Bell basis.

    Returns outcome -> (probability, normalized remainder ket on the other
    two qubits, ascending index order).
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (16,):
        raise ValueError(f"four-qubit state vector required, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("state must be normalized")
    i, j = pair
    if i == j or not all(0 <= q < 4 for q in (i, j)):
        raise ValueError(f"pair must be two distinct qubit indices in 0..3, got {pair}")
    tensor = psi.reshape([2] * 4)
    rest = [q for q in range(4) if q not in (i, j)]
    out = {}
    for label in BELL_LABELS:
        bell = _BELL_VECTORS[label].reshape(2, 2)
        amp = np.tensordot(bell.conj(), tensor, axes=([0, 1], [i, j]))
        # tensordot leaves the remaining axes in ascending original order
        amp = amp.reshape(4)
        prob = float(np.vdot(amp, amp).real)
        remainder = amp / math.sqrt(prob) if prob > 0 else np.zeros(4, dtype=complex)
        out[label] = (prob, remainder)
    return out


def bell_state_measure(state: np.ndarray, pair: tuple[int, int], seed: int) -> BsmResult:
    """Born-rule sampled Bell-state measurement on one pair of a 4-qubit ket."""
    outcomes = bsm_outcome_probabilities(state, pair)
    labels = list(outcomes)
    probs = np.array([outcomes[lab][0] for lab in labels])
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    pick = labels[int(rng.choice(len(labels), p=probs))]
    prob, remainder = outcomes[pick]
    return BsmResult(outcome=pick, probability=prob, remainder=remainder)


@dataclass
class SwapResult:
    outcome: str
    concurrence_before: float
    concurrence_after: float


def entanglement_swap_demo(seed: int) -> SwapResult:
    """Swap entanglement onto the outer pair of two Bell pairs.

    Builds |phi+> on qubits (A, F_A) and (F_B, B), measures (F_A, F_B) in
    the Bell basis, and reports the concurrence of (A, B) before and after.
    """
    psi = np.kron(bell_state("phi_plus"), bell_state("phi_plus"))
    rho_ab_before = partial_trace_two_qubit(ket_to_density(psi), keep=(0, 3))
    before = concurrence(rho_ab_before)
    result = bell_state_measure(psi, pair=(1, 2), seed=seed)
    after = concurrence(ket_to_density(result.remainder))
    return SwapResult(outcome=result.outcome, concurrence_before=before, concurrence_after=after)


# ---------------------------------------------------------------------------
# serialization


def density_matrix_to_json(rho: np.ndarray) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {
        "dim": rho.shape[0],
        "real": rho.real.tolist(),
        "imag": rho.imag.tolist(),
    }


def density_matrix_from_json(obj: dict) -> np.ndarray:
    real = np.asarray(obj["real"], dtype=float)
    imag = np.asarray(obj["imag"], dtype=float)
    return real + 1j * imag


def records_to_json(records: list[TomographyRecord]) -> list[dict]:
    return [
        {
            "hwp1_deg": rec.setting.hwp1_deg,
            "qwp1_deg": rec.setting.qwp1_deg,
            "hwp2_deg": rec.setting.hwp2_deg,
            "qwp2_deg": rec.setting.qwp2_deg,
            "coincidences": rec.coincidences,
            "n_ref": rec.n_ref,
        }
        for rec in records
    ]


def records_from_json(objs: list[dict]) -> list[TomographyRecord]:
    return [
        TomographyRecord(
            setting=WaveplateSetting(
                obj["hwp1_deg"], obj["qwp1_deg"], obj["hwp2_deg"], obj["qwp2_deg"]
            ),
            coincidences=obj["coincidences"],
            n_ref=obj["n_ref"],
        )
        for obj in objs
    ]
