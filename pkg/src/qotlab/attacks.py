"""Adversarial strategies against the transfer and commitment protocols.

Four families:

* the unambiguous-discrimination receiver lives in the transfer module
  (run it with strategy "usd"); this module adds the committer-side attacks,
* the purification attack on share-parity commitments: the two commitments
  reduce on the receiver's side to two highly overlapping mixed states, and
  a committer who keeps a purification can steer one onto the other with a
  local unitary, switching her bit almost undetectably,
* the probe attack on the entangled-pair commitment: the committer copies
  the transit qubit onto a probe before encoding, which the receiver's pair
  measurement detects with probability one half per qubit,
* the same probe strategy against the blinded channel (where the secret
  rotation makes it visibly noisy), and the qubit-omission attack on the
  direct commitment, which breaks binding unless every missing detector
  click aborts the run.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bitcommit import (
    P5OpenMessage,
    PROTOCOL_P5,
    blinded_qubit,
    p3_bases,
    p3_prepare_and_encode,
    p5_measure_record,
    p5_verify_records,
    parity_function,
)
from .ot12 import SecurityEstimate, monte_carlo_estimate
from .qsim import (
    DensityMatrix,
    RngStream,
    StateVector,
    apply_on_qubit,
    bell_state,
    born_probabilities,
    fidelity,
    make_nonorthogonal_pair,
    rotation_plane,
)
from .rot import BASIS_0, BASIS_1, PERP_OUTCOME, measurement_bases

_ENCODE_ANGLE = float(np.pi / 4)
_SUPPORT_TOL = 1e-9


# ---------------------------------------------------------------------------
# purification attack on share-parity commitments


@dataclass(frozen=True)
class NoGoInstance:
    """One attack instance: the receiver sees two_k qubits whose encoded bits
    have a parity fixed by the committed value."""

    two_k: int
    theta: float = _ENCODE_ANGLE
    parity0: int = 0
    parity1: int = 1

    def __post_init__(self):
        if self.two_k < 2 or self.two_k % 2 != 0:
            raise ValueError("two_k must be an even integer >= 2")
        if self.two_k > 10:
            raise ValueError("two_k above 10 needs more than dense matrices")
        if not 0.0 <= self.theta <= np.pi / 2:
            raise ValueError("theta must lie in [0, pi/2]")
        if self.parity0 not in (0, 1) or self.parity1 not in (0, 1):
            raise ValueError("target parities must be bits")


@dataclass(frozen=True)
class CheatReport:
    fidelity: float
    achieved_overlap: float
    detection_probability: float

    def __post_init__(self):
        for name in ("fidelity", "achieved_overlap", "detection_probability"):
            value = getattr(self, name)
            if not -1e-12 <= value <= 1.0 + 1e-12:
                raise ValueError(f"{name} must be a probability-like value in [0, 1]")
        if abs(self.achieved_overlap - self.fidelity) > 1e-8:
            raise ValueError("constructed unitary fails to attain the fidelity")

    def to_dict(self) -> dict:
        return {
            "fidelity": self.fidelity,
            "achieved_overlap": self.achieved_overlap,
            "detection_probability": self.detection_probability,
        }


def _parity_class_density(two_k: int, theta: float, parity: int) -> DensityMatrix:
    psi0, psi1 = make_nonorthogonal_pair(theta)
    single = (psi0.amps, psi1.amps)
    dim = 2**two_k
    members = []
    for word in range(dim):
        if bin(word).count("1") & 1 != parity:
            continue
        amps = np.ones(1, dtype=np.complex128)
        for pos in range(two_k):
            bit = (word >> (two_k - 1 - pos)) & 1
            amps = np.kron(amps, single[bit])
        members.append(amps)
    stacked = np.array(members)
    entries = np.einsum("si,sj->ij", stacked, stacked.conj()) / len(members)
    return DensityMatrix(num_qubits=two_k, entries=entries)


def nogo_reduced_states(inst: NoGoInstance) -> tuple[DensityMatrix, DensityMatrix]:
    """Receiver-side states for commit 0 and commit 1.

    Each is the uniform mixture, over all two_k-bit strings of the target
    parity, of the product of the corresponding non-orthogonal signal states.
    """
    return (
        _parity_class_density(inst.two_k, inst.theta, inst.parity0),
        _parity_class_density(inst.two_k, inst.theta, inst.parity1),
    )


def nogo_fidelity(inst: NoGoInstance) -> float:
    rho0, rho1 = nogo_reduced_states(inst)
    return fidelity(rho0, rho1)


def _purification_matrix(rho: DensityMatrix) -> np.ndarray:
    """Amplitudes of an eigen-purification, laid out ancilla index by rows.

    Row k, column i holds sqrt(lam_k) * v_k[i], so the purifying vector is
    sum_k sqrt(lam_k) |k>_ancilla |v_k>_system and a cheating unitary on the
    ancilla acts by left multiplication.
    """
    vals, vecs = np.linalg.eigh(rho.entries)
    vals = np.clip(vals, 0.0, None)
    vals[vals < vals.max() * 1e-12] = 0.0
    vals = vals / vals.sum()
    return np.sqrt(vals)[:, np.newaxis] * vecs.T


def nogo_cheating_unitary(rho0: DensityMatrix, rho1: DensityMatrix) -> np.ndarray:
    """Ancilla unitary steering the purification of rho0 onto that of rho1.

    Built from the singular value decomposition of the cross-Gram matrix of
    the two eigen-purifications; the achieved overlap equals the fidelity.
    """
    if rho0.entries.shape != rho1.entries.shape:
        raise ValueError("the two states must share one dimension")
    m0 = _purification_matrix(rho0)
    m1 = _purification_matrix(rho1)
    cross_gram = m0 @ m1.conj().T
    u, _, vh = np.linalg.svd(cross_gram)
    return vh.conj().T @ u.conj().T


def uhlmann_overlap(rho0: DensityMatrix, rho1: DensityMatrix, unitary: np.ndarray) -> float:
    """|<purification1 | (U x I) purification0>| for the eigen-purifications."""
    m0 = _purification_matrix(rho0)
    m1 = _purification_matrix(rho1)
    return float(abs(np.vdot(m1, unitary @ m0)))


def nogo_cheat_report(inst: NoGoInstance) -> CheatReport:
    rho0, rho1 = nogo_reduced_states(inst)
    f = fidelity(rho0, rho1)
    unitary = nogo_cheating_unitary(rho0, rho1)
    overlap = uhlmann_overlap(rho0, rho1, unitary)
    return CheatReport(
        fidelity=f,
        achieved_overlap=overlap,
        detection_probability=max(0.0, 1.0 - overlap**2),
    )


# ---------------------------------------------------------------------------
# probe attack on the entangled-pair commitment


@dataclass(frozen=True)
class ProbeAttackReport:
    per_qubit_detection: SecurityEstimate
    n: int
    run_success: SecurityEstimate
    trials: int

    def __post_init__(self):
        if self.n < 1 or self.trials < 1:
            raise ValueError("need a positive qubit count and trial count")
        p = self.per_qubit_detection.value
        sigma_qubit = math.sqrt(max(p * (1.0 - p), 0.0) / (self.trials * self.n))
        envelope = (min(1.0, 1.0 - p + 5.0 * sigma_qubit)) ** self.n
        sigma_run = math.sqrt(envelope * (1.0 - envelope) / self.trials)
        if self.run_success.value > envelope + 5.0 * sigma_run + 1e-12:
            raise ValueError("run success exceeds the per-qubit sanity envelope")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "per_qubit_detection": self.per_qubit_detection.value,
            "per_qubit_ci": [self.per_qubit_detection.ci_low, self.per_qubit_detection.ci_high],
            "run_success": self.run_success.value,
            "run_success_ci": [self.run_success.ci_low, self.run_success.ci_high],
        }


def entangle_probe(state: StateVector, control_qubit: int) -> StateVector:
    """Append a fresh probe qubit copying the control in the standard basis."""
    n = state.num_qubits
    if not 0 <= control_qubit < n:
        raise ValueError("control qubit out of range")
    old = state.amps.reshape([2] * n)
    new = np.zeros([2] * (n + 1), dtype=np.complex128)
    take = [slice(None)] * n
    for c in (0, 1):
        sl = list(take)
        sl[control_qubit] = c
        new[tuple(sl) + (c,)] = old[tuple(sl)]
    return StateVector(num_qubits=n + 1, amps=new.reshape(-1))


def p3_probe_pre_state() -> StateVector:
    """Transit qubit copied onto the probe before any encoding.

    Qubit order: transit, receiver's half, probe.
    """
    return entangle_probe(bell_state("phi-"), 0)


@functools.lru_cache(maxsize=1)
def _p3_probe_tables() -> tuple[np.ndarray, np.ndarray]:
    """Outcome distributions and detection masks for all (r, basis) cells.

    Row 2*r + basis holds the four outcome probabilities of the probed state
    under that cell; the mask marks outcomes no honest encoding can produce
    in that basis, whichever bit was encoded.
    """
    bases = p3_bases()
    pre = p3_probe_pre_state()
    encode = rotation_plane(_ENCODE_ANGLE)
    attacked = (pre, apply_on_qubit(pre, 0, encode))
    honest = p3_prepare_and_encode(np.array([0, 1], dtype=np.int8))
    probs = np.zeros((4, 4))
    masks = np.zeros((4, 4), dtype=bool)
    for r in (0, 1):
        for x in (0, 1):
            probs[2 * r + x] = born_probabilities(attacked[r], bases[x], qubits=(0, 1))
            support = np.zeros(4, dtype=bool)
            for state in honest:
                support |= born_probabilities(state, bases[x]) > _SUPPORT_TOL
            masks[2 * r + x] = ~support
    return probs, masks


def p3_probe_outcome_table(r: int, basis_index: int) -> np.ndarray:
    """Outcome probabilities of the probed state in one (r, basis) cell."""
    if r not in (0, 1) or basis_index not in (0, 1):
        raise ValueError("r and basis_index are bits")
    probs, _ = _p3_probe_tables()
    return probs[2 * r + basis_index].copy()


def p3_probe_detection_probability(r: int, basis_index: int) -> float:
    """Exact probability of an honestly-impossible outcome in one cell."""
    if r not in (0, 1) or basis_index not in (0, 1):
        raise ValueError("r and basis_index are bits")
    probs, masks = _p3_probe_tables()
    return float(probs[2 * r + basis_index] @ masks[2 * r + basis_index])


def probe_attack_p3(n: int, trials: int, rng: RngStream) -> ProbeAttackReport:
    """Monte-Carlo campaign of the copy-probe attack over full runs.

    Per qubit the committer entangles a probe, then encodes a uniform bit;
    the receiver picks a pair basis uniformly and an honestly-impossible
    outcome counts as detection. A run succeeds when none of its n qubits
    is detected.
    """
    if n < 1 or trials < 1:
        raise ValueError("need a positive qubit count and trial count")
    probs, masks = _p3_probe_tables()
    cum = np.cumsum(probs, axis=1)
    cells = rng.gen.integers(0, 4, size=(trials, n))
    u = rng.gen.random(size=(trials, n))
    outcomes = (u[..., np.newaxis] >= cum[cells]).sum(axis=-1)
    detected = masks[cells, outcomes]
    qubit_hits = int(detected.sum())
    run_successes = int((~detected.any(axis=1)).sum())
    return ProbeAttackReport(
        per_qubit_detection=monte_carlo_estimate(qubit_hits, trials * n),
        n=n,
        run_success=monte_carlo_estimate(run_successes, trials),
        trials=trials,
    )


# ---------------------------------------------------------------------------
# the same probe against the blinded channel


def _p4_probe_qubit_detected(
    alpha: float, r: int, x: int, rng: RngStream, apply_probe: bool
) -> bool:
    state = blinded_qubit(alpha)
    if apply_probe:
        state = entangle_probe(state, 0)
    if r:
        state = apply_on_qubit(state, 0, rotation_plane(_ENCODE_ANGLE))
    state = apply_on_qubit(state, 0, rotation_plane(-alpha))
    basis = measurement_bases(_ENCODE_ANGLE)[x]
    qubits = (0,) if apply_probe else None
    outcome_probs = born_probabilities(state, basis, qubits=qubits)
    label = basis.labels[rng.choice_index(outcome_probs)]
    if label != PERP_OUTCOME:
        return False
    return (x ^ 1) != r


def probe_attack_p4(
    n: int,
    trials: int,
    rng: RngStream,
    alpha: Optional[float] = None,
    apply_probe: bool = True,
) -> ProbeAttackReport:
    """The copy probe against blinded qubits, caught at open time.

    Detection means a conclusive outcome contradicting the bit the committer
    later declares. Fresh uniform blinding per qubit unless a fixed angle is
    given; apply_probe False is the honest control run, which never triggers
    a detection.
    """
    if n < 1 or trials < 1:
        raise ValueError("need a positive qubit count and trial count")
    qubit_hits = 0
    run_successes = 0
    for _ in range(trials):
        clean = True
        for _ in range(n):
            a = rng.uniform(0.0, 2 * np.pi) if alpha is None else float(alpha)
            r = rng.bit()
            x = rng.bit()
            if _p4_probe_qubit_detected(a, r, x, rng, apply_probe):
                qubit_hits += 1
                clean = False
        if clean:
            run_successes += 1
    return ProbeAttackReport(
        per_qubit_detection=monte_carlo_estimate(qubit_hits, trials * n),
        n=n,
        run_success=monte_carlo_estimate(run_successes, trials),
        trials=trials,
    )


# ---------------------------------------------------------------------------
# qubit omission against the direct commitment


@dataclass(frozen=True)
class OmissionAttackReport:
    n: int
    m: int
    perfect_detectors: bool
    detected_at_commit: bool
    open_zero_accepted: bool
    open_one_accepted: bool

    @property
    def succeeded(self) -> bool:
        return (
            not self.detected_at_commit
            and self.open_zero_accepted
            and self.open_one_accepted
        )

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "perfect_detectors": self.perfect_detectors,
            "detected_at_commit": self.detected_at_commit,
            "open_zero_accepted": self.open_zero_accepted,
            "open_one_accepted": self.open_one_accepted,
            "succeeded": self.succeeded,
        }


def omission_attack_p5(
    n: int, m: int, perfect_detectors: bool, rng: RngStream
) -> OmissionAttackReport:
    """Withhold one qubit per string, then open either bit.

    The committer encodes every string position honestly except one withheld
    qubit per string, which never reaches the receiver. With perfect
    detectors the missing click is registered and the commit is rejected on
    the spot. Otherwise the receiver's record simply has a hole, and at open
    time the committer declares the withheld bits to give the strings
    whichever parity she wants; nothing contradicts the holes, so both
    openings pass.
    """
    if n < 2:
        raise ValueError("need strings of length at least 2")
    if m < 1:
        raise ValueError("need at least one string")
    function = parity_function(n)
    withheld = [int(rng.gen.integers(0, n)) for _ in range(m)]
    sent_bits = [[int(b) for b in rng.bits(n)] for _ in range(m)]
    alphas = rng.gen.uniform(0.0, 2 * np.pi, size=(m, n))
    records: list[list[Optional[tuple[str, str]]]] = []
    for i in range(m):
        row: list[Optional[tuple[str, str]]] = []
        for j in range(n):
            if j == withheld[i]:
                row.append(None)
            else:
                qubit = blinded_qubit(alphas[i, j], sent_bits[i][j])
                row.append(p5_measure_record(qubit, alphas[i, j], rng))
        records.append(row)
    if perfect_detectors:
        detected = any(rec is None for row in records for rec in row)
        return OmissionAttackReport(
            n=n,
            m=m,
            perfect_detectors=True,
            detected_at_commit=detected,
            open_zero_accepted=False,
            open_one_accepted=False,
        )
    accepted = {}
    for target in (0, 1):
        strings = []
        for i in range(m):
            declared = list(sent_bits[i])
            partial = 0
            for j in range(n):
                if j != withheld[i]:
                    partial ^= declared[j]
            declared[withheld[i]] = partial ^ target
            strings.append(tuple(declared))
        msg = P5OpenMessage(protocol_id=PROTOCOL_P5, bit=target, strings=tuple(strings))
        accepted[target] = p5_verify_records(msg, records, function).accepted
    return OmissionAttackReport(
        n=n,
        m=m,
        perfect_detectors=False,
        detected_at_commit=False,
        open_zero_accepted=accepted[0],
        open_one_accepted=accepted[1],
    )
