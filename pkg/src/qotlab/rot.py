"""Random-bit oblivious transfer over a pair of non-orthogonal qubit states.

The sender draws a uniform bit string r and transmits qubit i as state
Psi_{r_i}, where <Psi_0|Psi_1> = cos(theta). The honest receiver measures
each qubit in one of the two bases {Psi_x, Psi_x perp}, chosen uniformly:
landing on a perp element identifies the sent bit as x xor 1 with certainty
and counts as conclusive, which happens for half the basis choices with
probability sin(theta)^2, i.e. at rate 1/4 for the default theta = pi/4.
A receiver running unambiguous state discrimination instead is conclusive
at the optimal rate 1 - cos(theta), still without errors.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .qsim import (
    CONCLUSIVE_0,
    CONCLUSIVE_1,
    ProjectiveBasis,
    RngStream,
    StateVector,
    make_nonorthogonal_pair,
    measure_povm,
    measure_projective,
    perp,
    usd_povm,
)

HONEST = "honest"
USD = "usd"

BASIS_0 = "B0"
BASIS_1 = "B1"
BASIS_USD = "USD"

PERP_OUTCOME = "perp"
ALONG_OUTCOME = "psi"


@dataclass(frozen=True)
class RotConfig:
    n: int
    theta: float = float(np.pi / 4)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0.0 < self.theta <= np.pi / 2:
            raise ValueError("theta must lie in (0, pi/2]")

    @property
    def honest_conclusive_rate(self) -> float:
        return 0.5 * float(np.sin(self.theta)) ** 2

    @property
    def usd_conclusive_rate(self) -> float:
        return 1.0 - float(np.cos(self.theta))


@dataclass(frozen=True)
class SenderRecord:
    """The sender's only secret: the transmitted bit string."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.int8).copy()
        if bits.ndim != 1 or bits.size < 1:
            raise ValueError("bits must be a nonempty vector")
        if np.any((bits != 0) & (bits != 1)):
            raise ValueError("bits must be 0 or 1")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)


@dataclass(frozen=True)
class ReceiverRecord:
    """Per-qubit basis tags plus the conclusive (position, value) pairs.

    Positions are 1-based and strictly increasing; a value is the decoded
    sender bit, which for both receiver strategies is never wrong.
    """

    strategy: str
    basis_choices: tuple[str, ...]
    conclusive: tuple[tuple[int, int], ...]

    def __post_init__(self):
        n = len(self.basis_choices)
        last = 0
        for pos, val in self.conclusive:
            if not last < pos <= n:
                raise ValueError("conclusive positions must be increasing and in [1, n]")
            if val not in (0, 1):
                raise ValueError("conclusive values must be bits")
            last = pos

    @property
    def conclusive_positions(self) -> tuple[int, ...]:
        return tuple(pos for pos, _ in self.conclusive)

    def conclusive_map(self) -> dict[int, int]:
        return {pos: val for pos, val in self.conclusive}


@functools.lru_cache(maxsize=None)
def encoding_states(theta: float) -> tuple[StateVector, StateVector]:
    return make_nonorthogonal_pair(theta)


@functools.lru_cache(maxsize=None)
def measurement_bases(theta: float) -> tuple[ProjectiveBasis, ProjectiveBasis]:
    """Basis x = {Psi_x, Psi_x perp}; the perp outcome decodes the bit x xor 1."""
    psi0, psi1 = make_nonorthogonal_pair(theta)
    b0 = ProjectiveBasis(states=(psi0, perp(psi0)), labels=(ALONG_OUTCOME, PERP_OUTCOME))
    b1 = ProjectiveBasis(states=(psi1, perp(psi1)), labels=(ALONG_OUTCOME, PERP_OUTCOME))
    return b0, b1


def alice_send(config: RotConfig, rng: RngStream) -> tuple[SenderRecord, list[StateVector]]:
    """Draw the bit string and produce the qubit sequence before any receiver
    action; nothing the receiver later does can reach back into this record."""
    bits = rng.bits(config.n)
    pair = encoding_states(config.theta)
    states = [pair[b] for b in bits]
    return SenderRecord(bits=bits), states


def bob_measure_honest(
    states: list[StateVector], config: RotConfig, rng: RngStream
) -> ReceiverRecord:
    if len(states) != config.n:
        raise ValueError("state count does not match the configuration")
    bases = measurement_bases(config.theta)
    tags = (BASIS_0, BASIS_1)
    basis_choices = []
    conclusive = []
    for pos, state in enumerate(states, start=1):
        x = rng.bit()
        basis_choices.append(tags[x])
        label, _ = measure_projective(state, bases[x], rng)
        if label == PERP_OUTCOME:
            conclusive.append((pos, x ^ 1))
    return ReceiverRecord(
        strategy=HONEST, basis_choices=tuple(basis_choices), conclusive=tuple(conclusive)
    )


def bob_measure_usd(
    states: list[StateVector], config: RotConfig, rng: RngStream
) -> ReceiverRecord:
    if len(states) != config.n:
        raise ValueError("state count does not match the configuration")
    povm = usd_povm(config.theta)
    conclusive = []
    for pos, state in enumerate(states, start=1):
        label = measure_povm(state, povm, rng)
        if label == CONCLUSIVE_0:
            conclusive.append((pos, 0))
        elif label == CONCLUSIVE_1:
            conclusive.append((pos, 1))
    return ReceiverRecord(
        strategy=USD,
        basis_choices=(BASIS_USD,) * config.n,
        conclusive=tuple(conclusive),
    )


def run_rot(
    config: RotConfig, strategy: str, rng: RngStream
) -> tuple[SenderRecord, ReceiverRecord]:
    """One sender pass followed by one receiver pass over the n qubits."""
    sender, states = alice_send(config, rng)
    if strategy == HONEST:
        receiver = bob_measure_honest(states, config, rng)
    elif strategy == USD:
        receiver = bob_measure_usd(states, config, rng)
    else:
        raise ValueError(f"unknown receiver strategy {strategy!r}")
    return sender, receiver


def transcript_dict(config: RotConfig, sender: SenderRecord, receiver: ReceiverRecord) -> dict:
    """JSON-ready record of one run."""
    return {
        "n": config.n,
        "theta": config.theta,
        "r": [int(b) for b in sender.bits],
        "strategy": receiver.strategy,
        "basis_choices": list(receiver.basis_choices),
        "conclusive": [{"pos": pos, "val": val} for pos, val in receiver.conclusive],
    }
