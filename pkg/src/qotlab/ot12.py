"""One-out-of-two oblivious transfer built on the random-OT channel.

After the qubit phase the receiver announces an ordered pair of disjoint
index sets (X, Y), one of which is his fully conclusive set I and the other
a decoy J drawn from the remaining positions. The sender masks her two
messages with the XOR of her sent bits over X and over Y respectively; the
receiver can strip exactly the mask over I, so he learns the message in the
slot he pointed at and stays ignorant of the other one unless his conclusive
bits happen to cover J as well.

The module also computes the two exact security tails: p1, the probability
that an honest receiver gets at least k conclusive bits and the run proceeds,
and p2, the probability that an unambiguous-discrimination receiver gets at
least 2k and could decode both messages.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .qsim import RngStream
from .rot import HONEST, USD, ReceiverRecord, RotConfig, SenderRecord, run_rot

DEFAULT_ALPHA = Fraction(1, 16)
BASE_RATE = Fraction(1, 4)

EXACT_BINOMIAL = "exact-binomial"
MONTE_CARLO = "monte-carlo"

# two-sided 95% normal quantile, used for Wilson intervals
_WILSON_Z = 1.959963984540054


def k_of(n: int, alpha: Fraction = DEFAULT_ALPHA, base_rate: Fraction = BASE_RATE) -> int:
    """floor((base_rate - alpha) * n), computed exactly for rational inputs."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    alpha = Fraction(alpha)
    base_rate = Fraction(base_rate)
    if not 0 < alpha < base_rate:
        raise ValueError("alpha must lie strictly between 0 and the base rate")
    return int((base_rate - alpha) * n)


@dataclass(frozen=True)
class IndexSets:
    """The receiver's announcement: I (conclusive), J (decoy), slot bit m.

    m = 0 announces (X, Y) = (I, J); m = 1 announces (J, I). Positions are
    1-based, each set is sorted, and the sets are disjoint.
    """

    i_set: tuple[int, ...]
    j_set: tuple[int, ...]
    m: int

    def __post_init__(self):
        if self.m not in (0, 1):
            raise ValueError("m must be a bit")
        for s in (self.i_set, self.j_set):
            if list(s) != sorted(set(s)):
                raise ValueError("index sets must be sorted without repeats")
        if len(self.i_set) != len(self.j_set):
            raise ValueError("index sets must have equal size")
        if set(self.i_set) & set(self.j_set):
            raise ValueError("index sets must be disjoint")

    @property
    def x_set(self) -> tuple[int, ...]:
        return self.i_set if self.m == 0 else self.j_set

    @property
    def y_set(self) -> tuple[int, ...]:
        return self.j_set if self.m == 0 else self.i_set


@dataclass(frozen=True)
class SecurityEstimate:
    value: float
    method: str
    ci_low: float
    ci_high: float

    def __post_init__(self):
        if self.method not in (EXACT_BINOMIAL, MONTE_CARLO):
            raise ValueError(f"unknown method {self.method!r}")
        if not self.ci_low <= self.value <= self.ci_high:
            raise ValueError("confidence bounds must bracket the value")


@dataclass(frozen=True)
class Ot12Transcript:
    """Full classical record of one run; quantum data never leaves the run."""

    n: int
    k: int
    theta: float
    strategy: str
    aborted: bool
    sender: SenderRecord
    receiver: ReceiverRecord
    sets: Optional[IndexSets]
    c0: Optional[int]
    c1: Optional[int]
    b_received: Optional[int]

    def __post_init__(self):
        populated = (self.sets, self.c0, self.c1, self.b_received)
        if self.aborted and any(v is not None for v in populated):
            raise ValueError("an aborted run carries no announcement or ciphertexts")
        if not self.aborted and any(v is None for v in populated):
            raise ValueError("a completed run must carry sets, ciphertexts and b_received")

    @property
    def m(self) -> Optional[int]:
        return None if self.sets is None else self.sets.m


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes out of range")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    low = max(0.0, min(center - half, phat))
    high = min(1.0, max(center + half, phat))
    return low, high


def monte_carlo_estimate(successes: int, trials: int) -> SecurityEstimate:
    low, high = wilson_interval(successes, trials)
    return SecurityEstimate(
        value=successes / trials, method=MONTE_CARLO, ci_low=low, ci_high=high
    )


def binomial_tail(n: int, p: float, threshold: int) -> float:
    """P[Binomial(n, p) >= threshold], summed in log space for stability."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
    if threshold <= 0:
        return 1.0
    if threshold > n:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    log_n_fact = math.lgamma(n + 1)
    logs = [
        log_n_fact
        - math.lgamma(j + 1)
        - math.lgamma(n - j + 1)
        + j * math.log(p)
        + (n - j) * math.log1p(-p)
        for j in range(threshold, n + 1)
    ]
    peak = max(logs)
    return float(math.exp(peak) * math.fsum(math.exp(l - peak) for l in logs))


def choose_index_sets(
    receiver: ReceiverRecord,
    n: int,
    k: int,
    rng: RngStream,
    prefer_conclusive_j: bool = False,
) -> Optional[IndexSets]:
    """Draw I from the conclusive positions and J from the rest; None = abort.

    The run aborts when fewer than k positions came out conclusive. With
    prefer_conclusive_j (the discrimination attacker's choice) J is filled
    from leftover conclusive positions first, so that 2k conclusive bits make
    both masks known to the receiver.
    """
    conclusive = list(receiver.conclusive_positions)
    if len(conclusive) < k:
        return None
    i_set = rng.subset(conclusive, k)
    taken = set(i_set)
    complement = [p for p in range(1, n + 1) if p not in taken]
    if prefer_conclusive_j:
        leftovers = [p for p in conclusive if p not in taken]
        if len(leftovers) >= k:
            j_set = rng.subset(leftovers, k)
        else:
            rest = [p for p in complement if p not in set(leftovers)]
            j_set = sorted(leftovers + rng.subset(rest, k - len(leftovers)))
    else:
        j_set = rng.subset(complement, k)
    return IndexSets(i_set=tuple(i_set), j_set=tuple(j_set), m=rng.bit())


def sender_encrypt(
    bits: np.ndarray, x_set: Sequence[int], y_set: Sequence[int], b0: int, b1: int
) -> tuple[int, int]:
    """Mask b0 with the XOR of the sent bits over X and b1 with it over Y."""
    if b0 not in (0, 1) or b1 not in (0, 1):
        raise ValueError("messages must be bits")
    if set(x_set) & set(y_set):
        raise ValueError("announced sets must be disjoint")
    for p in list(x_set) + list(y_set):
        if not 1 <= p <= len(bits):
            raise ValueError("announced position out of range")
    s_x = 0
    for p in x_set:
        s_x ^= int(bits[p - 1])
    s_y = 0
    for p in y_set:
        s_y ^= int(bits[p - 1])
    return b0 ^ s_x, b1 ^ s_y


def receiver_decrypt(c_m: int, values: Iterable[Optional[int]]) -> int:
    """Strip the mask from the chosen ciphertext using conclusive values."""
    if c_m not in (0, 1):
        raise ValueError("ciphertext must be a bit")
    out = c_m
    for v in values:
        if v is None:
            raise ValueError("missing conclusive value over I")
        out ^= int(v)
    return out


def run_masked_transfer(
    sender: SenderRecord,
    receiver: ReceiverRecord,
    n: int,
    k: int,
    b0: int,
    b1: int,
    rng: RngStream,
    theta: float,
    prefer_conclusive_j: bool = False,
) -> Ot12Transcript:
    """The classical tail of the protocol, applied to a finished qubit phase."""
    sets = choose_index_sets(receiver, n, k, rng, prefer_conclusive_j)
    if sets is None:
        return Ot12Transcript(
            n=n,
            k=k,
            theta=theta,
            strategy=receiver.strategy,
            aborted=True,
            sender=sender,
            receiver=receiver,
            sets=None,
            c0=None,
            c1=None,
            b_received=None,
        )
    c0, c1 = sender_encrypt(sender.bits, sets.x_set, sets.y_set, b0, b1)
    cmap = receiver.conclusive_map()
    chosen = c0 if sets.m == 0 else c1
    b_received = receiver_decrypt(chosen, [cmap.get(p) for p in sets.i_set])
    return Ot12Transcript(
        n=n,
        k=k,
        theta=theta,
        strategy=receiver.strategy,
        aborted=False,
        sender=sender,
        receiver=receiver,
        sets=sets,
        c0=c0,
        c1=c1,
        b_received=b_received,
    )


def run_ot12(
    n: int,
    b0: int,
    b1: int,
    strategy: str,
    rng: RngStream,
    theta: float = float(np.pi / 4),
    alpha: Fraction = DEFAULT_ALPHA,
) -> Ot12Transcript:
    """One full run: qubit phase, announcement, masking, decryption."""
    config = RotConfig(n=n, theta=theta)
    k = k_of(n, alpha)
    sender, receiver = run_rot(config, strategy, rng)
    return run_masked_transfer(
        sender,
        receiver,
        n,
        k,
        b0,
        b1,
        rng,
        theta,
        prefer_conclusive_j=(strategy == USD),
    )


def p1_exact(n: int, alpha: Fraction = DEFAULT_ALPHA) -> SecurityEstimate:
    """Probability an honest receiver reaches k conclusive bits (no abort)."""
    value = binomial_tail(n, float(BASE_RATE), k_of(n, alpha))
    return SecurityEstimate(value=value, method=EXACT_BINOMIAL, ci_low=value, ci_high=value)


def p2_exact(
    n: int, alpha: Fraction = DEFAULT_ALPHA, theta: float = float(np.pi / 4)
) -> SecurityEstimate:
    """Probability a discrimination receiver reaches 2k and learns both bits."""
    rate = 1.0 - float(np.cos(theta))
    value = binomial_tail(n, rate, 2 * k_of(n, alpha))
    return SecurityEstimate(value=value, method=EXACT_BINOMIAL, ci_low=value, ci_high=value)


@dataclass(frozen=True)
class CurveRow:
    n: int
    k: int
    p1: float
    p2: float


def security_curve(n_list: Sequence[int], alpha: Fraction = DEFAULT_ALPHA) -> list[CurveRow]:
    rows = []
    for n in n_list:
        rows.append(
            CurveRow(n=n, k=k_of(n, alpha), p1=p1_exact(n, alpha).value, p2=p2_exact(n, alpha).value)
        )
    return rows


def curve_csv(rows: Sequence[CurveRow]) -> str:
    lines = ["n,k,p1,p2"]
    for row in rows:
        lines.append(f"{row.n},{row.k},{row.p1:.12g},{row.p2:.12g}")
    return "\n".join(lines) + "\n"


def transcript_dict(t: Ot12Transcript) -> dict:
    """JSON-ready record of one run."""
    out = {
        "n": t.n,
        "k": t.k,
        "theta": t.theta,
        "strategy": t.strategy,
        "aborted": t.aborted,
        "r": [int(b) for b in t.sender.bits],
        "basis_choices": list(t.receiver.basis_choices),
        "conclusive": [{"pos": pos, "val": val} for pos, val in t.receiver.conclusive],
    }
    if not t.aborted:
        out.update(
            {
                "m": t.sets.m,
                "i_set": list(t.sets.i_set),
                "j_set": list(t.sets.j_set),
                "x_set": list(t.sets.x_set),
                "y_set": list(t.sets.y_set),
                "c0": t.c0,
                "c1": t.c1,
                "b_received": t.b_received,
            }
        )
    return out
