"""Two-party generalized quantum Monty Hall game.

The register layout for a game with ``m`` openable doors and ``n`` parties is
``|o_m, ..., o_1, p_n, ..., p_1>`` in ket order: the host's door label ``a``
(= ``p_1``) occupies slot 0, the player's label ``b`` (= ``p_2``) slot 1, and
the j-th opened-door register slot ``n - 1 + j``.

The game pipeline applies the two strategies, then the door-opening
operators in succession, then the quantum mixed switching step
``cos(gamma) * I + sin(gamma) * S``.  The mixed step is a per-basis-state
isometry but not a unitary, so the final state is generally not normalized;
the expected payoff is by definition the plain sum of squared winning
amplitudes of that final state, which is exactly what the closed-form
oracles compute.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .qudit import (
    DomainError,
    LocalOperator,
    StateVector,
    Strategy,
    apply_local_operator,
    apply_strategy,
    ghz_state,
    make_basis_state,
)

GAMMA_MAX_RANGE = math.pi / 2


@dataclass(frozen=True)
class GameConfig:
    """Game parameters: doors ``d``, opened doors ``m``, parties ``n``,
    and the switch-mix angle ``gamma`` in [0, pi/2].

    The parameter restrictions ``n >= 2`` and ``d - n >= m >= 0`` are the
    consistency conditions of the underlying door game.
    """

    d: int
    m: int
    n: int
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("the game needs at least two parties (n >= 2)")
        if not 0 <= self.m <= self.d - self.n:
            raise ValueError(
                f"need d - n >= m >= 0, got d={self.d}, n={self.n}, m={self.m}"
            )
        if not 0.0 <= self.gamma <= GAMMA_MAX_RANGE + 1e-12:
            raise ValueError("gamma must lie in [0, pi/2]")

    @property
    def num_qudits(self) -> int:
        return self.m + self.n


def player_slot(k: int) -> int:
    """Slot of party k's door label (host is party 1)."""
    return k - 1


def opened_slot(j: int, n: int) -> int:
    """Slot of the j-th opened-door register (j = 1..m)."""
    return n - 1 + j


def epsilon(labels: Sequence[int]) -> int:
    """0 if any two labels coincide, else 1."""
    return 1 if len(set(labels)) == len(labels) else 0


def unique_count(labels: Sequence[int]) -> int:
    """Number of distinct values among the labels."""
    if len(labels) == 0:
        raise ValueError("unique_count needs a nonempty tuple")
    return len(set(labels))


def ell(b: int, opened: Sequence[int], d: int) -> int:
    """Smallest k in 1..d-1 with b + k (mod d) not among the opened doors."""
    blocked = set(opened)
    for k in range(1, d):
        if (b + k) % d not in blocked:
            return k
    raise DomainError(
        f"no reachable door from {b} with opened set {sorted(blocked)} (d={d})"
    )


# ---------------------------------------------------------------------------
# Operator builders (shared with the multiplayer and protocol modules).
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _door_opening(d: int, n: int, j: int) -> LocalOperator:
    """j-th door-opening operator for an n-party game.

    Acts on slots (o_j, ..., o_1, p_n, ..., p_1); its domain is the fresh
    register being 0.  Each in-domain input goes to the uniform superposition
    over the doors not yet taken by any party label or previously opened
    register, so the map is an isometry on its whole domain.  On inputs whose
    earlier registers are pairwise distinct and disjoint from the party
    labels, the amplitude equals 1/sqrt(d + 1 - j - U(p)) with U the number
    of distinct party labels.
    """
    if j < 1:
        raise ValueError("door-opening step index starts at 1")
    slots = tuple(range(opened_slot(j, n), -1, -1))
    mapping: dict[tuple[int, ...], tuple[tuple[tuple[int, ...], complex], ...]] = {}
    for rest in itertools.product(range(d), repeat=j - 1 + n):
        src = (0, *rest)
        blocked = set(rest)
        cands = [c for c in range(d) if c not in blocked]
        if not cands:
            continue
        amp = 1.0 / math.sqrt(len(cands))
        mapping[src] = tuple(((c, *rest), complex(amp)) for c in cands)

    def in_domain(labels: tuple[int, ...]) -> bool:
        return labels[0] == 0 and len(set(labels[1:])) < d

    return LocalOperator(d, slots, mapping, in_domain, name=f"door-opening O_{j}")


@lru_cache(maxsize=None)
def _door_switch(
    d: int, m: int, n: int, k: int, tolerate_opened_choice: bool = False
) -> LocalOperator:
    """Door-switching operator for party k on slots (o_m, ..., o_1, p_k).

    Moves the party's label to the next door (mod d) not present in the
    opened registers.  The standard domain requires the party label and all
    opened registers to be pairwise distinct.  With ``tolerate_opened_choice``
    the map is defined on every basis input (used by the protocol host, whose
    register may contain still-zero slots of validators that declined); on
    the standard domain both variants agree exactly.
    """
    if m > d - 2:
        raise ValueError("switching needs m <= d - 2 so a free door exists")
    slots = tuple(range(opened_slot(m, n), opened_slot(1, n) - 1, -1)) + (
        player_slot(k),
    )
    mapping: dict[tuple[int, ...], tuple[tuple[tuple[int, ...], complex], ...]] = {}
    for labels in itertools.product(range(d), repeat=m + 1):
        opened, p = labels[:m], labels[m]
        if not tolerate_opened_choice and epsilon(labels) != 1:
            continue
        target = (p + ell(p, opened, d)) % d
        mapping[labels] = (((*opened, target), 1.0 + 0.0j),)

    if tolerate_opened_choice:
        def in_domain(labels: tuple[int, ...]) -> bool:
            return True
    else:
        def in_domain(labels: tuple[int, ...]) -> bool:
            return epsilon(labels) == 1

    return LocalOperator(d, slots, mapping, in_domain, name=f"door-switching S_{k}")


@lru_cache(maxsize=None)
def _mixed_switch(d: int, m: int, n: int, k: int, gamma: float) -> LocalOperator:
    """cos(gamma) * identity + sin(gamma) * switch on the switch's domain."""
    base = _door_switch(d, m, n, k)
    c, s = math.cos(gamma), math.sin(gamma)
    mapping: dict[tuple[int, ...], tuple[tuple[tuple[int, ...], complex], ...]] = {}
    for src, outs in base.mapping.items():
        branches: list[tuple[tuple[int, ...], complex]] = []
        if abs(c) > 1e-15:
            branches.append((src, complex(c)))
        if abs(s) > 1e-15:
            ((dst, amp),) = outs
            branches.append((dst, s * amp))
        mapping[src] = tuple(branches)
    return LocalOperator(
        d, base.slots, mapping, base.domain, name=f"mixed-switch({gamma:.6g}) S_{k}"
    )


def door_opening_operator(j: int, config: GameConfig) -> LocalOperator:
    """Two-party door-opening operator for step j (1 <= j <= m)."""
    if not 1 <= j <= config.m:
        raise ValueError(f"door-opening index {j} out of range 1..{config.m}")
    return _door_opening(config.d, config.n, j)


def door_switching_operator(config: GameConfig) -> LocalOperator:
    """Two-party door-switching operator on slots (o_m, ..., o_1, b)."""
    return _door_switch(config.d, config.m, config.n, 2)


def mixed_switch_operator(config: GameConfig) -> LocalOperator:
    """Quantum mixed switching step at the config's gamma."""
    return _mixed_switch(config.d, config.m, config.n, 2, config.gamma)


# ---------------------------------------------------------------------------
# Game pipeline.
# ---------------------------------------------------------------------------


def separable_initial(config: GameConfig) -> StateVector:
    """All labels at zero: |0...0>."""
    return make_basis_state(config.d, (0,) * config.num_qudits)


def entangled_initial(config: GameConfig) -> StateVector:
    """Opened registers at zero, party labels in the shared GHZ state."""
    ghz = ghz_state(config.d, config.n)
    if config.m == 0:
        return ghz
    return make_basis_state(config.d, (0,) * config.m).tensor(ghz)


def _check_initial(config: GameConfig, initial: StateVector) -> None:
    if initial.d != config.d:
        raise ValueError("initial state dimension does not match the config")
    if initial.num_qudits != config.num_qudits:
        raise ValueError(
            f"initial state must have {config.num_qudits} qudits, "
            f"got {initial.num_qudits}"
        )
    blocks = initial.amplitudes.reshape(config.d**config.m, -1)
    if config.m and np.abs(blocks[1:]).max(initial=0.0) > 1e-12:
        raise ValueError("initial state must have all opened registers at 0")


def play_game(
    config: GameConfig, A: Strategy, B: Strategy, initial: StateVector
) -> StateVector:
    """Run the full two-party pipeline and return the final state.

    Order of operations: host strategy A on slot a, player strategy B on
    slot b, door openings 1..m in succession, then the mixed switching step.
    The returned state is the raw linear image (no renormalization); at the
    endpoints gamma = 0 and gamma = pi/2 it is always normalized.
    """
    if config.n != 2:
        raise ValueError("play_game is the two-party pipeline; use multi_play")
    if A.d != config.d or B.d != config.d:
        raise ValueError("strategy dimension does not match the config")
    _check_initial(config, initial)
    state = apply_strategy(initial, A, player_slot(1))
    state = apply_strategy(state, B, player_slot(2))
    for j in range(1, config.m + 1):
        state = apply_local_operator(state, door_opening_operator(j, config))
    return apply_local_operator(state, mixed_switch_operator(config))


def expected_payoff(final: StateVector) -> float:
    """Player win weight: sum of squared amplitudes with b = a.

    Applied to the raw pipeline output this is the game's expected payoff;
    the host's payoff is 1 minus this value.
    """
    d = final.d
    arr = final.amplitudes.reshape(-1, d, d)
    idx = np.arange(d)
    return float((np.abs(arr[:, idx, idx]) ** 2).sum())


@dataclass(frozen=True)
class GameOutcomeDistribution:
    """Measurement statistics of a final game state.

    ``probabilities`` maps ket-ordered basis labels (o_m, ..., o_1, b, a) to
    outcome probabilities (normalized); ``win_probability`` is the total on
    outcomes with b = a.
    """

    win_probability: float
    probabilities: Mapping[tuple[int, ...], float]

    def __post_init__(self) -> None:
        total = sum(self.probabilities.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"outcome probabilities sum to {total}, not 1")
        win = sum(p for t, p in self.probabilities.items() if t[-1] == t[-2])
        if abs(win - self.win_probability) > 1e-9:
            raise ValueError("win probability inconsistent with the outcomes")


def outcome_distribution(final: StateVector) -> GameOutcomeDistribution:
    """Normalized basis-outcome probabilities of a (final) game state."""
    weights = np.abs(final.amplitudes) ** 2
    total = weights.sum()
    if total <= 0:
        raise ValueError("cannot build a distribution from a zero state")
    probs: dict[tuple[int, ...], float] = {}
    win = 0.0
    for idx in np.flatnonzero(weights > 1e-30):
        labels = _labels(final, int(idx))
        p = float(weights[idx] / total)
        probs[labels] = p
        if labels[-1] == labels[-2]:
            win += p
    return GameOutcomeDistribution(win, probs)


def _labels(state: StateVector, idx: int) -> tuple[int, ...]:
    from .qudit import labels_of_index

    return labels_of_index(state.d, state.num_qudits, idx)


def payoff_curve(
    config: GameConfig,
    A: Strategy,
    B: Strategy,
    gammas: Sequence[float],
    initial: StateVector | None = None,
) -> np.ndarray:
    """Expected payoff at each gamma, reusing the pre-switch state.

    The pipeline up to the switching step is gamma independent, so the curve
    costs one evolution plus one switch application regardless of the number
    of sample points.
    """
    if initial is None:
        initial = separable_initial(config)
    base = GameConfig(config.d, config.m, config.n, 0.0)
    _check_initial(base, initial)
    state = apply_strategy(initial, A, player_slot(1))
    state = apply_strategy(state, B, player_slot(2))
    for j in range(1, base.m + 1):
        state = apply_local_operator(state, door_opening_operator(j, base))
    switched = apply_local_operator(state, door_switching_operator(base))
    kept = state.amplitudes
    moved = switched.amplitudes
    out = np.empty(len(gammas), dtype=float)
    for i, g in enumerate(gammas):
        final = StateVector(
            config.d,
            config.num_qudits,
            math.cos(g) * kept + math.sin(g) * moved,
        )
        out[i] = expected_payoff(final)
    return out
