"""Closed-form payoff formulas for the two-party game.

These are independent of the state-vector pipeline and double as oracles in
the equivalence test suite: the separable and entangled payoff sums are
evaluated exactly as written, with the combinatorial tables (collision
indicators and next-free-door offsets) precomputed per (d, m).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .game import GameConfig, epsilon
from .qudit import DomainError, Strategy

MAX_FACTORIAL_D = 20


def _factorial(x: int) -> int:
    if x < 0 or x > MAX_FACTORIAL_D:
        raise ValueError(f"factorial argument {x} outside supported range")
    return math.factorial(x)


def classical_p_ns(d: int) -> float:
    """Win probability when the player keeps the initial door: 1/d."""
    if d < 2:
        raise ValueError("need at least two doors")
    return 1.0 / d


def classical_p_s(d: int, m: int) -> float:
    """Win probability by switching after m doors were opened."""
    if not 0 <= m <= d - 2:
        raise ValueError(f"need d - 2 >= m >= 0, got d={d}, m={m}")
    return (d - 1) / (d - m - 1) / d


def lambda_term(j: int, opened: Sequence[int], d: int) -> int:
    """Smallest k in 1..d-1 with j - k (mod d) not among the opened doors."""
    blocked = set(opened)
    for k in range(1, d):
        if (j - k) % d not in blocked:
            return k
    raise DomainError(
        f"no free door below {j} with opened set {sorted(blocked)} (d={d})"
    )


@lru_cache(maxsize=None)
def _payoff_tables(d: int, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per (j, opened-tuple) grids: keep indicator, j - lambda, switch indicator."""
    n_tuples = d**m
    eps_keep = np.zeros((d, n_tuples), dtype=np.int8)
    j_from = np.zeros((d, n_tuples), dtype=np.intp)
    eps_switch = np.zeros((d, n_tuples), dtype=np.int8)
    for t, opened in enumerate(itertools.product(range(d), repeat=m)):
        for j in range(d):
            lam = lambda_term(j, opened, d)
            src = (j - lam) % d
            eps_keep[j, t] = epsilon((*opened, j))
            j_from[j, t] = src
            eps_switch[j, t] = epsilon((*opened, src, j))
    for a in (eps_keep, j_from, eps_switch):
        a.setflags(write=False)
    return eps_keep, j_from, eps_switch


def _require_two_party(config: GameConfig) -> None:
    if config.n != 2:
        raise ValueError("closed-form payoffs cover the two-party game only")


def payoff_separable(A: Strategy, B: Strategy, config: GameConfig) -> float:
    """Expected payoff for the all-zero separable initial state.

    Sum over the prize door j and every opened-door tuple of
    |a_{j,0}|^2 * |cos(g) b_{j,0} eps(o,j)
                   + sqrt((d-1)/(d-m-1)) sin(g) b_{j-lam,0} eps(o,j-lam,j)|^2,
    scaled by (d-m-1)!/(d-1)!.
    """
    _require_two_party(config)
    d, m, g = config.d, config.m, config.gamma
    if A.d != d or B.d != d:
        raise ValueError("strategy dimension does not match the config")
    eps_keep, j_from, eps_switch = _payoff_tables(d, m)
    a0 = A.entries[:, 0]
    b0 = B.entries[:, 0]
    q = math.sqrt((d - 1) / (d - m - 1))
    term = (
        math.cos(g) * b0[:, None] * eps_keep
        + q * math.sin(g) * b0[j_from] * eps_switch
    )
    weights = (np.abs(a0) ** 2)[:, None]
    pref = _factorial(d - m - 1) / _factorial(d - 1)
    return float(pref * (weights * np.abs(term) ** 2).sum())


def payoff_qft_separable(config: GameConfig) -> float:
    """Payoff when the player picks the uniform-superposition strategy.

    Independent of the host's strategy:
    |sqrt(P_ns) cos(gamma) + sqrt(P_s) sin(gamma)|^2.
    """
    _require_two_party(config)
    pns = classical_p_ns(config.d)
    ps = classical_p_s(config.d, config.m)
    return (
        math.sqrt(pns) * math.cos(config.gamma)
        + math.sqrt(ps) * math.sin(config.gamma)
    ) ** 2


def gamma_max(d: int, m: int) -> float:
    """Angle maximizing the uniform-player payoff: arctan sqrt(P_s/P_ns)."""
    return math.atan(math.sqrt(classical_p_s(d, m) / classical_p_ns(d)))


def payoff_max(d: int, m: int) -> float:
    """Maximum of the uniform-player payoff over gamma: P_ns + P_s."""
    return classical_p_ns(d) + classical_p_s(d, m)


def payoff_entangled(A: Strategy, B: Strategy, config: GameConfig) -> float:
    """Expected payoff for the shared-GHZ initial state.

    Sum over j and opened-door tuples of
    |cos(g) eps(o,j) sum_i a_{j,i} b_{j,i}
      + sqrt((d-1)/(d-m-1)) sin(g) eps(o,j-lam,j) sum_i b_{j-lam,i} a_{j,i}|^2,
    scaled by (d-m-1)!/d!.  The row products carry no conjugation; the GHZ
    pairing makes the plain bilinear form the correct one, which the
    pipeline-equivalence suite confirms for complex strategies.
    """
    _require_two_party(config)
    d, m, g = config.d, config.m, config.gamma
    if A.d != d or B.d != d:
        raise ValueError("strategy dimension does not match the config")
    eps_keep, j_from, eps_switch = _payoff_tables(d, m)
    rowdots = A.entries @ B.entries.T  # [j, l] = sum_i a_{j,i} b_{l,i}
    diag = np.diag(rowdots)
    j_idx = np.arange(d)[:, None]
    q = math.sqrt((d - 1) / (d - m - 1))
    term = (
        math.cos(g) * eps_keep * diag[:, None]
        + q * math.sin(g) * eps_switch * rowdots[j_idx, j_from]
    )
    pref = _factorial(d - m - 1) / _factorial(d)
    return float(pref * (np.abs(term) ** 2).sum())


def payoff_displacement(k: int, config: GameConfig) -> float:
    """Payoff when the GHZ correlation is displaced by k doors.

    P_{ns,k} cos^2(gamma) + P_{s,k} sin^2(gamma) with P_{ns,k} = 1 only at
    k = 0 and P_{s,k} = m!(k-1)!/((m+k+1-d)!(d-2)!) for k >= d-m-1, else 0.
    """
    _require_two_party(config)
    d, m = config.d, config.m
    if not 0 <= k < d:
        raise ValueError(f"displacement {k} out of range for dimension {d}")
    p_ns_k = 1.0 if k == 0 else 0.0
    if k >= d - m - 1 and k >= 1:
        p_s_k = (
            _factorial(m)
            * _factorial(k - 1)
            / (_factorial(m + k + 1 - d) * _factorial(d - 2))
        )
    else:
        p_s_k = 0.0
    g = config.gamma
    return p_ns_k * math.cos(g) ** 2 + p_s_k * math.sin(g) ** 2


def default_gammas(points: int = 101) -> np.ndarray:
    """Evenly spaced sample angles on [0, pi/2]."""
    if points < 2:
        raise ValueError("need at least two sample points")
    return np.linspace(0.0, math.pi / 2, points)


@dataclass(frozen=True)
class PayoffCurve:
    """A sampled payoff-vs-gamma curve with its scenario metadata."""

    gammas: tuple[float, ...]
    payoffs: tuple[float, ...]
    scenario: str
    d: int
    m: int
    k: int | None = None

    def __post_init__(self) -> None:
        if len(self.gammas) != len(self.payoffs):
            raise ValueError("gamma and payoff lists must have equal length")
        if any(b <= a for a, b in zip(self.gammas, self.gammas[1:])):
            raise ValueError("gamma samples must be strictly ascending")
        if any(p < -1e-12 or p > 1 + 1e-12 for p in self.payoffs):
            raise ValueError("payoffs must lie in [0, 1]")

    @property
    def peak(self) -> float:
        return max(self.payoffs)


def curve_classical_mixed(d: int, m: int, gammas: Sequence[float]) -> PayoffCurve:
    """P_ns cos^2 + P_s sin^2 sampled on the given angles."""
    pns, ps = classical_p_ns(d), classical_p_s(d, m)
    payoffs = tuple(
        pns * math.cos(g) ** 2 + ps * math.sin(g) ** 2 for g in gammas
    )
    return PayoffCurve(tuple(gammas), payoffs, "classical-mixed", d, m)


def curve_qft_player(d: int, m: int, gammas: Sequence[float]) -> PayoffCurve:
    payoffs = tuple(
        payoff_qft_separable(GameConfig(d, m, 2, g)) for g in gammas
    )
    return PayoffCurve(tuple(gammas), payoffs, "qft-player", d, m)


def curve_displacement(
    d: int, m: int, k: int, gammas: Sequence[float]
) -> PayoffCurve:
    payoffs = tuple(
        payoff_displacement(k, GameConfig(d, m, 2, g)) for g in gammas
    )
    return PayoffCurve(tuple(gammas), payoffs, "displacement", d, m, k)
