"""Exact qudit simulator of a generalized quantum Monty Hall game.

Subpackages: :mod:`qmonty.qudit` (state vectors and local operators),
:mod:`qmonty.game` (two-party pipeline), :mod:`qmonty.oracles` (closed-form
payoffs), :mod:`qmonty.multiplayer` (n-party extension),
:mod:`qmonty.protocols` (key-distribution protocol simulations),
:mod:`qmonty.cli` (command-line front end).
"""

from .game import (
    GameConfig,
    GameOutcomeDistribution,
    door_opening_operator,
    door_switching_operator,
    ell,
    entangled_initial,
    epsilon,
    expected_payoff,
    mixed_switch_operator,
    outcome_distribution,
    payoff_curve,
    play_game,
    separable_initial,
    unique_count,
)
from .multiplayer import (
    MultiGameState,
    multi_door_opening_operator,
    multi_play,
    per_player_payoff,
    player_switch_operator,
)
from .oracles import (
    PayoffCurve,
    classical_p_ns,
    classical_p_s,
    default_gammas,
    gamma_max,
    lambda_term,
    payoff_displacement,
    payoff_entangled,
    payoff_max,
    payoff_qft_separable,
    payoff_separable,
)
from .protocols import (
    BatchReport,
    ProtocolConfig,
    ProtocolTranscript,
    omega_operator,
    run_batch,
    run_protocol_a,
    run_protocol_b,
    victory_encoding_operator,
)
from .qudit import (
    ATOL,
    DomainError,
    LocalOperator,
    NonSpecialUnitaryWarning,
    StateVector,
    Strategy,
    apply_local_operator,
    apply_strategy,
    fidelity,
    ghz_state,
    is_special_unitary,
    make_basis_state,
    marginal_eigenvalues,
    measure_slots,
    qft,
    random_special_unitary,
    sum_d,
)

__all__ = [
    "ATOL",
    "BatchReport",
    "DomainError",
    "GameConfig",
    "GameOutcomeDistribution",
    "LocalOperator",
    "MultiGameState",
    "NonSpecialUnitaryWarning",
    "PayoffCurve",
    "ProtocolConfig",
    "ProtocolTranscript",
    "StateVector",
    "Strategy",
    "apply_local_operator",
    "apply_strategy",
    "classical_p_ns",
    "classical_p_s",
    "default_gammas",
    "door_opening_operator",
    "door_switching_operator",
    "ell",
    "entangled_initial",
    "epsilon",
    "expected_payoff",
    "fidelity",
    "gamma_max",
    "ghz_state",
    "is_special_unitary",
    "lambda_term",
    "make_basis_state",
    "marginal_eigenvalues",
    "measure_slots",
    "mixed_switch_operator",
    "multi_door_opening_operator",
    "multi_play",
    "omega_operator",
    "outcome_distribution",
    "payoff_curve",
    "payoff_displacement",
    "payoff_entangled",
    "payoff_max",
    "payoff_qft_separable",
    "payoff_separable",
    "per_player_payoff",
    "play_game",
    "player_switch_operator",
    "qft",
    "random_special_unitary",
    "run_batch",
    "run_protocol_a",
    "run_protocol_b",
    "separable_initial",
    "sum_d",
    "unique_count",
    "victory_encoding_operator",
]
