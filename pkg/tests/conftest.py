"""Shared test helpers."""

import itertools


def classical_displacement_oracle(d: int, m: int, k: int) -> float:
    """Brute-force switching win rate under a fixed label displacement.

    Enumerates every ordered tuple of doors the host can open when the
    player sits k doors above the prize, walks the deterministic switch
    (next unopened door upward), and counts wins.  Independent of both the
    factorial closed form and the state-vector pipeline.
    """
    wins = total = 0
    prize = 0
    player = k % d
    others = [c for c in range(d) if c not in {prize, player}]
    for opened in itertools.permutations(others, m):
        total += 1
        blocked = set(opened)
        landing = next(
            (player + step) % d
            for step in range(1, d)
            if (player + step) % d not in blocked
        )
        wins += landing == prize
    return wins / total if total else 0.0
