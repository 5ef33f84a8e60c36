"""Instruction-list generators for ring graphs.

Two families: a deterministic pump that keeps feeding each move's wall face to
the next move (so the tail rank climbs 1, 3, 5, ... as fast as possible), and
uniform random draws from the legal set.  Both only emit instructions the
move validator accepts, so scripts can be replayed on graph or complex alike.
"""

from __future__ import annotations

import random

from gemdual.gem import Gem, Instruction, bloboid


def greedy_max_rank(n: int) -> list[Instruction]:
    """The length-(n-1) script on the n-pair ring that pumps the tail rank.

    Move 1 runs over a stage-1 page; every later move cancels the next pair
    down the ring and runs over the wall the previous move just built, which
    is the unique legal choice of maximal rank.  Needs n >= 3; smaller rings
    have no legal move at all.
    """
    if n < 3:
        return []
    script = [Instruction(0, 1, 3)]
    for m in range(2, n):
        color = 1 if m % 2 == 0 else 0
        u = 2 * m + 1
        r = 1 if m == 2 else 2 * m - 1
        script.append(Instruction(color, u, r))
    return script


def random_script(
    n: int, rng: random.Random, length: int | None = None
) -> list[Instruction]:
    """A uniformly drawn valid script on the n-pair ring.

    ``length`` caps the number of moves (default n-1); the script ends early
    if the legal set empties first.
    """
    g: Gem = bloboid(n)
    target = n - 1 if length is None else min(length, n - 1)
    script: list[Instruction] = []
    for _ in range(max(target, 0)):
        legal = g.legal_instructions()
        if not legal:
            break
        instr = rng.choice(legal)
        script.append(instr)
        g, _ = g.apply_primal_bp(instr)
    return script
