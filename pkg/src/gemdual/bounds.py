"""Size envelope for the dual ball triangulation.

The starting complex for a ring of n blobs has exactly ``initial_counts(n)``
vertices, edges and triangles.  Every move adds simplices; the k-th move
(1-based) adds at most ``step_increment_bound(k)``.  Summing gives the closed
forms below.  The checks only certify the upper bound; the construction is
not tight for k >= 2 and :func:`audit` reports the slack.
"""

from __future__ import annotations


def initial_counts(n: int) -> tuple[int, int, int]:
    if n < 1:
        raise ValueError("ring order must be at least 1")
    return (2 * n + 5, 10 * n + 5, 10 * n)


def step_increment_bound(k: int) -> tuple[int, int, int]:
    """Worst-case simplex growth of the k-th move (k counts from 1)."""
    if k < 1:
        raise ValueError("step index counts from 1")
    return (6 * k - 4, 22 * k - 16, 16 * k - 12)


def cumulative_increment_bound(k: int) -> tuple[int, int, int]:
    """Sum of the per-step bounds over the first k moves."""
    if k < 0:
        raise ValueError("step count cannot be negative")
    return (3 * k * k - k, 11 * k * k - 5 * k, 8 * k * k - 4 * k)


def total_bound(n: int) -> tuple[int, int, int]:
    """Upper bound after the maximal n-1 moves on a ring of n blobs."""
    if n < 1:
        raise ValueError("ring order must be at least 1")
    return (3 * n * n - 5 * n + 9, 11 * n * n - 17 * n + 21, 8 * n * n - 10 * n + 12)


def audit(initial: tuple[int, int, int], deltas: list[tuple[int, int, int]]) -> dict:
    """Compare measured per-step growth against the envelope.

    ``deltas`` is one (vertices, edges, triangles) triple per move, in order.
    Returns a report with per-step rows, the final census versus the
    cumulative bound, and the slack left in each dimension.
    """
    rows = []
    ok = True
    running = list(initial)
    for i, d in enumerate(deltas, start=1):
        b = step_increment_bound(i)
        within = all(x <= y for x, y in zip(d, b))
        ok = ok and within
        running = [r + x for r, x in zip(running, d)]
        rows.append(
            {
                "step": i,
                "delta": list(d),
                "bound": list(b),
                "slack": [y - x for x, y in zip(d, b)],
                "within": within,
            }
        )
    k = len(deltas)
    cum = cumulative_increment_bound(k)
    final_bound = [a + b for a, b in zip(initial, cum)]
    return {
        "steps": rows,
        "final": list(running),
        "final_bound": final_bound,
        "final_slack": [b - a for a, b in zip(running, final_bound)],
        "ok": ok and all(a <= b for a, b in zip(running, final_bound)),
    }
