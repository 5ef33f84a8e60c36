"""Classification tags for 2-faces of the dual complex, and their move bookkeeping.

Tags carry a stage number k as metadata assigned at creation time; structure
alone does not determine k, so ``classify`` reports the stored tag after a
structural sanity check against the canonical template family.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

KINDS = ("G", "P", "B", "Rb", "Rp")


@dataclass(frozen=True)
class FaceType:
    """``kind`` is G (column cap), P/B (the two page families) or Rb/Rp (base
    fans).  ``primed`` marks a face whose interior has been split toward its
    column corner; ``hatted`` distinguishes the lower of the two primed faces
    a move produces."""

    kind: str
    k: int = 0
    primed: bool = False
    hatted: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown face kind {self.kind!r}")
        if self.kind == "G":
            if self.k or self.primed or self.hatted:
                raise ValueError("caps carry no stage or marks")
        else:
            if self.k < 1:
                raise ValueError("stage must be >= 1")
            if self.kind in ("Rb", "Rp") and (self.primed or self.hatted):
                raise ValueError("fans are never primed")
        if self.hatted and not self.primed:
            raise ValueError("only primed faces can be hatted")

    @property
    def rank(self) -> int | None:
        """Odd rank 2k-1; caps carry none."""
        return None if self.kind == "G" else 2 * self.k - 1

    def __str__(self) -> str:
        """Tags print the odd rank, not the stage: stage k shows as 2k-1."""
        if self.kind == "G":
            return "G"
        return f"{self.kind}{self.rank}" + ("'" if self.primed else "") + ("^" if self.hatted else "")


GREEN = FaceType("G")

_TYPE_RE = re.compile(r"^(G|P|B|Rb|Rp)(\d+)?(')?(\^)?$")


def parse_face_type(text: str) -> FaceType:
    m = _TYPE_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed face type: {text!r}")
    kind, rank, primed, hatted = m.groups()
    if rank is None:
        k = 0
    else:
        r = int(rank)
        if r < 1 or r % 2 == 0:
            raise ValueError(f"face rank must be odd and positive: {text!r}")
        k = (r + 1) // 2
    return FaceType(kind, k, bool(primed), bool(hatted))


def transition_outputs(tail: FaceType) -> dict[str, FaceType]:
    """Types of the faces one move creates when run over the given tail type.

    Keys: ``copy`` (the fresh duplicate of the tail), ``wall`` (the opposite
    page family grown over the cancelled column), ``red`` (the rebuilt base
    fan), and ``inplace`` (present only when the move splits the tail, i.e.
    when the tail was unprimed; the hat assignment between inplace and copy is
    positional and decided by the engine).
    """
    if tail.kind == "P":
        wall_kind, red_kind = "B", "Rb"
    elif tail.kind == "B":
        wall_kind, red_kind = "P", "Rp"
    else:
        raise ValueError(f"a move cannot run over a {tail.kind} face")
    out = {
        "wall": FaceType(wall_kind, tail.k + 1),
        "red": FaceType(red_kind, tail.k),
    }
    if tail.primed:
        out["copy"] = FaceType(tail.kind, tail.k)
    else:
        out["copy"] = replace(tail, primed=True)
        out["inplace"] = replace(tail, primed=True)
    return out


def expected_multiset(tail: FaceType) -> list[str]:
    """Conformance multiset (sorted strings) a move over ``tail`` must produce."""
    out = transition_outputs(tail)
    names = [str(t) for t in out.values()]
    if not tail.primed:
        # one of the two primed outputs carries the hat
        names.remove(str(out["copy"]))
        names.append(str(replace(out["copy"], hatted=True)))
    return sorted(names)


def triangle_count_options(t: FaceType) -> set[int]:
    """Triangle counts the canonical template family allows for this tag.

    Unprimed P/B at stage >= 2 admit both the 5-triangle wall shape and its
    9-triangle split form: duplicates of primed faces keep the split structure
    but are tagged unprimed.
    """
    if t.kind == "G":
        return {5}
    if t.kind in ("Rb", "Rp"):
        return {1, 2, 3}
    if t.k == 1:
        return {2}
    return {9} if t.primed else {5, 9}
