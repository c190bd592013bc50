"""Word balls in the generators, deduplicated as projective group elements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from src.arithmetic.ring import Field, Mat2
from src.config.logging import get_logger
from src.config.settings import get_settings
from src.core.exceptions import ScaleTooLarge

logger = get_logger(__name__)


@dataclass(frozen=True)
class Word:
    letters: Tuple[int, ...]  # generator indices, left to right
    element: Mat2

    def __len__(self) -> int:
        return len(self.letters)


def word_ball(
    generators: Sequence[Mat2],
    radius: int,
    holomorphic_only: bool = False,
    budget: Optional[int] = None,
    field: Optional[Field] = None,
) -> List[Word]:
    """
    All distinct elements expressible as words of length <= radius, each with
    a shortest word, in breadth-first (then generator-index) order.
    """
    budget = budget or get_settings().budget
    if field is None:
        if not generators:
            return []
        field = generators[0].field
    identity = Mat2.identity(field)
    seen = {identity.projective_key()}
    ball = [Word((), identity)]
    frontier = [ball[0]]
    for _ in range(radius):
        nxt = []
        for word in frontier:
            for i, g in enumerate(generators):
                element = word.element @ g
                key = element.projective_key()
                if key in seen:
                    continue
                seen.add(key)
                w = Word(word.letters + (i,), element)
                nxt.append(w)
                ball.append(w)
        if len(ball) > budget:
            raise ScaleTooLarge(len(ball), budget)
        frontier = nxt
        if not frontier:
            break
    logger.debug("word_ball_built", radius=radius, size=len(ball))
    if holomorphic_only:
        return [w for w in ball if not w.element.conj_flag]
    return ball
