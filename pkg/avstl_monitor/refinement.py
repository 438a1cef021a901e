"""Sound rewrites that sharpen the robustness landscape of a specification.

Refining an eventually into an averaged eventually, or strengthening an
always with an averaged tail, never turns a violating input into a
satisfying one, so a falsifier may search the refined formula instead.
"""

import logging

from .exceptions import RefinementError
from .models.formulas import (
    Always, And, Eventually, Formula, Interval, NodePath, is_positive_position, node_at, replace_at,
)

__all__ = ("refine_eventually", "refine_always", "refinable_paths")


def _checked_node[T: Formula](formula: Formula, path: NodePath, expected: type[T]) -> T:
    try:
        node = node_at(formula, path)
    except IndexError as e:
        raise RefinementError(f"invalid node path {path}: {e}") from e

    if not isinstance(node, expected) or node.is_averaged:
        raise RefinementError(f"node at {path} is not a plain {expected.__name__}")

    if not node.interval.bounded:
        raise RefinementError(f"node at {path} has an unbounded interval {node.interval}")

    if not is_positive_position(formula, path):
        raise RefinementError(f"node at {path} sits at a negative position")

    return node


def refine_eventually(formula: Formula, path: NodePath) -> Formula:
    """Replace ``F[a,b] phi`` at ``path`` by ``AvF[a,b] phi``.

    Raises:
        RefinementError: If the path is invalid, the node is not a bounded plain
            eventually, or it sits under a negation.
    """

    node = _checked_node(formula, path, Eventually)
    refined = node.model_copy(update={"is_averaged": True})

    logging.debug(f"Refining {node} into {refined}")

    return replace_at(formula, path, refined)


def refine_always(formula: Formula, path: NodePath, delta: float) -> Formula:
    """Replace ``G[a,b] phi`` at ``path`` by ``G[a,b] phi & AvG[b,b+delta] phi``.

    Raises:
        RefinementError: As :func:`refine_eventually`, or when ``delta <= 0``.
    """

    if not delta > 0:
        raise RefinementError(f"refinement tail must be positive, got {delta}")

    node = _checked_node(formula, path, Always)
    tail = Always(
        interval=Interval(lo=node.interval.hi, hi=node.interval.hi + delta),
        operand=node.operand,
        is_averaged=True,
    )

    logging.debug(f"Refining {node} with averaged tail {tail}")

    return replace_at(formula, path, And(left=node, right=tail))


def refinable_paths(formula: Formula) -> list[tuple[NodePath, type[Formula]]]:
    """Paths of every bounded plain eventually/always at a positive position."""

    found = []

    for path, node in formula.walk():
        if isinstance(node, (Eventually, Always)) and not node.is_averaged and node.interval.bounded \
                and is_positive_position(formula, path):
            found.append((path, type(node)))

    return found
