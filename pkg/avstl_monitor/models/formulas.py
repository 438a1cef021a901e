from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Iterator, Literal

from .base import FrozenModel

__all__ = (
    "UNBOUNDED",
    "NodePath",
    "Interval",
    "Formula",
    "TrueFormula",
    "FalseFormula",
    "Atom",
    "Not",
    "And",
    "Or",
    "Implies",
    "Eventually",
    "Always",
    "Until",
    "Release",
    "proposition",
    "deadline",
    "persistence",
    "averaged_depth",
    "variables",
    "temporal_horizon",
    "node_paths",
    "node_at",
    "replace_at",
    "is_positive_position",
)

UNBOUNDED = math.inf

type NodePath = tuple[int, ...]


class Interval(FrozenModel):
    """Closed non-singular time interval ``[lo, hi]``, or ``[lo, inf)`` when unbounded."""

    lo: float = 0.0
    hi: float = UNBOUNDED

    def model_post_init(self, __context):
        if not math.isfinite(self.lo) or self.lo < 0:
            raise ValueError(f"interval lower bound must be a finite non-negative number, got {self.lo}")

        if math.isnan(self.hi) or not self.hi > self.lo:
            raise ValueError(f"interval [{self.lo}, {self.hi}] must satisfy lo < hi")

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __str__(self) -> str:
        if not self.bounded:
            return f"[{self.lo!r},inf)"

        return f"[{self.lo!r},{self.hi!r}]"


class Formula(FrozenModel, ABC):
    """A node of an averaged signal temporal logic formula."""

    @property
    @abstractmethod
    def children(self) -> tuple[Formula, ...]:
        """Direct subformulas, in path order."""

    def with_children(self, *children: Formula) -> Formula:
        """Copy of this node with its subformulas replaced."""

        names = self._child_fields()

        return self.model_copy(update=dict(zip(names, children)))

    @classmethod
    def _child_fields(cls) -> tuple[str, ...]:
        return ()

    def desugar(self) -> Formula:
        """One-step expansion of a derived form into the core syntax."""

        return self

    @property
    def averaged(self) -> bool:
        return False

    def walk(self, path: NodePath = ()) -> Iterator[tuple[NodePath, Formula]]:
        """Pre-order traversal yielding ``(path, node)`` pairs."""

        yield path, self

        for index, child in enumerate(self.children):
            yield from child.walk(path + (index,))

    def __str__(self) -> str:
        from ..parser import unparse  # pylint: disable=import-outside-toplevel

        return unparse(self)


class _Leaf(Formula):
    @property
    def children(self) -> tuple[Formula, ...]:
        return ()


class TrueFormula(_Leaf):
    """The constant ``true``."""

    kind: Literal["true"] = "true"


class FalseFormula(_Leaf):
    """The constant ``false``."""

    kind: Literal["false"] = "false"


class Atom(_Leaf):
    """Atomic comparison ``variable relation threshold``.

    Attributes:
        variable (str): Trace channel the atom reads.
        relation (str): One of ``<``, ``<=``, ``>=``, ``>``. Strict and non-strict
            relations share their robust semantics.
        threshold (float): Constant the channel is compared against.
        propositional (bool): Written as a bare propositional variable ``p``,
            shorthand for ``p >= 0``.
    """

    variable: str
    relation: Literal["<", "<=", ">=", ">"]
    threshold: float
    propositional: bool = False

    def model_post_init(self, __context):
        if not math.isfinite(self.threshold):
            raise ValueError(f"atom threshold must be finite, got {self.threshold}")

    @property
    def lower_bound(self) -> bool:
        """Whether the atom requires the variable to be large."""

        return self.relation in (">=", ">")


class _Unary(Formula):
    operand: Formula

    @property
    def children(self) -> tuple[Formula, ...]:
        return (self.operand,)

    @classmethod
    def _child_fields(cls) -> tuple[str, ...]:
        return ("operand",)


class _Binary(Formula):
    left: Formula
    right: Formula

    @property
    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    @classmethod
    def _child_fields(cls) -> tuple[str, ...]:
        return ("left", "right")


class Not(_Unary):
    """Negation."""


class And(_Binary):
    """Conjunction."""


class Or(_Binary):
    """Disjunction."""


class Implies(_Binary):
    """Implication, sugar for ``!left | right``."""

    def desugar(self) -> Formula:
        return Or(left=Not(operand=self.left), right=self.right)


class _Temporal(Formula):
    interval: Interval = Interval()
    is_averaged: bool = False

    @property
    def averaged(self) -> bool:
        return self.is_averaged


class Eventually(_Temporal, _Unary):
    """``F_I`` (or ``AvF_I`` when averaged), sugar for ``true U_I operand``."""

    def desugar(self) -> Formula:
        return Until(interval=self.interval, left=TrueFormula(), right=self.operand, is_averaged=self.is_averaged)


class Always(_Temporal, _Unary):
    """``G_I`` (or ``AvG_I`` when averaged), sugar for ``false R_I operand``."""

    def desugar(self) -> Formula:
        return Release(interval=self.interval, left=FalseFormula(), right=self.operand, is_averaged=self.is_averaged)


class Until(_Temporal, _Binary):
    """``left U_I right`` (or ``AvU_I`` when averaged)."""


class Release(_Temporal, _Binary):
    """``left R_I right`` (or ``AvR_I`` when averaged)."""


for _model in (Not, And, Or, Implies, Eventually, Always, Until, Release):
    _model.model_rebuild()


def proposition(name: str) -> Atom:
    """Propositional variable ``name``, i.e. ``name >= 0`` on a +1/-1 channel."""

    return Atom(variable=name, relation=">=", threshold=0.0, propositional=True)


def deadline(operand: Formula, soft: float, hard: float) -> Formula:
    """Holds by ``soft`` with full robustness, partial credit until ``hard``."""

    return Or(
        left=Eventually(interval=Interval(lo=0.0, hi=soft), operand=operand),
        right=Eventually(interval=Interval(lo=soft, hi=hard), operand=operand, is_averaged=True),
    )


def persistence(operand: Formula, required: float, extra: float) -> Formula:
    """Holds on ``[0, required]``, with credit for holding on until ``extra``."""

    return And(
        left=Always(interval=Interval(lo=0.0, hi=required), operand=operand),
        right=Always(interval=Interval(lo=required, hi=extra), operand=operand, is_averaged=True),
    )


def averaged_depth(formula: Formula) -> int:
    """Maximum nesting depth of averaged temporal operators."""

    below = max((averaged_depth(child) for child in formula.children), default=0)

    return below + 1 if formula.averaged else below


def variables(formula: Formula) -> frozenset[str]:
    """Names of the trace channels a formula reads."""

    return frozenset(node.variable for _, node in formula.walk() if isinstance(node, Atom))


def temporal_horizon(formula: Formula) -> float:
    """How far into the future a formula looks; infinite for unbounded operators."""

    below = max((temporal_horizon(child) for child in formula.children), default=0.0)

    if isinstance(formula, _Temporal):
        return formula.interval.hi + below

    return below


def node_paths(formula: Formula) -> list[NodePath]:
    """Paths of every node in pre-order, the root's being ``()``."""

    return [path for path, _ in formula.walk()]


def node_at(formula: Formula, path: NodePath) -> Formula:
    """Subformula reached by following child indices from the root.

    Raises:
        IndexError: If the path leaves the tree.
    """

    node = formula

    for index in path:
        children = node.children

        if not 0 <= index < len(children):
            raise IndexError(f"path {path} leaves the formula at index {index}")

        node = children[index]

    return node


def replace_at(formula: Formula, path: NodePath, replacement: Formula) -> Formula:
    """Copy of ``formula`` with the node at ``path`` swapped for ``replacement``."""

    if not path:
        return replacement

    head, rest = path[0], path[1:]
    children = list(formula.children)

    if not 0 <= head < len(children):
        raise IndexError(f"path index {head} out of range")

    children[head] = replace_at(children[head], rest, replacement)

    return formula.with_children(*children)


def is_positive_position(formula: Formula, path: NodePath) -> bool:
    """Whether the node at ``path`` sits under no negation.

    Implications count as ``!left | right``, so their left operand is a
    negative position and their right operand a positive one.
    """

    node_at(formula, path)
    node = formula

    for index in path:
        if isinstance(node, Not) or (isinstance(node, Implies) and index == 0):
            return False

        node = node.children[index]

    return True
