"""Euler-Lagrange synthesis, Hessian analysis, and on-shell reduction.

The Euler operator is applied per dependent variable over distinct jet
coordinates.  Each resulting equation is solved for its distinguished
highest derivative (maximal total order, ties broken towards derivatives of
the earliest-declared independent variable), which enables substitution-based
reduction of any expression to a normal form modulo the equations of motion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .expr import JET, Expr, VarId
from .jets import JetSpace, total_derivative


class ReductionError(Exception):
    """Reduction modulo the equations of motion could not proceed."""


@dataclass
class Lagrangian:
    """A polynomial Lagrangian of a fixed derivative order."""

    space: JetSpace
    order: int
    body: Expr

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("Lagrangian order must be at least 1")
        if self.body.is_zero:
            raise ValueError("Lagrangian body must not be identically zero")
        actual = self.body.max_jet_order()
        if actual > self.order:
            raise ValueError(
                f"Lagrangian of order {self.order} contains a derivative of "
                f"order {actual}")

    def partial(self, v: VarId) -> Expr:
        return self.body.partial(v)


@dataclass
class ELSystem:
    """Euler-Lagrange equations, one per dependent variable.

    ``equations[i]`` is canonical (monic in its distinguished derivative when
    that is possible).  ``solved_forms`` maps each distinguished highest
    derivative to the expression it equals on shell; it is None when any
    equation cannot be solved that way, in which case reduction is
    unavailable and verification falls back to reporting raw residuals.
    """

    space: JetSpace
    equations: List[Expr]
    solved_forms: Optional[Dict[VarId, Expr]]

    @property
    def reducible(self) -> bool:
        return self.solved_forms is not None


def _jet_rank(v: VarId) -> tuple:
    """Order jets by total order, then multi-index, then dependent index."""
    return (v.order, v.multi_index, -v.dep_index)


def _apply_multi_derivative(e: Expr, multi: Sequence[int], space: JetSpace) -> Expr:
    for j, count in enumerate(multi):
        x = space.independents[j]
        for _ in range(count):
            e = total_derivative(e, x, space)
    return e


def euler_lagrange(L: Lagrangian) -> ELSystem:
    """The Euler-Lagrange equations of a Lagrangian.

    For each dependent variable: sum over jet coordinates of
    (-1)^order * D^multi (dL/du_multi), in canonical form.
    """
    space = L.space
    equations = []
    for i, dep in enumerate(space.dependents):
        total = Expr.zero()
        for v in space.jet_vars(dep_index=i, max_order=L.order):
            p = L.body.partial(v)
            if p.is_zero:
                continue
            sign = -1 if v.order % 2 else 1
            total = total + _apply_multi_derivative(p, v.multi_index, space) * sign
        equations.append(total)
    return _normalize(space, equations)


def _normalize(space: JetSpace, equations: List[Expr]) -> ELSystem:
    solved: Dict[VarId, Expr] = {}
    normalized: List[Expr] = []
    available = True
    for eq in equations:
        jets = [v for v in eq.variables() if v.kind == JET]
        if eq.is_zero or not jets:
            normalized.append(eq)
            available = False
            continue
        top = max(jets, key=_jet_rank)
        parts = eq.collect({top})
        linear = parts.get(((top, 1),), Expr.zero())
        nonlinear = any(key not in (((top, 1),), ()) for key in parts)
        if nonlinear or not linear.is_constant or top in solved:
            normalized.append(eq)
            available = False
            continue
        lead = linear.constant_value()
        monic = eq / lead
        rest = parts.get((), Expr.zero()) / lead
        normalized.append(monic)
        solved[top] = -rest
    return ELSystem(space=space, equations=normalized,
                    solved_forms=solved if available else None)


def reduce_mod_el(e: Expr, el: ELSystem, space: JetSpace) -> Expr:
    """Normal form of an expression modulo the equations of motion.

    Repeatedly substitutes every derivative that dominates a distinguished
    solved derivative (same dependent variable, componentwise at least its
    multi-index) by the appropriately differentiated solved form.  Each step
    strictly lowers the highest reducible jet, so this terminates; the guard
    only trips on malformed externally-supplied solved forms.
    """
    if not el.reducible:
        raise ReductionError("solved forms unavailable; cannot reduce")
    solved = el.solved_forms
    guard = space.variable_count + 8
    for _ in range(guard):
        reducible = []
        for v in e.variables():
            if v.kind != JET:
                continue
            for h in solved:
                if h.dep_index == v.dep_index and all(
                        a >= b for a, b in zip(v.multi_index, h.multi_index)):
                    reducible.append((v, h))
                    break
        if not reducible:
            return e
        v, h = max(reducible, key=lambda pair: _jet_rank(pair[0]))
        delta = tuple(a - b for a, b in zip(v.multi_index, h.multi_index))
        replacement = _apply_multi_derivative(solved[h], delta, space)
        e = e.substitute({v: replacement})
    raise ReductionError("reduction did not terminate; malformed solved forms")


@dataclass
class HessianReport:
    """Second-derivative matrix of a first-order Lagrangian in the velocities."""

    matrix: List[List[Expr]]
    determinant: Expr

    @property
    def regular(self) -> bool:
        return not self.determinant.is_zero


def hessian(L: Lagrangian) -> HessianReport:
    """The velocity Hessian; only defined for first-order time-like problems."""
    space = L.space
    if L.order != 1 or not space.is_ode:
        raise ValueError("hessian requires a first-order Lagrangian in one "
                         "independent variable")
    vels = [space.jet(i, (1,)) for i in range(len(space.dependents))]
    matrix = [[L.body.partial(vi).partial(vj) for vj in vels] for vi in vels]
    return HessianReport(matrix=matrix, determinant=_det(matrix))


def _det(matrix: List[List[Expr]]) -> Expr:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    total = Expr.zero()
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * _det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total
