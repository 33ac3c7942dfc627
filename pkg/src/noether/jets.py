"""Jet-space bookkeeping: variable registry, total derivatives, prolongation.

A ``JetSpace`` owns every variable of a problem: the independent variables,
the dependent variables, all derivative coordinates up to a fixed working
order, and any parameters created later (solver unknowns).  Registration
order fixes each variable's ``sort_index``, which in turn fixes monomial
ordering and printed output, so runs are deterministic.

The working order is chosen at problem load with enough headroom for the
prolongations and reductions the problem needs; raising a derivative past
it raises ``HeadroomError`` instead of growing the registry.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, Tuple

from .expr import DEPENDENT, INDEPENDENT, JET, PARAMETER, Expr, VarId

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")


class HeadroomError(Exception):
    """A derivative would exceed the registered working order."""


def _multi_indices(n: int, total: int) -> Iterator[Tuple[int, ...]]:
    """All length-n tuples of non-negative ints with the given sum.

    Enumerated with the first slot largest first: (2,0), (1,1), (0,2).
    """
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _multi_indices(n - 1, total - first):
            yield (first,) + rest


class JetSpace:
    """Registry of independent, dependent and jet variables up to an order."""

    def __init__(self, independents: Sequence[str], dependents: Sequence[str],
                 max_order: int = 4):
        if max_order < 1:
            raise ValueError("max_order must be at least 1")
        names = list(independents) + list(dependents)
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        for name in names:
            if not _NAME_RE.match(name):
                raise ValueError(
                    f"bad variable name {name!r}: use letters and digits, "
                    "starting with a letter")
        self.max_order = max_order
        self._by_name: Dict[str, VarId] = {}
        self._jets: Dict[Tuple[int, Tuple[int, ...]], VarId] = {}
        self._counter = 0
        self._lock = threading.Lock()

        self.independents: Tuple[VarId, ...] = tuple(
            self._register(INDEPENDENT, n) for n in independents)
        self.dependents: Tuple[VarId, ...] = tuple(
            self._register(DEPENDENT, n, dep_index=i,
                           multi_index=(0,) * len(self.independents))
            for i, n in enumerate(dependents))
        for i, dep in enumerate(self.dependents):
            self._jets[(i, dep.multi_index)] = dep
        for order in range(1, max_order + 1):
            for i, dep in enumerate(self.dependents):
                for multi in _multi_indices(len(self.independents), order):
                    v = self._register(JET, self._jet_name(dep, multi),
                                       dep_index=i, multi_index=multi)
                    self._jets[(i, multi)] = v

    def _register(self, kind: str, name: str, dep_index: int = -1,
                  multi_index: Tuple[int, ...] = ()) -> VarId:
        if name in self._by_name:
            raise ValueError(f"variable name collision: {name!r}")
        v = VarId(kind=kind, name=name, sort_index=self._counter,
                  dep_index=dep_index, multi_index=multi_index)
        self._by_name[name] = v
        self._counter += 1
        return v

    def _jet_name(self, dep: VarId, multi: Tuple[int, ...]) -> str:
        if self.is_ode:
            return dep.name + "'" * sum(multi)
        suffix = "".join(ind.name * count
                         for ind, count in zip(self.independents, multi))
        return f"{dep.name}_{suffix}"

    # -- lookup ----------------------------------------------------------

    @property
    def is_ode(self) -> bool:
        return len(self.independents) == 1

    def lookup(self, name: str) -> VarId | None:
        return self._by_name.get(name)

    def jet(self, dep_index: int, multi: Tuple[int, ...]) -> VarId:
        """The jet coordinate for a dependent variable and multi-index.

        An all-zero multi-index yields the dependent variable itself.
        """
        if sum(multi) > self.max_order:
            raise HeadroomError(
                f"derivative order {sum(multi)} exceeds working order "
                f"{self.max_order}")
        try:
            return self._jets[(dep_index, tuple(multi))]
        except KeyError:
            raise ValueError(f"no dependent variable with index {dep_index}")

    def derivative(self, v: VarId, indep_index: int) -> VarId:
        """Raise a dependent/jet variable by one derivative."""
        if v.kind not in (DEPENDENT, JET):
            raise ValueError(f"cannot differentiate {v.name!r} as a jet")
        multi = list(v.multi_index)
        multi[indep_index] += 1
        return self.jet(v.dep_index, tuple(multi))

    def independent_index(self, x: VarId) -> int:
        for i, v in enumerate(self.independents):
            if v is x:
                return i
        raise ValueError(f"{x.name!r} is not an independent variable here")

    def jet_vars(self, dep_index: int | None = None,
                 max_order: int | None = None) -> List[VarId]:
        """Dependent and jet coordinates, in registration order."""
        hi = self.max_order if max_order is None else max_order
        out = []
        for (d, multi), v in self._jets.items():
            if dep_index is not None and d != dep_index:
                continue
            if sum(multi) <= hi:
                out.append(v)
        out.sort(key=lambda v: v.sort_index)
        return out

    def parameter(self, name: str) -> VarId:
        """Intern a parameter (solver unknown); reuse an existing one by name."""
        with self._lock:
            v = self._by_name.get(name)
            if v is not None:
                if v.kind != PARAMETER:
                    raise ValueError(f"{name!r} already names a {v.kind} variable")
                return v
            return self._register(PARAMETER, name)

    @property
    def variable_count(self) -> int:
        return self._counter


@dataclass
class Generator:
    """A symmetry candidate: one coefficient per independent and dependent.

    ``xi`` maps independent variables to their coefficients (tau in time-like
    problems), ``eta`` maps dependent variables to theirs.  Missing entries
    mean zero.
    """

    xi: Dict[VarId, Expr] = field(default_factory=dict)
    eta: Dict[VarId, Expr] = field(default_factory=dict)

    def xi_of(self, x: VarId) -> Expr:
        return self.xi.get(x, Expr.zero())

    def eta_of(self, u: VarId) -> Expr:
        return self.eta.get(u, Expr.zero())

    @property
    def dependence_order(self) -> int:
        orders = [e.max_jet_order() for e in self.xi.values()]
        orders += [e.max_jet_order() for e in self.eta.values()]
        return max(orders, default=0)

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for e in self.xi.values()) and \
            all(e.is_zero for e in self.eta.values())

    def scaled(self, c) -> "Generator":
        return Generator(xi={x: e * c for x, e in self.xi.items()},
                         eta={u: e * c for u, e in self.eta.items()})


def total_derivative(e: Expr, x: VarId, space: JetSpace) -> Expr:
    """Total derivative D_x: the chain rule through every jet coordinate."""
    j = space.independent_index(x)
    result = e.partial(x)
    for v in e.variables():
        if v.kind in (DEPENDENT, JET):
            result = result + e.partial(v) * Expr.variable(space.derivative(v, j))
    return result


def _prolong(g: Generator, dep_index: int, multi: Tuple[int, ...],
             space: JetSpace,
             memo: Dict[Tuple[int, Tuple[int, ...]], Expr]) -> Expr:
    """Prolongation coefficient of ``g`` at the jet (dep_index, multi).

    Computed by the usual recursion: peel one derivative off the end,
    take the total derivative of the lower coefficient, and correct with
    the transported jet terms.  The result does not depend on which
    derivative is peeled.
    """
    key = (dep_index, multi)
    if key in memo:
        return memo[key]
    if sum(multi) == 0:
        result = g.eta_of(space.dependents[dep_index])
    else:
        j = max(i for i, c in enumerate(multi) if c > 0)
        lower = list(multi)
        lower[j] -= 1
        lower_t = tuple(lower)
        x_j = space.independents[j]
        result = total_derivative(
            _prolong(g, dep_index, lower_t, space, memo), x_j, space)
        for l, x_l in enumerate(space.independents):
            xi_l = g.xi_of(x_l)
            if xi_l.is_zero:
                continue
            raised = list(lower_t)
            raised[l] += 1
            u_jl = space.jet(dep_index, tuple(raised))
            result = result - Expr.variable(u_jl) * total_derivative(xi_l, x_j, space)
    memo[key] = result
    return result


def prolong_pde(g: Generator, target: VarId, space: JetSpace) -> Expr:
    """Extension coefficient of a generator at a jet coordinate."""
    if target.kind not in (DEPENDENT, JET):
        raise ValueError(f"{target.name!r} is not a jet coordinate")
    return _prolong(g, target.dep_index, target.multi_index, space, {})


def prolong_ode(g: Generator, j: int, space: JetSpace) -> Dict[VarId, Expr]:
    """Order-j prolongation coefficients, one per dependent variable.

    Defined by zeta^0 = eta and zeta^j = D zeta^(j-1) - q^(j) * D tau,
    where tau is the coefficient of the single independent variable.
    """
    if not space.is_ode:
        raise ValueError("prolong_ode requires a single independent variable")
    if j < 1:
        raise ValueError("prolongation order must be >= 1")
    t = space.independents[0]
    tau = g.xi_of(t)
    d_tau = total_derivative(tau, t, space)
    zeta = {dep: g.eta_of(dep) for dep in space.dependents}
    for step in range(1, j + 1):
        nxt = {}
        for i, dep in enumerate(space.dependents):
            q_step = Expr.variable(space.jet(i, (step,)))
            nxt[dep] = total_derivative(zeta[dep], t, space) - q_step * d_tau
        zeta = nxt
    return zeta


def evolutionary_form(g: Generator, space: JetSpace) -> Generator:
    """Equivalent generator with zero independent-variable coefficients.

    The dependent coefficients become the characteristics
    eta_i - sum_j xi_j * u_i,j; the jet order may rise by one.
    """
    if g.dependence_order + 1 > space.max_order:
        raise HeadroomError("no headroom to form the evolutionary generator")
    eta_bar: Dict[VarId, Expr] = {}
    for i, dep in enumerate(space.dependents):
        value = g.eta_of(dep)
        for j, x in enumerate(space.independents):
            xi_j = g.xi_of(x)
            if xi_j.is_zero:
                continue
            raised = [0] * len(space.independents)
            raised[j] = 1
            value = value - xi_j * Expr.variable(space.jet(i, tuple(raised)))
        eta_bar[dep] = value
    return Generator(xi={}, eta=eta_bar)
