"""The Noether engine: invariance condition, determining equations,
first integrals, flux vectors, and verification.

The central object is the invariance residual of a candidate symmetry and
gauge term: the action of the prolonged generator on the Lagrangian, plus
the Lagrangian times the divergence of the independent-variable
coefficients, minus the divergence of the gauge term.  The candidate is a
symmetry exactly when this polynomial vanishes identically -- no equations
of motion are involved at that stage.  Conservation laws are then read off
by iterated integration by parts; their divergence reduces to zero modulo
the Euler-Lagrange equations, which the verifier checks independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .expr import PARAMETER, Expr, Monomial, VarId, mono_key, mono_mul
from .jets import Generator, JetSpace, _prolong, total_derivative
from .linalg import Row, nullspace, solve_affine
from .variational import ELSystem, Lagrangian, ReductionError, euler_lagrange, reduce_mod_el


class NonSymmetryError(ValueError):
    """Raised when asked to build a conservation law from a non-symmetry."""


class UnsupportedProblem(ValueError):
    """The determining equations are outside the solvable configurations."""


@dataclass(frozen=True)
class Ansatz:
    """Shape of the polynomial search space for symmetries and gauges.

    ``coeff_jet_order`` 0 searches point symmetries; raising it admits
    generalized symmetries whose coefficients depend on derivatives (never
    beyond the Lagrangian order).  ``gauge_jet_order`` defaults to one less
    than the Lagrangian order, or to the Lagrangian order when the search is
    restricted to evolutionary form (``suppress_xi``), where the gauge must
    absorb the derivative dependence the characteristics pick up.
    """

    coeff_degree: int = 4
    coeff_jet_order: int = 0
    gauge_degree: int = 4
    gauge_jet_order: Optional[int] = None
    include_gauge: bool = True
    suppress_xi: bool = False

    def __post_init__(self):
        if self.coeff_degree < 0 or self.gauge_degree < 0:
            raise ValueError("ansatz degrees must be non-negative")
        if self.coeff_jet_order < 0:
            raise ValueError("ansatz jet order must be non-negative")
        if self.gauge_jet_order is not None and self.gauge_jet_order < 0:
            raise ValueError("gauge jet order must be non-negative")

    def resolved_gauge_jet_order(self, L: Lagrangian) -> int:
        if self.gauge_jet_order is not None:
            return self.gauge_jet_order
        if not L.space.is_ode:
            return 0
        return L.order if self.suppress_xi else L.order - 1


@dataclass
class ConservationLaw:
    """A first integral (one component) or a flux vector (one per independent)."""

    kind: str  # "first-integral" | "flux-vector"
    components: Tuple[Expr, ...]

    def __iter__(self):
        return iter(self.components)


@dataclass
class NoetherSolution:
    """A verified symmetry with its gauge term and conservation law."""

    generator: Generator
    gauge: Tuple[Expr, ...]
    law: ConservationLaw


@dataclass
class VerificationReport:
    """Outcome of the divergence check.  ``ok`` is None when reduction is
    unavailable and only the raw residual can be reported."""

    ok: Optional[bool]
    residual: Expr


@dataclass
class DeterminingSystem:
    """Homogeneous linear system over the ansatz parameters.

    ``rows`` are sparse over positions in ``unknowns``; the templates allow a
    parameter assignment to be materialized back into a generator and gauge.
    """

    unknowns: List[VarId]
    rows: List[Row]
    xi_templates: Dict[VarId, Expr]
    eta_templates: Dict[VarId, Expr]
    gauge_templates: Tuple[Expr, ...]


# -- the invariance condition ------------------------------------------------


def condition_residual(L: Lagrangian, g: Generator,
                       gauge: Sequence[Expr] | None = None) -> Expr:
    """Residual of the invariance condition for (generator, gauge).

    Zero exactly when the pair is a Noether symmetry.  The sign convention
    is (symmetry side) - (gauge divergence), so a pure scaling candidate on
    a quadratic Lagrangian leaves a positive residual.
    """
    space = L.space
    n = len(space.independents)
    if gauge is None:
        gauge = [Expr.zero()] * n
    if len(gauge) != n:
        raise ValueError(
            f"gauge term needs {n} component(s), got {len(gauge)}")
    residual = Expr.zero()
    div_xi = Expr.zero()
    for j, x in enumerate(space.independents):
        xi_j = g.xi_of(x)
        if not xi_j.is_zero:
            div_xi = div_xi + total_derivative(xi_j, x, space)
            residual = residual + xi_j * L.body.partial(x)
    if not div_xi.is_zero:
        residual = residual + L.body * div_xi
    memo: Dict[Tuple[int, Tuple[int, ...]], Expr] = {}
    for i in range(len(space.dependents)):
        for v in space.jet_vars(dep_index=i, max_order=L.order):
            p = L.body.partial(v)
            if p.is_zero:
                continue
            coeff = _prolong(g, i, v.multi_index, space, memo)
            residual = residual + coeff * p
    for j, x in enumerate(space.independents):
        f_j = gauge[j]
        if not f_j.is_zero:
            residual = residual - total_derivative(f_j, x, space)
    return residual


# -- conservation laws --------------------------------------------------------


def characteristics(L: Lagrangian, g: Generator) -> List[Expr]:
    """Q_i = eta_i - sum_j xi_j * u_i,j for each dependent variable."""
    space = L.space
    out = []
    for i, dep in enumerate(space.dependents):
        q = g.eta_of(dep)
        for j, x in enumerate(space.independents):
            xi_j = g.xi_of(x)
            if xi_j.is_zero:
                continue
            e_j = [0] * len(space.independents)
            e_j[j] = 1
            q = q - xi_j * Expr.variable(space.jet(i, tuple(e_j)))
        out.append(q)
    return out


def _multi_derivative(e: Expr, multi: Sequence[int], space: JetSpace) -> Expr:
    for j, count in enumerate(multi):
        for _ in range(count):
            e = total_derivative(e, space.independents[j], space)
    return e


def boundary_terms(L: Lagrangian, g: Generator) -> List[Expr]:
    """The per-direction boundary terms produced by integration by parts.

    Peeling total derivatives off D^mu(Q_i) * dL/du_mu one at a time (last
    independent variable first) accumulates one expression per independent
    variable; what remains after all peels is the characteristic times the
    Euler-Lagrange expression, which vanishes on shell.
    """
    space = L.space
    qs = characteristics(L, g)
    b = [Expr.zero() for _ in space.independents]
    for i in range(len(space.dependents)):
        q_derivs: Dict[Tuple[int, ...], Expr] = {}

        def q_d(multi: Tuple[int, ...]) -> Expr:
            if multi not in q_derivs:
                q_derivs[multi] = _multi_derivative(qs[i], multi, space)
            return q_derivs[multi]

        for v in space.jet_vars(dep_index=i, max_order=L.order):
            if v.order == 0:
                continue
            p = L.body.partial(v)
            if p.is_zero:
                continue
            multi = list(v.multi_index)
            cur = p
            while sum(multi) > 0:
                j = max(idx for idx, c in enumerate(multi) if c > 0)
                multi[j] -= 1
                b[j] = b[j] + q_d(tuple(multi)) * cur
                cur = -total_derivative(cur, space.independents[j], space)
    return b


def first_integral(L: Lagrangian, g: Generator, f: Expr) -> ConservationLaw:
    """The first integral of a verified symmetry of a time-like problem.

    Convention: I = f - [tau L + boundary terms], so for the free particle
    the translation symmetry in the dependent variable yields minus the
    velocity.
    """
    space = L.space
    if not space.is_ode:
        raise ValueError("first_integral applies to single-independent problems")
    residual = condition_residual(L, g, [f])
    if not residual.is_zero:
        raise NonSymmetryError(
            f"candidate is not a Noether symmetry; residual {residual}")
    t = space.independents[0]
    tau = g.xi_of(t)
    bracket = tau * L.body + boundary_terms(L, g)[0]
    return ConservationLaw("first-integral", (f - bracket,))


def conservation_vector(L: Lagrangian, g: Generator,
                        F: Sequence[Expr]) -> ConservationLaw:
    """The flux vector of a verified symmetry of a multi-independent problem.

    Component j is F_j - [xi_j L + boundary terms_j]; the divergence of the
    result is checked to reduce to zero before returning.
    """
    space = L.space
    if space.is_ode:
        raise ValueError("conservation_vector applies to PDE problems")
    residual = condition_residual(L, g, F)
    if not residual.is_zero:
        raise NonSymmetryError(
            f"candidate is not a Noether symmetry; residual {residual}")
    b = boundary_terms(L, g)
    components = []
    for j, x in enumerate(space.independents):
        components.append(F[j] - g.xi_of(x) * L.body - b[j])
    law = ConservationLaw("flux-vector", tuple(components))
    report = verify(law, euler_lagrange(L), space)
    if report.ok is False:
        raise AssertionError(
            f"internal error: synthesized law fails verification: {report.residual}")
    return law


def verify(law: ConservationLaw, el: ELSystem, space: JetSpace) -> VerificationReport:
    """Divergence of the law, reduced modulo the equations of motion."""
    div = Expr.zero()
    for j, x in enumerate(space.independents):
        div = div + total_derivative(law.components[j], x, space)
    try:
        residual = reduce_mod_el(div, el, space)
    except ReductionError:
        return VerificationReport(ok=None, residual=div)
    return VerificationReport(ok=residual.is_zero, residual=residual)


def hessian_relation_check(L: Lagrangian, g: Generator, integral: Expr) -> bool:
    """Whether the integral's velocity gradient matches the symmetry.

    For a first-order time-like Lagrangian and a symmetry of derivative
    dependence at most one, dI/dv_j must equal
    -(eta_i - v_i tau) d2L/dv_i dv_j for every j.
    """
    space = L.space
    if L.order != 1 or not space.is_ode:
        raise ValueError("hessian relation requires a first-order time-like "
                         "Lagrangian")
    if g.dependence_order > 1:
        raise ValueError("hessian relation requires derivative dependence <= 1")
    t = space.independents[0]
    tau = g.xi_of(t)
    vels = [space.jet(i, (1,)) for i in range(len(space.dependents))]
    for j, vj in enumerate(vels):
        lhs = integral.partial(vj)
        rhs = Expr.zero()
        for i, vi in enumerate(vels):
            q_i = g.eta_of(space.dependents[i]) - Expr.variable(vi) * tau
            rhs = rhs - q_i * L.body.partial(vi).partial(vj)
        if lhs != rhs:
            return False
    return True


# -- determining equations ----------------------------------------------------


def _monomials_upto(vars: Sequence[VarId], degree: int,
                    include_constant: bool = True) -> List[Monomial]:
    """All monomials over ``vars`` of total degree <= degree, ascending."""
    monos: List[Monomial] = []
    for d in range(0 if include_constant else 1, degree + 1):
        seen = set()
        for combo in itertools.combinations_with_replacement(vars, d):
            counts: Dict[VarId, int] = {}
            for v in combo:
                counts[v] = counts.get(v, 0) + 1
            mono = tuple(sorted(counts.items(), key=lambda p: p[0].sort_index))
            if mono not in seen:
                seen.add(mono)
                monos.append(mono)
    monos.sort(key=mono_key)
    return monos


def _ansatz_polynomial(space: JetSpace, label: str, monos: Sequence[Monomial],
                       unknowns: List[VarId]) -> Expr:
    """A fresh linear combination of monomials with new parameters."""
    total = Expr.zero()
    for mono in monos:
        c = space.parameter(f"c{len(unknowns)}")
        unknowns.append(c)
        total = total + Expr.term(1, mono_mul(((c, 1),), mono))
    return total


def _check_solving_supported(L: Lagrangian):
    space = L.space
    if space.is_ode:
        return
    if len(space.independents) == 2 and len(space.dependents) == 1 \
            and L.order == 1:
        return
    raise UnsupportedProblem(
        "determining equations are solved for time-like problems of any "
        "order and for first-order problems in two independent and one "
        "dependent variable; use verification mode otherwise")


def determining_system(L: Lagrangian, ansatz: Ansatz) -> DeterminingSystem:
    """Instantiate the ansatz and collect the invariance condition.

    Every coefficient of the residual with respect to monomials in the
    non-parameter variables must vanish; each such coefficient is one
    homogeneous linear row over the fresh parameters.  Constant gauge
    monomials are never instantiated: they cannot influence the condition
    and would only add trivial additive-constant directions.
    """
    _check_solving_supported(L)
    space = L.space
    if ansatz.coeff_jet_order > L.order:
        raise ValueError(
            "coefficient jet order above the Lagrangian order is not "
            "meaningful once the equations of motion constrain the system")
    coeff_vars = list(space.independents) + space.jet_vars(
        max_order=ansatz.coeff_jet_order)
    gauge_order = ansatz.resolved_gauge_jet_order(L)
    gauge_vars = list(space.independents) + space.jet_vars(max_order=gauge_order)
    coeff_monos = _monomials_upto(coeff_vars, ansatz.coeff_degree)
    gauge_monos = _monomials_upto(gauge_vars, ansatz.gauge_degree,
                                  include_constant=False)

    unknowns: List[VarId] = []
    xi_templates: Dict[VarId, Expr] = {}
    eta_templates: Dict[VarId, Expr] = {}
    if not ansatz.suppress_xi:
        for x in space.independents:
            xi_templates[x] = _ansatz_polynomial(space, x.name, coeff_monos,
                                                 unknowns)
    for u in space.dependents:
        eta_templates[u] = _ansatz_polynomial(space, u.name, coeff_monos,
                                              unknowns)
    gauge_templates: List[Expr] = []
    for x in space.independents:
        if ansatz.include_gauge:
            gauge_templates.append(_ansatz_polynomial(space, f"f_{x.name}",
                                                      gauge_monos, unknowns))
        else:
            gauge_templates.append(Expr.zero())

    g = Generator(xi=xi_templates, eta=eta_templates)
    residual = condition_residual(L, g, gauge_templates)
    rows = _collect_rows(residual, unknowns)
    return DeterminingSystem(unknowns=unknowns, rows=rows,
                             xi_templates=xi_templates,
                             eta_templates=eta_templates,
                             gauge_templates=tuple(gauge_templates))


def _collect_rows(residual: Expr, unknowns: List[VarId]) -> List[Row]:
    """One sparse row per monomial in the non-parameter variables."""
    index = {c: k for k, c in enumerate(unknowns)}
    buckets: Dict[Monomial, Row] = {}
    for mono, coeff in residual.term_map().items():
        params = [(v, e) for v, e in mono if v.kind == PARAMETER]
        rest = tuple((v, e) for v, e in mono if v.kind != PARAMETER)
        if len(params) != 1 or params[0][1] != 1 or params[0][0] not in index:
            raise AssertionError(
                "internal error: residual is not linear-homogeneous in the "
                "ansatz parameters")
        buckets.setdefault(rest, {})[index[params[0][0]]] = coeff
    return [buckets[key] for key in sorted(buckets, key=mono_key)]


def solve(ds: DeterminingSystem) -> List[Dict[VarId, Fraction]]:
    """Nullspace basis of the determining system as parameter assignments.

    Deterministic given the unknown ordering; each basis vector is
    normalized so its first nonzero entry is 1.
    """
    basis = nullspace(ds.rows, len(ds.unknowns))
    return [{c: v for c, v in zip(ds.unknowns, vec) if v}
            for vec in basis]


def materialize(L: Lagrangian, ds: DeterminingSystem,
                assignment: Dict[VarId, Fraction]) -> NoetherSolution:
    """Substitute a parameter assignment into the ansatz and build the law.

    The residual is re-checked exactly; the solver's word is not taken.
    """
    space = L.space
    bindings = {c: Expr.constant(assignment.get(c, Fraction(0)))
                for c in ds.unknowns}
    xi = {x: t.substitute(bindings) for x, t in ds.xi_templates.items()}
    eta = {u: t.substitute(bindings) for u, t in ds.eta_templates.items()}
    gauge = tuple(t.substitute(bindings) for t in ds.gauge_templates)
    g = Generator(xi={x: e for x, e in xi.items() if not e.is_zero},
                  eta={u: e for u, e in eta.items() if not e.is_zero})
    residual = condition_residual(L, g, gauge)
    if not residual.is_zero:
        raise AssertionError(
            f"internal error: solver returned a non-symmetry; residual {residual}")
    if space.is_ode:
        law = first_integral(L, g, gauge[0])
    else:
        law = conservation_vector(L, g, gauge)
    return NoetherSolution(generator=g, gauge=gauge, law=law)


def solve_noether(L: Lagrangian, ansatz: Ansatz) -> List[NoetherSolution]:
    """End to end: determining system, nullspace, verified solutions.

    Directions with an identically zero generator are dropped: they are
    divergence-free gauge fields (possible for flux-vector gauges) carrying
    no symmetry content.
    """
    ds = determining_system(L, ansatz)
    out = []
    for a in solve(ds):
        sol = materialize(L, ds, a)
        if not sol.generator.is_zero:
            out.append(sol)
    return out


# -- verification mode --------------------------------------------------------


def find_gauge(L: Lagrangian, g: Generator, degree: int = 4,
               jet_order: Optional[int] = None) -> Optional[Tuple[Expr, ...]]:
    """Gauge term making the candidate a symmetry, or None if none exists.

    The gauge is sought as a polynomial over the independents, dependents
    and (optionally) derivatives up to ``jet_order``.  Among the affine
    family of solutions the canonical one (free directions zeroed) is
    returned, so for instance the time-translation candidate of a free field
    gets the zero gauge rather than an arbitrary divergence-free one.
    """
    space = L.space
    if jet_order is None:
        jet_order = (L.order - 1 if space.is_ode else 0)
        jet_order = max(jet_order, g.dependence_order if space.is_ode else 0)
    gauge_vars = list(space.independents) + space.jet_vars(max_order=jet_order)
    monos = _monomials_upto(gauge_vars, degree, include_constant=False)
    unknowns: List[VarId] = []
    templates = [_ansatz_polynomial(space, f"f_{x.name}", monos, unknowns)
                 for x in space.independents]
    residual = condition_residual(L, g, templates)
    index = {c: k for k, c in enumerate(unknowns)}
    buckets: Dict[Monomial, Tuple[Row, Fraction]] = {}
    rows: Dict[Monomial, Row] = {}
    rhs: Dict[Monomial, Fraction] = {}
    for mono, coeff in residual.term_map().items():
        params = [(v, e) for v, e in mono if v.kind == PARAMETER and v in index]
        rest = tuple((v, e) for v, e in mono if not (v.kind == PARAMETER and v in index))
        if not params:
            rhs[rest] = rhs.get(rest, Fraction(0)) - coeff
            rows.setdefault(rest, {})
        elif len(params) == 1 and params[0][1] == 1:
            rows.setdefault(rest, {})[index[params[0][0]]] = coeff
        else:
            raise AssertionError("internal error: gauge enters nonlinearly")
    system = [(rows[key], rhs.get(key, Fraction(0)))
              for key in sorted(rows, key=mono_key)]
    solution = solve_affine(system, len(unknowns))
    if solution is None:
        return None
    bindings = {c: Expr.constant(v) for c, v in zip(unknowns, solution)}
    return tuple(t.substitute(bindings) for t in templates)


def verify_candidate(L: Lagrangian, g: Generator, degree: int = 4,
                     jet_order: Optional[int] = None
                     ) -> Optional[NoetherSolution]:
    """Full verification-mode pipeline for one candidate generator."""
    gauge = find_gauge(L, g, degree=degree, jet_order=jet_order)
    if gauge is None:
        return None
    if L.space.is_ode:
        law = first_integral(L, g, gauge[0])
    else:
        law = conservation_vector(L, g, gauge)
    return NoetherSolution(generator=g, gauge=gauge, law=law)


# -- helpers for working with solution spaces ---------------------------------


def combine_solutions(L: Lagrangian, solutions: Sequence[NoetherSolution],
                      weights: Sequence[Fraction]) -> NoetherSolution:
    """Rational linear combination of solutions (the set is a vector space)."""
    space = L.space
    xi: Dict[VarId, Expr] = {}
    eta: Dict[VarId, Expr] = {}
    gauge = [Expr.zero() for _ in space.independents]
    for sol, w in zip(solutions, weights):
        for x, e in sol.generator.xi.items():
            xi[x] = xi.get(x, Expr.zero()) + e * w
        for u, e in sol.generator.eta.items():
            eta[u] = eta.get(u, Expr.zero()) + e * w
        for j in range(len(space.independents)):
            gauge[j] = gauge[j] + sol.gauge[j] * w
    g = Generator(xi={x: e for x, e in xi.items() if not e.is_zero},
                  eta={u: e for u, e in eta.items() if not e.is_zero})
    if space.is_ode:
        law = first_integral(L, g, gauge[0])
    else:
        law = conservation_vector(L, g, gauge)
    return NoetherSolution(generator=g, gauge=tuple(gauge), law=law)


def match_generator(L: Lagrangian, solutions: Sequence[NoetherSolution],
                    target: Generator) -> Optional[NoetherSolution]:
    """The combination of basis solutions whose generator equals ``target``.

    Solves exactly for the weights; returns None when the target is outside
    the span.  Since the gauge is determined by the generator (additive
    constants are excluded from every ansatz), the matched solution is
    unique.
    """
    space = L.space
    columns: Dict[Tuple[str, VarId, Monomial], int] = {}
    rows_by_key: Dict[Tuple[str, VarId, Monomial], Row] = {}
    rhs_by_key: Dict[Tuple[str, VarId, Monomial], Fraction] = {}

    def feed(kind: str, var: VarId, expr: Expr, col: Optional[int],
             value: Fraction = Fraction(0)):
        for mono, coeff in expr.term_map().items():
            key = (kind, var, mono)
            rows_by_key.setdefault(key, {})
            if col is None:
                rhs_by_key[key] = rhs_by_key.get(key, Fraction(0)) + coeff
            else:
                rows_by_key[key][col] = coeff

    for k, sol in enumerate(solutions):
        for x in space.independents:
            feed("xi", x, sol.generator.xi_of(x), k)
        for u in space.dependents:
            feed("eta", u, sol.generator.eta_of(u), k)
    for x in space.independents:
        feed("xi", x, target.xi_of(x), None)
    for u in space.dependents:
        feed("eta", u, target.eta_of(u), None)

    keys = sorted(rows_by_key, key=lambda key: (key[0], key[1].sort_index,
                                                mono_key(key[2])))
    system = [(rows_by_key[key], rhs_by_key.get(key, Fraction(0)))
              for key in keys]
    weights = solve_affine(system, len(solutions))
    if weights is None:
        return None
    return combine_solutions(L, solutions, weights)
