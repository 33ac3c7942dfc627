"""Shared test helpers: seeded random expressions and independent oracles.

The oracles here deliberately avoid the code paths they cross-check: the
closed-form prolongation uses the explicit binomial sum, the first-integral
oracle expands the textbook double sum directly, and on-shell checks
substitute solved derivatives by hand instead of calling the reducer.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from noether import Expr, Generator, JetSpace, total_derivative

SEED = 42


def rand_expr(rng: random.Random, vars, max_terms=4, max_degree=3,
              coeff_bound=6) -> Expr:
    """Random polynomial over the given variables with small rational
    coefficients; may be zero."""
    total = Expr.zero()
    for _ in range(rng.randint(0, max_terms)):
        term = Expr.constant(Fraction(rng.randint(-coeff_bound, coeff_bound),
                                      rng.randint(1, 4)))
        for _ in range(rng.randint(0, max_degree)):
            term = term * Expr.variable(rng.choice(vars))
        total = total + term
    return total


def rand_nonzero_expr(rng, vars, **kw) -> Expr:
    for _ in range(50):
        e = rand_expr(rng, vars, **kw)
        if not e.is_zero:
            return e
    raise AssertionError("could not draw a nonzero expression")


def closed_form_zeta(g: Generator, j: int, space: JetSpace):
    """Binomial closed form of the order-j prolongation coefficients.

    zeta^j = eta^(j) - sum_{k=1..j} C(j,k) q^(j+1-k) tau^(k), with
    parenthesised superscripts meaning iterated total derivatives.
    """
    t = space.independents[0]

    def dt(e, times):
        for _ in range(times):
            e = total_derivative(e, t, space)
        return e

    tau = g.xi_of(t)
    out = {}
    for i, dep in enumerate(space.dependents):
        zeta = dt(g.eta_of(dep), j)
        for k in range(1, j + 1):
            q_jk = Expr.variable(space.jet(i, (j + 1 - k,)))
            zeta = zeta - q_jk * dt(tau, k) * math.comb(j, k)
        out[dep] = zeta
    return out


def first_integral_closed_form(L, g, f: Expr) -> Expr:
    """Direct expansion of the first-integral formula for one dependent
    variable: I = f - [tau L + sum_{i,j} (-1)^j Q^(i) D^j dL/dq^(i+j+1)]."""
    space = L.space
    t = space.independents[0]
    p = L.order

    def dt(e, times):
        for _ in range(times):
            e = total_derivative(e, t, space)
        return e

    tau = g.xi_of(t)
    bracket = tau * L.body
    for k, dep in enumerate(space.dependents):
        q = g.eta_of(dep) - Expr.variable(space.jet(k, (1,))) * tau
        for i in range(p):
            for j in range(p - i):
                part = L.body.partial(space.jet(k, (i + j + 1,)))
                if part.is_zero:
                    continue
                term = dt(q, i) * dt(part, j)
                bracket = bracket + (term if j % 2 == 0 else -term)
    return f - bracket


def on_shell_zero(expr: Expr, space: JetSpace, solved: dict, depth=6) -> bool:
    """Substitute solved derivatives (and their raised forms) directly.

    Independent of the reducer: builds the full substitution map up to the
    working order and applies it repeatedly.
    """
    for _ in range(depth):
        bindings = {}
        for h, rhs in solved.items():
            for v in expr.variables():
                if v.kind != "jet" or v.dep_index != h.dep_index:
                    continue
                if all(a >= b for a, b in zip(v.multi_index, h.multi_index)):
                    delta = tuple(a - b for a, b in
                                  zip(v.multi_index, h.multi_index))
                    repl = rhs
                    for j, count in enumerate(delta):
                        for _ in range(count):
                            repl = total_derivative(
                                repl, space.independents[j], space)
                    bindings[v] = repl
        if not bindings:
            return expr.is_zero
        expr = expr.substitute(bindings)
    return expr.is_zero
