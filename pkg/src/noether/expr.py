"""Exact multivariate polynomial arithmetic over jet-space variables.

An expression is a sparse polynomial with rational coefficients: a map from
monomials (exponent vectors over interned variables) to nonzero
``fractions.Fraction`` values.  This canonical distributed form makes
equality a dictionary comparison and keeps every operation exact -- there is
no floating point anywhere in the symbolic layer.  Division is permitted
only by nonzero rational constants, so the value set is a polynomial ring.

Variables are ``VarId`` objects interned by the owning registry (see
``noether.jets.JetSpace``): equal content implies the same object, so
identity comparison is safe and monomials can be ordered by each variable's
registration index (graded-lexicographic order).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, Mapping, Tuple

INDEPENDENT = "independent"
DEPENDENT = "dependent"
JET = "jet"
PARAMETER = "parameter"


@dataclass(frozen=True, eq=False)
class VarId:
    """An interned variable of a jet space.

    Instances are created only by a ``JetSpace`` (or its ``parameter``
    factory), which guarantees one object per distinct variable, so the
    inherited identity ``__eq__``/``__hash__`` are both correct and fast.

    ``multi_index`` holds one derivative count per independent variable; it
    is all zeros for a plain dependent variable and empty for independents
    and parameters.
    """

    kind: str
    name: str
    sort_index: int
    dep_index: int = -1
    multi_index: Tuple[int, ...] = ()

    @property
    def order(self) -> int:
        """Derivative order (0 for anything that is not a jet coordinate)."""
        return sum(self.multi_index)

    def __repr__(self) -> str:
        return f"VarId({self.name!r})"


# A monomial is a tuple of (variable, exponent) pairs with positive
# exponents, sorted by ascending sort_index.  The empty tuple is 1.
Monomial = Tuple[Tuple[VarId, int], ...]

MONO_ONE: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    """Merge two sorted monomials, adding exponents."""
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va.sort_index < vb.sort_index:
            out.append(a[i])
            i += 1
        elif vb.sort_index < va.sort_index:
            out.append(b[j])
            j += 1
        else:
            out.append((va, ea + eb))
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_key(m: Monomial):
    """Graded-lexicographic sort key; earlier-registered variables dominate.

    Negating the sort index turns the sparse pair list into a tuple whose
    natural ordering is the lexicographic order with "absent variable means
    exponent zero" behaviour.
    """
    return (mono_degree(m), tuple((-v.sort_index, e) for v, e in m))


def mono_str(m: Monomial) -> str:
    if not m:
        return "1"
    parts = []
    for v, e in m:
        parts.append(v.name if e == 1 else f"{v.name}^{e}")
    return "*".join(parts)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    raise TypeError(f"expected a rational coefficient, got {type(c).__name__}")


class Expr:
    """Canonical polynomial: immutable by convention, hashable, exact.

    The term map never stores a zero coefficient, so two expressions are
    semantically equal exactly when their term maps are equal.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Dict[Monomial, Fraction] | None = None):
        clean: Dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = _as_fraction(coeff)
                if coeff != 0:
                    clean[mono] = coeff
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "Expr":
        return Expr()

    @staticmethod
    def one() -> "Expr":
        return Expr({MONO_ONE: Fraction(1)})

    @staticmethod
    def constant(c) -> "Expr":
        return Expr({MONO_ONE: _as_fraction(c)})

    @staticmethod
    def variable(v: VarId) -> "Expr":
        return Expr({((v, 1),): Fraction(1)})

    @staticmethod
    def term(coeff, mono: Monomial) -> "Expr":
        return Expr({mono: _as_fraction(coeff)})

    # -- inspection ----------------------------------------------------

    def terms(self) -> Iterator[Tuple[Monomial, Fraction]]:
        """Iterate (monomial, coefficient) in descending canonical order."""
        for mono in sorted(self._terms, key=mono_key, reverse=True):
            yield mono, self._terms[mono]

    def term_map(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and MONO_ONE in self._terms)

    def constant_value(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError(f"not a constant expression: {self}")
        return self._terms[MONO_ONE]

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def variables(self) -> set:
        out = set()
        for mono in self._terms:
            for v, _ in mono:
                out.add(v)
        return out

    def total_degree(self) -> int:
        return max((mono_degree(m) for m in self._terms), default=0)

    def max_jet_order(self) -> int:
        """Highest derivative order among jet coordinates present."""
        best = 0
        for v in self.variables():
            if v.kind == JET:
                best = max(best, v.order)
        return best

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    # -- ring operations -----------------------------------------------

    def __add__(self, other: "Expr") -> "Expr":
        if not isinstance(other, Expr):
            return NotImplemented
        if not self._terms:
            return other
        if not other._terms:
            return self
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            s = out.get(mono, Fraction(0)) + coeff
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return _raw(out)

    def __sub__(self, other: "Expr") -> "Expr":
        if not isinstance(other, Expr):
            return NotImplemented
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            s = out.get(mono, Fraction(0)) - coeff
            if s:
                out[mono] = s
            else:
                out.pop(mono, None)
        return _raw(out)

    def __neg__(self) -> "Expr":
        return _raw({m: -c for m, c in self._terms.items()})

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Expr.zero()
            return _raw({m: co * c for m, co in self._terms.items()})
        if not isinstance(other, Expr):
            return NotImplemented
        if not self._terms or not other._terms:
            return Expr.zero()
        out: Dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = mono_mul(m1, m2)
                s = out.get(mono, Fraction(0)) + c1 * c2
                if s:
                    out[mono] = s
                else:
                    out.pop(mono, None)
        return _raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Expr":
        if isinstance(other, Expr):
            if not other.is_constant:
                raise ValueError("division is only defined by rational constants")
            other = other.constant_value()
        c = _as_fraction(other)
        if c == 0:
            raise ZeroDivisionError("division of an expression by zero")
        return _raw({m: co / c for m, co in self._terms.items()})

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int) or n < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {n!r}")
        result = Expr.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus and structure -----------------------------------------

    def partial(self, v: VarId) -> "Expr":
        """Formal partial derivative; every other variable is a constant."""
        out: Dict[Monomial, Fraction] = {}
        for mono, coeff in self._terms.items():
            for i, (w, e) in enumerate(mono):
                if w is v:
                    if e == 1:
                        reduced = mono[:i] + mono[i + 1:]
                    else:
                        reduced = mono[:i] + ((w, e - 1),) + mono[i + 1:]
                    s = out.get(reduced, Fraction(0)) + coeff * e
                    if s:
                        out[reduced] = s
                    else:
                        out.pop(reduced, None)
                    break
        return _raw(out)

    def substitute(self, bindings: Mapping[VarId, "Expr"]) -> "Expr":
        """Simultaneous substitution followed by canonicalisation.

        The binding set must be acyclic: no bound variable may appear in any
        replacement expression.
        """
        if not bindings:
            return self
        bound = set(bindings)
        for repl in bindings.values():
            overlap = bound & repl.variables()
            if overlap:
                names = ", ".join(sorted(v.name for v in overlap))
                raise ValueError(f"cyclic substitution involving {names}")
        result = Expr.zero()
        for mono, coeff in self._terms.items():
            kept = []
            piece = None
            for v, e in mono:
                repl = bindings.get(v)
                if repl is None:
                    kept.append((v, e))
                else:
                    p = repl ** e
                    piece = p if piece is None else piece * p
            term = Expr.term(coeff, tuple(kept))
            if piece is not None:
                term = term * piece
            result = result + term
        return result

    def collect(self, vars: Iterable[VarId]) -> Dict[Monomial, "Expr"]:
        """Partition by monomials in ``vars``; coefficients are free of them.

        Summing coefficient * monomial over the result reproduces the
        expression exactly.
        """
        selected = set(vars)
        if not selected:
            raise ValueError("collect requires a non-empty variable set")
        buckets: Dict[Monomial, Dict[Monomial, Fraction]] = {}
        for mono, coeff in self._terms.items():
            inside = tuple((v, e) for v, e in mono if v in selected)
            outside = tuple((v, e) for v, e in mono if v not in selected)
            buckets.setdefault(inside, {})[outside] = coeff
        return {key: _raw(tm) for key, tm in buckets.items()}

    def evaluate(self, values: Mapping[VarId, Fraction | int]) -> Fraction:
        """Exact rational evaluation; every present variable must be bound."""
        total = Fraction(0)
        for mono, coeff in self._terms.items():
            acc = coeff
            for v, e in mono:
                if v not in values:
                    raise ValueError(f"unbound variable {v.name!r} in evaluation")
                acc *= Fraction(values[v]) ** e
            total += acc
        return total

    # -- formatting ------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for mono, coeff in self.terms():
            if mono == MONO_ONE:
                body = str(abs(coeff))
            elif abs(coeff) == 1:
                body = mono_str(mono)
            else:
                body = f"{abs(coeff)}*{mono_str(mono)}"
            if not chunks:
                chunks.append(body if coeff > 0 else f"-{body}")
            else:
                chunks.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(chunks)

    def __repr__(self) -> str:
        return f"Expr({self})"


def _raw(terms: Dict[Monomial, Fraction]) -> Expr:
    """Wrap an already-canonical term map without re-checking it."""
    e = Expr.__new__(Expr)
    e._terms = terms
    e._hash = None
    return e
