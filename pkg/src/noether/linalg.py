"""Exact rational linear algebra on sparse rows.

Rows are dictionaries mapping column index to a nonzero Fraction.  The
elimination order is fixed by the input row order and by always pivoting on
the leftmost column, so results are deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

Row = Dict[int, Fraction]


def _axpy(target: Row, factor: Fraction, source: Row) -> None:
    """target -= factor * source, dropping zeros."""
    for col, val in source.items():
        s = target.get(col, Fraction(0)) - factor * val
        if s:
            target[col] = s
        else:
            target.pop(col, None)


def rref(rows: List[Row]) -> Dict[int, Row]:
    """Reduced row echelon form; returns pivot column -> normalized row.

    Every returned row has coefficient 1 in its pivot column and contains no
    other pivot column, so back-substitution can read answers directly.
    """
    pivots: Dict[int, Row] = {}
    for row in rows:
        r = dict(row)
        # Existing pivot rows hold no pivot columns besides their own, so a
        # single sweep clears every pivot-column entry from r.
        for col in sorted(r):
            if col in r and col in pivots:
                _axpy(r, r[col], pivots[col])
        if not r:
            continue
        lead = min(r)
        lv = r[lead]
        if lv != 1:
            r = {c: v / lv for c, v in r.items()}
        for prow in pivots.values():
            if lead in prow:
                _axpy(prow, prow[lead], r)
        pivots[lead] = r
    return pivots


def nullspace(rows: List[Row], n_cols: int) -> List[List[Fraction]]:
    """Basis of the solution space of the homogeneous system.

    One vector per free column, in ascending column order; each vector is
    normalized so its first nonzero entry is 1.
    """
    pivots = rref(rows)
    basis = []
    for free in range(n_cols):
        if free in pivots:
            continue
        vec = [Fraction(0)] * n_cols
        vec[free] = Fraction(1)
        for pcol, prow in pivots.items():
            val = prow.get(free)
            if val:
                vec[pcol] = -val
        first = next(v for v in vec if v)
        if first != 1:
            vec = [v / first for v in vec]
        basis.append(vec)
    return basis


def solve_affine(rows: List[Tuple[Row, Fraction]],
                 n_cols: int) -> Optional[List[Fraction]]:
    """One exact solution of A x = b, or None when inconsistent.

    Free variables are set to zero, so the answer is the canonical
    particular solution of the reduced system.
    """
    rhs_col = n_cols
    combined = []
    for row, rhs in rows:
        r = dict(row)
        if rhs:
            r[rhs_col] = -rhs
        combined.append(r)
    pivots = rref(combined)
    if rhs_col in pivots:
        return None
    solution = [Fraction(0)] * n_cols
    for pcol, prow in pivots.items():
        solution[pcol] = -prow.get(rhs_col, Fraction(0))
    return solution
