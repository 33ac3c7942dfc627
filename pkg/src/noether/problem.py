"""Problem-file ingestion and validation.

A problem file is a flat key-value text in INI-style sections::

    # comment lines start with '#'
    [problem]
    independents = x          # comma or whitespace separated names
    dependents = y
    lagrangian = 1/2*y'^2     # expression in the documented grammar
    order = 1                 # must equal the highest derivative present

    [ansatz]                  # optional; all keys optional
    degree = 4
    jet_order = 0
    gauge = on                # on/off
    gauge_degree = 4
    gauge_jet_order = 1
    suppress_xi = off

    [generators]              # optional; verification-mode candidates
    G5 = xi_x: x^2; eta_y: x*y

    [laws]                    # optional; candidate conservation laws
    I3 = 1/2*y'^2             # PDE laws list one component per independent,
                              # comma separated

    [numeric]                 # optional overrides for the validator
    step = 1e-3
    horizon = 10.0
    tolerance = 1e-8
    seed = 42

Generator coefficients are named ``xi_<independent>`` and
``eta_<dependent>``; in single-independent problems the aliases ``xi``,
``tau`` and (for a single dependent) ``eta`` are accepted.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .engine import Ansatz, ConservationLaw
from .expr import Expr, VarId
from .jets import Generator, JetSpace
from .numeric import NumericConfig
from .parsing import ParseError, parse
from .variational import Lagrangian


class ProblemError(ValueError):
    """Invalid problem file; the message names the offending field."""


_PROBLEM_KEYS = {"independents", "dependents", "lagrangian", "order"}
_ANSATZ_KEYS = {"degree", "jet_order", "gauge", "gauge_degree",
                "gauge_jet_order", "suppress_xi"}
_NUMERIC_KEYS = {"step", "horizon", "tolerance", "seed"}
_SECTIONS = {"problem", "ansatz", "generators", "laws", "numeric"}


@dataclass
class Problem:
    """A fully validated problem: space, Lagrangian, ansatz and candidates."""

    space: JetSpace
    lagrangian: Lagrangian
    ansatz: Ansatz
    candidates: List[Tuple[str, Generator]] = field(default_factory=list)
    candidate_laws: List[Tuple[str, ConservationLaw]] = field(default_factory=list)
    numeric: NumericConfig = field(default_factory=NumericConfig)
    source: str = ""

    def echo(self) -> Dict:
        return {
            "independents": [v.name for v in self.space.independents],
            "dependents": [v.name for v in self.space.dependents],
            "lagrangian": str(self.lagrangian.body),
            "order": self.lagrangian.order,
        }


def _names(raw: str, what: str) -> List[str]:
    names = [n for chunk in raw.split(",") for n in chunk.split()]
    if not names:
        raise ProblemError(f"field {what!r} must list at least one name")
    if len(set(names)) != len(names):
        raise ProblemError(f"field {what!r} repeats a name")
    return names


def _bool(raw: str, what: str) -> bool:
    v = raw.strip().lower()
    if v in ("on", "true", "yes", "1"):
        return True
    if v in ("off", "false", "no", "0"):
        return False
    raise ProblemError(f"field {what!r} must be on/off, got {raw!r}")


def _int(raw: str, what: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ProblemError(f"field {what!r} must be an integer, got {raw!r}")


def _float(raw: str, what: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ProblemError(f"field {what!r} must be a number, got {raw!r}")


def _parse_expr(text: str, space: JetSpace, what: str) -> Expr:
    try:
        return parse(text, space)
    except ParseError as err:
        raise ProblemError(f"in {what}: {err}")


def _coefficient_target(space: JetSpace, key: str, what: str) -> Tuple[str, VarId]:
    if key in ("xi", "tau") and space.is_ode:
        return "xi", space.independents[0]
    if key == "eta" and len(space.dependents) == 1:
        return "eta", space.dependents[0]
    for prefix, pool in (("xi_", space.independents), ("eta_", space.dependents)):
        if key.startswith(prefix):
            name = key[len(prefix):]
            for v in pool:
                if v.name == name:
                    return prefix[:-1], v
            raise ProblemError(
                f"in {what}: {key!r} names no declared variable")
    raise ProblemError(
        f"in {what}: coefficient keys look like xi_<independent> or "
        f"eta_<dependent>, got {key!r}")


def _parse_generator(space: JetSpace, name: str, raw: str) -> Generator:
    xi: Dict[VarId, Expr] = {}
    eta: Dict[VarId, Expr] = {}
    what = f"generator {name!r}"
    for piece in raw.split(";"):
        piece = piece.strip()
        if not piece:
            continue
        if ":" not in piece:
            raise ProblemError(
                f"in {what}: expected 'coefficient: expression', got {piece!r}")
        key, text = piece.split(":", 1)
        kind, var = _coefficient_target(space, key.strip(), what)
        value = _parse_expr(text.strip(), space, what)
        target = xi if kind == "xi" else eta
        if var in target:
            raise ProblemError(f"in {what}: duplicate coefficient for {var.name!r}")
        target[var] = value
    return Generator(xi={v: e for v, e in xi.items() if not e.is_zero},
                     eta={v: e for v, e in eta.items() if not e.is_zero})


def _parse_law(space: JetSpace, name: str, raw: str) -> ConservationLaw:
    parts = [p.strip() for p in raw.split(",")]
    n = len(space.independents)
    if len(parts) != n:
        raise ProblemError(
            f"law {name!r} needs {n} component(s), got {len(parts)}")
    components = tuple(_parse_expr(p, space, f"law {name!r}") for p in parts)
    kind = "first-integral" if space.is_ode else "flux-vector"
    return ConservationLaw(kind, components)


def load_problem(path: str) -> Problem:
    """Read, parse and validate a problem file."""
    cp = configparser.ConfigParser(delimiters=("=",), interpolation=None)
    cp.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh, source=path)
    except OSError as err:
        raise ProblemError(f"cannot read {path}: {err}")
    except configparser.Error as err:
        raise ProblemError(f"bad problem file {path}: {err}")

    unknown = set(cp.sections()) - _SECTIONS
    if unknown:
        raise ProblemError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if "problem" not in cp:
        raise ProblemError("missing [problem] section")

    prob = cp["problem"]
    extra = set(prob) - _PROBLEM_KEYS
    if extra:
        raise ProblemError(f"unknown [problem] key(s): {', '.join(sorted(extra))}")
    for required in ("independents", "dependents", "lagrangian", "order"):
        if required not in prob:
            raise ProblemError(f"missing [problem] field {required!r}")

    independents = _names(prob["independents"], "independents")
    dependents = _names(prob["dependents"], "dependents")
    order = _int(prob["order"], "order")
    if order < 1:
        raise ProblemError("field 'order' must be at least 1")

    try:
        space = JetSpace(independents, dependents, max_order=2 * order + 2)
    except ValueError as err:
        raise ProblemError(str(err))
    body = _parse_expr(prob["lagrangian"], space, "field 'lagrangian'")
    actual = body.max_jet_order()
    if actual != order:
        raise ProblemError(
            f"field 'order' is {order} but the lagrangian's highest "
            f"derivative has order {actual}")
    lagrangian = Lagrangian(space, order, body)

    ansatz_kwargs = {}
    if "ansatz" in cp:
        sec = cp["ansatz"]
        extra = set(sec) - _ANSATZ_KEYS
        if extra:
            raise ProblemError(
                f"unknown [ansatz] key(s): {', '.join(sorted(extra))}")
        if "degree" in sec:
            ansatz_kwargs["coeff_degree"] = _int(sec["degree"], "ansatz.degree")
        if "jet_order" in sec:
            ansatz_kwargs["coeff_jet_order"] = _int(sec["jet_order"],
                                                    "ansatz.jet_order")
        if "gauge" in sec:
            ansatz_kwargs["include_gauge"] = _bool(sec["gauge"], "ansatz.gauge")
        if "gauge_degree" in sec:
            ansatz_kwargs["gauge_degree"] = _int(sec["gauge_degree"],
                                                 "ansatz.gauge_degree")
        if "gauge_jet_order" in sec:
            ansatz_kwargs["gauge_jet_order"] = _int(sec["gauge_jet_order"],
                                                    "ansatz.gauge_jet_order")
        if "suppress_xi" in sec:
            ansatz_kwargs["suppress_xi"] = _bool(sec["suppress_xi"],
                                                 "ansatz.suppress_xi")
    try:
        ansatz = Ansatz(**ansatz_kwargs)
    except ValueError as err:
        raise ProblemError(f"bad ansatz: {err}")

    candidates = []
    if "generators" in cp:
        for name, raw in cp["generators"].items():
            candidates.append((name, _parse_generator(space, name, raw)))

    laws = []
    if "laws" in cp:
        for name, raw in cp["laws"].items():
            laws.append((name, _parse_law(space, name, raw)))

    numeric_kwargs = {}
    if "numeric" in cp:
        sec = cp["numeric"]
        extra = set(sec) - _NUMERIC_KEYS
        if extra:
            raise ProblemError(
                f"unknown [numeric] key(s): {', '.join(sorted(extra))}")
        if "step" in sec:
            numeric_kwargs["step"] = _float(sec["step"], "numeric.step")
        if "horizon" in sec:
            numeric_kwargs["horizon"] = _float(sec["horizon"], "numeric.horizon")
        if "tolerance" in sec:
            numeric_kwargs["tolerance"] = _float(sec["tolerance"],
                                                 "numeric.tolerance")
        if "seed" in sec:
            numeric_kwargs["seed"] = _int(sec["seed"], "numeric.seed")
    try:
        numeric = NumericConfig(**numeric_kwargs)
    except ValueError as err:
        raise ProblemError(f"bad numeric config: {err}")

    return Problem(space=space, lagrangian=lagrangian, ansatz=ansatz,
                   candidates=candidates, candidate_laws=laws,
                   numeric=numeric, source=path)
