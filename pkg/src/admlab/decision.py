"""Finite decision problems: risk matrices, priors, mixtures, Bayes risk, serialization.

All standard-scale arithmetic is exact rational; hyper priors carry
Levi-Civita weights.  Floats never enter a risk computation, so dominance
and certificate verdicts cannot depend on rounding.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from admlab.hyperreal import LCNumber

__all__ = [
    "DecisionProblem",
    "Mixture",
    "Prior",
    "ProblemFormatError",
    "bayes_risk",
    "format_rational",
    "load_problem",
    "mixture_risk",
    "random_problem",
    "risk_at",
    "save_problem",
]

REAL = "REAL"
HYPER = "HYPER"


class ProblemFormatError(ValueError):
    """A problem file or constructor argument violates the format contract."""


def _exact(v, where: str) -> Fraction:
    if isinstance(v, bool) or isinstance(v, float):
        raise ProblemFormatError(
            f"{where}: floats are not accepted; write rationals as strings like \"3/10\" or \"0.3\"")
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, Rational):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError) as ex:
            raise ProblemFormatError(f"{where}: cannot parse rational from {v!r}") from ex
    raise ProblemFormatError(f"{where}: expected a rational, got {type(v).__name__}")


@dataclass(frozen=True)
class Prior:
    """Probability weights over the parameter labels.

    kind REAL stores exact rationals; kind HYPER stores Levi-Civita
    numbers, allowing infinitesimal (but still nonnegative) weights.
    Weights must sum to exactly 1 either way.
    """

    weights: dict
    kind: str = REAL

    def __post_init__(self):
        if self.kind not in (REAL, HYPER):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if not self.weights:
            raise ValueError("prior needs at least one weight")
        clean = {}
        for label, w in self.weights.items():
            if self.kind == HYPER:
                w = w if isinstance(w, LCNumber) else LCNumber.from_real(_exact(w, f"prior weight {label}"))
                if w.sign() < 0:
                    raise ValueError(f"prior weight for {label} is negative: {w}")
            else:
                if isinstance(w, LCNumber):
                    raise ValueError("REAL prior cannot hold Levi-Civita weights; use kind HYPER")
                w = _exact(w, f"prior weight {label}")
                if w < 0:
                    raise ValueError(f"prior weight for {label} is negative: {w}")
            clean[label] = w
        total = _lc_sum(clean.values()) if self.kind == HYPER else sum(clean.values())
        if total != 1:
            raise ValueError(f"prior weights must sum to exactly 1, got {total}")
        object.__setattr__(self, "weights", clean)

    @classmethod
    def from_weights(cls, weights) -> "Prior":
        kind = HYPER if any(isinstance(w, LCNumber) for w in weights.values()) else REAL
        return cls(weights, kind)

    @classmethod
    def dirac(cls, label) -> "Prior":
        return cls({label: Fraction(1)})

    def weight(self, label):
        zero = LCNumber.zero() if self.kind == HYPER else Fraction(0)
        return self.weights.get(label, zero)


def _lc_sum(values):
    acc = LCNumber.zero()
    for v in values:
        acc = acc + v
    return acc


@dataclass(frozen=True)
class Mixture:
    """Rational convex weights over base procedures."""

    weights: dict

    def __post_init__(self):
        clean = {}
        for label, w in self.weights.items():
            w = _exact(w, f"mixture weight {label}")
            if w < 0:
                raise ValueError(f"mixture weight for {label} is negative: {w}")
            if w > 0:
                clean[label] = w
        if sum(clean.values()) != 1:
            raise ValueError("mixture weights must sum to exactly 1")
        object.__setattr__(self, "weights", clean)

    @classmethod
    def point_mass(cls, label) -> "Mixture":
        return cls({label: Fraction(1)})

    def support(self):
        return set(self.weights)


@dataclass(frozen=True)
class DecisionProblem:
    """A finite decision problem: parameter labels, procedure labels, exact risk matrix."""

    theta_labels: tuple
    proc_labels: tuple
    risk: tuple                      # rows indexed by theta, columns by procedure
    allow_mixtures: bool = True
    priors: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        thetas = tuple(self.theta_labels)
        procs = tuple(self.proc_labels)
        if not thetas or not procs:
            raise ProblemFormatError("need at least one parameter and one procedure")
        if len(set(thetas)) != len(thetas):
            raise ProblemFormatError("duplicate parameter labels")
        if len(set(procs)) != len(procs):
            raise ProblemFormatError("duplicate procedure labels")
        rows = tuple(self.risk)
        if len(rows) != len(thetas):
            raise ProblemFormatError(
                f"risk matrix has {len(rows)} rows for {len(thetas)} parameters")
        matrix = []
        for i, row in enumerate(rows):
            row = tuple(row)
            if len(row) != len(procs):
                raise ProblemFormatError(
                    f"risk row {i} has {len(row)} entries for {len(procs)} procedures")
            matrix.append(tuple(_exact(v, f"risk[{i}][{j}]") for j, v in enumerate(row)))
        object.__setattr__(self, "theta_labels", thetas)
        object.__setattr__(self, "proc_labels", procs)
        object.__setattr__(self, "risk", tuple(matrix))

    def theta_index(self, label) -> int:
        try:
            return self.theta_labels.index(label)
        except ValueError:
            raise ValueError(f"unknown parameter label {label!r}") from None

    def proc_index(self, label) -> int:
        try:
            return self.proc_labels.index(label)
        except ValueError:
            raise ValueError(f"unknown procedure label {label!r}") from None

    def risk_lower_bound(self) -> Fraction:
        return min(min(row) for row in self.risk)


def risk_at(p: DecisionProblem, theta, proc) -> Fraction:
    return p.risk[p.theta_index(theta)][p.proc_index(proc)]


def mixture_risk(p: DecisionProblem, theta, m: Mixture) -> Fraction:
    if not p.allow_mixtures:
        raise ValueError("mixtures are disabled for this problem")
    i = p.theta_index(theta)
    total = Fraction(0)
    for label, w in m.weights.items():
        total += w * p.risk[i][p.proc_index(label)]
    return total


def bayes_risk(p: DecisionProblem, prior: Prior, delta):
    """Prior-weighted risk of a procedure label or a Mixture.

    Returns a Fraction for REAL priors, an LCNumber for HYPER priors.
    """
    for label in prior.weights:
        p.theta_index(label)
    if isinstance(delta, Mixture):
        per_theta = {t: mixture_risk(p, t, delta) for t in p.theta_labels}
    else:
        j = p.proc_index(delta)
        per_theta = {t: p.risk[i][j] for i, t in enumerate(p.theta_labels)}
    if prior.kind == HYPER:
        return _lc_sum(prior.weight(t) * per_theta[t] for t in p.theta_labels)
    return sum(prior.weight(t) * per_theta[t] for t in p.theta_labels)


# -- serialization -----------------------------------------------------------

def _reject_float(s):
    raise ProblemFormatError(
        f"bare float {s!r} in problem file; write rationals as strings like \"1/3\" or \"0.25\"")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _parse_prior_weight(s, where: str):
    if isinstance(s, str) and ("ε" in s or "eps" in s):
        try:
            return LCNumber.parse(s)
        except ValueError as ex:
            raise ProblemFormatError(f"{where}: {ex}") from ex
    return _exact(s, where)


def load_problem(data) -> DecisionProblem:
    """Parse a problem from JSON bytes or text, validating every invariant."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data, parse_float=_reject_float)
    except json.JSONDecodeError as ex:
        raise ProblemFormatError(f"not valid JSON: line {ex.lineno} column {ex.colno}") from ex
    if not isinstance(raw, dict):
        raise ProblemFormatError("top level must be a JSON object")
    for key in ("theta", "procedures", "risk"):
        if key not in raw:
            raise ProblemFormatError(f"missing required field {key!r}")
    theta = raw["theta"]
    procs = raw["procedures"]
    risk = raw["risk"]
    if not isinstance(theta, list) or not all(isinstance(t, str) for t in theta):
        raise ProblemFormatError("field 'theta' must be a list of strings")
    if not isinstance(procs, list) or not all(isinstance(d, str) for d in procs):
        raise ProblemFormatError("field 'procedures' must be a list of strings")
    if not isinstance(risk, list) or not all(isinstance(row, list) for row in risk):
        raise ProblemFormatError("field 'risk' must be a list of rows")
    allow = raw.get("allow_mixtures", True)
    if not isinstance(allow, bool):
        raise ProblemFormatError("field 'allow_mixtures' must be a boolean")
    priors = {}
    for name, spec in (raw.get("priors") or {}).items():
        if not isinstance(spec, dict):
            raise ProblemFormatError(f"prior {name!r} must map labels to weights")
        weights = {lbl: _parse_prior_weight(w, f"prior {name!r}, weight {lbl!r}")
                   for lbl, w in spec.items()}
        try:
            priors[name] = Prior.from_weights(weights)
        except ValueError as ex:
            raise ProblemFormatError(f"prior {name!r}: {ex}") from ex
        if set(weights) - set(theta):
            raise ProblemFormatError(f"prior {name!r} references unknown labels")
    p = DecisionProblem(tuple(theta), tuple(procs), tuple(map(tuple, risk)), allow, priors)
    return p


def save_problem(p: DecisionProblem) -> bytes:
    doc = {
        "theta": list(p.theta_labels),
        "procedures": list(p.proc_labels),
        "risk": [[format_rational(v) for v in row] for row in p.risk],
        "allow_mixtures": p.allow_mixtures,
    }
    if p.priors:
        doc["priors"] = {
            name: {lbl: (str(w) if isinstance(w, LCNumber) else format_rational(w))
                   for lbl, w in pr.weights.items()}
            for name, pr in p.priors.items()
        }
    return (json.dumps(doc, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def random_problem(n_theta: int, n_proc: int, seed: int,
                   grid_denominator: int = 8) -> DecisionProblem:
    """Risk entries i.i.d. uniform on the grid {0, 1/q, ..., 1}, deterministic in seed.

    The coarse default grid keeps dominance gaps macroscopic, which the
    randomized equivalence suites rely on.
    """
    if n_theta < 1 or n_proc < 1:
        raise ValueError("sizes must be at least 1")
    rng = random.Random(seed)
    risk = tuple(
        tuple(Fraction(rng.randint(0, grid_denominator), grid_denominator)
              for _ in range(n_proc))
        for _ in range(n_theta))
    return DecisionProblem(
        tuple(f"t{i+1}" for i in range(n_theta)),
        tuple(f"d{j+1}" for j in range(n_proc)),
        risk)
