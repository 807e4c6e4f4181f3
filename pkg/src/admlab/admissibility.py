"""Dominance, admissibility, positive-prior certificates, witness sets, and the
Stein-style condition checkers, all in exact rational (or Levi-Civita) arithmetic.

Every verdict that comes out of a linear program is re-verified by direct
recomputation, so the LP kernel is never the single point of trust.
Throughout, the infimum over the convex hull of procedures is replaced by
the minimum over its vertices, which is exact because risk is linear in
the mixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from admlab.decision import (
    DecisionProblem,
    Mixture,
    Prior,
    bayes_risk,
    format_rational,
    mixture_risk,
)
from admlab.hyperreal import LCNumber, approx_leq, compare
from admlab.simplex import solve_lp

__all__ = [
    "Certificate",
    "DeterminingFamilyReport",
    "HullDominanceReport",
    "NoPositivePrior",
    "NsBlythReport",
    "NsSteinReport",
    "SteinResult",
    "WitnessSet",
    "admissible_set",
    "dominated_in_hull",
    "dominates",
    "determining_family_check",
    "ns_blyth_check",
    "ns_stein_check",
    "positive_prior_certificate",
    "stein_check",
    "witness_set",
]


def _fmt(v):
    if isinstance(v, LCNumber):
        return str(v)
    if isinstance(v, Fraction):
        return format_rational(v)
    return v


def _weights_dict(weights):
    return {label: _fmt(w) for label, w in weights.items()}


# -- plain dominance ---------------------------------------------------------

def dominates(p: DecisionProblem, delta1, delta0) -> bool:
    """True iff delta1's risk is <= everywhere and < somewhere."""
    j1, j0 = p.proc_index(delta1), p.proc_index(delta0)
    strict = False
    for row in p.risk:
        if row[j1] > row[j0]:
            return False
        if row[j1] < row[j0]:
            strict = True
    return strict


def admissible_set(p: DecisionProblem) -> set:
    if p.allow_mixtures:
        return {d for d in p.proc_labels if not dominated_in_hull(p, d).dominated}
    return {d for d in p.proc_labels
            if not any(dominates(p, d1, d) for d1 in p.proc_labels if d1 != d)}


# -- dominance within the convex hull ----------------------------------------

@dataclass(frozen=True)
class HullDominanceReport:
    delta0: str
    dominated: bool
    mixture: Mixture | None          # an optimal dominating mixture if dominated
    improvement: Fraction            # LP optimum: total slack across parameters
    risk_equal: bool                 # a competitor mixture matches the risk vector exactly
    equal_mixture: Mixture | None
    iterations: int

    def as_dict(self):
        return {
            "delta0": self.delta0,
            "dominated": self.dominated,
            "mixture": _weights_dict(self.mixture.weights) if self.mixture else None,
            "improvement": _fmt(self.improvement),
            "risk_equal": self.risk_equal,
            "equal_mixture": _weights_dict(self.equal_mixture.weights) if self.equal_mixture else None,
            "lp_iterations": self.iterations,
        }


def _mixture_from_solution(labels, values) -> Mixture:
    weights = {d: v for d, v in zip(labels, values) if v > 0}
    return Mixture(weights)


def dominated_in_hull(p: DecisionProblem, delta0) -> HullDominanceReport:
    """LP: maximize total slack of a mixture under delta0's risk vector.

    Positive optimum means some mixture dominates delta0.  Zero optimum
    means none does; a risk-equal competitor mixture may still exist and
    is searched for separately (it never counts as domination).
    """
    if not p.allow_mixtures:
        raise ValueError("dominated_in_hull needs mixtures enabled")
    j0 = p.proc_index(delta0)
    nd, nt = len(p.proc_labels), len(p.theta_labels)

    # variables: lambda_d (nd), s_theta (nt)
    c = [Fraction(0)] * nd + [Fraction(1)] * nt
    A_ub, b_ub = [], []
    for i in range(nt):
        row = [p.risk[i][j] for j in range(nd)] + [Fraction(0)] * nt
        row[nd + i] = Fraction(1)
        A_ub.append(row)
        b_ub.append(p.risk[i][j0])
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub,
                   A_eq=[[Fraction(1)] * nd + [Fraction(0)] * nt], b_eq=[Fraction(1)])
    if res.status != "optimal":
        raise RuntimeError(f"dominance LP unexpectedly {res.status}")
    iters = res.iterations
    dominated = res.objective > 0
    mix = _mixture_from_solution(p.proc_labels, res.x[:nd]) if dominated else None
    if dominated:
        # re-verify the certificate without the LP
        risks = {t: mixture_risk(p, t, mix) for t in p.theta_labels}
        assert all(risks[t] <= p.risk[i][j0] for i, t in enumerate(p.theta_labels))
        assert any(risks[t] < p.risk[i][j0] for i, t in enumerate(p.theta_labels))

    competitors = [d for d in p.proc_labels if d != delta0]
    risk_equal, equal_mixture = False, None
    if competitors:
        cols = [p.proc_index(d) for d in competitors]
        A_eq = [[p.risk[i][j] for j in cols] for i in range(nt)]
        b_eq = [p.risk[i][j0] for i in range(nt)]
        A_eq.append([Fraction(1)] * len(cols))
        b_eq.append(Fraction(1))
        eq = solve_lp([Fraction(0)] * len(cols), A_eq=A_eq, b_eq=b_eq)
        iters += eq.iterations
        if eq.status == "optimal":
            risk_equal = True
            equal_mixture = _mixture_from_solution(competitors, eq.x)
            assert all(mixture_risk(p, t, equal_mixture) == p.risk[i][j0]
                       for i, t in enumerate(p.theta_labels))
    return HullDominanceReport(delta0, dominated, mix, res.objective,
                               risk_equal, equal_mixture, iters)


# -- everywhere-positive Bayes certificates -----------------------------------

@dataclass(frozen=True)
class Certificate:
    delta0: str
    prior: Prior
    min_weight: Fraction             # > 0
    slacks: dict                     # delta -> bayes_risk(pi, delta) - bayes_risk(pi, delta0)
    iterations: int

    def verify(self, p: DecisionProblem) -> bool:
        """Recompute everything from scratch, bypassing the LP."""
        if sum(self.prior.weights.values()) != 1:
            return False
        if min(self.prior.weights.values()) != self.min_weight or self.min_weight <= 0:
            return False
        base = bayes_risk(p, self.prior, self.delta0)
        for d in p.proc_labels:
            slack = bayes_risk(p, self.prior, d) - base
            if slack < 0 or slack != self.slacks[d]:
                return False
        return True

    def as_dict(self):
        return {
            "delta0": self.delta0,
            "prior": _weights_dict(self.prior.weights),
            "min_weight": _fmt(self.min_weight),
            "slacks": {d: _fmt(s) for d, s in self.slacks.items()},
            "lp_iterations": self.iterations,
        }


@dataclass(frozen=True)
class NoPositivePrior:
    delta0: str
    any_prior: bool                  # does any prior make delta0 Bayes at all?
    forced_zero: tuple               # thetas that no certifying prior can weight
    witness: Mixture | None          # a dominating mixture, when one exists
    iterations: int

    def as_dict(self):
        return {
            "delta0": self.delta0,
            "verdict": "no_positive_prior",
            "any_prior": self.any_prior,
            "forced_zero": list(self.forced_zero),
            "witness": _weights_dict(self.witness.weights) if self.witness else None,
            "lp_iterations": self.iterations,
        }


def _bayes_rows(p: DecisionProblem, j0: int):
    """Rows of 'delta0 is Bayes': pi . (risk[:,delta0] - risk[:,d]) <= 0 per competitor."""
    rows = []
    for j in range(len(p.proc_labels)):
        if j == j0:
            continue
        rows.append([p.risk[i][j0] - p.risk[i][j] for i in range(len(p.theta_labels))])
    return rows


def positive_prior_certificate(p: DecisionProblem, delta0):
    """Max-min LP: find a prior, everywhere positive, under which delta0 is Bayes.

    Returns a Certificate when the optimum t* > 0, otherwise NoPositivePrior
    with the exact set of parameters that any certifying prior must zero out.
    """
    j0 = p.proc_index(delta0)
    nt = len(p.theta_labels)
    bayes = _bayes_rows(p, j0)

    # variables: pi (nt), then t free
    c = [Fraction(0)] * nt + [Fraction(1)]
    A_ub = [row + [Fraction(0)] for row in bayes]
    b_ub = [Fraction(0)] * len(bayes)
    for i in range(nt):
        row = [Fraction(0)] * (nt + 1)
        row[i], row[nt] = Fraction(-1), Fraction(1)   # t - pi_i <= 0
        A_ub.append(row)
        b_ub.append(Fraction(0))
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub,
                   A_eq=[[Fraction(1)] * nt + [Fraction(0)]], b_eq=[Fraction(1)],
                   free_vars=[nt])
    iters = res.iterations

    if res.status == "optimal" and res.objective > 0:
        weights = {t: res.x[i] for i, t in enumerate(p.theta_labels)}
        prior = Prior(weights)
        base = bayes_risk(p, prior, delta0)
        slacks = {d: bayes_risk(p, prior, d) - base for d in p.proc_labels}
        cert = Certificate(delta0, prior, res.objective, slacks, iters)
        if not cert.verify(p):
            raise RuntimeError("certificate failed independent re-verification")
        return cert

    any_prior = res.status == "optimal"
    forced = []
    if any_prior:
        # which thetas can carry positive weight among Bayes priors for delta0?
        for i, t in enumerate(p.theta_labels):
            obj = [Fraction(0)] * nt
            obj[i] = Fraction(1)
            sub = solve_lp(obj, A_ub=bayes, b_ub=[Fraction(0)] * len(bayes),
                           A_eq=[[Fraction(1)] * nt], b_eq=[Fraction(1)])
            iters += sub.iterations
            if sub.status != "optimal":
                raise RuntimeError(f"forced-zero probe unexpectedly {sub.status}")
            if sub.objective == 0:
                forced.append(t)
    witness = None
    if p.allow_mixtures:
        dom = dominated_in_hull(p, delta0)
        iters += dom.iterations
        witness = dom.mixture
    return NoPositivePrior(delta0, any_prior, tuple(forced), witness, iters)


# -- finite witness sets -------------------------------------------------------

@dataclass(frozen=True)
class WitnessSet:
    delta0: str
    thetas: tuple
    margin: Fraction | None          # None only when there are no competitors
    iterations: int                  # cutting-plane rounds (thetas added)
    validated: bool
    validation_value: Fraction | None

    def as_dict(self):
        return {
            "delta0": self.delta0,
            "thetas": list(self.thetas),
            "margin": _fmt(self.margin) if self.margin is not None else None,
            "iterations": self.iterations,
            "validated": self.validated,
            "validation_value": (_fmt(self.validation_value)
                                 if self.validation_value is not None else None),
        }


def _restricted_value(p, cols, j0, theta_subset):
    """min over competitor mixtures of max over theta_subset of r(theta,mix) - r(theta,delta0)."""
    n = len(cols)
    # variables: lambda (n), v free
    c = [Fraction(0)] * n + [Fraction(1)]
    A_ub, b_ub = [], []
    for t in theta_subset:
        i = t
        row = [p.risk[i][j] for j in cols] + [Fraction(-1)]
        A_ub.append(row)
        b_ub.append(p.risk[i][j0])
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub,
                   A_eq=[[Fraction(1)] * n + [Fraction(0)]], b_eq=[Fraction(1)],
                   free_vars=[n], maximize=False)
    if res.status != "optimal":
        raise RuntimeError(f"witness restriction LP unexpectedly {res.status}")
    return res


def witness_set(p: DecisionProblem, delta0) -> WitnessSet:
    """Cutting-plane search for a finite set of parameters witnessing admissibility.

    Every competitor mixture must lose to delta0 somewhere on the returned
    set, by at least the returned margin.  Requires delta0 admissible in
    the hull and not risk-equal to any competitor mixture.
    """
    if not p.allow_mixtures:
        raise ValueError("witness_set needs mixtures enabled")
    dom = dominated_in_hull(p, delta0)
    if dom.dominated:
        raise ValueError(f"{delta0} is dominated in the hull; no witness set exists")
    if dom.risk_equal:
        raise ValueError(f"{delta0} has an equivalence in risk with a competitor mixture")

    j0 = p.proc_index(delta0)
    competitors = [d for d in p.proc_labels if d != delta0]
    if not competitors:
        # vacuously witnessed: there is nothing to beat
        return WitnessSet(delta0, (), None, 0, True, None)
    cols = [p.proc_index(d) for d in competitors]

    chosen: list[int] = []
    margin = None
    rounds = 0
    while True:
        if chosen:
            res = _restricted_value(p, cols, j0, chosen)
            if res.objective > 0:
                margin = res.objective
                break
            lam = _mixture_from_solution(competitors, res.x[:len(cols)])
        else:
            lam = Mixture({d: Fraction(1, len(competitors)) for d in competitors})
        # separation: a parameter where delta0 strictly beats the current mixture
        best_i, best_gap = None, Fraction(0)
        lam_risk = {t: mixture_risk(p, t, lam) for t in p.theta_labels}
        for i, t in enumerate(p.theta_labels):
            if i in chosen:
                continue
            gap = lam_risk[t] - p.risk[i][j0]
            if gap > best_gap:
                best_i, best_gap = i, gap
        if best_i is None:
            raise RuntimeError("separation failed despite admissibility precheck")
        chosen.append(best_i)
        rounds += 1
        if rounds > len(p.theta_labels):
            raise RuntimeError("cutting-plane loop exceeded |theta| rounds")

    thetas = tuple(p.theta_labels[i] for i in sorted(chosen))

    # independent validation: best-case competitor advantage on the witness set
    n = len(cols)
    c = [Fraction(0)] * n + [Fraction(1)]
    A_ub, b_ub = [], []
    for i in sorted(chosen):
        row = [p.risk[i][j] for j in cols] + [Fraction(1)]  # w + r(theta,lam) <= r(theta,delta0)
        A_ub.append(row)
        b_ub.append(p.risk[i][j0])
    val = solve_lp(c, A_ub=A_ub, b_ub=b_ub,
                   A_eq=[[Fraction(1)] * n + [Fraction(0)]], b_eq=[Fraction(1)],
                   free_vars=[n])
    validated = val.status == "optimal" and val.objective <= -margin < 0
    return WitnessSet(delta0, thetas, margin, rounds, validated, val.objective)


# -- Stein's condition ---------------------------------------------------------

@dataclass(frozen=True)
class SteinResult:
    delta0: str
    theta0: str
    eps: Fraction
    feasible: bool
    prior: Prior | None
    theta0_weight: Fraction | None
    excess: Fraction | None          # recomputed: max over vertices of Bayes-risk gap
    bound: Fraction | None           # eps * pi(theta0)
    iterations: int

    def as_dict(self):
        return {
            "delta0": self.delta0,
            "theta0": self.theta0,
            "eps": _fmt(self.eps),
            "feasible": self.feasible,
            "prior": _weights_dict(self.prior.weights) if self.prior else None,
            "theta0_weight": _fmt(self.theta0_weight) if self.theta0_weight is not None else None,
            "excess": _fmt(self.excess) if self.excess is not None else None,
            "bound": _fmt(self.bound) if self.bound is not None else None,
            "lp_iterations": self.iterations,
        }


def stein_check(p: DecisionProblem, delta0, theta0, eps) -> SteinResult:
    """Find a prior whose excess Bayes risk at delta0 is within eps * pi(theta0).

    Maximizes pi(theta0) subject to the excess constraints; Feasible
    requires a strictly positive optimal weight at theta0.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be a positive rational")
    i0 = p.theta_index(theta0)
    j0 = p.proc_index(delta0)
    nt = len(p.theta_labels)

    A_ub, b_ub = [], []
    for row in _bayes_rows(p, j0):
        r = list(row)
        r[i0] -= eps
        A_ub.append(r)
        b_ub.append(Fraction(0))
    c = [Fraction(0)] * nt
    c[i0] = Fraction(1)
    res = solve_lp(c, A_ub=A_ub, b_ub=b_ub,
                   A_eq=[[Fraction(1)] * nt], b_eq=[Fraction(1)])
    if res.status == "infeasible" or (res.status == "optimal" and res.objective == 0):
        return SteinResult(delta0, theta0, eps, False, None, None, None, None, res.iterations)
    if res.status != "optimal":
        raise RuntimeError(f"stein LP unexpectedly {res.status}")
    prior = Prior({t: res.x[i] for i, t in enumerate(p.theta_labels)})
    base = bayes_risk(p, prior, delta0)
    excess = max(base - bayes_risk(p, prior, d) for d in p.proc_labels)
    bound = eps * res.objective
    assert excess <= bound  # the LP's constraints, recomputed exactly
    return SteinResult(delta0, theta0, eps, True, prior, res.objective,
                       excess, bound, res.iterations)


# -- determining families and the infinitesimal-weight checkers -----------------

@dataclass(frozen=True)
class DeterminingFamilyReport:
    ok: bool
    pairs: tuple                     # (delta0, delta1, best_gap, best_set_index) per improving pair
    failures: tuple                  # improving pairs with no uniformly separating member

    def as_dict(self):
        return {
            "ok": self.ok,
            "pairs": [{"delta0": a, "delta1": b, "gap": _fmt(g), "set_index": k}
                      for (a, b, g, k) in self.pairs],
            "failures": [{"delta0": a, "delta1": b} for (a, b) in self.failures],
        }


def _validate_family(p: DecisionProblem, family):
    sets = []
    for k, B in enumerate(family):
        B = tuple(B)
        if not B:
            raise ValueError(f"family member {k} is empty")
        for t in B:
            p.theta_index(t)
        sets.append(B)
    return sets


def determining_family_check(p: DecisionProblem, family) -> DeterminingFamilyReport:
    """Does every somewhere-improvement show up as a uniform strict gap on some member?"""
    sets = _validate_family(p, family)
    pairs, failures = [], []
    for d0 in p.proc_labels:
        j0 = p.proc_index(d0)
        for d1 in p.proc_labels:
            if d1 == d0:
                continue
            j1 = p.proc_index(d1)
            if not any(row[j1] < row[j0] for row in p.risk):
                continue
            best_gap, best_k = None, None
            for k, B in enumerate(sets):
                gap = min(p.risk[p.theta_index(t)][j0] - p.risk[p.theta_index(t)][j1]
                          for t in B)
                if best_gap is None or gap > best_gap:
                    best_gap, best_k = gap, k
            if best_gap is not None and best_gap > 0:
                pairs.append((d0, d1, best_gap, best_k))
            else:
                failures.append((d0, d1))
    return DeterminingFamilyReport(not failures, tuple(pairs), tuple(failures))


def _as_hyper(prior: Prior) -> Prior:
    if prior.kind == "HYPER":
        return prior
    return Prior({t: LCNumber.from_real(w) for t, w in prior.weights.items()}, "HYPER")


def _lc_excess(p: DecisionProblem, prior: Prior, delta0) -> LCNumber:
    """max over the hull (= vertices, incl. delta0) of Bayes-risk advantage over delta0."""
    base = bayes_risk(p, prior, delta0)
    excess = LCNumber.zero()
    for d in p.proc_labels:
        gap = base - bayes_risk(p, prior, d)
        if compare(gap, excess) > 0:
            excess = gap
    return excess


def _prior_mass(prior: Prior, B) -> LCNumber:
    acc = LCNumber.zero()
    for t in B:
        acc = acc + prior.weight(t)
    return acc


@dataclass(frozen=True)
class NsSteinReport:
    ok: bool
    excess: LCNumber
    bound: LCNumber

    def as_dict(self):
        return {"ok": self.ok, "excess": str(self.excess), "bound": str(self.bound)}


def ns_stein_check(p: DecisionProblem, delta0, prior: Prior, B, eps) -> NsSteinReport:
    """Levi-Civita variant: excess <= prior(B) * eps in the LC order."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be a positive rational")
    B = tuple(B)
    if not B:
        raise ValueError("B must be a nonempty set of parameter labels")
    for t in B:
        p.theta_index(t)
    prior = _as_hyper(prior)
    excess = _lc_excess(p, prior, delta0)
    bound = _prior_mass(prior, B) * eps
    return NsSteinReport(compare(excess, bound) <= 0, excess, bound)


@dataclass(frozen=True)
class NsBlythReport:
    ok: bool
    mass_ok: bool                    # (a): rho <= C * prior(B) for every B, some real C
    ratio_ok: bool                   # (b): excess / rho vanishes up to an infinitesimal
    constants: dict                  # B tuple -> chosen integer C (when (a) holds for it)
    excess: LCNumber
    ratio: LCNumber

    def as_dict(self):
        return {
            "ok": self.ok,
            "mass_ok": self.mass_ok,
            "ratio_ok": self.ratio_ok,
            "constants": {" ".join(B): C for B, C in self.constants.items()},
            "excess": str(self.excess),
            "ratio": str(self.ratio),
        }


def ns_blyth_check(p: DecisionProblem, delta0, prior: Prior, rho, family) -> NsBlythReport:
    """Blyth-style check: prior mass of every family member dominates rho (up to a
    real constant) while the excess-to-rho ratio is at most infinitesimal."""
    if not isinstance(rho, LCNumber):
        rho = LCNumber.from_real(Fraction(rho))
    if rho.sign() <= 0:
        raise ValueError("rho must be strictly positive")
    sets = _validate_family(p, family)
    prior = _as_hyper(prior)

    mass_ok = True
    constants = {}
    for B in sets:
        mass = _prior_mass(prior, B)
        if mass.is_zero() or rho.leading_exponent() < mass.leading_exponent():
            mass_ok = False
            continue
        if rho.leading_exponent() > mass.leading_exponent():
            C = 1
        else:
            ratio = rho.leading_coefficient() / mass.leading_coefficient()
            C = ratio.numerator // ratio.denominator + 1
        if compare(rho, mass * C) <= 0:
            constants[tuple(B)] = C
        else:
            mass_ok = False

    excess = _lc_excess(p, prior, delta0)
    ratio = excess / rho
    ratio_ok = approx_leq(ratio, LCNumber.zero())
    return NsBlythReport(mass_ok and ratio_ok, mass_ok, ratio_ok, constants, excess, ratio)
