import json
import random
from fractions import Fraction as F

import pytest

from admlab import LCNumber
from admlab import admissibility as adm
from admlab.decision import DecisionProblem, Mixture, Prior, mixture_risk, random_problem

EPS = LCNumber.eps()
ONE = LCNumber.from_real(1)

# rows are per-theta tuples over the procedure columns
TWO_POINT = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((0, 1), (1, 0)))
DOMINATED = DecisionProblem(("t1", "t2"), ("d0", "d1", "d2"), ((2, 0, 1), (2, 1, 0)))
RISK_EQUAL = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((1, 1), (0, 0)))


class TestDominates:
    def test_equality_never_dominates(self):
        p = DecisionProblem(("t1", "t2"), ("a", "b"), ((1, 1), (1, 1)))
        assert not adm.dominates(p, "a", "b")

    def test_strict_somewhere(self):
        p = DecisionProblem(("t1", "t2"), ("a", "b"), ((1, 1), (0, 1)))
        assert adm.dominates(p, "a", "b")
        assert not adm.dominates(p, "b", "a")

    def test_incomparable(self):
        assert not adm.dominates(TWO_POINT, "d0", "d1")
        assert not adm.dominates(TWO_POINT, "d1", "d0")

    def test_irreflexive_and_transitive_on_random(self):
        for seed in range(40):
            p = random_problem(4, 5, seed=seed)
            for a in p.proc_labels:
                assert not adm.dominates(p, a, a)
                for b in p.proc_labels:
                    for c in p.proc_labels:
                        if adm.dominates(p, a, b) and adm.dominates(p, b, c):
                            assert adm.dominates(p, a, c)


class TestAdmissibleSet:
    def test_three_procedures(self):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1", "d2"), ((0, 1, 2), (1, 0, 2)))
        assert adm.admissible_set(p) == {"d0", "d1"}

    def test_single_procedure(self):
        p = DecisionProblem(("t1",), ("d0",), ((3,),))
        assert adm.admissible_set(p) == {"d0"}

    def test_mixture_does_not_dominate_midpoint(self):
        # (0.4, 0.4) beats the (1/2,1/2) mixture of (1,0) and (0,1) at both corners
        p = DecisionProblem(("t1", "t2"), ("d0", "d1", "d2"),
                            ((F(2, 5), 1, 0), (F(2, 5), 0, 1)))
        assert adm.admissible_set(p) == {"d0", "d1", "d2"}

    def test_pairwise_scan_when_mixtures_disabled(self):
        # (0.6,0.6) is admissible among vertices but beaten by the hull midpoint
        p_hull = DecisionProblem(("t1", "t2"), ("d0", "d1", "d2"),
                                 ((F(3, 5), 1, 0), (F(3, 5), 0, 1)))
        p_vert = DecisionProblem(p_hull.theta_labels, p_hull.proc_labels,
                                 p_hull.risk, allow_mixtures=False)
        assert adm.admissible_set(p_vert) == {"d0", "d1", "d2"}
        assert adm.admissible_set(p_hull) == {"d1", "d2"}


class TestDominatedInHull:
    def test_dominated_point(self):
        r = adm.dominated_in_hull(DOMINATED, "d0")
        assert r.dominated and r.improvement == 3
        # optimum is not unique; hold the contract, not a particular vertex
        risks = {t: mixture_risk(DOMINATED, t, r.mixture) for t in DOMINATED.theta_labels}
        assert all(risks[t] <= 2 for t in risks) and any(risks[t] < 2 for t in risks)

    def test_not_dominated(self):
        r = adm.dominated_in_hull(TWO_POINT, "d0")
        assert not r.dominated and r.mixture is None and r.improvement == 0
        assert not r.risk_equal

    def test_risk_equal_flag(self):
        r = adm.dominated_in_hull(RISK_EQUAL, "d0")
        assert not r.dominated and r.risk_equal
        assert r.equal_mixture.weights == {"d1": F(1)}

    def test_requires_mixtures(self):
        p = DecisionProblem(("t",), ("d0",), ((1,),), allow_mixtures=False)
        with pytest.raises(ValueError, match="mixtures"):
            adm.dominated_in_hull(p, "d0")


class TestCertificates:
    def test_symmetric_two_point(self):
        c = adm.positive_prior_certificate(TWO_POINT, "d0")
        assert isinstance(c, adm.Certificate)
        assert c.prior.weights == {"t1": F(1, 2), "t2": F(1, 2)}
        assert c.min_weight == F(1, 2)
        assert all(s == 0 for s in c.slacks.values())
        assert c.verify(TWO_POINT)

    def test_asymmetric_ten_to_one(self):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((0, 1), (0, -10)))
        c = adm.positive_prior_certificate(p, "d0")
        assert c.prior.weights == {"t1": F(10, 11), "t2": F(1, 11)}
        assert c.min_weight == F(1, 11)
        assert c.verify(p)

    def test_strictly_dominated_gets_no_prior(self):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((1, 0), (1, 0)))
        r = adm.positive_prior_certificate(p, "d0")
        assert isinstance(r, adm.NoPositivePrior)
        assert not r.any_prior
        assert r.witness is not None and r.witness.weights == {"d1": F(1)}

    def test_forced_zero_set(self):
        # d0 Bayes only under Dirac at t1: ties d1 at t1, strictly worse at t2
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((1, 1), (1, 0)))
        r = adm.positive_prior_certificate(p, "d0")
        assert isinstance(r, adm.NoPositivePrior)
        assert r.any_prior and r.forced_zero == ("t2",)

    def test_min_weight_equals_lp_optimum_meaning(self):
        for seed in range(25):
            p = random_problem(4, 4, seed=seed)
            for d in p.proc_labels:
                c = adm.positive_prior_certificate(p, d)
                if isinstance(c, adm.Certificate):
                    assert min(c.prior.weights.values()) == c.min_weight
                    assert c.verify(p)


class TestWitnessSet:
    def test_single_theta_witness(self):
        p = DecisionProblem(("t1", "t2", "t3"), ("d0", "d1", "d2"),
                            ((F(2, 5), 1, 0), (F(2, 5), 0, 1), (0, 5, 5)))
        w = adm.witness_set(p, "d0")
        assert w.thetas == ("t3",)
        assert w.margin == 5
        assert w.validated and w.validation_value == -5
        assert w.iterations <= len(p.theta_labels)

    def test_whole_theta_when_singleton(self):
        p = DecisionProblem(("t1",), ("d0", "d1"), ((0, 1),))
        w = adm.witness_set(p, "d0")
        assert w.thetas == ("t1",) and w.margin == 1

    def test_refuses_dominated(self):
        with pytest.raises(ValueError, match="dominated"):
            adm.witness_set(DOMINATED, "d0")

    def test_refuses_risk_equal(self):
        with pytest.raises(ValueError, match="equivalence in risk"):
            adm.witness_set(RISK_EQUAL, "d0")

    def test_vacuous_without_competitors(self):
        p = DecisionProblem(("t1",), ("d0",), ((3,),))
        w = adm.witness_set(p, "d0")
        assert w.thetas == () and w.margin is None and w.validated

    def test_random_admissible_instances_validate(self):
        checked = 0
        for seed in range(120):
            p = random_problem(4, 4, seed=seed)
            for d in p.proc_labels:
                r = adm.dominated_in_hull(p, d)
                if r.dominated or r.risk_equal:
                    continue
                w = adm.witness_set(p, d)
                checked += 1
                assert w.validated
                assert w.iterations <= len(p.theta_labels)
                if w.margin is not None:
                    assert w.margin > 0 and w.validation_value == -w.margin
        assert checked > 50


class TestStein:
    def test_two_point_feasible(self):
        s = adm.stein_check(TWO_POINT, "d0", "t1", 1)
        assert s.feasible and s.theta0_weight > 0
        assert s.excess <= s.bound

    def test_single_procedure_always_feasible(self):
        p = DecisionProblem(("t1", "t2"), ("d0",), ((4,), (5,)))
        s = adm.stein_check(p, "d0", "t2", F(1, 100))
        assert s.feasible and s.excess == 0 and s.prior.weight("t2") == 1

    def test_dominated_infeasible_at_small_eps(self):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((1, 0), (1, 0)))
        for t in p.theta_labels:
            s = adm.stein_check(p, "d0", t, F(1, 10))
            assert not s.feasible

    def test_eps_validation(self):
        with pytest.raises(ValueError, match="eps"):
            adm.stein_check(TWO_POINT, "d0", "t1", 0)


class TestDeterminingFamily:
    def test_singletons_always_pass(self):
        for seed in range(20):
            p = random_problem(3, 4, seed=seed)
            fam = [(t,) for t in p.theta_labels]
            assert adm.determining_family_check(p, fam).ok

    def test_whole_theta_fails_on_crossing_risks(self):
        r = adm.determining_family_check(TWO_POINT, [("t1", "t2")])
        assert not r.ok
        assert ("d0", "d1") in r.failures and ("d1", "d0") in r.failures

    def test_empty_family_with_improving_pair(self):
        p = DecisionProblem(("t1",), ("d0", "d1"), ((0, 1),))
        assert not adm.determining_family_check(p, []).ok

    def test_empty_family_without_improving_pair(self):
        p = DecisionProblem(("t1",), ("d0", "d1"), ((1, 1),))
        assert adm.determining_family_check(p, []).ok

    def test_rejects_empty_member(self):
        with pytest.raises(ValueError, match="empty"):
            adm.determining_family_check(TWO_POINT, [()])

    def test_reports_gaps(self):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((1, 0), (1, F(1, 2))))
        r = adm.determining_family_check(p, [("t1",), ("t2",), ("t1", "t2")])
        assert r.ok
        (pair,) = r.pairs
        assert pair[:3] == ("d0", "d1", F(1))  # best gap is at the singleton {t1}


class TestNsStein:
    def test_balanced_improvement_has_zero_excess(self):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((0, 1), (0, -1)))
        pi = Prior({"t1": ONE - EPS, "t2": EPS}, "HYPER")
        r = adm.ns_stein_check(p, "d0", pi, ("t1",), F(1, 2))
        assert r.ok and r.excess == LCNumber.zero()

    def test_macroscopic_excess_fails_infinitesimal_bound(self):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((1, 0), (1, 0)))
        pi = Prior({"t1": ONE - EPS, "t2": EPS}, "HYPER")
        r = adm.ns_stein_check(p, "d0", pi, ("t2",), F(1, 10))
        assert not r.ok and r.excess == ONE and r.bound == EPS * F(1, 10)

    def test_real_dirac_prior_where_bayes(self):
        r = adm.ns_stein_check(TWO_POINT, "d0", Prior.dirac("t1"), ("t1",), F(1, 100))
        assert r.ok and r.excess == LCNumber.zero()

    def test_validates_inputs(self):
        pi = Prior({"t1": F(1, 2), "t2": F(1, 2)})
        with pytest.raises(ValueError, match="eps"):
            adm.ns_stein_check(TWO_POINT, "d0", pi, ("t1",), F(-1))
        with pytest.raises(ValueError, match="nonempty"):
            adm.ns_stein_check(TWO_POINT, "d0", pi, (), F(1))


# risk columns d0=(0,0,1), d1=(0,0,0): the excess under a hyper prior equals
# the prior weight at t3
LADDER = DecisionProblem(("t1", "t2", "t3"), ("d0", "d1"), ((0, 0), (0, 0), (1, 0)))


class TestNsBlyth:
    def test_zero_excess_with_certificate_prior(self):
        pi = Prior({"t1": F(1, 2), "t2": F(1, 2)})
        r = adm.ns_blyth_check(TWO_POINT, "d0", pi, F(1, 2), [("t1",), ("t2",)])
        assert r.ok and r.excess == LCNumber.zero()

    def test_square_excess_over_linear_rho(self):
        pi = Prior({"t1": ONE - EPS - EPS * EPS, "t2": EPS, "t3": EPS * EPS}, "HYPER")
        r = adm.ns_blyth_check(LADDER, "d0", pi, EPS, [("t2",)])
        assert r.ok
        assert r.excess == EPS * EPS and r.ratio == EPS
        assert r.constants == {("t2",): 2}

    def test_linear_excess_over_square_rho_fails(self):
        pi = Prior({"t1": ONE - EPS - EPS * EPS, "t2": EPS * EPS, "t3": EPS}, "HYPER")
        r = adm.ns_blyth_check(LADDER, "d0", pi, EPS * EPS, [("t2",)])
        assert not r.ok and r.mass_ok and not r.ratio_ok
        assert r.ratio == ONE / EPS

    def test_mass_condition_fails_when_rho_too_large(self):
        pi = Prior({"t1": ONE - EPS - EPS * EPS, "t2": EPS, "t3": EPS * EPS}, "HYPER")
        r = adm.ns_blyth_check(LADDER, "d0", pi, ONE, [("t2",)])
        assert not r.ok and not r.mass_ok

    def test_family_monotone_under_supersets(self):
        # enlarging each member can only increase its prior mass
        for seed in range(15):
            p = random_problem(4, 4, seed=seed)
            for d in p.proc_labels:
                c = adm.positive_prior_certificate(p, d)
                if not isinstance(c, adm.Certificate):
                    continue
                singles = [(t,) for t in p.theta_labels]
                supers = [tuple(p.theta_labels[:i + 1]) for i in range(len(p.theta_labels))]
                if adm.ns_blyth_check(p, d, c.prior, c.min_weight, singles).ok:
                    assert adm.ns_blyth_check(p, d, c.prior, c.min_weight, supers).ok

    def test_rho_must_be_positive(self):
        pi = Prior({"t1": F(1, 2), "t2": F(1, 2)})
        with pytest.raises(ValueError, match="positive"):
            adm.ns_blyth_check(TWO_POINT, "d0", pi, 0, [("t1",)])


class TestSoundnessTriangle:
    def test_equivalence_on_random_sample(self):
        eps_grid = [F(1), F(1, 10), F(1, 100)]
        for seed in range(30):
            rng = random.Random(seed)
            p = random_problem(rng.randint(1, 5), rng.randint(1, 5), seed=seed)
            for d in p.proc_labels:
                admissible = not adm.dominated_in_hull(p, d).dominated
                cert = adm.positive_prior_certificate(p, d)
                cert_ok = isinstance(cert, adm.Certificate)
                stein_all = all(adm.stein_check(p, d, t, e).feasible
                                for t in p.theta_labels for e in eps_grid)
                blyth = (adm.ns_blyth_check(p, d, cert.prior, cert.min_weight,
                                            [(t,) for t in p.theta_labels]).ok
                         if cert_ok else False)
                assert admissible == cert_ok == stein_all == blyth, (seed, d)


class TestReports:
    def test_reports_are_json_serializable(self):
        blobs = [
            adm.dominated_in_hull(DOMINATED, "d0").as_dict(),
            adm.positive_prior_certificate(TWO_POINT, "d0").as_dict(),
            adm.positive_prior_certificate(RISK_EQUAL, "d1").as_dict(),
            adm.witness_set(TWO_POINT, "d0").as_dict(),
            adm.stein_check(TWO_POINT, "d0", "t1", 1).as_dict(),
            adm.determining_family_check(TWO_POINT, [("t1",), ("t2",)]).as_dict(),
            adm.ns_stein_check(TWO_POINT, "d0", Prior.dirac("t1"), ("t1",), 1).as_dict(),
            adm.ns_blyth_check(TWO_POINT, "d0",
                               Prior({"t1": F(1, 2), "t2": F(1, 2)}),
                               F(1, 2), [("t1",)]).as_dict(),
        ]
        for blob in blobs:
            json.dumps(blob)

    def test_iteration_counts_reported(self):
        r = adm.dominated_in_hull(DOMINATED, "d0")
        assert r.as_dict()["lp_iterations"] > 0
