"""End-to-end command-line behavior: payloads, exit codes, round trips."""

import json

import pytest

from admlab import cli
from admlab.decision import DecisionProblem, load_problem, save_problem


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out), err


@pytest.fixture
def two_point(tmp_path):
    p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((0, 1), (1, 0)))
    path = tmp_path / "two_point.json"
    path.write_bytes(save_problem(p))
    return str(path)


@pytest.fixture
def with_dominated(tmp_path):
    # dbad has risk (2,2); the d0/d1 mixtures cut strictly below it
    p = DecisionProblem(("t1", "t2"), ("d0", "d1", "dbad"),
                        ((0, 1, 2), (1, 0, 2)))
    path = tmp_path / "dominated.json"
    path.write_bytes(save_problem(p))
    return str(path)


class TestCheck:
    def test_listing(self, capsys, two_point):
        code, payload, _ = run_json(capsys, "check", two_point)
        assert code == 0
        assert payload["admissible_set"] == ["d0", "d1"]
        assert payload["reports"]["d0"]["dominated"] is False

    def test_dominated_delta_exits_one(self, capsys, with_dominated):
        code, payload, _ = run_json(capsys, "check", with_dominated,
                                    "--delta", "dbad")
        assert code == 1
        assert payload["dominated"] is True
        assert payload["mixture"] is not None

    def test_admissible_delta_exits_zero(self, capsys, with_dominated):
        code, payload, _ = run_json(capsys, "check", with_dominated,
                                    "--delta", "d0")
        assert code == 0
        assert payload["dominated"] is False

    def test_vertex_only_check(self, capsys, tmp_path):
        p = DecisionProblem(("t1", "t2"), ("d0", "d1"), ((0, 1), (1, 0)),
                            allow_mixtures=False)
        path = tmp_path / "vertex.json"
        path.write_bytes(save_problem(p))
        code, payload, _ = run_json(capsys, "check", str(path),
                                    "--delta", "d0")
        assert code == 0
        assert payload["dominated"] is False
        code, payload, _ = run_json(capsys, "check", str(path))
        assert code == 0
        assert payload["admissible_set"] == ["d0", "d1"]
        assert "reports" not in payload


class TestCertify:
    def test_two_point_gives_the_symmetric_prior(self, capsys, two_point):
        code, payload, _ = run_json(capsys, "certify", two_point,
                                    "--delta", "d0")
        assert code == 0
        assert payload["verdict"] == "certificate"
        assert payload["prior"] == {"t1": "1/2", "t2": "1/2"}
        assert payload["min_weight"] == "1/2"

    def test_dominated_gets_no_certificate(self, capsys, with_dominated):
        code, payload, _ = run_json(capsys, "certify", with_dominated,
                                    "--delta", "dbad")
        assert code == 1
        assert payload["verdict"] == "no_positive_prior"
        assert payload["witness"] is not None


class TestWitness:
    def test_admissible_vertex(self, capsys, two_point):
        code, payload, _ = run_json(capsys, "witness", two_point,
                                    "--delta", "d0")
        assert code == 0
        assert payload["validated"] is True
        assert payload["margin"] is not None

    def test_dominated_vertex_is_a_negative_verdict(self, capsys,
                                                    with_dominated):
        code, payload, _ = run_json(capsys, "witness", with_dominated,
                                    "--delta", "dbad")
        assert code == 1
        assert payload["witness"] is None
        assert "dominated" in payload["reason"]


class TestStein:
    def test_feasible(self, capsys, two_point):
        code, payload, _ = run_json(capsys, "stein", two_point,
                                    "--delta", "d0", "--theta", "t1",
                                    "--eps", "1/10")
        assert code == 0
        assert payload["feasible"] is True

    def test_infeasible(self, capsys, with_dominated):
        code, payload, _ = run_json(capsys, "stein", with_dominated,
                                    "--delta", "dbad", "--theta", "t1",
                                    "--eps", "1/10")
        assert code == 1
        assert payload["feasible"] is False

    def test_bad_eps_is_an_input_error(self, capsys, two_point):
        code, _, err = run(capsys, "stein", two_point, "--delta", "d0",
                           "--theta", "t1", "--eps", "0")
        assert code == 2
        assert "eps" in err


class TestNs:
    def test_stein_mode_passes_with_the_certificate_prior(self, capsys,
                                                          two_point):
        code, payload, _ = run_json(capsys, "ns", two_point, "--delta", "d0",
                                    "--prior", "t1:1/2,t2:1/2",
                                    "--family", "t1,t2",
                                    "--mode", "stein", "--eps", "1")
        assert code == 0
        assert payload["ok"] is True

    def test_blyth_mode_passes(self, capsys, two_point):
        code, payload, _ = run_json(capsys, "ns", two_point, "--delta", "d0",
                                    "--prior", "t1:1/2,t2:1/2",
                                    "--family", "t1;t2",
                                    "--mode", "blyth", "--rho", "1/2")
        assert code == 0
        assert payload["ok"] is True
        assert payload["mass_ok"] is True and payload["ratio_ok"] is True

    def test_infinitesimal_prior_terms_parse(self, capsys, two_point):
        code, payload, _ = run_json(capsys, "ns", two_point, "--delta", "d0",
                                    "--prior", "t1:1-eps,t2:eps",
                                    "--family", "t1;t2",
                                    "--mode", "blyth", "--rho", "eps")
        assert code == 0
        assert payload["ok"] is True

    def test_failing_verdict(self, capsys, with_dominated):
        code, payload, _ = run_json(capsys, "ns", with_dominated,
                                    "--delta", "dbad",
                                    "--prior", "t1:1-eps,t2:eps",
                                    "--family", "t1;t2",
                                    "--mode", "blyth", "--rho", "eps")
        assert code == 1
        assert payload["ok"] is False

    def test_mode_flag_requirements(self, capsys, two_point):
        code, _, err = run(capsys, "ns", two_point, "--delta", "d0",
                           "--prior", "t1:1/2,t2:1/2", "--family", "t1,t2",
                           "--mode", "stein")
        assert code == 2 and "--eps" in err
        code, _, err = run(capsys, "ns", two_point, "--delta", "d0",
                           "--prior", "t1:1/2,t2:1/2", "--family", "t1;t2",
                           "--mode", "blyth")
        assert code == 2 and "--rho" in err
        code, _, err = run(capsys, "ns", two_point, "--delta", "d0",
                           "--prior", "t1:1/2,t2:1/2", "--family", "t1;t2",
                           "--mode", "stein", "--eps", "1")
        assert code == 2 and "one family group" in err

    def test_prior_spec_errors(self, capsys, two_point):
        code, _, err = run(capsys, "ns", two_point, "--delta", "d0",
                           "--prior", "garbage", "--family", "t1",
                           "--mode", "stein", "--eps", "1")
        assert code == 2
        assert "prior entry" in err


class TestGame:
    def test_value_is_determined(self, capsys, two_point):
        code, payload, _ = run_json(capsys, "game", two_point,
                                    "--delta", "d0", "--theta0", "t1",
                                    "--gamma", "1/2")
        assert code == 0
        assert payload["determined"] is True
        assert payload["lower"] == payload["upper"]


class TestGen:
    def test_emits_loadable_problem(self, capsys):
        code, out, err = run(capsys, "gen", "--theta", "3", "--procs", "4",
                             "--seed", "7")
        assert code == 0
        p = load_problem(out)
        assert len(p.theta_labels) == 3 and len(p.proc_labels) == 4
        assert "seed 7" in err

    def test_writes_file(self, capsys, tmp_path):
        target = tmp_path / "out.json"
        code, out, _ = run(capsys, "gen", "--theta", "2", "--procs", "2",
                           "--seed", "1", "-o", str(target))
        assert code == 0
        assert out == ""
        load_problem(target.read_bytes())

    def test_round_trip_through_check(self, capsys, tmp_path):
        # gen output must feed back into check cleanly for 100 seeds
        for seed in range(100):
            target = tmp_path / f"rt{seed}.json"
            code, _, _ = run(capsys, "gen", "--theta", str(2 + seed % 3),
                             "--procs", str(2 + seed % 4), "--seed", str(seed),
                             "-o", str(target))
            assert code == 0
            code, out, _ = run(capsys, "check", str(target))
            assert code == 0
            assert json.loads(out)["admissible_set"]


class TestGd:
    def test_risk_payload(self, capsys):
        code, payload, _ = run_json(capsys, "gd", "risk",
                                    "--sigma1-sq", "1", "--sigma2-sq", "2",
                                    "--samples", "4096", "--seed", "3")
        assert code == 0
        assert payload["seed"] == 3
        assert payload["phi"] == "gd"
        assert payload["direct"]["n_samples"] == 4096

    def test_constant_phi(self, capsys):
        code, payload, _ = run_json(capsys, "gd", "risk",
                                    "--sigma1-sq", "1", "--sigma2-sq", "2",
                                    "--phi", "0.25", "--samples", "4096")
        assert code == 0
        assert payload["phi"] == "0.25"

    def test_diff_of_identical_weights_is_zero(self, capsys):
        code, payload, _ = run_json(capsys, "gd", "diff",
                                    "--sigma1-sq", "1", "--sigma2-sq", "2",
                                    "--phi0", "gd", "--phi1", "gd",
                                    "--samples", "4096")
        assert code == 0
        assert payload["mean"] == 0.0

    def test_excess(self, capsys):
        code, payload, _ = run_json(capsys, "gd", "excess",
                                    "--alpha", "0.25", "--beta", "1e-3",
                                    "--samples", "8192", "--seed", "5")
        assert code == 0
        assert payload["ok"] is True
        assert payload["seed"] == 5

    def test_excess_bad_regime_is_an_input_error(self, capsys):
        code, _, err = run(capsys, "gd", "excess", "--alpha", "0.25",
                           "--beta", "1e-3", "--n", "2", "--samples", "4096")
        assert code == 2
        assert "2*alpha" in err

    def test_mass(self, capsys):
        code, payload, _ = run_json(capsys, "gd", "mass",
                                    "--alpha", "0.25", "--beta", "1e-3",
                                    "--samples", "8192")
        assert code == 0
        assert payload["quad_mass"] > payload["lower_bound"]
        assert "mc_mass" in payload

    def test_mass_without_sampling(self, capsys):
        code, payload, _ = run_json(capsys, "gd", "mass",
                                    "--alpha", "0.25", "--beta", "1e-3",
                                    "--samples", "0")
        assert code == 0
        assert "mc_mass" not in payload

    def test_mass_precondition_is_an_input_error(self, capsys):
        code, _, err = run(capsys, "gd", "mass", "--alpha", "0.4",
                           "--beta", "0.8", "--samples", "0")
        assert code == 2
        assert "ln(2)" in err

    def test_blyth_csv(self, capsys):
        code, out, _ = run(capsys, "gd", "blyth", "--alpha", "0.25",
                           "--samples", "8192", "--seed", "2")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "beta,excess_mean,excess_se,mass_bound,ratio"
        assert len(lines) == 5
        ratios = [float(line.split(",")[4]) for line in lines[1:]]
        assert ratios == sorted(ratios, reverse=True)

    def test_blyth_json_and_slow_flag(self, capsys):
        code, out, err = run(capsys, "gd", "blyth", "--alpha", "0.49",
                             "--betas", "1e-2,1e-3", "--samples", "4096",
                             "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["slow_convergence"] is True
        assert "slow convergence" in err

    def test_bad_rect_is_an_input_error(self, capsys):
        code, _, _ = run(capsys, "gd", "mass", "--alpha", "0.25",
                         "--beta", "1e-3", "--rect", "1,2,3", "--samples", "0")
        assert code == 2

    def test_increasing_betas_are_an_input_error(self, capsys):
        code, _, _ = run(capsys, "gd", "blyth", "--alpha", "0.25",
                         "--betas", "1e-3,1e-2", "--samples", "4096")
        assert code == 2


class TestExitCodes:
    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check", "/nonexistent/problem.json")
        assert code == 2
        assert err

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"theta": ["t1"]}')
        code, _, err = run(capsys, "check", str(path))
        assert code == 2
        assert "procedures" in err

    def test_unknown_label(self, capsys, two_point):
        code, _, err = run(capsys, "certify", two_point, "--delta", "zzz")
        assert code == 2
        assert "unknown procedure" in err

    def test_argparse_rejects_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["frobnicate"])
        assert exc.value.code == 2

    def test_internal_errors_map_to_three(self, capsys, two_point,
                                          monkeypatch):
        def boom(p, delta0):
            raise RuntimeError("wires crossed")
        monkeypatch.setattr(cli, "dominated_in_hull", boom)
        code, _, err = run(capsys, "check", two_point, "--delta", "d0")
        assert code == 3
        assert "wires crossed" in err

    def test_every_observed_code_is_canonical(self, capsys, two_point,
                                              with_dominated):
        codes = set()
        codes.add(run(capsys, "check", two_point)[0])
        codes.add(run(capsys, "check", with_dominated, "--delta", "dbad")[0])
        codes.add(run(capsys, "check", "/does/not/exist")[0])
        assert codes == {0, 1, 2}

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--version"])
        assert exc.value.code == 0
        assert capsys.readouterr().out.strip()

    def test_payload_never_mixes_with_diagnostics(self, capsys, two_point):
        code, out, err = run(capsys, "certify", two_point, "--delta", "d0")
        json.loads(out)          # stdout is pure JSON
        assert "error" not in out
