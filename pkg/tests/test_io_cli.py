import json

import numpy as np
import pytest

from gsemo import cli, harness, instances, io
from gsemo.errors import InstanceParseError


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestReaders:
    def test_graph_roundtrip(self, tmp_path):
        g = instances.random_graph(9, 5, unit=False)
        path = tmp_path / "g.txt"
        io.write_graph(g, path)
        assert io.read_graph(path).edges == g.edges

    @pytest.mark.parametrize("text,line", [
        ("3 2\n0 1 1\n1 1 1\n", 3),
        ("3 2\n0 1 1\n1 0 2\n", 3),
        ("3 1\n0 5 1\n", 2),
        ("3 1\n0 1 -2\n", 2),
        ("3 2\n0 1 1\n", 3),
        ("3\n", 1),
        ("3 1\n0 1 1\n1 2 1\n", 3),
    ])
    def test_graph_errors_name_line(self, tmp_path, text, line):
        with pytest.raises(InstanceParseError) as info:
            io.read_graph(write(tmp_path, "g.txt", text))
        assert info.value.line == line and f"line {line}" in str(info.value)

    def test_comments_keep_line_numbers(self, tmp_path):
        with pytest.raises(InstanceParseError) as info:
            io.read_graph(write(tmp_path, "g.txt", "# c\n3 1\n\n0 q 1\n"))
        assert info.value.line == 4

    def test_coverage_roundtrip(self, tmp_path):
        inst = instances.random_coverage(6, seed=1)
        path = tmp_path / "c.txt"
        io.write_coverage(inst, path)
        back = io.read_coverage(path)
        assert back.covered_by == inst.covered_by and back.weights == inst.weights

    def test_coverage_errors(self, tmp_path):
        with pytest.raises(InstanceParseError, match="line 2"):
            io.read_coverage(write(tmp_path, "c", "2 3\n2 0\n1 1\n1 1 1\n"))
        with pytest.raises(InstanceParseError, match="line 4"):
            io.read_coverage(write(tmp_path, "c", "2 3\n1 0\n1 1\n1 1\n"))

    def test_facility_roundtrip(self, tmp_path):
        inst = instances.random_facility(5, 4, seed=3, with_costs=True)
        path = tmp_path / "f.txt"
        io.write_facility(inst, path)
        back = io.read_facility(path)
        assert np.array_equal(back.benefit, inst.benefit) and np.array_equal(back.costs, inst.costs)

    def test_facility_errors(self, tmp_path):
        with pytest.raises(InstanceParseError, match="line 3"):
            io.read_facility(write(tmp_path, "f", "2 2\n1 2\n-1 0\n0 0\n"))

    @pytest.mark.parametrize("header", [False, True])
    def test_regression_roundtrip(self, tmp_path, header):
        rng = np.random.default_rng(0)
        X, y = rng.normal(size=(9, 3)), rng.normal(size=9)
        path = tmp_path / "r.csv"
        io.write_regression(X, y, path, header=header)
        inst = io.read_regression(path, header=header)
        assert np.allclose(inst.design, X - X.mean(axis=0)) and np.allclose(inst.target, y - y.mean())
        assert abs(inst.design.mean(axis=0)).max() < 1e-12

    def test_regression_errors(self, tmp_path):
        with pytest.raises(InstanceParseError, match="line 3"):
            io.read_regression(write(tmp_path, "r.csv", "1,2,3\n4,5,6\n7,8\n"))
        with pytest.raises(InstanceParseError, match="line 1"):
            io.read_regression(write(tmp_path, "r.csv", "x,y\n1,2\n"))
        with pytest.raises(InstanceParseError, match="degenerate"):
            io.read_regression(write(tmp_path, "r.csv", "1,2\n3,2\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceParseError):
            io.read_graph(tmp_path / "nope")


class TestSeeds:
    def test_forms(self):
        assert harness.parse_seeds("1..5") == [1, 2, 3, 4, 5]
        assert harness.parse_seeds("3,5,8") == [3, 5, 8]
        assert harness.parse_seeds("1..2,9") == [1, 2, 9]

    @pytest.mark.parametrize("bad", ["", "5..1", "1,1", "-1", str(2 ** 64), "a"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            harness.parse_seeds(bad)


TRIANGLE = "3 3\n0 1 1\n1 2 1\n0 2 1\n"


class TestCli:
    def test_run_triangle(self, tmp_path, capsys):
        g = write(tmp_path, "tri.graph", TRIANGLE)
        out = tmp_path / "r.json"
        rc = cli.main(["run", "--problem", "maxcut", "--input", g, "--algo", "gsemo",
                       "--budget", "1000", "--seeds", "1..20", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert len(doc["runs"]) == 20
        assert all(r["bestValue"] == 2.0 for r in doc["runs"])
        assert all(r["oracleCalls"] == 2001 for r in doc["runs"])
        assert "2.0" in capsys.readouterr().out

    def test_greedy_deterministic(self, tmp_path, capsys):
        c = write(tmp_path, "cov.txt", "3 3\n1 0\n1 1\n1 2\n5 3 1\n")
        out = tmp_path / "g.json"
        rc = cli.main(["run", "--algo", "greedy", "--problem", "coverage", "--input", c,
                       "--k", "2", "--seeds", "1..4", "--out", str(out)])
        assert rc == 0
        doc = json.loads(out.read_text())
        assert len(doc["runs"]) == 1 and doc["runs"][0]["bestValue"] == 8.0
        assert "seeds ignored" in capsys.readouterr().out

    def test_malformed_graph_exit_2(self, tmp_path, capsys):
        g = write(tmp_path, "bad.graph", "3 2\n0 1 1\n1 x 1\n")
        assert cli.main(["run", "--problem", "maxcut", "--input", g]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_guard_exit_3(self, tmp_path, capsys):
        edges = "\n".join(f"{i} {i + 1} 1" for i in range(25))
        g = write(tmp_path, "big.graph", f"26 25\n{edges}\n")
        assert cli.main(["opt", "--problem", "maxcut", "--input", g]) == 3
        assert "24" in capsys.readouterr().err

    def test_bad_parameters_exit_3(self):
        assert cli.main(["run", "--problem", "maxcut", "--builtin", "triangle", "--k", "9"]) == 3
        assert cli.main(["run", "--problem", "maxcut", "--builtin", "triangle", "--seeds", "2..1"]) == 3

    def test_invariant_exit_4(self, monkeypatch):
        from gsemo.errors import InvariantError

        def boom(*a, **k):
            raise InvariantError("broken")

        monkeypatch.setattr(harness, "run_experiment", boom)
        assert cli.main(["run", "--problem", "maxcut", "--builtin", "triangle"]) == 4

    def test_trace_csv(self, tmp_path):
        tpl = str(tmp_path / "t-{seed}.csv")
        assert cli.main(["run", "--problem", "coverage", "--builtin", "coverage", "--k", "3",
                         "--budget", "300", "--seeds", "1,2", "--trace", tpl,
                         "--trace-every", "100"]) == 0
        lines = (tmp_path / "t-2.csv").read_text().splitlines()
        assert lines[0] == "iteration,bestFeasibleValue,archiveOccupancy"
        assert [l.split(",")[0] for l in lines[1:]] == ["0", "100", "200", "300"]

    def test_diagnose_coverage(self, tmp_path):
        out = tmp_path / "d.json"
        assert cli.main(["diagnose", "--problem", "coverage", "--builtin", "coverage-disjoint",
                         "--k", "3", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["gamma_min"] == 1.0
        assert doc["bounds"]["submodularity_ratio"]["ratio"] == pytest.approx(0.6321, abs=1e-4)

    def test_diagnose_cut_suppresses(self, capsys):
        assert cli.main(["diagnose", "--problem", "maxcut", "--builtin", "triangle", "--k", "2"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["flags"]["monotone"] == "fail" and "suppressed" in doc["bounds"]["constrained"]

    def test_opt(self, capsys):
        assert cli.main(["opt", "--problem", "maxcut", "--builtin", "triangle"]) == 0
        assert "OPT = 2.0" in capsys.readouterr().out

    def test_verify_suite(self, capsys):
        assert cli.main(["verify", "--suite", "bounds"]) == 0
        assert "[PASS] criterion 8" in capsys.readouterr().out

    def test_help(self):
        for cmd in ("run", "verify", "diagnose", "opt"):
            with pytest.raises(SystemExit) as info:
                cli.main([cmd, "--help"])
            assert info.value.code == 0


class TestHarness:
    def spec(self, **kw):
        base = dict(problem="perturbed", algorithm="gsemo", builtin="coverage", k=4,
                    budget=400, seeds=(1, 2, 3, 4), epsilon=0.05, perturb="additive",
                    perturb_seed=7)
        base.update(kw)
        return harness.ExperimentSpec(**base)

    def test_roundtrip(self, tmp_path):
        rec = harness.run_experiment(self.spec(with_opt=True))
        path = tmp_path / "r.json"
        rec.save(path)
        assert harness.ResultRecord.load(path) == rec
        assert 0 <= rec.ratioToOpt <= 1 + 1e-9

    def test_parallel_matches_sequential(self):
        seq = harness.run_experiment(self.spec())
        par = harness.run_experiment(self.spec(), jobs=2)
        assert [r.comparable() for r in seq.runs] == [r.comparable() for r in par.runs]
        assert seq.aggregate == par.aggregate

    def test_aggregate(self):
        rec = harness.run_experiment(self.spec(algorithm="oneplusone"))
        vals = [r.bestValue for r in rec.runs]
        assert rec.aggregate["min"] == min(vals) and rec.aggregate["max"] == max(vals)

    @pytest.mark.parametrize("kw", [dict(seeds=()), dict(seeds=(1, 1)), dict(budget=0),
                                    dict(algorithm="nope"), dict(perturb=None),
                                    dict(builtin=None), dict(algorithm="greedy", k=None)])
    def test_spec_validation(self, kw):
        with pytest.raises(ValueError):
            self.spec(**kw)

    def test_local_search_and_double_greedy(self):
        for algo in ("localsearch", "doublegreedy"):
            rec = harness.run_experiment(harness.ExperimentSpec(
                problem="maxcut", algorithm=algo, builtin="triangle", with_opt=True))
            assert rec.runs[0].bestValue == 2.0 and rec.ratioToOpt == 1.0
