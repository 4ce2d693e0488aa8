import json

import pytest

from unimaps.cli import CHECKS, main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCensus:
    def test_general_two_edges_total(self, capsys):
        code, out, _ = run(capsys, "census", "unicellular-general", "--n", "2")
        assert code == 0
        payload = json.loads(out)
        assert payload["total"] == "12"
        assert [[2, 1], "5"] in payload["entries"]

    def test_orientable_three_edges_total(self, capsys):
        code, out, _ = run(capsys, "census", "unicellular-orientable",
                           "--n", "3")
        assert code == 0
        assert json.loads(out)["total"] == "15"

    def test_planar_includes_two_two(self, capsys):
        code, out, _ = run(capsys, "census", "planar-pqr", "--max-edges", "2")
        assert code == 0
        assert [[2, 2], "5"] in json.loads(out)["entries"]

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "census", "planar-pqr", "--max-edges", "1",
                           "--format", "csv")
        assert code == 0
        assert out.splitlines() == [
            "key0,key1,count", "1,1,1", "1,2,1", "2,1,1"]

    def test_tree_rooted(self, capsys):
        code, out, _ = run(capsys, "census", "tree-rooted", "--n", "2")
        assert code == 0
        payload = json.loads(out)
        # 2^(q-1) binom(2, q-1) (2n-1)!! tree-rooted maps on q vertices
        assert payload["entries"] == [[[2, 1], "3"], [[2, 2], "12"],
                                      [[2, 3], "12"]]

    def test_threads_do_not_change_output(self, capsys):
        _, sequential, _ = run(capsys, "census", "unicellular-general",
                               "--n", "3")
        _, parallel, _ = run(capsys, "census", "unicellular-general",
                             "--n", "3", "--threads", "2")
        assert sequential == parallel

    def test_missing_bound_is_usage_error(self, capsys):
        code, _, err = run(capsys, "census", "unicellular-general")
        assert code == 2
        assert "requires" in err

    def test_cache_round_trip(self, capsys, tmp_path):
        args = ("--cache", str(tmp_path), "census", "planar-pqr",
                "--max-edges", "2")
        _, first, _ = run(capsys, *args)
        files = list(tmp_path.iterdir())
        assert files
        _, second, _ = run(capsys, *args)
        assert first == second

    def test_corrupted_cache_is_rebuilt(self, capsys, tmp_path):
        args = ("--cache", str(tmp_path), "census", "unicellular-general",
                "--n", "2")
        _, first, _ = run(capsys, *args)
        for path in tmp_path.iterdir():
            path.write_text("{broken")
        _, second, _ = run(capsys, *args)
        assert first == second


class TestVerify:
    def test_pass_exits_zero(self, capsys):
        code, out, err = run(capsys, "verify", "ledoux", "--bound", "4")
        assert code == 0
        payload = json.loads(out)
        assert payload["verdict"] == "pass"
        assert payload["bounds"] == {"max_n": 4}
        assert "counterexample" not in payload
        assert "pass" in err  # timing goes to stderr only

    def test_gamma_roundtrip(self, capsys):
        code, out, _ = run(capsys, "verify", "gamma-roundtrip",
                           "--bound", "3")
        assert code == 0
        assert json.loads(out)["verdict"] == "pass"

    def test_algebraic_p(self, capsys):
        code, out, _ = run(capsys, "verify", "algebraic-P", "--bound", "7")
        assert code == 0
        assert json.loads(out)["verdict"] == "pass"

    def test_failure_exits_one(self, capsys, monkeypatch):
        monkeypatch.setitem(CHECKS, "ledoux",
                            ("max_n", 4, lambda bound, cache: {"n": 3}))
        code, out, _ = run(capsys, "verify", "ledoux")
        assert code == 1
        payload = json.loads(out)
        assert payload["verdict"] == "fail"
        assert payload["counterexample"] == {"n": 3}

    def test_unknown_check_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["verify", "no-such-check"])
        assert info.value.code == 2

    def test_every_registered_check_has_defaults(self):
        for name, (bound_name, default, func) in CHECKS.items():
            assert default >= 1 and callable(func)
            assert bound_name.startswith("max_")


class TestFiber:
    def test_orientable_loop_fiber(self, capsys):
        code, out, _ = run(capsys, "fiber", "n=1; pairs=(0 1)")
        assert code == 0
        payload = json.loads(out)
        assert payload["size"] == 1 and payload["w"] == 0

    def test_twisted_loop_fiber(self, capsys):
        code, out, _ = run(capsys, "fiber", "n=1; pairs=(0 1!)")
        assert code == 0
        payload = json.loads(out)
        assert payload["size"] == 2 and payload["w"] == 1
        assert all(el["degree_certificate_ok"]
                   for el in payload["elements"])

    def test_upsilon_kind(self, capsys):
        code, out, _ = run(capsys, "fiber", "n=2; pairs=(0 1!, 2 3!)",
                           "--kind", "upsilon")
        assert code == 0
        payload = json.loads(out)
        assert payload["size"] == 2 ** payload["w"] > 1
        assert all("tree" in el for el in payload["elements"])

    def test_parse_error_exits_two(self, capsys):
        code, _, err = run(capsys, "fiber", "n=1 pairs=(0 1)")
        assert code == 2
        assert "parse error" in err and "character" in err

    def test_determinism(self, capsys):
        _, first, _ = run(capsys, "fiber", "n=2; pairs=(0 2!, 1 3)")
        _, second, _ = run(capsys, "fiber", "n=2; pairs=(0 2!, 1 3)")
        assert first == second


class TestBijection:
    def test_phi_image(self, capsys):
        code, out, _ = run(capsys, "bijection", "phi", "n=2; pairs=(0 1, 2 3)")
        assert code == 0
        image = json.loads(out)["image"]
        assert image["w"] == 0 and len(image["tree"]) == 2

    def test_phi_rejects_twisted(self, capsys):
        code, _, err = run(capsys, "bijection", "phi", "n=1; pairs=(0 1!)")
        assert code == 2
        assert "orientable" in err

    def test_gamma_delta_round_trip(self, capsys):
        literal = "sigma=(1,0); mate=(-1,-1); out=(0)"
        code, out, _ = run(capsys, "bijection", "gamma", literal)
        assert code == 0
        image = json.loads(out)["image"]
        back = "sigma=({}); alpha=({}); root={}; outer={}".format(
            ",".join(map(str, image["sigma"])),
            ",".join(map(str, image["alpha"])),
            image["root"], image["outer"])
        code, out, _ = run(capsys, "bijection", "delta", back)
        assert code == 0
        tree = json.loads(out)["image"]
        assert tree == {"sigma": [1, 0], "mate": [-1, -1], "out": [0],
                        "tails": [], "root": 0}

    def test_delta_requires_outer(self, capsys):
        code, _, err = run(capsys, "bijection", "delta",
                           "sigma=(1,0); alpha=(1,0)")
        assert code == 2
        assert "outer" in err

    def test_colored_gluing_literal(self, capsys):
        code, out, _ = run(capsys, "fiber",
                           "n=2; pairs=(0 1, 2 3); colors=(1,1,2); "
                           "labels=(2,1)")
        assert code == 0
        assert json.loads(out)["input"]["colors"] == [1, 1, 2]
