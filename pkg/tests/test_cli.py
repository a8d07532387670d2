import json

import pytest

from unsample.cli import EXIT_EMPTY, EXIT_ERROR, EXIT_OK, main

SWAP = "nodes 2\n1 -> 2\n2 -> 1\n"


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_undersample_rate_two(tmp_path, capsys):
    src = tmp_path / "g.txt"
    src.write_text(SWAP)
    code, out, _ = run_cli(capsys, "undersample", str(src), "--rate", "2")
    assert code == EXIT_OK
    assert out == "nodes 2\n1 -> 1\n2 -> 2\n"


def test_undersample_rate_one_identity(tmp_path, capsys):
    src = tmp_path / "g.txt"
    src.write_text(SWAP)
    code, out, _ = run_cli(capsys, "undersample", str(src), "--rate", "1")
    assert code == EXIT_OK
    assert out == SWAP
    assert "<->" not in out


def test_undersample_rejects_bidirected_input(tmp_path, capsys):
    src = tmp_path / "g.txt"
    src.write_text("nodes 2\n1 <-> 2\n")
    code, _, err = run_cli(capsys, "undersample", str(src), "--rate", "1")
    assert code == EXIT_ERROR
    assert "line 2" in err


def test_undersample_malformed_line_names_line(tmp_path, capsys):
    src = tmp_path / "g.txt"
    src.write_text("nodes 2\n1 => 2\n")
    code, _, err = run_cli(capsys, "undersample", str(src), "--rate", "1")
    assert code == EXIT_ERROR
    assert "line 2" in err


def test_solve_text_lists_members_and_rates(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text("nodes 1\n1 -> 1\n")
    code, out, _ = run_cli(capsys, "solve", str(src), "--max-rate", "5")
    assert code == EXIT_OK
    assert "class size: 1" in out
    assert "rates: 1,2,3,4,5" in out


def test_solve_json_schema(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text(SWAP)
    code, out, _ = run_cli(capsys, "solve", str(src), "--max-rate", "6", "--json")
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["n"] == 2
    assert payload["maxu"] == 6
    assert payload["entries"] == [{"edges": [[1, 2], [2, 1]], "witnesses": [1, 3, 5]}]
    assert "nodes_expanded" in payload["stats"]


def test_solve_empty_class_exit_code(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text("nodes 2\n1 -> 2\n1 <-> 2\n")
    code, out, _ = run_cli(capsys, "solve", str(src), "--max-rate", "3")
    assert code == EXIT_EMPTY
    assert "class size: 0" in out


def test_solve_includes_directed_part_when_no_bidirected(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text("nodes 3\n1 -> 2\n")
    code, out, _ = run_cli(capsys, "solve", str(src), "--max-rate", "3")
    assert code == EXIT_OK
    assert "g1: 1 -> 2   rates: 1" in out


def test_oracle_agrees_with_solve(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text(SWAP)
    code_s, out_s, _ = run_cli(capsys, "solve", str(src), "--max-rate", "6", "--json")
    code_o, out_o, _ = run_cli(capsys, "oracle", str(src), "--max-rate", "6", "--json")
    assert code_s == code_o == EXIT_OK
    assert json.loads(out_s)["entries"] == json.loads(out_o)["entries"]


def test_optimize_exact_cost_zero(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text("nodes 1\n1 -> 1\n")
    code, out, _ = run_cli(capsys, "optimize", str(src), "--max-rate", "3")
    assert code == EXIT_OK
    assert "cost: 0" in out
    assert "default to 1" in out


def test_optimize_with_truth_reports_both_error_sets(tmp_path, capsys):
    truth = tmp_path / "g.txt"
    truth.write_text(SWAP)
    hyp = tmp_path / "h.txt"
    hyp.write_text("nodes 2\n1 -> 1\n")  # broken measurement at rate 2
    code, out, _ = run_cli(
        capsys, "optimize", str(hyp), "--max-rate", "3", "--truth", str(truth)
    )
    assert code == EXIT_OK
    assert "errors vs truth" in out
    assert "refined errors vs truth" in out
    assert "cost:" in out


def test_export_asp_contains_choice_rule(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text(SWAP)
    code, out, _ = run_cli(capsys, "export-asp", str(src), "--max-rate", "20")
    assert code == EXIT_OK
    assert "1 {u(1..20, 1)} 1." in out
    assert "hdirected(1,2)." in out


def test_export_asp_weighted(tmp_path, capsys):
    src = tmp_path / "h.txt"
    src.write_text("nodes 2\n1 -> 2 @ 5\n")
    code, out, _ = run_cli(
        capsys, "export-asp", str(src), "--max-rate", "20", "--weighted"
    )
    assert code == EXIT_OK
    assert "[5@1,1,2]" in out


def test_gen_deterministic(tmp_path, capsys):
    args = ("gen", "scc", "--size", "8", "--degree", "1.4", "--seed", "7")
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == EXIT_OK
    assert out1 == out2
    assert out1.startswith("nodes 8\n")


def test_gen_structured(tmp_path, capsys):
    code, out, _ = run_cli(
        capsys,
        "gen", "structured",
        "--scc-count", "2", "--scc-size", "3", "--seed", "3",
    )
    assert code == EXIT_OK
    assert out.startswith("nodes 6\n")


def test_missing_file_is_error(capsys):
    code, _, err = run_cli(capsys, "solve", "/nonexistent/file.txt")
    assert code == EXIT_ERROR
    assert "error" in err.lower()


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve"])  # missing input argument
    assert exc.value.code == EXIT_ERROR


def test_bench_runs_tiny_suite(tmp_path, capsys, monkeypatch):
    import unsample.benchmark as bench
    from unsample.generators import GenConfig

    def fake_suites():
        return {
            "tiny": bench.BenchSuite(
                name="tiny",
                configs=(GenConfig(kind="single_scc", n=3, seed=5),),
                rates=(2,),
                maxu=2,
                time_limit_s=60.0,
            )
        }

    monkeypatch.setattr(bench, "builtin_suites", fake_suites)
    prefix = tmp_path / "bench"
    code, out, _ = run_cli(
        capsys, "bench", "--suite", "tiny", "--out-prefix", str(prefix)
    )
    assert code == EXIT_OK
    assert (tmp_path / "bench.csv").exists()
    assert (tmp_path / "bench.svg").exists()
    assert "1 records" in out or "records" in out
