import numpy as np
import pytest

from psdfact import Singular, read_factors, read_matrix, read_tensor, write_matrix
from psdfact.cli import main


def run(argv):
    return main([str(a) for a in argv])


def test_full_pipeline_planted(tmp_path, capsys):
    data = tmp_path / "x.txt"
    truth = tmp_path / "x.factors.txt"
    assert run(["generate", "--kind", "planted", "--m", 5, "--n", 4, "--r", 2,
                "--seed", 3, "--out", data, "--factors-out", truth]) == 0
    x = read_matrix(data)
    assert x.shape == (5, 4)
    out = tmp_path / "run"
    assert run(["factorize", "--input", data, "--r", 2, "--sweeps", 20,
                "--seed", 1, "--out", out]) == 0
    for name in ("factors.txt", "history.csv", "summary.txt"):
        assert (out / name).exists()
    summary = dict(
        line.split("=", 1) for line in (out / "summary.txt").read_text().splitlines()
    )
    assert summary["sweeps"] == "20"
    hist_lines = (out / "history.csv").read_text().splitlines()
    assert len(hist_lines) == 21

    capsys.readouterr()
    assert run(["eval", "--input", data, "--factors", truth]) == 0
    printed = dict(
        line.split("=", 1) for line in capsys.readouterr().out.splitlines()
    )
    assert float(printed["objective"]) == 0.0
    assert float(printed["err"]) == 0.0


def test_factorize_deterministic_output_bytes(tmp_path):
    data = tmp_path / "x.txt"
    run(["generate", "--kind", "planted", "--m", 4, "--n", 4, "--r", 2,
         "--seed", 7, "--out", data])
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert run(["factorize", "--input", data, "--r", 2, "--sweeps", 15,
                    "--seed", 5, "--out", out]) == 0
        outs.append((out / "history.csv").read_bytes())
    assert outs[0] == outs[1]
    fa = read_factors(tmp_path / "a" / "factors.txt")
    fb = read_factors(tmp_path / "b" / "factors.txt")
    assert np.array_equal(fa.A, fb.A) and np.array_equal(fa.B, fb.B)


def test_factorize_with_blocks(tmp_path):
    data = tmp_path / "x.txt"
    run(["generate", "--kind", "planted", "--m", 4, "--n", 4, "--r", 3,
         "--blocks", "2,1", "--seed", 2, "--out", data])
    out = tmp_path / "run"
    assert run(["factorize", "--input", data, "--r", 3, "--blocks", "2,1",
                "--sweeps", 10, "--out", out]) == 0
    fp = read_factors(out / "factors.txt")
    assert fp.blocks == (2, 1)
    mask = np.zeros((3, 3), dtype=bool)
    mask[:2, :2] = True
    mask[2, 2] = True
    for m in (*fp.A, *fp.B):
        assert not np.any(m[~mask])


def test_generate_distance_and_tensor(tmp_path):
    dist = tmp_path / "d.txt"
    assert run(["generate", "--kind", "distance", "--n", 6, "--seed", 1,
                "--out", dist]) == 0
    x = read_matrix(dist)
    assert x.shape == (6, 6)
    assert np.array_equal(x, x.T)
    assert np.all(np.diag(x) == 0.0)

    tens = tmp_path / "t.txt"
    assert run(["generate", "--kind", "tensor", "--d", 3, "--r", 2, "--seed", 2,
                "--out", tens]) == 0
    t = read_tensor(tens)
    assert t.shape == (3, 3, 3)
    assert np.min(t) >= 0.0


def test_tensor_command(tmp_path):
    tens = tmp_path / "t.txt"
    run(["generate", "--kind", "tensor", "--d", 3, "--r", 2, "--seed", 4,
         "--out", tens])
    out = tmp_path / "run"
    assert run(["tensor", "--input", tens, "--r", 2, "--sweeps", 15,
                "--restarts", 2, "--out", out]) == 0
    summary = dict(
        line.split("=", 1) for line in (out / "summary.txt").read_text().splitlines()
    )
    assert float(summary["err"]) < 1.0
    assert (out / "history.csv").exists()


def test_bad_flags_exit_2():
    with pytest.raises(SystemExit) as e:
        run(["factorize", "--input", "x"])  # missing required --r/--out
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        run(["generate", "--kind", "nonsense", "--out", "x"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        run(["no-such-command"])
    assert e.value.code == 2


def test_unreadable_or_invalid_input_exit_3(tmp_path, capsys):
    out = tmp_path / "run"
    assert run(["factorize", "--input", tmp_path / "missing.txt", "--r", 2,
                "--out", out]) == 3
    bad = tmp_path / "bad.txt"
    bad.write_text("1,2\nzebra\n")
    assert run(["factorize", "--input", bad, "--r", 2, "--out", out]) == 3
    neg = tmp_path / "neg.txt"
    write_matrix(neg, np.array([[1.0, -2.0], [0.0, 1.0]]))
    assert run(["factorize", "--input", neg, "--r", 2, "--out", out]) == 3
    zero = tmp_path / "zero.txt"
    write_matrix(zero, np.zeros((3, 3)))
    assert run(["factorize", "--input", zero, "--r", 2, "--out", out]) == 3
    capsys.readouterr()


def test_eval_dim_mismatch_exit_3(tmp_path, capsys):
    data = tmp_path / "x.txt"
    truth = tmp_path / "f.txt"
    run(["generate", "--kind", "planted", "--m", 4, "--n", 4, "--r", 2,
         "--seed", 0, "--out", data, "--factors-out", truth])
    other = tmp_path / "y.txt"
    write_matrix(other, np.ones((3, 5)))
    assert run(["eval", "--input", other, "--factors", truth]) == 3
    capsys.readouterr()


def test_solver_failure_exit_4(tmp_path, capsys, monkeypatch):
    data = tmp_path / "x.txt"
    run(["generate", "--kind", "planted", "--m", 4, "--n", 4, "--r", 2,
         "--seed", 0, "--out", data])
    import psdfact.cli as cli_mod

    def boom(x, cfg):
        raise Singular("synthetic failure")

    monkeypatch.setattr(cli_mod, "factorize", boom)
    assert run(["factorize", "--input", data, "--r", 2,
                "--out", tmp_path / "run"]) == 4
    err = capsys.readouterr().err
    assert "synthetic failure" in err


def test_output_write_failure_exit_1(tmp_path, capsys):
    data = tmp_path / "x.txt"
    run(["generate", "--kind", "planted", "--m", 4, "--n", 4, "--r", 2,
         "--seed", 0, "--out", data])
    blocker = tmp_path / "blocked"
    blocker.write_text("a file, not a directory\n")
    assert run(["factorize", "--input", data, "--r", 2, "--sweeps", 2,
                "--out", blocker / "sub"]) == 1
    capsys.readouterr()


def test_certify_passes(capsys):
    assert run(["certify", "--trials", 25, "--seed", 0]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "domination" in out and "trace" in out


def test_bench_subprocess_roundtrip(capsys):
    # tiny instance: proves the two-backend spawn-and-parse loop works
    assert run(["bench", "--n", 6, "--r", 2, "--sweeps", 5, "--restarts", 1]) == 0
    out = capsys.readouterr().out
    assert "numpy" in out and "numba" in out and "speedup" in out
