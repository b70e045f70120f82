import os
import subprocess
import sys

import psdfact


def run_py(code, env_backend):
    env = dict(os.environ)
    if env_backend is None:
        env.pop("PSDFACT_BACKEND", None)
    else:
        env["PSDFACT_BACKEND"] = env_backend
    return subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env=env,
        timeout=300,
    )


def test_backend_name_reports_active_choice():
    assert psdfact.backend_name() in ("numpy", "numba")


def test_forced_numpy_backend():
    r = run_py(
        "import psdfact; print(psdfact.backend_name(), psdfact.numba_enabled())",
        "numpy",
    )
    assert r.returncode == 0, r.stderr
    assert r.stdout.split() == ["numpy", "False"]


def test_invalid_backend_value_fails_at_import():
    r = run_py("import psdfact", "fortran")
    assert r.returncode != 0
    assert "PSDFACT_BACKEND" in r.stderr


def test_backends_agree_on_solver_output():
    code = (
        "import psdfact, numpy as np\n"
        "x, _ = psdfact.gen_planted(6, 5, 2, seed=9)\n"
        "cfg = psdfact.SolverConfig(r=2, max_sweeps=25, seed=4)\n"
        "fp, hist = psdfact.factorize(x, cfg)\n"
        "print(repr(hist.final_objective))\n"
        "print(repr(float(np.sum(fp.A))), repr(float(np.sum(fp.B))))\n"
    )
    out = {}
    for backend in ("numpy", "numba"):
        r = run_py(code, backend)
        assert r.returncode == 0, f"{backend}: {r.stderr}"
        out[backend] = r.stdout.splitlines()
    f_np = float(out["numpy"][0])
    f_nb = float(out["numba"][0])
    assert abs(f_np - f_nb) <= 1e-9 * (1.0 + abs(f_np))
    a_np, b_np = (float(v) for v in out["numpy"][1].split())
    a_nb, b_nb = (float(v) for v in out["numba"][1].split())
    assert abs(a_np - a_nb) <= 1e-9 * (1.0 + abs(a_np))
    assert abs(b_np - b_nb) <= 1e-9 * (1.0 + abs(b_np))
