"""Plain-text file formats.

All writers are atomic (temp file in the target directory, then rename)
and print floats with 17 significant digits, which round-trips float64
bit for bit. All readers raise ValueError with a line reference on
malformed input.

Matrix files are bare comma-separated rows; blank lines are ignored.
Factor files carry a version header, the dimensions, the block structure,
and the labeled factor matrices. Tensor files carry the header, the three
equal dimensions, and one value per line with the first index fastest and
the third slowest. History files are ordinary CSV.
"""

import os
import tempfile

import numpy as np

from .solver import FactorPair, RunHistory

FACTORS_MAGIC = "psdfact-factors v1"
TENSOR_MAGIC = "psdfact-tensor v1"
HISTORY_HEADER = "sweep,objective,err,kkt_a,kkt_b"


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".psdfact-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_row(line: str, lineno: int) -> list[float]:
    try:
        return [float(tok) for tok in line.split(",")]
    except ValueError as e:
        raise ValueError(f"line {lineno}: {e}") from e


def write_matrix(path: str, m):
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    rows = [",".join(_fmt(v) for v in row) for row in a]
    _atomic_write(path, "\n".join(rows) + "\n")


def read_matrix(path: str) -> np.ndarray:
    rows = []
    width = None
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            row = _parse_row(line, lineno)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(
                    f"line {lineno}: expected {width} values, got {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return np.array(rows)


def write_factors(path: str, fp: FactorPair):
    m, n, r = fp.A.shape[0], fp.B.shape[0], fp.A.shape[1]
    lines = [FACTORS_MAGIC, f"{m} {n} {r}"]
    if fp.blocks is None:
        lines.append("blocks none")
    else:
        lines.append("blocks " + ",".join(str(s) for s in fp.blocks))
    for label, stack in (("A", fp.A), ("B", fp.B)):
        for i in range(stack.shape[0]):
            lines.append(f"{label} {i + 1}")
            for row in stack[i]:
                lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_factors(path: str) -> FactorPair:
    with open(path) as f:
        lines = f.read().splitlines()
    pos = 0

    def take(what: str) -> str:
        nonlocal pos
        if pos >= len(lines):
            raise ValueError(f"{path}: unexpected end of file, expected {what}")
        line = lines[pos]
        pos += 1
        return line

    if take("header").strip() != FACTORS_MAGIC:
        raise ValueError(f"{path}: not a {FACTORS_MAGIC!r} file")
    dims = take("dimensions").split()
    if len(dims) != 3:
        raise ValueError(f"{path}: dimension line must hold three integers")
    try:
        m, n, r = (int(v) for v in dims)
    except ValueError as e:
        raise ValueError(f"{path}: bad dimension line: {e}") from e
    if m < 1 or n < 1 or r < 1:
        raise ValueError(f"{path}: dimensions must be positive")
    bline = take("block structure").strip()
    if not bline.startswith("blocks "):
        raise ValueError(f"{path}: expected a 'blocks' line, got {bline!r}")
    spec = bline[len("blocks ") :].strip()
    if spec == "none":
        blocks = None
    else:
        try:
            blocks = tuple(int(v) for v in spec.split(","))
        except ValueError as e:
            raise ValueError(f"{path}: bad block sizes {spec!r}") from e
        if any(s < 1 for s in blocks) or sum(blocks) != r:
            raise ValueError(f"{path}: block sizes {blocks} do not sum to r={r}")

    def read_stack(label: str, count: int) -> np.ndarray:
        out = np.empty((count, r, r))
        for i in range(count):
            tag = take(f"label {label} {i + 1}").strip()
            if tag != f"{label} {i + 1}":
                raise ValueError(
                    f"{path}: expected label {label} {i + 1!r}, got {tag!r}"
                )
            for k in range(r):
                row = _parse_row(take("matrix row"), pos)
                if len(row) != r:
                    raise ValueError(
                        f"{path}: line {pos}: expected {r} values, got {len(row)}"
                    )
                out[i, k] = row
        return out

    fa = read_stack("A", m)
    fb = read_stack("B", n)
    while pos < len(lines):
        if lines[pos].strip():
            raise ValueError(f"{path}: trailing content at line {pos + 1}")
        pos += 1
    return FactorPair(fa, fb, blocks)


def write_tensor(path: str, t):
    a = np.asarray(t, dtype=np.float64)
    if a.ndim != 3 or len(set(a.shape)) != 1:
        raise ValueError(f"expected a cubic 3-mode tensor, got shape {a.shape}")
    d = a.shape[0]
    lines = [TENSOR_MAGIC, f"{d} {d} {d}"]
    lines.extend(_fmt(v) for v in a.ravel(order="F"))
    _atomic_write(path, "\n".join(lines) + "\n")


def read_tensor(path: str) -> np.ndarray:
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines or lines[0].strip() != TENSOR_MAGIC:
        raise ValueError(f"{path}: not a {TENSOR_MAGIC!r} file")
    if len(lines) < 2:
        raise ValueError(f"{path}: missing dimension line")
    dims = lines[1].split()
    try:
        d1, d2, d3 = (int(v) for v in dims)
    except ValueError as e:
        raise ValueError(f"{path}: bad dimension line: {e}") from e
    if not (d1 == d2 == d3) or d1 < 1:
        raise ValueError(f"{path}: tensor must be cubic with positive dimension")
    vals = []
    for lineno, raw in enumerate(lines[2:], start=3):
        line = raw.strip()
        if not line:
            continue
        try:
            vals.append(float(line))
        except ValueError as e:
            raise ValueError(f"{path}: line {lineno}: {e}") from e
    if len(vals) != d1 * d1 * d1:
        raise ValueError(
            f"{path}: expected {d1 ** 3} values, found {len(vals)}"
        )
    return np.array(vals).reshape((d1, d1, d1), order="F")


def write_history(path: str, hist: RunHistory):
    lines = [HISTORY_HEADER]
    for i in range(hist.n_sweeps):
        lines.append(
            ",".join(
                (
                    str(int(hist.sweep[i])),
                    _fmt(hist.objective[i]),
                    _fmt(hist.err[i]),
                    _fmt(hist.kkt_a[i]),
                    _fmt(hist.kkt_b[i]),
                )
            )
        )
    _atomic_write(path, "\n".join(lines) + "\n")


def write_summary(path: str, entries: dict):
    lines = []
    for key, val in entries.items():
        if isinstance(val, float):
            lines.append(f"{key}={_fmt(val)}")
        else:
            lines.append(f"{key}={val}")
    _atomic_write(path, "\n".join(lines) + "\n")
