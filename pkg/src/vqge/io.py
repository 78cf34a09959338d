"""Matrix text files, CSV artifacts and flat ``key=value`` configuration.

Matrix files are UTF-8 text: a header line ``rows cols`` followed by one line
per row of whitespace-separated ``re,im`` pairs. Floats are written with
Python's shortest round-trip ``repr`` so files re-parse bit for bit.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


class ParseError(ValueError):
    def __init__(self, message, path=None, line=None):
        self.path, self.line = path, line
        where = f"{path}:" if path else ""
        where += f"{line}: " if line is not None else " "
        super().__init__(f"{where}{message}".strip())


def format_matrix(m) -> str:
    m = np.asarray(m, dtype=complex)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def write_matrix(path, m):
    Path(path).write_text(format_matrix(m), encoding="utf-8")


def parse_matrix(text, path=None):
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip()]
    if not lines:
        raise ParseError("empty matrix file", path, 1)
    lineno, header = lines[0]
    try:
        rows, cols = (int(tok) for tok in header.split())
    except ValueError:
        raise ParseError(f"header must be 'rows cols', got {header!r}", path, lineno) from None
    if rows < 1 or cols < 1:
        raise ParseError("matrix dimensions must be positive", path, lineno)
    body = lines[1:]
    if len(body) != rows:
        last = body[-1][0] if body else lineno
        raise ParseError(f"expected {rows} rows, found {len(body)}", path, last)
    out = np.empty((rows, cols), dtype=complex)
    for r, (lineno, ln) in enumerate(body):
        toks = ln.split()
        if len(toks) != cols:
            raise ParseError(f"expected {cols} entries, found {len(toks)}", path, lineno)
        for c, tok in enumerate(toks):
            try:
                re_s, im_s = tok.split(",")
                z = complex(float(re_s), float(im_s))
            except ValueError:
                raise ParseError(f"bad entry {tok!r}; expected 're,im'", path, lineno) from None
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                raise ParseError(f"non-finite entry {tok!r}", path, lineno)
            out[r, c] = z
    return out


def read_matrix(path):
    return parse_matrix(Path(path).read_text(encoding="utf-8"), path=str(path))


# ---------------------------------------------------------------------------
# CSV artifacts
# ---------------------------------------------------------------------------

TRACE_COLUMNS = ["restart", "iteration", "loss", "gradient_norm", "shots_used"]
NOISY_TRACE_COLUMNS = TRACE_COLUMNS + ["success_rate"]
TIMING_COLUMNS = ["restart", "iteration", "wall_ms"]
EIGEN_COLUMNS = ["index", "re_t", "im_t", "re_s", "im_s", "re_lambda", "im_lambda", "flag"]
QPS_COLUMNS = ["variant", "unitary_dim", "unitary_count", "shots", "rmse"]


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, columns, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_trace(path, trace, noisy=False, timing_path=None):
    cols = NOISY_TRACE_COLUMNS if noisy else TRACE_COLUMNS
    rows = []
    for rec in trace.iterations:
        row = [rec.restart, rec.iteration, rec.loss, rec.gradient_norm, rec.shots_used]
        if noisy:
            row.append(rec.success_rate)
        rows.append(row)
    write_csv(path, cols, rows)
    if timing_path is not None:
        write_csv(timing_path, TIMING_COLUMNS,
                  [[r.restart, r.iteration, round(r.wall_ms, 3)] for r in trace.iterations])


def eigen_rows(t_diag, s_diag, result, tol):
    """Rows for the eigenvalue CSV from diagonal entries and the extracted result."""
    rows = []
    padding = list(result.padding)
    for i, (t, s) in enumerate(zip(t_diag, s_diag)):
        if abs(s) <= tol:
            flag = "degenerate" if abs(t) <= tol else "infinite"
            lam = complex(float("nan"), float("nan"))
        else:
            lam = t / s
            flag = "finite"
            for k, pz in enumerate(padding):
                if pz == lam:
                    flag = "padding"
                    padding.pop(k)
                    break
        rows.append([i, t.real, t.imag, s.real, s.imag, lam.real, lam.imag, flag])
    return rows


def oracle_rows(result):
    """Eigenvalue CSV rows for the classical reference, sorted by (re, im)."""
    rows = []
    lams = sorted((complex(z) for z in result.eigenvalues),
                  key=lambda z: (round(z.real, 12), round(z.imag, 12)))
    i = 0
    for lam in lams:
        rows.append([i, lam.real, lam.imag, 1.0, 0.0, lam.real, lam.imag, "finite"])
        i += 1
    for _ in range(result.infinite_count):
        nan = float("nan")
        rows.append([i, 1.0, 0.0, 0.0, 0.0, nan, nan, "infinite"])
        i += 1
    if result.degenerate:
        nan = float("nan")
        rows.append([i, 0.0, 0.0, 0.0, 0.0, nan, nan, "degenerate"])
    return rows


def finite_eigenvalues_from_csv(path):
    out = []
    for row in read_csv(path):
        if row["flag"] == "finite":
            out.append(complex(float(row["re_lambda"]), float(row["im_lambda"])))
    return np.array(out, dtype=complex)


# ---------------------------------------------------------------------------
# Flat configuration
# ---------------------------------------------------------------------------

def parse_config_text(text, path=None) -> dict:
    """``key=value`` per line; ``#`` starts a comment; blank lines ignored."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected key=value, got {raw.strip()!r}", path, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", path, lineno)
        out[key] = value
    return out


def read_config(path) -> dict:
    return parse_config_text(Path(path).read_text(encoding="utf-8"), path=str(path))


def format_config(cfg: dict) -> str:
    return "".join(f"{k}={v}\n" for k, v in cfg.items())
