"""Command-line front end.

Usage:
    oosembed embed delta.csv --dim 2 --out embed.json
    oosembed oos delta.csv --new new.csv --method restrict
    oosembed oos delta.csv --new new.csv --pairs pairs.csv --method batch
    oosembed arc delta.csv --new new.csv --arc-steps 100 --format csv

Input CSVs hold unsquared dissimilarities unless ``--squared`` is given. The
``--new`` file has one row per new object (its dissimilarities to the n
in-sample objects); ``--pairs`` holds the k x k dissimilarities among the new
objects for ``--method batch``.

Exit codes: 0 success, 2 input error, 3 spectrum error, 4 solver failure.
"""

from __future__ import annotations

import csv
import functools
import json
import os
import sys
import tempfile
from pathlib import Path

import click
import numpy as np

from . import __version__
from .errors import InputError, SolverError, SpectrumError
from .project import project_all
from .proximity import augment, dissim_to_centered_sim, tau_w, validate_dissimilarity
from .restrict import BatchProblem, OosProblem, arc, solve_batch, solve_single, stress_oos
from .spectral import Configuration, TruncatedGram, cmds_embed

SCHEMA = "oosembed.result/1"

EXIT_INPUT = 2
EXIT_SPECTRUM = 3
EXIT_SOLVER = 4


class CsvFormatError(InputError):
    pass


def read_matrix(path) -> np.ndarray:
    """Parse a numeric CSV; a non-numeric first line is taken as a header."""
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, fields in enumerate(csv.reader(fh), start=1):
            if not fields or all(not f.strip() for f in fields):
                continue
            try:
                row = [float(f) for f in fields]
            except ValueError:
                if lineno == 1:
                    continue
                raise CsvFormatError(f"{path}:{lineno}: non-numeric field in {fields!r}") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise CsvFormatError(f"{path}:{lineno}: expected {width} fields, found {len(row)}")
            rows.append(row)
    if not rows:
        raise CsvFormatError(f"{path}: no numeric rows")
    return np.array(rows, dtype=float)


def _floats(a):
    return np.asarray(a, dtype=float).tolist()


def _write(text: str, out: str | None) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    target = Path(out)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _json_text(command: str, config: dict, result: dict, diagnostics: dict) -> str:
    doc = {"schema": SCHEMA, "command": command, "config": config, "result": result, "diagnostics": diagnostics}
    return json.dumps(doc, indent=2, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (InputError, OSError, json.JSONDecodeError, KeyError) as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except SpectrumError as exc:
            click.echo(f"spectrum error: {exc}", err=True)
            sys.exit(EXIT_SPECTRUM)
        except SolverError as exc:
            click.echo(f"solver failure: {exc}", err=True)
            sys.exit(EXIT_SOLVER)

    return wrapper


def _load_delta(path, squared: bool):
    return validate_dissimilarity(read_matrix(path), squared=squared)


def _load_new(path, n: int, squared: bool) -> np.ndarray:
    """k x n squared dissimilarities of the new objects."""
    a = read_matrix(path)
    if a.shape[1] != n:
        raise InputError(f"{path}: each row needs {n} dissimilarities, found {a.shape[1]}")
    if np.any(a < 0):
        raise InputError(f"{path}: negative dissimilarity")
    return a if squared else a**2


def _embedding(delta, d: int, embedding_path):
    """In-sample configuration, either recomputed or read back from an ``embed`` document."""
    if embedding_path is None:
        return cmds_embed(delta, d)
    doc = json.loads(Path(embedding_path).read_text())
    res = doc["result"]
    X = np.array(res["X"], dtype=float)
    tg = TruncatedGram(
        d=X.shape[1],
        top_eigenvalues=np.array(res["eigenvalues"], dtype=float),
        top_vectors=np.array(res["eigenvectors"], dtype=float),
        dropped_eigenvalues=np.array(res.get("dropped_eigenvalues", []), dtype=float),
        degenerate_spectrum=bool(res.get("degenerate_spectrum", False)),
    )
    if X.shape[0] != delta.n:
        raise InputError(f"embedding has {X.shape[0]} points but the dissimilarity matrix has {delta.n}")
    return Configuration(X), tg


def _embed_result(conf: Configuration, tg: TruncatedGram) -> dict:
    dropped = tg.dropped_eigenvalues
    total = float(np.sum(np.abs(tg.top_eigenvalues)) + np.sum(np.abs(dropped)))
    return {
        "X": _floats(conf.X),
        "eigenvalues": _floats(tg.top_eigenvalues),
        "eigenvectors": _floats(tg.top_vectors),
        "dropped_eigenvalues": _floats(dropped),
        "dropped_frobenius": float(np.sqrt(np.sum(dropped**2))),
        "dropped_fraction": float(np.sum(np.abs(dropped)) / total) if total > 0 else 0.0,
        "degenerate_spectrum": tg.degenerate_spectrum,
    }


common_options = [
    click.option("--dim", "dim", type=click.IntRange(min=1), default=2, show_default=True, help="Embedding dimension d."),
    click.option("--squared", is_flag=True, help="Input entries are already squared dissimilarities."),
    click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout)."),
    click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True),
]


def _common(fn):
    for opt in reversed(common_options):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="oosembed")
def cli():
    """Classical MDS embedding and out-of-sample placement of proximity data."""


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@_common
@_exit_codes
def embed(input_path, dim, squared, out, fmt):
    """Embed an n x n dissimilarity matrix by classical MDS."""
    delta = _load_delta(input_path, squared)
    conf, tg = cmds_embed(delta, dim)
    if fmt == "csv":
        _write(_csv_text([f"x_{j + 1}" for j in range(dim)], conf.X), out)
        return
    config = {"input": str(input_path), "dim": dim, "squared": squared}
    _write(_json_text("embed", config, _embed_result(conf, tg), {"n": conf.n}), out)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option("--new", "new_path", type=click.Path(dir_okay=False), required=True, help="CSV, one row per new object.")
@click.option("--pairs", "pairs_path", type=click.Path(dir_okay=False), default=None, help="k x k dissimilarities among new objects (batch).")
@click.option("--method", type=click.Choice(["project", "restrict", "stress", "batch"]), default="restrict", show_default=True)
@click.option("--embedding", "embedding_path", type=click.Path(dir_okay=False), default=None, help="Reuse X from an `embed` JSON document.")
@click.option("--tol", type=click.FloatRange(min=0.0, min_open=True), default=1e-10, show_default=True)
@click.option("--max-iter", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--n-starts", type=click.IntRange(min=1), default=8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_common
@_exit_codes
def oos(input_path, new_path, pairs_path, method, embedding_path, tol, max_iter, n_starts, seed, dim, squared, out, fmt):
    """Place new objects into an existing embedding."""
    delta = _load_delta(input_path, squared)
    a2 = _load_new(new_path, delta.n, squared)
    conf, tg = _embedding(delta, dim, embedding_path)
    config = {
        "input": str(input_path), "new": str(new_path), "pairs": pairs_path, "method": method,
        "dim": dim, "squared": squared, "tol": tol, "max_iter": max_iter, "n_starts": n_starts, "seed": seed,
    }
    diagnostics: dict = {"n": delta.n, "k": a2.shape[0]}

    if method == "batch":
        if pairs_path is None:
            raise InputError("--method batch needs --pairs")
        alpha2 = read_matrix(pairs_path)
        alpha2 = alpha2 if squared else alpha2**2
        data = tau_w(augment(delta, a2.T, alpha2), delta.n)
        res = solve_batch(BatchProblem(conf.X, data.b, data.beta), tol=tol, max_iter=max_iter, n_starts=n_starts, seed=seed)
        rows = res.Y
        result = {"Y": _floats(res.Y), "objective": res.objective, "grad_norm": res.grad_norm}
        diagnostics.update(res.diagnostics)
    else:
        points = []
        rows = []
        for a in a2:
            if method == "project":
                projections, gap = project_all(conf, tg, delta, a)
                entry = {tag: _floats(r.y_hat) for tag, r in projections.items()}
                entry["max_discrepancy"] = gap
                entry["residual_norm"] = projections["ols"].residual_norm
                rows.append(projections["spectral"].y_hat)
            elif method == "restrict":
                b, beta = dissim_to_centered_sim(delta, a)
                r = solve_single(OosProblem(conf.X, b, beta), tol=tol, max_iter=max_iter)
                entry = {
                    "y_star": _floats(r.y_star), "lambda_star": r.lambda_star, "objective": r.objective,
                    "hard_case": r.hard_case, "beta": beta, "r_hat_squared": r.diagnostics["r_hat_squared"],
                    "regime": r.diagnostics["regime"], "iterations": r.diagnostics["iterations"],
                }
                rows.append(r.y_star)
            else:
                r = stress_oos(conf.X, np.sqrt(a), n_starts=n_starts, seed=seed)
                entry = {"y_star": _floats(r.y_star), "stress": r.objective,
                         "monotone": r.diagnostics["monotone"], "coincident_hits": r.diagnostics["coincident_hits"]}
                rows.append(r.y_star)
            points.append(entry)
        result = {"points": points}

    if fmt == "csv":
        _write(_csv_text([f"y_{j + 1}" for j in range(dim)], rows), out)
        return
    _write(_json_text("oos", config, result, diagnostics), out)


@cli.command("arc")
@click.argument("input_path", type=click.Path(dir_okay=False))
@click.option("--new", "new_path", type=click.Path(dir_okay=False), required=True, help="CSV; the first row is used.")
@click.option("--arc-steps", type=click.IntRange(min=1), default=50, show_default=True)
@click.option("--tol", type=click.FloatRange(min=0.0, min_open=True), default=1e-10, show_default=True)
@click.option("--max-iter", type=click.IntRange(min=1), default=500, show_default=True)
@_common
@_exit_codes
def arc_cmd(input_path, new_path, arc_steps, tol, max_iter, dim, squared, out, fmt):
    """Trace y_hat(lambda) from the projection (lambda = 0) to the restricted solution."""
    delta = _load_delta(input_path, squared)
    a2 = _load_new(new_path, delta.n, squared)[0]
    conf, _ = cmds_embed(delta, dim)
    b, beta = dissim_to_centered_sim(delta, a2)
    p = OosProblem(conf.X, b, beta)
    res = solve_single(p, tol=tol, max_iter=max_iter)
    trace = arc(p, res, steps=arc_steps)
    table = trace.table()
    header = ["lambda", *[f"y_{j + 1}" for j in range(dim)], "phi", "interpolated"]
    if fmt == "csv":
        _write(_csv_text(header, table), out)
        return
    config = {"input": str(input_path), "new": str(new_path), "dim": dim, "squared": squared,
              "arc_steps": arc_steps, "tol": tol, "max_iter": max_iter}
    result = {
        "columns": header,
        "rows": _floats(table),
        "lambda_star": res.lambda_star,
        "y_star": _floats(res.y_star),
        "objective": res.objective,
        "hard_case": res.hard_case,
    }
    _write(_json_text("arc", config, result, {"interpolated_indices": trace.interpolated_indices}), out)


def main(argv=None):
    cli.main(args=argv, prog_name="oosembed")


if __name__ == "__main__":
    main()
