"""Command-line pipeline: synth, estimate, tune, sweep, evaluate, plot.

Exit codes: 0 success, 1 numerical failure, 2 bad input, 3 missing
prerequisite (e.g. evaluating against a dataset without a truth sheet).
"""

from __future__ import annotations

import functools
import hashlib
import math
import sys
import time
import warnings
from pathlib import Path

import click
import numpy as np

from . import io
from ._kernel import BACKEND
from .baselines import AlsConfig, als_field, ls_field, periodogram
from .errors import (
    InvalidArgumentError,
    MissingTruthError,
    NumericalError,
    SynthesisError,
)
from .kalman import kalman_smooth
from .metrics import lr_distance, render_sheet
from .scene import canonical_scene_text, default_scene, load_scene, sample_scene
from .tuning import hcll_sweep, power_weights, tune
from .types import HyperParameters, WindowingForm

EXIT_NUMERICAL = 1
EXIT_BAD_INPUT = 2
EXIT_MISSING_PREREQ = 3

_FORM_CHOICES = click.Choice([f.value for f in WindowingForm])


def _fail(code: int, exc) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _pipeline_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except MissingTruthError as exc:
            _fail(EXIT_MISSING_PREREQ, exc)
        except (InvalidArgumentError, ValueError, OSError) as exc:
            _fail(EXIT_BAD_INPUT, exc)
        except (NumericalError, SynthesisError, np.linalg.LinAlgError) as exc:
            _fail(EXIT_NUMERICAL, exc)

    return wrapper


@click.group()
@click.version_option(package_name="specreg")
def main():
    """Regularized adaptive long-AR spectral analysis of short multi-bin signals."""


@main.command()
@click.option("--scene", "scene_src", default="default", show_default=True,
              help="Scene spec JSON path, or 'default' for the committed Fig1-like scene.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_pipeline_errors
def synth(scene_src, out_path):
    """Draw a dataset (with its truth sheet) from a scene spec."""
    spec = default_scene() if scene_src == "default" else load_scene(scene_src)
    scene_hash = hashlib.sha256(canonical_scene_text(spec).encode()).hexdigest()
    dataset = sample_scene(spec)
    io.write_dataset(out_path, dataset, seed=spec.seed, scene_hash=scene_hash)
    click.echo(f"wrote {out_path}: M={dataset.m} N={dataset.n} seed={spec.seed}")


def _parse_start(text: str) -> tuple[float, float]:
    try:
        u, v = (float(tok) for tok in text.split(","))
    except ValueError:
        raise InvalidArgumentError(f"start point must be 'U,V', got {text!r}")
    return u, v


def _stub_objective(spec: str):
    kind, _, rest = spec.partition(":")
    if kind != "quad":
        raise InvalidArgumentError(f"unknown stub objective {spec!r}")
    u0, v0 = _parse_start(rest)
    return lambda u, v: (u - u0) ** 2 + (v - v0) ** 2


@main.command()
@click.option("--method", required=True,
              type=click.Choice(["periodogram", "ls", "als", "regls"]))
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--form", "form_token", type=_FORM_CHOICES, default=None,
              help="Windowing form [default: post for ls/als, non for regls].")
@click.option("--order", type=int, default=None,
              help="AR order P [default: 3 for ls/als, N-1 for regls].")
@click.option("--k", type=float, default=1.0, show_default=True,
              help="Smoothness order of the lag metric.")
@click.option("--q", "grid", type=int, default=1024, show_default=True,
              help="Frequency grid size.")
@click.option("--window", type=int, default=None,
              help="ALS spatial window length W (odd) [default: 20].")
@click.option("--forgetting", type=float, default=None,
              help="ALS forgetting factor in (0, 1] (instead of a window).")
@click.option("--lambda-s", type=float, default=None,
              help="Spectral-smoothness weight; omit with --lambda-d to auto-tune.")
@click.option("--lambda-d", type=float, default=None,
              help="Depth-continuity weight; omit with --lambda-s to auto-tune.")
@click.option("--power-window", type=int, default=5, show_default=True,
              help="Window for smoothing the per-bin power weights.")
@click.option("--literal-init", is_flag=True, hidden=True)
@_pipeline_errors
def estimate(method, data_path, out_path, form_token, order, k, grid, window,
             forgetting, lambda_s, lambda_d, power_window, literal_init):
    """Estimate a spectrum sheet with one method; writes CSV plus JSON sidecar."""
    dataset, _ = io.read_dataset(data_path)
    started = time.perf_counter()
    sidecar: dict = {"method": method, "q": grid, "data": str(data_path),
                     "backend": BACKEND}
    caught: list[str] = []
    with warnings.catch_warnings(record=True) as warned:
        warnings.simplefilter("always")
        if method == "periodogram":
            sheet = periodogram(dataset, grid)
        else:
            form = WindowingForm(form_token) if form_token else (
                WindowingForm.NON_WINDOWED if method == "regls"
                else WindowingForm.POST_WINDOWED)
            p = order if order is not None else (
                dataset.n - 1 if method == "regls" else 3)
            sidecar.update({"form": form.value, "order": p})
            if method == "ls":
                field = ls_field(dataset, p, form)
            elif method == "als":
                if forgetting is not None:
                    cfg = AlsConfig(window=window, forgetting=forgetting)
                else:
                    cfg = AlsConfig(window=window if window is not None else 20)
                sidecar["als"] = {"window": cfg.window, "forgetting": cfg.forgetting}
                field = als_field(dataset, p, form, cfg)
            else:
                weights = power_weights(dataset, power_window)
                sidecar["powerWindow"] = power_window
                if (lambda_s is None) != (lambda_d is None):
                    raise InvalidArgumentError(
                        "give both --lambda-s and --lambda-d, or neither")
                if lambda_s is None:
                    result = tune(dataset, form, weights.smoothed, order=p, k=k)
                    lambda_s, lambda_d = result.lambda_s, result.lambda_d
                    sidecar["tune"] = {
                        "hcll": result.hcll,
                        "converged": result.converged,
                        "onBoundary": result.on_boundary,
                        "sweeps": (len(result.trace) - 1) // 2,
                    }
                hp = HyperParameters(lambda_s, lambda_d, k, p)
                sidecar.update({"k": k, "lambdaS": lambda_s, "lambdaD": lambda_d})
                field = kalman_smooth(dataset, hp, form, weights.smoothed,
                                      literal_init=literal_init).field
            sidecar.update(io.field_to_json(field))
            sheet = render_sheet(field, grid)
        caught = sorted({str(w.message) for w in warned})
    sidecar["poleBins"] = [b + 1 for b in sheet.pole_bins]
    if caught:
        sidecar["warnings"] = caught
    sidecar["timings"] = {"seconds": time.perf_counter() - started}
    io.write_sheet(out_path, sheet)
    io.write_json(str(out_path) + ".json", sidecar)
    click.echo(f"wrote {out_path} ({method}, {sheet.m}x{sheet.q})")


@main.command(name="tune")
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--form", "form_token", type=_FORM_CHOICES, default="non",
              show_default=True)
@click.option("--order", type=int, default=None, help="AR order P [default: N-1].")
@click.option("--k", type=float, default=1.0, show_default=True)
@click.option("--box", nargs=4, type=float, default=(-4.0, 4.0, -4.0, 4.0),
              show_default=True, metavar="LS_LO LS_HI LD_LO LD_HI",
              help="log10 search box.")
@click.option("--tol", type=float, default=1e-4, show_default=True)
@click.option("--power-window", type=int, default=5, show_default=True)
@click.option("--start", "starts", multiple=True,
              help="log10 start point 'U,V'; repeat for multi-start.")
@click.option("--stub-objective", default=None, hidden=True,
              help="Replace the likelihood with a test objective, e.g. 'quad:1,-2'.")
@_pipeline_errors
def tune_cmd(data_path, out_path, form_token, order, k, box, tol, power_window,
             starts, stub_objective):
    """Select (lambda_s, lambda_d) by minimizing the co-log-likelihood."""
    dataset, _ = io.read_dataset(data_path)
    form = WindowingForm(form_token)
    weights = power_weights(dataset, power_window)
    objective = _stub_objective(stub_objective) if stub_objective else None
    search_box = ((box[0], box[1]), (box[2], box[3]))
    start_points = [_parse_start(s) for s in starts] if starts else [None]
    runs = [
        tune(dataset, form, weights.smoothed, search_box, tol,
             order=order, k=k, start=sp, objective=objective)
        for sp in start_points
    ]
    best = min(runs, key=lambda r: r.hcll)

    def run_json(r):
        return {
            "lambdaS": r.lambda_s, "lambdaD": r.lambda_d,
            "log10LambdaS": r.log10_lambda_s, "log10LambdaD": r.log10_lambda_d,
            "hcll": r.hcll, "converged": r.converged, "onBoundary": r.on_boundary,
            "trace": [[u, v, h] for u, v, h in r.trace],
        }

    report = run_json(best)
    if len(runs) > 1:
        report["runs"] = [run_json(r) for r in runs]
    io.write_json(out_path, report)
    click.echo(f"log10 lambda_s = {best.log10_lambda_s:.4f}, "
               f"log10 lambda_d = {best.log10_lambda_d:.4f}, hcll = {best.hcll:.6f}")
    if best.on_boundary:
        click.echo("warning: optimum lies on the search box boundary", err=True)


def _l2_sweep(dataset, form, weights, us, vs, order, k, grid):
    out = np.empty((us.size, vs.size))
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            try:
                hp = HyperParameters(10.0**u, 10.0**v, k, order)
                field = kalman_smooth(dataset, hp, form, weights).field
                out[i, j] = lr_distance(render_sheet(field, grid), dataset.truth, 2)
            except (NumericalError, FloatingPointError):
                out[i, j] = math.nan
    return out


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--form", "form_token", type=_FORM_CHOICES, default="non",
              show_default=True)
@click.option("--order", type=int, default=None, help="AR order P [default: N-1].")
@click.option("--k", type=float, default=1.0, show_default=True)
@click.option("--ls-min", type=float, default=-2.0, show_default=True)
@click.option("--ls-max", type=float, default=1.0, show_default=True)
@click.option("--ls-count", type=int, default=20, show_default=True)
@click.option("--ld-min", type=float, default=1.0, show_default=True)
@click.option("--ld-max", type=float, default=3.0, show_default=True)
@click.option("--ld-count", type=int, default=20, show_default=True)
@click.option("--q", "grid", type=int, default=1024, show_default=True)
@click.option("--power-window", type=int, default=5, show_default=True)
@click.option("--skip-l2", is_flag=True, help="Skip the L2 sheet even when truth exists.")
@_pipeline_errors
def sweep(data_path, out_path, form_token, order, k, ls_min, ls_max, ls_count,
          ld_min, ld_max, ld_count, grid, power_window, skip_l2):
    """Evaluate the co-log-likelihood (and L2 when truth exists) on a log10 grid."""
    if ls_count < 1 or ld_count < 1:
        raise InvalidArgumentError("grid counts must be >= 1")
    dataset, _ = io.read_dataset(data_path)
    form = WindowingForm(form_token)
    if order is None:
        order = dataset.n - 1
    weights = power_weights(dataset, power_window)
    us = np.linspace(ls_min, ls_max, ls_count)
    vs = np.linspace(ld_min, ld_max, ld_count)
    hmat = hcll_sweep(dataset, form, weights.smoothed, us, vs, order=order, k=k)
    io.write_matrix(out_path, hmat)
    io.write_json(str(out_path) + ".axes.json", {
        "log10LambdaS": [float(u) for u in us],
        "log10LambdaD": [float(v) for v in vs],
        "order": order, "k": k, "form": form.value,
    })
    i, j = np.unravel_index(np.nanargmin(hmat), hmat.shape)
    click.echo(f"wrote {out_path}; hcll minimum at "
               f"log10 lambda_s = {us[i]:.3f}, log10 lambda_d = {vs[j]:.3f}")
    if dataset.truth is not None and not skip_l2:
        l2mat = _l2_sweep(dataset, form, weights.smoothed, us, vs, order, k, grid)
        l2_path = str(out_path) + ".l2.csv"
        io.write_matrix(l2_path, l2mat)
        i2, j2 = np.unravel_index(np.nanargmin(l2mat), l2mat.shape)
        click.echo(f"wrote {l2_path}; L2 minimum at "
                   f"log10 lambda_s = {us[i2]:.3f}, log10 lambda_d = {vs[j2]:.3f}")


@main.command()
@click.argument("spectra", nargs=-1, required=True, type=click.Path(dir_okay=False))
@click.option("--data", "data_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@_pipeline_errors
def evaluate(spectra, data_path, out_path):
    """Score spectrum sheets against the dataset's truth (L2/L1 percentages)."""
    dataset, _ = io.read_dataset(data_path)
    if dataset.truth is None:
        raise MissingTruthError(f"{data_path} carries no truth sheet")
    rows = []
    for path in spectra:
        sheet = io.read_sheet(path)
        sidecar = Path(str(path) + ".json")
        label = Path(path).stem
        if sidecar.exists():
            label = io.read_json(sidecar).get("method", label)
        rows.append((label,
                     100.0 * lr_distance(sheet, dataset.truth, 2),
                     100.0 * lr_distance(sheet, dataset.truth, 1)))
    width = max(len("method"), *(len(r[0]) for r in rows))
    lines = [f"{'method'.ljust(width)}  {'L2':>7}  {'L1':>7}"]
    for label, l2, l1 in rows:
        lines.append(f"{label.ljust(width)}  {l2:6.1f}%  {l1:6.1f}%")
    table = "\n".join(lines) + "\n"
    Path(out_path).write_text(table, encoding="utf-8")
    click.echo(table, nl=False)


def _write_heatmap_plot(out_path: Path, matrix: np.ndarray, title: str):
    dat = out_path.with_suffix(out_path.suffix + ".dat")
    with open(dat, "w", encoding="utf-8") as fh:
        for row in matrix:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
    script = "\n".join([
        "#!/usr/bin/env gnuplot",
        f'set title "{title}"',
        'set xlabel "frequency index q"',
        'set ylabel "bin m"',
        "set pm3d map",
        f'splot "{dat.name}" matrix with image notitle',
        "pause -1",
    ])
    out_path.write_text(script + "\n", encoding="utf-8")


def _write_grid_dat(path: Path, us, vs, matrix):
    with open(path, "w", encoding="utf-8") as fh:
        for i, u in enumerate(us):
            for j, v in enumerate(vs):
                z = matrix[i, j]
                if not math.isnan(z):
                    fh.write(f"{u!r} {v!r} {z!r}\n")
            fh.write("\n")


def _write_contour_plot(out_path: Path, us, vs, matrix, title: str, extra=""):
    dat = out_path.with_suffix(out_path.suffix + ".dat")
    _write_grid_dat(dat, us, vs, matrix)
    i, j = np.unravel_index(np.nanargmin(matrix), matrix.shape)
    script = "\n".join([
        "#!/usr/bin/env gnuplot",
        f'set title "{title}"',
        'set xlabel "log10 lambda_s"',
        'set ylabel "log10 lambda_d"',
        "set view map",
        "set contour base",
        "unset surface",
        "set cntrparam levels auto 15",
        f'set label 1 "*" at {us[i]!r},{vs[j]!r} center font ",20"',
        f'splot "{dat.name}" using 1:2:3 with lines notitle{extra}',
        "pause -1",
    ])
    out_path.write_text(script + "\n", encoding="utf-8")


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(dir_okay=False))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--sweep", "sweep_path", default=None, type=click.Path(dir_okay=False),
              help="Sweep CSV to draw behind a tune trace.")
@_pipeline_errors
def plot(in_path, out_path, sweep_path):
    """Emit gnuplot script + data files for a sheet, a sweep, or a tune trace."""
    in_path = Path(in_path)
    out_path = Path(out_path)
    if in_path.suffix == ".json":
        report = io.read_json(in_path)
        if "trace" not in report:
            raise InvalidArgumentError(f"{in_path}: no iterate trace found")
        dat = out_path.with_suffix(out_path.suffix + ".path.dat")
        runs = report.get("runs") or [report]
        with open(dat, "w", encoding="utf-8") as fh:
            for run in runs:
                for u, v, h in run["trace"]:
                    fh.write(f"{u!r} {v!r} {h!r}\n")
                fh.write("\n\n")
        if sweep_path:
            axes = io.read_json(str(sweep_path) + ".axes.json")
            matrix = io.read_matrix(sweep_path)
            us = np.array(axes["log10LambdaS"])
            vs = np.array(axes["log10LambdaD"])
            _write_contour_plot(out_path, us, vs, matrix, "tuning path over hcll",
                                extra=f', "{dat.name}" using 1:2:3 with linespoints notitle')
        else:
            script = "\n".join([
                "#!/usr/bin/env gnuplot",
                'set title "tuning path"',
                'set xlabel "log10 lambda_s"',
                'set ylabel "log10 lambda_d"',
                f'plot "{dat.name}" using 1:2 with linespoints notitle',
                "pause -1",
            ])
            out_path.write_text(script + "\n", encoding="utf-8")
    else:
        axes_path = Path(str(in_path) + ".axes.json")
        matrix = io.read_matrix(in_path)
        if axes_path.exists():
            axes = io.read_json(axes_path)
            us = np.array(axes["log10LambdaS"])
            vs = np.array(axes["log10LambdaD"])
            _write_contour_plot(out_path, us, vs, matrix, in_path.name)
        else:
            _write_heatmap_plot(out_path, matrix, in_path.name)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
