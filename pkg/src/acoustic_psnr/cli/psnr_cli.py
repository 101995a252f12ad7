"""
CLI Interface for acoustic-psnr
Dataset generation, detector training, p(snr) measurement and fitting,
detection-area tables and Markdown reports
"""

import functools
import json
import shutil
import tempfile
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd
import typer
from loguru import logger
from pydantic import ValidationError
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from ..area import AreaModelParams, area_vs_noise_table
from ..config import (
    AreaConfig,
    AugmentConfig,
    FitConfig,
    GenConfig,
    PsnrConfig,
    ReportConfig,
    TrainRunConfig,
    configure_logging,
    resolve_config,
    settings,
    write_run_config,
)
from ..corpus import (
    NOISE_KINDS,
    SPLITS,
    LabeledDataset,
    analytic_pools,
    build_experiment_datasets,
    build_train_augm,
    call_pool,
    load_dataset,
    noise_pool,
    predicted_crossing_snr,
    realized_duty,
    save_dataset,
    select_augm_range_from_curve,
)
from ..detector import (
    CnnDetector,
    Detector,
    DetectorModel,
    EnergyDetector,
    energy_detector,
)
from ..detector.training import TrainConfig, train
from ..evaluation import evaluate_scores
from ..exceptions import DataError, LevelNotReachedError, NumericalError, PsnrError, UsageError
from ..mixing import build_eval_grid
from ..psychometric import (
    LogisticFit,
    PsychometricCurve,
    bootstrap_ci,
    fit_mle,
    measure_curve,
    metrics_empirical,
    summarize_curve,
)
from ..reporting import (
    curve_key,
    load_curve,
    load_fit,
    plot_area,
    plot_curve,
    save_curve,
    to_jsonable,
    write_csv,
    write_json,
    write_report,
)

app = typer.Typer(help="p(snr) evaluation of acoustic call detectors")
console = Console()
err_console = Console(stderr=True)

WEIGHTS_FILE = "model.ptrm"
HISTORY_FILE = "history.csv"
METRICS_FILE = "metrics.json"

state: Dict[str, object] = {"config": None, "threads": settings.threads}


@app.callback()
def main(
    config: Optional[Path] = typer.Option(None, "--config", help="INI run-config file"),
    threads: Optional[int] = typer.Option(None, "--threads", min=1, help="Worker threads"),
    log_level: Optional[str] = typer.Option(None, "--log-level", help="Log level"),
    log_file: Optional[str] = typer.Option(None, "--log-file", help="Also log to this file"),
):
    """Reproducible detector evaluation runs; flags override --config values"""
    configure_logging(log_level, log_file)
    state["config"] = config
    state["threads"] = threads or settings.threads


def handle_errors(command):
    """Map library errors to red diagnostics and their exit codes"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except typer.Exit:
            raise
        except PsnrError as e:
            err_console.print(f"[red]❌ {type(e).__name__}: {e}[/red]")
            if e.detail:
                err_console.print(json.dumps(to_jsonable(e.detail), sort_keys=True))
            raise typer.Exit(code=e.exit_code)
        except ValidationError as e:
            err_console.print(f"[red]❌ Invalid configuration[/red]\n{e}")
            raise typer.Exit(code=UsageError.exit_code)
        except Exception as e:
            logger.exception("Unexpected failure")
            err_console.print(f"[red]❌ Unexpected error: {e}[/red]")
            raise typer.Exit(code=1)

    return wrapper


def _config_path() -> Optional[Path]:
    return state["config"]


def _threads() -> int:
    return int(state["threads"] or 1)


def load_detector(spec: str) -> Detector:
    """`energy[:<threshold dB>]` or a path to a weight file"""
    if spec.startswith("energy"):
        _, _, threshold = spec.partition(":")
        try:
            return energy_detector(float(threshold)) if threshold else energy_detector()
        except ValueError as e:
            raise UsageError(f"Bad energy detector threshold in '{spec}'") from e
    return CnnDetector(DetectorModel.load(spec))


def _fit_and_summarize(
    curve: PsychometricCurve, n_boot: int, seed: int, p_lo: float, p_hi: float
) -> PsychometricCurve:
    """Fit, bootstrap and attach metrics; an unfittable curve keeps its empirical metrics"""
    try:
        curve.fit = fit_mle(curve.points)
    except NumericalError as e:
        logger.warning(f"⚠️ No fit for '{curve.label}': {e}")
        try:
            curve.metrics["empirical"] = metrics_empirical(curve, p_lo, p_hi)
        except LevelNotReachedError:
            curve.metrics["empirical"] = None
        return curve
    if n_boot > 0:
        curve.bootstrap = bootstrap_ci(
            curve.points, n_boot=n_boot, seed=seed, fit=curve.fit, n_jobs=_threads(),
            p_lo=p_lo, p_hi=p_hi,
        )
    return summarize_curve(curve, p_lo, p_hi)


def _print_curve(curve: PsychometricCurve) -> None:
    table = Table(title=f"p(snr) '{curve.label}'")
    table.add_column("Quantity", style="cyan")
    table.add_column("Fit", justify="right", style="green")
    table.add_column("Empirical", justify="right", style="magenta")

    fit_metrics = curve.metrics.get("fit")
    empirical = curve.metrics.get("empirical")

    def cell(metrics, name):
        value = getattr(metrics, name, None) if metrics is not None else None
        return "n/a" if value is None else f"{value:.2f}"

    for name in ("snr_50", "infl_50", "snr_lo", "snr_hi", "interval_width"):
        table.add_row(name, cell(fit_metrics, name), cell(empirical, name))
    console.print(table)
    if curve.fit is not None:
        console.print(
            f"   • x0 = {curve.fit.x0:.3f}, k = {curve.fit.k:.4f}, v = {curve.fit.v:.4f}"
        )
    if curve.bootstrap is not None and "snr_50" in curve.bootstrap.intervals:
        lo, hi = curve.bootstrap.intervals["snr_50"]
        console.print(f"   • snr_50 {curve.bootstrap.confidence:.0%} CI: [{lo:.2f}, {hi:.2f}] dB")


@app.command()
@handle_errors
def gen(
    out: Optional[Path] = typer.Option(None, "--out", help="Dataset directory"),
    pos: Optional[int] = typer.Option(None, "--pos", help="Positive clips"),
    neg: Optional[int] = typer.Option(None, "--neg", help="Negative clips"),
    sessions: Optional[int] = typer.Option(None, "--sessions", help="Recording sessions"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    noise_kind: Optional[List[str]] = typer.Option(None, "--noise-kind", help="Noise families"),
    snr_lo: Optional[float] = typer.Option(None, "--snr-lo", help="Positive SNR window low (dB)"),
    snr_hi: Optional[float] = typer.Option(None, "--snr-hi", help="Positive SNR window high (dB)"),
    overwrite: bool = typer.Option(False, "--overwrite", help="Replace an existing dataset"),
):
    """Generate a synthetic labeled dataset (WAV clips + manifest.csv)"""
    config = resolve_config(
        GenConfig, "gen", _config_path(),
        dict(out=out, pos=pos, neg=neg, sessions=sessions, seed=seed,
             noise_kinds=noise_kind, snr_lo=snr_lo, snr_hi=snr_hi),
    )
    console.print(Panel("🎼 Synthetic dataset generation", style="blue"))
    if config.out.exists() and not overwrite:
        raise UsageError(f"{config.out} already exists (use --overwrite)")

    with console.status("Synthesizing calls and noises..."):
        dataset = build_experiment_datasets(
            config.pos, config.neg, sessions=config.sessions, seed=config.seed,
            noise_kinds=config.noise_kinds, snr_range=(config.snr_lo, config.snr_hi),
        )

    # Build in a sibling temp dir and rename, so a failed run leaves no manifest
    try:
        config.out.parent.mkdir(parents=True, exist_ok=True)
        staging = Path(tempfile.mkdtemp(prefix=f".{config.out.name}-", dir=config.out.parent))
    except OSError as e:
        raise DataError(f"Cannot write to {config.out.parent}: {e}") from e
    try:
        with console.status("💾 Writing clips..."):
            save_dataset(dataset, staging)
            write_run_config(staging, "gen", config)
        if config.out.exists():
            shutil.rmtree(config.out)
        staging.rename(config.out)
    except OSError as e:
        raise DataError(f"Cannot write dataset to {config.out}: {e}") from e
    finally:
        if staging.exists():
            shutil.rmtree(staging, ignore_errors=True)

    counts = dataset.counts()
    table = Table(title="Clips per split")
    table.add_column("Split", style="cyan")
    table.add_column("Positive", justify="right", style="green")
    table.add_column("Negative", justify="right", style="magenta")
    for split, row in counts.iterrows():
        table.add_row(str(split), f"{row.get('positive', 0):,}", f"{row.get('negative', 0):,}")
    console.print(table)
    console.print(f"[green]✅ Wrote {len(dataset):,} clips to {config.out}[/green]")


@app.command("train")
@handle_errors
def train_cmd(
    dataset: Optional[Path] = typer.Option(None, "--dataset", help="Dataset directory or manifest"),
    out: Optional[Path] = typer.Option(None, "--out", help="Run directory"),
    name: Optional[str] = typer.Option(None, "--name", help="Configuration label (conf0, ...)"),
    augm_manifest: Optional[Path] = typer.Option(None, "--augm-manifest", help="trainAugm manifest"),
    epochs: Optional[int] = typer.Option(None, "--epochs", help="Epochs"),
    learning_rate: Optional[float] = typer.Option(None, "--lr", help="Adam learning rate"),
    batch_size: Optional[int] = typer.Option(None, "--batch-size", help="Mini-batch size"),
    dropout_conv: Optional[float] = typer.Option(None, "--dropout-conv", help="Conv dropout"),
    dropout_linear: Optional[float] = typer.Option(None, "--dropout-linear", help="Linear dropout"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Init / shuffle / dropout seed"),
):
    """Train the CNN detector; writes weights, history and ML metrics"""
    config = resolve_config(
        TrainRunConfig, "train", _config_path(),
        dict(dataset=dataset, out=out, name=name, augm_manifest=augm_manifest, epochs=epochs,
             learning_rate=learning_rate, batch_size=batch_size, dropout_conv=dropout_conv,
             dropout_linear=dropout_linear, seed=seed),
    )
    console.print(Panel(f"🧠 Training detector '{config.name or config.out.name}'", style="blue"))

    data = load_dataset(config.dataset)
    train_set = data.by_split("train")
    if config.augm_manifest is not None:
        augm = load_dataset(config.augm_manifest)
        train_set = train_set.extended(augm.clips)
        console.print(f"   • Added {len(augm):,} augmented positives")
    valid_set = data.by_split("valid")

    train_config = TrainConfig(
        learning_rate=config.learning_rate, epochs=config.epochs, batch_size=config.batch_size,
        dropout_conv=config.dropout_conv, dropout_linear=config.dropout_linear, seed=config.seed,
    )
    with console.status(f"Training {config.epochs} epochs on {len(train_set):,} clips..."):
        result = train(
            train_set.audio, train_set.labels, train_config,
            valid=(valid_set.audio, valid_set.labels) if len(valid_set) else None,
        )

    config.out.mkdir(parents=True, exist_ok=True)
    result.model.save(config.out / WEIGHTS_FILE)
    result.save_history(config.out / HISTORY_FILE)

    detector = CnnDetector(result.model)
    splits: Dict[str, LabeledDataset] = {"train": train_set}
    splits.update({split: data.by_split(split) for split in SPLITS if split != "train"})
    metrics = {}
    with console.status("Scoring splits..."):
        for split, subset in splits.items():
            if len(subset) == 0:
                continue
            scores = [s.probability for s in detector.score_many(subset.audio)]
            metrics[split] = evaluate_scores(scores, subset.labels).to_dict()
    write_json(config.out / METRICS_FILE, metrics)
    write_run_config(config.out, "train", config)

    table = Table(title="Classification metrics")
    table.add_column("Split", style="cyan")
    for column in ("loss", "weighted_accuracy", "precision", "recall", "f1"):
        table.add_column(column, justify="right", style="green")
    for split, row in metrics.items():
        table.add_row(
            split,
            *("n/a" if row[c] is None else f"{row[c]:.3f}"
              for c in ("loss", "weighted_accuracy", "precision", "recall", "f1")),
        )
    console.print(table)
    console.print(f"[green]✅ Weights saved to {config.out / WEIGHTS_FILE}[/green]")


@app.command()
@handle_errors
def augment(
    dataset: Optional[Path] = typer.Option(None, "--dataset", help="Dataset directory or manifest"),
    out: Optional[Path] = typer.Option(None, "--out", help="trainAugm directory"),
    curve: Optional[Path] = typer.Option(None, "--curve", help="Curve JSON to read the window from"),
    mode: Optional[str] = typer.Option(None, "--mode", help="high | transition | low"),
    snr_lo: Optional[float] = typer.Option(None, "--snr-lo", help="Explicit window low (dB)"),
    snr_hi: Optional[float] = typer.Option(None, "--snr-hi", help="Explicit window high (dB)"),
    width_db: Optional[float] = typer.Option(None, "--width", help="Window width (dB)"),
    fraction: Optional[float] = typer.Option(None, "--fraction", help="Size relative to positives"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Selection seed"),
):
    """Build a trainAugm set of positives mixed at controlled SNRs"""
    config = resolve_config(
        AugmentConfig, "augment", _config_path(),
        dict(dataset=dataset, out=out, curve=curve, mode=mode, snr_lo=snr_lo, snr_hi=snr_hi,
             width_db=width_db, fraction=fraction, seed=seed),
    )
    console.print(Panel("➕ Targeted SNR augmentation", style="blue"))

    if config.curve is not None:
        window = select_augm_range_from_curve(load_curve(config.curve), config.mode, config.width_db)
    else:
        window = (config.snr_lo, config.snr_hi)

    train_set = load_dataset(config.dataset).by_split("train")
    with console.status(f"Mixing in [{window[0]:+.1f}, {window[1]:+.1f}] dB..."):
        augmented = build_train_augm(
            train_set.positives(), train_set.negatives(), window,
            fraction=config.fraction, seed=config.seed,
        )
    save_dataset(LabeledDataset(augmented), config.out)
    write_json(config.out / "augm_window.json", {"snr_lo": window[0], "snr_hi": window[1]})
    write_run_config(config.out, "augment", config)
    console.print(
        f"[green]✅ {len(augmented):,} augmented clips in "
        f"[{window[0]:+.1f}, {window[1]:+.1f}] dB written to {config.out}[/green]"
    )


@app.command()
@handle_errors
def psnr(
    out: Optional[Path] = typer.Option(None, "--out", help="Run directory"),
    name: Optional[str] = typer.Option(None, "--name", help="Configuration label"),
    detector: Optional[str] = typer.Option(None, "--detector", help="energy:<dB> or weight file"),
    noise_kind: Optional[str] = typer.Option(None, "--noise-kind", help="all | rain | wind | biophony"),
    analytic: Optional[bool] = typer.Option(None, "--analytic/--synthetic", help="Stimulus family"),
    duty: Optional[float] = typer.Option(None, "--duty", help="Gated-tone duty cycle"),
    n_calls: Optional[int] = typer.Option(None, "--n-calls", help="Call pool size"),
    n_noises: Optional[int] = typer.Option(None, "--n-noises", help="Noise pool size"),
    snr_lo: Optional[float] = typer.Option(None, "--snr-lo", help="Lowest SNR bin (dB)"),
    snr_hi: Optional[float] = typer.Option(None, "--snr-hi", help="Highest SNR bin (dB)"),
    step: Optional[float] = typer.Option(None, "--step", help="Bin spacing (dB)"),
    n_per_point: Optional[int] = typer.Option(None, "--n-per-point", help="Mixtures per bin"),
    n_boot: Optional[int] = typer.Option(None, "--n-boot", help="Bootstrap replicates (0 = none)"),
    p_lo: Optional[float] = typer.Option(None, "--p-lo", help="Lower metric level"),
    p_hi: Optional[float] = typer.Option(None, "--p-hi", help="Upper metric level"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Grid / bootstrap seed"),
):
    """Measure, fit and summarise a detector's p(snr) curve"""
    config = resolve_config(
        PsnrConfig, "psnr", _config_path(),
        dict(out=out, name=name, detector=detector, noise_kind=noise_kind, analytic=analytic,
             duty=duty, n_calls=n_calls, n_noises=n_noises, snr_lo=snr_lo, snr_hi=snr_hi,
             step=step, n_per_point=n_per_point, n_boot=n_boot, p_lo=p_lo, p_hi=p_hi, seed=seed),
    )
    scorer = load_detector(config.detector)
    console.print(Panel(f"📈 p(snr) evaluation of '{scorer.name}'", style="blue"))

    with Progress(
        SpinnerColumn(), TextColumn("[progress.description]{task.description}"), console=console
    ) as progress:
        task = progress.add_task("Building stimulus pools...", total=None)
        extra = {"detector": scorer.describe()}
        if config.analytic:
            pools = analytic_pools(config.duty)
            calls, noises, label = pools["calls"], pools["noises"], "analytic"
            extra["realized_duty"] = realized_duty(config.duty)
            if isinstance(scorer, EnergyDetector):
                extra["predicted_snr_50"] = predicted_crossing_snr(
                    scorer.threshold_db, extra["realized_duty"]
                )
        else:
            kinds = NOISE_KINDS if config.noise_kind == "all" else (config.noise_kind,)
            calls = call_pool(config.n_calls, seed=config.seed)
            noises = noise_pool(config.n_noises, kinds, seed=config.seed)
            label = config.noise_kind

        progress.update(task, description="Measuring detection rates...")
        grid = build_eval_grid(
            calls, noises, config.snr_lo, config.snr_hi, config.step, config.n_per_point,
            seed=config.seed,
        )
        curve = measure_curve(scorer, grid, n_jobs=_threads(), label=label)

        progress.update(task, description="Fitting and bootstrapping...")
        _fit_and_summarize(curve, config.n_boot, config.seed, config.p_lo, config.p_hi)
        progress.update(task, description="✅ Evaluation completed!")

    extra["grid"] = {"n_bins": grid.n_bins, "n_per_point": grid.n_per_point}
    paths = save_curve(curve, config.out, extra)
    plot_curve(curve, config.out / f"curve_{label}.svg")
    write_run_config(config.out, "psnr", config)

    _print_curve(curve)
    if "predicted_snr_50" in extra:
        console.print(f"   • closed-form snr_50: {extra['predicted_snr_50']:.2f} dB")
    console.print(f"[green]✅ Curve saved to {paths['json']}[/green]")


@app.command()
@handle_errors
def fit(
    rates: Optional[Path] = typer.Option(None, "--rates", help="Rates CSV (snr, n, detected|rate)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    label: Optional[str] = typer.Option(None, "--label", help="Curve label"),
    n_boot: Optional[int] = typer.Option(None, "--n-boot", help="Bootstrap replicates (0 = none)"),
    p_lo: Optional[float] = typer.Option(None, "--p-lo", help="Lower metric level"),
    p_hi: Optional[float] = typer.Option(None, "--p-hi", help="Upper metric level"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Bootstrap seed"),
):
    """Fit a p(snr) curve from an existing rates table"""
    config = resolve_config(
        FitConfig, "fit", _config_path(),
        dict(rates=rates, out=out, label=label, n_boot=n_boot, p_lo=p_lo, p_hi=p_hi, seed=seed),
    )
    if not config.rates.exists():
        raise DataError(f"Rates file not found: {config.rates}")
    console.print(Panel(f"📐 Fitting {config.rates.name}", style="blue"))

    curve = PsychometricCurve.from_frame(
        pd.read_csv(config.rates), label=config.label or config.rates.stem
    )
    with console.status("Fitting..."):
        _fit_and_summarize(curve, config.n_boot, config.seed, config.p_lo, config.p_hi)
    if curve.fit is None:
        raise NumericalError(f"Curve '{curve.label}' could not be fitted")

    paths = save_curve(curve, config.out)
    plot_curve(curve, config.out / f"curve_{curve.label}.svg")
    write_run_config(config.out, "fit", config)
    _print_curve(curve)
    console.print(f"[green]✅ Fit saved to {paths['json']}[/green]")


@app.command()
@handle_errors
def area(
    fits: Optional[List[Path]] = typer.Option(None, "--fit", help="Curve JSON (repeatable)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    x0: Optional[float] = typer.Option(None, "--x0", help="Explicit fit: x0"),
    k: Optional[float] = typer.Option(None, "--k", help="Explicit fit: k"),
    v: Optional[float] = typer.Option(None, "--v", help="Explicit fit: v"),
    p: Optional[List[float]] = typer.Option(None, "--p", help="Detection probability (repeatable)"),
    l1m: Optional[float] = typer.Option(None, "--l1m", help="Source level at 1 m (dB)"),
    ln: Optional[List[float]] = typer.Option(None, "--ln", help="Noise level (dB, repeatable)"),
    calibration_offset: Optional[float] = typer.Option(None, "--calibration-offset", help="dB"),
    source_level_uncertainty: Optional[float] = typer.Option(None, "--l1m-uncertainty", help="dB"),
):
    """Detection radius and area against noise level"""
    config = resolve_config(
        AreaConfig, "area", _config_path(),
        dict(fits=fits, out=out, x0=x0, k=k, v=v, p=p, l1m=l1m, ln=ln,
             calibration_offset=calibration_offset,
             source_level_uncertainty=source_level_uncertainty),
    )
    console.print(Panel("🗺️ Detection area", style="blue"))

    labeled_fits: Dict[str, LogisticFit] = {}
    if config.fits:
        for path in config.fits:
            key = curve_key(path)
            if key in labeled_fits:
                raise UsageError(
                    f"Two fits resolve to '{key}'; give the runs distinct --name values"
                )
            labeled_fits[key] = load_fit(path)
    else:
        labeled_fits["manual"] = LogisticFit(config.x0, config.k, config.v)

    tables: Dict[str, pd.DataFrame] = {}
    for label, logistic in labeled_fits.items():
        params = AreaModelParams(
            fit=logistic,
            noise_level=config.ln[0],
            source_level_1m=config.l1m,
            calibration_offset=config.calibration_offset,
            source_level_uncertainty=config.source_level_uncertainty,
        )
        per_p = [area_vs_noise_table(level, params, config.ln, label) for level in config.p]
        table = pd.concat(per_p, ignore_index=True)
        write_csv(config.out / f"area_{label}.csv", table)
        for level, frame in zip(config.p, per_p):
            tables[f"{label} p={level:g}"] = frame

        view = Table(title=f"Detection area '{label}'")
        for column in ("p", "L_n (dB)", "radius (m)", "area (km²)"):
            view.add_column(column, justify="right", style="cyan" if column == "p" else "green")
        for _, row in table.iterrows():
            view.add_row(
                f"{row['p']:g}", f"{row['noise_level']:.1f}",
                f"{row['radius_m']:,.1f}", f"{row['area_m2'] / 1e6:,.4f}",
            )
        console.print(view)

    plot_area(tables, config.out / "area.svg")
    write_run_config(config.out, "area", config)
    console.print(f"[green]✅ Area tables written to {config.out}[/green]")


@app.command()
@handle_errors
def report(
    runs: Optional[List[Path]] = typer.Argument(None, help="Run directories"),
    out: Optional[Path] = typer.Option(None, "--out", help="Markdown file"),
    title: Optional[str] = typer.Option(None, "--title", help="Report title"),
):
    """Assemble a Markdown summary of run directories"""
    config = resolve_config(
        ReportConfig, "report", _config_path(), dict(runs=runs, out=out, title=title)
    )
    if not config.runs:
        raise UsageError("No run directories given")
    path = write_report(config.runs, config.out, config.title)
    console.print(f"[green]✅ Report written to {path}[/green]")


if __name__ == "__main__":
    app()
