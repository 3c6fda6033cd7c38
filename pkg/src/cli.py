"""
Command-line front end: embed, extract, metrics and bench.

Exit codes: 0 success, 2 invalid arguments, 3 capacity exceeded,
4 unreadable or malformed input, 5 integrity failure at extraction.
"""
import argparse
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config.settings import (
    ALLOWED_IMAGE_EXTENSIONS,
    DEFAULT_ALPHA,
    DEFAULT_BLOCK_SIZE,
    DEFAULT_HAWKS,
    DEFAULT_LEVY_BETA,
    DEFAULT_LSB_DEPTH,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_SEED,
    DEFAULT_STAGNATION_EPSILON,
    DEFAULT_STAGNATION_WINDOW,
    DEFAULT_TOP_FRACTION,
    DEFAULT_WORKERS,
    validate_configuration,
)
from src.analytics import (
    bench_convergence_runs,
    convergence_figure,
    histogram_figure,
    summarize_bench,
    write_figure,
)
from src.audio_codec import AudioPayload, read_wav_file, write_wav_file
from src.errors import InputError, StegoHawkError
from src.image_store import RasterImage, read_image_file, write_image_file
from src.logger_config import ProjectLogger, get_logger
from src.optimizer_core import OptimizationResult
from src.quality_metrics import QualityReport, quality_report
from src.stego_engine import (
    PipelineSettings,
    read_key_file,
    run_embedding,
    run_extraction,
    write_key_file,
)

logger = get_logger("cli")

EXIT_OK = 0
EXIT_INVALID_ARGUMENTS = 2
BENCH_COLUMNS = [
    "cover", "optimizer", "seed", "iterations_run", "evaluations",
    "best_fitness", "psnr", "ssim", "elapsed_ms",
]


class RunConfig(BaseModel):
    """Validated command-line configuration shared by all subcommands."""

    model_config = ConfigDict(extra='forbid')

    optimizer: Literal["hho", "random"] = "hho"
    alpha: float = Field(default=DEFAULT_ALPHA, ge=0.0, le=1.0)
    hawks: int = Field(default=DEFAULT_HAWKS, ge=2)
    max_iterations: int = Field(default=DEFAULT_MAX_ITERATIONS, ge=1)
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    lsb_depth: int = DEFAULT_LSB_DEPTH
    block_size: int = Field(default=DEFAULT_BLOCK_SIZE, ge=1)
    variance_top_fraction: float = Field(default=DEFAULT_TOP_FRACTION, gt=0.0, le=1.0)
    stagnation_window: Optional[int] = Field(default=DEFAULT_STAGNATION_WINDOW, ge=1)
    stagnation_epsilon: float = Field(default=DEFAULT_STAGNATION_EPSILON, ge=0.0)
    levy_beta: float = Field(default=DEFAULT_LEVY_BETA, gt=1.0, le=2.0)
    workers: int = Field(default=DEFAULT_WORKERS, ge=1)
    max_evaluations: Optional[int] = Field(default=None, ge=1)

    cover_path: Optional[Path] = None
    audio_path: Optional[Path] = None
    stego_path: Optional[Path] = None
    key_path: Optional[Path] = None
    report_path: Optional[Path] = None
    output_path: Optional[Path] = None
    report_format: Literal["json", "csv"] = "json"

    @field_validator("lsb_depth")
    @classmethod
    def validate_lsb_depth(cls, v: int) -> int:
        if v not in (1, 2):
            raise ValueError(f"lsb_depth must be 1 or 2, got {v}")
        return v

    def pipeline_settings(self) -> PipelineSettings:
        return PipelineSettings(
            optimizer=self.optimizer,
            alpha=self.alpha,
            hawks=self.hawks,
            max_iterations=self.max_iterations,
            seed=self.seed,
            lsb_depth=self.lsb_depth,
            block_size=self.block_size,
            variance_top_fraction=self.variance_top_fraction,
            stagnation_window=self.stagnation_window,
            stagnation_epsilon=self.stagnation_epsilon,
            levy_beta=self.levy_beta,
            workers=self.workers,
            max_evaluations=self.max_evaluations,
        )


def _report_text(report, fmt: str) -> str:
    if fmt == "csv":
        return f"{report.csv_header()}\n{report.to_csv_row()}\n"
    return report.to_json() + "\n"


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: cannot write file: {e.strerror or e}") from e


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_embed(config: RunConfig) -> int:
    """Hide the audio file in the cover; write stego PNG, key and report."""
    stego_path = config.stego_path
    key_path = config.key_path or stego_path.with_suffix(".key")
    report_path = config.report_path or stego_path.with_suffix(f".{config.report_format}")

    cover = read_image_file(config.cover_path)
    audio = read_wav_file(config.audio_path)
    outcome = run_embedding(cover, audio, config.pipeline_settings())

    write_image_file(stego_path, outcome.stego)
    write_key_file(key_path, outcome.key)
    _write_text(report_path, _report_text(outcome.report, config.report_format))

    print(outcome.report.quality.summary_line())
    logger.info(f"Embed complete: stego={stego_path} key={key_path} report={report_path}")
    return EXIT_OK


def cmd_extract(config: RunConfig) -> int:
    stego = read_image_file(config.stego_path)
    key = read_key_file(config.key_path)
    audio = run_extraction(stego, key)
    write_wav_file(config.output_path, audio)
    print(
        f"Recovered {len(audio.data)} bytes: {audio.sample_rate} Hz, "
        f"{audio.channels} ch, {audio.bits_per_sample}-bit -> {config.output_path}"
    )
    return EXIT_OK


def cmd_metrics(
    cover_path: Path,
    stego_path: Path,
    fmt: str = "json",
    output_path: Optional[Path] = None,
    histogram_plot: Optional[Path] = None,
) -> int:
    """Print (or write) the cover-vs-stego QualityReport."""
    cover = read_image_file(cover_path)
    stego = read_image_file(stego_path)
    report: QualityReport = quality_report(cover, stego)
    text = _report_text(report, fmt)

    if output_path is not None:
        _write_text(output_path, text)
    sys.stdout.write(text)

    if histogram_plot is not None:
        write_figure(histogram_figure(cover, stego), histogram_plot)
    return EXIT_OK


def discover_covers(covers_dir: Path) -> List[Path]:
    """Lossless cover images in a directory, sorted by name."""
    if not covers_dir.is_dir():
        raise InputError(f"{covers_dir}: covers directory does not exist")
    covers = sorted(
        path for path in covers_dir.iterdir()
        if path.is_file() and path.suffix.lower() in ALLOWED_IMAGE_EXTENSIONS
    )
    if not covers:
        raise InputError(f"{covers_dir}: no PNG or BMP cover images found")
    return covers


def _bench_job(
    cover_name: str,
    cover: RasterImage,
    audio: AudioPayload,
    base: PipelineSettings,
    seed: int,
    optimizers: Sequence[str],
) -> List[Tuple[dict, OptimizationResult]]:
    """One (cover, seed) pair: HHO first, then random search at HHO's evaluation budget."""
    rows = []
    hho_evaluations = None
    for name in sorted(optimizers, key=lambda n: n != "hho"):
        settings = base.model_copy(update={"optimizer": name, "seed": seed})
        if name == "random" and hho_evaluations is not None:
            settings = settings.model_copy(update={
                "max_evaluations": hho_evaluations,
                "max_iterations": math.ceil(hho_evaluations / settings.hawks),
                "stagnation_window": None,
            })

        started = time.perf_counter()
        outcome = run_embedding(cover, audio, settings)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        result = outcome.report.optimization
        if name == "hho":
            hho_evaluations = result.evaluations

        rows.append(({
            "cover": cover_name,
            "optimizer": name,
            "seed": seed,
            "iterations_run": result.iterations_run,
            "evaluations": result.evaluations,
            "best_fitness": result.best_fitness,
            "psnr": outcome.report.psnr,
            "ssim": outcome.report.ssim,
            "elapsed_ms": round(elapsed_ms, 1),
        }, result))
        logger.info(
            f"bench {cover_name} seed={seed} {name}: fitness={result.best_fitness:.6f} "
            f"iterations={result.iterations_run} evaluations={result.evaluations}"
        )
    return rows


def cmd_bench(
    config: RunConfig,
    covers_dir: Path,
    audio_path: Path,
    seeds: Sequence[int],
    optimizers: Sequence[str] = ("hho", "random"),
    jobs: int = 1,
    convergence_plot: Optional[Path] = None,
) -> int:
    """Run every optimizer x cover x seed and write one CSV row per run."""
    cover_paths = discover_covers(covers_dir)
    covers: Dict[str, RasterImage] = {path.name: read_image_file(path) for path in cover_paths}
    audio = read_wav_file(audio_path)
    base = config.pipeline_settings()

    pairs = [(name, seed) for name in sorted(covers) for seed in seeds]
    logger.info(f"bench: {len(covers)} covers x {len(seeds)} seeds x {len(optimizers)} optimizers, jobs={jobs}")

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [
            pool.submit(_bench_job, name, covers[name], audio, base, seed, optimizers)
            for name, seed in pairs
        ]
        job_rows = [future.result() for future in futures]

    records = [record for rows in job_rows for record, _ in rows]
    frame = pd.DataFrame(records, columns=BENCH_COLUMNS)
    frame = frame.sort_values(["cover", "optimizer", "seed"], kind="mergesort").reset_index(drop=True)

    output_path = config.output_path or Path("bench.csv")
    try:
        frame.to_csv(output_path, index=False, lineterminator="\n")
    except OSError as e:
        raise InputError(f"{output_path}: cannot write bench CSV: {e.strerror or e}") from e

    summary = summarize_bench(frame)
    print(f"Median over {len(pairs)} (cover, seed) pairs:")
    print(summary.to_string(index=False))

    if convergence_plot is not None:
        results = {
            (record["cover"], record["optimizer"], record["seed"]): result
            for rows in job_rows for record, result in rows
        }
        write_figure(convergence_figure(bench_convergence_runs(results)), convergence_plot)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="console log verbosity (default: WARNING)")


def _add_optimizer_flags(parser: argparse.ArgumentParser, with_seed: bool = True) -> None:
    group = parser.add_argument_group("optimization")
    group.add_argument("--optimizer", choices=["hho", "random"], default="hho")
    group.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                       help="SSIM weight in the fitness (default: %(default)s)")
    group.add_argument("--hawks", type=int, default=DEFAULT_HAWKS)
    group.add_argument("--iterations", dest="max_iterations", type=int, default=DEFAULT_MAX_ITERATIONS)
    if with_seed:
        group.add_argument("--seed", type=int, default=DEFAULT_SEED,
                           help="RNG seed (default: %(default)s, env STEGO_HAWK_SEED)")
    group.add_argument("--lsb-depth", type=int, default=DEFAULT_LSB_DEPTH, help="bits per slot, 1 or 2")
    group.add_argument("--block-size", type=int, default=DEFAULT_BLOCK_SIZE)
    group.add_argument("--top-fraction", dest="variance_top_fraction", type=float, default=DEFAULT_TOP_FRACTION,
                       help="share of highest-variance blocks used as candidates")
    group.add_argument("--stagnation-window", type=int, default=DEFAULT_STAGNATION_WINDOW)
    group.add_argument("--stagnation-epsilon", type=float, default=DEFAULT_STAGNATION_EPSILON)
    group.add_argument("--no-stagnation", action="store_true", help="run all iterations")
    group.add_argument("--levy-beta", type=float, default=DEFAULT_LEVY_BETA)
    group.add_argument("--workers", type=int, default=DEFAULT_WORKERS,
                       help="threads evaluating candidates in parallel")
    group.add_argument("--max-evaluations", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stego_hawk",
        description="Hide WAV audio in PNG/BMP images with HHO-optimized LSB placement.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    embed = subparsers.add_parser("embed", help="hide audio in a cover image")
    embed.add_argument("--cover", required=True, type=Path, help="cover image (PNG or BMP)")
    embed.add_argument("--audio", required=True, type=Path, help="PCM WAV to hide")
    embed.add_argument("--stego", required=True, type=Path, help="output stego PNG")
    embed.add_argument("--key", type=Path, help="output key file (default: <stego>.key)")
    embed.add_argument("--report", type=Path, help="output report (default: <stego>.json or .csv)")
    embed.add_argument("--report-format", choices=["json", "csv"], default="json")
    _add_optimizer_flags(embed)
    _add_common(embed)

    extract = subparsers.add_parser("extract", help="recover audio from a stego image")
    extract.add_argument("--stego", required=True, type=Path)
    extract.add_argument("--key", required=True, type=Path)
    extract.add_argument("--output", required=True, type=Path, help="recovered WAV path")
    _add_common(extract)

    metrics = subparsers.add_parser("metrics", help="compare a cover and a stego image")
    metrics.add_argument("--cover", required=True, type=Path)
    metrics.add_argument("--stego", required=True, type=Path)
    metrics.add_argument("--format", choices=["json", "csv"], default="json")
    metrics.add_argument("--output", type=Path, help="also write the report here")
    metrics.add_argument("--histogram-plot", type=Path, help="write an HTML histogram comparison")
    _add_common(metrics)

    bench = subparsers.add_parser("bench", help="compare optimizers over a cover corpus")
    bench.add_argument("--covers", required=True, type=Path, help="directory of PNG/BMP covers")
    bench.add_argument("--audio", required=True, type=Path)
    bench.add_argument("--seeds", required=True, type=int, nargs="+")
    bench.add_argument("--optimizers", nargs="+", choices=["hho", "random"], default=["hho", "random"])
    bench.add_argument("--jobs", type=int, default=1, help="parallel (cover, seed) jobs")
    bench.add_argument("--output", type=Path, default=Path("bench.csv"))
    bench.add_argument("--convergence-plot", type=Path, help="write an HTML convergence plot")
    _add_optimizer_flags(bench, with_seed=False)
    _add_common(bench)

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = {}
    for name in (
        "optimizer", "alpha", "hawks", "max_iterations", "seed", "lsb_depth", "block_size",
        "variance_top_fraction", "stagnation_window", "stagnation_epsilon", "levy_beta",
        "workers", "max_evaluations",
    ):
        if hasattr(args, name):
            fields[name] = getattr(args, name)
    if getattr(args, "no_stagnation", False):
        fields["stagnation_window"] = None

    paths = {
        "cover_path": getattr(args, "cover", None),
        "audio_path": getattr(args, "audio", None),
        "stego_path": getattr(args, "stego", None),
        "key_path": getattr(args, "key", None),
        "report_path": getattr(args, "report", None),
        "output_path": getattr(args, "output", None),
    }
    fields.update({name: value for name, value in paths.items() if value is not None})
    if getattr(args, "report_format", None):
        fields["report_format"] = args.report_format
    return RunConfig(**fields)


def _dispatch(args: argparse.Namespace) -> int:
    config = _run_config(args)
    if args.command == "embed":
        return cmd_embed(config)
    if args.command == "extract":
        return cmd_extract(config)
    if args.command == "metrics":
        return cmd_metrics(args.cover, args.stego, args.format, args.output, args.histogram_plot)
    if args.command == "bench":
        if args.jobs < 1:
            raise ValueError(f"--jobs must be >= 1, got {args.jobs}")
        return cmd_bench(
            config, args.covers, args.audio, args.seeds,
            optimizers=args.optimizers, jobs=args.jobs, convergence_plot=args.convergence_plot,
        )
    raise ValueError(f"unknown command {args.command}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the command and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 for --help and 2 for usage errors
        return int(e.code or 0)

    ProjectLogger.set_console_level(args.log_level)
    config_status = validate_configuration()
    for warning in config_status["warnings"]:
        logger.warning(warning)
    if not config_status["valid"]:
        for error in config_status["errors"]:
            print(f"error: {error}", file=sys.stderr)
        return EXIT_INVALID_ARGUMENTS

    try:
        return _dispatch(args)
    except StegoHawkError as e:
        print(f"error: {e}", file=sys.stderr)
        logger.debug(f"{type(e).__name__} (exit {e.exit_code})", exc_info=True)
        return e.exit_code
    except ValidationError as e:
        details = "; ".join(
            f"{'.'.join(str(p) for p in err['loc'])}: {err['msg']}" for err in e.errors()
        )
        print(f"error: invalid arguments: {details}", file=sys.stderr)
        return EXIT_INVALID_ARGUMENTS
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_ARGUMENTS


if __name__ == "__main__":
    sys.exit(main())
