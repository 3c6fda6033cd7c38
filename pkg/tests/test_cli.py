"""
End-to-end tests of the stego_hawk command line: embed, extract, metrics, bench
"""
import io
import json

import numpy as np
import pandas as pd
import pytest
from PIL import Image

from src.audio_codec import write_wav
from src.cli import BENCH_COLUMNS, build_parser, main
from src.image_store import RasterImage, load_image, read_image_file, save_image, write_image_file
from src.stego_engine import read_key_file
from tests.helpers import encode, make_audio, noise_cover

FAST_FLAGS = ["--hawks", "6", "--iterations", "8", "--no-stagnation"]


def embed_args(cover, audio, stego, *extra):
    return ["embed", "--cover", str(cover), "--audio", str(audio), "--stego", str(stego),
            "--seed", "11", *FAST_FLAGS, *extra]


@pytest.fixture
def embedded(tmp_path, cover_file, audio_file, capsys):
    stego = tmp_path / "stego.png"
    assert main(embed_args(cover_file, audio_file, stego)) == 0
    capsys.readouterr()
    return stego


# ---------------------------------------------------------------------------
# embed
# ---------------------------------------------------------------------------

def test_embed_writes_stego_key_and_report(embedded, capsys):
    assert embedded.exists()
    assert embedded.with_suffix(".key").exists()
    report = json.loads(embedded.with_suffix(".json").read_text())
    assert report["quality"]["psnr"] == "inf" or report["quality"]["psnr"] > 40
    assert report["settings"]["seed"] == 11
    assert report["settings"]["stagnation_window"] is None


def test_embed_prints_summary(tmp_path, cover_file, audio_file, capsys):
    assert main(embed_args(cover_file, audio_file, tmp_path / "out.png")) == 0
    assert "PSNR=" in capsys.readouterr().out


def test_embed_rerun_is_byte_identical(tmp_path, cover_file, audio_file, embedded):
    again = tmp_path / "again.png"
    assert main(embed_args(cover_file, audio_file, again)) == 0
    assert again.read_bytes() == embedded.read_bytes()
    assert again.with_suffix(".key").read_bytes() == embedded.with_suffix(".key").read_bytes()


def test_embed_csv_report_and_explicit_paths(tmp_path, cover_file, audio_file):
    key = tmp_path / "secret.bin"
    report = tmp_path / "run.csv"
    args = embed_args(cover_file, audio_file, tmp_path / "s.png",
                      "--key", str(key), "--report", str(report), "--report-format", "csv")
    assert main(args) == 0
    assert key.exists()
    header, row = report.read_text().splitlines()
    assert header.startswith("mse,psnr,ssim")
    assert len(row.split(",")) == len(header.split(","))


def test_embed_oversized_audio_exits_3(tmp_path, cover_file, capsys):
    big = tmp_path / "big.wav"
    big.write_bytes(write_wav(make_audio(4000)))
    assert main(embed_args(cover_file, big, tmp_path / "s.png")) == 3
    err = capsys.readouterr().err
    assert "needs" in err and "available" in err
    assert not (tmp_path / "s.png").exists()


def test_embed_missing_cover_exits_4(tmp_path, audio_file):
    assert main(embed_args(tmp_path / "nope.png", audio_file, tmp_path / "s.png")) == 4


def test_embed_jpeg_cover_exits_4(tmp_path, audio_file):
    jpeg = tmp_path / "cover.jpg"
    jpeg.write_bytes(encode(noise_cover(32, 32), "JPEG", quality=95))
    assert main(embed_args(jpeg, audio_file, tmp_path / "s.png")) == 4


@pytest.mark.parametrize("extra", [
    ["--lsb-depth", "3"],
    ["--alpha", "1.5"],
    ["--hawks", "1"],
    ["--levy-beta", "1.0"],
    ["--optimizer", "pso"],
])
def test_embed_invalid_arguments_exit_2(tmp_path, cover_file, audio_file, extra):
    assert main(embed_args(cover_file, audio_file, tmp_path / "s.png", *extra)) == 2


def test_missing_subcommand_exits_2():
    assert main([]) == 2


# ---------------------------------------------------------------------------
# extract
# ---------------------------------------------------------------------------

def test_extract_round_trip(tmp_path, embedded, small_audio, capsys):
    output = tmp_path / "recovered.wav"
    code = main(["extract", "--stego", str(embedded), "--key", str(embedded.with_suffix(".key")),
                 "--output", str(output)])
    assert code == 0
    assert output.read_bytes() == write_wav(small_audio)
    assert "Recovered" in capsys.readouterr().out


def test_extract_with_foreign_key_exits_5(tmp_path, cover_file, embedded):
    other_audio = tmp_path / "other.wav"
    other_audio.write_bytes(write_wav(make_audio(12, seed=99)))
    other = tmp_path / "other.png"
    assert main(embed_args(cover_file, other_audio, other, "--seed", "77")) == 0

    code = main(["extract", "--stego", str(embedded), "--key", str(other.with_suffix(".key")),
                 "--output", str(tmp_path / "x.wav")])
    assert code == 5
    assert not (tmp_path / "x.wav").exists()


def test_extract_from_perturbed_stego_exits_5(tmp_path, embedded):
    key = read_key_file(embedded.with_suffix(".key"))
    stego = read_image_file(embedded)
    flat = key.plan.flat_indices
    damaged = stego.with_values(flat, stego.flat_values()[flat] ^ 1)
    damaged_path = tmp_path / "damaged.png"
    write_image_file(damaged_path, damaged)

    code = main(["extract", "--stego", str(damaged_path), "--key", str(embedded.with_suffix(".key")),
                 "--output", str(tmp_path / "x.wav")])
    assert code == 5


def test_extract_after_jpeg_recompression_exits_5(tmp_path, embedded):
    """q=95 JPEG round trip, then saved back to PNG at the original size"""
    jpeg = encode(read_image_file(embedded), "JPEG", quality=95)
    with Image.open(io.BytesIO(jpeg)) as decoded:
        recompressed = RasterImage(np.asarray(decoded.convert("RGB")))
    recompressed_path = tmp_path / "recompressed.png"
    write_image_file(recompressed_path, recompressed)

    code = main(["extract", "--stego", str(recompressed_path), "--key", str(embedded.with_suffix(".key")),
                 "--output", str(tmp_path / "x.wav")])
    assert code == 5
    assert not (tmp_path / "x.wav").exists()


def test_extract_with_resized_stego_exits_5(tmp_path, embedded):
    wrong = tmp_path / "wrong.png"
    wrong.write_bytes(save_image(noise_cover(40, 32)))
    code = main(["extract", "--stego", str(wrong), "--key", str(embedded.with_suffix(".key")),
                 "--output", str(tmp_path / "x.wav")])
    assert code == 5


def test_extract_with_corrupt_key_file(tmp_path, embedded):
    key_path = embedded.with_suffix(".key")
    raw = bytearray(key_path.read_bytes())
    raw[-1] ^= 0xFF
    key_path.write_bytes(bytes(raw))
    code = main(["extract", "--stego", str(embedded), "--key", str(key_path), "--output", str(tmp_path / "x.wav")])
    assert code == 5

    key_path.write_bytes(b"garbage")
    code = main(["extract", "--stego", str(embedded), "--key", str(key_path), "--output", str(tmp_path / "x.wav")])
    assert code == 4


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def test_metrics_self_comparison(cover_file, capsys):
    assert main(["metrics", "--cover", str(cover_file), "--stego", str(cover_file)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["psnr"] == "inf"
    assert report["mse"] == 0.0
    assert report["ssim"] == pytest.approx(1.0)


def test_metrics_csv_output_and_plot(tmp_path, cover_file, embedded, capsys):
    output = tmp_path / "metrics.csv"
    plot = tmp_path / "hist.html"
    code = main(["metrics", "--cover", str(cover_file), "--stego", str(embedded), "--format", "csv",
                 "--output", str(output), "--histogram-plot", str(plot)])
    assert code == 0
    assert output.read_text() == capsys.readouterr().out
    assert "plotly" in plot.read_text().lower()


def test_metrics_mismatched_dimensions_exit_2(tmp_path, cover_file):
    other = tmp_path / "other.png"
    other.write_bytes(save_image(noise_cover(16, 16)))
    assert main(["metrics", "--cover", str(cover_file), "--stego", str(other)]) == 2


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

@pytest.fixture
def covers_dir(tmp_path):
    directory = tmp_path / "covers"
    directory.mkdir()
    for i in range(2):
        (directory / f"cover_{i}.png").write_bytes(save_image(noise_cover(32, 32, seed=i)))
    (directory / "notes.txt").write_text("not an image")
    return directory


def test_bench_writes_one_row_per_run(tmp_path, covers_dir, audio_file, capsys):
    output = tmp_path / "bench.csv"
    plot = tmp_path / "convergence.html"
    code = main(["bench", "--covers", str(covers_dir), "--audio", str(audio_file), "--seeds", "1", "2",
                 "--jobs", "2", "--output", str(output), "--convergence-plot", str(plot), *FAST_FLAGS])
    assert code == 0

    frame = pd.read_csv(output)
    assert list(frame.columns) == BENCH_COLUMNS
    assert len(frame) == 2 * 2 * 2
    assert frame["cover"].tolist() == sorted(frame["cover"].tolist())

    # random search always gets exactly HHO's evaluation count
    paired = frame.pivot_table(index=["cover", "seed"], columns="optimizer", values="evaluations")
    assert np.array_equal(paired["hho"].to_numpy(), paired["random"].to_numpy())

    assert "Median" in capsys.readouterr().out
    assert plot.exists()


def test_bench_is_deterministic_across_job_counts(tmp_path, covers_dir, audio_file):
    outputs = []
    for jobs in ("1", "3"):
        output = tmp_path / f"bench_{jobs}.csv"
        assert main(["bench", "--covers", str(covers_dir), "--audio", str(audio_file), "--seeds", "5",
                     "--jobs", jobs, "--output", str(output), *FAST_FLAGS]) == 0
        outputs.append(pd.read_csv(output).drop(columns=["elapsed_ms"]))
    pd.testing.assert_frame_equal(outputs[0], outputs[1])


def test_bench_single_optimizer(tmp_path, covers_dir, audio_file):
    output = tmp_path / "bench.csv"
    assert main(["bench", "--covers", str(covers_dir), "--audio", str(audio_file), "--seeds", "1",
                 "--optimizers", "random", "--output", str(output), *FAST_FLAGS]) == 0
    assert set(pd.read_csv(output)["optimizer"]) == {"random"}


def test_bench_empty_directory_exits_4(tmp_path, audio_file):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert main(["bench", "--covers", str(empty), "--audio", str(audio_file), "--seeds", "1"]) == 4
    assert main(["bench", "--covers", str(tmp_path / "missing"), "--audio", str(audio_file), "--seeds", "1"]) == 4


def test_bench_requires_seeds(covers_dir, audio_file):
    assert main(["bench", "--covers", str(covers_dir), "--audio", str(audio_file)]) == 2


def test_bench_rejects_zero_jobs(tmp_path, covers_dir, audio_file):
    code = main(["bench", "--covers", str(covers_dir), "--audio", str(audio_file), "--seeds", "1",
                 "--jobs", "0", "--output", str(tmp_path / "b.csv")])
    assert code == 2


def test_parser_has_all_subcommands():
    parser = build_parser()
    for command in ("embed", "extract", "metrics", "bench"):
        with pytest.raises(SystemExit) as excinfo:
            parser.parse_args([command, "--help"])
        assert excinfo.value.code == 0


def test_stego_image_decodes_as_png(embedded):
    assert load_image(embedded.read_bytes()).dims == (32, 32)
