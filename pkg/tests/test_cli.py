import subprocess
import sys

import numpy as np
import pytest

from quatpr.cli import EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, main
from quatpr.harness import read_ppm, write_ppm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sweep_to_stdout(capsys):
    code, out, _ = run(capsys, "sweep", "--d", "6", "--ratios", "4,12", "--trials", "2", "--iters", "300", "--threads", "1")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "ratio,n,successes,trials,rate,mean_final_error,mean_wall_ms"
    assert [line.split(",")[1] for line in lines[1:]] == ["24", "72"]


def test_sweep_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        args = ["sweep", "--algo", "pqwf", "--d", "5", "--ratios", "6:2:10", "--trials", "2"]
        assert run(capsys, *args, "--iters", "50", "--threads", "1", "--no-timing", "--out", str(p))[0] == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert b"\r" not in paths[0].read_bytes()


@pytest.mark.parametrize("model", ["mono", "concat"])
def test_sweep_real_models(capsys, model):
    code, out, _ = run(capsys, "sweep", "--algo", "taf", "--model", model, "--d", "4", "--ratios", "30", "--trials", "1")
    assert code == 0 and out.splitlines()[1].split(",")[4] == "1.0000"


@pytest.mark.parametrize(
    "argv",
    [
        ["sweep", "--tp", "0"],
        ["sweep", "--ratios", "5:1:3"],
        ["sweep", "--algo", "wf"],
        ["sweep", "--model", "mono", "--algo", "qwf"],
        ["trace", "--algo", "taf"],
        ["trace", "--ratios", "abc"],
        ["image", "/nonexistent.ppm"],
    ],
)
def test_config_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_CONFIG


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--algo", "nope"])
    assert info.value.code == 2


def test_trace_and_divergence(capsys):
    code, out, _ = run(capsys, "trace", "--d", "8", "--ratios", "10", "--iters", "30")
    assert code == 0 and len(out.splitlines()) == 32
    code, _, err = run(capsys, "trace", "--d", "8", "--eta1", "50", "--iters", "100")
    assert code == EXIT_DIVERGED and "diverged" in err


def test_trace_no_timing_is_stable(capsys):
    args = ["trace", "--algo", "pqtaf", "--d", "6", "--iters", "10", "--no-timing"]
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b and a.splitlines()[1].endswith(",")


def test_image_exact(tmp_path, capsys):
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, (16, 32, 3), dtype=np.uint8)
    src, dst, csv_path = tmp_path / "in.ppm", tmp_path / "out.ppm", tmp_path / "blocks.csv"
    write_ppm(src, img)
    code, _, err = run(capsys, "image", str(src), "--algo", "exact", "--output", str(dst), "--out", str(csv_path))
    assert code == 0
    assert "psnr=inf" in err
    np.testing.assert_array_equal(read_ppm(dst), img)
    assert len(csv_path.read_text().splitlines()) == 3


def test_image_bad_size(tmp_path, capsys):
    src = tmp_path / "in.ppm"
    write_ppm(src, np.zeros((10, 16, 3), np.uint8))
    code, _, err = run(capsys, "image", str(src))
    assert code == EXIT_CONFIG and "divisible" in err


def test_moments_and_selftest(capsys):
    code, out, _ = run(capsys, "moments", "--samples", "20000")
    assert code == 0 and out.startswith("check,z_max,passed")
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and out.count("PASS") == 4


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "quatpr", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("sweep", "trace", "image", "moments", "selftest"):
        assert cmd in res.stdout
