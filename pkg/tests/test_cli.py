import numpy as np
import pytest

from graypixel import LinearImage, SceneConfig, render_config
from graypixel.cli import main
from graypixel.imgio import read_image, read_raster, write_image


@pytest.fixture
def gray_png(tmp_path):
    cfg = SceneConfig(kind="gray-shading", width=96, height=96, seed=1,
                      illuminant=(0.3, 0.6, 0.74))
    img, _ = render_config(cfg)
    path = tmp_path / "scene.png"
    write_image(path, img)
    return path


@pytest.fixture
def flat_png(tmp_path):
    path = tmp_path / "flat.png"
    write_image(path, LinearImage(np.full((32, 32, 3), 0.5)))
    return path


class TestGiCommand:
    def test_happy_path(self, tmp_path, gray_png, capsys):
        prefix = tmp_path / "out"
        code = main(["gi", str(gray_png), "--epsilon", "1e-4",
                     "--top-percent", "0.1", "--out-prefix", str(prefix)])
        assert code == 0
        assert (tmp_path / "out.raster").exists()
        assert (tmp_path / "out.png").exists()
        gi = read_raster(tmp_path / "out.raster")
        assert gi.shape == (96, 96)
        assert np.isfinite(gi).sum() > 0

    def test_uniform_image_exits_4(self, flat_png):
        assert main(["gi", str(flat_png)]) == 4

    def test_missing_file_exits_3(self, tmp_path):
        assert main(["gi", str(tmp_path / "nope.png")]) == 3


class TestEstimateCommand:
    def test_global_prints_csv_row(self, gray_png, capsys):
        assert main(["estimate", str(gray_png)]) == 0
        out = capsys.readouterr().out.strip()
        stem, r, g, b = out.split(",")
        assert stem == "scene"
        est = np.array([float(r), float(g), float(b)])
        gt = np.array([0.3, 0.6, 0.74])
        gt = gt / np.linalg.norm(gt)
        deg = np.degrees(np.arccos(np.clip(est @ gt, -1, 1)))
        assert deg < 0.5

    def test_multi_deterministic_bytes(self, tmp_path, gray_png):
        p1, p2 = tmp_path / "a", tmp_path / "b"
        for prefix in (p1, p2):
            code = main(["estimate", str(gray_png), "--multi", "2", "--seed", "7",
                         "--out-prefix", str(prefix)])
            assert code == 0
        assert (tmp_path / "a.raster").read_bytes() == (tmp_path / "b.raster").read_bytes()

    def test_multi_zero_rejected(self, gray_png):
        assert main(["estimate", str(gray_png), "--multi", "0"]) == 2

    def test_correct_output(self, tmp_path, gray_png):
        out = tmp_path / "corr.png"
        assert main(["estimate", str(gray_png), "--correct", str(out)]) == 0
        corrected = read_image(out)
        chroma = corrected.data / np.linalg.norm(corrected.data, axis=2, keepdims=True)
        assert np.abs(chroma - 1 / np.sqrt(3)).max() < 0.01


class TestCorrectCommand:
    def test_neutral_is_identity_up_to_quantization(self, tmp_path, gray_png):
        out = tmp_path / "same.png"
        code = main(["correct", str(gray_png), "--illuminant", "1", "1", "1",
                     "--out", str(out)])
        assert code == 0
        a = read_image(gray_png)
        b = read_image(out)
        assert np.abs(a.data - b.data).max() <= 1.0 / 65535 + 1e-12


class TestSynthCommand:
    def test_two_illum_materializes_everything(self, tmp_path):
        out = tmp_path / "d"
        code = main(["synth", "--preset", "two-illum", "--seed", "3",
                     "--count", "2", "--width", "128", "--height", "64",
                     "--out", str(out)])
        assert code == 0
        assert (out / "manifest.csv").exists()
        for i in range(2):
            assert (out / f"scene_{i:03d}.pfm").exists()
            assert (out / f"scene_{i:03d}.txt").exists()
            assert (out / f"scene_{i:03d}_field.raster").exists()

    def test_deterministic_given_seed(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            main(["synth", "--preset", "single", "--seed", "5", "--count", "1",
                  "--width", "64", "--height", "64", "--out", str(out)])
        assert (a / "scene_000.pfm").read_bytes() == (b / "scene_000.pfm").read_bytes()
        assert (a / "manifest.csv").read_bytes() == (b / "manifest.csv").read_bytes()


class TestBenchmarkCommand:
    @pytest.fixture
    def manifest(self, tmp_path):
        out = tmp_path / "data"
        main(["synth", "--preset", "single", "--seed", "2", "--count", "3",
              "--width", "96", "--height", "96", "--out", str(out)])
        return out / "manifest.csv"

    def test_assert_mean_below_passes(self, tmp_path, manifest, capsys):
        code = main(["benchmark", str(manifest), "--method", "gi",
                     "--out-dir", str(tmp_path / "res"),
                     "--assert-mean-below", "0.5"])
        assert code == 0
        out = capsys.readouterr().out
        assert "overall.mean=" in out
        assert (tmp_path / "res" / "gi_per_image.csv").exists()

    def test_assert_mean_below_fails(self, tmp_path, manifest):
        code = main(["benchmark", str(manifest), "--method", "gray-world",
                     "--out-dir", str(tmp_path / "res2"),
                     "--assert-mean-below", "1e-9"])
        assert code == 5

    def test_unknown_method_is_usage_error(self, manifest):
        with pytest.raises(SystemExit) as exc:
            main(["benchmark", str(manifest), "--method", "nope"])
        assert exc.value.code == 2

    def test_jobs_byte_identical_outputs(self, tmp_path, manifest):
        for jobs, name in (("1", "j1"), ("8", "j8")):
            code = main(["benchmark", str(manifest), "--method", "gi",
                         "--jobs", jobs, "--out-dir", str(tmp_path / name)])
            assert code == 0
        a = (tmp_path / "j1" / "gi_per_image.csv").read_bytes()
        b = (tmp_path / "j8" / "gi_per_image.csv").read_bytes()
        assert a == b

    def test_missing_manifest_exits_3(self, tmp_path):
        assert main(["benchmark", str(tmp_path / "none.csv")]) == 3


class TestBoxevalCommand:
    def test_runs_on_boxshrink_manifest(self, tmp_path, capsys):
        out = tmp_path / "data"
        main(["synth", "--preset", "boxshrink-single", "--seed", "4",
              "--count", "2", "--width", "512", "--height", "512",
              "--out", str(out)])
        code = main(["boxeval", str(out / "manifest.csv"), "--method", "gi",
                     "--top-percent", "100", "--out", str(tmp_path / "box.txt")])
        assert code == 0
        text = (tmp_path / "box.txt").read_text()
        for label in "ABCDE":
            assert f"single.{label}.mean=" in text


class TestRuntimeCommand:
    def test_reports_seconds(self, capsys):
        code = main(["runtime", "--method", "gray-world",
                     "--width", "128", "--height", "96"])
        assert code == 0
        out = capsys.readouterr().out.strip()
        method, size, seconds = out.split(",")
        assert method == "gray-world" and size == "128x96"
        assert float(seconds) > 0


def test_help_documents_paper_defaults(capsys):
    for cmd in ("gi", "estimate"):
        with pytest.raises(SystemExit):
            main([cmd, "--help"])
        text = capsys.readouterr().out
        assert "1e-4" in text  # contrast threshold
        assert "0.1" in text   # gray-pixel percentage
