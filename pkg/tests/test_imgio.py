import numpy as np
import pytest

from graypixel import LinearImage
from graypixel.imgio import (
    read_image,
    read_pfm,
    read_raster,
    write_image,
    write_pfm,
    write_pseudocolor,
    write_raster,
)


@pytest.fixture
def img():
    rng = np.random.default_rng(7)
    return LinearImage(rng.uniform(0, 1, (24, 32, 3)))


class TestPngTiff:
    @pytest.mark.parametrize("suffix", [".png", ".tif", ".tiff"])
    def test_sixteen_bit_round_trip(self, tmp_path, img, suffix):
        path = tmp_path / f"img{suffix}"
        write_image(path, img)
        back = read_image(path)
        assert back.data.shape == img.data.shape
        assert np.abs(back.data - img.data).max() <= 0.5 / 65535 + 1e-12

    def test_eight_bit_read(self, tmp_path, img):
        import cv2

        path = tmp_path / "img8.png"
        q = np.rint(img.data * 255).astype(np.uint8)
        cv2.imwrite(str(path), q[:, :, ::-1])
        back = read_image(path)
        assert np.abs(back.data - img.data).max() <= 0.5 / 255 + 1e-12

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_image(tmp_path / "nope.png")

    def test_unsupported_suffix(self, tmp_path):
        path = tmp_path / "img.bmp"
        path.write_bytes(b"xx")
        with pytest.raises(IOError):
            read_image(path)
        with pytest.raises(IOError):
            write_image(tmp_path / "img.xyz", LinearImage(np.zeros((2, 2, 3))))


class TestPfm:
    def test_color_round_trip_exact_at_float32(self, tmp_path, img):
        path = tmp_path / "img.pfm"
        write_pfm(path, img.data.astype(np.float32))
        back = read_pfm(path)
        assert np.array_equal(back, img.data.astype(np.float32).astype(np.float64))

    def test_gray_round_trip(self, tmp_path):
        plane = np.arange(12, dtype=np.float32).reshape(3, 4)
        path = tmp_path / "p.pfm"
        write_pfm(path, plane)
        assert np.array_equal(read_pfm(path), plane.astype(np.float64))

    def test_row_orientation(self, tmp_path):
        arr = np.zeros((4, 5, 3), dtype=np.float32)
        arr[0, 0, 0] = 1.0
        path = tmp_path / "o.pfm"
        write_pfm(path, arr)
        assert read_pfm(path)[0, 0, 0] == 1.0

    def test_read_image_promotes_gray_pfm(self, tmp_path):
        plane = np.full((4, 4), 0.25, dtype=np.float32)
        path = tmp_path / "g.pfm"
        write_pfm(path, plane)
        img = read_image(path)
        assert img.data.shape == (4, 4, 3)
        assert np.all(img.data == 0.25)

    def test_rejects_non_pfm(self, tmp_path):
        path = tmp_path / "bad.pfm"
        path.write_bytes(b"nope")
        with pytest.raises(IOError):
            read_pfm(path)


class TestRaster:
    def test_single_plane_with_sentinel(self, tmp_path):
        plane = np.random.default_rng(1).random((6, 9))
        plane[2, 3] = np.inf
        path = tmp_path / "gi.raster"
        write_raster(path, plane)
        back = read_raster(path)
        assert back.shape == (6, 9)
        assert np.isinf(back[2, 3])
        finite = np.isfinite(plane)
        assert np.array_equal(back[finite], plane[finite].astype(np.float32))

    def test_three_planes(self, tmp_path):
        field = np.random.default_rng(2).random((5, 4, 3))
        path = tmp_path / "field.raster"
        write_raster(path, field)
        back = read_raster(path)
        assert back.shape == (5, 4, 3)
        assert np.array_equal(back, field.astype(np.float32).astype(np.float64))

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "x.raster"
        path.write_bytes(b"ABCD" + b"\0" * 12)
        with pytest.raises(IOError):
            read_raster(path)


class TestPseudocolor:
    def test_writes_decodable_png_with_black_exclusions(self, tmp_path):
        import cv2

        plane = np.linspace(0, 1, 64).reshape(8, 8)
        plane[0, 0] = np.inf
        path = tmp_path / "vis.png"
        write_pseudocolor(path, plane)
        back = cv2.imread(str(path))
        assert back is not None
        assert (back[0, 0] == 0).all()  # excluded rendered black
        assert back.max() > 0

    def test_constant_plane(self, tmp_path):
        write_pseudocolor(tmp_path / "c.png", np.full((4, 4), 2.0))
        assert (tmp_path / "c.png").exists()
