# tests/infrastructure/test_raster_store.py
import numpy as np
import pytest
from PIL import Image

from common.errors import RasterFormatError
from domain.entities.edge_field import EdgeDistField, EdgeMap
from infrastructure.raster_store import read_pfm, read_pgm, write_pfm, write_pgm


class TestPfm:
    def test_round_trip_is_lossless(self, tmp_path, rng):
        grid = rng.normal(0, 100, size=(5, 7, 1)).astype(np.float32)
        write_pfm(tmp_path / "a.pfm", grid)
        np.testing.assert_array_equal(read_pfm(tmp_path / "a.pfm"), grid)

    def test_header_and_row_order(self, tmp_path):
        grid = np.array([[1.0], [2.0]], dtype=np.float32).reshape(2, 1, 1)
        write_pfm(tmp_path / "b.pfm", grid)
        payload = (tmp_path / "b.pfm").read_bytes()
        assert payload.startswith(b"Pf\n1 2\n-1.0\n")
        # bottom row first
        assert np.frombuffer(payload[-8:], dtype="<f4").tolist() == [2.0, 1.0]

    def test_big_endian_input(self, tmp_path):
        body = np.array([3.5, -1.0], dtype=">f4").tobytes()
        (tmp_path / "c.pfm").write_bytes(b"Pf\n2 1\n1.0\n" + body)
        np.testing.assert_array_equal(read_pfm(tmp_path / "c.pfm")[0, :, 0], [3.5, -1.0])

    def test_truncated(self, tmp_path):
        (tmp_path / "d.pfm").write_bytes(b"Pf\n4 4\n-1.0\n" + b"\x00" * 10)
        with pytest.raises(RasterFormatError):
            read_pfm(tmp_path / "d.pfm")

    def test_bad_magic(self, tmp_path):
        (tmp_path / "e.pfm").write_bytes(b"P6\n1 1\n-1.0\n\x00\x00\x00\x00")
        with pytest.raises(RasterFormatError):
            read_pfm(tmp_path / "e.pfm")


class TestPgm:
    def test_sixteen_bit_round_trip(self, tmp_path):
        values = np.array([[0, 300], [65535, 12]])
        write_pgm(tmp_path / "a.pgm", values, 65535)
        read, maxval = read_pgm(tmp_path / "a.pgm")
        assert maxval == 65535
        np.testing.assert_array_equal(read, values)

    def test_ascii_with_comment(self, tmp_path):
        (tmp_path / "b.pgm").write_bytes(b"P2\n# made by hand\n2 2\n255\n0 10\n20 255\n")
        values, maxval = read_pgm(tmp_path / "b.pgm")
        assert maxval == 255
        np.testing.assert_array_equal(values, [[0, 10], [20, 255]])

    def test_truncated_raster(self, tmp_path):
        (tmp_path / "c.pgm").write_bytes(b"P5\n4 4\n255\n\x00\x00")
        with pytest.raises(RasterFormatError):
            read_pgm(tmp_path / "c.pgm")


class TestLocalRasterStore:
    def test_rgb_png_round_trip(self, tmp_path, rng, store):
        image = rng.integers(0, 256, size=(6, 5, 3)).astype(np.float32)
        store.write_image(tmp_path / "c.png", image)
        np.testing.assert_array_equal(store.read_image(tmp_path / "c.png"), image)

    def test_palette_png_is_converted(self, tmp_path, store):
        Image.new("P", (3, 2)).save(tmp_path / "p.png")
        assert store.read_image(tmp_path / "p.png").shape == (2, 3, 3)

    def test_pgm_image_is_rescaled(self, tmp_path, store):
        write_pgm(tmp_path / "g.pgm", np.array([[0, 65535]]), 65535)
        np.testing.assert_allclose(store.read_image(tmp_path / "g.pgm")[0, :, 0], [0.0, 255.0])

    @pytest.mark.parametrize("suffix", [".png", ".pgm"])
    def test_sixteen_bit_depth_quantizes_by_scale(self, tmp_path, store, suffix):
        depth = np.array([[1.0, 2.5], [10.0, 100.25]], dtype=np.float32)
        store.write_depth(tmp_path / f"d{suffix}", depth)
        np.testing.assert_array_equal(store.read_depth(tmp_path / f"d{suffix}")[:, :, 0], depth)

    def test_depth_pfm_is_lossless(self, tmp_path, rng, store):
        depth = rng.uniform(0.1, 80.0, size=(4, 4, 1)).astype(np.float32)
        store.write_depth(tmp_path / "d.pfm", depth)
        np.testing.assert_array_equal(store.read_depth(tmp_path / "d.pfm"), depth)

    def test_undecodable_png(self, tmp_path, store):
        (tmp_path / "x.png").write_bytes(b"not an image")
        with pytest.raises(RasterFormatError):
            store.read_image(tmp_path / "x.png")

    def test_edge_map_round_trip(self, tmp_path, rng, store):
        edges = EdgeMap(mask=rng.uniform(size=(5, 6)) < 0.3)
        store.write_edge_map(tmp_path / "e.pgm", edges)
        np.testing.assert_array_equal(store.read_edge_map(tmp_path / "e.pgm").mask, edges.mask)

    def test_field_pgm_is_quantized(self, tmp_path, store):
        field = EdgeDistField(values=np.array([[0.1, 1.0]]))
        store.write_field(tmp_path / "f.pgm", field)
        read = store.read_field(tmp_path / "f.pgm").values
        np.testing.assert_allclose(read, field.values, atol=1.0 / 65535)
        assert read[0, 1, 0] == 1.0

    def test_field_pfm_is_lossless(self, tmp_path, rng, store):
        field = EdgeDistField(values=rng.uniform(0.1, 1.0, size=(3, 4)))
        store.write_field(tmp_path / "f.pfm", field)
        np.testing.assert_array_equal(store.read_field(tmp_path / "f.pfm").values, field.values)

    def test_eight_bit_confidence_mask_reads_as_binary(self, tmp_path, store):
        Image.fromarray(np.array([[0, 255], [255, 0]], dtype=np.uint8)).save(tmp_path / "m.png")
        np.testing.assert_array_equal(store.read_confidence(tmp_path / "m.png")[:, :, 0], [[0.0, 1.0], [1.0, 0.0]])

    def test_sixteen_bit_confidence_uses_full_range(self, tmp_path, store):
        Image.fromarray(np.array([[0, 65535]], dtype=np.uint16)).save(tmp_path / "c.png")
        np.testing.assert_array_equal(store.read_confidence(tmp_path / "c.png")[0, :, 0], [0.0, 1.0])

    def test_confidence_pgm_divides_by_maxval(self, tmp_path, store):
        write_pgm(tmp_path / "c.pgm", np.array([[0, 51, 255]]), 255)
        np.testing.assert_allclose(store.read_confidence(tmp_path / "c.pgm")[0, :, 0], [0.0, 0.2, 1.0])

    def test_confidence_ignores_depth_scale(self, tmp_path, store):
        Image.fromarray(np.array([[255]], dtype=np.uint8)).save(tmp_path / "m.png")
        assert store.read_depth(tmp_path / "m.png")[0, 0, 0] == pytest.approx(255.0 / store.depth_scale)
        assert store.read_confidence(tmp_path / "m.png")[0, 0, 0] == 1.0

    def test_rgb_confidence_is_rejected(self, tmp_path, store):
        Image.new("RGB", (2, 2)).save(tmp_path / "rgb.png")
        with pytest.raises(RasterFormatError):
            store.read_confidence(tmp_path / "rgb.png")
