import math

import numpy as np
import pytest

from shapealign.errors import ContourError, ImageError
from shapealign.geometry import (
    BinaryImage,
    Contour,
    Orientation,
    centroid,
    contour_from_text,
    contour_to_text,
    extract_contour,
    load_binary_image,
    resample_contour,
)
from shapealign.synthetic import make_shape_mask, write_pgm


def write_p2(path, rows, maxval=255):
    h, w = len(rows), len(rows[0])
    body = "\n".join(" ".join(str(v) for v in row) for row in rows)
    path.write_text(f"P2\n# comment line\n{w} {h}\n{maxval}\n{body}\n")


class TestLoadBinaryImage:
    def test_all_white_is_all_foreground(self, tmp_path):
        p = tmp_path / "white.pgm"
        write_pgm(p, np.ones((4, 4), dtype=bool))
        img = load_binary_image(p, threshold=128)
        assert img.foreground_count == 16

    def test_all_black_errors(self, tmp_path):
        p = tmp_path / "black.pgm"
        write_pgm(p, np.zeros((4, 4), dtype=bool))
        with pytest.raises(ImageError, match="zero foreground"):
            load_binary_image(p, threshold=128)

    def test_checkerboard_has_two_foreground(self, tmp_path):
        p = tmp_path / "check.pgm"
        write_p2(p, [[0, 255], [255, 0]])
        assert load_binary_image(p, threshold=128).foreground_count == 2

    def test_auto_polarity_picks_minority(self, tmp_path):
        rows = [[255] * 5 for _ in range(5)]
        rows[2][2] = 0  # one dark pixel on a light page
        p = tmp_path / "dark_dot.pgm"
        write_p2(p, rows)
        img = load_binary_image(p, threshold=128, polarity="auto")
        assert img.foreground_count == 1
        assert img.mask[2, 2]

    def test_explicit_polarity(self, tmp_path):
        rows = [[255] * 5 for _ in range(5)]
        rows[2][2] = 0
        p = tmp_path / "dot.pgm"
        write_p2(p, rows)
        assert load_binary_image(p, polarity="light").foreground_count == 24
        assert load_binary_image(p, polarity="dark").foreground_count == 1
        with pytest.raises(ImageError):
            load_binary_image(p, polarity="inverted")

    def test_p2_maxval_rescaled(self, tmp_path):
        p = tmp_path / "deep.pgm"
        write_p2(p, [[0, 15], [15, 0]], maxval=15)
        assert load_binary_image(p, threshold=128).foreground_count == 2

    def test_p1_bitmap(self, tmp_path):
        p = tmp_path / "bits.pbm"
        p.write_text("P1\n3 2\n1 1 0\n0 1 1\n")
        img = load_binary_image(p, threshold=128)  # PBM ink (1) is dark
        assert img.foreground_count == 2  # light pixels are the minority

    def test_p6_color(self, tmp_path):
        p = tmp_path / "rgb.ppm"
        header = b"P6\n2 1\n255\n"
        p.write_bytes(header + bytes([255, 255, 255, 0, 0, 0]))
        img = load_binary_image(p, threshold=128)
        assert img.foreground_count == 1

    def test_png_via_pillow(self, tmp_path):
        from PIL import Image

        arr = np.zeros((6, 6), dtype=np.uint8)
        arr[2:4, 2:4] = 255
        p = tmp_path / "shape.png"
        Image.fromarray(arr).save(p)
        assert load_binary_image(p).foreground_count == 4

    def test_missing_file_names_path(self, tmp_path):
        missing = tmp_path / "nope.pgm"
        with pytest.raises(ImageError, match="nope.pgm"):
            load_binary_image(missing)

    def test_garbage_bytes_rejected(self, tmp_path):
        p = tmp_path / "junk.bin"
        p.write_bytes(b"\x00\x01\x02 not an image")
        with pytest.raises(ImageError):
            load_binary_image(p)

    def test_truncated_pgm_rejected(self, tmp_path):
        p = tmp_path / "trunc.pgm"
        p.write_bytes(b"P5\n4 4\n255\n\x00\x00")
        with pytest.raises(ImageError):
            load_binary_image(p)

    def test_bad_threshold(self, tmp_path):
        p = tmp_path / "white.pgm"
        write_pgm(p, np.ones((2, 2), dtype=bool))
        with pytest.raises(ImageError):
            load_binary_image(p, threshold=300)


def eight_adjacent(a, b) -> bool:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1])) == 1


class TestExtractContour:
    def test_filled_3x3_square_boundary(self):
        mask = np.pad(np.ones((3, 3), dtype=bool), 1)
        c = extract_contour(BinaryImage.from_mask(mask))
        got = {tuple(int(v) for v in p) for p in c.points}
        expected = {
            (1, 1), (2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2),
        }
        assert got == expected
        assert len(c) == 8

    def test_single_pixel_too_small(self):
        mask = np.zeros((5, 5), dtype=bool)
        mask[2, 2] = True
        with pytest.raises(ContourError, match="too small"):
            extract_contour(BinaryImage.from_mask(mask))

    def test_no_foreground(self):
        with pytest.raises(ContourError, match="no foreground"):
            extract_contour(BinaryImage.from_mask(np.zeros((4, 4), dtype=bool)))

    def test_largest_component_wins(self):
        mask = np.zeros((20, 40), dtype=bool)
        mask[2:9, 2:10] = True  # 56 pixels
        mask[12:15, 30:34] = True  # 12 pixels
        c = extract_contour(BinaryImage.from_mask(mask))
        assert c.points[:, 0].max() < 20  # stays inside the big component

    def test_boundary_is_closed_8_connected_cycle(self):
        rng = np.random.default_rng(4)
        for kind in ("square", "star", "ellipse"):
            mask = make_shape_mask(kind, size=96, rng=rng)
            c = extract_contour(BinaryImage.from_mask(mask))
            pts = [(int(x), int(y)) for x, y in c.points]
            for a, b in zip(pts, pts[1:] + pts[:1]):
                assert eight_adjacent(a, b), (a, b)

    def test_orientation_is_counterclockwise(self):
        mask = np.pad(np.ones((6, 9), dtype=bool), 2)
        c = extract_contour(BinaryImage.from_mask(mask))
        assert c.orientation is Orientation.COUNTERCLOCKWISE
        x, y = c.points[:, 0], c.points[:, 1]
        area = 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)
        assert area > 0

    def test_one_pixel_wide_limb_is_traced(self):
        mask = np.zeros((9, 9), dtype=bool)
        mask[4, 1:8] = True  # 1-pixel line: out-and-back trace revisits pixels
        c = extract_contour(BinaryImage.from_mask(mask))
        assert len(c) >= 3
        diffs = np.roll(c.points, -1, axis=0) - c.points
        assert np.any(diffs != 0, axis=1).all()


class TestResampleContour:
    def test_unit_square_eight_points(self, unit_square):
        r = resample_contour(unit_square, 8)
        expected = np.array(
            [
                (0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (1.0, 0.5),
                (1.0, 1.0), (0.5, 1.0), (0.0, 1.0), (0.0, 0.5),
            ]
        )
        assert np.allclose(r.points, expected, atol=1e-12)

    def test_identity_when_already_uniform(self, unit_square):
        r = resample_contour(unit_square, 4)
        assert np.allclose(r.points, unit_square.points, atol=1e-9)

    def test_too_few_points_rejected(self, unit_square):
        with pytest.raises(ContourError):
            resample_contour(unit_square, 2)

    def test_starts_at_first_point(self, unit_square):
        r = resample_contour(unit_square, 7)
        assert np.allclose(r.points[0], unit_square.points[0])

    def test_count_and_arc_spacing(self, unit_square):
        n = 17
        r = resample_contour(unit_square, n)
        assert len(r) == n
        # project each sample back onto the square's edges for its arc position
        corners = unit_square.points
        seg = np.roll(corners, -1, axis=0) - corners
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        positions = []
        for p in r.points:
            best = None
            for s in range(4):
                d = p - corners[s]
                t = np.clip(np.dot(d, seg[s]) / seg_len[s] ** 2, 0, 1)
                closest = corners[s] + t * seg[s]
                err = np.hypot(*(p - closest))
                if best is None or err < best[0]:
                    best = (err, cum[s] + t * seg_len[s])
            positions.append(best[1])
        gaps = np.diff(np.array(positions))
        assert np.allclose(gaps, unit_square.perimeter / n, rtol=1e-6)

    def test_perimeter_converges_with_density(self):
        # corner cutting shrinks the resampled perimeter; the deficit decays
        # roughly like 1/n and drops under 1% once samples are dense enough
        rng = np.random.default_rng(9)
        for kind in ("square", "ellipse"):
            mask = make_shape_mask(kind, size=128, rng=rng)
            c = extract_contour(BinaryImage.from_mask(mask))
            losses = []
            for mult in (1, 2, 8):
                r = resample_contour(c, mult * len(c))
                losses.append(abs(r.perimeter - c.perimeter) / c.perimeter)
            assert losses[0] > losses[1] > losses[2]
            assert losses[2] <= 0.01


class TestCentroid:
    def test_triangle(self):
        c = Contour(points=np.array([(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]))
        g = centroid(c)
        assert g.x == pytest.approx(2 / 3, abs=1e-12)
        assert g.y == pytest.approx(2 / 3, abs=1e-12)

    def test_unit_square(self, unit_square):
        assert centroid(unit_square) == pytest.approx((0.5, 0.5), abs=1e-12)

    def test_translation_equivariance(self, unit_square):
        moved = Contour(points=unit_square.points + (3.5, -2.25))
        g0, g1 = centroid(unit_square), centroid(moved)
        assert g1.x - g0.x == pytest.approx(3.5, abs=1e-9)
        assert g1.y - g0.y == pytest.approx(-2.25, abs=1e-9)

    def test_rotation_equivariance(self, unit_square):
        theta = 0.7
        rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
        turned = Contour(points=unit_square.points @ rot.T)
        g0 = np.array(centroid(unit_square))
        g1 = np.array(centroid(turned))
        assert np.allclose(rot @ g0, g1, atol=1e-9)


class TestContourValidation:
    def test_needs_three_points(self):
        with pytest.raises(ContourError):
            Contour(points=np.array([(0.0, 0.0), (1.0, 1.0)]))

    def test_consecutive_duplicates_rejected(self):
        with pytest.raises(ContourError):
            Contour(points=np.array([(0.0, 0.0), (0.0, 0.0), (1.0, 1.0)]))

    def test_wraparound_duplicate_rejected(self):
        with pytest.raises(ContourError):
            Contour(points=np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]))

    def test_non_finite_rejected(self):
        with pytest.raises(ContourError):
            Contour(points=np.array([(0.0, 0.0), (1.0, np.nan), (1.0, 1.0)]))

    def test_points_are_read_only(self, unit_square):
        with pytest.raises(ValueError):
            unit_square.points[0, 0] = 9.0


class TestSerialization:
    def test_roundtrip(self, unit_square):
        text = contour_to_text(unit_square)
        assert text.splitlines()[0] == "N 4"
        back = contour_from_text(text)
        assert np.array_equal(back.points, unit_square.points)

    def test_bad_header(self):
        with pytest.raises(ContourError):
            contour_from_text("4\n0 0\n1 0\n1 1\n0 1\n")

    def test_count_mismatch(self):
        with pytest.raises(ContourError):
            contour_from_text("N 5\n0 0\n1 0\n1 1\n0 1\n")
