"""VPRD, CSV and PGM round trips and malformed-input behaviour."""

import struct

import numpy as np
import pytest

from seqvpr.errors import BadMagic, NonFiniteValue, TruncatedFile
from seqvpr.io import (
    ROLE_DESCRIPTORS,
    ROLE_SCORES,
    load_pgm,
    load_score_csv,
    load_vprd,
    save_pgm,
    save_score_csv,
    save_vprd,
)


class TestVprd:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(30)
        matrix = rng.normal(size=(7, 5)).astype(np.float32)
        path = tmp_path / "m.vprd"
        save_vprd(path, matrix, ROLE_SCORES)
        loaded, role = load_vprd(path)
        assert role == ROLE_SCORES
        assert loaded.dtype == np.float64
        np.testing.assert_array_equal(loaded, matrix.astype(np.float64))

    def test_descriptor_role_round_trips(self, tmp_path):
        path = tmp_path / "d.vprd"
        save_vprd(path, np.eye(3), ROLE_DESCRIPTORS)
        _, role = load_vprd(path)
        assert role == ROLE_DESCRIPTORS

    def test_bad_magic_names_offset(self, tmp_path):
        path = tmp_path / "bad.vprd"
        path.write_bytes(b"XXXX" + bytes(11))
        with pytest.raises(BadMagic, match="byte 0"):
            load_vprd(path)

    def test_bad_version_and_dtype_and_role(self, tmp_path):
        header = struct.Struct("<4sBBBII")
        cases = [
            (header.pack(b"VPRD", 9, 1, 1, 1, 1), "byte 4"),
            (header.pack(b"VPRD", 1, 7, 1, 1, 1), "byte 5"),
            (header.pack(b"VPRD", 1, 1, 9, 1, 1), "byte 6"),
        ]
        for raw, where in cases:
            path = tmp_path / "h.vprd"
            path.write_bytes(raw + bytes(4))
            with pytest.raises(BadMagic, match=where):
                load_vprd(path)

    def test_truncated_header(self, tmp_path):
        path = tmp_path / "short.vprd"
        path.write_bytes(b"VPR")
        with pytest.raises(TruncatedFile):
            load_vprd(path)

    def test_truncated_body_names_expected_size(self, tmp_path):
        path = tmp_path / "trunc.vprd"
        save_vprd(path, np.ones((10, 3), dtype=np.float32), ROLE_SCORES)
        whole = path.read_bytes()
        path.write_bytes(whole[:-12])  # drop the last row
        with pytest.raises(TruncatedFile, match=str(len(whole))):
            load_vprd(path)

    def test_non_finite_payload_rejected_with_offset(self, tmp_path):
        path = tmp_path / "nan.vprd"
        save_vprd(path, np.ones((2, 2), dtype=np.float32), ROLE_SCORES)
        raw = bytearray(path.read_bytes())
        raw[15 + 4:15 + 8] = struct.pack("<f", np.nan)
        path.write_bytes(bytes(raw))
        with pytest.raises(NonFiniteValue, match="byte 19"):
            load_vprd(path)

    def test_saving_non_finite_rejected(self, tmp_path):
        with pytest.raises(NonFiniteValue):
            save_vprd(tmp_path / "x.vprd", np.array([[1.0, np.inf]]), 1)

    def test_header_layout_is_pinned(self, tmp_path):
        path = tmp_path / "layout.vprd"
        save_vprd(path, np.zeros((2, 3), dtype=np.float32), ROLE_SCORES)
        raw = path.read_bytes()
        assert raw[:4] == b"VPRD"
        assert raw[4] == 1  # version
        assert raw[5] == 1  # dtype f32
        assert raw[6] == 1  # role scores
        assert struct.unpack("<I", raw[7:11])[0] == 2
        assert struct.unpack("<I", raw[11:15])[0] == 3
        assert len(raw) == 15 + 2 * 3 * 4


class TestScoreCsv:
    def test_round_trip(self, tmp_path):
        matrix = np.array([[1.5, -2.25, 3.0], [0.0, 0.125, -1.0]])
        path = tmp_path / "scores.csv"
        save_score_csv(path, matrix)
        np.testing.assert_array_equal(load_score_csv(path), matrix)
        assert "," in path.read_text().splitlines()[0]

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(BadMagic):
            load_score_csv(path)


class TestPgm:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(31)
        img = rng.integers(0, 256, size=(12, 17), dtype=np.uint8)
        path = tmp_path / "img.pgm"
        save_pgm(path, img)
        np.testing.assert_array_equal(load_pgm(path), img)

    def test_comments_in_header(self, tmp_path):
        path = tmp_path / "c.pgm"
        body = bytes(range(6))
        path.write_bytes(b"P5\n# comment line\n3 2\n# another\n255\n" + body)
        img = load_pgm(path)
        assert img.shape == (2, 3)
        np.testing.assert_array_equal(img.ravel(), np.arange(6))

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "p2.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 1 2 3\n")
        with pytest.raises(BadMagic):
            load_pgm(path)

    def test_truncated_pixels(self, tmp_path):
        path = tmp_path / "t.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(7))
        with pytest.raises(TruncatedFile):
            load_pgm(path)

    def test_16bit_rejected(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + bytes(8))
        with pytest.raises(BadMagic):
            load_pgm(path)
