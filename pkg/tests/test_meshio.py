"""Tests for mesh file formats, canonical JSON, and content hashing."""

import json

import numpy as np
import pytest

from geolab import read_obj, read_off, write_obj, write_off
from geolab.meshio import canonical_json, mesh_sha256, read_json, sha256_file, write_json


# =============================================================================
# OFF / OBJ round-trips
# =============================================================================

class TestRoundTrip:
    def test_off(self, cube, tmp_path):
        p = tmp_path / "cube.off"
        write_off(p, cube)
        back = read_off(p)
        assert np.array_equal(back.vertices, cube.vertices)
        assert np.array_equal(back.faces, cube.faces)

    def test_obj(self, cube, tmp_path):
        p = tmp_path / "cube.obj"
        write_obj(p, cube)
        back = read_obj(p)
        assert np.array_equal(back.vertices, cube.vertices)
        assert np.array_equal(back.faces, cube.faces)

    def test_off_deterministic_bytes(self, sphere_320, tmp_path):
        a, b = tmp_path / "a.off", tmp_path / "b.off"
        write_off(a, sphere_320)
        write_off(b, sphere_320)
        assert a.read_bytes() == b.read_bytes()

    def test_read_off_rejects_garbage(self, tmp_path):
        p = tmp_path / "bad.off"
        p.write_text("not an OFF file\n")
        with pytest.raises(Exception):
            read_off(p)


# =============================================================================
# Canonical JSON
# =============================================================================

class TestCanonicalJson:
    def test_sorted_and_compact(self):
        s = canonical_json({"b": 1, "a": [1.5, 2]})
        assert s == '{"a":[1.5,2],"b":1}'

    def test_roundtrip_file(self, tmp_path):
        p = tmp_path / "x.json"
        payload = {"z": 1, "a": {"nested": [1, 2, 3]}}
        write_json(p, payload)
        assert read_json(p) == payload
        # canonical bytes are reproducible
        q = tmp_path / "y.json"
        write_json(q, payload)
        assert p.read_bytes() == q.read_bytes()

    def test_stable_under_key_order(self):
        a = canonical_json({"x": 1, "y": 2})
        b = canonical_json(json.loads('{"y": 2, "x": 1}'))
        assert a == b


# =============================================================================
# Hashes
# =============================================================================

class TestHashes:
    def test_mesh_sha256_stable(self, cube):
        assert mesh_sha256(cube) == mesh_sha256(cube)

    def test_mesh_sha256_sensitive(self, cube, sphere_320):
        assert mesh_sha256(cube) != mesh_sha256(sphere_320)

    def test_file_hash_matches_content(self, tmp_path):
        p = tmp_path / "f.txt"
        p.write_bytes(b"abc")
        import hashlib

        assert sha256_file(p) == hashlib.sha256(b"abc").hexdigest()
