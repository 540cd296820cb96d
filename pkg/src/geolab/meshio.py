"""Mesh and polyline serialization: OFF, OBJ, and JSON descriptors.

Floats are written with ``repr`` (shortest round-trip form), which keeps
files byte-stable across runs of the same build.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .mesh import ConvexMesh


def _fmt(x):
    return repr(float(x))


def write_off(path, mesh):
    lines = ["OFF", f"{mesh.n_vertices} {mesh.n_faces} 0"]
    for v in mesh.vertices:
        lines.append(f"{_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
    for f in mesh.faces:
        lines.append(f"3 {f[0]} {f[1]} {f[2]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_off(path):
    with open(path) as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise ValueError(f"{path} is not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    cursor = 4
    verts = np.array(tokens[cursor : cursor + 3 * nv], dtype=np.float64).reshape(nv, 3)
    cursor += 3 * nv
    faces = []
    for _ in range(nf):
        arity = int(tokens[cursor])
        if arity != 3:
            raise ValueError("only triangle faces are supported")
        faces.append([int(t) for t in tokens[cursor + 1 : cursor + 4]])
        cursor += 1 + arity
    return ConvexMesh(verts, np.array(faces, dtype=np.int64))


def write_obj(path, mesh):
    lines = []
    for v in mesh.vertices:
        lines.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
    for f in mesh.faces:
        lines.append(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_obj(path):
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                ids = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                if len(ids) != 3:
                    raise ValueError("only triangle faces are supported")
                faces.append(ids)
    return ConvexMesh(np.array(verts), np.array(faces, dtype=np.int64))


def write_polyline_obj(path, polylines, closed=False):
    """Write one or more 3d polylines as OBJ line elements."""
    if isinstance(polylines, np.ndarray):
        polylines = [polylines]
    lines = []
    offsets = []
    total = 0
    for pts in polylines:
        offsets.append(total)
        for p in np.asarray(pts, dtype=np.float64):
            lines.append(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}")
        total += len(pts)
    for pts, off in zip(polylines, offsets):
        ids = [str(off + i + 1) for i in range(len(pts))]
        if closed:
            ids.append(ids[0])
        lines.append("l " + " ".join(ids))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def canonical_json(obj):
    """Serialize deterministically: sorted keys, no whitespace drift."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(canonical_json(obj) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def mesh_sha256(mesh):
    """Content hash of the geometry: exact vertex and face bytes."""
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(mesh.vertices, dtype=np.float64).tobytes())
    h.update(np.ascontiguousarray(mesh.faces, dtype=np.int64).tobytes())
    return h.hexdigest()


def mesh_descriptor(mesh):
    """JSON-safe descriptor: generation recipe plus basic counts."""
    out = dict(mesh.descriptor)
    out.setdefault("n_vertices", mesh.n_vertices)
    out.setdefault("n_faces", mesh.n_faces)
    out["n_edges"] = mesh.n_edges
    out["bbox_diameter"] = float(mesh.bbox_diameter)
    return out
