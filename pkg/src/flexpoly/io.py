"""OBJ meshes and JSON metadata for embedded polyhedra."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .geometry import EmbeddedPolyhedron, signed_volume
from .surface import SimplicialSurface, validate_closed_sphere


class MeshIOError(OSError):
    pass


def _outward(Q: EmbeddedPolyhedron) -> EmbeddedPolyhedron:
    """Flip a closed oriented surface whose signed volume is clearly negative.

    Zero-volume surfaces (Bricard octahedra) keep their stored orientation.
    """
    rep = validate_closed_sphere(Q.surface)
    if not (rep.closed and rep.oriented):
        return Q
    scale = max(Q.diameter(), 1e-300) ** 3
    return Q.flipped() if signed_volume(Q, check=False) < -1e-12 * scale else Q


def obj_text(Q: EmbeddedPolyhedron, outward: bool = True) -> str:
    Q = _outward(Q) if outward else Q
    lines = [f"# vertices: {' '.join(Q.labels)}"]
    lines += [f"v {x!r} {y!r} {z!r}" for x, y, z in Q.coords.tolist()]
    lines += [f"f {i + 1} {j + 1} {k + 1}" for i, j, k in Q.surface.faces]
    return "\n".join(lines) + "\n"


def write_obj(Q: EmbeddedPolyhedron, path, outward: bool = True) -> Path:
    path = Path(path)
    try:
        path.write_text(obj_text(Q, outward))
    except OSError as exc:
        raise MeshIOError(f"cannot write {path}: {exc}") from exc
    return path


def read_obj(path) -> EmbeddedPolyhedron:
    """Read back an OBJ written by ``write_obj`` (labels from the header comment when present)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MeshIOError(f"cannot read {path}: {exc}") from exc
    labels, verts, faces = None, [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "#" and len(parts) > 2 and parts[1] == "vertices:":
            labels = tuple(parts[2:])
        elif parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = [int(p.split("/")[0]) for p in parts[1:]]
            if len(idx) != 3:
                raise MeshIOError(f"{path}:{lineno}: only triangles are supported")
            if min(idx) < 1 or max(idx) > len(verts):
                raise MeshIOError(f"{path}:{lineno}: face index out of range")
            faces.append(tuple(i - 1 for i in idx))
    if labels is None:
        labels = tuple(str(i + 1) for i in range(len(verts)))
    if len(labels) != len(verts):
        raise MeshIOError(f"{path}: {len(labels)} labels for {len(verts)} vertices")
    return EmbeddedPolyhedron(SimplicialSurface(labels, faces), np.array(verts, dtype=float))


def metadata(Q: EmbeddedPolyhedron, params: dict) -> dict:
    return {
        "parameters": params,
        "vertices": list(Q.labels),
        "coordinates": Q.coords.tolist(),
        "faces": [list(f) for f in Q.surface.faces],
        "edge_lengths": {f"{Q.labels[i]}-{Q.labels[j]}": float(l)
                         for (i, j), l in zip(Q.surface.edges, Q.edge_lengths())},
    }


def write_json(data, path) -> Path:
    path = Path(path)
    try:
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise MeshIOError(f"cannot write {path}: {exc}") from exc
    return path
