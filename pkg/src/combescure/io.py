"""File formats: JSON interchange for nets and generator specs, OBJ export.

JSON is the canonical format. The net schema is

    {"dim": 2|3, "m": int, "n": int, "vertices": [[x, y(, z)], ...]}

with vertices row-major, index(i,j) = i*(n+1)+j. OBJ is export-only; the
grid shape is stashed in a `# net m n` header comment so the round-trip
import in the tests can rebuild the net.
"""
from __future__ import annotations

import json

import numpy as np

from .errors import NetValidationError
from .nets import Net
from .construct import LShapedNet, ConeCylinderData
from .smooth import PolyCurve, TrigCurve, SmoothConeCylinderNet

__all__ = [
    "net_to_dict", "net_from_dict", "save_net", "load_net",
    "generator_from_dict", "l_shape_from_dict", "cone_cylinder_from_dict",
    "curve_from_spec", "smooth_from_dict", "load_smooth_spec",
    "export_obj", "import_obj", "dump_json",
]


def dump_json(obj, fp=None):
    """Deterministic JSON: sorted keys, no trailing spaces."""
    text = json.dumps(obj, sort_keys=True, indent=2)
    if fp is None:
        return text
    fp.write(text + "\n")


def net_to_dict(net: Net) -> dict:
    return {
        "dim": net.dim,
        "m": net.m,
        "n": net.n,
        "vertices": [[float(x) for x in v] for v in net.vertices],
    }


def net_from_dict(data: dict) -> Net:
    try:
        dim = int(data["dim"])
        m = int(data["m"])
        n = int(data["n"])
        verts = data["vertices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise NetValidationError(f"bad net JSON: {exc}") from None
    if dim not in (2, 3):
        raise NetValidationError(f"bad net JSON: dim must be 2 or 3, got {dim}")
    if m < 1 or n < 1:
        raise NetValidationError(f"bad net JSON: need m,n >= 1, got {m}x{n}")
    arr = np.asarray(verts, dtype=float)
    if arr.shape != ((m + 1) * (n + 1), dim):
        raise NetValidationError(
            f"bad net JSON: expected {(m + 1) * (n + 1)} vertices of dim {dim}, "
            f"got array of shape {arr.shape}")
    return Net(m=m, n=n, vertices=arr)


def save_net(net: Net, path) -> None:
    with open(path, "w") as fp:
        dump_json(net_to_dict(net), fp)


def load_net(path) -> Net:
    with open(path) as fp:
        return net_from_dict(json.load(fp))


def l_shape_from_dict(data: dict) -> LShapedNet:
    pts = data.get("points")
    if not isinstance(pts, dict) or not pts:
        raise NetValidationError("l_shape spec needs a nonempty 'points' map")
    parsed = {}
    for key, val in pts.items():
        try:
            i_s, j_s = key.split(",")
            parsed[(int(i_s), int(j_s))] = np.asarray(val, dtype=float)
        except (ValueError, TypeError):
            raise NetValidationError(f"bad l_shape point key or value at {key!r}") from None
    m = data.get("m", max(i for i, _ in parsed))
    n = data.get("n", max(j for _, j in parsed))
    return LShapedNet(m=int(m), n=int(n), points=parsed)


def cone_cylinder_from_dict(data: dict) -> ConeCylinderData:
    try:
        return ConeCylinderData(
            a=np.asarray(data["a"], dtype=float),
            sigma=np.asarray(data["sigma"], dtype=float),
            b=np.asarray(data["b"], dtype=float),
            direction=data.get("direction", "rows"),
        )
    except KeyError as exc:
        raise NetValidationError(f"cone_cylinder spec missing {exc}") from None


def generator_from_dict(data: dict):
    kind = data.get("kind")
    if kind == "l_shape":
        return l_shape_from_dict(data)
    if kind == "cone_cylinder":
        return cone_cylinder_from_dict(data)
    raise NetValidationError(
        f"unknown generator kind {kind!r} (expected 'l_shape' or 'cone_cylinder')")


def curve_from_spec(spec: dict):
    kind = spec.get("kind")
    if kind == "poly":
        return PolyCurve(np.asarray(spec["coeffs"], dtype=float))
    if kind == "trig":
        cos_c = np.asarray(spec.get("cos", []), dtype=float)
        sin_c = np.asarray(spec.get("sin", []), dtype=float)
        if cos_c.size == 0 and sin_c.size:
            cos_c = np.zeros_like(sin_c)
        if sin_c.size == 0 and cos_c.size:
            sin_c = np.zeros_like(cos_c)
        const = np.asarray(spec.get("const", np.zeros(cos_c.shape[1:])), dtype=float)
        return TrigCurve(const=const, cos_coeffs=cos_c, sin_coeffs=sin_c,
                         omega=float(spec.get("omega", 1.0)))
    raise NetValidationError(f"unknown curve kind {kind!r} (expected 'poly' or 'trig')")


def smooth_from_dict(data: dict) -> SmoothConeCylinderNet:
    try:
        a = curve_from_spec(data["a"])
        sigma = curve_from_spec(data["sigma"])
        b = curve_from_spec(data["b"])
        (u0, u1), (v0, v1) = data["domain"]
    except (KeyError, TypeError, ValueError) as exc:
        raise NetValidationError(f"bad smooth spec: {exc}") from None
    return SmoothConeCylinderNet(a, sigma, b,
                                 ((float(u0), float(u1)), (float(v0), float(v1))))


def load_smooth_spec(path) -> SmoothConeCylinderNet:
    with open(path) as fp:
        return smooth_from_dict(json.load(fp))


def export_obj(net: Net, path) -> None:
    """Wavefront OBJ with a `# net m n` header.

    One `v` line per vertex in index order and one quad `f` line per face,
    traced (i,j), (i,j+1), (i+1,j+1), (i+1,j) with 1-based indices.
    2D nets are written with z = 0.
    """
    lines = [f"# net {net.m} {net.n}"]
    for v in net.vertices:
        x, y = v[0], v[1]
        z = v[2] if net.dim == 3 else 0.0
        lines.append(f"v {x:.17g} {y:.17g} {z:.17g}")
    for i in range(net.m):
        for j in range(net.n):
            quad = (net.index(i, j), net.index(i, j + 1),
                    net.index(i + 1, j + 1), net.index(i + 1, j))
            lines.append("f " + " ".join(str(k + 1) for k in quad))
    with open(path, "w") as fp:
        fp.write("\n".join(lines) + "\n")


def import_obj(path) -> Net:
    """Rebuild a net from an OBJ written by export_obj (round trips exactly)."""
    m = n = None
    verts = []
    with open(path) as fp:
        for line in fp:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "#" and len(parts) >= 4 and parts[1] == "net":
                m, n = int(parts[2]), int(parts[3])
            elif parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
    if m is None:
        raise NetValidationError("OBJ file lacks the '# net m n' header")
    arr = np.asarray(verts, dtype=float)
    if arr.shape != ((m + 1) * (n + 1), 3):
        raise NetValidationError(
            f"OBJ vertex count {arr.shape[0]} does not match {m}x{n} grid")
    return Net(m=m, n=n, vertices=arr)
