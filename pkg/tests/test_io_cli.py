import json

import numpy as np
import pytest

import _gen
from combescure import cli, errors, io as cio
from combescure.nets import net_from_grid


def _write(tmp_path, name, payload):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return str(p)


def _save_net(tmp_path, name, net):
    p = tmp_path / name
    cio.save_net(net, str(p))
    return str(p)


# ------------------------------------------------------------------ JSON I/O

def test_net_json_round_trip_bit_exact(tmp_path, rng):
    net = _gen.lift_with_random_heights(rng, _gen.class_ii_net(rng, 3, 4))
    path = _save_net(tmp_path, "net.json", net)
    back = cio.load_net(path)
    assert back.m == net.m and back.n == net.n and back.dim == 3
    assert np.array_equal(back.vertices, net.vertices)


def test_net_from_dict_schema_checks():
    ok = {"dim": 2, "m": 1, "n": 1,
          "vertices": [[0, 0], [1, 0], [0, 1], [1, 1]]}
    cio.net_from_dict(ok)
    for breakage in (
            lambda d: d.pop("dim"),
            lambda d: d.update(dim=4),
            lambda d: d.update(m=0),
            lambda d: d.update(vertices=d["vertices"][:-1]),
    ):
        bad = {k: (list(v) if isinstance(v, list) else v) for k, v in ok.items()}
        breakage(bad)
        with pytest.raises(errors.NetValidationError):
            cio.net_from_dict(bad)


def test_dump_json_deterministic():
    a = cio.dump_json({"b": 1, "a": [1.5, 2]})
    b = cio.dump_json({"a": [1.5, 2], "b": 1})
    assert a == b


def test_l_shape_from_dict(rng):
    l = _gen.class_ii_l_shape(rng, 2, 2)
    spec = {"kind": "l_shape",
            "points": {f"{i},{j}": [float(x) for x in p]
                       for (i, j), p in l.points.items()}}
    parsed = cio.l_shape_from_dict(spec)
    assert parsed.m == 2 and parsed.n == 2
    with pytest.raises(errors.NetValidationError):
        cio.l_shape_from_dict({"kind": "l_shape", "points": {}})
    with pytest.raises(errors.NetValidationError):
        cio.l_shape_from_dict({"points": {"0-0": [0, 0]}})


def test_generator_from_dict_dispatch(rng):
    data = _gen.cone_cylinder_data(rng, 2, 2)
    spec = {"kind": "cone_cylinder", "a": data.a.tolist(),
            "sigma": data.sigma.tolist(), "b": data.b.tolist()}
    gen = cio.generator_from_dict(spec)
    assert np.array_equal(gen.sigma, data.sigma)
    with pytest.raises(errors.NetValidationError):
        cio.generator_from_dict({"kind": "helix"})


def test_curve_from_spec():
    p = cio.curve_from_spec({"kind": "poly", "coeffs": [[0, 0], [1, 2]]})
    assert np.allclose(p(0.5), [0.5, 1.0], atol=0)
    c = cio.curve_from_spec({"kind": "trig", "cos": [[1.0, 0.0]], "omega": 2.0})
    assert np.allclose(c(0.0), [1.0, 0.0], atol=0)
    with pytest.raises(errors.NetValidationError):
        cio.curve_from_spec({"kind": "spline"})


# ----------------------------------------------------------------------- OBJ

def test_obj_frozen_format(tmp_path):
    g = np.array([[[0.0, 0.0], [1.0, 0.0]], [[0.0, 1.0], [1.0, 1.0]]])
    net = net_from_grid(g)
    path = tmp_path / "unit.obj"
    cio.export_obj(net, str(path))
    lines = path.read_text().splitlines()
    assert lines[0] == "# net 1 1"
    assert lines[1] == "v 0 0 0"
    assert lines[-1] == "f 1 2 4 3"


def test_obj_round_trip_and_determinism(tmp_path, rng):
    net = _gen.lift_with_random_heights(rng, _gen.class_ii_net(rng, 3, 3))
    p1, p2 = tmp_path / "a.obj", tmp_path / "b.obj"
    cio.export_obj(net, str(p1))
    cio.export_obj(net, str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    back = cio.import_obj(str(p1))
    assert np.array_equal(back.vertices, net.vertices)


def test_obj_import_needs_header(tmp_path):
    p = tmp_path / "plain.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 4 3\n")
    with pytest.raises(errors.NetValidationError):
        cio.import_obj(str(p))


# ----------------------------------------------------------------------- CLI

def test_cli_validate_ok_and_exit_codes(tmp_path, rng, capsys):
    good = _save_net(tmp_path, "good.json", _gen.class_ii_net(rng, 2, 2))
    assert cli.main(["validate", good]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["ok"] is True

    bent = _gen.class_ii_net(rng, 2, 2)
    g = bent.grid().copy()
    g[1, 1] = 0.5 * (g[0, 0] + g[2, 2])  # collapse the center vertex inward
    bad = _save_net(tmp_path, "bad.json", net_from_grid(g))
    code = cli.main(["validate", bad])
    rep = json.loads(capsys.readouterr().out)
    if code == 0:  # the collapse may keep faces convex for some draws
        assert rep["ok"] is True
    else:
        assert rep["ok"] is False and rep["failures"]


def test_cli_missing_file_is_error(capsys):
    assert cli.main(["validate", "/nonexistent/net.json"]) == 1
    assert "net.json" in capsys.readouterr().err


def test_cli_usage_errors(capsys, tmp_path, rng):
    net = _save_net(tmp_path, "n.json", _gen.class_ii_net(rng, 2, 2))
    assert cli.main(["deform", net]) == 2  # neither --t nor a range
    assert cli.main(["deform", net, "--t-min", "0", "--t-max", "0.2"]) == 2
    capsys.readouterr()


def test_cli_classify_with_tables(tmp_path, rng, capsys):
    net = _save_net(tmp_path, "n.json", _gen.class_ii_net(rng, 3, 3))
    assert cli.main(["classify", net, "--tables"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["deformable"] is True and rep["class_ii"] is True
    assert np.asarray(rep["H"]).shape == (3, 3)
    assert np.asarray(rep["V"]).shape == (3, 3)


def test_cli_classify_deterministic_output(tmp_path, rng, capsys):
    net = _save_net(tmp_path, "n.json", _gen.class_i_net(rng, 2, 4))
    cli.main(["classify", net])
    first = capsys.readouterr().out
    cli.main(["classify", net])
    assert capsys.readouterr().out == first


def test_cli_deform_single_t_to_stdout(tmp_path, rng, capsys):
    net = _gen.class_ii_net(rng, 2, 2)
    path = _save_net(tmp_path, "n.json", net)
    assert cli.main(["deform", path, "--t", "0.1"]) == 0
    member = cio.net_from_dict(json.loads(capsys.readouterr().out))
    assert member.m == net.m and member.n == net.n
    assert not np.allclose(member.vertices, net.vertices, atol=1e-6)


def test_cli_deform_frames(tmp_path, rng, capsys):
    path = _save_net(tmp_path, "n.json", _gen.class_ii_net(rng, 2, 3))
    out = tmp_path / "frames"
    assert cli.main(["deform", path, "--t-min", "-0.05", "--t-max", "0.2",
                     "--samples", "4", "--out", str(out)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["frames"] == 4
    files = sorted(f.name for f in out.iterdir())
    assert files == [f"frame_{k:04d}.json" for k in range(4)]
    for f in files:
        cio.load_net(str(out / f))


def test_cli_deform_rigid_net_fails_with_faces(tmp_path, rng, capsys):
    path = _save_net(tmp_path, "n.json", _gen.perturbed_square(rng, 3, 3))
    assert cli.main(["deform", path, "--t", "0.1"]) == 1
    err = capsys.readouterr().err
    assert "not deformable" in err and "(" in err


def test_cli_dual_isotropic(tmp_path, rng, capsys):
    net = _gen.lift_with_random_heights(rng, _gen.class_ii_net(rng, 3, 3))
    path = _save_net(tmp_path, "n.json", net)
    out = tmp_path / "dual.json"
    assert cli.main(["dual", path, "--isotropic", "--out", str(out)]) == 0
    dual = cio.load_net(str(out))
    assert (dual.m, dual.n) == (net.m - 1, net.n - 1)
    capsys.readouterr()


def test_cli_dual_christoffel(tmp_path, rng, capsys):
    path = _save_net(tmp_path, "n.json", _gen.class_ii_net(rng, 3, 3))
    assert cli.main(["dual", path]) == 0
    dual = cio.net_from_dict(json.loads(capsys.readouterr().out))
    assert (dual.m, dual.n) == (3, 3)


def test_cli_complete_l(tmp_path, rng, capsys):
    l = _gen.class_ii_l_shape(rng, 3, 3)
    spec = {"class": "ii",
            "points": {f"{i},{j}": [float(x) for x in p]
                       for (i, j), p in l.points.items()}}
    path = _write(tmp_path, "l.json", spec)
    assert cli.main(["complete-l", path]) == 0
    net = cio.net_from_dict(json.loads(capsys.readouterr().out))
    assert (net.m, net.n) == (3, 3)
    # --class beats the file key but a bad match is a real error
    assert cli.main(["complete-l", path, "--class", "i"]) == 1


def test_cli_gen_cone_cylinder(tmp_path, rng, capsys):
    data = _gen.cone_cylinder_data(rng, 3, 4)
    spec = {"kind": "cone_cylinder", "a": data.a.tolist(),
            "sigma": data.sigma.tolist(), "b": data.b.tolist()}
    path = _write(tmp_path, "gen.json", spec)
    assert cli.main(["gen", path]) == 0
    net = cio.net_from_dict(json.loads(capsys.readouterr().out))
    assert (net.m, net.n) == (3, 4)


def test_cli_sample_smooth(tmp_path, capsys):
    spec = {
        "a": {"kind": "poly", "coeffs": [[0, 0, 0], [1, 0, 0.2], [0, 0.3, 0]]},
        "sigma": {"kind": "poly", "coeffs": [1.0, 0.25]},
        "b": {"kind": "trig", "cos": [[1, 0, 0], [0, 0, 0.3]],
              "sin": [[0, 1, 0], [0, 0, 0]]},
        "domain": [[0.0, 1.2], [0.2, 1.4]],
    }
    path = _write(tmp_path, "smooth.json", spec)
    assert cli.main(["sample-smooth", path, "--grid", "5x6", "--t", "0.3"]) == 0
    net = cio.net_from_dict(json.loads(capsys.readouterr().out))
    assert (net.m, net.n, net.dim) == (5, 6, 3)
    assert cli.main(["sample-smooth", path, "--grid", "bogus"]) == 2
    capsys.readouterr()


def test_cli_export_obj(tmp_path, rng, capsys):
    path = _save_net(tmp_path, "n.json", _gen.class_ii_net(rng, 2, 2))
    out = tmp_path / "mesh.obj"
    assert cli.main(["export-obj", path, "--out", str(out)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["vertices"] == 9 and rep["faces"] == 4
    assert out.read_text().startswith("# net 2 2\n")


def test_cli_curvature_csv(tmp_path, capsys):
    xs = np.arange(5.0)
    ii, jj = np.meshgrid(xs, xs, indexing="ij")
    g = np.stack([ii, jj, 0.5 * (ii * ii + jj * jj)], axis=2)
    path = _save_net(tmp_path, "graph.json", net_from_grid(g))
    assert cli.main(["curvature", path]) == 0
    rows = capsys.readouterr().out.strip().splitlines()
    k = np.array([[float(x) for x in row.split(",")] for row in rows])
    assert k.shape == (3, 3)
    assert np.max(np.abs(k - 1.0)) < 1e-12

    tilted = _save_net(tmp_path, "tilted.json", _gen.lift_with_random_heights(
        np.random.default_rng(7), _gen.class_ii_net(np.random.default_rng(7), 3, 3)))
    assert cli.main(["curvature", tilted]) == 1
    assert "graph" in capsys.readouterr().err


def test_cli_tol_env_override(tmp_path, rng, capsys, monkeypatch):
    net = _gen.lift_with_random_heights(rng, _gen.class_ii_net(rng, 2, 2))
    g = net.grid().copy()
    g[1, 1, 2] += 2e-7  # small planarity defect on the interior vertex
    path = _save_net(tmp_path, "warped.json", net_from_grid(g))
    monkeypatch.delenv("COMBESCURE_TOL", raising=False)
    assert cli.main(["validate", path]) == 1
    capsys.readouterr()
    monkeypatch.setenv("COMBESCURE_TOL", "1e-4")
    assert cli.main(["validate", path]) == 0
    capsys.readouterr()
    # explicit --tol wins over the environment
    assert cli.main(["validate", path, "--tol", "1e-12"]) == 1
    capsys.readouterr()
