"""Command-line front end.

Subcommands: validate, classify, deform, dual, complete-l, gen,
sample-smooth, export-obj, curvature. JSON verdicts go to stdout, nets and
frames to files. Exit codes: 0 success, 1 domain errors (bad geometry,
unreadable input), 2 usage errors. Output is deterministic; there is no
randomness in here, generators take explicit numeric specs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import construct, deform, io as _io, isotropic, smooth
from .classify import classify as _classify_net, ratio_tables as _ratio_tables
from .errors import CombescureError
from .nets import Tolerances, validate as _validate


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    return obj


def _emit(obj):
    print(_io.dump_json(_jsonable(obj)))


def _tol_from(args) -> Tolerances:
    if getattr(args, "tol", None) is not None:
        return Tolerances.uniform(args.tol)
    return Tolerances.default()


def _add_tol(sp):
    sp.add_argument("--tol", type=float, default=None,
                    help="uniform tolerance override (else COMBESCURE_TOL, else defaults)")


def _write_or_print_net(net, out):
    if out:
        _io.save_net(net, out)
        _emit({"written": out, "m": net.m, "n": net.n, "dim": net.dim})
    else:
        _emit(_io.net_to_dict(net))


def _parse_grid(text):
    try:
        m_s, n_s = text.lower().split("x")
        m, n = int(m_s), int(n_s)
    except ValueError:
        raise _Usage(f"--grid expects MxN, got {text!r}") from None
    if m < 1 or n < 1:
        raise _Usage("--grid needs m,n >= 1")
    return m, n


class _Usage(Exception):
    pass


def _cmd_validate(args):
    net = _io.load_net(args.net)
    rep = _validate(net, _tol_from(args))
    _emit({"ok": rep.ok, "summary": rep.summary(),
           "worst_planarity": rep.worst_planarity,
           "worst_convexity": rep.worst_convexity,
           "failures": rep.failures})
    return 0 if rep.ok else 1


def _cmd_classify(args):
    net = _io.load_net(args.net)
    verdict = _classify_net(net, class_tol=args.class_tol, tol=_tol_from(args))
    out = verdict.as_dict()
    if args.tables:
        h, v = _ratio_tables(net, tol=_tol_from(args))
        out["H"] = h.tolist()
        out["V"] = v.tolist()
    _emit(out)
    return 0


def _cmd_deform(args):
    net = _io.load_net(args.net)
    tol = _tol_from(args)
    if args.t is not None:
        ts = [args.t]
    elif args.t_min is not None and args.t_max is not None:
        ts = list(np.linspace(args.t_min, args.t_max, args.samples))
    else:
        raise _Usage("give either --t, or --t-min and --t-max (with --samples)")
    fam = deform.family_from_propagation(net, tol=tol)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        names = []
        for k, t in enumerate(ts):
            member = fam.net_at(t)
            name = os.path.join(args.out, f"frame_{k:04d}.json")
            _io.save_net(member, name)
            names.append(name)
        _emit({"frames": len(names), "dir": args.out, "t": list(ts)})
        return 0
    if len(ts) != 1:
        raise _Usage("multiple samples need --out")
    _emit(_io.net_to_dict(fam.net_at(ts[0])))
    return 0


def _cmd_dual(args):
    net = _io.load_net(args.net)
    tol = _tol_from(args)
    if args.isotropic:
        out_net = isotropic.dual_net(net, tol=tol)
    else:
        out_net = deform.christoffel_dual(net, tol=tol)
    _write_or_print_net(out_net, args.out)
    return 0


def _cmd_complete_l(args):
    with open(args.lshape) as fp:
        data = json.load(fp)
    lnet = _io.l_shape_from_dict(data)
    klass = args.klass or data.get("class")
    if klass not in ("i", "ii"):
        raise _Usage("give --class i or --class ii (or a 'class' key in the file)")
    net = construct.complete_L(lnet, klass, tol=_tol_from(args))
    _write_or_print_net(net, args.out)
    return 0


def _cmd_gen(args):
    with open(args.spec) as fp:
        data = json.load(fp)
    gen = _io.generator_from_dict(data)
    tol = _tol_from(args)
    if isinstance(gen, construct.ConeCylinderData):
        net = construct.gen_cone_cylinder(gen, tol=tol)
    else:
        klass = args.klass or data.get("class")
        if klass not in ("i", "ii"):
            raise _Usage("l_shape spec needs --class i|ii or a 'class' key")
        net = construct.complete_L(gen, klass, tol=tol)
    _write_or_print_net(net, args.out)
    return 0


def _cmd_sample_smooth(args):
    nets = _io.load_smooth_spec(args.spec)
    m, n = _parse_grid(args.grid)
    net = smooth.sample_smooth(nets, m, n, t=args.t, tol=_tol_from(args),
                               allow_negative=args.allow_negative_t)
    _write_or_print_net(net, args.out)
    return 0


def _cmd_export_obj(args):
    net = _io.load_net(args.net)
    _io.export_obj(net, args.out)
    _emit({"written": args.out, "vertices": (net.m + 1) * (net.n + 1),
           "faces": net.m * net.n})
    return 0


def _graph_spacing(net):
    """Steps (hx, hy) of a graph-form net: x depends on i only, y on j only."""
    g = net.grid()
    if net.dim != 3:
        raise CombescureError("curvature needs a 3D net in graph form")
    xs = g[:, :, 0]
    ys = g[:, :, 1]
    scale = max(1.0, float(np.max(np.abs(g))))
    if np.max(np.abs(xs - xs[:, :1])) > 1e-9 * scale:
        raise CombescureError("not a graph: x coordinate varies along j")
    if np.max(np.abs(ys - ys[:1, :])) > 1e-9 * scale:
        raise CombescureError("not a graph: y coordinate varies along i")
    hx = np.diff(xs[:, 0])
    hy = np.diff(ys[0, :])
    if np.max(np.abs(hx - hx[0])) > 1e-9 * scale or hx[0] <= 0:
        raise CombescureError("not a graph: x spacing is not uniform and increasing")
    if np.max(np.abs(hy - hy[0])) > 1e-9 * scale or hy[0] <= 0:
        raise CombescureError("not a graph: y spacing is not uniform and increasing")
    return float(hx[0]), float(hy[0])


def _cmd_curvature(args):
    net = _io.load_net(args.net)
    hx, hy = _graph_spacing(net)
    z = net.grid()[:, :, 2]
    k = isotropic.isotropic_gaussian_curvature(z, (hx, hy))
    lines = [",".join(f"{v:.17g}" for v in row) for row in k]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fp:
            fp.write(text)
        _emit({"written": args.out, "rows": k.shape[0], "cols": k.shape[1]})
    else:
        sys.stdout.write(text)
    return 0


def _parser():
    p = argparse.ArgumentParser(
        prog="combescure",
        description="Deformable quad nets: classification, deformation "
                    "families, duals, generators.")
    sub = p.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("validate", help="check planarity and convexity")
    sp.add_argument("net")
    _add_tol(sp)
    sp.set_defaults(run=_cmd_validate)

    sp = sub.add_parser("classify", help="deformability classes and residuals")
    sp.add_argument("net")
    sp.add_argument("--class-tol", type=float, default=1e-8)
    sp.add_argument("--tables", action="store_true",
                    help="include the opposite-ratio tables H and V")
    _add_tol(sp)
    sp.set_defaults(run=_cmd_classify)

    sp = sub.add_parser("deform", help="evaluate the deformation family")
    sp.add_argument("net")
    sp.add_argument("--t", type=float, default=None)
    sp.add_argument("--t-min", type=float, default=None)
    sp.add_argument("--t-max", type=float, default=None)
    sp.add_argument("--samples", type=int, default=5)
    sp.add_argument("--out", default=None, help="directory for frame_%%04d.json files")
    _add_tol(sp)
    sp.set_defaults(run=_cmd_deform)

    sp = sub.add_parser("dual", help="Christoffel dual, or isotropic polar dual")
    sp.add_argument("net")
    sp.add_argument("--isotropic", action="store_true")
    sp.add_argument("--out", default=None)
    _add_tol(sp)
    sp.set_defaults(run=_cmd_dual)

    sp = sub.add_parser("complete-l", help="extend an L-shaped net to a full net")
    sp.add_argument("lshape")
    sp.add_argument("--class", dest="klass", choices=("i", "ii"), default=None)
    sp.add_argument("--out", default=None)
    _add_tol(sp)
    sp.set_defaults(run=_cmd_complete_l)

    sp = sub.add_parser("gen", help="build a net from a generator spec")
    sp.add_argument("spec")
    sp.add_argument("--class", dest="klass", choices=("i", "ii"), default=None)
    sp.add_argument("--out", default=None)
    _add_tol(sp)
    sp.set_defaults(run=_cmd_gen)

    sp = sub.add_parser("sample-smooth", help="sample a smooth net (or family member)")
    sp.add_argument("spec")
    sp.add_argument("--grid", required=True, help="MxN faces")
    sp.add_argument("--t", type=float, default=0.0)
    sp.add_argument("--allow-negative-t", action="store_true")
    sp.add_argument("--out", default=None)
    _add_tol(sp)
    sp.set_defaults(run=_cmd_sample_smooth)

    sp = sub.add_parser("export-obj", help="write a Wavefront OBJ mesh")
    sp.add_argument("net")
    sp.add_argument("--out", required=True)
    sp.set_defaults(run=_cmd_export_obj)

    sp = sub.add_parser("curvature", help="isotropic curvature of a graph net, CSV")
    sp.add_argument("net")
    sp.add_argument("--out", default=None)
    sp.set_defaults(run=_cmd_curvature)

    return p


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.run(args)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except CombescureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
