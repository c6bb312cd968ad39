"""Build a cone-cylinder net, deform it, export the frames as OBJ.

Run from the repo root:

    python3 demos/deformation_sweep.py out/
"""
import pathlib
import sys

import numpy as np

import combescure as cb

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")
out.mkdir(parents=True, exist_ok=True)

# generator data: a polyline of row anchors a_i, one scale sigma_i per row,
# and a column polyline b_j. Vertices are a_i + sigma_i * b_j.
a = np.array([[0.0, 0.0, 0.0], [0.1, 1.0, 0.2], [-0.1, 2.1, 0.3], [0.0, 3.0, 0.1]])
sigma = np.array([1.0, 1.25, 0.85, 1.1])
b = np.array([[0.0, 0.0, 0.0], [1.0, 0.1, 0.1], [2.1, 0.0, 0.25], [3.0, -0.1, 0.2], [4.0, 0.0, 0.0]])
data = cb.ConeCylinderData(a, sigma, b)

net = cb.gen_cone_cylinder(data)
verdict = cb.classify.classify(net)
print("net:", net.m, "x", net.n, "faces, dim", net.dim)
print("classification:", verdict.as_dict())

fam = cb.family_from_cone_cylinder(data)
lo, hi = cb.estimate_domain(fam)
print(f"admissible t window ~ ({lo:.3f}, {hi:.3f})")

base_areas = np.array([abs(cb.oriented_area(q)) for q in net.faces()])
for k, t in enumerate(np.linspace(0.6 * lo, 0.6 * hi, 7)):
    member = fam.net_at(t)
    areas = np.array([abs(cb.oriented_area(q)) for q in member.faces()])
    drift = np.max(np.abs(areas - base_areas) / base_areas)
    path = out / f"sweep_{k:02d}.obj"
    cb.io.export_obj(member, path)
    print(f"t={t:+.3f}  parallel={cb.are_parallel_nets(net, member)}  "
          f"max face-area drift={drift:.2e}  -> {path}")
