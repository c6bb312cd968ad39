"""From one deformable net to its dual, its deformation family, and the
isotropic side of the picture.

    python3 demos/duality_tour.py
"""
import numpy as np

import combescure as cb

rng = np.random.default_rng(7)

# grow an L-shaped seed whose faces satisfy the equal-opposite-ratio
# condition, then complete it to a full net (unique completion)
l, m, n = None, 3, 3
while l is None:
    try:
        pts = {}
        base = cb.quad((0, 0), (1, 0), (1.1, 1.05), (-0.05, 0.95))
        pts[(0, 0)], pts[(1, 0)] = base.vertices[0], base.vertices[1]
        pts[(1, 1)], pts[(0, 1)] = base.vertices[2], base.vertices[3]
        for fj in range(1, n):
            prev = cb.quad(pts[(0, fj - 1)], pts[(1, fj - 1)], pts[(1, fj)], pts[(0, fj)])
            r = cb.opposite_ratio(prev, "CD")
            c = pts[(1, fj)] + (pts[(1, fj)] - pts[(1, fj - 1)]) + rng.uniform(-0.1, 0.1, 2)
            built = cb.quad_from_ratios(pts[(0, fj)], pts[(1, fj)], c, r, rng.uniform(0.9, 1.1))
            pts[(1, fj + 1)], pts[(0, fj + 1)] = c, built.vertices[3]
        for fi in range(1, m):
            prev = cb.quad(pts[(fi - 1, 0)], pts[(fi, 0)], pts[(fi, 1)], pts[(fi - 1, 1)])
            r = cb.opposite_ratio(prev, "BC")
            c = pts[(fi, 0)] + (pts[(fi, 0)] - pts[(fi - 1, 0)]) + rng.uniform(-0.1, 0.1, 2)
            built = cb.quad_from_ratios(pts[(fi, 1)], pts[(fi, 0)], c, r, rng.uniform(0.9, 1.1))
            pts[(fi + 1, 0)], pts[(fi + 1, 1)] = c, built.vertices[3]
        l = cb.LShapedNet(m, n, pts)
        l.check()
    except cb.CombescureError:
        l = None

net = cb.complete_L(l, "ii")
print("completed", net.m, "x", net.n, "net; classification:")
print(" ", cb.classify.classify(net).as_dict())

# Christoffel dual: non-corresponding diagonals parallel, areas equal with
# opposite sign, mixed areas zero
dual = cb.christoffel_dual(net)
q, qd = net.face(1, 1), dual.face(1, 1)
print("face (1,1): area", round(cb.oriented_area(q), 6),
      " dual area", round(cb.oriented_area(qd), 6),
      " mixed", f"{cb.mixed_area(q, qd):.2e}")

# the pair spans a cosh/sinh family of area-preserving deformations
fam = cb.family_from_dual(net, dual)
lo, hi = cb.estimate_domain(fam)
member = fam.net_at(0.5 * hi)
areas0 = np.array([cb.oriented_area(f) for f in net.faces()])
areas1 = np.array([cb.oriented_area(f) for f in member.faces()])
print(f"family member at t={0.5 * hi:.3f}: parallel={cb.are_parallel_nets(net, member)}, "
      f"area drift={np.max(np.abs((areas1 - areas0) / areas0)):.2e}")

# lift to 3d and look at the isotropic dual: its top view does not move
# while the family deforms
z_row = rng.uniform(-0.1, 0.1, net.n + 1)
z_col = np.concatenate([[z_row[0]], rng.uniform(-0.1, 0.1, net.m)])
lift = cb.lift_planar_net(net, z_row, z_col)
fam3 = cb.family_from_dual(lift)
lo3, hi3 = cb.estimate_domain(fam3)
inv = cb.dual_family_invariants(fam3, np.linspace(0.4 * lo3, 0.4 * hi3, 9))
print("isotropic dual of the lifted family: top-view drift over 9 samples =",
      f"{inv['top_view_drift']:.2e}")
