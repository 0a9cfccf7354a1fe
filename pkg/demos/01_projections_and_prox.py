"""Projections onto norm-ball intersections and the induced shrinkage.

The penalty machinery never touches the penalty function directly: shrinking
a vector means subtracting its projection onto an intersection of per-group
l2 balls and linf boxes.  This script walks through the moving parts on
hand-sized vectors.
"""

import numpy as np

from graphreg import (
    GroupRadii,
    ProjectorKind,
    active_groups,
    project_group_exact,
    project_group_two_stage,
    project_intersection,
    project_l2,
    project_linf,
    prox_regularizer,
)

print("single-ball projections")
v = np.array([3.0, 4.0])
print("  clip (3,4) into the 1-box      ->", project_linf(v, 1.0))
print("  scale (3,4) into the 2.5-ball  ->", project_l2(v, 2.5))

print("\ntwo-stage projection: clip first, then scale")
v = np.array([2.0, 0.5])
two_stage = project_group_two_stage(v, tau=0.7, xi=0.6)
exact = project_group_exact(v, tau=0.7, xi=0.6)
print("  two-stage:", np.round(two_stage, 5), " |v - p| =", round(float(np.linalg.norm(v - two_stage)), 5))
print("  exact    :", np.round(exact, 5), " |v - p| =", round(float(np.linalg.norm(v - exact)), 5))
print("  both are feasible; the two-stage point is not always the nearest one.")

print("\noverlapping groups: cyclic passes vs Dykstra-corrected averaging")
groups = [np.array([0, 1]), np.array([1, 2])]
radii = GroupRadii(groups, l2=[1.0, 1.0], linf=[0.6, 0.6], n_features=3)
h = np.array([2.0, 2.0, 2.0])
act = active_groups(h, radii)
pocs = project_intersection(h, radii, act, ProjectorKind("two_stage_pocs"))
dyk = project_intersection(h, radii, act, ProjectorKind("dykstra"))
print("  active groups:", act.tolist())
print("  cyclic passes ->", np.round(pocs, 5), " dist", round(float(np.linalg.norm(pocs - h)), 5))
print("  dykstra       ->", np.round(dyk, 5), " dist", round(float(np.linalg.norm(dyk - h)), 5))

print("\nthe proximal step is input minus projection")
radii = GroupRadii([np.array([0, 1])], l2=[1.0], n_features=2)
h = np.array([3.0, 4.0])
beta, act = prox_regularizer(h, radii)
print("  prox of (3,4) under a unit l2 ball ->", beta, "(block soft threshold)")

h_small = np.array([0.3, 0.4])
beta, act = prox_regularizer(h_small, radii)
print("  a sub-radius input shrinks to zero ->", beta, "active:", act.tolist())
