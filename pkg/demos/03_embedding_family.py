"""A continuous family of metric spaces through the anchors.

Each parameter s in the unit square produces a finite space F(s, k): a
weighted product of the anchors, wedged with a spider whose legs encode s.
At an anchor the spider collapses and F is isometric to that anchor;
elsewhere the spider tags the space so different s give different spaces.
"""

from gromovkit.family import (
    build_F,
    continuity_sweep,
    default_config,
    injectivity_sweep,
    rho,
    select_branch,
)
from gromovkit.gh import gh_exact

cfg = default_config(grid=8)
print(f"{cfg.n_anchors} anchors of sizes {[len(X) for X in cfg.anchors]}, branches m = {cfg.m}")

for i, v in enumerate(cfg.anchor_points):
    print(f"GH(F(v_{i}, 1), X_{i}) = {gh_exact(build_F(v, 1, cfg), cfg.anchors[i]).value}")

s = (0.4, 0.7)
print(f"F{s} has {len(build_F(s, 1, cfg))} points; spider legs {tuple(round(x, 5) for x in rho(s, 1, cfg).a[:3])} ...")

k = select_branch(cfg, 8)
print("branch avoiding anchor collisions:", k)

inj = injectivity_sweep(cfg, 8, k=k)
print(f"fingerprint separation over the 8x8 grid: {inj.min_separation:.3e}")

for grid in (8, 15):
    edges, _ = continuity_sweep(cfg, grid, k=k)
    print(f"grid {grid:>2}: largest GH bound across a mesh edge {edges[:, 2].max():.4f}")
