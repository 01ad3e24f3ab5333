"""Spider trees: build one, perturb it, and read its legs back.

A spider R[a] is a star of unit-ish legs whose lengths a_i shrink like
4^-i.  Two spiders are close in the sup metric exactly when their sampled
distance matrices are close, and the leg lengths can be recovered from the
distance matrix alone, even after rescaling by an unknown factor K.
"""

import numpy as np

from gromovkit.spider import SpiderParams, build_spider, fingerprint, lipschitz_gap, tau

rng = np.random.default_rng(0)

a = SpiderParams.random(6, rng)
print("leg lengths a      :", np.round(a.a, 6))

R = build_spider(a, grid=16)
print(f"sampled spider     : {len(R.space)} points, tip of leg 3 is {R.space.labels[R.tip(3)]!r}")

# perturb within the cube and compare both sides of the Lipschitz bound
u = np.asarray(a.a) / np.asarray(SpiderParams.lower(6).a) - 1
b = SpiderParams.from_unit(np.clip(u + 0.01 * rng.standard_normal(6), 0, 1))
lhs, rhs = lipschitz_gap(a, b, grid=16)
print(f"tau(a, b)          : {tau(a, b):.3e}")
print(f"uniform gap        : {lhs:.3e}  <=  2 tau = {rhs:.3e}")

# hide the scale and permute the points; the fingerprint still finds a
K_true = 2.7
hidden = build_spider(a, grid=16, K=K_true).space
perm = rng.permutation(len(hidden))
shuffled = hidden.subspace(perm)
K, rec = fingerprint(shuffled)
print(f"recovered K        : {K:.12f} (true {K_true})")
print(f"max rel error in a : {np.max(np.abs(np.asarray(rec) - a.a) / a.a):.2e}")
