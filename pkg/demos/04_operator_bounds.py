"""Norm bounds for the fractal operator f -> f^alpha and its inverse.

The map is linear and bounded.  Below a threshold on ||alpha|| it is
invertible, and the inverse can be applied with a Neumann series.
"""

# %%
import numpy as np

import fractalsurf as fs

net = fs.uniform_net(2)
f = lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y)
ops = {
    "multiplication": fs.multiplication_operator(lambda x, y: 1 + x * (1 - x) * y * (1 - y)),
    "composition": fs.composition_operator(lambda x, y: (x ** 2, y)),
    "Bernstein(3,3)": fs.bernstein_operator(3, 3),
}

# %% Norm bounds
for name, L in ops.items():
    nb = fs.operator_norm_bounds(L, 0.25)
    print(f"{name:15s} ||F|| <= {nb.fractal_norm_upper:.4f}  invertible below {nb.invertibility_threshold:.4f}"
          f"  ||F^-1|| <= {nb.inverse_norm_upper}")

# %% Neumann inverse round trip
g = lambda x, y: np.cos(2 * x) * (1 + y ** 3)
for name, L in ops.items():
    r = fs.apply_inverse_neumann(g, L, 0.25, net, grid_res=129)
    print(f"{name:15s} {r.terms} terms, ||F(F^-1 g) - g|| = {r.residual:.1e}")

# %% The L^p version of the perturbation bound
s = fs.build_alpha_surface(f, ops["multiplication"], 0.3, net)
for p in (1, 2, 4):
    r = fs.verify_lp_bound(f, s, p)
    print(f"p={p}: {r.lhs:.6f} <= {r.rhs:.6f}  {'ok' if r.passed else 'violated'}")

# %% Convergence as alpha -> 0 and as L_n -> Id
t = fs.convergence_table_alpha(f, ops["multiplication"], net, [0.5 / n for n in range(1, 9)], grid_res=129)
for a, e, b in t.rows():
    print(f"alpha {a:.4f}: error {e:.2e} bound {b:.2e}")
t = fs.convergence_table_operator(f, 0.3, net, [fs.bernstein_operator(n, n) for n in (2, 4, 8, 16)], grid_res=129)
for label, e, b in t.rows():
    print(f"{label}: error {e:.2e} bound {b:.2e}")
