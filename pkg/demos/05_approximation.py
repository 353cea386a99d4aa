"""Polynomial and fractal-polynomial approximation.

E is the grid minimax distance from f to polynomials of degree (m, n); E^a is
the distance to their fractal images.  The epsilon procedure picks a degree
and a scale so the fractal polynomial lands within a target error.
"""

# %%
import numpy as np

import fractalsurf as fs

net = fs.uniform_net(2)
L = fs.multiplication_operator(lambda x, y: 1 + x * (1 - x) * y * (1 - y))
f = lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y)

# %% E and E^alpha side by side
for m in (1, 2, 3):
    e = fs.best_approx(f, fs.poly_basis(m, m)).error
    ea = fs.best_fractal_approx(f, m, m, 0.3, L, net).error
    print(f"m=n={m}: E {e:.3e}   E^a {ea:.3e}")

# %% The chain bound linking E^a to E
r = fs.verify_approx_chain(f, 2, 2, 0.3, L, net)
print(f"E^a {r.e_alpha:.4f} <= {r.rhs:.4f}: {r.passed}")

# %% Epsilon procedure
res = fs.epsilon_fractal_polynomial(f, 0.05, L, net)
print(f"degree {res.degree} ({res.stage}), alpha {res.alpha:.3f} < {res.alpha_threshold:.3f}, "
      f"error {res.achieved_error:.4f}")

# %% Ditzian-Totik modulus of smoothness on [-1, 1]^2
for d in (0.4, 0.2, 0.1):
    print(d, fs.dt_modulus(lambda x, y: np.abs(x) ** 1.5 + y ** 2, d, d, sampling_res=64))
