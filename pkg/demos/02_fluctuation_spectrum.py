"""Bound states of small oscillations around a kink.

Discretising L = -d^2/dx^2 + U''(u_c) gives a tridiagonal matrix whose
lowest eigenvalues are the translation zero mode and, for phi^4, the shape
mode at 3.  Sine-Gordon has only the zero mode below the continuum at m^2.
"""

from kinkstatics import Grid1D, fluctuation_operator, get_model, lowest_eigenpairs

for name in ("phi4", "sine-gordon"):
    model = get_model(name)
    m2 = model.mass_scale ** 2
    grid = Grid1D.from_spacing(-20.0, 20.0, 0.01)
    pairs = lowest_eigenpairs(fluctuation_operator(model, grid), 4)
    bound = [lam for lam, _ in pairs if lam < m2]
    print(f"{name}: continuum threshold {m2:g}, bound states {[round(b, 6) for b in bound]}")
