"""The end of the kink-antikink descent.

Continuing the attractive march to r = 0 the two kinks merge and the field
falls toward the vacuum: the midpoint crossing disappears and the energy
keeps decreasing.
"""

import numpy as np

from kinkstatics import PairKind, RelaxationConfig, make_phi4, solve_pair

model = make_phi4()
table, snaps = solve_pair(model, PairKind.KINK_ANTIKINK, RelaxationConfig.for_model(model, 3.0, 0.0))
for target in (3.0, 2.0, 1.5, 1.0, 0.5, 0.0):
    i = table.at(target)
    sup = np.max(np.abs(snaps[i].profile.values + 1))
    nd = table.natural_distance[i]
    print(f"r = {table.r[i]:.2f}  E = {table.E_full[i]:.5f}  sup|Phi+1| = {sup:.4f}  "
          f"distance = {'none' if nd is None else f'{nd:.3f}'}")
