# %% [markdown]
# # Elastic boundary circles
#
# When the boundary is a planar circle, the boundary conditions collapse to a
# scalar equation for its curvature. With the quadratic density it is a cubic.

# %%
import math

import numpy as np

from critical_disks import Quadratic
from critical_disks.curve_geometry import frenet_evolve, rod_criticality, solve_circle_curvature
from critical_disks.special_solutions import conormal_closure

# %%
print("beta=4, no area term:", solve_circle_curvature(Quadratic(), 4.0))
print("beta=3, sigma=2, + sign:", solve_circle_curvature(Quadratic(), 3.0, 2.0, 1))

# %% [markdown]
# The unit circle is an elastic rod critical curve: its first integral V is constant.

# %%
circle = frenet_evolve(lambda s: 1.0 + 0 * s, lambda s: 0 * s, 2 * math.pi)
rod = rod_criticality(circle, Quadratic(), 0.0, 0.0, 1.0)
print("spread of V:", np.ptp(rod.V, axis=0), "critical:", rod.is_critical())
print("conormal closure on the flat disk:", conormal_closure(circle, circle.B[0]))
