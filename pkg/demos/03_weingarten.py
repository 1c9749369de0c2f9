# %% [markdown]
# # Linear Weingarten disks with K = 2 c0 H
#
# For p = 1 the critical disks include rotational linear Weingarten surfaces.
# They are generated from a closed-form first integral for the principal
# curvature chi, which runs from -c0 on the axis to -2 c0 / 3 on the boundary.
# The axis is a cone point, so the surface is only continuous there.

# %%
import math

from critical_disks.special_solutions import WeingartenSpec, weingarten_profile
from critical_disks.surface_geometry import gauss_bonnet_defect

# %%
for d in (1.5, 2.0, 4.0):
    w = weingarten_profile(WeingartenSpec(1.0, d))
    cone = 2 * math.pi * (1 - math.cos(w.profile.phi[0]))
    print(f"d={d}: L={w.profile.L:.6f} max|K-2cH|={abs(w.K_minus_2cH).max():.1e} "
          f"boundary kn={w.boundary_kn:.12f} chi in [{w.chi.min():.4f}, {w.chi.max():.4f}]")
    print(f"      Gauss-Bonnet defect {gauss_bonnet_defect(w.profile):.10f} = cone deficit {cone:.10f}")
