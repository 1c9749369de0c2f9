# %% [markdown]
# # Spherical caps as critical disks
#
# A spherical cap spanning a circle of curvature kappa_o is critical for the
# p-Willmore energy only on special parameter branches. `cap_criticality`
# returns the branch data and `build_cap` realises the cap, then checks every
# residual on it.

# %%
from critical_disks import Quadratic, cap_criticality, build_cap
from critical_disks.errors import InfeasibleCap

# %% [markdown]
# Branch data for p = 1, 2, 3. For p = 2 a nonzero spontaneous curvature is
# overridden and the override is flagged.

# %%
for p, kappa_o, c0 in [(1, 2.0, -1.0), (2, 1.0, 0.4), (3, 3.0, 1.0)]:
    c = cap_criticality(p, kappa_o, 1.0, c0)
    print(f"p={p}: H_o={c.H_o:+.4f} eta={c.eta:+.4f} c0={c.c0:+.2f} forced={c.c0_forced}")

# %% [markdown]
# Realise the caps with the quadratic boundary density (beta = kappa_o^2) and
# print the worst residual of each.

# %%
for p, c0, beta in [(1, -1.0, 4.0), (2, 0.0, 1.0), (3, 1.0, 9.0), (4, 1.0, 9.0), (5, 1.0, 9.0)]:
    cap = build_cap(p, 1.0, c0, Quadratic(), beta)
    r = cap.report
    worst = max(abs(v) for v in (r.el1_max, r.el2, r.el3, r.el4))
    print(f"p={p}: L={cap.profile.L:.6f} worst residual={worst:.1e} "
          f"Gauss-Bonnet defect={r.extra['gauss_bonnet_defect']:.1e}")

# %% [markdown]
# A circle that is too tight for the sphere of the branch cannot bound a cap.

# %%
try:
    build_cap(3, 1.0, 1.0, Quadratic(), 1.0, kappa_o=1.0)
except InfeasibleCap as exc:
    print("infeasible:", exc)
