
# coding: utf-8

# # Reduced dynamics
#
# There are two ways to integrate the reduced flow of the main Hamiltonian. Projection evaluates the exact unreduced flow and reads off `z(t)`. The Darboux route integrates Hamilton's equations in `(qhat, phat)` with the implicit midpoint rule.

# In[1]:

import numpy as np

from sunn_reduction import BoundaryApproach, ModelParams, evolve_darboux, evolve_projection, z_of_angles

params = ModelParams(n=2, x=1.0, u=0.3, v=0.5)
phat0 = np.array([3.0, 0.3])
phases0 = np.ones(2, dtype=complex)
z0 = z_of_angles(params, phat0, phases0)
times = np.linspace(0.0, 5.0, 51)


# In[2]:

exact = evolve_projection(params, z0, 1, times)
print("max drift of h:", np.abs(exact.drift()).max())


# ## Implicit midpoint
#
# Energy error oscillates at order `h^2` without secular growth.

# In[3]:

for step in [0.02, 0.01]:
    traj = evolve_darboux(params, phat0, phases0, times, step)
    err = np.abs(traj.hamiltonian_value - traj.hamiltonian_value[0]).max()
    gap = np.abs(traj.points - exact.points).max()
    print(f"step {step}: energy error {err:.2e}, distance to projection {gap:.2e}")


# ## Crossing a wall
#
# The projected flow passes through points where some `z_j = 0` without trouble. The angle chart degenerates there, and the Darboux integrator refuses to continue.

# In[4]:

p2 = ModelParams(n=2, x=1.0, u=0.3, v=0.5)
z_cross = np.array([-0.05800288401971121 - 1.0197170871681231j, 0.1012546332725659 + 0.31593942460279256j])
traj = evolve_projection(p2, z_cross, 1, np.array([0.0, 2.0 - 1e-4, 2.0, 2.0 + 1e-4]))
print(np.abs(traj.points[:, 0]))


# In[5]:

from sunn_reduction import angles_of_z

ph, phases = angles_of_z(p2, z_cross)
try:
    evolve_darboux(p2, ph, phases, np.linspace(0, 3, 31), 1e-3)
except BoundaryApproach as exc:
    print("stopped:", exc)
