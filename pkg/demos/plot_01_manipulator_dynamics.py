"""
Manipulator dynamics
====================

Inspect the coefficient matrices of the cylindrical arm, check the
gravity load on the vertical joint, and confirm that forward and inverse
dynamics undo each other.
"""

import numpy as np

from afsmc import dynamics
from afsmc.dynamics import GeneralizedForces, JointState, ManipulatorParams

params = ManipulatorParams()
state = JointState([np.pi / 3, 0.2, 1.5], [0.4, -0.1, 0.3])
terms = dynamics.compute_terms(params, state)

np.set_printoptions(precision=4, suppress=True)
print("A(q) =\n", terms.a)
print("B(q) =\n", terms.b)
print("C(q) =\n", terms.c)
print("D    =", terms.d)

###############################################################################
# Only joint 2 carries gravity; its constant is g (m2 + m3).

print(f"D2 = {terms.d[1]:.6f} N")

###############################################################################
# Released at rest with zero torque, joint 2 falls with -D2 / m3.

qdd = dynamics.forward_dynamics(params, JointState([0.0, 0.0, 1.0]), GeneralizedForces(np.zeros(3)))
print("free-fall acceleration:", qdd)

###############################################################################
# The inverse problem gives the torque for a chosen acceleration;
# feeding it forward recovers that acceleration.

want = np.array([1.0, -2.0, 0.5])
tau = dynamics.inverse_dynamics(params, state, want).tau
back = dynamics.forward_dynamics(params, state, GeneralizedForces(tau))
print("tau =", tau, " recovered qdd =", back, " error", np.abs(back - want).max())

###############################################################################
# A11 changes sign with theta1, so the printed inertia matrix goes singular
# on a curve in (theta1, q3).  Scan det A over a grid.

th = np.linspace(-np.pi, np.pi, 181)
q3 = np.linspace(0.0, 3.0, 61)
det = np.array([[dynamics.det3(dynamics.terms_from_config(params, a, b).a) for b in q3] for a in th])
print(f"det A ranges over [{det.min():.1f}, {det.max():.1f}]; {np.mean(det <= 0):.0%} of the grid is non-positive")
