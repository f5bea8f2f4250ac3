"""
The jet flow field and the steady cooling curve
===============================================

The environment's velocity field comes from an analytic stream function,
so it is divergence-free by construction and costs nothing to evaluate.
This script prints a few physically meaningful slices of it, then runs
the solver to steady state at three jet strengths to show the plate
temperature bracketing the 303 K setpoint.
"""

from jetcool.thermal import (FluidPlateProps, JetFlowModel, reynolds,
                             steady_surface_temperature)

props = FluidPlateProps()
print(f"nozzle width d = {props.d} m, channel height H = {props.H} m")
print(f"Reynolds number at 1.0 m/s: {reynolds(props, 1.0):.0f}")
print(f"Reynolds number at 0.1 m/s: {reynolds(props, 0.1):.0f}")

jet = JetFlowModel.for_props(props, v_jet=1.0)

# vertical velocity on the jet axis: close to -v_jet inside the core
u0, v0 = jet.velocity(0.0, props.H)
print(f"\ninflow velocity on the axis at the top: {v0:+.3f} m/s")

# the wall jet spreads sideways; sample the horizontal sweep above the plate
print("\nwall-jet profile 2 mm above the plate:")
for x_over_d in (0.5, 1.0, 1.5, 2.0, 3.0):
    u, v = jet.velocity(x_over_d * props.d, 0.002)
    print(f"  x = {x_over_d:3.1f} d: u = {u:+.3f} m/s, v = {v:+.3f} m/s")

# steady plate temperature under three jet levels; the setpoint sits
# between the weakest and strongest levels by calibration
print("\nsteady surface temperature (96x48 grid):")
for v_jet in (0.1, 0.5, 1.0):
    T = steady_surface_temperature(props, nx=96, ny=48, v_jet=v_jet)
    print(f"  v_jet = {v_jet:.1f} m/s: T_surf = {T:7.2f} K "
          f"(T* = {T / props.T_d:.4f})")
