"""Tailsitter UAV flight dynamics, guidance, and control simulation.

A deterministic 6-DOF simulator for a twin-motor, twin-elevon tailsitter
with a polynomial (phi-theory style) aerodynamic model, a wind-aware
differential-flatness transform, INDI acceleration/attitude inner loops,
and two interchangeable guidance strategies: parametric guiding-vector-
field path following and trajectory tracking.

Subpackages map to the main functional blocks:

- frames:        quaternion / rotation / Euler Z-X-Y algebra
- vehicle:       force-moment model and rigid-body equations of motion
- wind:          mean wind, Dryden gusts, wind-estimate error model
- paths:         parametric curves and arc-length timed trajectories
- flatness:      flat-output to attitude/thrust/rate/actuator transform
- inner_loop:    INDI acceleration and attitude controllers
- gvf_guidance:  extended parametric guiding vector field
- traj_guidance: trajectory-tracking PD baseline
- engine:        fixed-step simulation loop
- harness:       scenarios, Monte-Carlo campaigns, metrics, CSV output
"""

__version__ = "0.1.0"
