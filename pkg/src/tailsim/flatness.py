"""Flat-output to attitude, thrust, angular rate, and actuator commands.

Given the desired acceleration/jerk of the position output, the yaw
angle and rate, and the (estimated) wind, the transform recovers:

- roll/pitch of the Z-X-Y attitude plus the signed specific thrust,
  from the force balance of the simplified vehicle model (lateral drag,
  velocity pitching moment, and elevon-mass terms set to zero),
- the body angular rate, by analytic differentiation of the attitude
  equations,
- propeller speeds and elevon deflections, by inverting the thrust and
  the 2x2 yaw/pitch moment system.

Wind enters only through the airmass-relative velocity v_a = v - v_w,
so the transform is invariant under a common shift of (v, v_w).

The roll and pitch equations each carry a pi-ambiguity. Roll is fixed by
keeping the intermediate y-axis on the side of the vehicle's current
lateral axis; pitch by requiring a physically realizable thrust
(tau / c_z2 >= 0). Near either boundary the previous command wins,
which keeps the commanded attitude continuous along a trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frames import euler_zxy_to_quat, rot_x, rot_z, wrap_angle
from .vehicle import GRAVITY, ControlInput, ModelCoefficients

G_NED = np.array([0.0, 0.0, GRAVITY])

# Ambiguity bands for the branch hysteresis.
ROLL_DOT_BAND = 0.05     # |b_y . y_axis| below this keeps the previous branch
TAU_BAND = 0.05          # m/s^2; |tau| below this keeps the previous branch
RATE_DENOM_MIN = 1e-12


class FlatnessError(RuntimeError):
    """Base class for transform failures."""


class DegenerateAttitudeError(FlatnessError):
    """Roll or pitch atan2 arguments both vanished."""


class DegenerateRateError(FlatnessError):
    """A rate denominator fell below the representable threshold."""


class InfeasibleThrustError(FlatnessError):
    """Requested thrust/roll moment has no real propeller speeds."""


class SingularElevonError(FlatnessError):
    """The elevon moment system is singular (no propwash, no airflow)."""


@dataclass
class FlatSample:
    """Flat output derivatives and wind context for one transform call."""

    a: np.ndarray                    # desired acceleration, m/s^2
    j: np.ndarray                    # desired jerk, m/s^3
    v: np.ndarray                    # desired velocity, m/s
    psi: float                       # yaw, rad
    psi_dot: float                   # yaw rate, rad/s
    v_w: np.ndarray = field(default_factory=lambda: np.zeros(3))
    v_w_dot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    delta_sum: float = 0.0           # assumed-known elevon sum delta1+delta2


@dataclass
class AttitudeThrust:
    """Commanded attitude (Z-X-Y angles + quaternion) and specific thrust."""

    psi: float
    phi: float
    theta: float
    q_c: np.ndarray
    tau: float


class FlatnessTransform:
    """Transform instance owning the branch-hysteresis memory.

    One instance per control loop (or per feedforward chain); not meant
    to be shared across concurrent consumers.
    """

    def __init__(self, coeffs: ModelCoefficients, v_a_min: float = 1e-6):
        self.c = coeffs
        self.v_a_min = v_a_min
        self._prev_phi: float | None = None
        self._prev_theta: float | None = None

    def reset(self, phi: float | None = None, theta: float | None = None):
        self._prev_phi = phi
        self._prev_theta = theta

    # -- attitude and specific thrust ------------------------------------

    def attitude_thrust(
        self,
        f_i: np.ndarray,
        v_a: np.ndarray,
        psi: float,
        delta_sum: float,
        current_b_y: np.ndarray | None = None,
    ) -> AttitudeThrust:
        """Roll, pitch, and signed thrust realizing the specific force f_i.

        f_i is the required specific force in the inertial frame (for a
        flat sample, a - g). current_b_y picks the roll branch; when
        None, continuity with the previous call (or roll nearest zero)
        decides.
        """
        c = self.c
        cps, sps = math.cos(psi), math.sin(psi)
        beta_x = -sps * f_i[0] + cps * f_i[1]
        beta_z = f_i[2]
        if beta_x * beta_x + beta_z * beta_z < 1e-24:
            raise DegenerateAttitudeError("required force vanishes; roll undefined")
        phi = self._pick_roll(wrap_angle(-math.atan2(beta_x, beta_z)), psi, current_b_y)

        r_i_phi = (rot_z(psi) @ rot_x(phi)).T
        f_phi = r_i_phi @ f_i
        va_phi = r_i_phi @ v_a
        nva = float(np.linalg.norm(v_a))

        cx3_term = c.c_x3 / (2.0 * c.c_z2)
        sigma_x = (
            f_phi[0]
            - c.c_x1 * nva * va_phi[0]
            - c.c_x2 * delta_sum * nva * va_phi[2]
            - cx3_term * delta_sum * (f_phi[2] - c.c_z1 * nva * va_phi[2])
        )
        sigma_z = (
            f_phi[2]
            - c.c_x1 * nva * va_phi[2]
            + c.c_x2 * delta_sum * nva * va_phi[0]
            + cx3_term * delta_sum * (f_phi[0] - c.c_z1 * nva * va_phi[0])
        )
        if sigma_x * sigma_x + sigma_z * sigma_z < 1e-24:
            raise DegenerateAttitudeError("pitch atan2 arguments vanish")

        theta, tau = self._pick_pitch(
            wrap_angle(math.atan2(sigma_x, sigma_z)), f_phi, va_phi, nva
        )

        self._prev_phi = phi
        self._prev_theta = theta
        q_c = euler_zxy_to_quat(psi, phi, theta)
        return AttitudeThrust(psi=psi, phi=phi, theta=theta, q_c=q_c, tau=tau)

    def _pick_roll(self, phi_a: float, psi: float, b_y: np.ndarray | None) -> float:
        phi_b = wrap_angle(phi_a + math.pi)
        if b_y is not None:
            # y-axis of the yaw-roll intermediate frame in inertial axes
            sps, cps = math.sin(psi), math.cos(psi)
            ya = np.array([-sps * math.cos(phi_a), cps * math.cos(phi_a), math.sin(phi_a)])
            dot = float(np.dot(b_y, ya))
            if dot > ROLL_DOT_BAND:
                return phi_a
            if dot < -ROLL_DOT_BAND:
                return phi_b
        if self._prev_phi is None:
            return phi_a if abs(phi_a) <= abs(phi_b) else phi_b
        da = abs(wrap_angle(phi_a - self._prev_phi))
        db = abs(wrap_angle(phi_b - self._prev_phi))
        return phi_a if da <= db else phi_b

    def _tau_of(self, theta: float, f_phi, va_phi, nva: float) -> float:
        st, ct = math.sin(theta), math.cos(theta)
        return (
            st * f_phi[0] + ct * f_phi[2]
            - self.c.c_z1 * nva * (st * va_phi[0] + ct * va_phi[2])
        )

    def _pick_pitch(self, theta_a: float, f_phi, va_phi, nva: float) -> tuple[float, float]:
        tau_a = self._tau_of(theta_a, f_phi, va_phi, nva)
        theta_b = wrap_angle(theta_a + math.pi)
        # the pi-shifted branch flips the thrust sign exactly
        feasible_a = tau_a * self.c.c_z2 >= 0.0
        if abs(tau_a) < TAU_BAND and self._prev_theta is not None:
            da = abs(wrap_angle(theta_a - self._prev_theta))
            db = abs(wrap_angle(theta_b - self._prev_theta))
            return (theta_a, tau_a) if da <= db else (theta_b, -tau_a)
        return (theta_a, tau_a) if feasible_a else (theta_b, -tau_a)

    def flat_to_attitude_thrust(
        self, s: FlatSample, current_b_y: np.ndarray | None = None
    ) -> AttitudeThrust:
        """Attitude and thrust for a flat sample (f = a - g, v_a = v - v_w)."""
        return self.attitude_thrust(
            s.a - G_NED, s.v - s.v_w, s.psi, s.delta_sum, current_b_y
        )

    # -- angular rate -----------------------------------------------------

    def flat_to_rates(self, s: FlatSample, at: AttitudeThrust) -> np.ndarray:
        """Feedforward body angular rate from the attitude time derivatives.

        Differentiates the roll and pitch equations along the flat
        trajectory (f_dot = j, v_a_dot = a - v_w_dot) and maps the Euler
        rates into the body frame.
        """
        c = self.c
        f_i = s.a - G_NED
        f_dot = s.j
        v_a = s.v - s.v_w
        v_a_dot = s.a - s.v_w_dot
        psi, phi, theta = at.psi, at.phi, at.theta
        cps, sps = math.cos(psi), math.sin(psi)

        beta_x = -sps * f_i[0] + cps * f_i[1]
        beta_z = f_i[2]
        den_b = beta_x * beta_x + beta_z * beta_z
        if den_b < RATE_DENOM_MIN:
            raise DegenerateRateError("roll-rate denominator vanished")
        beta_x_dot = (
            -cps * s.psi_dot * f_i[0]
            - sps * f_dot[0]
            - sps * s.psi_dot * f_i[1]
            + cps * f_dot[1]
        )
        beta_z_dot = f_dot[2]
        phi_dot = -(beta_x_dot * beta_z - beta_x * beta_z_dot) / den_b

        r_phi_i = rot_z(psi) @ rot_x(phi)
        r_i_phi = r_phi_i.T
        # d/dt of R_i^phi via the angle rates
        drz = np.array([[-sps, -cps, 0.0], [cps, -sps, 0.0], [0.0, 0.0, 0.0]])
        sph, cph = math.sin(phi), math.cos(phi)
        drx = np.array([[0.0, 0.0, 0.0], [0.0, -sph, -cph], [0.0, cph, -sph]])
        r_phi_i_dot = drz @ rot_x(phi) * s.psi_dot + rot_z(psi) @ drx * phi_dot
        r_i_phi_dot = r_phi_i_dot.T

        f_phi = r_i_phi @ f_i
        f_phi_dot = r_i_phi_dot @ f_i + r_i_phi @ f_dot
        va_phi = r_i_phi @ v_a
        va_phi_dot = r_i_phi_dot @ v_a + r_i_phi @ v_a_dot
        nva = float(np.linalg.norm(v_a))
        nva_dot = float(np.dot(v_a, v_a_dot)) / nva if nva > self.v_a_min else 0.0

        cx3_term = c.c_x3 / (2.0 * c.c_z2)
        d = s.delta_sum
        sigma_x = (
            f_phi[0]
            - c.c_x1 * nva * va_phi[0]
            - c.c_x2 * d * nva * va_phi[2]
            - cx3_term * d * (f_phi[2] - c.c_z1 * nva * va_phi[2])
        )
        sigma_z = (
            f_phi[2]
            - c.c_x1 * nva * va_phi[2]
            + c.c_x2 * d * nva * va_phi[0]
            + cx3_term * d * (f_phi[0] - c.c_z1 * nva * va_phi[0])
        )
        sigma_x_dot = (
            f_phi_dot[0]
            - c.c_x1 * (nva_dot * va_phi[0] + nva * va_phi_dot[0])
            - c.c_x2 * d * (nva_dot * va_phi[2] + nva * va_phi_dot[2])
            - cx3_term * d * (
                f_phi_dot[2] - c.c_z1 * (nva_dot * va_phi[2] + nva * va_phi_dot[2])
            )
        )
        sigma_z_dot = (
            f_phi_dot[2]
            - c.c_x1 * (nva_dot * va_phi[2] + nva * va_phi_dot[2])
            + c.c_x2 * d * (nva_dot * va_phi[0] + nva * va_phi_dot[0])
            + cx3_term * d * (
                f_phi_dot[0] - c.c_z1 * (nva_dot * va_phi[0] + nva * va_phi_dot[0])
            )
        )
        den_s = sigma_x * sigma_x + sigma_z * sigma_z
        if den_s < RATE_DENOM_MIN:
            raise DegenerateRateError("pitch-rate denominator vanished")
        theta_dot = (sigma_x_dot * sigma_z - sigma_x * sigma_z_dot) / den_s

        # Omega = (0, theta_dot, 0) + Ry(theta)^T (phi_dot, 0, 0)
        #         + Ry(theta)^T Rx(phi)^T (0, 0, psi_dot)
        cth, sth = math.cos(theta), math.sin(theta)
        omega = np.array(
            [
                cth * phi_dot - sth * cph * s.psi_dot,
                theta_dot + sph * s.psi_dot,
                sth * phi_dot + cth * cph * s.psi_dot,
            ]
        )
        return omega


def recover_actuators(
    tau: float,
    m: np.ndarray,
    v_a_body: np.ndarray,
    c: ModelCoefficients,
) -> ControlInput:
    """Propeller speeds and elevon deflections realizing (tau, m).

    Inverts tau = c_z2 (w1^2 + w2^2) together with the rolling moment for
    the propeller speeds, then solves the 2x2 pitch/yaw moment system for
    the deflections. Raises InfeasibleThrustError when no real propeller
    speeds exist and SingularElevonError when the deflection system loses
    rank (near zero propwash and zero axial airflow).
    """
    eps1 = tau / c.c_z2
    if eps1 < -1e-9:
        raise InfeasibleThrustError(f"thrust tau={tau:.3f} has wrong sign for c_z2")
    eps1 = max(eps1, 0.0)
    eps2 = m[0] / c.mu_x1
    if abs(eps2) > eps1 + 1e-12:
        raise InfeasibleThrustError(
            f"roll moment {m[0]:.3f} needs |w1^2-w2^2| > w1^2+w2^2"
        )
    w1 = math.sqrt(max(0.5 * (eps1 + eps2), 0.0))
    w2 = math.sqrt(max(0.5 * (eps1 - eps2), 0.0))

    nva = math.sqrt(float(np.dot(v_a_body, v_a_body)))
    axial = nva * v_a_body[2]
    zeta1 = c.mu_z1 * w1 * w1 + c.mu_z2 * axial
    zeta2 = -c.mu_z1 * w2 * w2 - c.mu_z2 * axial
    zeta3 = c.mu_y1 * w1 * w1 + c.mu_y2 * axial
    zeta4 = c.mu_y1 * w2 * w2 + c.mu_y2 * axial
    eta_y = m[1]
    eta_z = m[2] - c.mu_z3 * eps2
    if abs(zeta1) < 1e-12:
        raise SingularElevonError("zeta1 vanished; no yaw authority on elevon 1")
    denom = zeta4 - zeta3 * zeta2 / zeta1
    if abs(denom) < 1e-12:
        raise SingularElevonError("elevon moment system is singular")
    delta2 = (eta_y - zeta3 / zeta1 * eta_z) / denom
    delta1 = (eta_z - zeta2 * delta2) / zeta1
    return ControlInput(delta1=delta1, delta2=delta2, omega1=w1, omega2=w2)


class YawReference:
    """Yaw and yaw rate for coordinated, level flight.

    psi tracks the horizontal airspeed direction; below the hold
    threshold the last valid yaw is kept with zero rate (hover has no
    meaningful course).
    """

    def __init__(self, psi0: float = 0.0, hold_speed: float = 0.5):
        self.psi = psi0
        self.hold_speed = hold_speed

    def update(self, v_a: np.ndarray, v_a_dot: np.ndarray) -> tuple[float, float]:
        vax, vay = float(v_a[0]), float(v_a[1])
        h2 = vax * vax + vay * vay
        if h2 < self.hold_speed * self.hold_speed:
            return self.psi, 0.0
        self.psi = math.atan2(vay, vax)
        psi_dot = (v_a_dot[1] * vax - vay * v_a_dot[0]) / h2
        return self.psi, psi_dot


def yaw_reference(v_a: np.ndarray, v_a_dot: np.ndarray) -> tuple[float, float]:
    """Stateless coordinated-flight yaw; raises when the course is undefined."""
    vax, vay = float(v_a[0]), float(v_a[1])
    h2 = vax * vax + vay * vay
    if h2 < 1e-12:
        raise DegenerateRateError("horizontal airspeed too small for a course angle")
    return math.atan2(vay, vax), (v_a_dot[1] * vax - vay * v_a_dot[0]) / h2
