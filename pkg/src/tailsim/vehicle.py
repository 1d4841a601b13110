"""Force-moment model and rigid-body dynamics of a twin-elevon tailsitter.

The aerodynamic/propulsive model expresses the net specific force and the
inertia-normalized moment as polynomial forms in the body-frame airspeed
components and the actuator terms. It is smooth over the whole flight
envelope, including hover where angle of attack and sideslip are
undefined. Moments are normalized by inertia at identification time, so
the inertia matrix only enters through the gyroscopic correction term.

Body frame: z along the longitudinal axis (propellers push along -z),
y lateral, x = y cross z. In hover the vehicle holds z down, thrust up.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .frames import _quat_deriv_s, _rotate_s, quat_rotate

GRAVITY = 9.81
G_NED = np.array([0.0, 0.0, GRAVITY])


@dataclass(frozen=True)
class ModelCoefficients:
    """Force/moment model coefficients plus the inertia diagonal.

    Force units give specific force (m/s^2); mu coefficients give
    inertia-normalized moments (rad/s^2). c_z2 < 0 encodes that positive
    propeller speed produces thrust along -z (body).
    """

    c_x1: float  # wing lift, 1/m
    c_x2: float  # elevon-freestream lift, 1/m
    c_x3: float  # elevon-propwash lift, m
    c_y1: float  # lateral velocity drag, 1/m
    c_z1: float  # drag, 1/m
    c_z2: float  # thrust, m
    mu_x1: float  # differential thrust rolling moment
    mu_x2: float  # lateral velocity rolling moment, 1/m^2
    mu_y1: float  # elevon-propwash pitching moment
    mu_y2: float  # elevon-freestream pitching moment, 1/m^2
    mu_y3: float  # vertical velocity pitching moment, 1/m^2
    mu_y4: float  # accelerating elevon mass pitching moment, 1/s^2
    mu_z1: float  # elevon-propwash yawing moment
    mu_z2: float  # elevon-freestream yawing moment, 1/m^2
    mu_z3: float  # propeller reaction yawing moment
    j_diag: tuple[float, float, float] = (0.01, 0.02, 0.03)

    def __post_init__(self):
        if not all(map(math.isfinite, self.as_tuple())):
            raise ValueError("model coefficients must be finite")
        if self.c_z2 >= 0.0:
            raise ValueError("c_z2 must be negative (thrust along -z for omega > 0)")
        if self.mu_x1 <= 0.0:
            raise ValueError("mu_x1 must be positive")

    def as_tuple(self) -> tuple[float, ...]:
        return (
            self.c_x1, self.c_x2, self.c_x3, self.c_y1, self.c_z1, self.c_z2,
            self.mu_x1, self.mu_x2, self.mu_y1, self.mu_y2, self.mu_y3,
            self.mu_y4, self.mu_z1, self.mu_z2, self.mu_z3,
        )

    def simplified(self) -> "ModelCoefficients":
        """Coefficient set the flatness transform is derived from.

        Zeroes the state-dependent lateral drag and pitching terms and the
        elevon-mass term; the remaining model is algebraically invertible
        from the flat output.
        """
        return replace(self, c_y1=0.0, mu_x2=0.0, mu_y3=0.0, mu_y4=0.0)

    def hover_rotor_speed(self) -> float:
        """Per-propeller speed that balances gravity at zero airspeed."""
        return math.sqrt(GRAVITY / (-self.c_z2) / 2.0)


# Identified coefficient set of the target tailsitter airframe.
CYCLONE = ModelCoefficients(
    c_x1=-1.44e1,
    c_x2=6.83e-2,
    c_x3=-8.80e-6,
    c_y1=-8.41e-2,
    c_z1=-3.00e-2,
    c_z2=-7.35e-6,
    mu_x1=3.90e-5,
    mu_x2=3.71e-3,
    mu_y1=-4.24e-5,
    mu_y2=2.53e-1,
    mu_y3=-8.88e-2,
    mu_y4=-7.68e-3,
    mu_z1=-5.83e-5,
    mu_z2=3.44e-1,
    mu_z3=-3.97e-6,
)

COEFFICIENT_SETS = {"cyclone": CYCLONE}


@dataclass(frozen=True)
class ActuatorParams:
    """Servo / motor dynamics and travel limits.

    Elevons are second-order servos (so the elevon angular acceleration
    needed by the mu_y4 moment term exists); motors are first-order lags.
    """

    servo_wn: float = 60.0     # rad/s
    servo_zeta: float = 0.8
    motor_tau: float = 0.03    # s
    delta_max: float = 0.6     # rad
    omega_max: float = 1500.0  # rad/s
    omega_min: float = 0.0


@dataclass
class ControlInput:
    """Elevon deflections (rad) and propeller speeds (rad/s)."""

    delta1: float
    delta2: float
    omega1: float
    omega2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.delta1, self.delta2, self.omega1, self.omega2])

    def clipped(self, p: ActuatorParams) -> "ControlInput":
        return ControlInput(
            delta1=min(max(self.delta1, -p.delta_max), p.delta_max),
            delta2=min(max(self.delta2, -p.delta_max), p.delta_max),
            omega1=min(max(self.omega1, p.omega_min), p.omega_max),
            omega2=min(max(self.omega2, p.omega_min), p.omega_max),
        )


@dataclass
class ActuatorState:
    """Servo positions/rates/accelerations and motor speeds."""

    delta1: float = 0.0
    d_delta1: float = 0.0
    delta2: float = 0.0
    d_delta2: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0

    def accelerations(self, cmd: ControlInput, p: ActuatorParams) -> tuple[float, float]:
        """Instantaneous servo accelerations toward the commanded deflections."""
        wn2 = p.servo_wn * p.servo_wn
        two_zw = 2.0 * p.servo_zeta * p.servo_wn
        return (
            wn2 * (cmd.delta1 - self.delta1) - two_zw * self.d_delta1,
            wn2 * (cmd.delta2 - self.delta2) - two_zw * self.d_delta2,
        )

    def as_input(self) -> ControlInput:
        return ControlInput(self.delta1, self.delta2, self.omega1, self.omega2)


@dataclass
class VehicleState:
    """Rigid-body state: NED position/velocity, attitude, body rate."""

    p: np.ndarray
    v: np.ndarray
    q: np.ndarray
    omega: np.ndarray

    def copy(self) -> "VehicleState":
        return VehicleState(self.p.copy(), self.v.copy(), self.q.copy(), self.omega.copy())


def _force_s(vax, vay, vaz, d1, d2, w1, w2, c: ModelCoefficients):
    """Specific force components in the body frame, scalar kernel."""
    va = math.sqrt(vax * vax + vay * vay + vaz * vaz)
    w1sq = w1 * w1
    w2sq = w2 * w2
    fx = (
        c.c_x1 * va * vax
        + c.c_x2 * (d1 + d2) * va * vaz
        + c.c_x3 * (d1 * w1sq + d2 * w2sq)
    )
    fy = c.c_y1 * va * vay
    fz = c.c_z1 * va * vaz + c.c_z2 * (w1sq + w2sq)
    return fx, fy, fz


def _moment_s(vax, vay, vaz, d1, d2, w1, w2, dd1, dd2, c: ModelCoefficients):
    """Inertia-normalized moment components in the body frame, scalar kernel."""
    va = math.sqrt(vax * vax + vay * vay + vaz * vaz)
    w1sq = w1 * w1
    w2sq = w2 * w2
    mx = c.mu_x1 * (w1sq - w2sq) + c.mu_x2 * va * vay
    my = (
        c.mu_y1 * (d1 * w1sq + d2 * w2sq)
        + c.mu_y2 * (d1 + d2) * va * vaz
        + c.mu_y3 * va * vax
        + c.mu_y4 * (dd1 + dd2)
    )
    mz = (
        c.mu_z1 * (d1 * w1sq - d2 * w2sq)
        + c.mu_z2 * (d1 - d2) * va * vaz
        + c.mu_z3 * (w1sq - w2sq)
    )
    return mx, my, mz


def specific_force_body(v_a_body: np.ndarray, u: ControlInput, c: ModelCoefficients) -> np.ndarray:
    """Net specific force (m/s^2) in the body frame."""
    return np.array(
        _force_s(v_a_body[0], v_a_body[1], v_a_body[2], u.delta1, u.delta2, u.omega1, u.omega2, c)
    )


def specific_moment_body(
    v_a_body: np.ndarray,
    u: ControlInput,
    elevon_accels: tuple[float, float],
    c: ModelCoefficients,
) -> np.ndarray:
    """Inertia-normalized moment (rad/s^2) in the body frame."""
    return np.array(
        _moment_s(
            v_a_body[0], v_a_body[1], v_a_body[2],
            u.delta1, u.delta2, u.omega1, u.omega2,
            elevon_accels[0], elevon_accels[1], c,
        )
    )


def gyroscopic_term(omega: np.ndarray, j_diag) -> np.ndarray:
    """m_cor = J^-1 (Omega x J Omega) for a diagonal inertia matrix."""
    jx, jy, jz = j_diag
    ox, oy, oz = omega
    return np.array(
        [
            (jz - jy) * oy * oz / jx,
            (jx - jz) * ox * oz / jy,
            (jy - jx) * ox * oy / jz,
        ]
    )


def state_derivative(
    x: VehicleState,
    u: ControlInput,
    act: ActuatorState,
    v_w: np.ndarray,
    c: ModelCoefficients,
    elevon_accels: tuple[float, float] = (0.0, 0.0),
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Time derivative (pdot, vdot, qdot, omegadot) of the rigid-body state.

    The airspeed entering the force/moment model is v - v_w. Elevon
    accelerations feed the mu_y4 pitching-moment term.
    """
    v_a_i = x.v - v_w
    qs, qx, qy, qz = x.q
    vab = _rotate_s(qs, -qx, -qy, -qz, v_a_i[0], v_a_i[1], v_a_i[2])
    f = _force_s(vab[0], vab[1], vab[2], u.delta1, u.delta2, u.omega1, u.omega2, c)
    m = _moment_s(
        vab[0], vab[1], vab[2], u.delta1, u.delta2, u.omega1, u.omega2,
        elevon_accels[0], elevon_accels[1], c,
    )
    v_dot = np.array(_rotate_s(qs, qx, qy, qz, f[0], f[1], f[2])) + G_NED
    q_dot = np.array(_quat_deriv_s(qs, qx, qy, qz, x.omega[0], x.omega[1], x.omega[2]))
    omega_dot = np.array(m) - gyroscopic_term(x.omega, c.j_diag)
    return x.v.copy(), v_dot, q_dot, omega_dot


def acceleration(x: VehicleState, u: ControlInput, act: ActuatorState, v_w, c,
                 elevon_accels=(0.0, 0.0)) -> np.ndarray:
    """Inertial acceleration R f + g (what an ideal IMU + gravity senses)."""
    v_a_i = x.v - np.asarray(v_w, dtype=float)
    qs, qx, qy, qz = x.q
    vab = _rotate_s(qs, -qx, -qy, -qz, v_a_i[0], v_a_i[1], v_a_i[2])
    f = _force_s(vab[0], vab[1], vab[2], u.delta1, u.delta2, u.omega1, u.omega2, c)
    return np.array(_rotate_s(qs, qx, qy, qz, f[0], f[1], f[2])) + G_NED
