"""Reference frames, quaternion algebra, and Z-X-Y Euler conversions.

Conventions used throughout the library:

- Inertial frame is NED (North-East-Down), gravity along +z.
- Quaternions are stored scalar-first as numpy arrays [qs, qx, qy, qz]
  and represent the body-to-inertial rotation: a body vector x_b maps to
  the inertial frame as x_i = q (x) (0, x_b) (x) q*, equivalently
  x_i = R(q) x_b with R(q) = quat_to_rotmat(q).
- Euler angles use the intrinsic Z-X-Y sequence (yaw psi, roll phi,
  pitch theta), chosen so the representation singularity sits at
  phi = +/-90 deg instead of the pitch axis.

All functions are pure and operate on plain numpy arrays; they are safe
to call from any thread.
"""

from __future__ import annotations

import math

import numpy as np

QUAT_UNIT_TOL = 1e-6

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    """Return q scaled to unit norm."""
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if n < 1e-12:
        raise ValueError("cannot normalize near-zero quaternion")
    return q / n


def quat_canonicalize(q: np.ndarray) -> np.ndarray:
    """Resolve the double cover: flip sign so the scalar part is >= 0."""
    if q[0] < 0.0:
        return -q
    return q


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def hamilton(q1: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Hamilton product q1 (x) q2 (norm is multiplicative)."""
    s1, x1, y1, z1 = q1
    s2, x2, y2, z2 = q2
    return np.array(
        [
            s1 * s2 - x1 * x2 - y1 * y2 - z1 * z2,
            s1 * x2 + x1 * s2 + y1 * z2 - z1 * y2,
            s1 * y2 - x1 * z2 + y1 * s2 + z1 * x2,
            s1 * z2 + x1 * y2 - y1 * x2 + z1 * s2,
        ]
    )


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v from body to inertial: q (x) (0, v) (x) q*."""
    return np.array(_rotate_s(q[0], q[1], q[2], q[3], v[0], v[1], v[2]))


def quat_to_rotmat(q: np.ndarray) -> np.ndarray:
    """Rotation matrix R with x_i = R x_b for a unit quaternion q.

    Raises ValueError if q deviates from unit norm by more than
    QUAT_UNIT_TOL.
    """
    s, x, y, z = q
    nsq = s * s + x * x + y * y + z * z
    if abs(nsq - 1.0) > 2.0 * QUAT_UNIT_TOL:
        raise ValueError(f"quaternion norm {math.sqrt(nsq):.8f} is not unit")
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - s * z), 2.0 * (x * z + s * y)],
            [2.0 * (x * y + s * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - s * x)],
            [2.0 * (x * z - s * y), 2.0 * (y * z + s * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def quat_error(q_c: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Attitude error q_e = q_c (x) q*, canonicalized to scalar >= 0.

    The canonical sign makes the vector part encode the shortest
    rotation from q to q_c, which is what the attitude PD law needs.
    """
    return quat_canonicalize(hamilton(q_c, quat_conjugate(q)))


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    h = 0.5 * angle
    return np.concatenate(([math.cos(h)], math.sin(h) * axis))


def euler_zxy_to_quat(psi: float, phi: float, theta: float) -> np.ndarray:
    """Quaternion of the intrinsic Z(psi)-X(phi)-Y(theta) rotation."""
    hz, hx, hy = 0.5 * psi, 0.5 * phi, 0.5 * theta
    qz = np.array([math.cos(hz), 0.0, 0.0, math.sin(hz)])
    qx = np.array([math.cos(hx), math.sin(hx), 0.0, 0.0])
    qy = np.array([math.cos(hy), 0.0, math.sin(hy), 0.0])
    return hamilton(hamilton(qz, qx), qy)


def quat_to_euler_zxy(q: np.ndarray) -> tuple[float, float, float]:
    """Recover (psi, phi, theta) from a unit quaternion.

    Valid away from the |phi| = pi/2 singularity.
    """
    r = quat_to_rotmat(q)
    phi = math.asin(max(-1.0, min(1.0, r[2, 1])))
    theta = math.atan2(-r[2, 0], r[2, 2])
    psi = math.atan2(-r[0, 1], r[1, 1])
    return psi, phi, theta


def rotmat_zxy(psi: float, phi: float, theta: float) -> np.ndarray:
    """R = Rz(psi) Rx(phi) Ry(theta), body to inertial."""
    cps, sps = math.cos(psi), math.sin(psi)
    cph, sph = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [cps * cth - sps * sph * sth, -sps * cph, cps * sth + sps * sph * cth],
            [sps * cth + cps * sph * sth, cps * cph, sps * sth - cps * sph * cth],
            [-cph * sth, sph, cph * cth],
        ]
    )


def rot_z(psi: float) -> np.ndarray:
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_x(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


# Scalar kernels shared with the fixed-step integrator, where building
# numpy arrays per call would dominate the step cost.


def _rotate_s(qs, qx, qy, qz, vx, vy, vz):
    """Body-to-inertial rotation, scalar form of quat_rotate."""
    tx = 2.0 * (qy * vz - qz * vy)
    ty = 2.0 * (qz * vx - qx * vz)
    tz = 2.0 * (qx * vy - qy * vx)
    return (
        vx + qs * tx + qy * tz - qz * ty,
        vy + qs * ty + qz * tx - qx * tz,
        vz + qs * tz + qx * ty - qy * tx,
    )


def _rotate_inv_s(qs, qx, qy, qz, vx, vy, vz):
    """Inertial-to-body rotation (conjugate sandwich), scalar form."""
    return _rotate_s(qs, -qx, -qy, -qz, vx, vy, vz)


def _quat_deriv_s(qs, qx, qy, qz, ox, oy, oz):
    """Attitude kinematics qdot = 0.5 q (x) (0, Omega), scalar form."""
    return (
        0.5 * (-qx * ox - qy * oy - qz * oz),
        0.5 * (qs * ox + qy * oz - qz * oy),
        0.5 * (qs * oy - qx * oz + qz * ox),
        0.5 * (qs * oz + qx * oy - qy * ox),
    )
