"""Parametric paths f(w) with analytic derivatives up to third order.

Paths are defined over the whole real line (periodic curves are not
wrapped) because the guidance derivative chain needs a smooth f at any w.
The timed-trajectory generator integrates the path parameter against a
reference speed profile to produce a time-parameterized reference with
position, velocity, acceleration, and jerk.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


class ParametricPath:
    """A curve w -> f(w) in R^3 with derivatives f', f'', f'''."""

    def __init__(self, fn: Callable[[float, int], np.ndarray], descriptor: str):
        self._fn = fn
        self.descriptor = descriptor

    def eval(self, w: float, order: int = 0) -> np.ndarray:
        if order not in (0, 1, 2, 3):
            raise ValueError("derivative order must be 0..3")
        return self._fn(w, order)

    def eval_all(self, w: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(f, f', f'', f''') in one call."""
        return self._fn(w, 0), self._fn(w, 1), self._fn(w, 2), self._fn(w, 3)

    def nearest_parameter(self, p: np.ndarray, w_lo: float = 0.0, w_hi: float = 2.0 * math.pi,
                          coarse: int = 720, refine: int = 40) -> float:
        """Minimizer of ||p - f(w)|| by coarse grid + golden-section refine."""
        ws = np.linspace(w_lo, w_hi, coarse, endpoint=False)
        d = [float(np.dot(p - self._fn(w, 0), p - self._fn(w, 0))) for w in ws]
        i = int(np.argmin(d))
        step = (w_hi - w_lo) / coarse
        lo, hi = ws[i] - step, ws[i] + step
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c = b - invphi * (b - a)
        e = a + invphi * (b - a)
        fc = float(np.dot(p - self._fn(c, 0), p - self._fn(c, 0)))
        fe = float(np.dot(p - self._fn(e, 0), p - self._fn(e, 0)))
        for _ in range(refine):
            if fc < fe:
                b, e, fe = e, c, fc
                c = b - invphi * (b - a)
                fc = float(np.dot(p - self._fn(c, 0), p - self._fn(c, 0)))
            else:
                a, c, fc = c, e, fe
                e = a + invphi * (b - a)
                fe = float(np.dot(p - self._fn(e, 0), p - self._fn(e, 0)))
        return 0.5 * (a + b)


def circle(r: float, z0: float) -> ParametricPath:
    """Level circle of radius r centered on the z-axis at depth z0."""
    if r <= 0.0:
        raise ValueError("circle radius must be positive")

    def fn(w: float, order: int) -> np.ndarray:
        c, s = math.cos(w), math.sin(w)
        if order == 0:
            return np.array([r * c, r * s, z0])
        if order == 1:
            return np.array([-r * s, r * c, 0.0])
        if order == 2:
            return np.array([-r * c, -r * s, 0.0])
        return np.array([r * s, -r * c, 0.0])

    return ParametricPath(fn, f"circle(r={r}, z0={z0})")


def lissajous(c, omega, d, center=(0.0, 0.0, 0.0)) -> ParametricPath:
    """Lissajous curve f_i = center_i + c_i cos(omega_i w + d_i)."""
    cv = np.asarray(c, dtype=float)
    ov = np.asarray(omega, dtype=float)
    dv = np.asarray(d, dtype=float)
    ctr = np.asarray(center, dtype=float)

    def fn(w: float, order: int) -> np.ndarray:
        ph = ov * w + dv
        if order == 0:
            return ctr + cv * np.cos(ph)
        if order == 1:
            return -cv * ov * np.sin(ph)
        if order == 2:
            return -cv * ov**2 * np.cos(ph)
        return cv * ov**3 * np.sin(ph)

    return ParametricPath(fn, f"lissajous(c={tuple(cv)}, omega={tuple(ov)}, d={tuple(dv)})")


@dataclass
class TimedTrajectory:
    """Uniformly sampled time-parameterized reference with derivatives.

    Samples are cubic-Hermite interpolated on (p, v) between grid points;
    acceleration and jerk are linearly interpolated (queries from the
    control loop land on grid points, so interpolation is exact there).
    """

    t: np.ndarray        # (n,)
    p: np.ndarray        # (n, 3)
    v: np.ndarray        # (n, 3)
    a: np.ndarray        # (n, 3)
    j: np.ndarray        # (n, 3)

    @property
    def duration(self) -> float:
        return float(self.t[-1])

    def sample(self, t: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(p_r, v_r, a_r, j_r) at time t. Raises ValueError out of range."""
        if t < self.t[0] - 1e-9 or t > self.t[-1] + 1e-9:
            raise ValueError(f"t={t} outside trajectory domain [0, {self.t[-1]}]")
        dt = self.t[1] - self.t[0]
        k = min(int(max(t - self.t[0], 0.0) / dt), len(self.t) - 2)
        s = (t - self.t[k]) / dt
        if s < 1e-12:
            return self.p[k], self.v[k], self.a[k], self.j[k]
        h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
        h10 = s * (1.0 - s) ** 2
        h01 = s * s * (3.0 - 2.0 * s)
        h11 = s * s * (s - 1.0)
        p = h00 * self.p[k] + h10 * dt * self.v[k] + h01 * self.p[k + 1] + h11 * dt * self.v[k + 1]
        d00 = 6.0 * s * (s - 1.0) / dt
        d10 = (1.0 - s) * (1.0 - 3.0 * s)
        d01 = -d00
        d11 = s * (3.0 * s - 2.0)
        v = d00 * self.p[k] + d10 * self.v[k] + d01 * self.p[k + 1] + d11 * self.v[k + 1]
        a = (1.0 - s) * self.a[k] + s * self.a[k + 1]
        j = (1.0 - s) * self.j[k] + s * self.j[k + 1]
        return p, v, a, j


def arc_length_reparam(
    path: ParametricPath,
    speed,
    duration: float,
    dt: float,
    w0: float = 0.0,
    direction: float = 1.0,
) -> TimedTrajectory:
    """Timed trajectory traversing `path` at the profile speed.

    Integrates wdot = direction * s_r(t) / ||f'(w)|| with RK4 and applies
    the chain rule for velocity, acceleration, and jerk using the profile
    derivatives (s_r, s_r_dot, s_r_ddot). `speed` is any object with a
    ``sample(t) -> (s_r, s_r_dot, s_r_ddot)`` method.
    """
    n = int(round(duration / dt)) + 1
    t = np.arange(n) * dt
    p = np.empty((n, 3))
    v = np.empty((n, 3))
    a = np.empty((n, 3))
    j = np.empty((n, 3))

    def wdot(w: float, sr: float) -> float:
        f1 = path.eval(w, 1)
        n1 = math.sqrt(float(np.dot(f1, f1)))
        if n1 < 1e-9:
            raise ValueError(f"degenerate path tangent at w={w}")
        return direction * sr / n1

    w = w0
    for k in range(n):
        tk = t[k]
        sr, sr_d, sr_dd = speed.sample(tk)
        f0, f1, f2, f3 = path.eval_all(w)
        n1sq = float(np.dot(f1, f1))
        n1 = math.sqrt(n1sq)
        if n1 < 1e-9:
            raise ValueError(f"degenerate path tangent at w={w}")
        wd = direction * sr / n1
        g12 = float(np.dot(f1, f2))
        g22 = float(np.dot(f2, f2))
        g13 = float(np.dot(f1, f3))
        wdd = direction * sr_d / n1 - sr * direction * g12 * wd / n1**3
        wddd = (
            direction * sr_dd / n1
            - 2.0 * direction * sr_d * g12 * wd / n1**3
            - direction * sr * ((g22 + g13) * wd * wd + g12 * wdd) / n1**3
            + 3.0 * direction * sr * g12 * g12 * wd * wd / n1**5
        )
        p[k] = f0
        v[k] = f1 * wd
        a[k] = f2 * wd * wd + f1 * wdd
        j[k] = f3 * wd**3 + 3.0 * f2 * wd * wdd + f1 * wddd

        if k < n - 1:
            # RK4 on w; the profile is sampled at the substep times.
            sr_mid = speed.sample(tk + 0.5 * dt)[0]
            sr_end = speed.sample(tk + dt)[0]
            k1 = wdot(w, sr)
            k2 = wdot(w + 0.5 * dt * k1, sr_mid)
            k3 = wdot(w + 0.5 * dt * k2, sr_mid)
            k4 = wdot(w + dt * k3, sr_end)
            w += dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0

    return TimedTrajectory(t=t, p=p, v=v, a=a, j=j)
