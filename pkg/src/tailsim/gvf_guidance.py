"""Extended parametric guiding vector field and its guidance law.

The field over the augmented position (p, w) is

    chi_p = -f' + f' (K phi)^T f' - K phi        (position part)
    chi_w = -1 + (K phi)^T f'                    (parameter part)

with phi = p - f(w) the path tracking error and K a positive diagonal
gain. Scaling the field to the reference speed s_r and steering the
velocity error to zero with a PD law yields the acceleration command;
the same machinery produces the guiding point f(w) and its first three
time derivatives, which feed the angular-rate feedforward.

For a single-integrator agent tracking the scaled field, the error
obeys phi_dot = -s_hat_r K phi, so choosing K = K_eff / s_hat_r makes
the error decay exponentially at the rate K_eff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import ParametricPath

CHI_P_MIN = 1e-6


class DegenerateFieldError(RuntimeError):
    """The position part of the field vanished; no direction is defined."""


@dataclass
class GvfField:
    """Path plus diagonal field gain (3-vector of positive entries)."""

    path: ParametricPath
    k: np.ndarray

    def __post_init__(self):
        self.k = np.asarray(self.k, dtype=float)
        if self.k.shape != (3,) or np.any(self.k <= 0.0):
            raise ValueError("field gain must be a positive 3-vector")


@dataclass
class FieldJets:
    """Field values and every partial derivative the chain needs."""

    phi: np.ndarray
    chi_p: np.ndarray
    chi_w: float
    chi_pg: np.ndarray
    sigma: float
    sigma1: float
    sigma2: float
    j_chi_p_p: np.ndarray       # (3,3)
    j_chi_w_p: np.ndarray       # (3,)
    dchi_p_dw: np.ndarray       # (3,)
    dchi_w_dw: float
    d2chi_p_dw2: np.ndarray     # (3,)
    h_chi_p_pw: np.ndarray      # (3,3), shared with the guiding-point part
    j_chi_pg_p: np.ndarray      # (3,3)
    dchi_pg_dw: np.ndarray      # (3,)
    d2chi_pg_dw2: np.ndarray    # (3,)


def chi(p: np.ndarray, w: float, field: GvfField) -> tuple[np.ndarray, float]:
    """Field value (chi_p, chi_w) at the augmented position (p, w)."""
    f0 = field.path.eval(w, 0)
    f1 = field.path.eval(w, 1)
    kphi = field.k * (p - f0)
    sigma = float(np.dot(kphi, f1))
    return -f1 + f1 * sigma - kphi, -1.0 + sigma


def appendix_matrices(p: np.ndarray, w: float, field: GvfField) -> FieldJets:
    """Evaluate the field and all of its analytic partial derivatives."""
    f0, f1, f2, f3 = field.path.eval_all(w)
    k = field.k
    phi = p - f0
    kphi = k * phi
    kf1 = k * f1
    kf2 = k * f2
    sigma = float(np.dot(kphi, f1))
    sigma1 = float(np.dot(kphi, f2) - np.dot(kf1, f1))
    sigma2 = float(np.dot(kphi, f3) - 3.0 * np.dot(kf1, f2))

    chi_pg = -f1 + f1 * sigma
    chi_p = chi_pg - kphi
    chi_w = -1.0 + sigma

    j_chi_pg_p = np.outer(f1, kf1)
    j_chi_p_p = j_chi_pg_p - np.diag(k)
    j_chi_w_p = kf1

    dchi_pg_dw = -f2 + f2 * sigma + f1 * sigma1
    dchi_p_dw = dchi_pg_dw + kf1
    dchi_w_dw = sigma1

    d2chi_pg_dw2 = -f3 + f3 * sigma + 2.0 * f2 * sigma1 + f1 * sigma2
    d2chi_p_dw2 = d2chi_pg_dw2 + kf2

    h_chi_p_pw = np.outer(f2, kf1) + np.outer(f1, kf2)

    return FieldJets(
        phi=phi,
        chi_p=chi_p,
        chi_w=chi_w,
        chi_pg=chi_pg,
        sigma=sigma,
        sigma1=sigma1,
        sigma2=sigma2,
        j_chi_p_p=j_chi_p_p,
        j_chi_w_p=j_chi_w_p,
        dchi_p_dw=dchi_p_dw,
        dchi_w_dw=dchi_w_dw,
        d2chi_p_dw2=d2chi_p_dw2,
        h_chi_p_pw=h_chi_p_pw,
        j_chi_pg_p=j_chi_pg_p,
        dchi_pg_dw=dchi_pg_dw,
        d2chi_pg_dw2=d2chi_pg_dw2,
    )


def tune_gain(k_eff: np.ndarray, s_hat_r: float) -> np.ndarray:
    """Field gain achieving the effective error-decay rate k_eff."""
    if s_hat_r <= 0.0:
        raise ValueError("s_hat_r must be positive")
    return np.asarray(k_eff, dtype=float) / s_hat_r


@dataclass
class GvfOutput:
    """Everything a control step needs from one field evaluation."""

    a_c: np.ndarray
    w_dot: float
    w_ddot: float
    v_c: np.ndarray
    e_v: np.ndarray
    s_hat_r: float
    s_hat_r_dot: float
    s_hat_r_ddot: float
    chi_p_norm: float
    k_eff_realized: np.ndarray
    p_g: np.ndarray
    pg_dot: np.ndarray
    pg_ddot: np.ndarray
    pg_dddot: np.ndarray
    jets: FieldJets


def gvf_step(
    p: np.ndarray,
    v: np.ndarray,
    w: float,
    sp: tuple[float, float, float],
    field: GvfField,
    k_v: np.ndarray,
) -> GvfOutput:
    """Acceleration command, w-dynamics, and guiding-point derivatives.

    sp is the reference speed sample (s_r, s_r_dot, s_r_ddot). The
    vehicle acceleration entering the second-derivative chain is the
    commanded one (double-integrator assumption).
    """
    s_r, s_r_dot, s_r_ddot = sp
    jets = appendix_matrices(p, w, field)
    chi_p = jets.chi_p
    c_norm = float(np.linalg.norm(chi_p))
    if c_norm < CHI_P_MIN:
        raise DegenerateFieldError(f"||chi_p|| = {c_norm:.2e} at w = {w:.3f}")

    s_hat = s_r / c_norm
    w_dot = s_hat * jets.chi_w

    chi_p_dot = jets.j_chi_p_p @ v + jets.dchi_p_dw * w_dot
    cd_c = float(np.dot(chi_p_dot, chi_p))
    s_hat_dot = s_r_dot / c_norm - s_r * cd_c / c_norm**3

    v_c = s_hat * chi_p
    e_v = v - v_c
    vdot_c = s_hat_dot * chi_p + s_hat * chi_p_dot
    a_c = vdot_c - k_v * e_v

    # chi_w rate uses w_dot (the w_ddot appearing in the source chain is
    # an algebraic loop; the derivative of chi_w(p, w) along the motion
    # is J_{chi_w,p} pdot + dchi_w/dw wdot).
    chi_w_dot = float(np.dot(jets.j_chi_w_p, v)) + jets.dchi_w_dw * w_dot
    w_ddot = s_hat_dot * jets.chi_w + s_hat * chi_w_dot

    chi_p_ddot = (
        jets.j_chi_p_p @ a_c
        + 2.0 * (jets.h_chi_p_pw @ v) * w_dot
        + jets.dchi_p_dw * w_ddot
        + jets.d2chi_p_dw2 * w_dot * w_dot
    )
    s_hat_ddot = (
        s_r_ddot / c_norm
        - 2.0 * s_r_dot * cd_c / c_norm**3
        - s_r * (float(np.dot(chi_p_ddot, chi_p)) + float(np.dot(chi_p_dot, chi_p_dot))) / c_norm**3
        + 3.0 * s_r * cd_c * cd_c / c_norm**5
    )

    chi_pg_dot = jets.j_chi_pg_p @ v + jets.dchi_pg_dw * w_dot
    chi_pg_ddot = (
        jets.j_chi_pg_p @ a_c
        + 2.0 * (jets.h_chi_p_pw @ v) * w_dot
        + jets.dchi_pg_dw * w_ddot
        + jets.d2chi_pg_dw2 * w_dot * w_dot
    )

    p_g = p - jets.phi
    pg_dot = s_hat * jets.chi_pg
    pg_ddot = s_hat_dot * jets.chi_pg + s_hat * chi_pg_dot
    pg_dddot = s_hat_ddot * jets.chi_pg + 2.0 * s_hat_dot * chi_pg_dot + s_hat * chi_pg_ddot

    return GvfOutput(
        a_c=a_c,
        w_dot=w_dot,
        w_ddot=w_ddot,
        v_c=v_c,
        e_v=e_v,
        s_hat_r=s_hat,
        s_hat_r_dot=s_hat_dot,
        s_hat_r_ddot=s_hat_ddot,
        chi_p_norm=c_norm,
        k_eff_realized=s_hat * field.k,
        p_g=p_g,
        pg_dot=pg_dot,
        pg_ddot=pg_ddot,
        pg_dddot=pg_dddot,
        jets=jets,
    )


def gvf_accel(p, v, w, sp, field: GvfField, k_v) -> tuple[np.ndarray, float, GvfOutput]:
    """PD guidance law a_c = vdot_c - K_v (v - v_c) plus diagnostics."""
    out = gvf_step(np.asarray(p, float), np.asarray(v, float), w, sp, field, np.asarray(k_v, float))
    return out.a_c, out.w_dot, out


def guiding_point_derivatives(p, v, w, sp, field: GvfField, k_v):
    """(p_g, pg_dot, pg_ddot, pg_dddot) of the guiding point."""
    out = gvf_step(np.asarray(p, float), np.asarray(v, float), w, sp, field, np.asarray(k_v, float))
    return out.p_g, out.pg_dot, out.pg_ddot, out.pg_dddot


def expanded_pd_form(p, v, p_g, pg_dot, pg_ddot, k_eff, k_v,
                     k_eff_dot: np.ndarray | None = None) -> np.ndarray:
    """Guidance acceleration written around the guiding point.

    a_c = pg_ddot - (K_v + K_eff)(v - pg_dot) - K_eff K_v (p - p_g)
          - K_eff_dot (p - p_g)

    With the instantaneous effective gain K_eff = s_hat_r K this equals
    the Lyapunov form exactly; the last term vanishes when the field
    scaling is constant, which recovers the plain PD expansion used to
    tune the trajectory-tracking baseline.
    """
    k_eff = np.asarray(k_eff, float)
    k_v = np.asarray(k_v, float)
    err_p = np.asarray(p, float) - np.asarray(p_g, float)
    err_v = np.asarray(v, float) - np.asarray(pg_dot, float)
    a = np.asarray(pg_ddot, float) - (k_v + k_eff) * err_v - k_eff * k_v * err_p
    if k_eff_dot is not None:
        a = a - np.asarray(k_eff_dot, float) * err_p
    return a
