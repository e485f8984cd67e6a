"""Tendon transmission of the two-finger crawler gripper.

Everything here is a pure function of (hand state, design, config, motor
tension).  The scalar kernels are compiled with numba so the physics step can
call the very same code the public dataclass API uses.

Angles are displacements from full extension, flexion positive.  Finger 1 is
the plain finger, finger 2 carries the crawler.  All quantities are SI.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from enum import IntEnum

import numba

DELTA = 0.001  # tendon clearance between moment arm and pulley radius [m]

DESIGN_NAMES = ("l_D", "l_P", "l_M", "r_I", "R_I", "R_M", "k_s", "T_pt")

# (lower, upper) in SI.  r_I's upper bound is R_I - DELTA and is resolved per point.
DESIGN_BOUNDS = {
    "l_D": (0.040, 0.080),
    "l_P": (0.060, 0.120),
    "l_M": (0.040, 0.080),
    "r_I": (0.004, None),
    "R_I": (0.008, 0.012),
    "R_M": (0.010, 0.020),
    "k_s": (20.0, 5000.0),
    "T_pt": (0.1, 50.0),
}

# Table units (mm, N/mm, N) -> SI factors.
TABLE_UNIT_SCALE = {
    "l_D": 1e-3,
    "l_P": 1e-3,
    "l_M": 1e-3,
    "r_I": 1e-3,
    "R_I": 1e-3,
    "R_M": 1e-3,
    "k_s": 1e3,
    "T_pt": 1.0,
}
TABLE_UNIT_SUFFIX = {
    "l_D": "mm",
    "l_P": "mm",
    "l_M": "mm",
    "r_I": "mm",
    "R_I": "mm",
    "R_M": "mm",
    "k_s": "N_per_mm",
    "T_pt": "N",
}


class Mode(IntEnum):
    PARALLEL = 1
    PULL_IN = 2
    POWER_GRASP = 3

    @property
    def label(self) -> str:
        return {1: "Parallel", 2: "PullIn", 3: "PowerGrasp"}[int(self)]


@dataclass(frozen=True)
class DesignParams:
    """The eight optimized design variables, SI units."""

    l_D: float
    l_P: float
    l_M: float
    r_I: float
    R_I: float
    R_M: float
    k_s: float
    T_pt: float

    @property
    def r_M(self) -> float:
        return self.R_M - DELTA

    @classmethod
    def table_optimum(cls) -> "DesignParams":
        return cls.from_table_units(
            l_D=74, l_P=92, l_M=80, r_I=7, R_I=8, R_M=20, k_s=3.1, T_pt=24
        )

    @classmethod
    def from_table_units(cls, **values: float) -> "DesignParams":
        return cls(**{k: float(v) * TABLE_UNIT_SCALE[k] for k, v in values.items()})

    def to_table_units(self) -> dict[str, float]:
        return {k: getattr(self, k) / TABLE_UNIT_SCALE[k] for k in DESIGN_NAMES}

    @classmethod
    def from_vector(cls, x) -> "DesignParams":
        return cls(*(float(v) for v in x))

    def as_vector(self) -> list[float]:
        return [getattr(self, k) for k in DESIGN_NAMES]

    def as_dict(self) -> dict[str, float]:
        return asdict(self)

    def violations(self, tol: float = 1e-12) -> list[str]:
        out = []
        for name in DESIGN_NAMES:
            lo, hi = DESIGN_BOUNDS[name]
            if hi is None:
                hi = self.R_I - DELTA
            value = getattr(self, name)
            if not (lo - tol <= value <= hi + tol):
                out.append(f"{name}={value:g} outside [{lo:g}, {hi:g}]")
        return out

    def validate(self) -> "DesignParams":
        bad = self.violations()
        if bad:
            raise ValueError("invalid design: " + "; ".join(bad))
        return self


@dataclass(frozen=True)
class TransmissionConfig:
    """Constants of the transmission model that are not optimized."""

    K: float = 1.0e6  # imaginal compliance [N/m]
    K_prime: float = 100.0  # stopper gain [N m/rad]
    K_dd: float = 0.05  # joint damping [N m s/rad]
    k_e: float = 0.1  # extension spring [N m/rad]
    theta_e_ofs: float = math.pi / 6
    theta_ofs: float = 2 * math.pi / 3
    x_max: float = 0.015  # slider travel [m]
    x_ofs: float = 0.0
    m_c: float = 0.01  # effective crawler inertia [kg]

    def __post_init__(self):
        for name in ("K", "K_prime", "k_e", "x_max", "m_c"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.K_dd < 0:
            raise ValueError("K_dd must be non-negative")

    def with_offset_for(self, state: "HandState", params: DesignParams) -> "TransmissionConfig":
        """Return a copy whose x_ofs zeroes the supposed slider position at ``state``."""
        x_t = state.theta_c + params.r_I * state.theta_I2 - params.r_M * state.theta_M2
        return replace(self, x_ofs=-x_t)


@dataclass(frozen=True)
class HandState:
    theta_M1: float = 0.0
    theta_I1: float = 0.0
    theta_M2: float = 0.0
    theta_I2: float = 0.0
    theta_c: float = 0.0
    dtheta_M1: float = 0.0
    dtheta_I1: float = 0.0
    dtheta_M2: float = 0.0
    dtheta_I2: float = 0.0
    dtheta_c: float = 0.0

    @classmethod
    def initial(cls, cfg: TransmissionConfig | None = None) -> "HandState":
        """Fully extended hand resting on the parallel stopper."""
        cfg = cfg or TransmissionConfig()
        return cls(theta_I1=cfg.theta_ofs, theta_I2=cfg.theta_ofs)

    def positions(self) -> tuple[float, float, float, float, float]:
        return (self.theta_M1, self.theta_I1, self.theta_M2, self.theta_I2, self.theta_c)

    def rates(self) -> tuple[float, float, float, float, float]:
        return (self.dtheta_M1, self.dtheta_I1, self.dtheta_M2, self.dtheta_I2, self.dtheta_c)


@dataclass(frozen=True)
class SliderState:
    x_t: float
    x_s: float
    T_s: float
    mode: Mode
    x_s_free: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class JointTorques:
    tau_M1: float
    tau_I1: float
    tau_M2: float
    tau_I2: float
    tau_c: float

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return tuple(getattr(self, f.name) for f in fields(self))


# ---------------------------------------------------------------------------
# compiled scalar kernels


@numba.njit(cache=True)
def _moment_arm(R, theta):
    return R * math.sqrt(1.0 + math.sin(theta))


@numba.njit(cache=True)
def actuation_kernel(thM1, thI1, thM2, thI2, R_M, r_M, R_I, r_I, T_m, T_s):
    tM1 = (_moment_arm(R_M, thM1) + r_M) * T_m
    tI1 = (_moment_arm(R_I, thI1) - r_I) * T_m
    tM2 = _moment_arm(R_M, thM2) * T_m + r_M * T_s
    tI2 = _moment_arm(R_I, thI2) * T_m - r_I * T_s
    tc = T_m - T_s
    return tM1, tI1, tM2, tI2, tc


@numba.njit(cache=True)
def supposed_slider_position(thM2, thI2, thc, r_M, r_I, x_ofs):
    return thc + r_I * thI2 - r_M * thM2 + x_ofs


@numba.njit(cache=True)
def slider_kernel(x_t, K, k_s, T_pt, x_max):
    """Returns (x_s, T_s, mode, free slider position, dT_s/dx_t)."""
    x_free = (K * x_t - T_pt) / (K + k_s)
    if x_free < 0.0:
        x_s = 0.0
        mode = 1
        slope = K
    elif x_free > x_max:
        x_s = x_max
        mode = 3
        slope = K
    else:
        x_s = x_free
        mode = 2
        slope = K * k_s / (K + k_s)
    T_raw = K * (x_t - x_s)
    if T_raw > 0.0:
        T_s = T_raw
    else:
        T_s = 0.0
        slope = 0.0
    return x_s, T_s, mode, x_free, slope


@numba.njit(cache=True)
def coupling_kernel(theta_I, theta_M, k_e, theta_e_ofs, theta_ofs, K_prime):
    limit = theta_ofs - theta_M
    # the boundary belongs to the spring branch so the preload acts at rest
    if theta_I >= limit:
        return -k_e * (theta_I - limit + theta_e_ofs)
    return K_prime * (theta_I - limit)


@numba.njit(cache=True)
def net_torque_kernel(
    thM1, thI1, thM2, thI2, thc,
    dM1, dI1, dM2, dI2,
    R_M, r_M, R_I, r_I, k_s, T_pt,
    K, K_prime, K_dd, k_e, theta_e_ofs, theta_ofs, x_max, x_ofs,
    T_m,
):
    """Net generalized forces on (M1, I1, M2, I2, crawler) plus slider info.

    Returns (tM1, tI1, tM2, tI2, tc, x_t, x_s, T_s, mode, dT_s/dx_t).
    """
    x_t = supposed_slider_position(thM2, thI2, thc, r_M, r_I, x_ofs)
    x_s, T_s, mode, _, slope = slider_kernel(x_t, K, k_s, T_pt, x_max)
    aM1, aI1, aM2, aI2, tc = actuation_kernel(
        thM1, thI1, thM2, thI2, R_M, r_M, R_I, r_I, T_m, T_s
    )
    p1 = coupling_kernel(thI1, thM1, k_e, theta_e_ofs, theta_ofs, K_prime)
    p2 = coupling_kernel(thI2, thM2, k_e, theta_e_ofs, theta_ofs, K_prime)
    tI1 = aI1 + p1 - K_dd * dI1
    tM1 = aM1 + p1 - k_e * (thM1 + theta_ofs) - K_dd * dM1
    tI2 = aI2 + p2 - K_dd * dI2
    tM2 = aM2 + p2 - k_e * (thM2 + theta_ofs) - K_dd * dM2
    return tM1, tI1, tM2, tI2, tc, x_t, x_s, T_s, mode, slope


# ---------------------------------------------------------------------------
# public API


def actuation_torques(state: HandState, params: DesignParams, T_m: float, T_s: float) -> JointTorques:
    """Raw tendon torques on the four joints and the crawler drive force."""
    out = actuation_kernel(
        state.theta_M1, state.theta_I1, state.theta_M2, state.theta_I2,
        params.R_M, params.r_M, params.R_I, params.r_I, float(T_m), float(T_s),
    )
    return JointTorques(*out)


def slider_state(state: HandState, params: DesignParams, cfg: TransmissionConfig) -> SliderState:
    x_t = supposed_slider_position(
        state.theta_M2, state.theta_I2, state.theta_c, params.r_M, params.r_I, cfg.x_ofs
    )
    return slider_from_position(x_t, params, cfg)


def slider_from_position(x_t: float, params: DesignParams, cfg: TransmissionConfig) -> SliderState:
    x_s, T_s, mode, x_free, _ = slider_kernel(float(x_t), cfg.K, params.k_s, params.T_pt, cfg.x_max)
    return SliderState(x_t=float(x_t), x_s=x_s, T_s=T_s, mode=Mode(mode), x_s_free=x_free)


def parallel_coupling_torque(theta_I: float, theta_M: float, cfg: TransmissionConfig) -> float:
    """Torque of the DP/parallel-link torsion spring and stopper."""
    return coupling_kernel(
        float(theta_I), float(theta_M), cfg.k_e, cfg.theta_e_ofs, cfg.theta_ofs, cfg.K_prime
    )


def net_joint_torques(
    state: HandState, params: DesignParams, cfg: TransmissionConfig, T_m: float
) -> JointTorques:
    out = net_torque_kernel(
        *state.positions(), *state.rates()[:4],
        params.R_M, params.r_M, params.R_I, params.r_I, params.k_s, params.T_pt,
        cfg.K, cfg.K_prime, cfg.K_dd, cfg.k_e, cfg.theta_e_ofs, cfg.theta_ofs,
        cfg.x_max, cfg.x_ofs, float(T_m),
    )
    return JointTorques(*out[:5])
