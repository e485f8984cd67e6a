"""Planar world: kinematic palm, two reduced-coordinate fingers, free bodies, statics."""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass

import numpy as np

from graspforge.dynamics import kernel as K
from graspforge.dynamics.collision import PLANE, POLYGON, collide_py
from graspforge.objects import ObjectSpec
from graspforge.transmission import DesignParams, HandState, Mode, TransmissionConfig

PALM, PP1, DP1, PP2, DP2 = range(5)
STATIC = -1
LINK_NAMES = {STATIC: "static", PALM: "palm", PP1: "pp1", DP1: "dp1", PP2: "pp2", DP2: "dp2"}


class SimulationError(RuntimeError):
    pass


class DivergenceError(SimulationError):
    pass


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class WorldConfig:
    timestep: float = 0.001
    iterations: int = 32
    baumgarte: float = 0.2
    gravity: float = 9.81
    slop: float = 1e-4
    margin: float = 0.01  # speculative contact distance
    max_speed: float = 100.0
    angular_slop: float = 1e-3
    position_passes: int = 2  # post-step overlap projection
    mu_belt: float = 1.0
    mu_link: float = 0.5
    mu_ground: float = 0.4
    tip_radius: float = 0.004
    link_thickness: float = 0.016
    pp_rest_angle: float = math.pi / 6  # PP below horizontal at full extension
    link_density: float = 0.4  # kg per metre of link
    armature: float = 1e-5
    palm_height: float = 0.04
    tip_clearance: float = 0.001

    def __post_init__(self):
        if not self.timestep > 0:
            raise ValueError("timestep must be positive")
        if self.iterations < 4:
            raise ValueError("iterations must be at least 4")

    def packed(self) -> np.ndarray:
        wp = np.zeros(K.WP_SIZE)
        wp[K.WP_DT] = self.timestep
        wp[K.WP_ITERS] = self.iterations
        wp[K.WP_BETA] = self.baumgarte
        wp[K.WP_SLOP] = self.slop
        wp[K.WP_G] = self.gravity
        wp[K.WP_MARGIN] = self.margin
        wp[K.WP_VMAX] = self.max_speed
        wp[K.WP_ANG_SLOP] = self.angular_slop
        wp[K.WP_PPASS] = self.position_passes
        return wp


@dataclass(frozen=True)
class ContactPoint:
    position: tuple[float, float]
    normal: tuple[float, float]  # from body_a towards body_b
    depth: float
    normal_impulse: float
    tangent_impulse: float
    belt: bool
    belt_speed: float
    belt_direction: tuple[float, float]  # surface motion of body_a per unit belt speed
    body_a: int
    body_b: int
    mu: float

    @property
    def touching(self) -> bool:
        return self.depth >= 0.0 or self.normal_impulse > 0.0


def _rect(x0, x1, y0, y1, r):
    return [(x0 + r, y0 + r), (x1 - r, y0 + r), (x1 - r, y1 - r), (x0 + r, y1 - r)]


def _pack_transmission(params: DesignParams | None, tcfg: TransmissionConfig) -> np.ndarray:
    tp = np.zeros(K.TP_SIZE)
    if params is not None:
        tp[K.TP_RM] = params.R_M
        tp[K.TP_rM] = params.r_M
        tp[K.TP_RI] = params.R_I
        tp[K.TP_rI] = params.r_I
        tp[K.TP_KS] = params.k_s
        tp[K.TP_TPT] = params.T_pt
    tp[K.TP_K] = tcfg.K
    tp[K.TP_KP] = tcfg.K_prime
    tp[K.TP_KDD] = tcfg.K_dd
    tp[K.TP_KE] = tcfg.k_e
    tp[K.TP_THEO] = tcfg.theta_e_ofs
    tp[K.TP_THOFS] = tcfg.theta_ofs
    tp[K.TP_XMAX] = tcfg.x_max
    tp[K.TP_XOFS] = tcfg.x_ofs
    tp[K.TP_MC] = tcfg.m_c
    return tp


class World:
    """Mutable simulation state.  One world per execution context."""

    def __init__(self, cfg: WorldConfig | None = None):
        self.cfg = cfg or WorldConfig()
        self.params: DesignParams | None = None
        self.tcfg = TransmissionConfig()
        self.time = 0.0
        self.steps = 0
        self.q = np.zeros(K.NHAND)
        self.v = np.zeros(K.NHAND)
        self.palm = np.zeros(2)
        self.hp = np.zeros(K.HP_SIZE)
        self.tp = _pack_transmission(None, self.tcfg)
        self.wp = self.cfg.packed()
        self._geoms: list[dict] = []
        self.bodies: list[dict] = []
        self._compiled = False
        self.cout = np.zeros((K.MAX_CONTACTS, K.C_SIZE))
        self.info = np.zeros(K.I_SIZE)
        self.n_contacts = 0
        self.T_m = 0.0

    # -- construction -------------------------------------------------------

    def _add_geom(self, link, gtype, verts, radius, mu, belt=0, belt_speed=0.0, mu_belt=0.0, tag=""):
        self._geoms.append(
            dict(link=link, type=gtype, verts=np.asarray(verts, float).reshape(-1, 2), radius=float(radius),
                 mu=float(mu), belt=belt, belt_speed=float(belt_speed), mu_belt=float(mu_belt), tag=tag)
        )
        self._compiled = False
        return len(self._geoms) - 1

    def add_ground(self, mu: float | None = None, belt_speed: float | None = None) -> int:
        mu = self.cfg.mu_ground if mu is None else mu
        if belt_speed is None:
            return self._add_geom(STATIC, PLANE, [(0, 0), (0, 1)], 0.0, mu, tag="ground")
        return self._add_geom(STATIC, PLANE, [(0, 0), (0, 1)], 0.0, mu, belt=2,
                              belt_speed=belt_speed, mu_belt=mu, tag="ground")

    def add_static_box(self, center, width, height, mu: float = 1.0, tag="static") -> int:
        cx, cy = center
        return self._add_geom(STATIC, POLYGON, _rect(cx - width / 2, cx + width / 2, cy - height / 2,
                                                      cy + height / 2, 0.0), 0.0, mu, tag=tag)

    def add_body(self, shape: str, size, mass: float, inertia: float, pose=(0.0, 0.0, 0.0),
                 velocity=(0.0, 0.0, 0.0), mu: float = 1.0, radius: float = 0.0) -> int:
        """Add a free body; ``shape`` is 'box' (size=(w, h)) or 'circle' (size=radius)."""
        if mass <= 0 or inertia <= 0:
            raise ValueError("dynamic bodies need positive mass and inertia")
        k = len(self.bodies)
        link = K.NHAND + k
        if shape == "box":
            w, h = size
            self._add_geom(link, POLYGON, _rect(-w / 2, w / 2, -h / 2, h / 2, radius), radius, mu, tag="body")
        elif shape == "circle":
            self._add_geom(link, POLYGON, [(0.0, 0.0)], float(size), mu, tag="body")
        else:
            raise ValueError(f"unknown shape {shape!r}")
        self.bodies.append(dict(shape=shape, size=size, mass=float(mass), inertia=float(inertia), link=link))
        self.q = np.concatenate([self.q, np.asarray(pose, float)])
        self.v = np.concatenate([self.v, np.asarray(velocity, float)])
        return k

    def add_object(self, obj: ObjectSpec, x: float = 0.0) -> int:
        if obj.kind == "box":
            return self.add_body("box", (obj.width, obj.thickness), obj.mass, obj.inertia,
                                 pose=(x, obj.thickness / 2, 0.0), mu=obj.mu)
        return self.add_body("circle", obj.width / 2, obj.mass, obj.inertia,
                             pose=(x, obj.width / 2, 0.0), mu=obj.mu)

    def add_hand(self, params: DesignParams, tcfg: TransmissionConfig | None = None):
        cfg = self.cfg
        self.params = params
        tcfg = tcfg or TransmissionConfig()
        init = HandState.initial(tcfg)
        self.tcfg = tcfg.with_offset_for(init, params)
        self.tp = _pack_transmission(params, self.tcfg)
        half = cfg.link_thickness / 2
        r = cfg.tip_radius
        hp = self.hp
        hp[K.HP_LD] = params.l_D
        hp[K.HP_LP] = params.l_P
        hp[K.HP_LM] = params.l_M
        hp[K.HP_HALF] = half
        hp[K.HP_RAD] = r
        hp[K.HP_GAMMA0] = cfg.pp_rest_angle
        hp[K.HP_RHO] = cfg.link_density
        hp[K.HP_ARMATURE] = cfg.armature
        hp[K.HP_ENABLED] = 1.0
        hp[K.HP_PALM_H] = cfg.palm_height
        hm = params.l_M / 2
        self._add_geom(PALM, POLYGON, _rect(-hm, hm, -half, cfg.palm_height, r), r, cfg.mu_link, tag="palm")
        for link, length in ((PP1, params.l_P), (DP1, params.l_D), (PP2, params.l_P), (DP2, params.l_D)):
            belt = 1 if link == DP2 else 0
            self._add_geom(link, POLYGON, _rect(0.0, length, -half, half, r), r, cfg.mu_link,
                           belt=belt, mu_belt=cfg.mu_belt, tag=LINK_NAMES[link])
        self.q[:K.NHAND] = init.positions()
        self.v[:K.NHAND] = 0.0
        self.palm[0] = 0.0
        self.palm[0] = cfg.tip_clearance - self.tip_height()

    def _compile(self):
        geoms = self._geoms
        ng = len(geoms)
        self.gtype = np.array([g["type"] for g in geoms], np.int64)
        self.glink = np.array([g["link"] for g in geoms], np.int64)
        self.gnv = np.array([len(g["verts"]) for g in geoms], np.int64)
        self.gverts = np.zeros((ng, K.MAX_VERTS, 2))
        for i, g in enumerate(geoms):
            self.gverts[i, : len(g["verts"])] = g["verts"]
        self.grad = np.array([g["radius"] for g in geoms])
        self.gmu = np.array([g["mu"] for g in geoms])
        self.gbelt = np.array([g["belt"] for g in geoms], np.int64)
        self.gbelt_speed = np.array([g["belt_speed"] for g in geoms])
        self.gmu_belt = np.array([g["mu_belt"] for g in geoms])
        pairs, mus = [], []
        for i in range(ng):
            for j in range(i + 1, ng):
                a, b = self._order_pair(i, j)
                if a is None:
                    continue
                pairs.append((a, b))
                mus.append(min(geoms[a]["mu"], geoms[b]["mu"]))
        self.pairs = np.array(pairs, np.int64).reshape(-1, 2)
        self.pair_mu = np.array(mus, float)
        self.bmass = np.array([b["mass"] for b in self.bodies], float)
        self.binertia = np.array([b["inertia"] for b in self.bodies], float)
        if len(self.bodies) == 0:
            self.bmass = np.zeros(0)
            self.binertia = np.zeros(0)
        self.fext = np.zeros((len(self.bodies), 3))
        self._compiled = True

    def _order_pair(self, i, j):
        la, lb = self._geoms[i]["link"], self._geoms[j]["link"]

        def rank(link):
            if link == STATIC:
                return 0
            if link < K.NHAND:
                return 1
            return 2

        ra, rb = rank(la), rank(lb)
        if la == lb or (ra == 0 and rb == 0):
            return None, None
        if ra == 1 and rb == 1:
            if {la, lb} == {DP1, DP2}:
                return (i, j) if la == DP2 else (j, i)
            return None, None
        return (i, j) if ra <= rb else (j, i)

    # -- stepping -----------------------------------------------------------

    @property
    def has_hand(self) -> bool:
        return self.hp[K.HP_ENABLED] > 0.5

    def set_external_wrench(self, body: int, fx: float, fy: float, torque: float):
        if not self._compiled:
            self._compile()
        self.fext[body] = (fx, fy, torque)

    def step(self, T_m: float = 0.0, palm_velocity: float = 0.0) -> "World":
        if not self._compiled:
            self._compile()
        self.T_m = float(T_m)
        self.palm[1] = palm_velocity
        status = K.step_kernel(
            self.q, self.v, self.palm, self.T_m, self.hp, self.tp, self.wp,
            self.gtype, self.glink, self.gnv, self.gverts, self.grad, self.gmu, self.gbelt,
            self.gbelt_speed, self.gmu_belt, self.pairs, self.pair_mu, self.bmass, self.binertia,
            self.fext, self.cout, self.info,
        )
        self.n_contacts = int(self.info[K.I_NC])
        self.time += self.cfg.timestep
        self.steps += 1
        if status != K.STATUS_OK:
            raise DivergenceError(f"simulation diverged at t={self.time:.4f}s")
        return self

    def copy(self) -> "World":
        return copy.deepcopy(self)

    # -- queries ------------------------------------------------------------

    def contact_report(self) -> list[ContactPoint]:
        out = []
        for row in self.cout[: self.n_contacts]:
            cp = ContactPoint(
                position=(row[K.C_PX], row[K.C_PY]),
                normal=(row[K.C_NX], row[K.C_NY]),
                depth=row[K.C_DEPTH],
                normal_impulse=row[K.C_LN],
                tangent_impulse=row[K.C_LT],
                belt=bool(row[K.C_BELT]),
                belt_speed=row[K.C_BELT_SPEED],
                belt_direction=(row[K.C_BTX], row[K.C_BTY]),
                body_a=int(self.glink[int(row[K.C_GA])]),
                body_b=int(self.glink[int(row[K.C_GB])]),
                mu=row[K.C_MU],
            )
            if cp.touching:
                out.append(cp)
        return out

    def frames(self) -> np.ndarray:
        fr = np.zeros((K.NHAND + len(self.bodies), 4))
        if self.has_hand:
            K.hand_frames(self.q, self.palm[0], self.hp, self.tp, fr)
        K.body_frames(self.q, len(self.bodies), fr)
        return fr

    def geom_vertices(self, g: int, frames: np.ndarray | None = None) -> np.ndarray:
        if not self._compiled:
            self._compile()
        frames = self.frames() if frames is None else frames
        out = np.zeros((K.MAX_VERTS, 2))
        n = K.geom_world(g, self.gtype, self.glink, self.gnv, self.gverts, frames, out)
        return out[:n].copy()

    def geoms_of(self, link: int) -> list[int]:
        return [i for i, g in enumerate(self._geoms) if g["link"] == link]

    def geom_info(self, g: int) -> dict:
        return self._geoms[g]

    def tip_height(self) -> float:
        """Lowest point of both distal links."""
        if not self._compiled:
            self._compile()
        return K.tip_height_kernel(self.q, self.palm[0], self.hp, self.tp, self.glink, self.gtype,
                                   self.gnv, self.gverts, self.grad)

    def object_contacts(self, body: int = 0) -> tuple[int, int, float]:
        """(hand contacts, static contacts, hand normal impulse) on free body ``body``."""
        return K.contact_summary(self.cout, self.n_contacts, self.glink, K.NHAND + body)

    def hand_state(self) -> HandState:
        return HandState(*self.q[:5], *self.v[:5])

    def body_pose(self, k: int = 0) -> np.ndarray:
        b = K.NHAND + 3 * k
        return self.q[b:b + 3].copy()

    def body_velocity(self, k: int = 0) -> np.ndarray:
        b = K.NHAND + 3 * k
        return self.v[b:b + 3].copy()

    @property
    def palm_y(self) -> float:
        return float(self.palm[0])

    @property
    def slider(self) -> tuple[float, float, float, Mode]:
        """(x_t, x_s, T_s, mode) as evaluated at the start of the last step."""
        return (self.info[K.I_XT], self.info[K.I_XS], self.info[K.I_TS], Mode(int(self.info[K.I_MODE]) or 1))

    @property
    def crawler_contact_impulse(self) -> float:
        """Generalized contact impulse applied to the crawler coordinate in the last step."""
        return float(self.info[K.I_CRAWL])

    def body_energy(self) -> float:
        e = 0.0
        for k, b in enumerate(self.bodies):
            vx, vy, w = self.body_velocity(k)
            e += 0.5 * b["mass"] * (vx * vx + vy * vy) + 0.5 * b["inertia"] * w * w
            e += b["mass"] * self.cfg.gravity * self.body_pose(k)[1]
        return e

    def hand_object_overlap(self, body: int = 0, margin: float = 0.0) -> float:
        """Largest overlap depth between the hand and a free body (<= 0 if separated)."""
        if not self._compiled:
            self._compile()
        fr = self.frames()
        link = K.NHAND + body
        worst = -math.inf
        for gb in self.geoms_of(link):
            vb = self.geom_vertices(gb, fr)
            for link_h in (PALM, PP1, DP1, PP2, DP2):
                for ga in self.geoms_of(link_h):
                    va = self.geom_vertices(ga, fr)
                    c = collide_py(POLYGON, va, self.grad[ga], POLYGON, vb, self.grad[gb], margin=1.0)
                    if len(c):
                        worst = max(worst, float(c[:, 4].max()))
        return worst


def build_world(params: DesignParams, obj: ObjectSpec, cfg: WorldConfig | None = None,
                tcfg: TransmissionConfig | None = None, clearance: float = 0.0005) -> World:
    """Extended hand straddling ``obj`` which rests on the ground at the origin."""
    cfg = cfg or WorldConfig()
    reach = params.l_M + 2 * (params.l_P + params.l_D)
    if obj.width >= reach:
        raise GeometryError(f"object width {obj.width:g} m exceeds the hand's reach {reach:g} m")
    world = World(cfg)
    world.add_ground()
    world.add_hand(params, tcfg)
    world.add_object(obj)
    world._compile()
    overlap = world.hand_object_overlap(0)
    if overlap > -clearance:
        raise GeometryError(
            f"extended hand cannot straddle {obj.name or obj.kind} (overlap {overlap * 1e3:.2f} mm)"
        )
    return world


def initial_slider_mode(world: World) -> Mode:
    from graspforge.transmission import slider_state

    return slider_state(world.hand_state(), world.params, world.tcfg).mode


__all__ = [
    "ContactPoint",
    "DivergenceError",
    "GeometryError",
    "SimulationError",
    "World",
    "WorldConfig",
    "build_world",
]
