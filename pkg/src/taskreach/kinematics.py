"""Serial-chain model: forward kinematics, geometric Jacobian, numeric IK.

A chain is a list of revolute / prismatic / continuous joints with origins,
axes, and limits, plus collision shapes attached to joint frames and to the
mobile base. IK is damped least squares from multiple seeds (joint-range
midpoint first, then uniform random), with converged solutions deduplicated
and filtered for self- and world-collision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import geometry
from .backend import impl
from .geometry import Pose, Shape

REVOLUTE, PRISMATIC, CONTINUOUS = 0, 1, 2
_TYPE_NAMES = {"revolute": REVOLUTE, "prismatic": PRISMATIC, "continuous": CONTINUOUS}

# IK defaults; restart count is a reporting-relevant knob, see ScoreReport.
IK_DAMPING = 0.05
IK_MAX_ITERS = 200
IK_RESTARTS = 20
IK_TOL_POS = 1e-4
IK_TOL_ROT = 1e-3
IK_DEDUP = 0.05


@dataclass(frozen=True)
class Joint:
    type: int
    axis: np.ndarray
    origin: Pose
    q_min: float = 0.0
    q_max: float = 0.0

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=np.float64)
        n = float(np.linalg.norm(axis))
        if abs(n - 1.0) > 1e-9:
            raise ValueError("joint axis must be a unit vector")
        object.__setattr__(self, "axis", axis)
        if self.type != CONTINUOUS and not self.q_min < self.q_max:
            raise ValueError("q_min must be below q_max for bounded joints")


@dataclass(frozen=True)
class KinematicChain:
    """Manipulator model: joints, link shapes, base shapes, end-effector offset.

    `mount` places the first joint relative to the (spine-lifted) base frame;
    `spine_range`, when present, is a prismatic z lift between the robot base
    pose and the mount, controlled by the configuration's first auxiliary DoF.
    """

    name: str
    joints: tuple
    ee_offset: Pose = field(default_factory=Pose)
    link_shapes: tuple = ()          # (joint index, Shape)
    base_shapes: tuple = ()          # attached to the robot base pose
    mount: Pose = field(default_factory=Pose)
    spine_range: tuple | None = None
    order: int = 6

    def __post_init__(self):
        if not self.joints:
            raise ValueError("chain needs at least one joint")
        if self.order not in (3, 6):
            raise ValueError("task order must be 3 or 6")
        for idx, _ in self.link_shapes:
            if not 0 <= idx < len(self.joints):
                raise ValueError(f"link shape attached to unknown joint {idx}")
        if self.spine_range is not None and not self.spine_range[0] <= self.spine_range[1]:
            raise ValueError("bad spine range")

    @property
    def n(self) -> int:
        return len(self.joints)

    @property
    def aux_count(self) -> int:
        return 1 if self.spine_range is not None else 0

    @cached_property
    def max_reach(self) -> float:
        reach = float(np.linalg.norm(self.mount.xyz)) + float(np.linalg.norm(self.ee_offset.xyz))
        for j in self.joints:
            reach += float(np.linalg.norm(j.origin.xyz))
            if j.type == PRISMATIC:
                reach += max(abs(j.q_min), abs(j.q_max))
        if self.spine_range is not None:
            reach += max(abs(self.spine_range[0]), abs(self.spine_range[1]))
        return reach

    def limits(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([j.q_min if j.type != CONTINUOUS else -np.pi for j in self.joints])
        hi = np.array([j.q_max if j.type != CONTINUOUS else np.pi for j in self.joints])
        return lo, hi

    def midpoint(self) -> np.ndarray:
        lo, hi = self.limits()
        return 0.5 * (lo + hi)

    def clamp(self, q: np.ndarray) -> np.ndarray:
        lo, hi = self.limits()
        cont = np.array([j.type == CONTINUOUS for j in self.joints])
        out = np.clip(np.asarray(q, dtype=np.float64), lo, hi)
        out[cont] = np.asarray(q, dtype=np.float64)[cont]
        return out

    def mount_pose(self, base: Pose, spine: float = 0.0) -> Pose:
        """World pose of the arm base for a robot base pose and spine height."""
        lift = Pose(np.array([0.0, 0.0, spine]))
        return geometry.compose(geometry.compose(base, lift), self.mount)

    @cached_property
    def _handle(self):
        return _build_handle(self, impl)

    def handle_for(self, backend):
        if backend is impl:
            return self._handle
        return _build_handle(self, backend)


def _build_handle(chain: KinematicChain, backend):
    n = chain.n
    jtypes = np.array([j.type for j in chain.joints], dtype=np.int32)
    axes = np.array([j.axis for j in chain.joints])
    origins = np.array([j.origin.as_array() for j in chain.joints])
    seed_lo, seed_hi = chain.limits()
    clamp_lo = np.where(jtypes == CONTINUOUS, -1e300, seed_lo)
    clamp_hi = np.where(jtypes == CONTINUOUS, 1e300, seed_hi)

    link_joint = np.array([idx for idx, _ in chain.link_shapes], dtype=np.int32)
    link_kind = np.array([s.kind_id for _, s in chain.link_shapes], dtype=np.int32)
    link_params = (
        np.array([s.params4() for _, s in chain.link_shapes]).reshape(-1, 4)
        if chain.link_shapes else np.empty((0, 4))
    )
    link_pose = (
        np.array([s.local_pose.as_array() for _, s in chain.link_shapes]).reshape(-1, 7)
        if chain.link_shapes else np.empty((0, 7))
    )
    link_margin = np.array([s.margin for _, s in chain.link_shapes])

    base_kind = np.array([s.kind_id for s in chain.base_shapes], dtype=np.int32)
    base_params = (
        np.array([s.params4() for s in chain.base_shapes]).reshape(-1, 4)
        if chain.base_shapes else np.empty((0, 4))
    )
    base_pose = (
        np.array([s.local_pose.as_array() for s in chain.base_shapes]).reshape(-1, 7)
        if chain.base_shapes else np.empty((0, 7))
    )
    base_margin = np.array([s.margin for s in chain.base_shapes])

    # Self-collision pairs: shapes grouped by joint, consecutive groups are
    # adjacent links and skipped; the base counts as the group before joint 0.
    groups = sorted(set(link_joint.tolist()))
    gidx = {g: k + 1 for k, g in enumerate(groups)}  # base group is 0
    self_pairs = []
    for i in range(len(link_joint)):
        for j in range(i + 1, len(link_joint)):
            if abs(gidx[link_joint[i]] - gidx[link_joint[j]]) >= 2:
                self_pairs.append((i, j))
    base_pairs = []
    for b in range(len(chain.base_shapes)):
        for s in range(len(link_joint)):
            if gidx[link_joint[s]] >= 2:
                base_pairs.append((b, s))

    return backend.make_chain(
        jtypes, axes, origins, seed_lo, seed_hi, clamp_lo, clamp_hi,
        chain.ee_offset.as_array(), chain.order, chain.max_reach,
        link_joint, link_kind, link_params, link_pose, link_margin,
        base_kind, base_params, base_pose, base_margin,
        np.array(self_pairs, dtype=np.int32).reshape(-1, 2),
        np.array(base_pairs, dtype=np.int32).reshape(-1, 2),
    )


@dataclass
class IkSolutionSet:
    """Deduplicated joint solutions for one goal, in discovery order."""

    solutions: list
    goal: Pose
    collision_free: list

    def __len__(self) -> int:
        return len(self.solutions)

    @property
    def empty(self) -> bool:
        return not self.solutions


def forward_kinematics(chain: KinematicChain, q, base: Pose | None = None, spine: float = 0.0) -> Pose:
    """End-effector pose in the world frame (chain base frame by default)."""
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (chain.n,):
        raise ValueError(f"expected {chain.n} joint values, got {q.shape}")
    mount = chain.mount_pose(base or Pose.identity(), spine)
    return Pose.from_array(impl.fk_ee(chain._handle, mount.as_array(), q))


def jacobian(chain: KinematicChain, q, base: Pose | None = None, spine: float = 0.0) -> np.ndarray:
    """Geometric Jacobian at the end effector, rows per the chain's order.

    Order 6 gives rows (vx vy vz wx wy wz); order 3 gives (vx vy wz).
    """
    q = np.asarray(q, dtype=np.float64)
    if q.shape != (chain.n,):
        raise ValueError(f"expected {chain.n} joint values, got {q.shape}")
    mount = chain.mount_pose(base or Pose.identity(), spine)
    return impl.jacobian(chain._handle, mount.as_array(), q)


def solve_ik(
    chain: KinematicChain, base: Pose, goal: Pose, world=None, *,
    spine: float = 0.0, restarts: int = IK_RESTARTS, seed: int = 0,
    max_iters: int = IK_MAX_ITERS, damping: float = IK_DAMPING,
    tol_pos: float = IK_TOL_POS, tol_rot: float = IK_TOL_ROT,
    dedup_tol: float = IK_DEDUP, stop_first: bool = False,
    position_only: bool = False,
) -> IkSolutionSet:
    """Damped least-squares IK from `restarts` seeds; empty set = unreachable.

    `world` is a scene.CollisionWorld (or None for free space). A base pose in
    collision with the world yields an empty set directly. `position_only`
    drops the orientation rows of the task error.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    handle = chain._handle
    mount = chain.mount_pose(base, spine)
    wh = world.handle_for(impl) if world is not None else None
    if wh is not None and wh.n and impl.base_collides(handle, base.as_array(), wh):
        return IkSolutionSet([], goal, [])
    sols = impl.solve_ik(
        handle, base.as_array(), mount.as_array(), goal.as_array(), wh, int(seed),
        int(restarts), int(max_iters), float(damping), float(tol_pos),
        float(tol_rot), float(dedup_tol), bool(stop_first), True,
        bool(position_only),
    )
    checked = world is not None
    return IkSolutionSet([s for s in sols], goal, [checked] * len(sols))


def load_chain(source) -> KinematicChain:
    """Load a chain description (dict, path, or bundled name like 'arm7')."""
    if isinstance(source, dict):
        data = source
    else:
        from .scene import _read_data_file
        data = _read_data_file(source, "chains", ".chain")
    allowed = {"name", "order", "mount", "spine", "joints", "ee", "link_shapes", "base_shapes"}
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown chain fields: {sorted(unknown)}")
    joints = []
    for j in data["joints"]:
        bad = set(j) - {"name", "type", "axis", "origin", "limits"}
        if bad:
            raise ValueError(f"unknown joint fields: {sorted(bad)}")
        jtype = _TYPE_NAMES[j["type"]]
        origin = Pose.from_rpy(j.get("origin", {}).get("xyz", [0, 0, 0]), j.get("origin", {}).get("rpy", [0, 0, 0]))
        if jtype == CONTINUOUS:
            if "limits" in j:
                raise ValueError("continuous joints carry no limits")
            joints.append(Joint(jtype, j["axis"], origin))
        else:
            lo, hi = j["limits"]
            joints.append(Joint(jtype, j["axis"], origin, float(lo), float(hi)))
    ee = Pose.from_rpy(data.get("ee", {}).get("xyz", [0, 0, 0]), data.get("ee", {}).get("rpy", [0, 0, 0]))
    mount = Pose.from_rpy(data.get("mount", {}).get("xyz", [0, 0, 0]), data.get("mount", {}).get("rpy", [0, 0, 0]))
    link_shapes = tuple(
        (int(s["joint"]), geometry.shape_from_json({k: v for k, v in s.items() if k != "joint"}))
        for s in data.get("link_shapes", [])
    )
    base_shapes = tuple(geometry.shape_from_json(s) for s in data.get("base_shapes", []))
    spine = tuple(data["spine"]["range"]) if data.get("spine") else None
    return KinematicChain(
        name=data["name"], joints=tuple(joints), ee_offset=ee,
        link_shapes=link_shapes, base_shapes=base_shapes, mount=mount,
        spine_range=spine, order=int(data.get("order", 6)),
    )


def chain_to_json(chain: KinematicChain) -> str:
    names = {v: k for k, v in _TYPE_NAMES.items()}
    out = {
        "name": chain.name,
        "order": chain.order,
        "joints": [
            {
                "type": names[j.type],
                "axis": [float(v) for v in j.axis],
                "origin": {"xyz": [float(v) for v in j.origin.xyz]},
                **({} if j.type == CONTINUOUS else {"limits": [j.q_min, j.q_max]}),
            }
            for j in chain.joints
        ],
    }
    return json.dumps(out, sort_keys=True)
