"""Rigid-body poses and primitive-shape collision queries.

Poses are a position plus a unit quaternion (w, x, y, z). Shapes are spheres,
capsules (segment along local z), and boxes (half extents), each carrying a
safety margin that inflates the surface by a fixed distance. All values are
immutable after construction and every query is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPHERE, CAPSULE, BOX = 0, 1, 2
_KIND_NAMES = {"sphere": SPHERE, "capsule": CAPSULE, "box": BOX}
_KIND_LABELS = {v: k for k, v in _KIND_NAMES.items()}


# ---------------------------------------------------------------------------
# quaternion helpers (w, x, y, z)
# ---------------------------------------------------------------------------

def quat_normalize(q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    n = float(np.sqrt(np.dot(q, q)))
    if n == 0.0:
        raise ValueError("zero quaternion")
    return q / n


def quat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ]
    )


def quat_conj(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    # v + 2 * u x (u x v + w v), u = vector part
    u = q[1:]
    w = q[0]
    t = np.cross(u, v) * 2.0
    return v + w * t + np.cross(u, t)


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    axis = np.asarray(axis, dtype=np.float64)
    n = float(np.linalg.norm(axis))
    if n == 0.0:
        raise ValueError("zero rotation axis")
    half = 0.5 * angle
    s = np.sin(half) / n
    return np.array([np.cos(half), axis[0] * s, axis[1] * s, axis[2] * s])


def quat_from_rpy(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """ZYX convention: yaw about z, then pitch about y, then roll about x."""
    qz = quat_from_axis_angle(np.array([0.0, 0.0, 1.0]), yaw)
    qy = quat_from_axis_angle(np.array([0.0, 1.0, 0.0]), pitch)
    qx = quat_from_axis_angle(np.array([1.0, 0.0, 0.0]), roll)
    return quat_mul(quat_mul(qz, qy), qx)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def quat_to_rotvec(q: np.ndarray) -> np.ndarray:
    """Axis-angle vector of the rotation, angle in [0, pi]."""
    w, v = q[0], q[1:]
    if w < 0.0:
        w, v = -w, -v
    s = float(np.linalg.norm(v))
    if s < 1e-12:
        return v * 2.0
    angle = 2.0 * np.arctan2(s, w)
    return v * (angle / s)


def quat_yaw(q: np.ndarray) -> float:
    w, x, y, z = q
    return float(np.arctan2(2.0 * (w * z + x * y), 1.0 - 2.0 * (y * y + z * z)))


def wrap_angle(a: float) -> float:
    return float(np.arctan2(np.sin(a), np.cos(a)))


# ---------------------------------------------------------------------------
# poses
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Pose:
    """Rigid transform: rotate by `quat`, then translate by `xyz`."""

    xyz: np.ndarray = field(default_factory=lambda: np.zeros(3))
    quat: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))

    def __post_init__(self):
        object.__setattr__(self, "xyz", np.asarray(self.xyz, dtype=np.float64).copy())
        q = np.asarray(self.quat, dtype=np.float64)
        n = float(np.linalg.norm(q))
        if abs(n - 1.0) > 1e-9:
            if n == 0.0:
                raise ValueError("zero quaternion")
            q = q / n
        object.__setattr__(self, "quat", q.copy())
        self.xyz.flags.writeable = False
        self.quat.flags.writeable = False
        if self.xyz.shape != (3,):
            raise ValueError("position must be a 3-vector")

    @staticmethod
    def identity() -> "Pose":
        return Pose()

    @staticmethod
    def from_xyz(x: float, y: float, z: float = 0.0) -> "Pose":
        return Pose(np.array([x, y, z]))

    @staticmethod
    def from_rpy(xyz, rpy) -> "Pose":
        return Pose(np.asarray(xyz, dtype=np.float64), quat_from_rpy(*rpy))

    @staticmethod
    def rot_z(angle: float) -> "Pose":
        return Pose(np.zeros(3), quat_from_axis_angle(np.array([0.0, 0.0, 1.0]), angle))

    def apply(self, point: np.ndarray) -> np.ndarray:
        return self.xyz + quat_rotate(self.quat, np.asarray(point, dtype=np.float64))

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.xyz, self.quat])

    @staticmethod
    def from_array(arr: np.ndarray) -> "Pose":
        arr = np.asarray(arr, dtype=np.float64)
        return Pose(arr[:3], arr[3:7])

    def to_json(self) -> dict:
        return {"xyz": [float(v) for v in self.xyz], "quat": [float(v) for v in self.quat]}


def compose(a: Pose, b: Pose) -> Pose:
    """Apply transform a, then b within a's frame (homogeneous product a @ b)."""
    return Pose(a.xyz + quat_rotate(a.quat, b.xyz), quat_normalize(quat_mul(a.quat, b.quat)))


def inverse(p: Pose) -> Pose:
    qc = quat_conj(p.quat)
    return Pose(-quat_rotate(qc, p.xyz), qc)


def pose_compose_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """compose() on raw 7-vectors [x y z qw qx qy qz]; used by hot-path callers."""
    out = np.empty(7)
    out[:3] = a[:3] + quat_rotate(a[3:], b[:3])
    out[3:] = quat_mul(a[3:], b[3:])
    out[3:] /= np.linalg.norm(out[3:])
    return out


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Shape:
    """A collision primitive with a safety margin.

    kind/dimensions:
      sphere  -- dimensions = (radius,)
      capsule -- dimensions = (radius, half_length); segment along local z
      box     -- dimensions = (hx, hy, hz) half extents
    `local_pose` places the shape in its owner's frame. `margin` inflates the
    surface by a fixed distance (a Minkowski sum with a ball, so every support
    distance grows by exactly `margin`).
    """

    kind: str
    dimensions: tuple
    local_pose: Pose = field(default_factory=Pose)
    margin: float = 0.0

    def __post_init__(self):
        if self.kind not in _KIND_NAMES:
            raise ValueError(f"unknown shape kind {self.kind!r}")
        dims = tuple(float(d) for d in self.dimensions)
        expected = {SPHERE: 1, CAPSULE: 2, BOX: 3}[_KIND_NAMES[self.kind]]
        if len(dims) != expected:
            raise ValueError(f"{self.kind} needs {expected} dimensions, got {len(dims)}")
        if any(d <= 0.0 for d in dims):
            raise ValueError("shape dimensions must be positive")
        if self.margin < 0.0:
            raise ValueError("margin must be non-negative")
        object.__setattr__(self, "dimensions", dims)

    @property
    def kind_id(self) -> int:
        return _KIND_NAMES[self.kind]

    def params4(self) -> np.ndarray:
        p = np.zeros(4)
        p[: len(self.dimensions)] = self.dimensions
        return p

    def with_margin(self, margin: float) -> "Shape":
        return Shape(self.kind, self.dimensions, self.local_pose, margin)

    def bounding_radius(self) -> float:
        kid = self.kind_id
        if kid == SPHERE:
            return self.dimensions[0]
        if kid == CAPSULE:
            return self.dimensions[0] + self.dimensions[1]
        return float(np.linalg.norm(self.dimensions))


def shape_distance(a: Shape, a_pose: Pose, b: Shape, b_pose: Pose) -> float:
    """Separation between the two shape surfaces, ignoring margins.

    Positive when separated; <= 0 when touching or overlapping (overlap depth
    is not resolved beyond the sum of the core radii).
    """
    from .backend import impl

    pa = compose(a_pose, a.local_pose)
    pb = compose(b_pose, b.local_pose)
    ka, kb = a.kind_id, b.kind_id
    aa = (ka, a.params4(), pa.as_array())
    bb = (kb, b.params4(), pb.as_array())
    # Canonical argument order makes the query exactly symmetric.
    if (kb, tuple(bb[1]), tuple(bb[2])) < (ka, tuple(aa[1]), tuple(aa[2])):
        aa, bb = bb, aa
    return float(impl.surface_distance(aa[0], aa[1], aa[2], bb[0], bb[1], bb[2]))


def shapes_collide(a: Shape, a_pose: Pose, b: Shape, b_pose: Pose) -> bool:
    """True iff the margin-inflated shapes intersect (contact counts)."""
    return shape_distance(a, a_pose, b, b_pose) <= a.margin + b.margin


def shape_from_json(obj: dict) -> Shape:
    allowed = {"kind", "size", "pose", "margin"}
    unknown = set(obj) - allowed
    if unknown:
        raise ValueError(f"unknown shape fields: {sorted(unknown)}")
    pose = Pose.from_rpy(obj.get("pose", {}).get("xyz", [0, 0, 0]), obj.get("pose", {}).get("rpy", [0, 0, 0]))
    if "pose" in obj:
        bad = set(obj["pose"]) - {"xyz", "rpy"}
        if bad:
            raise ValueError(f"unknown pose fields: {sorted(bad)}")
    return Shape(obj["kind"], tuple(obj["size"]), pose, float(obj.get("margin", 0.0)))
