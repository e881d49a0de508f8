"""Pure numpy kernels: FK, geometric Jacobian, DLS-IK, and primitive distances.

This is the fallback backend; `taskreach.backend._core` is the compiled twin
with the same call surface and the same random streams (SplitMix64), so a
given seed produces the same restart seeds on either backend.

Poses are 7-vectors [x y z qw qx qy qz]. Shape params are 4-vectors:
sphere (r,-,-,-), capsule (r, half_len,-,-) along local z, box (hx, hy, hz,-).
"""

from __future__ import annotations

import numpy as np

name = "pure"

_MASK = (1 << 64) - 1
_GOLDEN = 0.6180339887498949  # (sqrt(5)-1)/2
_REV, _PRISM, _CONT = 0, 1, 2
_SPHERE, _CAPSULE, _BOX = 0, 1, 2


# ---------------------------------------------------------------------------
# SplitMix64 stream (bit-identical to the compiled backend)
# ---------------------------------------------------------------------------

class _SplitMix:
    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_raw(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def next_double(self) -> float:
        return (self.next_raw() >> 11) * (1.0 / 9007199254740992.0)


# ---------------------------------------------------------------------------
# quaternion / pose helpers on raw arrays
# ---------------------------------------------------------------------------

def _quat_mul(a, b):
    return np.array(
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    )


def _quat_rotate(q, v):
    u = q[1:]
    t = np.cross(u, v) * 2.0
    return v + q[0] * t + np.cross(u, t)


def _pose_compose(a, b):
    out = np.empty(7)
    out[:3] = a[:3] + _quat_rotate(a[3:], b[:3])
    q = _quat_mul(a[3:], b[3:])
    out[3:] = q / np.sqrt(np.dot(q, q))
    return out


def _quat_about(axis, angle):
    half = 0.5 * angle
    s = np.sin(half)
    return np.array([np.cos(half), axis[0] * s, axis[1] * s, axis[2] * s])


def _rotvec_of_error(qg, qc):
    # axis-angle of qg * conj(qc), world frame
    q = _quat_mul(qg, np.array([qc[0], -qc[1], -qc[2], -qc[3]]))
    w, v = q[0], q[1:]
    if w < 0.0:
        w, v = -w, -v
    s = float(np.sqrt(np.dot(v, v)))
    if s < 1e-12:
        return v * 2.0
    return v * (2.0 * np.arctan2(s, w) / s)


# ---------------------------------------------------------------------------
# primitive distances
# ---------------------------------------------------------------------------

def _dist_point_seg(p, a, b):
    d = b - a
    dd = float(np.dot(d, d))
    t = 0.0 if dd == 0.0 else min(1.0, max(0.0, float(np.dot(p - a, d)) / dd))
    return float(np.linalg.norm(p - (a + t * d)))


def _dist_seg_seg(p1, q1, p2, q2):
    # Ericson, Real-Time Collision Detection 5.1.9
    d1 = q1 - p1
    d2 = q2 - p2
    r = p1 - p2
    a = float(np.dot(d1, d1))
    e = float(np.dot(d2, d2))
    f = float(np.dot(d2, r))
    if a <= 1e-18 and e <= 1e-18:
        return float(np.linalg.norm(r))
    if a <= 1e-18:
        s = 0.0
        t = min(1.0, max(0.0, f / e))
    else:
        c = float(np.dot(d1, r))
        if e <= 1e-18:
            t = 0.0
            s = min(1.0, max(0.0, -c / a))
        else:
            b = float(np.dot(d1, d2))
            denom = a * e - b * b
            s = min(1.0, max(0.0, (b * f - c * e) / denom)) if denom > 1e-18 else 0.0
            t = (b * s + f) / e
            if t < 0.0:
                t = 0.0
                s = min(1.0, max(0.0, -c / a))
            elif t > 1.0:
                t = 1.0
                s = min(1.0, max(0.0, (b - c) / a))
    return float(np.linalg.norm((p1 + s * d1) - (p2 + t * d2)))


def _to_frame(pose, p):
    q = pose[3:]
    return _quat_rotate(np.array([q[0], -q[1], -q[2], -q[3]]), p - pose[:3])


def _dist_point_box(p, pose, half):
    # unsigned distance to the solid box (0 inside)
    loc = _to_frame(pose, p)
    d = np.maximum(np.abs(loc) - half, 0.0)
    return float(np.sqrt(np.dot(d, d)))


def _dist_seg_box(a, b, pose, half):
    # distance to a convex set is convex along the segment: golden section
    f = lambda t: _dist_point_box(a + t * (b - a), pose, half)
    lo, hi = 0.0, 1.0
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    for _ in range(72):
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - _GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _GOLDEN * (hi - lo)
            fd = f(d)
    return min(f(0.0), f(1.0), fc, fd)


def _project_box(p, pose, half):
    loc = _to_frame(pose, p)
    loc = np.minimum(np.maximum(loc, -half), half)
    return pose[:3] + _quat_rotate(pose[3:], loc)


def _dist_box_box(pose_a, half_a, pose_b, half_b):
    # alternating projections; exact limit for convex sets, iteration-capped
    x = pose_a[:3].copy()
    prev = np.inf
    y = _project_box(x, pose_b, half_b)
    for _ in range(128):
        x = _project_box(y, pose_a, half_a)
        y = _project_box(x, pose_b, half_b)
        d = float(np.linalg.norm(x - y))
        if prev - d < 1e-14:
            break
        prev = d
    return float(np.linalg.norm(x - y))


def _capsule_ends(params, pose):
    hz = params[1]
    ez = _quat_rotate(pose[3:], np.array([0.0, 0.0, hz]))
    return pose[:3] - ez, pose[:3] + ez


def surface_distance(kind_a, params_a, pose_a, kind_b, params_b, pose_b) -> float:
    """Separation of the two surfaces; <= 0 when touching or overlapping."""
    ka, kb = int(kind_a), int(kind_b)
    if ka > kb:
        ka, kb = kb, ka
        params_a, params_b = params_b, params_a
        pose_a, pose_b = pose_b, pose_a
    pa = np.asarray(pose_a, dtype=np.float64)
    pb = np.asarray(pose_b, dtype=np.float64)
    if ka == _SPHERE and kb == _SPHERE:
        return float(np.linalg.norm(pa[:3] - pb[:3])) - params_a[0] - params_b[0]
    if ka == _SPHERE and kb == _CAPSULE:
        e0, e1 = _capsule_ends(params_b, pb)
        return _dist_point_seg(pa[:3], e0, e1) - params_a[0] - params_b[0]
    if ka == _SPHERE and kb == _BOX:
        return _dist_point_box(pa[:3], pb, np.asarray(params_b[:3])) - params_a[0]
    if ka == _CAPSULE and kb == _CAPSULE:
        a0, a1 = _capsule_ends(params_a, pa)
        b0, b1 = _capsule_ends(params_b, pb)
        return _dist_seg_seg(a0, a1, b0, b1) - params_a[0] - params_b[0]
    if ka == _CAPSULE and kb == _BOX:
        a0, a1 = _capsule_ends(params_a, pa)
        return _dist_seg_box(a0, a1, pb, np.asarray(params_b[:3])) - params_a[0]
    return _dist_box_box(pa, np.asarray(params_a[:3]), pb, np.asarray(params_b[:3]))


def _bounding_radius(kind, params):
    if kind == _SPHERE:
        return params[0]
    if kind == _CAPSULE:
        return params[0] + params[1]
    return float(np.sqrt(params[0] ** 2 + params[1] ** 2 + params[2] ** 2))


# ---------------------------------------------------------------------------
# chain / world handles
# ---------------------------------------------------------------------------

class Chain:
    def __init__(self, **kw):
        self.__dict__.update(kw)


class World:
    def __init__(self, kinds, params, poses, margins):
        self.kinds = np.ascontiguousarray(kinds, dtype=np.int32)
        self.params = np.ascontiguousarray(params, dtype=np.float64).reshape(-1, 4)
        self.poses = np.ascontiguousarray(poses, dtype=np.float64).reshape(-1, 7)
        self.margins = np.ascontiguousarray(margins, dtype=np.float64)
        self.radii = np.array(
            [_bounding_radius(int(k), p) for k, p in zip(self.kinds, self.params)]
        )
        self.n = len(self.kinds)


def make_world(kinds, params, poses, margins) -> World:
    return World(kinds, params, poses, margins)


def make_chain(
    jtypes, axes, origins, seed_lo, seed_hi, clamp_lo, clamp_hi, ee, order, max_reach,
    link_joint, link_kind, link_params, link_pose, link_margin,
    base_kind, base_params, base_pose, base_margin, self_pairs, base_pairs,
) -> Chain:
    c = Chain(
        n=len(jtypes),
        jtypes=np.ascontiguousarray(jtypes, dtype=np.int32),
        axes=np.ascontiguousarray(axes, dtype=np.float64).reshape(-1, 3),
        origins=np.ascontiguousarray(origins, dtype=np.float64).reshape(-1, 7),
        seed_lo=np.ascontiguousarray(seed_lo, dtype=np.float64),
        seed_hi=np.ascontiguousarray(seed_hi, dtype=np.float64),
        clamp_lo=np.ascontiguousarray(clamp_lo, dtype=np.float64),
        clamp_hi=np.ascontiguousarray(clamp_hi, dtype=np.float64),
        ee=np.ascontiguousarray(ee, dtype=np.float64),
        order=int(order),
        max_reach=float(max_reach),
        link_joint=np.ascontiguousarray(link_joint, dtype=np.int32),
        link_kind=np.ascontiguousarray(link_kind, dtype=np.int32),
        link_params=np.ascontiguousarray(link_params, dtype=np.float64).reshape(-1, 4),
        link_pose=np.ascontiguousarray(link_pose, dtype=np.float64).reshape(-1, 7),
        link_margin=np.ascontiguousarray(link_margin, dtype=np.float64),
        base_kind=np.ascontiguousarray(base_kind, dtype=np.int32),
        base_params=np.ascontiguousarray(base_params, dtype=np.float64).reshape(-1, 4),
        base_pose=np.ascontiguousarray(base_pose, dtype=np.float64).reshape(-1, 7),
        base_margin=np.ascontiguousarray(base_margin, dtype=np.float64),
        self_pairs=np.ascontiguousarray(self_pairs, dtype=np.int32).reshape(-1, 2),
        base_pairs=np.ascontiguousarray(base_pairs, dtype=np.int32).reshape(-1, 2),
    )
    c.link_radii = np.array(
        [_bounding_radius(int(k), p) for k, p in zip(c.link_kind, c.link_params)]
    )
    c.ee_links = np.nonzero(c.link_joint == c.n - 1)[0]
    return c


# ---------------------------------------------------------------------------
# forward kinematics / Jacobian
# ---------------------------------------------------------------------------

def fk_frames(chain: Chain, base7, q) -> np.ndarray:
    frames = np.empty((chain.n, 7))
    p = np.asarray(base7, dtype=np.float64)
    for i in range(chain.n):
        p = _pose_compose(p, chain.origins[i])
        if chain.jtypes[i] == _PRISM:
            motion = np.concatenate([chain.axes[i] * q[i], [1.0, 0.0, 0.0, 0.0]])
        else:
            motion = np.concatenate([[0.0, 0.0, 0.0], _quat_about(chain.axes[i], q[i])])
        p = _pose_compose(p, motion)
        frames[i] = p
    return frames


def fk_ee(chain: Chain, base7, q) -> np.ndarray:
    frames = fk_frames(chain, base7, q)
    return _pose_compose(frames[chain.n - 1], chain.ee)


def _jacobian_from_frames(chain: Chain, frames, ee_pos):
    J = np.zeros((6, chain.n))
    for i in range(chain.n):
        axis_w = _quat_rotate(frames[i, 3:], chain.axes[i])
        if chain.jtypes[i] == _PRISM:
            J[:3, i] = axis_w
        else:
            J[:3, i] = np.cross(axis_w, ee_pos - frames[i, :3])
            J[3:, i] = axis_w
    return J


def jacobian(chain: Chain, base7, q) -> np.ndarray:
    frames = fk_frames(chain, base7, q)
    ee = _pose_compose(frames[chain.n - 1], chain.ee)
    J = _jacobian_from_frames(chain, frames, ee[:3])
    if chain.order == 3:
        return J[[0, 1, 5], :]
    return J


# ---------------------------------------------------------------------------
# collision filtering
# ---------------------------------------------------------------------------

def _shape_vs_world(kind, params, pose, margin, radius, world: World) -> bool:
    for w in range(world.n):
        lim = radius + world.radii[w] + margin + world.margins[w]
        d = pose[:3] - world.poses[w, :3]
        if float(np.dot(d, d)) > lim * lim:
            continue
        sep = surface_distance(kind, params, pose, world.kinds[w], world.params[w], world.poses[w])
        if sep <= margin + world.margins[w]:
            return True
    return False


def base_collides(chain: Chain, root7, world: World) -> bool:
    """Robot base/torso shapes against the static world."""
    root7 = np.asarray(root7, dtype=np.float64)
    for b in range(len(chain.base_kind)):
        pose = _pose_compose(root7, chain.base_pose[b])
        radius = _bounding_radius(int(chain.base_kind[b]), chain.base_params[b])
        if _shape_vs_world(chain.base_kind[b], chain.base_params[b], pose, chain.base_margin[b], radius, world):
            return True
    return False


def _solution_collides(chain: Chain, root7, frames, world) -> bool:
    m = len(chain.link_joint)
    poses = np.empty((m, 7))
    for s in range(m):
        poses[s] = _pose_compose(frames[chain.link_joint[s]], chain.link_pose[s])
    if world is not None:
        for s in range(m):
            if _shape_vs_world(
                chain.link_kind[s], chain.link_params[s], poses[s],
                chain.link_margin[s], chain.link_radii[s], world,
            ):
                return True
    for i, j in chain.self_pairs:
        sep = surface_distance(
            chain.link_kind[i], chain.link_params[i], poses[i],
            chain.link_kind[j], chain.link_params[j], poses[j],
        )
        if sep <= chain.link_margin[i] + chain.link_margin[j]:
            return True
    for b, s in chain.base_pairs:
        bpose = _pose_compose(np.asarray(root7, dtype=np.float64), chain.base_pose[b])
        sep = surface_distance(
            chain.base_kind[b], chain.base_params[b], bpose,
            chain.link_kind[s], chain.link_params[s], poses[s],
        )
        if sep <= chain.base_margin[b] + chain.link_margin[s]:
            return True
    return False


def _goal_blocked(chain: Chain, goal7, world: World) -> bool:
    # shapes rigidly attached to the last joint sit at a known pose when the
    # goal is met; if that pose is already in deep collision, skip the solve
    qc = np.array([chain.ee[3], -chain.ee[4], -chain.ee[5], -chain.ee[6]])
    inv_ee = np.concatenate([-_quat_rotate(qc, chain.ee[:3]), qc])
    last = _pose_compose(goal7, inv_ee)
    for s in chain.ee_links:
        pose = _pose_compose(last, chain.link_pose[s])
        for w in range(world.n):
            sep = surface_distance(
                chain.link_kind[s], chain.link_params[s], pose,
                world.kinds[w], world.params[w], world.poses[w],
            )
            if sep <= chain.link_margin[s] + world.margins[w] - 2e-4:
                return True
    return False


# ---------------------------------------------------------------------------
# damped least-squares IK
# ---------------------------------------------------------------------------

def solve_ik(
    chain: Chain, root7, base7, goal7, world, seed,
    restarts, max_iters, damping, tol_pos, tol_rot, dedup_tol,
    stop_first=False, check_collision=True, pos_only=False,
) -> np.ndarray:
    """Collision-filtered, deduplicated joint solutions for one goal pose.

    Returns a (k, n) array, possibly empty. Deterministic in `seed`.
    """
    base7 = np.asarray(base7, dtype=np.float64)
    goal7 = np.asarray(goal7, dtype=np.float64)
    n = chain.n
    out = []
    d0 = goal7[:3] - base7[:3]
    if float(np.sqrt(np.dot(d0, d0))) > chain.max_reach + tol_pos:
        return np.empty((0, n))
    if check_collision and world is not None and world.n and _goal_blocked(chain, goal7, world):
        return np.empty((0, n))
    rng = _SplitMix(seed)
    lam2 = damping * damping
    if chain.order == 3:
        rows = (0, 1) if pos_only else (0, 1, 5)
    else:
        rows = (0, 1, 2) if pos_only else (0, 1, 2, 3, 4, 5)
    a = len(rows)
    for restart in range(restarts):
        if restart == 0:
            q = 0.5 * (chain.seed_lo + chain.seed_hi)
        else:
            u = np.array([rng.next_double() for _ in range(n)])
            q = chain.seed_lo + u * (chain.seed_hi - chain.seed_lo)
        converged = False
        frames = None
        for it in range(max_iters + 1):
            frames = fk_frames(chain, base7, q)
            ee = _pose_compose(frames[n - 1], chain.ee)
            e_pos = goal7[:3] - ee[:3]
            e_rot = _rotvec_of_error(goal7[3:], ee[3:])
            if np.sqrt(np.dot(e_pos, e_pos)) < tol_pos and (
                pos_only or np.sqrt(np.dot(e_rot, e_rot)) < tol_rot
            ):
                converged = True
                break
            if it == max_iters:
                break
            Jfull = _jacobian_from_frames(chain, frames, ee[:3])
            J = Jfull[rows, :]
            err = np.concatenate([e_pos, e_rot])[list(rows)]
            A = J @ J.T
            A[np.diag_indices(a)] += lam2
            dq = J.T @ np.linalg.solve(A, err)
            step = float(np.max(np.abs(dq)))
            if step > 0.5:
                dq *= 0.5 / step
            q = q + dq
            q = np.minimum(np.maximum(q, chain.clamp_lo), chain.clamp_hi)
        if not converged:
            continue
        for i in range(n):
            if chain.jtypes[i] == _CONT:
                q[i] = np.arctan2(np.sin(q[i]), np.cos(q[i]))
        dup = False
        for kept in out:
            dmax = 0.0
            for i in range(n):
                d = q[i] - kept[i]
                if chain.jtypes[i] == _CONT:
                    d = np.arctan2(np.sin(d), np.cos(d))
                dmax = max(dmax, abs(d))
            if dmax <= dedup_tol:
                dup = True
                break
        if dup:
            continue
        if check_collision and _solution_collides(chain, root7, frames, world if (world is not None and world.n) else None):
            continue
        out.append(q.copy())
        if stop_first:
            break
    return np.array(out) if out else np.empty((0, n))


# ---------------------------------------------------------------------------
# dexterity kernels
# ---------------------------------------------------------------------------

def joint_weights(chain: Chain, q, eta, zeta) -> np.ndarray:
    t = np.ones(chain.n)
    for i in range(chain.n):
        if chain.jtypes[i] == _CONT:
            continue
        qr = 0.5 * (chain.seed_hi[i] - chain.seed_lo[i])
        kappa = (qr - abs(qr - (q[i] - chain.seed_lo[i]))) / (zeta * qr) + 1.0
        t[i] = 1.0 - eta ** kappa
    return t


def _weighted_isotropy(J, t, a) -> float:
    M = (J * t) @ J.T
    lam = np.linalg.eigvalsh(M)
    lam = np.maximum(lam, 0.0)
    tr = float(np.sum(lam))
    if tr <= 0.0:
        return 0.0
    det = float(np.prod(lam))
    if det <= 0.0:
        return 0.0
    val = det ** (1.0 / a) / (tr / a)
    return min(max(val, 0.0), 1.0)


def goal_metrics(
    chain: Chain, root7, base7, goal7, world, seed,
    restarts, max_iters, damping, tol_pos, tol_rot, dedup_tol, eta, zeta,
):
    """(reached, best weighted isotropy, best solution or None) for one goal."""
    sols = solve_ik(
        chain, root7, base7, goal7, world, seed,
        restarts, max_iters, damping, tol_pos, tol_rot, dedup_tol,
        stop_first=False, check_collision=True,
    )
    if len(sols) == 0:
        return False, 0.0, None
    best = -1.0
    best_q = sols[0]
    for q in sols:
        J = jacobian(chain, base7, q)
        t = joint_weights(chain, q, eta, zeta)
        val = _weighted_isotropy(J, t, float(chain.order))
        if val > best:
            best = val
            best_q = q
    return True, best, best_q.copy()


def reach_fraction(
    chain: Chain, base7, pos3, quats, seed,
    restarts, max_iters, damping, tol_pos, tol_rot,
) -> float:
    """Fraction of the sampled orientations with any IK solution, no collision
    or joint-limit-free-space checks beyond the limits themselves."""
    rng = _SplitMix(seed)
    hits = 0
    goal = np.empty(7)
    goal[:3] = pos3
    for o in range(len(quats)):
        sub = rng.next_raw()
        goal[3:] = quats[o]
        sols = solve_ik(
            chain, base7, base7, goal, None, sub,
            restarts, max_iters, damping, tol_pos, tol_rot, 1e9,
            stop_first=True, check_collision=False,
        )
        if len(sols):
            hits += 1
    return hits / len(quats)
