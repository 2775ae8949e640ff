"""Weighted whole-body closed-loop inverse kinematics for the 9-DoF base+arm model.

The mobile base contributes three virtual joints (prismatic x, prismatic y,
revolute yaw) followed by a fixed mount transform and a 6-revolute arm, all
treated as one serial chain.  The primary task tracks an end-effector pose and
twist through a damped weighted least-squares solve; a posture task pulling the
arm toward a default configuration runs in the null space of the primary task.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from .geometry import PoseSE3, wrap_angle

PRISMATIC = "prismatic"
REVOLUTE = "revolute"


@dataclass(frozen=True)
class Joint:
    """One chain joint: a fixed offset transform followed by motion about `axis`."""

    kind: str
    axis: tuple[float, float, float]
    offset: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.kind not in (PRISMATIC, REVOLUTE):
            raise ValueError(f"unknown joint kind: {self.kind}")
        n = np.linalg.norm(self.axis)
        if abs(n - 1.0) > 1e-9:
            raise ValueError("joint axis must be a unit vector")


@dataclass
class WholeBodyModel:
    """Kinematic description of the mobile manipulator."""

    arm_joints: list[Joint]
    mount_transform: PoseSE3
    ee_offset: np.ndarray
    q_def: np.ndarray
    base_dof: int = 3

    def __post_init__(self):
        self.ee_offset = np.asarray(self.ee_offset, dtype=float).reshape(3)
        self.q_def = np.asarray(self.q_def, dtype=float).reshape(self.total_dof)

    @property
    def arm_dof(self) -> int:
        return len(self.arm_joints)

    @property
    def total_dof(self) -> int:
        return self.base_dof + len(self.arm_joints)

    def chain(self) -> list[Joint]:
        """Full 9-joint chain including the virtual base joints."""
        base = [
            Joint(PRISMATIC, (1.0, 0.0, 0.0)),
            Joint(PRISMATIC, (0.0, 1.0, 0.0)),
            Joint(REVOLUTE, (0.0, 0.0, 1.0)),
        ]
        return base + self.arm_joints


def default_model() -> WholeBodyModel:
    """Generic 6R arm on an omnidirectional base.

    The arm geometry is a placeholder serial chain (shoulder pan/lift, elbow,
    three wrist joints) with link lengths in the range of a mid-size cobot; it
    is not calibrated to any specific hardware.
    """
    arm = [
        Joint(REVOLUTE, (0.0, 0.0, 1.0), (0.15, 0.0, 0.35)),
        Joint(REVOLUTE, (0.0, 1.0, 0.0), (0.0, 0.0, 0.12)),
        Joint(REVOLUTE, (0.0, 1.0, 0.0), (0.40, 0.0, 0.0)),
        Joint(REVOLUTE, (0.0, 1.0, 0.0), (0.35, 0.0, 0.0)),
        Joint(REVOLUTE, (0.0, 0.0, 1.0), (0.10, 0.0, 0.0)),
        Joint(REVOLUTE, (0.0, 1.0, 0.0), (0.08, 0.0, 0.0)),
    ]
    q_def = np.array([0.0, 0.0, 0.0, 0.0, 0.55, -1.1, 0.55, 0.0, 0.0])
    return WholeBodyModel(
        arm_joints=arm,
        mount_transform=PoseSE3.identity(),
        ee_offset=np.array([0.10, 0.0, 0.0]),
        q_def=q_def,
    )


@dataclass
class JointState:
    q: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float).copy()
        if not np.all(np.isfinite(self.q)):
            raise ValueError("non-finite joint state")


@dataclass
class GainSet:
    """Controller gains; all weight matrices are stored as diagonal vectors."""

    K: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    W3: np.ndarray
    damping_k: float

    def __post_init__(self):
        self.K = np.asarray(self.K, dtype=float).reshape(6)
        self.W1 = np.asarray(self.W1, dtype=float).reshape(6)
        self.W2 = np.asarray(self.W2, dtype=float)
        self.W3 = np.asarray(self.W3, dtype=float)
        if np.any(self.K <= 0) or np.any(self.W1 <= 0) or np.any(self.W2 <= 0):
            raise ValueError("K, W1, W2 must be positive definite")
        if np.any(self.W3 < 0):
            raise ValueError("W3 must be positive semidefinite")
        if not self.damping_k > 0:
            raise ValueError("damping_k must be positive")


def default_gains(dof: int = 9) -> GainSet:
    """Tracking and weighting gains used by the bundled scenarios.

    The arm joints carry the larger motion penalty and the posture pull, so the
    base performs most of the locomotion.
    """
    w2 = np.empty(dof)
    w2[:3] = 2.0
    w2[3:] = 5.0
    w3 = np.zeros(dof)
    w3[3:] = 3.0
    return GainSet(
        K=np.array([0.1, 0.1, 0.1, 0.01, 0.01, 0.01]),
        W1=100.0 * np.array([10.0, 10.0, 10.0, 5.0, 5.0, 5.0]),
        W2=w2,
        W3=w3,
        damping_k=0.1,
    )


@dataclass
class TaskTarget:
    x_d: PoseSE3
    xdot_d: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def __post_init__(self):
        self.xdot_d = np.asarray(self.xdot_d, dtype=float).reshape(6)
        if not np.all(np.isfinite(self.xdot_d)):
            raise ValueError("non-finite task twist")


def _joint_transform(joint: Joint, q: float) -> tuple[np.ndarray, np.ndarray]:
    """(R, p) of the joint frame relative to its parent at value q."""
    p = np.array(joint.offset, dtype=float)
    axis = np.array(joint.axis)
    if joint.kind == PRISMATIC:
        return np.eye(3), p + axis * q
    return Rotation.from_rotvec(axis * q).as_matrix(), p


def _chain_frames(model: WholeBodyModel, q: np.ndarray):
    """World (R, p) of every joint frame plus the end-effector.

    Returns (frames, ee_R, ee_p) where frames[i] is the pose of joint i's frame
    (motion applied), i.e. the frame its children hang from.
    """
    R = np.eye(3)
    p = np.zeros(3)
    frames = []
    joints = model.chain()
    mt = model.mount_transform
    mount_R = Rotation.from_quat(mt.orientation).as_matrix()
    for i, joint in enumerate(joints):
        if i == model.base_dof:  # insert the fixed arm mount after the base joints
            p = p + R @ mt.position
            R = R @ mount_R
        jR, jp = _joint_transform(joint, q[i])
        p = p + R @ jp
        R = R @ jR
        frames.append((R, p))
    ee_p = p + R @ model.ee_offset
    return frames, R, ee_p


def forward_kinematics(model: WholeBodyModel, state: JointState) -> PoseSE3:
    _, R, p = _chain_frames(model, state.q)
    return PoseSE3(p, Rotation.from_matrix(R).as_quat())


def whole_body_jacobian(model: WholeBodyModel, state: JointState) -> np.ndarray:
    """Geometric Jacobian (6 x total_dof): rows are linear then angular velocity."""
    frames, _, ee_p = _chain_frames(model, state.q)
    joints = model.chain()
    J = np.zeros((6, model.total_dof))
    # world axis of joint i is expressed in the frame *before* its own motion,
    # which equals frames[i-1] composed with the fixed offset; rotation offset
    # of the motion does not move the axis, so use parent rotation.
    R = np.eye(3)
    mt_R = Rotation.from_quat(model.mount_transform.orientation).as_matrix()
    for i, joint in enumerate(joints):
        if i == model.base_dof:
            R = R @ mt_R
        axis_w = R @ np.array(joint.axis)
        if joint.kind == PRISMATIC:
            J[:3, i] = axis_w
        else:
            J[:3, i] = np.cross(axis_w, ee_p - frames[i][1])
            J[3:, i] = axis_w
        R = frames[i][0]
    return J


def pose_error(x_d: PoseSE3, x: PoseSE3) -> np.ndarray:
    """6-vector pose error: position difference and rotation-vector of R_d R^T."""
    e = np.empty(6)
    e[:3] = x_d.position - x.position
    R_rel = Rotation.from_quat(x_d.orientation) * Rotation.from_quat(x.orientation).inv()
    e[3:] = R_rel.as_rotvec()
    return e


def solve_clik(
    model: WholeBodyModel, state: JointState, target: TaskTarget, gains: GainSet
) -> np.ndarray:
    """Joint velocities: damped weighted least squares plus null-space posture pull."""
    q = state.q
    J = whole_body_jacobian(model, state)
    e = pose_error(target.x_d, forward_kinematics(model, state))
    if not np.all(np.isfinite(e)):
        raise ValueError("non-finite task error")
    y = target.xdot_d + gains.K * e

    W1, W2 = gains.W1, gains.W2
    A = J.T * W1 @ J + (gains.damping_k**2) * np.diag(W2)
    qdot_1 = np.linalg.solve(A, J.T @ (W1 * y))

    # Exact W2-weighted projector so the posture task cannot leak into the
    # end-effector task; a damped projector would leave O(k^2) leakage.
    Winv_Jt = J.T / W2[:, None]
    JW = J @ Winv_Jt
    J_pinv = Winv_Jt @ np.linalg.solve(JW, np.eye(6))
    P = np.eye(model.total_dof) - J_pinv @ J

    z = gains.W3 * (model.q_def - q)
    return qdot_1 + P @ z


def integrate_joints(state: JointState, qdot: np.ndarray, dt: float) -> JointState:
    if not dt > 0:
        raise ValueError("dt must be positive")
    q = state.q + np.asarray(qdot, dtype=float) * dt
    q[2] = wrap_angle(q[2])
    return JointState(q)
