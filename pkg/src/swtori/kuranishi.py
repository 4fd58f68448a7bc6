"""Finite-dimensional equivariant Kuranishi models near a reducible point.

The model map is

    Phi(a, w) = ((Q1 + tau R)(w), (Q2 + tau L)(a) w),   a in R^4, w in H,

with U(1) acting on ``w`` by right multiplication with ``e^{i theta}`` and the
quaternion ``j`` acting by ``w -> w j`` (and by ``-1`` on ``a`` and on R^3).

Quaternions are stored as length-4 float arrays ``(1, i, j, k)``.  Writing
``w = z1 + j z2`` identifies H with C^2 for the right complex structure, and
the U(1) gauge is fixed by making ``z1`` real and nonnegative (``w[1] == 0``,
``w[0] >= 0``).

For j-fixed points U(1) invariance plus j-oddness force ``Q1 = A . R``, and
``Q2(a)`` lies in the 4-dimensional space of maps ``w -> q w i``.  Without the
j constraint ``Q1`` may also carry a ``b |w|^2`` term and ``Q2(a)`` a
left-multiplication part ``w -> p w``; both are kept small enough that the
solution count is the same.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

__all__ = [
    "CircleCount",
    "FixedType",
    "KuranishiModel",
    "NoConvergence",
    "NonGenericH",
    "Quaternion",
    "TauTooLarge",
    "admissible_L",
    "build_model",
    "count_solution_circles",
    "equivariance_residuals",
    "left_matrix",
    "model_from_data",
    "qconj",
    "qmul",
    "quad_map_R",
    "right_matrix",
]

H_MAX = 0.1
NEWTON_TOL = 1e-12
CLUSTER_RADIUS = 1e-6
REDUCIBLE_TOL = 1e-10
DEFAULT_STARTS = 1024


class TauTooLarge(ValueError):
    pass


class NonGenericH(ArithmeticError):
    pass


class NoConvergence(ArithmeticError):
    pass


class FixedType(str, Enum):
    J_FIXED = "j-fixed"
    NON_J_FIXED = "non-j-fixed"


# --- quaternion arithmetic ---------------------------------------------------


def qmul(p, q) -> np.ndarray:
    """Hamilton product, broadcasting over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def qconj(q) -> np.ndarray:
    q = np.array(q, dtype=float)
    q[..., 1:] *= -1
    return q


ONE = np.array([1.0, 0, 0, 0])
I = np.array([0, 1.0, 0, 0])
J = np.array([0, 0, 1.0, 0])
K = np.array([0, 0, 0, 1.0])
BASIS = (ONE, I, J, K)


def left_matrix(p) -> np.ndarray:
    """Matrix of ``w -> p w``."""
    return np.stack([qmul(p, e) for e in BASIS], axis=-1)


def right_matrix(q) -> np.ndarray:
    """Matrix of ``w -> w q``."""
    return np.stack([qmul(e, q) for e in BASIS], axis=-1)


@dataclass(frozen=True)
class Quaternion:
    a: float
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    @classmethod
    def from_array(cls, x) -> Quaternion:
        return cls(*map(float, x))

    def array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return Quaternion.from_array(qmul(self.array(), other.array()))
        return Quaternion.from_array(self.array() * float(other))

    def __rmul__(self, other):
        return Quaternion.from_array(self.array() * float(other))

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion.from_array(self.array() + other.array())

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion.from_array(self.array() - other.array())

    def __neg__(self) -> Quaternion:
        return Quaternion.from_array(-self.array())

    def conj(self) -> Quaternion:
        return Quaternion.from_array(qconj(self.array()))

    def norm(self) -> float:
        return float(np.linalg.norm(self.array()))


def _arr(q) -> np.ndarray:
    return q.array() if isinstance(q, Quaternion) else np.asarray(q, dtype=float)


def quad_map_R(w) -> np.ndarray:
    """Imaginary part of ``w i w-bar`` as a vector in R^3 (the Hopf map scaled by ``|w|^2``)."""
    w = _arr(w)
    return qmul(qmul(w, I), qconj(w))[..., 1:]


def admissible_L(q, w):
    """``T_q(w) = q w i``; returns the same type as ``w``."""
    out = qmul(qmul(_arr(q), _arr(w)), I)
    return Quaternion.from_array(out) if isinstance(w, Quaternion) else out


def _polarize(f) -> np.ndarray:
    """Symmetric matrices of a vector-valued quadratic form on R^4."""
    e = np.eye(4)
    vals = {}
    for i in range(4):
        for j in range(i, 4):
            vals[i, j] = f(e[i] + e[j]) if i != j else f(e[i])
    diag = [vals[i, i] for i in range(4)]
    m = len(diag[0])
    out = np.zeros((m, 4, 4))
    for i in range(4):
        out[:, i, i] = diag[i]
        for j in range(i + 1, 4):
            out[:, i, j] = out[:, j, i] = (vals[i, j] - diag[i] - diag[j]) / 2
    return out


R_MATRICES = _polarize(quad_map_R)


# --- models ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class KuranishiModel:
    """A perturbed model; all arrays are treated as read-only.

    ``Q1`` holds three symmetric 4x4 matrices, ``Q2`` the 4x4 matrix ``M`` with
    ``Q2(a) w = (M a) w i`` and ``Q2_left`` the matrix ``N`` of the extra
    ``(N a) w`` part (zero at j-fixed points).  ``Rcoef`` are the matrices of
    ``R`` and ``Lcoef`` is the matrix of ``L`` in the same basis as ``Q2``.
    """

    Q1: np.ndarray
    Q2: np.ndarray
    tau: float
    Rcoef: np.ndarray
    Lcoef: np.ndarray
    C: float
    fixed_type: FixedType
    Q2_left: np.ndarray = field(default_factory=lambda: np.zeros((4, 4)))
    seed: int | None = None

    def q1_total(self) -> np.ndarray:
        return self.Q1 + self.tau * self.Rcoef

    def q2_blocks(self) -> np.ndarray:
        """``B[c]`` is the matrix of ``w -> (Q2 + tau L)(e_c) w``."""
        m = self.Q2 + self.tau * self.Lcoef
        ri = right_matrix(I)
        return np.stack(
            [left_matrix(self.Q2_left[:, c]) + left_matrix(m[:, c]) @ ri for c in range(4)]
        )

    def q1(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=float)
        return np.einsum("mij,...i,...j->...m", self.Q1, w, w)

    def q2(self, a, w) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        w = np.asarray(w, dtype=float)
        return qmul(a @ self.Q2_left.T, w) + qmul(qmul(a @ self.Q2.T, w), I)

    def perturbation(self, a, w) -> tuple[np.ndarray, np.ndarray]:
        return quad_map_R(w), admissible_L(np.asarray(a, dtype=float) @ self.Lcoef.T, w)

    def __call__(self, a, w) -> tuple[np.ndarray, np.ndarray]:
        ra, la = self.perturbation(a, w)
        return self.q1(w) + self.tau * ra, self.q2(a, w) + self.tau * la

    def q1_floor(self) -> float:
        """Lower bound for ``|(Q1 + tau R)(w)|`` on the unit sphere."""
        a, b = self._q1_parts()
        return float(np.linalg.svd(a + self.tau * np.eye(3), compute_uv=False)[-1] - np.linalg.norm(b))

    def _q1_parts(self) -> tuple[np.ndarray, np.ndarray]:
        # Q1_m = sum_n A_mn P_n + b_m |w|^2, recovered from the matrices
        flat = self.Q1.reshape(3, 16)
        basis = np.vstack([R_MATRICES.reshape(3, 16), np.eye(4).reshape(1, 16)])
        coef, *_ = np.linalg.lstsq(basis.T, flat.T, rcond=None)
        return coef[:3].T, coef[3]


def _q2_sigma_min(m: np.ndarray, n: np.ndarray, a: np.ndarray) -> float:
    a = a / np.linalg.norm(a)
    op = left_matrix(n @ a) + left_matrix(m @ a) @ right_matrix(I)
    return float(np.linalg.svd(op, compute_uv=False)[-1])


def domination_constant(m: np.ndarray, n: np.ndarray | None = None) -> float:
    """``min over unit a`` of the smallest singular value of ``Q2(a)``."""
    m = np.asarray(m, dtype=float)
    if n is None or not np.any(n):
        return float(np.linalg.svd(m, compute_uv=False)[-1])
    pts = qmc.Sobol(4, scramble=True, seed=0).random(512) * 2 - 1
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    ri = right_matrix(I)
    ops = left_matrix(pts @ n.T) + left_matrix(pts @ m.T) @ ri
    vals = np.linalg.svd(ops, compute_uv=False)[:, -1]
    found = float(vals.min())
    for p in pts[np.argsort(vals)[:3]]:
        res = minimize(lambda x: _q2_sigma_min(m, n, x), p, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 1500})
        found = min(found, float(res.fun))
    return found


def model_from_data(
    A,
    M,
    tau: float,
    fixed_type: FixedType | str = FixedType.J_FIXED,
    b=None,
    N=None,
    seed: int | None = None,
) -> KuranishiModel:
    """Assemble a model from ``Q1 = A . R + b |w|^2`` and ``Q2(a) w = (N a) w + (M a) w i``."""
    fixed_type = FixedType(fixed_type)
    if tau <= 0:
        raise ValueError("tau must be positive")
    A = np.asarray(A, dtype=float).reshape(3, 3)
    M = np.asarray(M, dtype=float).reshape(4, 4)
    b = np.zeros(3) if b is None else np.asarray(b, dtype=float).reshape(3)
    N = np.zeros((4, 4)) if N is None else np.asarray(N, dtype=float).reshape(4, 4)
    if fixed_type is FixedType.J_FIXED and (np.any(b) or np.any(N)):
        raise ValueError("j-fixed models have no |w|^2 term and no left part")
    q1 = np.einsum("mn,nij->mij", A, R_MATRICES) + b[:, None, None] * np.eye(4)
    c = domination_constant(M, N)
    lnorm = 1.0
    if not tau * lnorm < c / 2:
        raise TauTooLarge(f"tau = {tau} violates tau*|L| < C/2 with C = {c:.6g}; need tau < {c / 2:.6g}")
    model = KuranishiModel(q1, M, float(tau), R_MATRICES.copy(), np.eye(4), c, fixed_type, N, seed)
    for arr in (model.Q1, model.Q2, model.Rcoef, model.Lcoef, model.Q2_left):
        arr.setflags(write=False)
    if model.q1_floor() <= 0:
        raise ValueError("Q1 + tau R is degenerate")
    return model


def _random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def build_model(seed: int, tau: float, fixed_type: FixedType | str = FixedType.J_FIXED) -> KuranishiModel:
    """Seeded pseudorandom model.

    ``M`` has singular values in ``[0.5, 1.5]``.  ``A`` is redrawn until
    ``A + tau I`` has smallest singular value at least 0.1; finitely many bad
    ``tau`` exist for any fixed ``A`` and this keeps away from them.
    """
    fixed_type = FixedType(fixed_type)
    if tau <= 0:
        raise ValueError("tau must be positive")
    rng = np.random.default_rng(seed)
    M = _random_orthogonal(rng, 4) @ np.diag(rng.uniform(0.5, 1.5, 4)) @ _random_orthogonal(rng, 4)
    for _ in range(1000):
        A = rng.normal(scale=0.5, size=(3, 3))
        smin = np.linalg.svd(A + tau * np.eye(3), compute_uv=False)[-1]
        if smin >= 0.1:
            break
    else:
        raise RuntimeError("could not draw a non-degenerate Q1")
    b = N = None
    if fixed_type is FixedType.NON_J_FIXED:
        v = rng.standard_normal(3)
        b = v / np.linalg.norm(v) * rng.uniform(0.1, 0.4) * smin
        n_raw = rng.standard_normal((4, 4))
        msmin = np.linalg.svd(M, compute_uv=False)[-1]
        N = n_raw / np.linalg.norm(n_raw, 2) * rng.uniform(0.1, 0.4) * msmin
    return model_from_data(A, M, tau, fixed_type, b, N, seed)


def equivariance_residuals(m: KuranishiModel, npoints: int = 1000, seed: int = 0) -> dict[str, float]:
    """Largest deviation from U(1) and j equivariance over random points.

    ``u1`` checks the full map.  ``j`` checks the full map at j-fixed points
    and the perturbation terms (``R``, ``L``) otherwise, since only those carry
    the quaternionic structure there.
    """
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((npoints, 4))
    w = rng.standard_normal((npoints, 4))
    theta = rng.uniform(0, 2 * np.pi, npoints)
    rot = np.stack([np.cos(theta), np.sin(theta), 0 * theta, 0 * theta], axis=-1)
    f1, f2 = m(a, w)
    g1, g2 = m(a, qmul(w, rot))
    u1 = max(np.abs(g1 - f1).max(), np.abs(g2 - qmul(f2, rot)).max())
    # complex linearity of Q2(a) for the right-i structure
    cl = np.abs(m.q2(a, qmul(w, I)) - qmul(m.q2(a, w), I)).max()
    wj = qmul(w, J)
    if m.fixed_type is FixedType.J_FIXED:
        h1, h2 = m(-a, wj)
        jr = max(np.abs(h1 + f1).max(), np.abs(h2 - qmul(f2, J)).max())
    else:
        r, l = m.perturbation(a, w)
        rj, lj = m.perturbation(-a, wj)
        jr = max(np.abs(rj + r).max(), np.abs(lj - qmul(l, J)).max())
    return {"u1": float(max(u1, cl)), "j": float(jr)}


# --- solving -----------------------------------------------------------------

W_COLS = [0, 2, 3]


@dataclass(frozen=True)
class CircleCount:
    circles: int
    signs: tuple[int, ...]
    reducible_only: bool
    representatives: tuple[tuple[float, ...], ...] = ()

    def to_dict(self) -> dict:
        return {
            "circles": self.circles,
            "signs": list(self.signs),
            "reducible_only": self.reducible_only,
        }


def _unpack(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = x[..., :4]
    w = np.zeros(x.shape[:-1] + (4,))
    w[..., W_COLS] = x[..., 4:]
    return a, w


def _residual(p: np.ndarray, b: np.ndarray, h: np.ndarray, x: np.ndarray) -> np.ndarray:
    a, w = _unpack(x)
    f1 = np.einsum("mij,...i,...j->...m", p, w, w) - h
    f2 = np.einsum("cij,...c,...j->...i", b, a, w)
    return np.concatenate([f1, f2], axis=-1)


def _jacobian(p: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    a, w = _unpack(x)
    jac = np.zeros(x.shape[:-1] + (7, 7))
    jac[..., 0:3, 4:7] = 2 * np.einsum("mij,...j->...mi", p, w)[..., W_COLS]
    jac[..., 3:7, 0:4] = np.einsum("cij,...j->...ic", b, w)
    jac[..., 3:7, 4:7] = np.einsum("cij,...c->...ij", b, a)[..., W_COLS]
    return jac


def _step(jac: np.ndarray, f: np.ndarray, least_squares: bool) -> np.ndarray:
    if not least_squares:
        try:
            return -np.linalg.solve(jac, f[..., None])[..., 0]
        except np.linalg.LinAlgError:
            pass
    return -np.einsum("...ij,...j->...i", np.linalg.pinv(jac, rcond=1e-13), f)


def _newton(p, b, h, x, iters: int, least_squares: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Damped Newton on a batch of starts; returns final points and residual norms."""
    x = x.copy()
    f = _residual(p, b, h, x)
    norm = np.abs(f).max(axis=-1)
    scales = 0.5 ** np.arange(12)
    for _ in range(iters):
        active = norm > (NEWTON_TOL**2 if least_squares else NEWTON_TOL)
        if not active.any():
            break
        xa = x[active]
        dx = _step(_jacobian(p, b, xa), f[active], least_squares)
        if least_squares:
            # Gauss-Newton halves |w| per step near the reducible locus
            x[active] = xa + dx
            f[active] = _residual(p, b, h, x[active])
            norm[active] = np.abs(f[active]).max(axis=-1)
            continue
        trials = xa[None] + scales[:, None, None] * dx[None]
        tnorm = np.abs(_residual(p, b, h, trials)).max(axis=-1)
        better = tnorm < norm[active][None]
        pick = np.where(better.any(axis=0), better.argmax(axis=0), len(scales) - 1)
        idx = np.arange(len(xa))
        x[active] = trials[pick, idx]
        f[active] = _residual(p, b, h, x[active])
        norm[active] = np.abs(f[active]).max(axis=-1)
    return x, norm


def _starts(n: int, radius: float, seed: int) -> np.ndarray:
    m = 1 << max(0, (n - 1).bit_length())
    return (qmc.Sobol(7, scramble=True, seed=seed).random(m) * 2 - 1) * radius


def _normalize(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    flip = x[..., 4] < 0
    x[flip, 4:] *= -1
    return x


def _cluster(points: np.ndarray) -> list[np.ndarray]:
    order = np.lexsort(np.round(points, 8).T[::-1])
    reps: list[np.ndarray] = []
    for x in points[order]:
        if not any(np.linalg.norm(x - r) < CLUSTER_RADIUS for r in reps):
            reps.append(x)
    return reps


def _slice_basis(v: np.ndarray) -> np.ndarray:
    """Orthonormal basis (4x3) of the complement of ``v``."""
    q, _ = np.linalg.qr(np.column_stack([v, np.eye(4)]))
    return q[:, 1:4]


def _verify_orbit(model: KuranishiModel, h: np.ndarray, x: np.ndarray, samples: int = 12) -> None:
    """Re-solve near rotated copies of a root in slices transverse to its orbit."""
    a0, w0 = _unpack(x)
    ptot = model.q1_total()
    blocks = model.q2_blocks()
    for k in range(samples):
        th = 2 * np.pi * k / samples
        wk = qmul(w0, np.array([np.cos(th), np.sin(th), 0, 0]))
        u = _slice_basis(qmul(wk, I))
        y = np.concatenate([a0, np.zeros(3)]) + 1e-4 * np.cos(np.arange(7) + th)
        for _ in range(60):
            w = wk + u @ y[4:]
            f1 = np.einsum("mij,i,j->m", ptot, w, w) - h
            f2 = np.einsum("cij,c,j->i", blocks, y[:4], w)
            f = np.concatenate([f1, f2])
            if np.abs(f).max() <= NEWTON_TOL:
                break
            jac = np.zeros((7, 7))
            jac[0:3, 4:7] = 2 * np.einsum("mij,j->mi", ptot, w) @ u
            jac[3:7, 0:4] = np.einsum("cij,j->ic", blocks, w)
            jac[3:7, 4:7] = np.einsum("cij,c->ij", blocks, y[:4]) @ u
            y = y - np.linalg.solve(jac, f)
        if np.abs(f).max() > NEWTON_TOL or np.linalg.norm(y - np.concatenate([a0, np.zeros(3)])) > CLUSTER_RADIUS:
            raise NoConvergence(f"orbit check failed at angle {th:.3f}")


def count_solution_circles(
    m: KuranishiModel,
    h,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
    max_iter: int = 100,
) -> CircleCount:
    """Count U(1)-orbits of solutions of ``Phi(a, w) = (h, 0)`` near the origin.

    Each circle's sign is the sign of the Jacobian determinant in the gauge
    slice at its representative with ``w[0] > 0``.
    """
    h = np.asarray(h, dtype=float).reshape(3)
    hn = float(np.linalg.norm(h))
    if hn > H_MAX:
        raise ValueError(f"|h| = {hn:.3g} exceeds the local threshold {H_MAX}")
    if starts < 1000:
        raise ValueError("at least 1000 starts are required")
    p = m.q1_total()
    b = m.q2_blocks()

    if hn == 0:
        x0 = _starts(starts, 2 * np.sqrt(H_MAX), seed)
        x, norm = _newton(p, b, h, x0, 4 * max_iter, least_squares=True)
        done = norm <= NEWTON_TOL**2
        wmax = float(np.abs(x[done, 4:]).max()) if done.any() else np.inf
        reducible = bool(done.any() and wmax < REDUCIBLE_TOL and m.q1_floor() > 0)
        return CircleCount(0, (), reducible)

    x0 = _starts(starts, 2 * np.sqrt(hn), seed)
    x, norm = _newton(p, b, h, x0, max_iter)
    done = norm <= NEWTON_TOL
    if not done.any():
        raise NoConvergence(f"no start converged; best residual {norm.min():.3g}")
    reps = _cluster(_normalize(x[done]))
    signs = []
    polished = []
    for r in reps:
        r, _ = _newton(p, b, h, r[None], 5)
        r = r[0]
        a, w = _unpack(r)
        wn = np.linalg.norm(w)
        if r[4] < 1e-8 * max(wn, 1e-300):
            raise NonGenericH("root lies where the gauge slice is not transverse")
        jac = _jacobian(p, b, r)
        det = np.linalg.det(jac)
        hadamard = np.prod(np.linalg.norm(jac, axis=0))
        if hadamard == 0 or abs(det) < 1e-8 * hadamard:
            raise NonGenericH(f"singular Jacobian at a root (det = {det:.3g})")
        _verify_orbit(m, h, r)
        signs.append(1 if det > 0 else -1)
        polished.append(tuple(float(v) for v in r))
    return CircleCount(len(reps), tuple(signs), False, tuple(polished))
