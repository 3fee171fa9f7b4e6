"""Finite-dimensional Lie algebra kernel.

An algebra is stored densely: structure constants c[i,j,k] with
[e_i, e_j] = sum_k c[i,j,k] e_k, plus a symmetric positive-definite
inertia matrix I mapping algebra coordinates to dual coordinates.
Algebra elements and dual elements are plain 1-d numpy arrays in the
basis {e_i} and its dual basis.

Sign convention, fixed once and used everywhere downstream:

    <ad*_X mu, Y> = <mu, [X, Y]>,

so in coordinates (ad*_X mu)_j = sum_{i,k} X_i c[i,j,k] mu_k.  The Euler
flow on the dual is  dm/dt = -ad*_{I^-1 m} m,  and the drift-extended flow
is  dm/dt = -ad*_{I^-1 m + V0} m,  which coincides with the Euler flow of
the central extension built from the cocycle  w(X, Y) = <ad*_V0 I X, Y>.

All objects are immutable after construction; every operation is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .expr import Expression

__all__ = [
    "LieAlgebra",
    "CentralExtension",
    "bracket",
    "pairing",
    "coadjoint",
    "euler_rhs",
    "lie_poisson_rhs",
    "averaging_cocycle",
    "extended_coadjoint",
    "extended_euler_rhs",
    "builtin_algebra",
    "load_algebra",
    "energy_norm",
    "jacobi_residual",
    "fd_gradient",
]

JACOBI_TOL = 1e-12
COCYCLE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Dense structure constants c[i,j,k] plus an SPD inertia matrix."""

    n: int
    c: np.ndarray
    inertia: np.ndarray
    name: str = ""
    inertia_inv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = np.ascontiguousarray(np.asarray(self.c, dtype=float))
        inertia = np.ascontiguousarray(np.asarray(self.inertia, dtype=float))
        if c.shape != (self.n, self.n, self.n):
            raise ValueError(f"structure constants must be ({self.n},)*3")
        if inertia.shape != (self.n, self.n):
            raise ValueError("inertia shape mismatch")
        if not np.array_equal(inertia, inertia.T):
            raise ValueError("inertia must be symmetric")
        if np.min(np.linalg.eigvalsh(inertia)) <= 0.0:
            raise ValueError("inertia must be positive definite")
        anti = np.max(np.abs(c + np.transpose(c, (1, 0, 2))))
        if anti > 0.0:
            raise ValueError(f"structure constants not antisymmetric ({anti:g})")
        jac = jacobi_residual_raw(c)
        if jac > JACOBI_TOL:
            raise ValueError(f"Jacobi identity violated (residual {jac:g})")
        for a in (c, inertia):
            a.setflags(write=False)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "inertia", inertia)
        inv = np.linalg.inv(inertia)
        inv.setflags(write=False)
        object.__setattr__(self, "inertia_inv", inv)

    def check_element(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got {v.shape}")
        return v


def jacobi_residual_raw(c: np.ndarray) -> float:
    """Max-abs Jacobi residual of raw structure constants, blockwise in the
    first index so large algebras do not materialize an n^4 array."""
    n = c.shape[0]
    worst = 0.0
    for i in range(n):
        # sum_m c[i,j,m] c[m,k,l] + c[j,k,m] c[m,i,l] + c[k,i,m] c[m,j,l]
        t1 = np.einsum("jm,mkl->jkl", c[i], c)
        t2 = np.einsum("jkm,ml->jkl", c, c[:, i, :])
        t3 = np.einsum("km,mjl->kjl", c[:, i, :], c).transpose(1, 0, 2)
        worst = max(worst, float(np.max(np.abs(t1 + t2 + t3))))
    return worst


def jacobi_residual(algebra: LieAlgebra) -> float:
    return jacobi_residual_raw(algebra.c)


def bracket(algebra: LieAlgebra, x, y) -> np.ndarray:
    """[x, y] in basis coordinates."""
    x = algebra.check_element(x)
    y = algebra.check_element(y)
    return np.einsum("ijk,i,j->k", algebra.c, x, y)


def pairing(mu, x) -> float:
    """Natural pairing of a dual vector with an algebra vector."""
    mu = np.asarray(mu, dtype=float)
    x = np.asarray(x, dtype=float)
    if mu.shape != x.shape:
        raise ValueError("dimension mismatch in pairing")
    return float(np.dot(mu, x))


def coadjoint(algebra: LieAlgebra, x, mu) -> np.ndarray:
    """ad*_x mu, defined by <ad*_x mu, y> = <mu, [x, y]> for all y."""
    x = algebra.check_element(x)
    mu = algebra.check_element(mu)
    n = algebra.n
    # (ad*_x)_{jk} = sum_i x_i c[i,j,k]; two small matmuls beat einsum here
    adx = (x @ algebra.c.reshape(n, n * n)).reshape(n, n)
    return adx @ mu


def euler_rhs(algebra: LieAlgebra, m) -> np.ndarray:
    """Right-hand side of the Euler flow on the dual: -ad*_{I^-1 m} m."""
    m = algebra.check_element(m)
    return -coadjoint(algebra, algebra.inertia_inv @ m, m)


def fd_gradient(h_expr_env, names, point, rel_step=1e-6):
    """Central-difference gradient of a scalar callable of an env dict.

    `h_expr_env(env)` evaluates the scalar; `names[i]` is the env key for
    coordinate i; step per coordinate is max(rel_step, rel_step*|x_i|).
    """
    point = np.asarray(point, dtype=float)
    env = {name: float(v) for name, v in zip(names, point)}
    grad = np.empty(len(names))
    for i, name in enumerate(names):
        h = max(rel_step, rel_step * abs(point[i]))
        env[name] = point[i] + h
        fp = h_expr_env(env)
        env[name] = point[i] - h
        fm = h_expr_env(env)
        env[name] = point[i]
        grad[i] = (fp - fm) / (2.0 * h)
    return grad


def lie_poisson_rhs(algebra: LieAlgebra, hamiltonian: Expression, m) -> np.ndarray:
    """Hamiltonian flow on the dual for a scalar H(m1..mn): ad*_{dH} m.

    dH is a central finite-difference gradient, so H need not be quadratic.
    """
    m = algebra.check_element(m)
    names = [f"m{i + 1}" for i in range(algebra.n)]
    unknown = hamiltonian.free_variables - set(names)
    if unknown:
        raise ValueError(f"hamiltonian uses unknown variables {sorted(unknown)}")
    grad = fd_gradient(hamiltonian.evaluate, names, m)
    return coadjoint(algebra, grad, m)


@dataclass(frozen=True, eq=False)
class CentralExtension:
    """One-dimensional central extension of `base` by the antisymmetric
    bilinear form w(X, Y) = X^T W Y, validated as a 2-cocycle."""

    base: LieAlgebra
    W: np.ndarray
    drift: np.ndarray | None = None  # vector generating W, when known

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        n = self.base.n
        if W.shape != (n, n):
            raise ValueError("cocycle matrix shape mismatch")
        anti = float(np.max(np.abs(W + W.T)))
        if anti > COCYCLE_TOL:
            raise ValueError(
                f"cocycle matrix not antisymmetric (residual {anti:g}); "
                "the inertia form is probably not ad-invariant"
            )
        res = self.cocycle_residual_of(self.base, W)
        if res > COCYCLE_TOL:
            raise ValueError(f"cocycle identity violated (residual {res:g})")
        W = W.copy()
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        if self.drift is not None:
            d = self.base.check_element(self.drift).copy()
            d.setflags(write=False)
            object.__setattr__(self, "drift", d)

    @staticmethod
    def cocycle_residual_of(algebra: LieAlgebra, W: np.ndarray) -> float:
        """Max-abs residual of w([X,Y],Z) + w([Y,Z],X) + w([Z,X],Y) over
        all basis triples."""
        t = np.einsum("ijm,mk->ijk", algebra.c, W)
        res = t + np.transpose(t, (1, 2, 0)) + np.transpose(t, (2, 0, 1))
        return float(np.max(np.abs(res)))


def averaging_cocycle(algebra: LieAlgebra, v0) -> CentralExtension:
    """Central extension generated by a drift vector v0:
    W[i, j] = <ad*_{v0} I e_i, e_j>."""
    v0 = algebra.check_element(v0)
    n = algebra.n
    adv = (v0 @ algebra.c.reshape(n, n * n)).reshape(n, n)
    w = (adv @ algebra.inertia).T
    return CentralExtension(algebra, w, drift=v0)


def extended_coadjoint(ext: CentralExtension, x, b: float, mu) -> np.ndarray:
    """Coadjoint action of (x, a) on (mu, b) in the extension; the central
    component of the result vanishes and is not represented."""
    x = ext.base.check_element(x)
    mu = ext.base.check_element(mu)
    return coadjoint(ext.base, x, mu) + float(b) * (ext.W.T @ x)


def extended_euler_rhs(ext: CentralExtension, m, v0=None) -> np.ndarray:
    """Euler flow on the dual of the extension at central charge 1:
    -ad*_{I^-1 m + v0} m.  Equals -extended_coadjoint(ext, I^-1 m, 1, m)."""
    if v0 is None:
        v0 = ext.drift
    if v0 is None:
        raise ValueError("extension has no stored drift; pass v0 explicitly")
    m = ext.base.check_element(m)
    v0 = ext.base.check_element(v0)
    return -coadjoint(ext.base, ext.base.inertia_inv @ m + v0, m)


def energy_norm(algebra: LieAlgebra, mu) -> float:
    """Inertia norm on the dual: <mu, I^-1 mu>^(1/2)."""
    mu = algebra.check_element(mu)
    return math.sqrt(float(mu @ algebra.inertia_inv @ mu))


# ---------------------------------------------------------------------------
# built-in algebras

def _so3_constants():
    c = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[i, j, k] = 1.0
        c[j, i, k] = -1.0
    return c


def _heisenberg3_constants():
    c = np.zeros((3, 3, 3))
    c[0, 1, 2] = 1.0
    c[1, 0, 2] = -1.0
    return c


def _sine_truncated(N: int, inertia: str):
    if N < 3 or N % 2 == 0:
        raise ValueError("sine_truncated requires odd N >= 3")
    half = (N - 1) // 2
    modes = [
        (m1, m2)
        for m1 in range(-half, half + 1)
        for m2 in range(-half, half + 1)
        if (m1, m2) != (0, 0)
    ]
    index = {m: i for i, m in enumerate(modes)}
    n = len(modes)
    c = np.zeros((n, n, n))
    scale = N / (2.0 * math.pi)
    for i, (a1, a2) in enumerate(modes):
        for j, (b1, b2) in enumerate(modes):
            if j <= i:
                continue
            cross = a1 * b2 - a2 * b1
            target = (((a1 + b1 + half) % N) - half, ((a2 + b2 + half) % N) - half)
            if target == (0, 0) or cross % N == 0:
                continue
            value = scale * math.sin(2.0 * math.pi * (cross % N) / N)
            c[i, j, index[target]] = value
            c[j, i, index[target]] = -value
    if inertia == "identity":
        im = np.eye(n)
    elif inertia == "laplacian":
        im = np.diag([1.0 / (m1 * m1 + m2 * m2) for m1, m2 in modes])
    else:
        raise ValueError(f"unknown sine_truncated inertia '{inertia}'")
    return c, im, modes


def builtin_algebra(name: str, N: int | None = None, inertia=None) -> LieAlgebra:
    """Construct a named algebra.

    so3          cross-product structure constants, default inertia identity
    heisenberg3  [e1, e2] = e3 only
    sine_truncated  torus modes (m1, m2) != 0 in the symmetric range for odd
                 N >= 3, sine bracket with mod-N mode addition; inertia is
                 the identity unless inertia='laplacian' (diag 1/|m|^2)

    For so3/heisenberg3, `inertia` may be a length-3 diagonal or a 3x3
    matrix.
    """
    if name in ("so3", "heisenberg3"):
        c = _so3_constants() if name == "so3" else _heisenberg3_constants()
        if inertia is None:
            im = np.eye(3)
        else:
            im = np.asarray(inertia, dtype=float)
            if im.ndim == 1:
                im = np.diag(im)
        return LieAlgebra(3, c, im, name=name)
    if name == "sine_truncated":
        if N is None:
            raise ValueError("sine_truncated requires N")
        c, im, _ = _sine_truncated(N, inertia or "identity")
        return LieAlgebra(c.shape[0], c, im, name=f"sine_truncated({N})")
    raise ValueError(f"unknown algebra '{name}'")


def load_algebra(path, name=None) -> LieAlgebra:
    """Load an algebra from a plain-text file.

    Token stream (with '#' comments stripped): the dimension n, then any
    number of `i j k value` quadruples (0-based indices) for the nonzero
    structure constants with i < j (the antisymmetric partner is filled in),
    then the n*n inertia entries row-major.  Explicit `j i k -value` lines
    are also accepted.
    """
    tokens = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if not tokens:
        raise ValueError(f"{path}: empty algebra file")
    n = int(tokens[0])
    body = tokens[1:]
    if len(body) < n * n or (len(body) - n * n) % 4 != 0:
        raise ValueError(
            f"{path}: expected 4-token structure lines followed by {n}x{n} inertia"
        )
    c = np.zeros((n, n, n))
    n_quads = (len(body) - n * n) // 4
    for q in range(n_quads):
        i, j, k = (int(t) for t in body[4 * q : 4 * q + 3])
        value = float(body[4 * q + 3])
        c[i, j, k] = value
        if c[j, i, k] == 0.0:
            c[j, i, k] = -value
    inertia = np.array([float(t) for t in body[4 * n_quads :]]).reshape(n, n)
    return LieAlgebra(n, c, inertia, name=name or str(path))
