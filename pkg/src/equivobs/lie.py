"""Matrix Lie groups embedded in R^{n x n}.

Group and algebra elements are plain ``numpy`` arrays. A :class:`MatrixLieGroup`
carries the algebra basis and knows how to project onto the algebra, build
coordinates, exponentiate and measure how far a matrix sits off the manifold.
Conjugation and the commutator do not depend on the basis, so :func:`adjoint`
and :func:`bracket` are module level.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, expm

MANIFOLD_TOL = 1e-9
MANIFOLD_HARD_TOL = 1e-6
ALGEBRA_TOL = 1e-10


class ManifoldError(ValueError):
    """A matrix is too far from its group (or algebra) to be trusted."""


class ManifoldWarning(UserWarning):
    pass


def adjoint(A: np.ndarray, w: np.ndarray, A_inv: np.ndarray | None = None) -> np.ndarray:
    """Ad_A w = A w A^{-1}; pass ``A_inv`` when it is already at hand."""
    return A @ w @ (np.linalg.inv(A) if A_inv is None else A_inv)


def bracket(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return x @ y - y @ x


def _rotation_residual(R: np.ndarray) -> float:
    k = R.shape[0]
    return float(np.linalg.norm(R.T @ R - np.eye(k)) + abs(np.linalg.det(R) - 1.0))


@dataclass(frozen=True, eq=False)
class MatrixLieGroup:
    """A matrix Lie group described by an ordered basis of its algebra.

    ``constraint`` selects the manifold residual: ``"so"`` (special orthogonal),
    ``"se"`` (homogeneous rigid motions) or ``"none"`` (invertibility only).
    """

    name: str
    basis: np.ndarray
    constraint: str = "none"
    gram: np.ndarray = field(init=False, repr=False)
    _flat: np.ndarray = field(init=False, repr=False)
    _coef: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise ValueError(f"basis must have shape (d, n, n), got {basis.shape}")
        if self.constraint not in ("so", "se", "none"):
            raise ValueError(f"unknown constraint kind {self.constraint!r}")
        basis.setflags(write=False)
        flat = basis.reshape(basis.shape[0], -1)
        gram = flat @ flat.T
        try:
            cho = cho_factor(gram)
        except np.linalg.LinAlgError as exc:
            raise ValueError(f"{self.name}: basis is linearly dependent") from exc
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "_flat", flat)
        # gram^{-1} B^T, so coordinates of M are one matrix-vector product
        object.__setattr__(self, "_coef", cho_solve(cho, flat))
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                c = bracket(basis[i], basis[j])
                if np.linalg.norm(c - self.project(c)) > 1e-9:
                    raise ValueError(f"{self.name}: basis is not closed under the bracket")

    @property
    def n(self) -> int:
        return self.basis.shape[1]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def identity(self) -> np.ndarray:
        return np.eye(self.n)

    # algebra ---------------------------------------------------------------

    def hat(self, coords: Sequence[float]) -> np.ndarray:
        """Basis coordinates to algebra matrix."""
        c = np.asarray(coords, dtype=float)
        if c.shape != (self.dim,):
            raise ValueError(f"{self.name}: expected {self.dim} coordinates, got shape {c.shape}")
        return (c @ self._flat).reshape(self.n, self.n)

    def vee(self, w: np.ndarray) -> np.ndarray:
        """Algebra matrix to basis coordinates (Gram solve, exact on the algebra)."""
        return self._coef @ np.asarray(w, dtype=float).ravel()

    coords_to_matrix = hat
    matrix_to_coords = vee

    def project(self, M: np.ndarray) -> np.ndarray:
        """Orthogonal projection onto the algebra under <X, Y> = tr(X^T Y)."""
        return self.hat(self.vee(M))

    def algebra_residual(self, M: np.ndarray) -> float:
        return float(np.linalg.norm(M - self.project(M)))

    def check_algebra(self, w: np.ndarray, tol: float = ALGEBRA_TOL) -> np.ndarray:
        r = self.algebra_residual(w)
        if not r <= tol:
            raise ManifoldError(f"{self.name}: matrix is not in the algebra (residual {r:.3g})")
        return w

    # group -----------------------------------------------------------------

    def constraint_residual(self, M: np.ndarray) -> float:
        M = np.asarray(M, dtype=float)
        if M.shape != (self.n, self.n):
            raise ValueError(f"{self.name}: expected {self.n}x{self.n} matrix, got {M.shape}")
        if not np.all(np.isfinite(M)):
            return float("inf")
        if self.constraint == "so":
            return _rotation_residual(M)
        if self.constraint == "se":
            k = self.n - 1
            bottom = np.zeros(self.n)
            bottom[-1] = 1.0
            return _rotation_residual(M[:k, :k]) + float(np.linalg.norm(M[k] - bottom))
        return 0.0 if abs(np.linalg.det(M)) > 1e-12 else float("inf")

    def check(self, M: np.ndarray, tol: float = MANIFOLD_TOL,
              hard_tol: float = MANIFOLD_HARD_TOL) -> np.ndarray:
        """Return ``M`` after checking it is on the group.

        Warns between ``tol`` and ``hard_tol``, raises :class:`ManifoldError` above.
        """
        r = self.constraint_residual(M)
        if r > hard_tol or not np.isfinite(r):
            raise ManifoldError(f"{self.name}: constraint residual {r:.3g} exceeds {hard_tol:g}")
        if r > tol:
            warnings.warn(f"{self.name}: constraint residual {r:.3g} above {tol:g}",
                          ManifoldWarning, stacklevel=2)
        return M

    def compose(self, g1: np.ndarray, g2: np.ndarray, check: bool = True) -> np.ndarray:
        if g1.shape != (self.n, self.n) or g2.shape != (self.n, self.n):
            raise ValueError(f"{self.name}: operands are not {self.n}x{self.n}")
        out = g1 @ g2
        return self.check(out) if check else out

    def inverse(self, g: np.ndarray, check: bool = True) -> np.ndarray:
        try:
            out = np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise ManifoldError(f"{self.name}: singular group element") from exc
        return self.check(out) if check else out

    def exp(self, w: np.ndarray) -> np.ndarray:
        return expm(np.asarray(w, dtype=float))

    def adjoint(self, A: np.ndarray, w: np.ndarray, check: bool = True) -> np.ndarray:
        out = adjoint(A, w)
        return self.check_algebra(out, tol=1e-10 * max(1.0, np.linalg.norm(out))) if check else out

    def bracket(self, w1: np.ndarray, w2: np.ndarray) -> np.ndarray:
        return bracket(w1, w2)

    # sampling --------------------------------------------------------------

    def random_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        return self.hat(rng.uniform(-scale, scale, self.dim))

    def random_element(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        return self.exp(self.random_algebra(rng, scale))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "constraint": self.constraint,
            "basis": [b.ravel().tolist() for b in self.basis],
        }


def _unit(n: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


def skew(v: Sequence[float]) -> np.ndarray:
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def _make_so3() -> MatrixLieGroup:
    return MatrixLieGroup("so3", np.stack([skew(e) for e in np.eye(3)]), constraint="so")


def _make_se2() -> MatrixLieGroup:
    rot = _unit(3, 1, 0) - _unit(3, 0, 1)
    return MatrixLieGroup("se2", np.stack([rot, _unit(3, 0, 2), _unit(3, 1, 2)]), constraint="se")


def _make_se3() -> MatrixLieGroup:
    gens = []
    for e in np.eye(3):
        m = np.zeros((4, 4))
        m[:3, :3] = skew(e)
        gens.append(m)
    gens += [_unit(4, i, 3) for i in range(3)]
    return MatrixLieGroup("se3", np.stack(gens), constraint="se")


SO3 = _make_so3()
SE2 = _make_se2()
SE3 = _make_se3()

GROUPS: dict[str, MatrixLieGroup] = {g.name: g for g in (SE2, SO3, SE3)}


def get_group(name: str) -> MatrixLieGroup:
    try:
        return GROUPS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown group {name!r}; known: {sorted(GROUPS)}") from None


def load_group(path: str | Path) -> MatrixLieGroup:
    """Load a group descriptor from JSON: ``{name, n, basis, constraint?}``.

    Each basis entry is an n*n list in row-major order.
    """
    desc = json.loads(Path(path).read_text())
    n = int(desc["n"])
    basis = np.array(desc["basis"], dtype=float).reshape(-1, n, n)
    if "d" in desc and int(desc["d"]) != basis.shape[0]:
        raise ValueError(f"descriptor says d={desc['d']} but lists {basis.shape[0]} basis matrices")
    return MatrixLieGroup(desc.get("name", Path(path).stem), basis, desc.get("constraint", "none"))


def resolve_group(name_or_path: str) -> MatrixLieGroup:
    if name_or_path.lower() in GROUPS:
        return GROUPS[name_or_path.lower()]
    if Path(name_or_path).suffix == ".json" and Path(name_or_path).exists():
        return load_group(name_or_path)
    return get_group(name_or_path)
