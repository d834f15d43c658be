"""Density operators, fidelity/angle geometry, and purification machinery.

The overlap tooling revolves around one identity: if |Y1>, |Y2> in H(x)H are
purifications of rho1, rho2, their inner product can always be written as
Tr(sqrt(rho1) sqrt(rho2) V) with V unitary, and every V arises this way. The
maximum over V equals sqrt(F); a zero is always reachable for d >= 2; and a
continuous path between those two unitaries sweeps every value in between.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    BadRank,
    DimMismatch,
    DimTooSmall,
    EnvTooSmall,
    NotDensity,
    NotPSD,
    TargetOutOfRange,
)
from .serialize import (
    entries_to_matrix,
    entries_to_vector,
    matrix_to_entries,
    vector_to_entries,
)

RANK_CUTOFF = 1e-12
TOL_ROOT = 1e-10
_BRACKET_SAMPLES = 64


class DensityMatrix:
    """A validated density matrix: Hermitian, PSD, unit trace."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, tol_herm: float = linalg.TOL_HERM,
                 tol_psd: float = linalg.TOL_PSD):
        a = linalg.as_matrix(matrix)
        linalg.require_hermitian(a, tol_herm)
        w = np.linalg.eigvalsh(a)
        if w[0] < -tol_psd:
            raise NotPSD(f"density eigenvalue {w[0]:.3e} below -{tol_psd:.1e}")
        tr = complex(np.trace(a))
        if abs(tr - 1.0) > 1e-10:
            raise NotDensity(f"trace {tr} not 1 within 1e-10")
        self.matrix = a

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityMatrix(dim={self.dim})"

    def to_dict(self) -> dict:
        return {"dim": self.dim, "entries": matrix_to_entries(self.matrix)}

    @classmethod
    def from_dict(cls, doc: dict) -> "DensityMatrix":
        return cls(entries_to_matrix(doc["entries"], doc["dim"]))


class PureState:
    """A unit-norm state vector."""

    __slots__ = ("amp",)

    def __init__(self, amp):
        a = np.asarray(amp, dtype=complex).reshape(-1)
        if a.size == 0 or a.size > linalg.MAX_DIM:
            raise DimMismatch(f"state vector length {a.size} invalid")
        if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
            raise NotDensity("state vector contains NaN or Inf")
        n = np.linalg.norm(a)
        if abs(n - 1.0) > 1e-10:
            raise NotDensity(f"norm {n} not 1 within 1e-10")
        self.amp = a

    @property
    def dim(self) -> int:
        return self.amp.size

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amp, self.amp.conj()))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"

    def to_dict(self) -> dict:
        return {"dim": self.dim, "amp": vector_to_entries(self.amp)}

    @classmethod
    def from_dict(cls, doc: dict) -> "PureState":
        return cls(entries_to_vector(doc["amp"], doc["dim"]))


@dataclass
class OverlapUnitaryResult:
    """A unitary realizing a purification overlap, with the path parameter."""

    v: np.ndarray
    achieved_overlap: float
    path_parameter: float


def _check_same_dim(chi: DensityMatrix, omega: DensityMatrix) -> int:
    if chi.dim != omega.dim:
        raise DimMismatch(f"dims differ: {chi.dim} vs {omega.dim}")
    return chi.dim


_EQUAL_TOL = 1e-12


def _fidelity_of(m1: np.ndarray, m2: np.ndarray) -> float:
    # Inputs equal within tolerance give exactly 1: the singular-value route
    # below can only resolve 1 - F down to ~1e-15, and sqrt(1 - F) in angle
    # computations would amplify that noise to ~3e-8.
    if np.linalg.norm(m1 - m2) <= _EQUAL_TOL * max(1.0, np.linalg.norm(m1)):
        return 1.0
    # (sum of singular values of sqrt(m1) sqrt(m2))^2, the stable evaluation
    # of the closed form (Tr sqrt(sqrt(m1) m2 sqrt(m1)))^2.
    prod = linalg.sqrt_psd(m1) @ linalg.sqrt_psd(m2)
    s = np.linalg.svd(prod, compute_uv=False)
    f = float(np.sum(s)) ** 2
    return min(max(f, 0.0), 1.0)


def fidelity(chi: DensityMatrix, omega: DensityMatrix) -> float:
    """Fidelity between two density matrices, clamped to [0, 1].

    Equal inputs (within 1e-12 relative Frobenius distance) return exactly
    1.0, so the derived angle is exactly zero.
    """
    _check_same_dim(chi, omega)
    return _fidelity_of(chi.matrix, omega.matrix)


def angle(chi: DensityMatrix, omega: DensityMatrix) -> float:
    """Angle arccos(sqrt(F)) in [0, pi/2]."""
    return float(np.arccos(np.sqrt(fidelity(chi, omega))))


def angle_pure(x: PureState, y: PureState) -> float:
    """Angle arccos(|<x|y>|) between unit vectors."""
    if x.dim != y.dim:
        raise DimMismatch(f"dims differ: {x.dim} vs {y.dim}")
    ov = min(abs(np.vdot(x.amp, y.amp)), 1.0)
    return float(np.arccos(ov))


def purify(rho: DensityMatrix, env_dim: int) -> PureState:
    """Canonical purification on system (x) environment of dimension env_dim.

    Eigenvalues are taken in descending order and paired with the matching
    computational-basis environment vectors, so the construction is
    deterministic. Requires env_dim >= rank(rho).
    """
    e = int(env_dim)
    if e < 1:
        raise EnvTooSmall(f"env_dim {e} must be >= 1")
    w, u = linalg.hermitian_eig(rho.matrix)
    order = np.argsort(w)[::-1]
    w = np.clip(w[order], 0.0, None)
    u = u[:, order]
    rank = int(np.count_nonzero(w > RANK_CUTOFF))
    if e < rank:
        raise EnvTooSmall(f"env_dim {e} below state rank {rank}")
    k = min(e, rho.dim)
    # amp[a*e + j] = sqrt(w_j) u[a, j]
    coeff = np.zeros((rho.dim, e), dtype=complex)
    coeff[:, :k] = u[:, :k] * np.sqrt(w[:k])
    amp = coeff.reshape(-1)
    return PureState(amp / np.linalg.norm(amp))


def overlap_under(v, rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """|Tr(sqrt(rho1) sqrt(rho2) v)| for a unitary v."""
    d = _check_same_dim(rho1, rho2)
    a = linalg.as_matrix(v)
    if a.shape[0] != d:
        raise DimMismatch(f"unitary dim {a.shape[0]} != state dim {d}")
    linalg.require_unitary(a)
    return float(abs(np.trace(linalg.sqrt_psd(rho1.matrix)
                              @ linalg.sqrt_psd(rho2.matrix) @ a)))


def _overlap_svd(rho1: DensityMatrix, rho2: DensityMatrix):
    m = linalg.sqrt_psd(rho1.matrix) @ linalg.sqrt_psd(rho2.matrix)
    p, s, qh = np.linalg.svd(m)
    return m, p, s, qh


def max_overlap_unitary(rho1: DensityMatrix, rho2: DensityMatrix) -> OverlapUnitaryResult:
    """The unitary attaining the maximal overlap sqrt(F(rho1, rho2)).

    With sqrt(rho1) sqrt(rho2) = P Sigma Q^dagger the maximizer is Q P^dagger,
    which turns the trace into the sum of singular values.
    """
    _check_same_dim(rho1, rho2)
    m, p, _, qh = _overlap_svd(rho1, rho2)
    v = qh.conj().T @ p.conj().T
    return OverlapUnitaryResult(v, float(abs(np.trace(m @ v))), 1.0)


def _cyclic_shift(d: int) -> np.ndarray:
    # permutation with zero diagonal for d >= 2: e_j -> e_{(j+1) mod d}
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def zero_overlap_unitary(rho1: DensityMatrix, rho2: DensityMatrix) -> OverlapUnitaryResult:
    """A unitary giving overlap zero (orthogonal purifications), d >= 2.

    Q C P^dagger with C the cyclic shift lands the singular values on the
    zero diagonal of C, so the trace vanishes identically.
    """
    d = _check_same_dim(rho1, rho2)
    if d < 2:
        raise DimTooSmall("no zero-overlap unitary in dimension 1")
    m, p, _, qh = _overlap_svd(rho1, rho2)
    v = qh.conj().T @ _cyclic_shift(d) @ p.conj().T
    return OverlapUnitaryResult(v, float(abs(np.trace(m @ v))), 0.0)


def target_overlap_unitary(rho1: DensityMatrix, rho2: DensityMatrix, phi: float,
                           *, tol_root: float = TOL_ROOT) -> OverlapUnitaryResult:
    """A unitary whose overlap equals ``phi`` within tol_root.

    Walks the path V(t) = V0 * (V0^dagger Vmax)^t from the zero-overlap
    unitary (t=0) to the maximal one (t=1). The overlap g(t) is continuous
    with g(0)=0 and g(1)=sqrt(F) but not guaranteed monotone, so a sign
    bracket of g(t) - phi is located on a 64-point uniform grid first and
    then bisected.
    """
    d = _check_same_dim(rho1, rho2)
    if d < 2:
        raise DimTooSmall("dimension 1 admits only overlap 1")
    target = float(phi)
    m, p, s, qh = _overlap_svd(rho1, rho2)
    sqrt_f = min(float(np.sum(s)), 1.0)
    if not -1e-12 <= target <= sqrt_f + 1e-9:
        raise TargetOutOfRange(f"phi={target} outside [0, sqrt(F)={sqrt_f}]")
    target = min(max(target, 0.0), sqrt_f)

    v_max = qh.conj().T @ p.conj().T
    v_zero = qh.conj().T @ _cyclic_shift(d) @ p.conj().T
    if target <= tol_root:
        return OverlapUnitaryResult(v_zero, float(abs(np.trace(m @ v_zero))), 0.0)
    if target >= sqrt_f - tol_root:
        return OverlapUnitaryResult(v_max, float(abs(np.trace(m @ v_max))), 1.0)

    step = v_zero.conj().T @ v_max

    def walk(t: float):
        v = v_zero @ linalg.unitary_power(step, t)
        return v, float(abs(np.trace(m @ v)))

    ts = np.linspace(0.0, 1.0, _BRACKET_SAMPLES)
    gs = [walk(t)[1] for t in ts]
    lo = hi = None
    for i in range(_BRACKET_SAMPLES - 1):
        if (gs[i] - target) * (gs[i + 1] - target) <= 0.0:
            lo, g_lo = ts[i], gs[i]
            hi = ts[i + 1]
            break
    if lo is None:  # cannot happen for continuous g, kept as a hard stop
        raise TargetOutOfRange(f"no bracket found for phi={target}")

    v_mid, g_mid, mid = None, None, lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        v_mid, g_mid = walk(mid)
        if abs(g_mid - target) <= tol_root:
            break
        if (g_lo - target) * (g_mid - target) <= 0.0:
            hi = mid
        else:
            lo, g_lo = mid, g_mid
    return OverlapUnitaryResult(v_mid, g_mid, float(mid))


def purifications_with_overlap(rho1: DensityMatrix, rho2: DensityMatrix,
                               phi: float) -> tuple[PureState, PureState]:
    """Purifications of rho1 and rho2 on H(x)H whose overlap equals phi.

    Both marginals over the second factor recover the inputs; phi can be any
    value in [0, sqrt(F(rho1, rho2))].
    """
    d = _check_same_dim(rho1, rho2)
    res = target_overlap_unitary(rho1, rho2, phi)
    a = linalg.sqrt_psd(rho1.matrix)
    b = linalg.sqrt_psd(rho2.matrix) @ res.v
    # amp[x*d + i] = A[x, i] purifies A A^dagger with overlap Tr(A^dagger B)
    y1 = a.reshape(-1)
    y2 = b.reshape(-1)
    return (PureState(y1 / np.linalg.norm(y1)),
            PureState(y2 / np.linalg.norm(y2)))


def _ginibre(rng: np.random.Generator, d: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((d, cols))
            + 1j * rng.standard_normal((d, cols))) / np.sqrt(2.0)


def _random_density_matrix(rng: np.random.Generator, d: int, rank: int) -> np.ndarray:
    g = _ginibre(rng, d, rank)
    m = g @ g.conj().T
    m /= np.trace(m).real
    return (m + m.conj().T) / 2.0


def random_density(d: int, rank: int, seed: int) -> DensityMatrix:
    """Random density matrix of the given rank, deterministic per seed.

    Uses G G^dagger with G a d x rank complex Gaussian factor, normalized to
    unit trace; the column count controls the rank.
    """
    d = int(d)
    rank = int(rank)
    if d < 1:
        raise BadRank(f"dimension {d} must be >= 1")
    if not 1 <= rank <= d:
        raise BadRank(f"rank {rank} outside [1, {d}]")
    rng = np.random.default_rng(seed)
    return DensityMatrix(_random_density_matrix(rng, d, rank))
