"""Generalized measurements, Born-rule probabilities, and dilation.

A POVM over m outcomes on C^d can always be realized as an orthogonal
measurement on C^d (x) C^m with a fixed pure ancilla: stack the sqrt(E_a)
blocks into an isometry, complete it to a unitary U, and conjugate the
ancilla-basis projectors back through U. Only a pure ancilla |0><0| is
produced here; a mixed one is never needed for that realization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    DimMismatch,
    DimTooLarge,
    InvalidPOVM,
    NotProjector,
    OutOfRange,
)
from .serialize import entries_to_matrix, matrix_to_entries
from .states import DensityMatrix, PureState, _ginibre


class POVM:
    """A list of PSD elements on C^d summing to the identity."""

    __slots__ = ("elements",)

    def __init__(self, elements, *, tol_herm: float = linalg.TOL_HERM,
                 tol_psd: float = linalg.TOL_PSD):
        elems = [linalg.as_matrix(e) for e in elements]
        if not elems:
            raise InvalidPOVM("POVM needs at least one element")
        d = elems[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for i, e in enumerate(elems):
            if e.shape[0] != d:
                raise InvalidPOVM(f"element {i} dim {e.shape[0]} != {d}")
            dev = np.linalg.norm(e - e.conj().T)
            if dev > tol_herm:
                raise InvalidPOVM(f"element {i} not Hermitian (dev {dev:.3e})")
            w = np.linalg.eigvalsh(e)
            if w[0] < -tol_psd:
                raise InvalidPOVM(f"element {i} eigenvalue {w[0]:.3e} below -{tol_psd:.1e}")
            total += e
        res = np.linalg.norm(total - np.eye(d))
        if res > 1e-9:
            raise InvalidPOVM(f"elements sum to identity only within {res:.3e}")
        self.elements = elems

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    @property
    def outcomes(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"POVM(dim={self.dim}, outcomes={self.outcomes})"

    def to_dict(self) -> dict:
        return {"dim": self.dim,
                "elements": [matrix_to_entries(e) for e in self.elements]}

    @classmethod
    def from_dict(cls, doc: dict) -> "POVM":
        return cls([entries_to_matrix(e, doc["dim"]) for e in doc["elements"]])


class ProjectiveMeasurement:
    """Mutually orthogonal projectors summing to the identity."""

    __slots__ = ("projectors",)

    def __init__(self, projectors, *, tol: float = 1e-9):
        projs = [linalg.as_matrix(p) for p in projectors]
        if not projs:
            raise NotProjector("measurement needs at least one projector")
        d = projs[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for i, p in enumerate(projs):
            if p.shape[0] != d:
                raise NotProjector(f"projector {i} dim {p.shape[0]} != {d}")
            if np.linalg.norm(p - p.conj().T) > tol:
                raise NotProjector(f"projector {i} not Hermitian")
            if np.linalg.norm(p @ p - p) > tol:
                raise NotProjector(f"projector {i} not idempotent")
            total += p
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                if np.linalg.norm(projs[i] @ projs[j]) > tol:
                    raise NotProjector(f"projectors {i},{j} not orthogonal")
        if np.linalg.norm(total - np.eye(d)) > tol:
            raise NotProjector("projectors do not sum to identity")
        self.projectors = projs

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def outcomes(self) -> int:
        return len(self.projectors)

    @property
    def elements(self) -> list[np.ndarray]:
        # lets probabilities() treat a projective measurement as a POVM
        return self.projectors

    def __repr__(self) -> str:
        return f"ProjectiveMeasurement(dim={self.dim}, outcomes={self.outcomes})"


@dataclass
class DilationResult:
    """Projective realization of a POVM on system (x) ancilla."""

    measurement: ProjectiveMeasurement
    ancilla: DensityMatrix


def probabilities(measurement, rho: DensityMatrix) -> list[float]:
    """Born-rule outcome probabilities Tr(E_a rho).

    Tiny negative values (>= -1e-12) clamp to zero; anything worse, an
    imaginary residue above 1e-12, or a total off 1 by more than 1e-9 raises
    instead of being silently repaired.
    """
    elems = measurement.elements
    if measurement.dim != rho.dim:
        raise DimMismatch(f"measurement dim {measurement.dim} != state dim {rho.dim}")
    probs = []
    for i, e in enumerate(elems):
        p = complex(np.trace(e @ rho.matrix))
        if abs(p.imag) > 1e-12:
            raise InvalidPOVM(f"outcome {i} probability has imag part {p.imag:.3e}")
        if p.real < -1e-12:
            raise InvalidPOVM(f"outcome {i} probability {p.real:.3e} below -1e-12")
        probs.append(max(p.real, 0.0))
    total = sum(probs)
    if abs(total - 1.0) > 1e-9:
        raise InvalidPOVM(f"probabilities sum to {total}, off by more than 1e-9")
    return probs


def naimark_dilate(povm: POVM) -> DilationResult:
    """Realize a POVM as a projective measurement on system (x) ancilla.

    The isometry W|psi> = sum_a (sqrt(E_a)|psi>) (x) |a> is polished to exact
    column orthonormality and completed to a unitary U over the canonical
    fill-in basis (deterministic order); the projectors are
    U^dagger (1 (x) |a><a|) U and the ancilla is |0><0| on C^m.
    """
    d = povm.dim
    m = povm.outcomes
    dm = d * m
    if dm > linalg.MAX_DIM:
        raise DimTooLarge(f"dilation dim {dm} exceeds the cap {linalg.MAX_DIM}")
    w = np.zeros((dm, d), dtype=complex)
    rows = np.arange(d) * m
    for a, e in enumerate(povm.elements):
        w[rows + a, :] = linalg.sqrt_psd(e)
    # Loewdin polish: W (W^dagger W)^(-1/2) is the closest exactly-isometric frame
    s = w.conj().T @ w
    sw, su = np.linalg.eigh(s)
    if sw[0] <= 0.0:
        raise InvalidPOVM("isometry columns are degenerate")
    w = w @ ((su / np.sqrt(sw)) @ su.conj().T)

    u = np.zeros((dm, dm), dtype=complex)
    u[:, rows] = w
    basis = [w[:, j] for j in range(d)]
    free = [c for c in range(dm) if c % m != 0] if m > 1 else []
    fill = iter(free)
    for k in range(dm):
        if len(basis) == dm:
            break
        v = np.zeros(dm, dtype=complex)
        v[k] = 1.0
        for _ in range(2):  # re-orthogonalize once for numerical hygiene
            for b in basis:
                v = v - np.vdot(b, v) * b
        nrm = np.linalg.norm(v)
        if nrm > 1e-7:
            v = v / nrm
            u[:, next(fill)] = v
            basis.append(v)
    if len(basis) != dm:
        raise InvalidPOVM("failed to complete the isometry to a unitary")
    linalg.require_unitary(u)

    projs = []
    for a in range(m):
        anc = np.zeros((m, m), dtype=complex)
        anc[a, a] = 1.0
        pi = u.conj().T @ linalg.kron(np.eye(d), anc) @ u
        projs.append((pi + pi.conj().T) / 2.0)
    sigma = np.zeros((m, m), dtype=complex)
    sigma[0, 0] = 1.0
    return DilationResult(ProjectiveMeasurement(projs), DensityMatrix(sigma))


def dilated_probabilities(dilation: DilationResult, rho: DensityMatrix) -> list[float]:
    """Outcome probabilities of rho through a dilation (system first)."""
    joint = DensityMatrix(linalg.kron(rho.matrix, dilation.ancilla.matrix))
    return probabilities(dilation.measurement, joint)


def projector_gap(x: PureState, y: PureState, pi) -> float:
    """|<x|Pi|x> - <y|Pi|y>| for an orthogonal projector Pi."""
    p = linalg.as_matrix(pi)
    if np.linalg.norm(p - p.conj().T) > 1e-9 or np.linalg.norm(p @ p - p) > 1e-9:
        raise NotProjector("pi is not an orthogonal projector within 1e-9")
    if x.dim != y.dim or x.dim != p.shape[0]:
        raise DimMismatch("state and projector dimensions differ")
    px = float(np.vdot(x.amp, p @ x.amp).real)
    py = float(np.vdot(y.amp, p @ y.amp).real)
    return abs(px - py)


def _random_povm_matrices(rng: np.random.Generator, d: int, outcomes: int) -> list[np.ndarray]:
    parts = []
    for _ in range(outcomes):
        g = _ginibre(rng, d, d)
        parts.append(g @ g.conj().T)
    total = sum(parts)
    tw, tu = np.linalg.eigh(total)
    inv_sqrt = (tu / np.sqrt(tw)) @ tu.conj().T
    elems = []
    for a in parts:
        e = inv_sqrt @ a @ inv_sqrt
        elems.append((e + e.conj().T) / 2.0)
    return elems


def random_povm(d: int, outcomes: int, seed: int) -> POVM:
    """Random POVM: PSD parts G_a G_a^dagger normalized by the inverse-sqrt sum."""
    d = int(d)
    outcomes = int(outcomes)
    if d < 1:
        raise OutOfRange(f"dimension {d} must be >= 1")
    if outcomes < 1:
        raise OutOfRange(f"outcomes {outcomes} must be >= 1")
    rng = np.random.default_rng(seed)
    return POVM(_random_povm_matrices(rng, d, outcomes))
