"""Ancilla-assisted cloning channels, their errors, and the lower bound.

A cloning setup takes N copies of an input state together with an ancilla
(M = L - N extra registers plus an environment of dimension e), applies a
joint unitary V, and traces out the environment; the result is compared to
the ideal L-fold tensor power. The relative error of any such channel on a
pair of inputs is bounded below by a closed-form function of f (root
fidelity of the inputs) and phi (root fidelity of the ancilla pair), and
that bound is enforced at runtime as a soundness check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from . import linalg
from .errors import (
    DegeneratePair,
    DimMismatch,
    DimTooLarge,
    IndistinguishablePair,
    OutOfRange,
    SoundnessViolation,
)
from .serialize import entries_to_matrix, matrix_to_entries
from .states import (
    DensityMatrix,
    angle,
    fidelity,
    purifications_with_overlap,
)

DEGENERATE_TOL = 1e-12
SOUNDNESS_TOL = 1e-8
CHAIN_SLACK = 1e-9


def tensor_power(rho: DensityMatrix, k: int) -> DensityMatrix:
    """k-fold tensor power of a density matrix."""
    if int(k) < 1:
        raise OutOfRange(f"tensor power {k} must be >= 1")
    m = reduce(linalg.kron, [rho.matrix] * int(k))
    return DensityMatrix(m)


@dataclass(frozen=True)
class BoundInput:
    """Scalar parameters of the lower-bound formula."""

    f: float
    phi: float
    n_in: int
    n_out: int

    def __post_init__(self):
        if not 0.0 <= self.f <= 1.0:
            raise OutOfRange(f"f={self.f} outside [0, 1]")
        if not 0.0 <= self.phi <= 1.0:
            raise OutOfRange(f"phi={self.phi} outside [0, 1]")
        if self.n_in < 1 or self.n_out <= self.n_in:
            raise OutOfRange(
                f"need n_out > n_in >= 1, got n_in={self.n_in}, n_out={self.n_out}"
            )


class CloningSetup:
    """A concrete N -> L cloning channel evaluated on a pair of inputs.

    Holds the input pair on C^d, the ancilla pair on C^(d^M * e) with
    M = n_out - n_in, and the joint unitary on C^(d^L * e).
    """

    __slots__ = ("rho1", "rho2", "upsilon1", "upsilon2", "v",
                 "n_in", "n_out", "env_dim")

    def __init__(self, rho1: DensityMatrix, rho2: DensityMatrix,
                 upsilon1: DensityMatrix, upsilon2: DensityMatrix,
                 v, n_in: int, n_out: int, env_dim: int):
        n_in = int(n_in)
        n_out = int(n_out)
        env_dim = int(env_dim)
        if n_in < 1 or n_out <= n_in:
            raise OutOfRange(f"need n_out > n_in >= 1, got {n_in} -> {n_out}")
        if env_dim < 1:
            raise OutOfRange(f"env_dim {env_dim} must be >= 1")
        d = rho1.dim
        if rho2.dim != d:
            raise DimMismatch(f"input dims differ: {d} vs {rho2.dim}")
        m_extra = n_out - n_in
        anc_dim = d ** m_extra * env_dim
        if upsilon1.dim != anc_dim or upsilon2.dim != anc_dim:
            raise DimMismatch(
                f"ancilla dim must be d^M*e = {anc_dim}, got "
                f"{upsilon1.dim} and {upsilon2.dim}"
            )
        total = d ** n_out * env_dim
        if total > linalg.MAX_DIM:
            raise DimTooLarge(f"total dim d^L*e = {total} exceeds {linalg.MAX_DIM}")
        vm = linalg.as_matrix(v)
        if vm.shape[0] != total:
            raise DimMismatch(f"unitary dim {vm.shape[0]} != d^L*e = {total}")
        linalg.require_unitary(vm)
        self.rho1, self.rho2 = rho1, rho2
        self.upsilon1, self.upsilon2 = upsilon1, upsilon2
        self.v = vm
        self.n_in, self.n_out, self.env_dim = n_in, n_out, env_dim

    @property
    def d(self) -> int:
        return self.rho1.dim

    @property
    def m_extra(self) -> int:
        return self.n_out - self.n_in

    @property
    def total_dim(self) -> int:
        return self.d ** self.n_out * self.env_dim

    def __repr__(self) -> str:
        return (f"CloningSetup(d={self.d}, n_in={self.n_in}, "
                f"n_out={self.n_out}, env_dim={self.env_dim})")

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "n_in": self.n_in,
            "n_out": self.n_out,
            "env_dim": self.env_dim,
            "rho1": self.rho1.to_dict(),
            "rho2": self.rho2.to_dict(),
            "upsilon1": self.upsilon1.to_dict(),
            "upsilon2": self.upsilon2.to_dict(),
            "v": {"dim": self.total_dim, "entries": matrix_to_entries(self.v)},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CloningSetup":
        return cls(
            DensityMatrix.from_dict(doc["rho1"]),
            DensityMatrix.from_dict(doc["rho2"]),
            DensityMatrix.from_dict(doc["upsilon1"]),
            DensityMatrix.from_dict(doc["upsilon2"]),
            entries_to_matrix(doc["v"]["entries"], doc["v"]["dim"]),
            doc["n_in"], doc["n_out"], doc["env_dim"],
        )


@dataclass
class CloneOutcome:
    """Evaluated channel outputs and their error figures."""

    out1: DensityMatrix
    out2: DensityMatrix
    delta1: float
    delta2: float
    absolute_error: float
    relative_error: float

    def to_dict(self) -> dict:
        return {
            "out1": self.out1.to_dict(),
            "out2": self.out2.to_dict(),
            "delta1": self.delta1,
            "delta2": self.delta2,
            "absolute_error": self.absolute_error,
            "relative_error": self.relative_error,
        }


def absolute_error(delta1: float, delta2: float) -> float:
    """sin(delta1) + sin(delta2) for angles in [0, pi/2]."""
    d1, d2 = float(delta1), float(delta2)
    half_pi = math.pi / 2.0
    for d in (d1, d2):
        if not 0.0 <= d <= half_pi + 1e-12:
            raise OutOfRange(f"delta {d} outside [0, pi/2]")
    return math.sin(d1) + math.sin(d2)


def _ideal_sine(rho1: DensityMatrix, rho2: DensityMatrix, n_out: int) -> tuple[float, float]:
    """sin of the angle between the L-fold ideal outputs, cross-checked.

    The denominator is computed from the actual tensor-power states and must
    agree with sqrt(1 - f^(2L)) (root-fidelity multiplicativity) within
    1e-9; disagreement means the inputs or the arithmetic are broken.
    """
    f = math.sqrt(fidelity(rho1, rho2))
    if f >= 1.0 - DEGENERATE_TOL:
        raise IndistinguishablePair(
            f"inputs have root fidelity {f}; relative error is 0/0"
        )
    ideal1 = tensor_power(rho1, n_out)
    ideal2 = tensor_power(rho2, n_out)
    sine = math.sin(angle(ideal1, ideal2))
    cross = math.sqrt(max(0.0, 1.0 - f ** (2 * n_out)))
    if abs(sine - cross) > 1e-9:
        raise SoundnessViolation(
            f"denominator {sine} disagrees with sqrt(1-f^(2L)) = {cross}"
        )
    return sine, f


def relative_error(delta1: float, delta2: float, rho1: DensityMatrix,
                   rho2: DensityMatrix, n_out: int = 2) -> float:
    """(sin d1 + sin d2) / sin(angle between the ideal L-fold outputs)."""
    numer = absolute_error(delta1, delta2)
    sine, _ = _ideal_sine(rho1, rho2, n_out)
    return numer / sine


def apply_cloning(setup: CloningSetup) -> CloneOutcome:
    """Evaluate the channel: conjugate by V, trace out the environment.

    Raises SoundnessViolation if the relative error lands below the lower
    bound minus 1e-8, which no correct evaluation can do.
    """
    d, n_in, n_out, e = setup.d, setup.n_in, setup.n_out, setup.env_dim
    out_dim = d ** n_out
    outs = []
    for rho, ups in ((setup.rho1, setup.upsilon1), (setup.rho2, setup.upsilon2)):
        joint = linalg.kron(tensor_power(rho, n_in).matrix, ups.matrix)
        evolved = setup.v @ joint @ setup.v.conj().T
        red = linalg.partial_trace(evolved, [out_dim, e], {0})
        outs.append(DensityMatrix((red + red.conj().T) / 2.0))
    out1, out2 = outs
    delta1 = angle(out1, tensor_power(setup.rho1, n_out))
    delta2 = angle(out2, tensor_power(setup.rho2, n_out))
    abs_err = absolute_error(delta1, delta2)
    rel_err = relative_error(delta1, delta2, setup.rho1, setup.rho2, n_out)
    f = math.sqrt(fidelity(setup.rho1, setup.rho2))
    phi = math.sqrt(fidelity(setup.upsilon1, setup.upsilon2))
    floor = lower_bound(f, phi, n_in, n_out)
    if rel_err < floor - SOUNDNESS_TOL:
        raise SoundnessViolation(
            f"relative error {rel_err} below bound {floor} - {SOUNDNESS_TOL}"
        )
    return CloneOutcome(out1, out2, delta1, delta2, abs_err, rel_err)


def lower_bound(f: float, phi: float, n_in: int = 1, n_out: int = 2) -> float:
    """Closed-form floor on the relative error of any N -> L cloner.

    Zero for phi <= f^M (M = L - N); otherwise
    f^N * phi - f^L * sqrt(1 - f^(2N) phi^2) / sqrt(1 - f^(2L)).
    The branch split alone keeps the value nonnegative; no clamp is applied.
    """
    b = BoundInput(float(f), float(phi), int(n_in), int(n_out))
    if b.f >= 1.0 - DEGENERATE_TOL:
        raise DegeneratePair("bound undefined at f = 1 (coinciding inputs)")
    m_extra = b.n_out - b.n_in
    if b.phi <= b.f ** m_extra:
        return 0.0
    return (b.f ** b.n_in * b.phi
            - b.f ** b.n_out * math.sqrt(1.0 - b.f ** (2 * b.n_in) * b.phi ** 2)
            / math.sqrt(1.0 - b.f ** (2 * b.n_out)))


def lower_bound_one_to_two(f: float, phi: float) -> float:
    """The 1 -> 2 bound written out directly: f*phi - f^2*sqrt(1-f^2 phi^2)/sqrt(1-f^4).

    Kept as an independent code path; it must agree with lower_bound(f, phi, 1, 2)
    to within 1e-15.
    """
    b = BoundInput(float(f), float(phi), 1, 2)
    if b.f >= 1.0 - DEGENERATE_TOL:
        raise DegeneratePair("bound undefined at f = 1 (coinciding inputs)")
    if b.phi <= b.f:
        return 0.0
    return (b.f * b.phi
            - b.f ** 2 * math.sqrt(1.0 - b.f ** 2 * b.phi ** 2)
            / math.sqrt(1.0 - b.f ** 4))


@dataclass
class ChainCheck:
    """One inequality of the derivation, evaluated on concrete numbers."""

    name: str
    lhs: float
    rhs: float
    margin: float  # lhs - rhs; holds means margin <= slack
    holds: bool


@dataclass
class ProofChainReport:
    """Every inequality in the derivation chain, evaluated on one setup."""

    checks: list[ChainCheck] = field(default_factory=list)
    slack: float = CHAIN_SLACK

    @property
    def all_hold(self) -> bool:
        return all(c.holds for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "slack": self.slack,
            "all_hold": self.all_hold,
            "checks": [vars(c) for c in self.checks],
        }


def proof_chain_check(setup: CloningSetup) -> ProofChainReport:
    """Evaluate each inequality of the bound's derivation on a setup.

    The chain: the ideal-output angle is at most delta1 + delta2 + the
    actual-output angle (triangle steps); the actual outputs keep overlap at
    least f^N * phi; hence their angle's sine stays below
    sqrt(1 - f^(2N) phi^2); sines are subadditive on [0, pi/2]; and the
    relative error therefore sits above the closed-form bound.
    """
    outcome = apply_cloning(setup)
    n_in, n_out = setup.n_in, setup.n_out
    f = math.sqrt(fidelity(setup.rho1, setup.rho2))
    phi = math.sqrt(fidelity(setup.upsilon1, setup.upsilon2))
    ideal1 = tensor_power(setup.rho1, n_out)
    ideal2 = tensor_power(setup.rho2, n_out)
    delta_ideal = angle(ideal1, ideal2)
    delta_out = angle(outcome.out1, outcome.out2)
    fn_phi = f ** n_in * phi

    report = ProofChainReport()

    def add(name: str, lhs: float, rhs: float) -> None:
        margin = lhs - rhs
        report.checks.append(ChainCheck(name, lhs, rhs, margin,
                                        margin <= report.slack))

    add("angle_triangle_chain", delta_ideal,
        outcome.delta1 + outcome.delta2 + delta_out)
    add("output_overlap_floor", fn_phi, math.cos(delta_out))
    add("output_sine_ceiling", math.sin(delta_out),
        math.sqrt(max(0.0, 1.0 - min(1.0, fn_phi ** 2))))
    add("sine_subadditivity", math.sin(outcome.delta1 + outcome.delta2),
        math.sin(outcome.delta1) + math.sin(outcome.delta2))
    add("relative_error_floor", lower_bound(f, phi, n_in, n_out),
        outcome.relative_error)
    return report


def perfect_cloning_setup(rho1: DensityMatrix, rho2: DensityMatrix,
                          phi: float, n_in: int = 1, n_out: int = 2) -> CloningSetup:
    """Identity-unitary setup whose ancillas already carry perfect clones.

    The ancillas are purifications of the (L-N)-fold tensor powers with the
    requested mutual overlap phi (any value in [0, f^M] is reachable), so the
    identity channel outputs the ideal states exactly and the relative error
    vanishes. The environment dimension equals d^M.
    """
    n_in = int(n_in)
    n_out = int(n_out)
    if n_in < 1 or n_out <= n_in:
        raise OutOfRange(f"need n_out > n_in >= 1, got {n_in} -> {n_out}")
    m_extra = n_out - n_in
    blank1 = tensor_power(rho1, m_extra)
    blank2 = tensor_power(rho2, m_extra)
    y1, y2 = purifications_with_overlap(blank1, blank2, phi)
    env_dim = rho1.dim ** m_extra
    total = rho1.dim ** n_out * env_dim
    return CloningSetup(rho1, rho2, y1.density(), y2.density(),
                        np.eye(total, dtype=complex), n_in, n_out, env_dim)
