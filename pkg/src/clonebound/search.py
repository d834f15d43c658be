"""Unitary search for low-error cloners, randomized inequality checks, sweeps.

The optimizer is deliberately gradient-free: unitaries are parameterized as
exp(i H) with H Hermitian built from d^2 real parameters, and refined by
random-coordinate perturbations with a decaying step, keeping a move only
when it lowers the relative error. Every single evaluation is compared
against the closed-form lower bound; dipping below it raises instead of
reporting, because the bound is a theorem.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .cloning import (
    SOUNDNESS_TOL,
    CloningSetup,
    lower_bound,
    tensor_power,
    _ideal_sine,
)
from .errors import BudgetZero, OutOfRange, SoundnessViolation
from .measure import POVM, _random_povm_matrices, probabilities, projector_gap
from .serialize import matrix_to_entries, vector_to_entries
from .states import (
    DensityMatrix,
    PureState,
    _ginibre,
    _random_density_matrix,
    angle,
    angle_pure,
    fidelity,
)

SLACK = 1e-9


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class OptimizerConfig:
    """Budget and seeding for the unitary search."""

    restarts: int = 4
    iterations: int = 500
    initial_step: float = 0.5
    step_decay: float = 0.9
    seed: int = 0
    convergence_tol: float = 1e-9

    def __post_init__(self):
        if int(self.restarts) < 1 or int(self.iterations) < 1:
            raise BudgetZero(
                f"restarts={self.restarts}, iterations={self.iterations} "
                "must both be >= 1"
            )
        if not self.initial_step > 0.0:
            raise OutOfRange(f"initial_step {self.initial_step} must be > 0")
        if not 0.0 < self.step_decay < 1.0:
            raise OutOfRange(f"step_decay {self.step_decay} outside (0, 1)")
        if not self.convergence_tol > 0.0:
            raise OutOfRange(f"convergence_tol {self.convergence_tol} must be > 0")
        if int(self.seed) < 0:
            raise OutOfRange(f"seed {self.seed} must be >= 0")

    def to_dict(self) -> dict:
        return {
            "restarts": self.restarts,
            "iterations": self.iterations,
            "initial_step": self.initial_step,
            "step_decay": self.step_decay,
            "seed": self.seed,
            "convergence_tol": self.convergence_tol,
        }


@dataclass
class SearchResult:
    """Best unitary found, its relative error, and the bound it must respect."""

    best_v: np.ndarray
    best_r: float
    bound: float
    gap: float
    f: float
    phi: float
    n_in: int
    n_out: int
    env_dim: int
    evaluations: int
    restart_traces: list[list[float]]
    config: OptimizerConfig

    def to_dict(self) -> dict:
        return {
            "best_r": self.best_r,
            "bound": self.bound,
            "gap": self.gap,
            "f": self.f,
            "phi": self.phi,
            "n_in": self.n_in,
            "n_out": self.n_out,
            "env_dim": self.env_dim,
            "evaluations": self.evaluations,
            "restart_traces": self.restart_traces,
            "config": self.config.to_dict(),
            "best_v": {
                "dim": self.best_v.shape[0],
                "entries": matrix_to_entries(self.best_v),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _sqrt_raw(m: np.ndarray) -> np.ndarray:
    # same null-space noise cutoff as the validated sqrt, minus the checks
    w, u = np.linalg.eigh((m + m.conj().T) / 2.0)
    w = np.clip(w, 0.0, None)
    w[w < 1e-14 * max(w[-1], 0.0)] = 0.0
    return (u * np.sqrt(w)) @ u.conj().T


def _hermitian_from(params: np.ndarray, dim: int, iu) -> np.ndarray:
    n_off = dim * (dim - 1) // 2
    off = np.zeros((dim, dim), dtype=complex)
    off[iu] = params[dim:dim + n_off] + 1j * params[dim + n_off:]
    return off + off.conj().T + np.diag(params[:dim].astype(complex))


class _CloneObjective:
    """Precomputed pieces of the relative-error evaluation for one problem."""

    def __init__(self, rho1, rho2, upsilon1, upsilon2, n_in, n_out, env_dim):
        d = rho1.dim
        self.out_dim = d ** n_out
        self.env_dim = env_dim
        self.total_dim = self.out_dim * env_dim
        self.in1 = linalg.kron(tensor_power(rho1, n_in).matrix, upsilon1.matrix)
        self.in2 = linalg.kron(tensor_power(rho2, n_in).matrix, upsilon2.matrix)
        self.sqrt_ideal1 = _sqrt_raw(tensor_power(rho1, n_out).matrix)
        self.sqrt_ideal2 = _sqrt_raw(tensor_power(rho2, n_out).matrix)
        self.denominator, self.f = _ideal_sine(rho1, rho2, n_out)
        self.phi = math.sqrt(fidelity(upsilon1, upsilon2))
        self.bound = lower_bound(self.f, self.phi, n_in, n_out)

    def _branch_sine(self, v, inp, sqrt_ideal) -> float:
        evolved = v @ inp @ v.conj().T
        o, e = self.out_dim, self.env_dim
        red = evolved.reshape(o, e, o, e).trace(axis1=1, axis2=3)
        s = np.linalg.svd(_sqrt_raw(red) @ sqrt_ideal, compute_uv=False)
        fid = min(max(float(np.sum(s)) ** 2, 0.0), 1.0)
        return math.sqrt(1.0 - fid)  # sin(arccos(sqrt(fid)))

    def __call__(self, v: np.ndarray) -> float:
        r = (self._branch_sine(v, self.in1, self.sqrt_ideal1)
             + self._branch_sine(v, self.in2, self.sqrt_ideal2)) / self.denominator
        if r < self.bound - SOUNDNESS_TOL:
            raise SoundnessViolation(
                f"evaluated relative error {r} below bound {self.bound}"
            )
        return r


def minimize_relative_error(rho1: DensityMatrix, rho2: DensityMatrix,
                            upsilon1: DensityMatrix, upsilon2: DensityMatrix,
                            dims: tuple = (1, 2, None),
                            cfg: OptimizerConfig | None = None) -> SearchResult:
    """Search the joint unitary group for the lowest relative error.

    ``dims`` is (n_in, n_out, env_dim); a None env_dim is inferred from the
    ancilla dimension. Restart r draws its generator from (seed, r), so runs
    are reproducible and restarts could run in any order; the winner is the
    strictly smallest best value with ties going to the earlier restart.
    """
    cfg = cfg or OptimizerConfig()
    n_in, n_out, env_dim = dims
    n_in, n_out = int(n_in), int(n_out)
    d = rho1.dim
    if env_dim is None:
        m_extra_dim = d ** (n_out - n_in) if n_out > n_in else 1
        if upsilon1.dim % m_extra_dim:
            raise OutOfRange(
                f"ancilla dim {upsilon1.dim} not divisible by d^M = {m_extra_dim}"
            )
        env_dim = upsilon1.dim // m_extra_dim
    env_dim = int(env_dim)
    # validates every dimension relation up front
    total = d ** n_out * env_dim
    CloningSetup(rho1, rho2, upsilon1, upsilon2, np.eye(total, dtype=complex),
                 n_in, n_out, env_dim)

    objective = _CloneObjective(rho1, rho2, upsilon1, upsilon2,
                                n_in, n_out, env_dim)
    n_params = total * total
    iu = np.triu_indices(total, 1)

    def unitary_of(params: np.ndarray) -> np.ndarray:
        w, u = np.linalg.eigh(_hermitian_from(params, total, iu))
        return (u * np.exp(1j * w)) @ u.conj().T

    best_r = None
    best_params = None
    traces: list[list[float]] = []
    evaluations = 0
    fail_limit = max(8, n_params // 8)

    for ridx in range(int(cfg.restarts)):
        rng = np.random.default_rng([int(cfg.seed), ridx])
        if ridx == 0:
            params = np.zeros(n_params)  # identity start
        else:
            params = rng.uniform(-np.pi, np.pi, n_params)
        cur = objective(unitary_of(params))
        evaluations += 1
        trace = [cur]
        step = float(cfg.initial_step)
        fails = 0
        for _ in range(int(cfg.iterations)):
            if step < cfg.convergence_tol:
                break
            k = int(rng.integers(n_params))
            sign = -1.0 if rng.random() < 0.5 else 1.0
            cand = params.copy()
            cand[k] += sign * step
            r = objective(unitary_of(cand))
            evaluations += 1
            if r < cur:
                params, cur = cand, r
                fails = 0
            else:
                fails += 1
                if fails >= fail_limit:
                    step *= cfg.step_decay
                    fails = 0
            trace.append(cur)
        traces.append(trace)
        if best_r is None or cur < best_r:
            best_r, best_params = cur, params

    if best_r < objective.bound - SOUNDNESS_TOL:
        raise SoundnessViolation(
            f"best relative error {best_r} below bound {objective.bound}"
        )
    return SearchResult(
        best_v=unitary_of(best_params),
        best_r=best_r,
        bound=objective.bound,
        gap=best_r - objective.bound,
        f=objective.f,
        phi=objective.phi,
        n_in=n_in,
        n_out=n_out,
        env_dim=env_dim,
        evaluations=evaluations,
        restart_traces=traces,
        config=cfg,
    )


def restricted_cloner_search(rho1: DensityMatrix, rho2: DensityMatrix,
                             cfg: OptimizerConfig | None = None) -> SearchResult:
    """Search restricted to two-register unitaries with a pure blank ancilla.

    The channel acts on the input register and one blank register prepared
    in |0><0|, with no environment at all; the reported gap is measured
    against the phi = 1 bound f - f^2/sqrt(1+f^2).
    """
    d = rho1.dim
    if d > 4:
        raise OutOfRange(f"restricted search supports d <= 4, got {d}")
    blank = np.zeros((d, d), dtype=complex)
    blank[0, 0] = 1.0
    ups = DensityMatrix(blank)
    return minimize_relative_error(rho1, rho2, ups, ups, dims=(1, 2, 1), cfg=cfg)


@dataclass
class InequalityCheck:
    """Randomized-trial record for one inequality family."""

    name: str
    trials: int
    violations: int
    max_margin: float  # largest lhs - rhs seen; a violation exceeds the slack
    worst_case: dict

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "max_margin": self.max_margin,
            "worst_case": self.worst_case,
        }


@dataclass
class VerificationReport:
    """Outcome of the randomized inequality suite at one dimension."""

    d: int
    trials: int
    seed: int
    slack: float
    checks: list[InequalityCheck] = field(default_factory=list)

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)

    @property
    def max_slack_violation(self) -> float:
        return max(c.max_margin for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "slack": self.slack,
            "violations": self.violations,
            "max_slack_violation": self.max_slack_violation,
            "checks": [c.to_dict() for c in self.checks],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VerificationReport":
        report = cls(d=doc["d"], trials=doc["trials"], seed=doc["seed"],
                     slack=doc["slack"])
        for c in doc["checks"]:
            report.checks.append(InequalityCheck(
                c["name"], c["trials"], c["violations"], c["max_margin"],
                c["worst_case"]))
        return report

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        lines = ["d,seed,slack,inequality,trials,violations,max_margin"]
        for c in self.checks:
            lines.append(",".join([
                str(self.d), str(self.seed), _fmt17(self.slack), c.name,
                str(c.trials), str(c.violations), _fmt17(c.max_margin),
            ]))
        return "\n".join(lines) + "\n"


def _haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(_ginibre(rng, d, d))
    rd = np.diagonal(r)
    return q * (rd / np.abs(rd))


def _random_pure(rng: np.random.Generator, d: int) -> PureState:
    v = _ginibre(rng, d, 1).reshape(-1)
    return PureState(v / np.linalg.norm(v))


def verify_inequalities(d: int, trials: int, seed: int) -> VerificationReport:
    """Randomized check of the four core inequalities at dimension d.

    Families: the angle triangle inequality on state triples; the fidelity
    difference bound |F(chi,rho) - F(omega,rho)| <= sin(angle); the
    probability deviation bound over random 2-5 outcome POVMs; and the
    projector gap bound for pure states. Margins are lhs - rhs, so any value
    above the slack counts as a violation; the worst inputs are serialized
    into the report.
    """
    d = int(d)
    trials = int(trials)
    seed = int(seed)
    if not 2 <= d <= 6:
        raise OutOfRange(f"d={d} outside [2, 6]")
    if trials < 1:
        raise OutOfRange(f"trials={trials} must be >= 1")
    if seed < 0:
        raise OutOfRange(f"seed {seed} must be >= 0")
    rng = np.random.default_rng([seed, d])
    report = VerificationReport(d=d, trials=trials, seed=seed, slack=SLACK)

    def rand_state() -> DensityMatrix:
        rank = int(rng.integers(1, d + 1))
        return DensityMatrix(_random_density_matrix(rng, d, rank))

    def triangle_trial():
        chi, omega, rho = rand_state(), rand_state(), rand_state()
        margin = angle(chi, omega) - (angle(chi, rho) + angle(omega, rho))
        return margin, {"chi": chi.to_dict(), "omega": omega.to_dict(),
                        "rho": rho.to_dict()}

    def fidelity_gap_trial():
        chi, omega, rho = rand_state(), rand_state(), rand_state()
        margin = (abs(fidelity(chi, rho) - fidelity(omega, rho))
                  - math.sin(angle(chi, omega)))
        return margin, {"chi": chi.to_dict(), "omega": omega.to_dict(),
                        "rho": rho.to_dict()}

    def probability_gap_trial():
        outcomes = int(rng.integers(2, 6))
        povm = POVM(_random_povm_matrices(rng, d, outcomes))
        chi, omega = rand_state(), rand_state()
        p = probabilities(povm, chi)
        q = probabilities(povm, omega)
        margin = (max(abs(a - b) for a, b in zip(p, q))
                  - math.sin(angle(chi, omega)))
        return margin, {"povm": povm.to_dict(), "chi": chi.to_dict(),
                        "omega": omega.to_dict()}

    def projector_gap_trial():
        x, y = _random_pure(rng, d), _random_pure(rng, d)
        basis = _haar_unitary(rng, d)
        rank = int(rng.integers(1, d + 1))
        proj = basis[:, :rank] @ basis[:, :rank].conj().T
        margin = projector_gap(x, y, proj) - math.sin(angle_pure(x, y))
        return margin, {
            "x": {"dim": d, "amp": vector_to_entries(x.amp)},
            "y": {"dim": d, "amp": vector_to_entries(y.amp)},
            "projector": {"dim": d, "entries": matrix_to_entries(proj)},
        }

    families = [
        ("angle_triangle", triangle_trial),
        ("fidelity_difference", fidelity_gap_trial),
        ("probability_deviation", probability_gap_trial),
        ("projector_gap", projector_gap_trial),
    ]
    for name, trial in families:
        violations = 0
        max_margin = -math.inf
        worst: dict = {}
        for _ in range(trials):
            margin, inputs = trial()
            if margin > max_margin:
                max_margin = margin
                worst = inputs
            if margin > SLACK:
                violations += 1
        report.checks.append(InequalityCheck(name, trials, violations,
                                             max_margin, worst))
    return report


@dataclass
class SweepRow:
    """One bound evaluation along an f grid."""

    f: float
    phi: float
    n_in: int
    n_out: int
    bound: float


def sweep_bound(f_grid, phi: float, n_in: int = 1, n_out: int = 2) -> list[SweepRow]:
    """Evaluate the lower bound along a grid of f values at fixed phi."""
    phi = float(phi)
    if not 0.0 <= phi <= 1.0:
        raise OutOfRange(f"phi={phi} outside [0, 1]")
    rows = []
    for f in f_grid:
        f = float(f)
        if not 0.0 <= f < 1.0:
            raise OutOfRange(f"grid value f={f} outside [0, 1)")
        rows.append(SweepRow(f, phi, int(n_in), int(n_out),
                             lower_bound(f, phi, n_in, n_out)))
    return rows


def sweep_to_csv(rows: list[SweepRow]) -> str:
    """CSV with a header row and 17-significant-digit doubles."""
    lines = ["f,phi,n_in,n_out,bound"]
    for r in rows:
        lines.append(",".join([
            _fmt17(r.f), _fmt17(r.phi), str(r.n_in), str(r.n_out),
            _fmt17(r.bound),
        ]))
    return "\n".join(lines) + "\n"


def sweep_to_json(rows: list[SweepRow]) -> str:
    return json.dumps([vars(r) for r in rows], indent=2)
