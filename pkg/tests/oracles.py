"""Independent reference implementations the tests check the package against.

Everything here deliberately avoids the package's own code paths: fidelity
goes through scipy's sqrtm instead of singular values, the partial trace is
an explicit index loop, matrix exponentials come from scipy, and the
purification-overlap maximum is found variationally with a generic
optimizer rather than in closed form.
"""

import numpy as np
import scipy.linalg as sla
import scipy.optimize


def fidelity_sqrtm(a: np.ndarray, b: np.ndarray) -> float:
    """(Tr sqrt(sqrt(a) b sqrt(a)))^2 evaluated literally via scipy.sqrtm."""
    s = sla.sqrtm(a)
    inner = sla.sqrtm(s @ b @ s)
    return float(np.real(np.trace(inner))) ** 2


def partial_trace_loop(m: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace by explicit index loops; keep is a set of positions."""
    dims = [int(x) for x in dims]
    keep = sorted(keep)
    traced = [i for i in range(len(dims)) if i not in keep]
    kd = int(np.prod([dims[i] for i in keep])) if keep else 1
    t = m.reshape(dims + dims)
    out = np.zeros((kd, kd), dtype=complex)
    for row in np.ndindex(*[dims[i] for i in keep]) if keep else [()]:
        for col in np.ndindex(*[dims[i] for i in keep]) if keep else [()]:
            acc = 0.0 + 0.0j
            for tr in np.ndindex(*[dims[i] for i in traced]) if traced else [()]:
                left = [0] * len(dims)
                right = [0] * len(dims)
                for pos, v in zip(keep, row):
                    left[pos] = v
                for pos, v in zip(keep, col):
                    right[pos] = v
                for pos, v in zip(traced, tr):
                    left[pos] = v
                    right[pos] = v
                acc += t[tuple(left) + tuple(right)]
            r = int(np.ravel_multi_index(row, [dims[i] for i in keep])) if keep else 0
            c = int(np.ravel_multi_index(col, [dims[i] for i in keep])) if keep else 0
            out[r, c] = acc
    return out


def expm_scipy(h: np.ndarray) -> np.ndarray:
    return sla.expm(1j * h)


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    g = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    q, r = np.linalg.qr(g)
    rd = np.diagonal(r)
    return q * (rd / np.abs(rd))


def random_density(rng: np.random.Generator, d: int, rank: int) -> np.ndarray:
    g = (rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank)))
    m = g @ g.conj().T
    return m / np.real(np.trace(m))


def _purification(rho: np.ndarray, env_dim: int) -> np.ndarray:
    w, u = np.linalg.eigh(rho)
    w = np.clip(w, 0.0, None)
    d = rho.shape[0]
    y = np.zeros(d * env_dim, dtype=complex)
    for i in range(d):
        y += np.sqrt(w[i]) * np.kron(u[:, i], _basis(env_dim, i))
    return y / np.linalg.norm(y)


def _basis(d: int, i: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def _env_unitary(params: np.ndarray, d: int) -> np.ndarray:
    h = np.zeros((d, d), dtype=complex)
    n_off = d * (d - 1) // 2
    iu = np.triu_indices(d, 1)
    h[iu] = params[d:d + n_off] + 1j * params[d + n_off:]
    h = h + h.conj().T + np.diag(params[:d])
    return sla.expm(1j * h)


def variational_max_overlap(rho1: np.ndarray, rho2: np.ndarray,
                            n_starts: int = 8, seed: int = 0) -> float:
    """max_V |<y1|(1 (x) V)|y2>| over env unitaries, by generic optimization.

    The fidelity definition as maximal purification overlap, evaluated the
    expensive way. env dim equals the system dim, enough for any marginal.
    """
    d = rho1.shape[0]
    y1 = _purification(rho1, d)
    y2 = _purification(rho2, d)
    eye = np.eye(d)
    rng = np.random.default_rng(seed)

    def neg_overlap(params):
        v = _env_unitary(params, d)
        return -abs(np.vdot(y1, np.kron(eye, v) @ y2))

    best = 0.0
    for start in range(n_starts):
        x0 = (np.zeros(d * d) if start == 0
              else rng.uniform(-np.pi, np.pi, d * d))
        res = scipy.optimize.minimize(neg_overlap, x0, method="L-BFGS-B")
        best = max(best, -float(res.fun))
    return best
