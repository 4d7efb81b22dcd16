"""Finite-order operator monotonicity trials in the Loewner order.

A function f is matrix monotone of order n when A <= B (B - A positive
semi-definite) implies f(A) <= f(B) for Hermitian A, B with spectra in
the domain.  The harness samples random ordered pairs, applies f through
the eigendecomposition functional calculus and checks the smallest
eigenvalue of f(B) - f(A) against a noise floor tied to ||f(B)||.

Eigenvalues come from a cyclic complex Jacobi sweep (cap 30 sweeps),
adequate for the n <= 8 matrices used here.  Randomness is counter-based
(Philox keyed by (seed, trial)), so trial i is reproducible in isolation
and independent of scheduling.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import FunctionId, scalar_function

__all__ = [
    "ConvergenceError",
    "LoewnerTrial",
    "OperatorMonotoneReport",
    "hermitian_eig",
    "matrix_apply",
    "sample_ordered_pair",
    "check_operator_monotone",
    "trial_log_csv",
]

MAX_DIM = 8
_SWEEP_CAP = 30


class ConvergenceError(RuntimeError):
    """Jacobi sweep cap exhausted."""


def _check_hermitian(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("need a square matrix")
    if A.shape[0] > MAX_DIM:
        raise ValueError(f"dimension capped at {MAX_DIM}")
    if not np.allclose(A, A.conj().T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(A).max())):
        raise ValueError("matrix is not Hermitian")
    return 0.5 * (A + A.conj().T)


def hermitian_eig(A: np.ndarray, tol: float = 1e-13):
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.

    Returns (eigenvalues descending, unitary U) with A = U diag(w) U^H.
    """
    A = _check_hermitian(A)
    n = A.shape[0]
    M = A.copy()
    U = np.eye(n, dtype=complex)
    if n == 1:
        return M.real.diagonal().copy(), U
    norm = np.linalg.norm(A)
    for _ in range(_SWEEP_CAP):
        off = np.linalg.norm(M - np.diag(np.diag(M)))
        if off <= tol * max(norm, 1e-300):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = M[p, q]
                if abs(a) <= 1e-300:
                    continue
                phase = a / abs(a)
                tau = (M[q, q].real - M[p, p].real) / (2.0 * abs(a))
                if abs(tau) > 1e8:
                    t = 1.0 / (2.0 * tau)       # avoids tau^2 overflow
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # columns/rows p,q rotation with complex phase
                rp = M[:, p].copy()
                rq = M[:, q].copy()
                M[:, p] = c * rp - s * np.conj(phase) * rq
                M[:, q] = s * phase * rp + c * rq
                rp = M[p, :].copy()
                rq = M[q, :].copy()
                M[p, :] = c * rp - s * phase * rq
                M[q, :] = s * np.conj(phase) * rp + c * rq
                up = U[:, p].copy()
                uq = U[:, q].copy()
                U[:, p] = c * up - s * np.conj(phase) * uq
                U[:, q] = s * phase * up + c * uq
    else:
        raise ConvergenceError("Jacobi sweeps did not converge")
    w = np.real(np.diag(M))
    order = np.argsort(w)[::-1]
    return w[order], U[:, order]


def matrix_apply(fn, A: np.ndarray) -> np.ndarray:
    """f(A) = U f(D) U^H; spectrum must lie in (0, oo)."""
    w, U = hermitian_eig(A)
    if np.any(w <= 0.0):
        raise ValueError("spectrum must be positive for this function family")
    f = scalar_function(fn) if isinstance(fn, (FunctionId, str)) else fn
    fw = np.asarray(f(w), dtype=float)
    out = (U * fw) @ U.conj().T
    return 0.5 * (out + out.conj().T)


def _rng_for(seed: int, stream: int) -> np.random.Generator:
    # counter-based: each (seed, trial) pair keys an independent stream
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def sample_ordered_pair(n: int, seed: int, spectrum: tuple = (0.05, 20.0),
                        stream: int = 0, cluster: bool = False):
    """Random Hermitian pair A <= B with spec(A) in [a, b], spec(B) in (0, 2b].

    B = A + V diag(c) V^H with 0 <= c <= b, so B - A is positive
    semi-definite by construction.  `cluster` squeezes two eigenvalues of
    A within 1e-6 to stress near-degenerate spectra.
    """
    a, b = spectrum
    if not (0 < a < b):
        raise ValueError("need 0 < a < b")
    if n > MAX_DIM:
        raise ValueError(f"dimension capped at {MAX_DIM}")
    rng = _rng_for(seed, stream)
    lam = rng.uniform(a, b, n)
    if cluster and n >= 2:
        lam[1] = lam[0] + 1e-6 * rng.uniform(-1.0, 1.0)
        lam[1] = min(max(lam[1], a), b)
    V = _random_unitary(rng, n)
    A = (V * lam) @ V.conj().T
    W = _random_unitary(rng, n)
    c = rng.uniform(0.0, b, n)
    C = (W * c) @ W.conj().T
    A = 0.5 * (A + A.conj().T)
    B = A + 0.5 * (C + C.conj().T)
    return A, B


@dataclass(frozen=True)
class LoewnerTrial:
    trial: int
    dim: int
    seed: int
    min_eig: float
    norm_fB: float
    passed: bool
    cluster: bool = False


@dataclass
class OperatorMonotoneReport:
    fn: str
    dim: int
    trials: int
    seed: int
    tol: float
    passed: bool
    worst: float
    failures: list = field(default_factory=list)
    log: list = field(default_factory=list)


def check_operator_monotone(fn, n: int, trials: int, seed: int,
                            tol: float = 1e-8,
                            spectrum: tuple = (0.05, 20.0)) -> OperatorMonotoneReport:
    """Random Loewner-order trials of f at matrix order n.

    Every 20th trial clusters two eigenvalues.  A trial passes when
    min_eig(f(B) - f(A)) >= -tol * ||f(B)||; failures keep (seed, trial)
    for exact reproduction.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if isinstance(fn, (FunctionId, str)):
        label = FunctionId(fn).value
        f = scalar_function(fn)
    else:
        label = getattr(fn, "__name__", str(fn))
        f = fn
    report = OperatorMonotoneReport(fn=label, dim=n, trials=trials, seed=seed,
                                    tol=tol, passed=True, worst=np.inf)
    for i in range(trials):
        cluster = (i % 20) == 19
        A, B = sample_ordered_pair(n, seed, stream=i, cluster=cluster,
                                   spectrum=spectrum)
        try:
            fA = matrix_apply(f, A)
            fB = matrix_apply(f, B)
        except (ValueError, ConvergenceError) as exc:
            report.failures.append({"trial": i, "error": str(exc)})
            report.passed = False
            continue
        diff = fB - fA
        diff = 0.5 * (diff + diff.conj().T)
        w, _ = hermitian_eig(diff)
        min_eig = float(w[-1])
        w_fB, _ = hermitian_eig(fB)
        norm_fB = float(np.max(np.abs(w_fB)))
        ok = min_eig >= -tol * norm_fB
        report.log.append(LoewnerTrial(trial=i, dim=n, seed=seed,
                                       min_eig=min_eig, norm_fB=norm_fB,
                                       passed=ok, cluster=cluster))
        report.worst = min(report.worst, min_eig / max(norm_fB, 1e-300))
        if not ok:
            report.passed = False
            report.failures.append({"trial": i, "min_eig": min_eig,
                                    "norm_fB": norm_fB, "seed": seed})
    return report


def trial_log_csv(report: OperatorMonotoneReport) -> str:
    buf = io.StringIO()
    buf.write("trial,dim,seed,min_eig,norm_fB,pass\n")
    for t in report.log:
        buf.write(f"{t.trial},{t.dim},{t.seed},{t.min_eig!r},{t.norm_fB!r},"
                  f"{'true' if t.passed else 'false'}\n")
    return buf.getvalue()
