"""Rank-K non-negative canonical polyadic (CP) decomposition of a third-order
tensor by multiplicative updates minimising the beta-divergence.

The tensor C (F1 x F2 x M) is approximated by sum_k w_k o h_k o q_k with all
factors non-negative.  One update sweep refreshes W, then H, then Q, each
time against the current reconstruction; beta = 1 corresponds to a squared
Euclidean fit, beta = 0 to Kullback-Leibler, beta = -1 to Itakura-Saito.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .dependence import DependenceTensor
from .errors import NumericalError, ParameterError

#: Default floor applied to reconstruction entries inside update ratios and
#: to both arguments of the beta <= 0 divergence branches.
DEFAULT_EPSILON = 1e-12

_TINY = np.finfo(np.float64).tiny


@dataclass(frozen=True)
class NtfConfig:
    """Solver settings.

    ``beta`` must be -1, 0, or a positive real.  The iteration stops after
    ``max_iterations`` sweeps or once the objective has dropped by less than
    ``relative_objective_tolerance`` (relatively) over a 10-sweep window.
    With ``restarts > 1`` the decomposition runs from several seeded
    initialisations and keeps the lowest-objective result (first run wins
    ties).
    """

    rank: int = 4
    beta: float = -1.0
    max_iterations: int = 1000
    relative_objective_tolerance: float = 1e-8
    epsilon_floor: float = DEFAULT_EPSILON
    rng_seed: int = 0
    restarts: int = 1

    def __post_init__(self) -> None:
        if self.rank < 1:
            raise ParameterError("rank must be >= 1")
        beta = float(self.beta)
        if beta not in (-1.0, 0.0) and beta <= 0.0:
            raise ParameterError("beta must be -1, 0, or a positive real")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")
        if self.relative_objective_tolerance < 0:
            raise ParameterError("relative_objective_tolerance must be >= 0")
        if self.epsilon_floor <= 0:
            raise ParameterError("epsilon_floor must be > 0")
        if self.restarts < 1:
            raise ParameterError("restarts must be >= 1")
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class NtfFactors:
    """Result of a decomposition: factor matrices plus the objective trace."""

    W: np.ndarray  # (F1, K)
    H: np.ndarray  # (F2, K)
    Q: np.ndarray  # (M, K)
    objective_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))
    iterations_run: int = 0
    beta: float = -1.0
    freq_bins: np.ndarray | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        w = np.asarray(self.W, dtype=np.float64)
        h = np.asarray(self.H, dtype=np.float64)
        q = np.asarray(self.Q, dtype=np.float64)
        for name, m in (("W", w), ("H", h), ("Q", q)):
            if m.ndim != 2:
                raise ParameterError(f"{name} must be a matrix")
            if not np.all(np.isfinite(m)) or np.any(m < 0):
                raise ParameterError(f"{name} must be finite and non-negative")
        if not w.shape[1] == h.shape[1] == q.shape[1]:
            raise ParameterError("factor matrices must share the same rank")
        trace = np.asarray(self.objective_trace, dtype=np.float64)
        object.__setattr__(self, "W", w)
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "objective_trace", trace)

    @property
    def rank(self) -> int:
        return self.W.shape[1]

    def reconstruct(self) -> np.ndarray:
        """Dense reconstruction sum_k w_k o h_k o q_k."""
        return np.einsum("ik,jk,mk->ijm", self.W, self.H, self.Q)


def _tensor_values(c) -> np.ndarray:
    if isinstance(c, DependenceTensor):
        return c.values
    values = np.ascontiguousarray(c, dtype=np.float64)
    if values.ndim != 3:
        raise ParameterError("expected a third-order tensor")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        raise ParameterError("tensor entries must be finite and non-negative")
    return values


def _unfoldings(values: np.ndarray) -> list[np.ndarray]:
    f1, f2, m = values.shape
    x1 = values.reshape(f1, f2 * m)
    x2 = np.ascontiguousarray(values.transpose(1, 0, 2)).reshape(f2, f1 * m)
    x3 = np.ascontiguousarray(values.transpose(2, 0, 1)).reshape(m, f1 * f2)
    return [x1, x2, x3]


def _khatri_rao(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Row (i, j) of the result is a[i] * b[j], with j varying fastest,
    # matching the column order of the unfoldings above.
    return (a[:, None, :] * b[None, :, :]).reshape(-1, a.shape[1])


def _update_factor(x, factor, kr, beta, eps, chat) -> None:
    """Multiplicative update of one factor matrix, in place.

    Implements factor <- factor * [(x * chat^(beta-1)) kr] / [chat^beta kr]
    with the reconstruction ``chat`` floored at ``eps``.  The exponentials
    are specialised for beta in {-1, 0, 1}.
    """
    np.matmul(factor, kr.T, out=chat)
    np.maximum(chat, eps, out=chat)
    if beta == 1.0:
        den = chat @ kr
        num = x @ kr
    elif beta == 0.0:
        den = np.broadcast_to(kr.sum(axis=0), factor.shape)
        np.divide(x, chat, out=chat)
        num = chat @ kr
    elif beta == -1.0:
        np.reciprocal(chat, out=chat)
        den = chat @ kr
        np.multiply(chat, chat, out=chat)
        chat *= x
        num = chat @ kr
    else:
        powered = np.power(chat, beta - 1.0)
        np.multiply(powered, chat, out=chat)  # chat^beta
        den = chat @ kr
        powered *= x
        num = powered @ kr
    factor *= num
    factor /= np.maximum(den, _TINY)


def _sweep(unfolds, w, h, q, beta, eps, bufs) -> None:
    _update_factor(unfolds[0], w, _khatri_rao(h, q), beta, eps, bufs[0])
    _update_factor(unfolds[1], h, _khatri_rao(w, q), beta, eps, bufs[1])
    _update_factor(unfolds[2], q, _khatri_rao(w, h), beta, eps, bufs[2])


def _divergence(x, chat, beta, eps) -> float:
    """Beta-divergence between ``x`` and ``chat``, summed over entries.

    For beta <= 0 both arguments are floored at ``eps`` so the value stays
    finite in the presence of zeros; an exact fit still scores 0.
    """
    if beta == 1.0:
        value = np.sum(x * (x - chat) - (x * x - chat * chat) / 2.0)
    elif beta == 0.0:
        cx = np.maximum(x, eps)
        ch = np.maximum(chat, eps)
        value = np.sum(cx * np.log(cx / ch) - cx + ch)
    elif beta == -1.0:
        r = np.maximum(x, eps) / np.maximum(chat, eps)
        value = np.sum(r - np.log(r) - 1.0)
    else:
        bp1 = beta + 1.0
        value = np.sum(
            x * (x**beta - chat**beta) / beta - (x**bp1 - chat**bp1) / bp1
        )
    value = float(value)
    if not np.isfinite(value):
        raise NumericalError("beta-divergence is not finite")
    return value


def beta_divergence(c, factors: NtfFactors, beta: float) -> float:
    """Beta-divergence between tensor ``c`` and the factors' reconstruction.

    ``c`` may be a :class:`~faultband.dependence.DependenceTensor` or a raw
    non-negative array.
    """
    values = _tensor_values(c)
    chat = factors.reconstruct()
    if chat.shape != values.shape:
        raise ParameterError(
            f"factors reconstruct to {chat.shape}, tensor is {values.shape}"
        )
    return _divergence(values, chat, float(beta), DEFAULT_EPSILON)


def update_step(
    c, factors: NtfFactors, beta: float, epsilon_floor: float = DEFAULT_EPSILON
) -> NtfFactors:
    """One multiplicative sweep: update W, then H, then Q.

    The reconstruction is refreshed between factor updates.  Inputs are not
    modified; strictly positive factors are expected (zero entries are
    absorbing for multiplicative rules).
    """
    values = _tensor_values(c)
    beta = float(beta)
    if beta not in (-1.0, 0.0) and beta <= 0.0:
        raise ParameterError("beta must be -1, 0, or a positive real")
    w = factors.W.copy()
    h = factors.H.copy()
    q = factors.Q.copy()
    if (w.shape[0], h.shape[0], q.shape[0]) != values.shape:
        raise ParameterError("factor dimensions do not match the tensor")
    unfolds = _unfoldings(values)
    bufs = [np.empty_like(u) for u in unfolds]
    _sweep(unfolds, w, h, q, beta, epsilon_floor, bufs)
    freq_bins = c.freq_bins if isinstance(c, DependenceTensor) else factors.freq_bins
    return NtfFactors(
        W=w,
        H=h,
        Q=q,
        objective_trace=factors.objective_trace,
        iterations_run=factors.iterations_run,
        beta=beta,
        freq_bins=freq_bins,
        seed=factors.seed,
    )


def decompose(c, config: NtfConfig = NtfConfig()) -> NtfFactors:
    """Factorise tensor ``c`` under ``config``.

    Runs multiplicative sweeps from a seeded uniform-on-(0.1, 1.1)
    initialisation until ``max_iterations`` or until the relative objective
    drop over a 10-sweep window falls below the configured tolerance.
    ``objective_trace[0]`` is the divergence of the initial guess and one
    value is appended per sweep.  After convergence each column of H is
    rescaled to unit maximum (compensated in W) so the columns can serve as
    comparable per-frequency selector curves.
    """
    values = _tensor_values(c)
    f1, f2, m = values.shape
    unfolds = _unfoldings(values)
    bufs = [np.empty_like(u) for u in unfolds]
    beta = config.beta
    eps = config.epsilon_floor
    tol = config.relative_objective_tolerance

    best: tuple[np.ndarray, np.ndarray, np.ndarray, list[float]] | None = None
    for child in np.random.SeedSequence(config.rng_seed).spawn(config.restarts):
        rng = np.random.default_rng(child)
        w = rng.uniform(0.1, 1.1, size=(f1, config.rank))
        h = rng.uniform(0.1, 1.1, size=(f2, config.rank))
        q = rng.uniform(0.1, 1.1, size=(m, config.rank))

        np.matmul(w, _khatri_rao(h, q).T, out=bufs[0])
        trace = [_divergence(unfolds[0], bufs[0], beta, eps)]
        for _ in range(config.max_iterations):
            _sweep(unfolds, w, h, q, beta, eps, bufs)
            np.matmul(w, _khatri_rao(h, q).T, out=bufs[0])
            trace.append(_divergence(unfolds[0], bufs[0], beta, eps))
            if len(trace) > 10 and tol > 0:
                prev, cur = trace[-11], trace[-1]
                if prev - cur < tol * max(abs(prev), _TINY):
                    break
        if best is None or trace[-1] < best[3][-1]:
            best = (w, h, q, trace)

    w, h, q, trace = best
    scale = h.max(axis=0)
    positive = scale > 0
    h[:, positive] /= scale[positive]
    w[:, positive] *= scale[positive]
    return NtfFactors(
        W=w,
        H=h,
        Q=q,
        objective_trace=np.asarray(trace),
        iterations_run=len(trace) - 1,
        beta=beta,
        freq_bins=c.freq_bins.copy() if isinstance(c, DependenceTensor) else None,
        seed=config.rng_seed,
    )


def export_factors(factors: NtfFactors, out_dir: str, stem: str = "factors") -> None:
    """Write W/H/Q as CSV matrices plus a JSON metadata record."""
    os.makedirs(out_dir, exist_ok=True)
    for name, matrix in (("W", factors.W), ("H", factors.H), ("Q", factors.Q)):
        np.savetxt(os.path.join(out_dir, f"{stem}_{name}.csv"), matrix, fmt="%.17g", delimiter=",")
    final = float(factors.objective_trace[-1]) if factors.objective_trace.size else None
    meta = {
        "beta": factors.beta,
        "rank": factors.rank,
        "seed": factors.seed,
        "iterations": factors.iterations_run,
        "final_objective": final,
    }
    with open(os.path.join(out_dir, f"{stem}.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
