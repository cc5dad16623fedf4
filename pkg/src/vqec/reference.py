"""Classical ground truth: enumeration, exact simplex LP, duality, bounds.

Everything here is an oracle for the variational machinery, so the code
favours exactness and certificates over speed.  The LP solver is a revised
two-phase primal simplex on the standard form

    min  f0^T p   s.t.  1^T p = 1,  F^T p + s = 0,  p >= 0, s >= 0

whose basis has only M+1 columns; Bland's rule guards against cycling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observables import tabulate
from .problems import ConstrainedProblem, QcboInstance
from .sim import Pmf

BRUTE_FORCE_MAX_QUBITS = 20
LP_MAX_SIZE = 1 << 16
_PIVOT_TOL = 1e-10
_FEAS_TOL = 1e-9
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class BruteForceResult:
    feasible: bool
    value: float | None
    minimizers: np.ndarray  # basis indices of every optimal feasible bitstring


def brute_force_qcbo(q: QcboInstance) -> BruteForceResult:
    """Exhaustive scan of all 2**n bitstrings.

    Returns the complete argmin set (ties within 1e-9), which downstream
    success-probability scoring requires; sign-symmetric cut problems always
    produce paired minimizers.
    """
    if q.n > BRUTE_FORCE_MAX_QUBITS:
        raise ValueError(f"brute force capped at {BRUTE_FORCE_MAX_QUBITS} qubits, got {q.n}")
    cost = tabulate(q.cost, q.n).values
    feasible = np.ones(cost.size, dtype=bool)
    for form in q.constraints:
        feasible &= tabulate(form, q.n).values <= 0.0
    if not feasible.any():
        return BruteForceResult(False, None, np.empty(0, dtype=np.int64))
    best = cost[feasible].min()
    minimizers = np.flatnonzero(feasible & (cost <= best + _TIE_TOL))
    return BruteForceResult(True, float(best), minimizers)


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" (the simplex domain is compact)
    value: float | None
    p: np.ndarray | None
    multipliers: np.ndarray | None


class _Simplex:
    """Revised primal simplex for min c^T p over the probability simplex
    intersected with F^T p <= 0.  Variables are [p (N), s (M)] plus one
    artificial column for the normalization row during phase 1."""

    def __init__(self, cost: np.ndarray, F: np.ndarray):
        self.c = cost
        self.F = F
        self.N, self.M = F.shape
        self.n_real = self.N + self.M
        self.art = self.n_real  # artificial column index

    def column(self, j: int) -> np.ndarray:
        col = np.zeros(self.M + 1)
        if j < self.N:
            col[0] = 1.0
            col[1:] = self.F[j]
        elif j < self.n_real:
            col[1 + (j - self.N)] = 1.0
        else:
            col[0] = 1.0
        return col

    def _basis_matrix(self, basis: list[int]) -> np.ndarray:
        return np.stack([self.column(j) for j in basis], axis=1)

    def _reduced_costs(self, y: np.ndarray, obj: np.ndarray, phase1: bool) -> np.ndarray:
        rc = np.empty(self.n_real + (1 if phase1 else 0))
        rc[: self.N] = obj[: self.N] - (y[0] + self.F @ y[1:])
        rc[self.N : self.n_real] = obj[self.N : self.n_real] - y[1:]
        if phase1:
            rc[self.art] = obj[self.art] - y[0]
        return rc

    def _iterate(self, basis: list[int], xb: np.ndarray, obj: np.ndarray, phase1: bool):
        in_basis = set(basis)
        while True:
            B = self._basis_matrix(basis)
            y = np.linalg.solve(B.T, obj[basis])
            rc = self._reduced_costs(y, obj, phase1)
            entering = -1
            for j in np.flatnonzero(rc < -_PIVOT_TOL):  # Bland: smallest index
                if j not in in_basis:
                    entering = int(j)
                    break
            if entering < 0:
                return basis, xb, y
            d = np.linalg.solve(B, self.column(entering))
            candidates = np.flatnonzero(d > _PIVOT_TOL)
            if candidates.size == 0:
                raise RuntimeError("unbounded pivot on a compact domain")
            ratios = xb[candidates] / d[candidates]
            best = ratios.min()
            ties = candidates[ratios <= best + _PIVOT_TOL]
            leave_pos = min(ties, key=lambda i: basis[i])  # Bland tie-break
            step = xb[leave_pos] / d[leave_pos]
            xb = xb - step * d
            xb[leave_pos] = step
            in_basis.discard(basis[leave_pos])
            in_basis.add(entering)
            basis[leave_pos] = entering
            np.clip(xb, 0.0, None, out=xb)

    def solve(self) -> LpSolution:
        # Cheap start: any basis state already satisfying every constraint
        good_rows = np.flatnonzero((self.F <= 0.0).all(axis=1))
        if good_rows.size > 0:
            k = int(good_rows[0])
            basis = [k] + [self.N + m for m in range(self.M)]
            xb = np.concatenate(([1.0], -self.F[k]))
        else:
            basis, xb = self._phase1()
            if basis is None:
                return LpSolution("infeasible", None, None, None)

        obj = np.concatenate((self.c, np.zeros(self.M + 1)))
        basis, xb, y = self._iterate(basis, xb, obj, phase1=False)
        p = np.zeros(self.N)
        for pos, j in enumerate(basis):
            if j < self.N:
                p[j] = xb[pos]
        lam = np.clip(-y[1:], 0.0, None)
        return LpSolution("optimal", float(self.c @ p), p, lam)

    def _phase1(self):
        basis = [self.art] + [self.N + m for m in range(self.M)]
        xb = np.concatenate(([1.0], np.zeros(self.M)))
        obj = np.zeros(self.n_real + 1)
        obj[self.art] = 1.0
        basis, xb, _ = self._iterate(basis, xb, obj, phase1=True)
        if self.art in basis:
            pos = basis.index(self.art)
            if xb[pos] > _FEAS_TOL:
                return None, None
            self._pivot_out_artificial(basis, xb, pos)
        return basis, xb

    def _pivot_out_artificial(self, basis: list[int], xb: np.ndarray, pos: int) -> None:
        # artificial basic at zero: swap in any real column with a nonzero
        # entry in its row of B^-1 A (the normalization row cannot be redundant)
        B = self._basis_matrix(basis)
        Binv = np.linalg.inv(B)
        for j in range(self.n_real):
            if j in basis:
                continue
            if abs(Binv[pos] @ self.column(j)) > _PIVOT_TOL:
                basis[pos] = j
                return
        raise RuntimeError("could not drive the artificial variable out of the basis")


def lp_solve(problem: ConstrainedProblem) -> LpSolution:
    """Exact optimum of min f0^T p s.t. F^T p <= 0 over the probability simplex.

    Multipliers come from the optimal basis: with dual vector y for the
    equality rows, the inequality multipliers are -y[1:], nonnegative at
    optimality.  Strong duality and complementary slackness hold for every
    feasible instance and are exercised by the test suite.
    """
    N = 1 << problem.n
    if N > LP_MAX_SIZE:
        raise ValueError(f"LP size {N} exceeds the dense cap {LP_MAX_SIZE}")
    cost = problem.cost.as_vector()
    F = problem.constraint_matrix()
    return _Simplex(cost, F).solve()


def dual_function(cost: np.ndarray, F: np.ndarray, lam: np.ndarray) -> float:
    """D(lam) = min_k (f0 + F lam)_k, the simplex minimum of the Lagrangian."""
    lam = np.asarray(lam, dtype=np.float64)
    if np.any(lam < 0):
        raise ValueError("multipliers must be nonnegative")
    return float(np.min(cost + F @ lam))


def lagrangian_value(p: Pmf, lam: np.ndarray, cost: np.ndarray, F: np.ndarray) -> float:
    """(f0 + F lam)^T p for a PMF p and multipliers lam >= 0."""
    lam = np.asarray(lam, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if np.any(lam < 0):
        raise ValueError("multipliers must be nonnegative")
    if p.shape[0] != cost.shape[0]:
        raise ValueError("PMF length does not match the cost vector")
    return float((cost + F @ lam) @ p)


@dataclass(frozen=True)
class BoundReport:
    """Degradation-bound ingredients for a variational restriction.

    constraint_scale is the largest constraint l1 norm; multiplier_bound
    bounds the l1 norm of the perturbed problem's optimal multipliers; the
    upper bound is dual_value + eps*cost_norm + eps*constraint_scale*
    multiplier_bound.
    """

    eps: float
    s0: float
    constraint_scale: float
    cost_norm: float
    multiplier_bound: float
    upper_bound: float
    dual_value: float


def degradation_bound(
    cost: np.ndarray,
    F: np.ndarray,
    eps: float,
    p_hat: np.ndarray,
    s0: float,
    primal_value: float,
    dual_value: float,
) -> BoundReport:
    """Bound the dual value attainable after an eps-accurate PMF restriction.

    Requires the certificate p_hat to satisfy the strictly feasible
    perturbed system F^T p_hat <= -(eps*L + s0) * 1 with slack s0 > 0; then
    ||multipliers||_1 <= (f0^T p_hat - P*) / s0 and

        D* <= restricted dual value <= D* + eps*||f0||_1 + eps*L*bound.
    """
    cost = np.asarray(cost, dtype=np.float64)
    F = np.asarray(F, dtype=np.float64)
    p_hat = np.asarray(p_hat, dtype=np.float64)
    if eps < 0:
        raise ValueError("accuracy eps must be nonnegative")
    if s0 <= 0:
        raise ValueError("slack s0 must be positive")
    if np.any(p_hat < -_FEAS_TOL) or abs(p_hat.sum() - 1.0) > _FEAS_TOL:
        raise ValueError("p_hat must be a PMF")
    scale = float(np.abs(F).sum(axis=0).max()) if F.shape[1] > 0 else 0.0
    margin = F.T @ p_hat + eps * scale + s0
    if np.any(margin > _FEAS_TOL):
        worst = float(margin.max())
        raise ValueError(
            "p_hat is not strictly feasible for the perturbed program "
            f"(worst violation {worst:.3e})"
        )
    cost_norm = float(np.abs(cost).sum())
    multiplier_bound = float((cost @ p_hat - primal_value) / s0)
    upper = dual_value + eps * cost_norm + eps * scale * multiplier_bound
    return BoundReport(
        eps=eps,
        s0=s0,
        constraint_scale=scale,
        cost_norm=cost_norm,
        multiplier_bound=multiplier_bound,
        upper_bound=upper,
        dual_value=dual_value,
    )


def success_probability(p: Pmf, minimizers: np.ndarray) -> float:
    """Probability mass the PMF places on the optimal bitstrings."""
    p = np.asarray(p, dtype=np.float64)
    idx = np.asarray(minimizers, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= p.size):
        raise IndexError("minimizer index outside the PMF support")
    return float(p[idx].sum())
