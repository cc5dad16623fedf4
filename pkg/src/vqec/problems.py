"""Problem builders: MaxCut/QUBO encodings, variational formulations, generators.

Spin assignments s in {-1, +1}^n and binary vectors b in {0, 1}^n are linked
by s = 1 - 2b throughout.  All constraint forms are normalized to f(b) <= 0.
Instance files are JSON with format tag "vqec-instance/1" and 1-based
vertex/qubit indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .observables import (
    DiagonalObservable,
    QuadraticForm,
    chance_transform,
    indicator_transform,
    tabulate,
)

FORMAT_TAG = "vqec-instance/1"
FORMULATIONS = ("average", "deterministic", "chance", "explicit-lp")


@dataclass(frozen=True)
class GraphInstance:
    """Weighted graph with optional same/different-partition specifications.

    W: symmetric nonnegative weights, zero diagonal.  C (optional): symmetric
    matrix over {-1, 0, +1} with zero diagonal; +1 asks vertices to share a
    partition, -1 to differ, 0 means unspecified.
    """

    n: int
    W: np.ndarray
    C: np.ndarray | None = None

    def __post_init__(self) -> None:
        W = np.asarray(self.W, dtype=np.float64)
        object.__setattr__(self, "W", W)
        if W.shape != (self.n, self.n):
            raise ValueError("weight matrix shape does not match vertex count")
        if not np.allclose(W, W.T, atol=1e-12):
            raise ValueError("weight matrix must be symmetric")
        if np.any(W < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.diag(W) != 0):
            raise ValueError("weight matrix must have zero diagonal")
        if self.C is not None:
            C = np.asarray(self.C, dtype=np.float64)
            object.__setattr__(self, "C", C)
            if C.shape != (self.n, self.n):
                raise ValueError("specification matrix shape does not match vertex count")
            if not np.array_equal(C, C.T):
                raise ValueError("specification matrix must be symmetric")
            if not np.all(np.isin(C, (-1.0, 0.0, 1.0))):
                raise ValueError("specification entries must be -1, 0 or +1")
            if np.any(np.diag(C) != 0):
                raise ValueError("specification matrix must have zero diagonal")


@dataclass(frozen=True)
class QcboInstance:
    """Quadratic cost plus M quadratic constraints, each meaning f_m(b) <= 0."""

    n: int
    cost: QuadraticForm
    constraints: tuple[QuadraticForm, ...] = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.cost.n != self.n or any(q.n != self.n for q in self.constraints):
            raise ValueError("all quadratic forms must have dimension n")


@dataclass(frozen=True)
class ConstrainedProblem:
    """Variational problem: minimize cost^T p(theta) s.t. f_m^T p(theta) <= 0."""

    n: int
    cost: DiagonalObservable
    constraints: tuple[DiagonalObservable, ...]
    formulation: str
    beta: float = 0.0
    source: QcboInstance | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.formulation not in FORMULATIONS:
            raise ValueError(f"unknown formulation {self.formulation!r}")

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    def constraint_matrix(self) -> np.ndarray:
        """Dense (N, M) matrix with constraint value vectors as columns."""
        if not self.constraints:
            return np.zeros((1 << self.n, 0))
        return np.stack([f.as_vector() for f in self.constraints], axis=1)


def cut_size(g: GraphInstance, spins: np.ndarray) -> float:
    """Total weight crossing the partition: (1^T W 1 - s^T W s) / 4."""
    s = np.asarray(spins, dtype=np.float64)
    return float((g.W.sum() - s @ g.W @ s) / 4.0)


def maxcut_qubo(g: GraphInstance) -> QcboInstance:
    """Unconstrained MaxCut as a QUBO: minimize s^T W s over s = 1 - 2b.

    Expanding gives b^T (4W) b - 4(W 1)^T b + 1^T W 1; minimizing it
    maximizes the cut (1^T W 1 - s^T W s)/4.
    """
    row_sums = g.W.sum(axis=1)
    cost = QuadraticForm(A=4.0 * g.W, c=-4.0 * row_sums, d0=float(g.W.sum()))
    return QcboInstance(n=g.n, cost=cost)


def constrained_maxcut(g: GraphInstance) -> QcboInstance:
    """MaxCut plus one quadratic specification constraint.

    The requirement s^T C s >= sum |C_ij| becomes, over binary variables,
    b^T (-4C) b + 4(C 1)^T b + (sum|C_ij| - 1^T C 1) <= 0.
    """
    if g.C is None:
        raise ValueError("graph carries no specification matrix")
    cost = maxcut_qubo(g).cost
    c_rows = g.C.sum(axis=1)
    con = QuadraticForm(
        A=-4.0 * g.C,
        c=4.0 * c_rows,
        d0=float(np.abs(g.C).sum() - g.C.sum()),
    )
    return QcboInstance(n=g.n, cost=cost, constraints=(con,))


def balance_constraints(n: int, bound: float) -> tuple[QuadraticForm, QuadraticForm]:
    """-bound <= s^T 1 <= bound as two degenerate (linear) quadratic forms."""
    zero = np.zeros((n, n))
    ones = np.ones(n)
    upper = QuadraticForm(A=zero, c=-2.0 * ones, d0=float(n - bound))
    lower = QuadraticForm(A=zero, c=2.0 * ones, d0=float(-n - bound))
    return upper, lower


def build_variational(
    q: QcboInstance, formulation: str, beta: float = 0.0
) -> ConstrainedProblem:
    """Variational form of a QCBO.

    average: raw quadratic value vectors as constraints; deterministic /
    chance: indicator of satisfaction, then the coverage rewrite
    (1-beta)*1 - g (deterministic is chance at beta = 0).
    """
    if formulation == "deterministic":
        formulation, beta = "chance", 0.0
    if formulation not in ("average", "chance"):
        raise ValueError(f"cannot build a variational QCBO for {formulation!r}")
    if formulation == "chance" and not 0.0 <= beta < 1.0:
        raise ValueError(f"violation probability must lie in [0, 1), got {beta}")
    cost = tabulate(q.cost, q.n)
    if formulation == "average":
        cons = tuple(tabulate(f, q.n) for f in q.constraints)
        tag = "average"
    else:
        cons = tuple(
            chance_transform(indicator_transform(tabulate(f, q.n)), beta)
            for f in q.constraints
        )
        tag = "deterministic" if beta == 0.0 else "chance"
    return ConstrainedProblem(
        n=q.n, cost=cost, constraints=cons, formulation=tag, beta=beta, source=q,
        meta=dict(q.meta),
    )


def random_instance_s1(n: int, num_specs: int, rng: np.random.Generator) -> QcboInstance:
    """Random constrained-MaxCut instance, feasible by construction.

    Complete graph with Uniform(0, 1] weights; specifications are read off a
    hidden random assignment for `num_specs` sampled vertex pairs, so that
    assignment always satisfies them.
    """
    max_pairs = n * (n - 1) // 2
    if num_specs > max_pairs:
        raise ValueError(f"cannot place {num_specs} specs on {max_pairs} pairs")
    W = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    W[iu] = 1.0 - rng.random(len(iu[0]))  # Uniform(0, 1]
    W = W + W.T

    hidden = 1.0 - 2.0 * rng.integers(0, 2, size=n)
    C = np.zeros((n, n))
    if num_specs > 0:
        chosen = rng.choice(max_pairs, size=num_specs, replace=False)
        for flat in chosen:
            i, j = iu[0][flat], iu[1][flat]
            C[i, j] = C[j, i] = hidden[i] * hidden[j]
    g = GraphInstance(n=n, W=W, C=C)
    q = constrained_maxcut(g)
    return QcboInstance(
        n=q.n, cost=q.cost, constraints=q.constraints,
        meta={"generator": "s1", "num_specs": int(num_specs),
              "weights": "uniform(0,1] complete graph"},
    )


def random_lp(N: int, M: int, rng: np.random.Generator) -> ConstrainedProblem:
    """Random simplex LP: N x (M+1) standard-normal value matrix.

    Redraws (from the same stream) until the constraint system is feasible,
    recording the redraw count in the problem metadata.
    """
    n = N.bit_length() - 1
    if 1 << n != N or N < 2:
        raise ValueError(f"problem size {N} is not a power of two")
    from .reference import lp_solve  # deferred to avoid an import cycle

    redraws = 0
    while True:
        mat = rng.standard_normal((N, M + 1))
        problem = ConstrainedProblem(
            n=n,
            cost=DiagonalObservable.from_vector(mat[:, 0]),
            constraints=tuple(
                DiagonalObservable.from_vector(mat[:, m + 1]) for m in range(M)
            ),
            formulation="explicit-lp",
            meta={"generator": "lp", "redraws": redraws},
        )
        if M == 0 or lp_solve(problem).status == "optimal":
            return problem
        redraws += 1


# -- instance files ----------------------------------------------------------


def _graph_payload(g: GraphInstance) -> dict:
    iu = np.triu_indices(g.n, k=1)
    weights = [
        [int(i + 1), int(j + 1), float(g.W[i, j])]
        for i, j in zip(*iu)
        if g.W[i, j] != 0.0
    ]
    payload = {"kind": "graph", "n": g.n, "weights": weights}
    if g.C is not None:
        payload["specs"] = [
            [int(i + 1), int(j + 1), int(g.C[i, j])]
            for i, j in zip(*iu)
            if g.C[i, j] != 0.0
        ]
    return payload


def _quadratic_payload(q: QuadraticForm) -> dict:
    return {"A": q.A.tolist(), "c": q.c.tolist(), "d0": q.d0}


def save_instance(obj: GraphInstance | QcboInstance | ConstrainedProblem, path: str | Path) -> Path:
    """Write an instance file; explicit-LP problems store dense columns."""
    path = Path(path)
    if isinstance(obj, GraphInstance):
        payload = _graph_payload(obj)
    elif isinstance(obj, QcboInstance):
        payload = {
            "kind": "qcbo",
            "n": obj.n,
            "cost": _quadratic_payload(obj.cost),
            "constraints": [_quadratic_payload(q) for q in obj.constraints],
            "meta": obj.meta,
        }
    elif isinstance(obj, ConstrainedProblem):
        if obj.formulation != "explicit-lp":
            raise ValueError("only explicit-lp problems are stored as dense columns; "
                             "save the source instance instead")
        payload = {
            "kind": "lp",
            "n": obj.n,
            "cost": obj.cost.as_vector().tolist(),
            "constraints": [f.as_vector().tolist() for f in obj.constraints],
            "meta": obj.meta,
        }
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    payload["format"] = FORMAT_TAG
    path.write_text(json.dumps(payload))
    return path


def load_instance(path: str | Path) -> GraphInstance | QcboInstance | ConstrainedProblem:
    """Inverse of save_instance; bit-identical floats via JSON round-trip."""
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != FORMAT_TAG:
        raise ValueError(f"not a {FORMAT_TAG} file: {path}")
    n = payload["n"]
    kind = payload["kind"]
    if kind == "graph":
        W = np.zeros((n, n))
        for i, j, w in payload["weights"]:
            W[i - 1, j - 1] = W[j - 1, i - 1] = w
        C = None
        if "specs" in payload:
            C = np.zeros((n, n))
            for i, j, v in payload["specs"]:
                C[i - 1, j - 1] = C[j - 1, i - 1] = v
        return GraphInstance(n=n, W=W, C=C)
    if kind == "qcbo":
        cost = QuadraticForm(**payload["cost"])
        cons = tuple(QuadraticForm(**q) for q in payload["constraints"])
        return QcboInstance(n=n, cost=cost, constraints=cons, meta=payload.get("meta", {}))
    if kind == "lp":
        return ConstrainedProblem(
            n=n,
            cost=DiagonalObservable.from_vector(np.array(payload["cost"])),
            constraints=tuple(
                DiagonalObservable.from_vector(np.array(col))
                for col in payload["constraints"]
            ),
            formulation="explicit-lp",
            meta=payload.get("meta", {}),
        )
    raise ValueError(f"unknown instance kind {kind!r}")
