"""Diagonal observables over the computational basis.

An observable is an N-long real vector f (or a lazy bitstring evaluator);
its expectation under a circuit is the inner product with the outcome PMF,
and its S-shot estimate is the sample mean of f over measured bitstrings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .sim import MAX_QUBITS, Pmf, bits_to_index, index_to_bits


@dataclass(frozen=True)
class QuadraticForm:
    """f(b) = b^T A b + b^T c + d0 over binary column vectors b."""

    A: np.ndarray
    c: np.ndarray
    d0: float = 0.0

    def __post_init__(self) -> None:
        A = np.asarray(self.A, dtype=np.float64)
        c = np.asarray(self.c, dtype=np.float64)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if c.shape != (A.shape[0],):
            raise ValueError("c must match A's dimension")
        if not np.allclose(A, A.T, atol=1e-12):
            raise ValueError("A must be symmetric")

    @property
    def n(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class DiagonalObservable:
    """Dense value vector and/or lazy bitstring evaluator; length 2**n."""

    n: int
    values: np.ndarray | None = None
    fn: Callable[[np.ndarray], float] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.values is None and self.fn is None:
            raise ValueError("observable needs a dense vector or an evaluator")
        if self.values is not None:
            v = np.asarray(self.values, dtype=np.float64)
            if v.shape != (1 << self.n,):
                raise ValueError(f"dense vector must have length {1 << self.n}")
            v = v.copy()
            v.setflags(write=False)
            object.__setattr__(self, "values", v)

    @classmethod
    def from_vector(cls, values: np.ndarray) -> "DiagonalObservable":
        values = np.asarray(values, dtype=np.float64)
        n = values.size.bit_length() - 1
        if 1 << n != values.size:
            raise ValueError("dense vector length must be a power of two")
        return cls(n=n, values=values)

    @classmethod
    def from_function(cls, n: int, fn: Callable[[np.ndarray], float]) -> "DiagonalObservable":
        return cls(n=n, fn=fn)

    @property
    def is_dense(self) -> bool:
        return self.values is not None

    def as_vector(self) -> np.ndarray:
        """Dense values, tabulating the evaluator over all 2**n bitstrings."""
        if self.values is not None:
            return self.values
        bits = index_to_bits(np.arange(1 << self.n), self.n)
        return np.array([self.fn(row) for row in bits], dtype=np.float64)

    def at_bits(self, bits: np.ndarray) -> np.ndarray:
        """Evaluate on a (S, n) batch of bitstrings."""
        bits = np.atleast_2d(bits)
        if self.values is not None:
            return self.values[bits_to_index(bits)]
        return np.array([self.fn(row) for row in bits], dtype=np.float64)


def eval_quadratic(q: QuadraticForm, bits: np.ndarray) -> float:
    """Evaluate b^T A b + b^T c + d0 at one bitstring."""
    b = np.asarray(bits, dtype=np.float64)
    if b.shape != (q.n,):
        raise ValueError(f"bitstring has shape {b.shape}, expected ({q.n},)")
    return float(b @ q.A @ b + b @ q.c + q.d0)


def tabulate(q: QuadraticForm, n: int) -> DiagonalObservable:
    """Dense observable with entry k = f(bits of k), MSB-first convention."""
    if q.n != n:
        raise ValueError(f"form dimension {q.n} does not match qubit count {n}")
    if n > MAX_QUBITS:
        raise ValueError(f"qubit count {n} exceeds dense capacity {MAX_QUBITS}")
    bits = index_to_bits(np.arange(1 << n), n).astype(np.float64)
    vals = np.einsum("ki,ki->k", bits @ q.A, bits) + bits @ q.c + q.d0
    return DiagonalObservable(n=n, values=vals)


def indicator_transform(f: DiagonalObservable) -> DiagonalObservable:
    """Map values to the satisfaction indicator: 1 where f <= 0, else 0."""
    if f.is_dense:
        return DiagonalObservable(n=f.n, values=(f.values <= 0.0).astype(np.float64))
    inner = f.fn
    return DiagonalObservable(n=f.n, fn=lambda bits: 1.0 if inner(bits) <= 0.0 else 0.0)


def chance_transform(g: DiagonalObservable, beta: float) -> DiagonalObservable:
    """Rewrite the coverage requirement <g, p> >= 1-beta as <result, p> <= 0.

    g must be an indicator (entries in {0, 1}); the result is (1-beta)*1 - g.
    """
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"violation probability must lie in [0, 1), got {beta}")
    if g.is_dense:
        if not np.all((g.values == 0.0) | (g.values == 1.0)):
            raise ValueError("chance_transform expects an indicator observable")
        return DiagonalObservable(n=g.n, values=(1.0 - beta) - g.values)
    inner = g.fn
    return DiagonalObservable(n=g.n, fn=lambda bits: (1.0 - beta) - inner(bits))


def exact_expectation(f: DiagonalObservable, p: Pmf) -> float:
    """Inner product f^T p (requires a dense observable)."""
    vec = f.as_vector()
    p = np.asarray(p, dtype=np.float64)
    if vec.shape != p.shape:
        raise ValueError(f"length mismatch: observable {vec.shape} vs PMF {p.shape}")
    return float(vec @ p)


def shot_estimate(f: DiagonalObservable, samples: np.ndarray) -> float:
    """Sample mean of f over measured bitstrings."""
    samples = np.atleast_2d(samples)
    if samples.shape[0] == 0:
        raise ValueError("shot estimate needs at least one sample")
    return float(np.mean(f.at_bits(samples)))


def shot_estimate_all(
    observables: tuple[DiagonalObservable, ...] | list[DiagonalObservable],
    samples: np.ndarray,
) -> np.ndarray:
    """Estimate every observable from the one shared sample set.

    Diagonal observables are simultaneously measurable, so a single batch of
    bitstrings serves all of them; the index lookup is done once.
    """
    samples = np.atleast_2d(samples)
    if samples.shape[0] == 0:
        raise ValueError("shot estimate needs at least one sample")
    idx = bits_to_index(samples)
    out = np.empty(len(observables), dtype=np.float64)
    for m, f in enumerate(observables):
        if f.is_dense:
            out[m] = np.mean(f.values[idx])
        else:
            out[m] = np.mean(f.at_bits(samples))
    return out
