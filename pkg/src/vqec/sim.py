"""Dense statevector engine for RY/CZ circuits.

Bit convention: qubit 1 is the most significant bit of the basis index,
so index k encodes the bitstring (b_1, ..., b_n) with k = sum_p b_p * 2**(n-p).
Rotations use the standard convention
RY(a) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]].
States are dense vectors of 2**n complex amplitudes; capacity is capped at
n = 24 qubits (complex128, 256 MiB).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import ry_inplace

MAX_QUBITS = 24

# A probability mass function over the 2**n basis states: nonnegative,
# sums to one.  Plain ndarray; invariants are enforced by the producers.
Pmf = np.ndarray

# A batch of measured bitstrings, shape (shots, n), entries in {0, 1},
# column p-1 holding qubit p.
Bitstrings = np.ndarray


@dataclass(frozen=True)
class Statevector:
    """Pure n-qubit state: 2**n complex amplitudes with unit Euclidean norm.

    Treat instances as immutable; gate functions return new states.
    """

    n: int
    amps: np.ndarray

    @property
    def dim(self) -> int:
        return self.amps.size


def _check_qubit(n: int, qubit: int) -> None:
    if not 1 <= qubit <= n:
        raise IndexError(f"qubit index {qubit} outside 1..{n}")


def zero_state(n: int) -> Statevector:
    """Prepare |0...0> on n qubits.

    Raises ValueError if n is outside 1..24 (dense capacity).
    """
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count {n} outside supported range 1..{MAX_QUBITS}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n, amps)


def apply_ry(state: Statevector, qubit: int, angle: float) -> Statevector:
    """Apply RY(angle) to the given qubit (standard convention)."""
    _check_qubit(state.n, qubit)
    c = float(np.cos(angle / 2.0))
    s = float(np.sin(angle / 2.0))
    amps = state.amps.copy()
    ry_inplace(amps, 1 << (qubit - 1), 1 << (state.n - qubit), c, s)
    return Statevector(state.n, amps)


def apply_cz(state: Statevector, a: int, b: int) -> Statevector:
    """Apply a controlled-Z between qubits a and b (order irrelevant).

    Negates every amplitude whose basis state has bit a = bit b = 1.
    """
    _check_qubit(state.n, a)
    _check_qubit(state.n, b)
    if a == b:
        raise IndexError(f"CZ needs two distinct qubits, got {a} and {b}")
    lo, hi = (a, b) if a < b else (b, a)
    n = state.n
    amps = state.amps.copy()
    view = amps.reshape(1 << (lo - 1), 2, 1 << (hi - lo - 1), 2, 1 << (n - hi))
    view[:, 1, :, 1, :] *= -1.0
    return Statevector(n, amps)


def pmf(state: Statevector) -> Pmf:
    """Measurement probabilities |amps_k|^2 over the computational basis."""
    p = np.abs(state.amps) ** 2
    p.setflags(write=False)
    return p


def index_to_bits(indices: np.ndarray | int, n: int) -> np.ndarray:
    """Expand basis indices to bit rows (qubit 1 first, i.e. MSB first)."""
    idx = np.atleast_1d(np.asarray(indices, dtype=np.int64))
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)


def bits_to_index(bits: np.ndarray) -> np.ndarray:
    """Inverse of index_to_bits; accepts a single row or a (S, n) batch."""
    b = np.atleast_2d(np.asarray(bits, dtype=np.int64))
    n = b.shape[1]
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    return b @ weights


def sample_bitstrings(p: Pmf, shots: int, rng: np.random.Generator) -> Bitstrings:
    """Draw `shots` i.i.d. bitstrings from the PMF p.

    Deterministic given the generator state: the s-th draw inverts the
    cumulative distribution at the s-th uniform variate.
    """
    if shots < 1:
        raise ValueError(f"shot count must be >= 1, got {shots}")
    p = np.asarray(p, dtype=np.float64)
    size = p.size
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError(f"PMF length {size} is not a power of two")
    cum = np.cumsum(p)
    cum[-1] = 1.0  # guard against 1 - eps tails
    idx = np.searchsorted(cum, rng.random(shots), side="right")
    np.clip(idx, 0, size - 1, out=idx)
    return index_to_bits(idx, n)
