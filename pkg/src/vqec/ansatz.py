"""Two-local ansatz: alternating RY blocks and CZ entanglement blocks.

The circuit has d parameterized blocks of one RY rotation per qubit; an
entanglement block follows every parameterized block except the last, so a
depth-d circuit contains d-1 entanglement blocks.  Parameters are
half-angles: logical parameter t drives RY(2t) (repeated `repeat` times, so
effectively RY(2*repeat*t)), which puts exact basis-state preparation on the
grid {0, pi/2, 3pi/2} and makes the two-point gradient shift rule exact.

Parameter layout: theta[(j-1)*n + (p-1)] belongs to block j, qubit p.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import block_inplace, ry_inplace
from .sim import Statevector, index_to_bits

ENTANGLEMENTS = ("full", "linear", "circular")

# Cache of entanglement-block diagonals keyed by (n, scheme); the arrays are
# marked read-only because they are shared across callers.
_ENT_SIGNS: dict[tuple[int, str], np.ndarray] = {}


@dataclass(frozen=True)
class AnsatzSpec:
    """Shape of the two-local circuit.

    n: qubit count; depth: number of parameterized blocks; entanglement:
    'full', 'linear' or 'circular'; repeat: how many consecutive identical
    RY gates each logical parameter drives (the logical parameter count
    stays depth * n regardless).
    """

    n: int
    depth: int
    entanglement: str = "full"
    repeat: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("need at least one qubit")
        if self.depth < 1:
            raise ValueError("need at least one parameterized block")
        if self.entanglement not in ENTANGLEMENTS:
            raise ValueError(f"unknown entanglement scheme {self.entanglement!r}")
        if self.repeat < 1:
            raise ValueError("repetition factor must be >= 1")

    @property
    def num_parameters(self) -> int:
        return self.depth * self.n


def entanglement_pairs(n: int, scheme: str) -> list[tuple[int, int]]:
    """CZ pairs of one entanglement block, in application order.

    full: all pairs, ascending control then ascending target; linear:
    consecutive qubits; circular: linear plus the wrap-around (n, 1).
    """
    if scheme == "full":
        return [(a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)]
    pairs = [(p, p + 1) for p in range(1, n)]
    if scheme == "circular" and n >= 2:
        pairs.append((n, 1))
    return pairs


def entanglement_signs(n: int, scheme: str) -> np.ndarray:
    """Diagonal of the entanglement block: +/-1 per basis state.

    CZ gates are diagonal and commute, so the whole block collapses to one
    sign vector; entry k picks up -1 once per listed pair whose two bits are
    both set in k.
    """
    key = (n, scheme)
    cached = _ENT_SIGNS.get(key)
    if cached is not None:
        return cached
    idx = np.arange(1 << n, dtype=np.int64)
    parity = np.zeros(1 << n, dtype=np.int64)
    for a, b in entanglement_pairs(n, scheme):
        parity ^= (idx >> (n - a)) & (idx >> (n - b)) & 1
    signs = (1.0 - 2.0 * parity).astype(np.float64)
    signs.setflags(write=False)
    _ENT_SIGNS[key] = signs
    return signs


def _block_angles(spec: AnsatzSpec, theta: np.ndarray, j: int) -> tuple[np.ndarray, np.ndarray]:
    """cos/sin of the half standard angle (= repeat * parameter) of block j."""
    half = spec.repeat * theta[j * spec.n : (j + 1) * spec.n]
    return np.cos(half), np.sin(half)


def forward(spec: AnsatzSpec, theta: np.ndarray) -> Statevector:
    """Run the circuit on |0...0> and return the output state."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (spec.num_parameters,):
        raise ValueError(
            f"parameter vector has shape {theta.shape}, expected ({spec.num_parameters},)"
        )
    n = spec.n
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    signs = entanglement_signs(n, spec.entanglement)
    for j in range(spec.depth):
        c, s = _block_angles(spec, theta, j)
        block_inplace(amps, n, c, s)
        if j < spec.depth - 1:
            amps *= signs
    return Statevector(n, amps)


def corner_params(spec: AnsatzSpec, k: int) -> np.ndarray:
    """Parameters that prepare basis state |k> exactly.

    Blocks 1..d-1 are zero; the final block sets each qubit to its bit of
    k: angle 0 for bit 0, and pi/2 or 3pi/2 for bit 1, the choice fixing the
    amplitude sign against the phases the entanglement block would imprint.
    For full entanglement the choice tracks the parity of the running sum of
    sines of the preceding angles; for linear and circular it tracks the
    previous qubit's bit (the wrap-around neighbour for qubit 1 when
    circular).
    """
    n = spec.n
    if not 0 <= k < (1 << n):
        raise ValueError(f"basis index {k} outside 0..{(1 << n) - 1}")
    bits = index_to_bits(k, n)[0]
    angles = np.zeros(n, dtype=np.float64)
    if spec.entanglement == "full":
        sin_sum = 0
        for p in range(n):
            if bits[p]:
                angles[p] = np.pi / 2 if sin_sum % 2 == 0 else 3 * np.pi / 2
                sin_sum += 1 if angles[p] == np.pi / 2 else -1
    else:
        for p in range(n):
            if not bits[p]:
                continue
            if p == 0:
                prev = bits[n - 1] if (spec.entanglement == "circular" and n >= 2) else 0
            else:
                prev = bits[p - 1]
            angles[p] = np.pi / 2 if prev == 0 else 3 * np.pi / 2
    theta = np.zeros(spec.num_parameters, dtype=np.float64)
    theta[(spec.depth - 1) * n :] = angles / spec.repeat
    return theta


def shifted_pmfs(spec: AnsatzSpec, theta: np.ndarray, delta: float) -> np.ndarray:
    """PMFs of the circuit at theta +/- delta*e_p for every parameter p.

    Returns an array of shape (P, 2, 2**n); [:, 0] holds the +delta shifts.
    Equivalent to 2P independent forward passes but cheaper: shifting
    parameter p of block j only multiplies an extra RY(2*repeat*delta) onto
    block j's unshifted output, which is computed once and reused for all
    2n shifted variants of that block.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (spec.num_parameters,):
        raise ValueError(
            f"parameter vector has shape {theta.shape}, expected ({spec.num_parameters},)"
        )
    n = spec.n
    d = spec.depth
    N = 1 << n
    signs = entanglement_signs(n, spec.entanglement)
    half = spec.repeat * delta  # half of the extra standard angle
    c_shift = float(np.cos(half))
    s_shift = float(np.sin(half))
    later = [_block_angles(spec, theta, j2) for j2 in range(d)]

    out = np.empty((spec.num_parameters, 2, N), dtype=np.float64)
    prefix = np.zeros(N, dtype=np.complex128)
    prefix[0] = 1.0
    for j in range(d):
        after_block = prefix.copy()
        block_inplace(after_block, n, later[j][0], later[j][1])

        # 2n shifted variants of this block's output (+/- extra rotation per
        # qubit), each pushed through the rest of the circuit row by row
        for p in range(n):
            pre = 1 << p
            post = 1 << (n - p - 1)
            for si, s_val in ((0, s_shift), (1, -s_shift)):
                row = after_block.copy()
                ry_inplace(row, pre, post, c_shift, s_val)
                for j2 in range(j, d):
                    if j2 > j:
                        block_inplace(row, n, later[j2][0], later[j2][1])
                    if j2 < d - 1:
                        row *= signs
                out[j * n + p, si] = np.abs(row) ** 2

        prefix = after_block
        if j < d - 1:
            prefix *= signs
    return out
