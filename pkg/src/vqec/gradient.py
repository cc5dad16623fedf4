"""Shift-rule gradients of diagonal observables with respect to circuit parameters.

Each logical parameter t enters the circuit through one composite rotation
RY(2*L*t) (L = repetition factor), whose generator has eigenvalues +/-L.
The derivative of any observable is therefore exactly

    dF/dt = L * (F(t + pi/(4L)) - F(t - pi/(4L)))

i.e. two evaluations per parameter at a standard-angle shift of +/-pi/2,
2P circuit parameterizations per full gradient.  In shot mode every shifted
circuit draws its own fresh sample set, all observables sharing it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzSpec, forward, shifted_pmfs
from .observables import DiagonalObservable, shot_estimate_all
from .sim import pmf, sample_bitstrings

# Stream-id layout for per-evaluation sample streams, spawn_key =
# (iteration, kind, index): kinds 0/1 are value readouts (tags 0 and 1),
# kinds 2/3 the +/- gradient shifts for tag 0, kinds 4/5 for tag 1.
_KIND_VALUES = 0
_KIND_GRAD_PLUS = 2
_KIND_GRAD_MINUS = 3


def sample_stream(seed: int, iteration: int, kind: int, index: int = 0) -> np.random.Generator:
    """Independent generator for one circuit evaluation, derived deterministically."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(iteration, kind, index)))


@dataclass(frozen=True)
class GradientRequest:
    """One evaluation point: circuit, parameters, observables, and mode.

    shots = 0 selects exact statevector expectations; otherwise each
    compilation is estimated from `shots` fresh samples.  `seed`,
    `iteration` and `sample_tag` pin the sample streams (tag distinguishes
    multiple evaluation points within one iteration).  `active` masks which
    observables need gradient rows; index 0 (the cost) is always active, and
    the mask is honoured only in shot mode.
    """

    spec: AnsatzSpec
    theta: np.ndarray
    observables: tuple[DiagonalObservable, ...]
    shots: int = 0
    seed: int = 0
    iteration: int = 0
    sample_tag: int = 0
    active: np.ndarray | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", np.asarray(self.theta, dtype=np.float64))
        object.__setattr__(self, "observables", tuple(self.observables))
        if self.shots < 0:
            raise ValueError("shot count must be >= 0 (0 = exact mode)")
        if self.sample_tag not in (0, 1):
            raise ValueError("sample_tag must be 0 or 1")

    @property
    def exact(self) -> bool:
        return self.shots == 0

    def active_mask(self) -> np.ndarray:
        mask = np.ones(len(self.observables), dtype=bool)
        if self.active is not None:
            got = np.asarray(self.active, dtype=bool)
            if got.shape != mask.shape:
                raise ValueError("active mask must have one entry per observable")
            mask = got.copy()
            mask[0] = True
        return mask


@dataclass(frozen=True)
class ValueReadout:
    values: np.ndarray
    compilations: int
    shots_used: int


@dataclass(frozen=True)
class GradientReadout:
    matrix: np.ndarray  # (M+1, P)
    compilations: int
    shots_used: int


def _dense_matrix(observables: tuple[DiagonalObservable, ...]) -> np.ndarray:
    return np.stack([f.as_vector() for f in observables])


def observable_values(req: GradientRequest) -> ValueReadout:
    """All M+1 observable values at theta: one compilation, one shared sample set."""
    state = forward(req.spec, req.theta)
    p = pmf(state)
    if req.exact:
        values = _dense_matrix(req.observables) @ p
        return ValueReadout(values, compilations=1, shots_used=0)
    rng = sample_stream(req.seed, req.iteration, _KIND_VALUES + req.sample_tag)
    samples = sample_bitstrings(p, req.shots, rng)
    values = shot_estimate_all(req.observables, samples)
    return ValueReadout(values, compilations=1, shots_used=req.shots)


def parameter_shift_gradient(req: GradientRequest) -> GradientReadout:
    """(M+1) x P matrix of exact-rule gradients, 2P compilations.

    Exact mode evaluates f^T p at every shifted circuit; shot mode estimates
    each shifted value from its own independently seeded sample set (2P*S
    shots per call), skipping masked-out observables.
    """
    spec = req.spec
    L = spec.repeat
    delta = np.pi / (4.0 * L)
    probs = shifted_pmfs(spec, req.theta, delta)  # (P, 2, N)
    P = spec.num_parameters
    M1 = len(req.observables)
    if req.exact:
        dense = _dense_matrix(req.observables)
        flat = probs.reshape(2 * P, -1)
        vals = (dense @ flat.T).reshape(M1, P, 2)
        matrix = L * (vals[:, :, 0] - vals[:, :, 1])
        return GradientReadout(matrix, compilations=2 * P, shots_used=0)

    mask = req.active_mask()
    kind_plus = _KIND_GRAD_PLUS + 2 * req.sample_tag
    kind_minus = _KIND_GRAD_MINUS + 2 * req.sample_tag
    active_obs = [f for f, keep in zip(req.observables, mask) if keep]
    matrix = np.zeros((M1, P), dtype=np.float64)
    for p_idx in range(P):
        rng_plus = sample_stream(req.seed, req.iteration, kind_plus, p_idx)
        rng_minus = sample_stream(req.seed, req.iteration, kind_minus, p_idx)
        plus = shot_estimate_all(active_obs, sample_bitstrings(probs[p_idx, 0], req.shots, rng_plus))
        minus = shot_estimate_all(active_obs, sample_bitstrings(probs[p_idx, 1], req.shots, rng_minus))
        matrix[mask, p_idx] = L * (plus - minus)
    return GradientReadout(matrix, compilations=2 * P, shots_used=2 * P * req.shots)
