"""Statevector basics: gates, outcome distributions, and sampling.

The simulator stores all 2**n complex amplitudes of an n-qubit register.
Qubit 1 is the most significant bit of the basis index, and rotations use
the standard convention RY(a) = [[cos(a/2), -sin(a/2)], [sin(a/2), cos(a/2)]].
"""

import numpy as np

from vqec import apply_cz, apply_ry, bits_to_index, pmf, sample_bitstrings, zero_state

# Start in |00> and rotate qubit 1 into an equal superposition.
state = zero_state(2)
print("initial amplitudes:", state.amps.real)

state = apply_ry(state, 1, np.pi / 2)
print("after RY(pi/2) on qubit 1:", np.round(state.amps.real, 6))

# Rotate qubit 2 as well, then entangle with a CZ.  The CZ only flips the
# sign of the |11> amplitude, so the outcome distribution is unchanged,
# but the state is no longer a product state for later gates.
state = apply_ry(state, 2, np.pi / 2)
entangled = apply_cz(state, 1, 2)
print("amplitudes before CZ:", np.round(state.amps.real, 6))
print("amplitudes after  CZ:", np.round(entangled.amps.real, 6))
print("outcome PMF (identical):", np.round(pmf(entangled), 6))

# Sampling draws bitstrings from the PMF; a seeded generator makes the
# draw reproducible.
rng = np.random.default_rng(7)
samples = sample_bitstrings(pmf(entangled), 10, rng)
print("10 sampled bitstrings (rows are shots, columns qubits):")
print(samples)
print("as basis indices:", bits_to_index(samples))

# Empirical frequencies approach the PMF at the usual 1/sqrt(S) rate.
S = 100_000
samples = sample_bitstrings(pmf(entangled), S, rng)
freq = np.bincount(bits_to_index(samples), minlength=4) / S
print(f"empirical frequencies over {S} shots:", np.round(freq, 4))
