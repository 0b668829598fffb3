"""Exact dense statevector simulation of the QAOA circuit.

The problem Hamiltonian is diagonal in the computational basis, so one
layer is an elementwise phase exp(-i gamma * diag) followed by the mixer
exp(-i beta * sum_j X_j), applied as n single-qubit Rx(2 beta) sweeps
over the amplitude array.  Expectations are computed exactly from the
final probabilities (infinite-shot limit); finite-shot sampling exists
only for readout-style reporting.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ResourceLimitError
from .ising import index_to_bitstring, spins_to_index
from .rng import STREAM_SAMPLE, substream

# 2^20 complex doubles is 16 MB; anything larger needs an explicit override.
DEFAULT_QUBIT_CAP = 20


@dataclass(frozen=True)
class QaoaParams:
    """Circuit depth p and the 2p variational angles."""

    p: int
    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gammas", np.asarray(self.gammas, dtype=np.float64))
        object.__setattr__(self, "betas", np.asarray(self.betas, dtype=np.float64))
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.gammas.shape != (self.p,) or self.betas.shape != (self.p,):
            raise ValueError("gammas and betas must both have length p")

    @classmethod
    def from_vector(cls, theta):
        """Split a flat angle vector (gammas first, then betas) at p = len/2."""
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim != 1 or theta.size % 2 != 0:
            raise ValueError("angle vector must be 1-D with even length")
        p = theta.size // 2
        return cls(p=p, gammas=theta[:p], betas=theta[p:])

    def to_vector(self):
        return np.concatenate([self.gammas, self.betas])


@dataclass
class Statevector:
    """Amplitudes over the 2^n computational basis (bit k of the index = qubit k)."""

    n: int
    amplitudes: np.ndarray = field(repr=False)


def _check_cap(n, max_qubits):
    if n > max_qubits:
        raise ResourceLimitError(
            f"{n} qubits exceeds the simulator cap of {max_qubits}"
        )


def hamiltonian_diagonal(model, max_qubits=DEFAULT_QUBIT_CAP):
    """Diagonal of the problem Hamiltonian over all 2^n basis states.

    Entry m is the classical spin energy of the symbol vector encoded by
    index m, built directly from the model's couplings and fields via the
    bit identities s_k = 1 - 2*bit_k and s_i s_j = 1 - 2*(bit_i ^ bit_j).
    """
    _check_cap(model.n, max_qubits)
    dim = 1 << model.n
    idx = np.arange(dim, dtype=np.uint64)
    diag = np.zeros(dim)
    one = np.uint64(1)
    for k, fz in enumerate(model.fields):
        diag += fz * (1.0 - 2.0 * ((idx >> np.uint64(k)) & one))
    for i, j, w in model.couplings:
        if w != 0.0:
            diag += w * (1.0 - 2.0 * (((idx >> np.uint64(i)) ^ (idx >> np.uint64(j))) & one))
    return diag


def _evolve(diag, n, params):
    dim = 1 << n
    amps = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    for gamma, beta in zip(params.gammas, params.betas):
        amps *= np.exp(-1j * gamma * diag)
        c = np.cos(beta)
        s = -1j * np.sin(beta)
        for k in range(n):
            view = amps.reshape(-1, 2, 1 << k)
            a0 = view[:, 0, :].copy()
            a1 = view[:, 1, :]
            view[:, 0, :] = c * a0 + s * a1
            view[:, 1, :] = c * a1 + s * a0
    return amps


def qaoa_state(model, params, max_qubits=DEFAULT_QUBIT_CAP):
    """Statevector after p alternating phase/mixer layers on |+>^n."""
    diag = hamiltonian_diagonal(model, max_qubits)
    return Statevector(n=model.n, amplitudes=_evolve(diag, model.n, params))


def expectation(model, params, max_qubits=DEFAULT_QUBIT_CAP):
    """Exact <H_C> in the variational state (no shot noise)."""
    diag = hamiltonian_diagonal(model, max_qubits)
    amps = _evolve(diag, model.n, params)
    probs = amps.real**2 + amps.imag**2
    return float(probs @ diag)


def sample(state, shots, seed):
    """Multinomial measurement counts, deterministic in ``seed``.

    Returns a dict mapping bitstrings (antenna 1 leftmost) to counts;
    zero-count strings are omitted.  Counts sum to ``shots``.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    amps = state.amplitudes
    probs = amps.real**2 + amps.imag**2
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    gen = substream(seed, STREAM_SAMPLE)
    counts = gen.multinomial(shots, probs)
    return {
        index_to_bitstring(m, state.n): int(c)
        for m, c in enumerate(counts)
        if c > 0
    }


def success_probability(state, x):
    """Probability of measuring the basis state that encodes symbol vector x."""
    x = np.asarray(x)
    if x.shape != (state.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({state.n},)")
    amp = state.amplitudes[spins_to_index(x)]
    return float(amp.real**2 + amp.imag**2)
