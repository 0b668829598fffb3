"""Ising encoding of the detection problem and the bit/spin conventions.

Dropping the constant y.y + tr(H^T H) from ||y - H x||^2 leaves the spin
energy  sum_{i<j} 2 G_ij x_i x_j - sum_k 2 m_k x_k  with G = H^T H (the
channel Gram matrix) and m = H^T y (the matched-filter vector).  Its
minimizer over {-1,+1}^n is the ML solution.

Bit/spin convention, fixed globally: basis index bit k (LSB) is antenna
k, bit value 1 means spin -1, and printed bitstrings put antenna 1 in
the leftmost character.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class IsingModel:
    """Quadratic spin energy derived from one detection instance.

    ``couplings`` holds one (i, j, weight) triple per unordered pair with
    i < j (0-based, weight = 2 * gram[i, j]; zero weights are retained so
    the interaction graph is always complete).  ``fields`` is -2 * matched.
    ``offset`` restores the dropped constant: energy(x) + offset equals
    the ML objective at x.
    """

    n: int
    gram: np.ndarray
    matched: np.ndarray
    couplings: tuple
    fields: np.ndarray
    offset: float


def build_ising(inst):
    """Encode a ChannelInstance as an IsingModel."""
    h, y = inst.h, inst.y
    gram = h.T @ h
    gram = 0.5 * (gram + gram.T)  # exact symmetry; BLAS output can be off at 1 ulp
    matched = h.T @ y
    n = inst.n_t
    couplings = tuple(
        (i, j, 2.0 * float(gram[i, j])) for i in range(n) for j in range(i + 1, n)
    )
    offset = float(y @ y + np.trace(gram))
    return IsingModel(
        n=n,
        gram=gram,
        matched=matched,
        couplings=couplings,
        fields=-2.0 * matched,
        offset=offset,
    )


def ising_energy(model, x):
    """Classical energy sum_{i<j} 2 G_ij x_i x_j - sum_k 2 m_k x_k."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.n,):
        raise ValueError(f"x has shape {x.shape}, expected ({model.n},)")
    if not np.all(np.abs(x) == 1):
        raise ValueError("x entries must be -1 or +1")
    # x G x = tr(G) + 2 sum_{i<j} G_ij x_i x_j because x_k^2 = 1.
    return float(x @ model.gram @ x - np.trace(model.gram) - 2.0 * (model.matched @ x))


def bits_to_spins(bits):
    """Decode a measured bitstring into a symbol vector (1 -> -1, 0 -> +1).

    Accepts a '0'/'1' string (antenna 1 leftmost) or an integer sequence.
    """
    if isinstance(bits, str):
        values = np.array([int(c) for c in bits], dtype=np.int64)
    else:
        values = np.asarray(bits, dtype=np.int64)
    if not np.all((values == 0) | (values == 1)):
        raise ValueError("bits must be 0 or 1")
    return 1 - 2 * values


def spins_to_bits(x):
    """Inverse of bits_to_spins: symbol vector to bitstring, antenna 1 leftmost."""
    x = np.asarray(x)
    if not np.all(np.abs(x) == 1):
        raise ValueError("x entries must be -1 or +1")
    return "".join("1" if v < 0 else "0" for v in x)


def index_to_spins(index, n):
    """Symbol vector encoded by basis index ``index`` (bit k = antenna k)."""
    bits = (int(index) >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int64)


def spins_to_index(x):
    """Basis index of a symbol vector under the global bit convention."""
    x = np.asarray(x)
    if not np.all(np.abs(x) == 1):
        raise ValueError("x entries must be -1 or +1")
    index = 0
    for k, v in enumerate(x):
        if v < 0:
            index |= 1 << k
    return index


def index_to_bitstring(index, n):
    """Printable bitstring for a basis index, antenna 1 leftmost."""
    return "".join("1" if (int(index) >> k) & 1 else "0" for k in range(n))


def bitstring_to_index(bits):
    index = 0
    for k, c in enumerate(bits):
        if c == "1":
            index |= 1 << k
        elif c != "0":
            raise ValueError(f"invalid bit character {c!r}")
    return index
