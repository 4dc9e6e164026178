"""Reference computations that share no code path with the package."""

import math
from collections import defaultdict

import numpy as np


def random_unitary(m, rng):
    z = (rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(d, rng):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def _apply_creation(poly, row, species=None):
    """Multiply a Fock polynomial by ``sum_k row[k] a_k^dagger``.

    Keys are ``(counts, marks)``: ``counts`` for the common photons and
    ``marks`` for the output mode of a tagged photon (or ``None``).
    """
    out = defaultdict(complex)
    for (counts, mark), amp in poly.items():
        for k, u in enumerate(row):
            if u == 0:
                continue
            if species is None:
                new = list(counts)
                new[k] += 1
                out[(tuple(new), mark)] += amp * u
            else:
                out[(counts, k)] += amp * u
    return out


def fock_probabilities(u, distinguishable_first=False):
    """Pattern probabilities by expanding ``prod_i (sum_k u_ik a_k^dagger)|0>``.

    With ``distinguishable_first`` the photon from input mode 0 carries an
    orthogonal internal state and is tracked separately.
    """
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    poly = {(tuple([0] * m), None): 1 + 0j}
    for i in range(m):
        tagged = distinguishable_first and i == 0
        poly = _apply_creation(poly, u[i], species="tag" if tagged else None)
    probs = defaultdict(float)
    for (counts, mark), amp in poly.items():
        # a^dagger^n |0> = sqrt(n!) |n>
        weight = math.prod(math.factorial(c) for c in counts)
        pattern = list(counts)
        if mark is not None:
            pattern[mark] += 1
        probs[tuple(pattern)] += abs(amp) ** 2 * weight
    return dict(probs)


def pi_complex_sum(f, d):
    """``sum_i prod_j f_ij ** d_j`` evaluated in floating point."""
    f = np.asarray(f, dtype=complex)
    return complex(np.sum(np.prod(f ** np.asarray(d)[None, :], axis=1)))


def kron_power(h, n):
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, h)
    return out


def single_photon_routings(u, d):
    """Distinguishable-everything oracle for ``M`` photons (used for 2 modes)."""
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    total = 0.0
    for outs in np.ndindex(*(m,) * m):
        counts = np.bincount(outs, minlength=m)
        if tuple(counts) == tuple(d):
            total += np.prod([abs(u[i, outs[i]]) ** 2 for i in range(m)])
    return total
