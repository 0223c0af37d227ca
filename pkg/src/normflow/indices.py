"""Multi-index arithmetic and nonresonant frequency data.

A multi-index is a flat tuple ``(k_1, ..., k_n, kbar_1, ..., kbar_n)`` of
nonnegative integers: the exponents of the monomial
``z^k zbar^kbar``.  The derived integer vector ``kprime = kbar - k``
drives all sign/resonance bookkeeping.
"""

from fractions import Fraction
from itertools import product

import numpy as np

__all__ = [
    "NonresonanceError",
    "FrequencyVector",
    "degree",
    "kprime",
    "conj_index",
    "unit_index",
    "minimal_index",
    "triangle",
    "abs_vector",
]


class NonresonanceError(ValueError):
    """Nonresonance certificate missing or violated."""


def degree(key):
    """Total degree |k| of a multi-index key."""
    return sum(key)


def kprime(key):
    """kbar - k as an integer n-vector."""
    n = len(key) // 2
    return tuple(key[n + j] - key[j] for j in range(n))


def conj_index(key):
    """The conjugate index k* = (kbar, k)."""
    n = len(key) // 2
    return key[n:] + key[:n]


def unit_index(j, n):
    """The index e_j = (e_j, e_j), the exponent of kappa_j = z_j zbar_j."""
    key = [0] * (2 * n)
    key[j] = 1
    key[n + j] = 1
    return tuple(key)


def minimal_index(q):
    """Minimal multi-index k_q with kprime(k_q) = q.

    Componentwise (k_q)_j = max(-q_j, 0), (kbar_q)_j = max(q_j, 0), so
    min{(k_q)_j, (kbar_q)_j} = 0 for every j.
    """
    k = tuple(max(-qj, 0) for qj in q)
    kbar = tuple(max(qj, 0) for qj in q)
    return k + kbar


def triangle(q, p):
    """The componentwise 'triangle' product q <| p.

    Returns a tuple of Fractions; the only fractional case is
    q_j = -p_j, which contributes q_j / 2.  Downstream combinations
    [q <| p] + [p <| q] are always integral.
    """
    out = []
    for qj, pj in zip(q, p):
        if qj * pj >= 0 or abs(pj) < abs(qj):
            out.append(Fraction(0))
        elif qj == -pj:
            out.append(Fraction(qj, 2))
        else:
            out.append(Fraction(qj))
    return tuple(out)


def abs_vector(s):
    """[s] = (|s_1|, ..., |s_n|)."""
    return tuple(abs(sj) for sj in s)


def combined_triangle(q, p):
    """l = [q <| p] + [p <| q], asserted integral, as an int tuple."""
    l = tuple(a + b for a, b in zip(abs_vector(triangle(q, p)), abs_vector(triangle(p, q))))
    assert all(x.denominator == 1 for x in l), "triangle combination must be integral"
    return tuple(int(x) for x in l)


def _iter_nonzero_q(n, max_order):
    """All nonzero integer n-vectors with l1 norm <= max_order."""
    rng = range(-max_order, max_order + 1)
    for q in product(rng, repeat=n):
        if any(q) and sum(abs(x) for x in q) <= max_order:
            yield q


class FrequencyVector:
    """Frequency vector with a finite nonresonance certificate.

    Construction checks |<omega, q>| > resonance_tolerance for every
    nonzero integer vector q with |q| <= max_checked_order.  Queries for
    sigma_q and omega_q outside the certified range raise
    NonresonanceError rather than returning an unverified sign.
    """

    def __init__(self, omega, resonance_tolerance=1e-9, max_checked_order=16):
        self.omega = np.asarray(omega, dtype=float)
        if self.omega.ndim != 1 or self.omega.size == 0:
            raise ValueError("omega must be a nonempty 1-d real vector")
        if resonance_tolerance <= 0:
            raise ValueError("resonance_tolerance must be positive")
        self.n = self.omega.size
        self.resonance_tolerance = float(resonance_tolerance)
        self.max_checked_order = int(max_checked_order)
        self._nu_cache = {}
        for q in _iter_nonzero_q(self.n, self.max_checked_order):
            if abs(self.inner(q)) <= self.resonance_tolerance:
                raise NonresonanceError(
                    f"resonance within tolerance at q={q}: <omega,q>={self.inner(q):.3e}"
                )

    def inner(self, q):
        """<omega, q> without any certificate check."""
        return float(np.dot(self.omega, q))

    def _check_order(self, q):
        if sum(abs(int(x)) for x in q) > self.max_checked_order:
            raise NonresonanceError(
                f"|q|={sum(abs(int(x)) for x in q)} exceeds certified order "
                f"{self.max_checked_order}"
            )

    def sigma_omega(self, q):
        """(sigma_q, omega_q) = (sign <omega,q>, |<omega,q>|).

        sigma_q = 0 iff q = 0; the sign is trustworthy because the
        certificate rules out |<omega,q>| below the tolerance.
        """
        self._check_order(q)
        if not any(q):
            return 0, 0.0
        v = self.inner(q)
        return (1 if v > 0 else -1), abs(v)

    def sigma(self, q):
        return self.sigma_omega(q)[0]

    def omega_abs(self, q):
        return self.sigma_omega(q)[1]

    def nu(self, atoms):
        """Sum of omega_q over a multiset (tuple) of q-vectors."""
        val = self._nu_cache.get(atoms)
        if val is None:
            val = sum(self.omega_abs(q) for q in atoms)
            self._nu_cache[atoms] = val
        return val

    def __repr__(self):
        return (
            f"FrequencyVector(omega={self.omega.tolist()}, "
            f"tol={self.resonance_tolerance}, order<={self.max_checked_order})"
        )


def sigma_omega(freq, q):
    """Module-level alias for FrequencyVector.sigma_omega."""
    return freq.sigma_omega(q)
