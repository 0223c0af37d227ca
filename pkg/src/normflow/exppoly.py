"""Exact algebra of coefficient trajectories c * delta^s * exp(-nu*delta).

Exponents are kept exact: each term carries a sorted multiset of nonzero
integer vectors q, and nu is the sum of the certified values
omega_q = |<omega, q>|.  Nonresonance makes "nu = 0 iff the multiset is
empty" an exact test, which floats alone could not provide; the cached
float value of nu enters only numeric evaluation and integration
constants.
"""

import math

__all__ = ["ExpPolynomial"]

# terms below this magnitude are purged after each flow degree level
PURGE = 1e-300


def _canon_atoms(atoms):
    out = tuple(sorted(tuple(int(x) for x in q) for q in atoms))
    for q in out:
        if not any(q):
            raise ValueError("exponent atoms must be nonzero integer vectors")
    return out


class ExpPolynomial:
    """Finite sum of terms c * delta^s * exp(-nu(atoms) * delta).

    terms maps (s, atoms) -> complex with atoms a sorted tuple of q-tuples.
    Instances are tied to one FrequencyVector; mixing frequencies raises.
    """

    __slots__ = ("freq", "terms")

    def __init__(self, freq, terms=None):
        self.freq = freq
        clean = {}
        if terms:
            for (s, atoms), c in terms.items():
                c = complex(c)
                if abs(c) < PURGE:
                    continue
                s = int(s)
                if s < 0:
                    raise ValueError("delta powers must be nonnegative")
                clean[(s, _canon_atoms(atoms))] = c
        self.terms = clean

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, freq):
        return cls(freq, {})

    @classmethod
    def constant(cls, freq, c):
        return cls(freq, {(0, ()): c})

    @classmethod
    def term(cls, freq, c, s=0, atoms=()):
        return cls(freq, {(s, tuple(atoms)): c})

    # -- helpers ---------------------------------------------------------

    def _require_same_freq(self, other):
        if self.freq is not other.freq:
            raise ValueError("exp-polynomials built over different frequency vectors")

    def _wrap(self, terms):
        out = ExpPolynomial.zero(self.freq)
        out.terms = {k: c for k, c in terms.items() if abs(c) >= PURGE}
        return out

    def is_zero(self):
        return not self.terms

    def max_abs(self):
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __eq__(self, other):
        return (
            isinstance(other, ExpPolynomial)
            and self.freq is other.freq
            and self.terms == other.terms
        )

    def __repr__(self):
        bits = []
        for (s, atoms), c in sorted(self.terms.items()):
            nu = self.freq.nu(atoms)
            bits.append(f"({c:.6g})*d^{s}*e^(-{nu:.4g} d)")
        return "ExpPolynomial[" + " + ".join(bits[:6]) + ("...]" if len(bits) > 6 else "]")

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        self._require_same_freq(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return self._wrap(out)

    def __neg__(self):
        return self._wrap({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        return self._wrap({k: a * c for k, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, ExpPolynomial):
            return self.scale(other)
        self._require_same_freq(other)
        out = {}
        for (s1, a1), c1 in self.terms.items():
            for (s2, a2), c2 in other.terms.items():
                key = (s1 + s2, tuple(sorted(a1 + a2)))
                out[key] = out.get(key, 0j) + c1 * c2
        return self._wrap(out)

    __rmul__ = __mul__

    # -- analysis ----------------------------------------------------------

    def integrate(self):
        """F(delta) = integral from 0 to delta, in closed form; F(0) = 0."""
        out = {}

        def add(key, c):
            out[key] = out.get(key, 0j) + c

        for (s, atoms), c in self.terms.items():
            nu = self.freq.nu(atoms)
            if not atoms:
                add((s + 1, ()), c / (s + 1))
                continue
            # integral of d^s e^{-nu d} = s!/nu^{s+1} - e^{-nu d} sum_j (s!/j!) d^j / nu^{s+1-j}
            sf = math.factorial(s)
            add((0, ()), c * sf / nu ** (s + 1))
            for j in range(s + 1):
                add((j, atoms), -c * (sf / math.factorial(j)) / nu ** (s + 1 - j))
        return self._wrap(out)

    def eval(self, delta):
        """Numeric value at delta >= 0 (cached nu values)."""
        if delta < 0:
            raise ValueError("delta must be nonnegative")
        total = 0j
        for (s, atoms), c in self.terms.items():
            total += c * delta**s * math.exp(-self.freq.nu(atoms) * delta)
        return total

    def limit_infinity(self):
        """(finite, value) of the delta -> +infinity limit.

        Finite iff every nu = 0 term has s = 0; then the limit is the
        (s=0, nu=0) coefficient.
        """
        for (s, atoms), _ in self.terms.items():
            if not atoms and s > 0:
                return False, None
        return True, self.terms.get((0, ()), 0j)

    def nu0_polynomial(self):
        """The nu = 0 part as a dict s -> coefficient (a polynomial in delta)."""
        return {s: c for (s, atoms), c in self.terms.items() if not atoms}

    def drop_decaying(self):
        """Keep only the nu = 0 terms (the asymptotic part of the trajectory)."""
        return self._wrap({k: c for k, c in self.terms.items() if not k[1]})

    def is_polynomial(self):
        return all(not atoms for (_, atoms) in self.terms)
