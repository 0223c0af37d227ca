"""Truncated formal power series on C^{2n} and the operators acting on them.

A :class:`TruncatedSeries` stores the Taylor coefficients H_k of

    H = sum_k H_k z^k zbar^kbar,   |k| <= M

as a sparse dict keyed by flat exponent tuples.  :class:`NormalSeries`
holds series in the action combinations kappa_j = z_j zbar_j only.
All values are immutable by convention: every operation returns a new
object, so concurrent readers are safe.
"""

from dataclasses import dataclass

from . import kernels
from .indices import conj_index, degree, kprime, unit_index

__all__ = [
    "TruncatedSeries",
    "NormalSeries",
    "SignSplit",
    "poisson_bracket",
    "bracket_with_H2",
    "split_by_sign",
    "apply_xi",
    "involution",
    "is_real",
    "polydisk_norm_upper",
    "cauchy_coefficient_bound",
    "majorizes",
    "h2_series",
    "substitute",
    "substitute_many",
]


class TruncatedSeries:
    """Finite Taylor series over C^{2n}, truncated at total degree M.

    Parameters
    ----------
    n : int
        Degrees of freedom (2n complex variables).
    M : int
        Truncation degree; no stored key exceeds it.
    coeffs : dict, optional
        Map from flat exponent tuple (length 2n) to complex coefficient.
    min_degree : int
        3 for elements of the "diamond" subspace, 0 for general series.
    """

    __slots__ = ("n", "M", "min_degree", "coeffs")

    def __init__(self, n, M, coeffs=None, min_degree=0):
        self.n = int(n)
        self.M = int(M)
        self.min_degree = int(min_degree)
        clean = {}
        if coeffs:
            for key, c in coeffs.items():
                key = tuple(int(x) for x in key)
                if len(key) != 2 * self.n or any(x < 0 for x in key):
                    raise ValueError(f"bad multi-index {key} for n={self.n}")
                d = degree(key)
                if d > self.M:
                    raise ValueError(f"key {key} exceeds truncation degree {self.M}")
                if d < self.min_degree:
                    raise ValueError(
                        f"key {key} below min_degree {self.min_degree}"
                    )
                c = complex(c)
                if c != 0:
                    clean[key] = c
        self.coeffs = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def monomial(cls, key, coeff, n, M, min_degree=0):
        return cls(n, M, {tuple(key): coeff}, min_degree=min_degree)

    @classmethod
    def zero(cls, n, M, min_degree=0):
        return cls(n, M, {}, min_degree=min_degree)

    # -- basic queries ------------------------------------------------

    def coeff(self, key):
        return self.coeffs.get(tuple(key), 0j)

    def items(self):
        """Coefficients in canonical graded-lexicographic order."""
        for key in sorted(self.coeffs, key=lambda k: (sum(k), k)):
            yield key, self.coeffs[key]

    def support(self):
        return set(self.coeffs)

    def max_abs(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def is_zero(self):
        return not self.coeffs

    def is_diamond(self):
        return all(degree(k) >= 3 for k in self.coeffs)

    def homogeneous_part(self, d):
        return self._wrap({k: c for k, c in self.coeffs.items() if degree(k) == d})

    def select(self, predicate):
        """Sub-series of the keys satisfying predicate(key)."""
        return self._wrap({k: c for k, c in self.coeffs.items() if predicate(k)})

    def truncate(self, M):
        return TruncatedSeries(
            self.n,
            M,
            {k: c for k, c in self.coeffs.items() if degree(k) <= M},
            min_degree=self.min_degree,
        )

    def _wrap(self, coeffs):
        out = TruncatedSeries.zero(self.n, self.M, self.min_degree)
        out.coeffs = {k: c for k, c in coeffs.items() if c != 0}
        return out

    def _require_same_shape(self, other):
        if self.n != other.n or self.M != other.M:
            raise ValueError(
                f"dimension mismatch: (n={self.n}, M={self.M}) vs "
                f"(n={other.n}, M={other.M})"
            )

    # -- ring operations ----------------------------------------------

    def __add__(self, other):
        self._require_same_shape(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            v = out.get(k, 0j) + c
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        res = TruncatedSeries.zero(self.n, self.M, min(self.min_degree, other.min_degree))
        res.coeffs = out
        return res

    def __neg__(self):
        return self._wrap({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        a = complex(a)
        if a == 0:
            return TruncatedSeries.zero(self.n, self.M, self.min_degree)
        return self._wrap({k: a * c for k, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            self._require_same_shape(other)
            out = TruncatedSeries.zero(self.n, self.M)
            out.coeffs = kernels.sparse_mul(self.coeffs, other.coeffs, self.n, self.M)
            return out
        return self.scale(other)

    __rmul__ = __mul__

    # -- calculus ------------------------------------------------------

    def partial(self, var, j):
        """d/dz_j (var='z') or d/dzbar_j (var='zbar')."""
        pos = j if var == "z" else self.n + j
        out = {}
        for k, c in self.coeffs.items():
            e = k[pos]
            if e:
                kk = list(k)
                kk[pos] = e - 1
                out[tuple(kk)] = c * e
        res = TruncatedSeries.zero(self.n, self.M)
        res.coeffs = out
        return res

    # -- symmetry helpers ----------------------------------------------

    def conjugate_swap(self):
        """Series with coefficients conj(H_{k*}); fixed points are the real series."""
        return self._wrap(
            {conj_index(k): complex(c).conjugate() for k, c in self.coeffs.items()}
        )

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries)
            and self.n == other.n
            and self.M == other.M
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        terms = ", ".join(f"{k}: {c:.6g}" for k, c in list(self.items())[:6])
        more = "" if len(self.coeffs) <= 6 else f", ... ({len(self.coeffs)} terms)"
        return f"TruncatedSeries(n={self.n}, M={self.M}, {{{terms}{more}}})"


@dataclass(frozen=True)
class SignSplit:
    """Partition of a diamond series by the sign of <omega, kprime>."""

    h0: TruncatedSeries
    hplus: TruncatedSeries
    hminus: TruncatedSeries

    def reassemble(self):
        return self.h0 + self.hplus + self.hminus


class NormalSeries:
    """Series in the actions kappa_j = z_j zbar_j.

    Keys are exponent tuples l of kappa^l; the embedding into
    TruncatedSeries uses keys (l, l), so the z-degree of kappa^l is 2|l|
    and is bounded by M.
    """

    __slots__ = ("n", "M", "coeffs")

    def __init__(self, n, M, coeffs=None):
        self.n = int(n)
        self.M = int(M)
        clean = {}
        if coeffs:
            for l, c in coeffs.items():
                l = tuple(int(x) for x in l)
                if len(l) != self.n or any(x < 0 for x in l):
                    raise ValueError(f"bad kappa exponent {l}")
                if 2 * sum(l) > self.M:
                    raise ValueError(f"kappa^{l} exceeds truncation degree {self.M}")
                c = complex(c)
                if c != 0:
                    clean[l] = c
        self.coeffs = clean

    @classmethod
    def monomial(cls, l, coeff, n, M):
        return cls(n, M, {tuple(l): coeff})

    @classmethod
    def zero(cls, n, M):
        return cls(n, M, {})

    @classmethod
    def extract(cls, series):
        """Inverse of embed(): pull the kprime = 0 part out of a TruncatedSeries."""
        out = {}
        for k, c in series.coeffs.items():
            if any(kprime(k)):
                raise ValueError(f"key {k} has kprime != 0; not a normal series")
            out[k[: series.n]] = c
        return cls(series.n, series.M, out)

    def embed(self):
        s = TruncatedSeries.zero(self.n, self.M)
        s.coeffs = {l + l: c for l, c in self.coeffs.items()}
        return s

    def items(self):
        for l in sorted(self.coeffs, key=lambda k: (sum(k), k)):
            yield l, self.coeffs[l]

    def coeff(self, l):
        return self.coeffs.get(tuple(l), 0j)

    def is_zero(self):
        return not self.coeffs

    def min_kappa_degree(self):
        return min((sum(l) for l in self.coeffs), default=0)

    def max_abs(self):
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def _wrap(self, coeffs):
        out = NormalSeries.zero(self.n, self.M)
        out.coeffs = {l: c for l, c in coeffs.items() if c != 0}
        return out

    def __add__(self, other):
        if self.n != other.n or self.M != other.M:
            raise ValueError("dimension mismatch")
        out = dict(self.coeffs)
        for l, c in other.coeffs.items():
            v = out.get(l, 0j) + c
            if v == 0:
                out.pop(l, None)
            else:
                out[l] = v
        return self._wrap(out)

    def __neg__(self):
        return self._wrap({l: -c for l, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a):
        return self._wrap({l: a * c for l, c in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, NormalSeries):
            if self.n != other.n or self.M != other.M:
                raise ValueError("dimension mismatch")
            kmax = self.M // 2
            out = {}
            for la, ca in self.coeffs.items():
                for lb, cb in other.coeffs.items():
                    l = tuple(a + b for a, b in zip(la, lb))
                    if sum(l) <= kmax:
                        out[l] = out.get(l, 0j) + ca * cb
            return self._wrap(out)
        return self.scale(other)

    __rmul__ = __mul__

    def partial(self, j):
        """d/dkappa_j."""
        out = {}
        for l, c in self.coeffs.items():
            if l[j]:
                ll = list(l)
                ll[j] = l[j] - 1
                out[tuple(ll)] = out.get(tuple(ll), 0j) + c * l[j]
        return self._wrap(out)

    def dir_derivative(self, q):
        """<q, d> applied to this series."""
        out = NormalSeries.zero(self.n, self.M)
        for j, qj in enumerate(q):
            if qj:
                out = out + self.partial(j).scale(qj)
        return out

    def exp(self, max_kappa_deg=None):
        """exp of a series with no constant term, truncated in kappa degree."""
        if self.min_kappa_degree() < 1 and not self.is_zero():
            raise ValueError("exp requires a series vanishing at kappa = 0")
        kmax = self.M // 2 if max_kappa_deg is None else max_kappa_deg
        result = NormalSeries.monomial((0,) * self.n, 1.0, self.n, self.M)
        term = result
        k = 1
        while True:
            term = (term * self).scale(1.0 / k)
            term = term._wrap(
                {l: c for l, c in term.coeffs.items() if sum(l) <= kmax}
            )
            if term.is_zero():
                break
            result = result + term
            k += 1
        return result

    def norm_upper(self, rho):
        """l1 coefficient bound for the sup over the polydisk of radius rho."""
        return sum(abs(c) * rho ** (2 * sum(l)) for l, c in self.coeffs.items())

    def __eq__(self, other):
        return (
            isinstance(other, NormalSeries)
            and self.n == other.n
            and self.M == other.M
            and self.coeffs == other.coeffs
        )

    def __repr__(self):
        terms = ", ".join(f"kappa^{l}: {c:.6g}" for l, c in list(self.items())[:6])
        return f"NormalSeries(n={self.n}, M={self.M}, {{{terms}}})"


# -- operators ---------------------------------------------------------


def poisson_bracket(F, G):
    """{F, G} = i sum_j (dF/dzbar_j dG/dz_j - dF/dz_j dG/dzbar_j), truncated at M."""
    F._require_same_shape(G)
    out = TruncatedSeries.zero(F.n, F.M)
    out.coeffs = kernels.sparse_bracket(F.coeffs, G.coeffs, F.n, F.M)
    return out


def h2_series(freq, M):
    """The quadratic part H_2 = sum_j omega_j z_j zbar_j."""
    n = freq.n
    coeffs = {unit_index(j, n): freq.omega[j] for j in range(n)}
    return TruncatedSeries(n, M, coeffs)


def bracket_with_H2(F, freq):
    """{F, H_2} computed coefficientwise: H_k -> i <omega, k'> H_k."""
    if F.n != freq.n:
        raise ValueError("dimension mismatch between series and frequencies")
    return F._wrap(
        {k: 1j * freq.inner(kprime(k)) * c for k, c in F.coeffs.items()}
    )


def split_by_sign(H, freq):
    """Partition a diamond series into H^0, H^+, H^- by sigma of kprime."""
    h0, hp, hm = {}, {}, {}
    for k, c in H.coeffs.items():
        s = freq.sigma(kprime(k))
        if s > 0:
            hp[k] = c
        elif s < 0:
            hm[k] = c
        else:
            h0[k] = c
    return SignSplit(h0=H._wrap(h0), hplus=H._wrap(hp), hminus=H._wrap(hm))


def apply_xi(H, freq):
    """xi H = -i sum sigma_{k'} H_k z^k: coefficientwise multiply by -i sigma."""
    out = {}
    for k, c in H.coeffs.items():
        s = freq.sigma(kprime(k))
        if s:
            out[k] = -1j * s * c
    return H._wrap(out)


def involution(H, sign):
    """Compose with I^+ (z, zbar) -> (zbar, z) or I^- (z, zbar) -> -(zbar, z)."""
    if sign not in (+1, -1, "+", "-"):
        raise ValueError("sign must be +1 or -1")
    neg = sign in (-1, "-")
    out = {}
    for k, c in H.coeffs.items():
        f = -1.0 if (neg and degree(k) % 2) else 1.0
        out[conj_index(k)] = f * c
    return H._wrap(out)


def is_real(H, tol=0.0):
    """Reality check: |conj(H_k) - H_{k*}| <= tol for every stored k."""
    for k, c in H.coeffs.items():
        if abs(complex(c).conjugate() - H.coeff(conj_index(k))) > tol:
            return False
    return True


def polydisk_norm_upper(H, rho):
    """sum_k |H_k| rho^{|k|}: an upper bound for sup over the polydisk D_rho."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return sum(abs(c) * rho ** degree(k) for k, c in H.coeffs.items())


def cauchy_coefficient_bound(norm_bound, rho, key):
    """Cauchy estimate |H_k| <= c rho^{-|k|} given ||H||_rho <= c."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    if norm_bound < 0:
        raise ValueError("norm_bound must be nonnegative")
    return norm_bound * rho ** (-degree(key))


def majorizes(F, Fbar):
    """True iff Fbar has nonnegative real coefficients and |F_k| <= Fbar_k."""
    F._require_same_shape(Fbar)
    for k, c in Fbar.coeffs.items():
        if c.imag != 0 or c.real < 0:
            return False
    for k, c in F.coeffs.items():
        if abs(c) > Fbar.coeff(k).real:
            return False
    return True


# -- substitution ------------------------------------------------------


def _monomial_values(keys, components, one):
    """Evaluate z^k for every requested key, sharing subproducts."""
    cache = {(0,) * (2 * one.n): one}

    def value(key):
        v = cache.get(key)
        if v is not None:
            return v
        pos = next(i for i, e in enumerate(key) if e)
        prev = list(key)
        prev[pos] -= 1
        v = value(tuple(prev)) * components[pos]
        cache[key] = v
        return v

    return {key: value(key) for key in keys}


def substitute_many(series_list, components, max_deg):
    """Compose several series with the same component map (z, zbar) -> W.

    components is a list of 2n TruncatedSeries; all outputs are truncated
    at max_deg.  Sharing the monomial cache across the batch is what makes
    the transform integration affordable.
    """
    if not series_list:
        return []
    n = components[0].n
    work = [s.truncate(max_deg) if s.M != max_deg else s for s in components]
    one = TruncatedSeries.monomial((0,) * (2 * n), 1.0, n, max_deg)
    keys = set()
    for s in series_list:
        keys.update(s.coeffs)
    values = _monomial_values(keys, work, one)
    out = []
    for s in series_list:
        acc = TruncatedSeries.zero(n, max_deg)
        for k, c in s.coeffs.items():
            acc = acc + values[k].scale(c)
        out.append(acc)
    return out


def substitute(series, components, max_deg):
    """Compose one series with the component map; see substitute_many."""
    return substitute_many([series], components, max_deg)[0]
