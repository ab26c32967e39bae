"""Characters of the four infinite tensor-product series W_{i,q}(V).

For g acting on V with multiplicative eigenvalues x the traces are

    i=1:  prod_n det(1+q^{n-1/2}g) / det(1-q^{n}g)
    i=2:  prod_n det(1-q^{n-1/2}g) / det(1+q^{n}g)
    i=3:  prod_n det(1+q^{n}g)     / det(1-q^{n-1/2}g)
    i=4:  prod_n det(1-q^{n}g)     / det(1+q^{n-1/2}g)

understood as Taylor series at q = 0.  Characters are computed from the
eigenvalue list, never from matrices.

Exact backend: eigenvalues are integers w standing for the monomials
s^{2w} = e^{2 i pi w z} (complexified rotation data), which keeps every
coefficient inside Q(i)(s); anything else belongs to the numeric backend.
"""

from __future__ import annotations

import cmath

from .ring import GaussianRational, RationalFunctionQi
from .qseries import PSeries

# (numerator sign, numerator offset, denominator sign, denominator offset);
# p-exponents run over 4n + offset, offset -2 marks the q^{n-1/2} family
_W_LAYOUT = {
    1: (+1, -2, +1, 0),
    2: (-1, -2, -1, 0),
    3: (+1, 0, +1, -2),
    4: (-1, 0, -1, -2),
}


class WittenDenominatorError(ValueError):
    """A denominator factor det(1 -+ q^n g) vanished."""

    def __init__(self, message, n):
        super().__init__(message)
        self.n = n


_GR_ONE = GaussianRational.one()


def _exponents(offset, order):
    out = []
    n = 1
    while 4 * n + offset <= order:
        out.append(4 * n + offset)
        n += 1
    return out


def witten_char(i, eigenvalues, params, backend="numeric"):
    """Character of W_{i,q} on the representation with the given eigenvalue
    list; PSeries over Q(i)(s) in the exact backend, complex otherwise."""
    if i not in _W_LAYOUT:
        raise ValueError("Witten series index must be 1..4")
    if backend == "exact":
        return _witten_exact(i, eigenvalues, params.require_order())
    if backend == "numeric":
        return _witten_numeric(i, eigenvalues, params)
    raise ValueError(f"unknown backend {backend!r}")


def _witten_exact(i, weights, order):
    for w in weights:
        if not isinstance(w, int):
            raise ValueError(
                "exact Witten characters need integer weights (eigenvalue "
                f"s^(2w)); got {w!r}"
            )
    nsign, noff, dsign, doff = _W_LAYOUT[i]
    ls = [dict() for _ in range(order + 1)]
    ls[0][0] = _GR_ONE

    def mul_factor(e, d, sign):
        for k in range(order, e - 1, -1):
            src = ls[k - e]
            if src:
                _accum(ls[k], src, d, sign)

    def mul_geometric(e, d, sign):
        for k in range(e, order + 1):
            src = ls[k - e]
            if src:
                _accum(ls[k], src, d, sign)

    for e in _exponents(noff, order):
        for w in weights:
            mul_factor(e, 2 * w, nsign)
    for e in _exponents(doff, order):
        for w in weights:
            mul_geometric(e, 2 * w, dsign)
    coeffs = [RationalFunctionQi.from_laurent(slot) for slot in ls]
    return PSeries(coeffs, order)


def _accum(dst, src, d, sign):
    for e, c in src.items():
        key = e + d
        val = c if sign > 0 else -c
        old = dst.get(key)
        if old is None:
            dst[key] = val
        else:
            new = old + val
            if new:
                dst[key] = new
            else:
                del dst[key]


def _witten_numeric(i, eigenvalues, params):
    xs = [complex(x) for x in eigenvalues]
    if not xs:
        return 1.0 + 0j
    q = params.q
    nsign, noff, dsign, doff = _W_LAYOUT[i]
    big = max(max(abs(x) for x in xs), 1.0)
    nmax = params.cutoff(big)
    # q^{1/2} taken as e^{i pi tau}, not a principal-branch power
    qh = cmath.exp(1j * cmath.pi * params.tau)
    out = 1.0 + 0j
    qn = 1.0 + 0j
    for n in range(1, nmax + 1):
        qn *= q
        qnum = qn / qh if noff else qn
        qden = qn / qh if doff else qn
        for x in xs:
            out *= 1.0 + nsign * qnum * x
            den = 1.0 - dsign * qden * x
            if abs(den) < 1e-12:
                raise WittenDenominatorError(
                    f"denominator factor vanishes at n = {n} "
                    f"(|1 - ({dsign}) q^... x| = {abs(den):.2e})",
                    n,
                )
            out /= den
    return out
