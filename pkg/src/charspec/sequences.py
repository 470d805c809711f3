"""Sequence descriptions consumed by the product-series evaluator.

A :class:`SequenceSpec` describes a (possibly infinite, possibly two-sided)
sequence ``x_k`` through callables rather than materialized arrays, together
with whatever analytic tail information is available:

* ``tail_sum_bound(n)`` - a nonincreasing upper bound on
  ``sum_{k >= n} |x_k * x_{k+1}|`` (the quantity every convergence
  statement is phrased in terms of),
* ``tail_model`` - closed forms for the first few weighted tail sums of the
  consecutive products, which lets the evaluator start its backward
  recurrence from an analytically corrected seed instead of from 1.

Only the consecutive products ``p_k = x_k * x_{k+1}`` ever enter a
computation, so specs may supply a vectorized ``products_vec`` and skip
``term`` entirely on hot paths.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class TailBound:
    """Certificate attached to a truncated evaluation.

    ``index`` is the last product index that entered the computation and
    ``residual`` bounds the difference to the untruncated value.  ``method``
    records which route produced the bound ("plain" for the doubly
    exponential worst-case estimate, "tail-model" for the corrected-seed
    route, "fit" when the bound itself came from a fitted decay envelope).
    """

    index: int
    residual: float
    method: str = "plain"


@dataclass(frozen=True)
class TailModel:
    """Closed-form tail sums for products decaying past ``min_index``.

    ``sigma(m) = sum_{k>=m} p_k``; ``tau(m) = sum_{k>=m} p_k*sigma(k+2)``;
    ``upsilon(m) = sum_{k>=m} p_k*tau(k+2)``.  ``abs_bound(m)`` bounds
    ``sum_{k>=m} |p_k|`` and must be nonincreasing in ``m``.  ``order`` is
    the number of leading terms of the alternating expansion that sigma/tau/
    upsilon reproduce exactly: 4 when all three are supplied, 2 when only
    sigma is.  The remainder of the expansion at depth ``s`` is bounded by
    ``S^s * exp(S) / s!`` with ``S = abs_bound(m)``.
    """

    sigma: Callable[[int], complex]
    abs_bound: Callable[[int], float]
    min_index: int
    tau: Optional[Callable[[int], complex]] = None
    upsilon: Optional[Callable[[int], complex]] = None
    order: int = 4

    def seed(self, m: int) -> complex:
        v = 1.0 - self.sigma(m)
        if self.order >= 4:
            v = v + self.tau(m) - self.upsilon(m)
        return v

    def remainder(self, m: int) -> float:
        s = self.abs_bound(m)
        try:
            return s**self.order * math.exp(s) / math.factorial(self.order)
        except OverflowError:
            # the bound is real but useless at this index; callers grow m
            return math.inf


@dataclass(frozen=True)
class LeftTailModel:
    """Mirror of :class:`TailModel` for left-infinite sequences.

    Here ``sigma(m) = sum_{k<=m} p_k`` and so on; ``abs_bound(m)`` bounds
    ``sum_{k<=m} |p_k|`` and must be nonincreasing as ``m`` decreases.
    Valid for ``m <= max_index``.
    """

    sigma: Callable[[int], complex]
    abs_bound: Callable[[int], float]
    max_index: int
    tau: Optional[Callable[[int], complex]] = None
    upsilon: Optional[Callable[[int], complex]] = None
    order: int = 4

    def seed(self, m: int) -> complex:
        # value of the full left-infinite functional ending at index m,
        # expanded around 1:  F(-inf..m) = 1 - sigma(m-1) + tau(m-1) - ...
        v = 1.0 - self.sigma(m - 1)
        if self.order >= 4:
            v = v + self.tau(m - 1) - self.upsilon(m - 1)
        return v

    def remainder(self, m: int) -> float:
        s = self.abs_bound(m - 1)
        try:
            return s**self.order * math.exp(s) / math.factorial(self.order)
        except OverflowError:
            return math.inf


@dataclass
class SequenceSpec:
    """Description of the sequence fed to the product-series functional.

    ``range`` is ``(N1, N2)`` with ``None`` standing for an infinite
    endpoint.  ``term(k)`` must be valid for every k in range; callers that
    can produce products in bulk should set ``products_vec(a, b)`` returning
    ``p_k = x_k*x_{k+1}`` for ``k = a..b`` inclusive.
    """

    term: Callable[[int], complex]
    range: Tuple[Optional[int], Optional[int]] = (1, None)
    tail_sum_bound: Optional[Callable[[int], float]] = None
    left_tail_sum_bound: Optional[Callable[[int], float]] = None
    tail_model: Optional[TailModel] = None
    left_tail_model: Optional[LeftTailModel] = None
    products_vec: Optional[Callable[[int, int], np.ndarray]] = field(
        default=None, repr=False
    )
    is_real: bool = False

    def products(self, a: int, b: int) -> np.ndarray:
        """Consecutive products ``p_k`` for ``k = a..b`` inclusive."""
        if b < a:
            dt = np.float64 if self.is_real else np.complex128
            return np.empty(0, dtype=dt)
        if self.products_vec is not None:
            p = np.asarray(self.products_vec(a, b))
        else:
            xs = np.array([self.term(k) for k in range(a, b + 2)])
            p = xs[:-1] * xs[1:]
        if self.is_real:
            return np.ascontiguousarray(p.real if np.iscomplexobj(p) else p,
                                        dtype=np.float64)
        return np.ascontiguousarray(p, dtype=np.complex128)


def telescoping_tail_model(a: complex, c: complex) -> TailModel:
    """Exact tail sums for products ``p_k = c / ((k - a)(k + 1 - a))``.

    The partial fractions telescope:

        sigma(m)   = c / (m - a)
        tau(m)     = c^2 / (2 (m - a)(m + 1 - a))
        upsilon(m) = c^3 / (6 (m - a)(m + 1 - a)(m + 2 - a))

    and ``sum_{k>=m} |p_k| <= |c| / (m - Re a)`` once ``m > Re a`` (each
    factor is then at least as large as its real part, and the real-shift
    sum telescopes).
    """
    ra = a.real if isinstance(a, complex) else float(a)
    ac = abs(c)
    min_index = int(math.floor(max(ra, 0.0))) + 2

    def sigma(m: int) -> complex:
        return c / (m - a)

    def tau(m: int) -> complex:
        return c * c / (2.0 * (m - a) * (m + 1 - a))

    def upsilon(m: int) -> complex:
        return c**3 / (6.0 * (m - a) * (m + 1 - a) * (m + 2 - a))

    def abs_bound(m: int) -> float:
        if m <= ra:
            return math.inf
        return ac / (m - ra)

    return TailModel(sigma=sigma, tau=tau, upsilon=upsilon,
                     abs_bound=abs_bound, min_index=min_index, order=4)


def telescoping_left_tail_model(a: complex, c: complex) -> LeftTailModel:
    """Left-sided analogue of :func:`telescoping_tail_model`.

    For ``p_k = c / ((k - a)(k + 1 - a))`` summed over ``k <= m`` with
    ``m`` well below ``Re a``:

        sigma(m)   = -c / (m + 1 - a)
        tau(m)     = c^2 / (2 (m - a)(m + 1 - a))
        upsilon(m) = -c^3 / (6 (m - 1 - a)(m - a)(m + 1 - a))

    and ``sum_{k<=m} |p_k| <= |c| / (Re a - m - 1)`` for ``m <= Re a - 2``.
    """
    ra = a.real if isinstance(a, complex) else float(a)
    ac = abs(c)
    max_index = int(math.ceil(ra)) - 2

    def sigma(m: int) -> complex:
        return -c / (m + 1 - a)

    def tau(m: int) -> complex:
        return c * c / (2.0 * (m - a) * (m + 1 - a))

    def upsilon(m: int) -> complex:
        return -(c**3) / (6.0 * (m - 1 - a) * (m - a) * (m + 1 - a))

    def abs_bound(m: int) -> float:
        if m >= ra - 1:
            return math.inf
        return ac / (ra - m - 1.0)

    return LeftTailModel(sigma=sigma, tau=tau, upsilon=upsilon,
                         abs_bound=abs_bound, max_index=max_index, order=4)


def geometric_tail_model(c: complex, rho: complex) -> TailModel:
    """Exact tail sums for exactly geometric products ``p_k = c * rho**(k-1)``.

        sigma(m)   = c rho^(m-1) / (1 - rho)
        tau(m)     = c^2 rho^(2m) / ((1 - rho)(1 - rho^2))
        upsilon(m) = c^3 rho^(3m+3) / ((1 - rho)(1 - rho^2)(1 - rho^3))

    Requires ``|rho| < 1``.
    """
    r = abs(rho)
    if r >= 1.0:
        raise ValueError("geometric ratio must satisfy |rho| < 1")
    ac = abs(c)

    def sigma(m: int) -> complex:
        return c * rho ** (m - 1) / (1.0 - rho)

    def tau(m: int) -> complex:
        return c * c * rho ** (2 * m) / ((1.0 - rho) * (1.0 - rho**2))

    def upsilon(m: int) -> complex:
        return (c**3 * rho ** (3 * m + 3)
                / ((1.0 - rho) * (1.0 - rho**2) * (1.0 - rho**3)))

    def abs_bound(m: int) -> float:
        return ac * r ** (m - 1) / (1.0 - r)

    return TailModel(sigma=sigma, tau=tau, upsilon=upsilon,
                     abs_bound=abs_bound, min_index=1, order=4)
