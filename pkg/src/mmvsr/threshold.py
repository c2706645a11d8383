"""Recovery-rate threshold and closed-form bounds.

The central quantity is, for a value matrix W with rows indexed by [k],

    c(W) = min over nonempty T of (1/(2|T|)) * log2 det(I + a * W_T' W_T)

with a = sigma_a^2 / sigma_z^2 and W_T the rows of W indexed by T. All
rates are in bits: reliable support recovery needs roughly
n > log2(m) / c(W) measurements per measurement vector, and the same
log-det expressions describe the rate region of the matching multi-sender,
l-receiver Gaussian channel.

Log-determinants are evaluated as 2 * sum(log2 diag(L)) from a Cholesky
factor L, which cannot overflow for large variance ratios.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, InvalidInputError, NumericError
from .model import SignalValueMatrix, ensure_valid

MAX_SUBSET_K = 20


@dataclass(frozen=True)
class ThresholdReport:
    """c(W) with the attaining subset and every per-subset rate.

    Subsets are 1-based sorted tuples. Ties in the minimum are broken by
    smallest cardinality, then lexicographic order.
    """

    c_of_w: float
    argmin_subset: tuple
    per_subset: dict


@dataclass(frozen=True)
class BoundsRow:
    """One comparison-table row: the n needed for a given m, and vice versa."""

    label: str
    lower_bound_n: float
    upper_bound_m: float
    applicable: bool = True


@dataclass(frozen=True)
class RateTuple:
    """Operating rates and channel gains for the rate-region check.

    ``gains`` is a k-by-l array whose row i is the gain vector of sender i.
    """

    rates: tuple
    gains: np.ndarray
    sigma_c_sq: float
    sigma_z_sq: float

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        if any(not (r >= 0 and math.isfinite(r)) for r in rates):
            raise InvalidInputError("rates must be nonnegative and finite")
        gains = np.asarray(self.gains, dtype=np.float64)
        if gains.ndim != 2 or gains.shape[0] != len(rates):
            raise InvalidInputError("gains must be a k-by-l array, one row per rate")
        if not np.all(np.isfinite(gains)):
            raise InvalidInputError("gain vectors must be finite")
        if not (self.sigma_c_sq > 0 and self.sigma_z_sq > 0):
            raise InvalidInputError("variances must be positive")
        gains = gains.copy()
        gains.setflags(write=False)
        object.__setattr__(self, "rates", rates)
        object.__setattr__(self, "gains", gains)


def nonempty_subsets(k: int):
    """All nonempty subsets of range(k), by cardinality then lexicographic."""
    for size in range(1, k + 1):
        yield from itertools.combinations(range(k), size)


def _logdet2_spd(M: np.ndarray) -> float:
    """log2 det of a symmetric positive definite matrix via Cholesky."""
    if not np.all(np.isfinite(M)):
        raise NumericError("Gram matrix has non-finite entries (overflowing scale?)")
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            "Gram matrix not numerically positive definite; input likely has "
            "NaN/Inf or an extreme scale"
        ) from exc
    return 2.0 * float(np.sum(np.log2(np.diag(L))))


def _check_subset_budget(k: int) -> None:
    if k > MAX_SUBSET_K:
        raise BudgetError(
            f"refusing to enumerate 2^{k}-1 subsets (k={k} exceeds {MAX_SUBSET_K})"
        )


def c_of_w(w: SignalValueMatrix, sigma_a_sq: float, sigma_z_sq: float) -> ThresholdReport:
    """Exhaustive evaluation of c(W) over all 2^k - 1 nonempty row subsets."""
    ensure_valid(w)
    if not (sigma_a_sq > 0 and sigma_z_sq > 0):
        raise InvalidInputError("variances must be positive")
    _check_subset_budget(w.k)
    alpha = sigma_a_sq / sigma_z_sq
    entries = w.entries
    eye = np.eye(w.l)
    per_subset = {}
    best_val = None
    best_subset = None
    for subset in nonempty_subsets(w.k):
        rows = entries[list(subset), :]
        gram = eye + alpha * (rows.T @ rows)
        value = _logdet2_spd(gram) / (2.0 * len(subset))
        key = tuple(i + 1 for i in subset)
        per_subset[key] = value
        if best_val is None or value < best_val:
            best_val = value
            best_subset = key
    return ThresholdReport(best_val, best_subset, per_subset)


def sufficient_n(
    w: SignalValueMatrix,
    sigma_a_sq: float,
    sigma_z_sq: float,
    m: int,
    margin: float,
) -> int:
    """Measurements per vector putting log2(m)/n below c(W) by ``margin``.

    Returns ceil(log2(m) / ((1 - margin) * c(W))); margin in [0, 1).
    """
    if not (0 <= margin < 1):
        raise InvalidInputError("margin must lie in [0, 1)")
    if m < w.k:
        raise InvalidInputError(f"m={m} must be at least k={w.k}")
    c = c_of_w(w, sigma_a_sq, sigma_z_sq).c_of_w
    return int(math.ceil(math.log2(m) / ((1.0 - margin) * c)))


def identical_columns_bound(
    wvec, l: int, sigma_a_sq: float, sigma_z_sq: float
) -> dict:
    """Per-subset rates when all l columns equal the vector ``wvec``.

    For each nonempty T the Gram determinant collapses to a scalar:
    value(T) = (1/(2|T|)) * log2(1 + l * a * ||w_T||^2). Matches
    :func:`c_of_w` applied to [w, ..., w] subset by subset.
    """
    wvec = np.asarray(wvec, dtype=np.float64).reshape(-1)
    if wvec.size < 1 or not np.all(np.isfinite(wvec)):
        raise InvalidInputError("w must be a nonempty finite vector")
    if np.any(wvec == 0.0):
        raise InvalidInputError("w must have all entries nonzero")
    if l < 1:
        raise InvalidInputError("l must be at least 1")
    _check_subset_budget(wvec.size)
    alpha = sigma_a_sq / sigma_z_sq
    out = {}
    for subset in nonempty_subsets(wvec.size):
        norm_sq = float(np.sum(wvec[list(subset)] ** 2))
        key = tuple(i + 1 for i in subset)
        out[key] = math.log2(1.0 + l * alpha * norm_sq) / (2.0 * len(subset))
    return out


def split_sign_matrix(k: int) -> SignalValueMatrix:
    """Two-column construction whose threshold beats identical columns.

    Column 1 is all ones; column 2 is +1 on the first k/2 rows and -1 on the
    rest, so every half-split row subset has an orthogonal Gram. Requires
    even k >= 2.
    """
    if k < 2 or k % 2 != 0:
        raise InvalidInputError("k must be even and at least 2")
    col2 = np.ones(k)
    col2[k // 2 :] = -1.0
    return SignalValueMatrix(np.column_stack([np.ones(k), col2]), mode="strict")


def split_sign_threshold(k: int, sigma_a_sq: float, sigma_z_sq: float) -> float:
    """c(W) of the split-sign matrix; equals (1/k) * log2(1 + k*a) exactly."""
    report = c_of_w(split_sign_matrix(k), sigma_a_sq, sigma_z_sq)
    return report.c_of_w


def bounds_table(
    k: int, n: int, m: int, sigma_a_sq: float, sigma_z_sq: float
) -> list:
    """Three-case comparison of single- versus multiple-vector thresholds.

    Cases: (i) one measurement vector with unit values; (ii) two identical
    unit columns; (iii) the split-sign matrix. Each row reports the lower
    bound on n for the given m and the upper bound on m for the given n:

        (i)   m < (1 + k a)^(n/(2k))
        (ii)  m < (1 + 2 k a)^(n/(2k))
        (iii) m < (1 + k a)^(n/k)       (even k only)

    For odd k the split-sign row is marked not applicable (NaN bounds).
    """
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    if m < 1 or n < 0:
        raise InvalidInputError("need m >= 1 and n >= 0")
    alpha = sigma_a_sq / sigma_z_sq
    log2m = math.log2(m)

    def row(label, base, exponent_scale):
        rate = math.log2(base) * exponent_scale
        lower_n = log2m / rate
        upper_m = base ** (n * exponent_scale)
        return BoundsRow(label, lower_n, upper_m)

    rows = [
        row("smv", 1.0 + k * alpha, 1.0 / (2 * k)),
        row("mmv-identical", 1.0 + 2.0 * k * alpha, 1.0 / (2 * k)),
    ]
    if k % 2 == 0:
        rows.append(row("mmv-split-sign", 1.0 + k * alpha, 1.0 / k))
    else:
        rows.append(
            BoundsRow("mmv-split-sign", float("nan"), float("nan"), applicable=False)
        )
    return rows


def mac_region_check(t: RateTuple) -> list:
    """Feasibility of a rate tuple against every subset-sum constraint.

    For each nonempty T checks
        sum_{i in T} R_i <= (1/2) log2 det(I + (sc^2/sz^2) * sum_T h_i h_i')
    and returns the violating subsets (1-based tuples); empty means the
    tuple is inside the region. The inequality is checked exactly, with no
    tolerance.
    """
    k = len(t.rates)
    _check_subset_budget(k)
    ratio = t.sigma_c_sq / t.sigma_z_sq
    l = t.gains.shape[1]
    eye = np.eye(l)
    violations = []
    for subset in nonempty_subsets(k):
        rows = t.gains[list(subset), :]
        bound = 0.5 * _logdet2_spd(eye + ratio * (rows.T @ rows))
        if sum(t.rates[i] for i in subset) > bound:
            violations.append(tuple(i + 1 for i in subset))
    return violations
