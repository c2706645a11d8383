"""Support recovery decoders.

Three decoders over the same candidate space of k-subsets of [m]:

* ``decode_ml`` fits each candidate by unconstrained least squares and keeps
  the smallest residual. It needs no knowledge of the value matrix and is
  the usual exhaustive baseline.
* ``decode_matched`` knows the value matrix and minimizes the exact misfit
  ||Y - A_S W_pi||_F^2 over candidates and row assignments pi; this is the
  maximum-likelihood rule for the generative model and is the optimal-map
  surrogate used by the experiment harness.
* ``decode_net`` is the quantized threshold decoder: it estimates column
  magnitudes from ||Y_i||^2, quantizes candidate value vectors on covering
  nets, and accepts a support whose best quantized fit lands under
  sigma_z^2 + epsilon^2 sigma_a^2. It declares a unique accepting support or
  falls back to a deterministic arbitrary choice.

Where the accept/argmin rule says "arbitrary", the lexicographically
smallest k-subset is returned so error statistics are reproducible.
"""

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BudgetError, DecodeError, InvalidInputError
from .model import ProblemConfig, SignalValueMatrix
from .nets import build_net

logger = logging.getLogger(__name__)

DEFAULT_TEST_BUDGET = 10**8
MAX_SUBSET_MATERIALIZE = 10**7

STATUS_UNIQUE = "unique-accept"
STATUS_NONE = "none-found-arbitrary"
STATUS_MULTIPLE = "multiple-found-arbitrary"


@dataclass(frozen=True)
class DecodeResult:
    """Estimated support (sorted, 0-based), accept status, and misfit.

    ``residual`` is the raw squared Frobenius misfit for the least-squares
    decoders and the normalized test statistic (1/(nl))||.||_F^2 for the net
    decoder; it is clipped at zero.
    """

    support: tuple
    status: str
    residual: float


def estimate_amplitudes(Y: np.ndarray, cfg: ProblemConfig) -> np.ndarray:
    """Column magnitude estimates sqrt(| ||Y_i||^2/n - sigma_z^2 | / sigma_a^2).

    The absolute value keeps the estimator total: small-sample fluctuations
    can push the energy below the noise floor.
    """
    Y = np.asarray(Y, dtype=np.float64)
    n = Y.shape[0]
    energy = (Y * Y).sum(axis=0) / n
    return np.sqrt(np.abs(energy - cfg.sigma_z_sq) / cfg.sigma_a_sq)


def _enumerate_subsets(m: int, k: int) -> np.ndarray:
    count = math.comb(m, k)
    if count > MAX_SUBSET_MATERIALIZE:
        raise BudgetError(
            f"C({m},{k}) = {count} candidate supports exceeds the "
            f"materialization cap {MAX_SUBSET_MATERIALIZE}"
        )
    out = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(m), k)),
        dtype=np.int64,
        count=count * k,
    )
    return out.reshape(count, k)


def _gram_products(Y, A):
    gram = A.T @ A
    cross = A.T @ Y
    ynorm2 = float((Y * Y).sum())
    return gram, cross, ynorm2


def decode_ml(Y, A, k: int, budget: int = MAX_SUBSET_MATERIALIZE) -> DecodeResult:
    """Exhaustive least-squares support selection with a free k-by-l fit.

    Ties in the minimal residual go to the lexicographically smallest
    subset (the scan keeps the first minimum). Rank-deficient candidates
    (pivot below 1e-10 relative) are skipped with one summary warning; if
    every candidate is skipped a DecodeError is raised. When n < k every
    candidate interpolates Y exactly, so all residuals are zero and the
    lexicographic tie-break decides.
    """
    Y = np.asarray(Y, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    n, m = A.shape
    if not (1 <= k <= m):
        raise InvalidInputError(f"need 1 <= k <= m, got k={k}, m={m}")
    if math.comb(m, k) > budget:
        raise BudgetError(
            f"C({m},{k}) = {math.comb(m, k)} candidate supports exceeds budget {budget}"
        )
    subsets = _enumerate_subsets(m, k)
    if n < k:
        return DecodeResult(tuple(subsets[0].tolist()), STATUS_UNIQUE, 0.0)
    gram, cross, ynorm2 = _gram_products(Y, A)
    res, skipped = kernels.ml_scan(gram, cross, ynorm2, subsets)
    n_skipped = int(skipped.sum())
    if n_skipped == subsets.shape[0]:
        raise DecodeError("every candidate support was rank-deficient")
    if n_skipped:
        logger.warning(
            "skipped %d of %d rank-deficient candidate supports",
            n_skipped,
            subsets.shape[0],
        )
    best = int(np.argmin(res))
    return DecodeResult(
        tuple(subsets[best].tolist()), STATUS_UNIQUE, max(0.0, float(res[best]))
    )


def ml_residuals(Y, A, k: int):
    """All candidate subsets with their least-squares residuals (test hook)."""
    Y = np.asarray(Y, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    subsets = _enumerate_subsets(A.shape[1], k)
    gram, cross, ynorm2 = _gram_products(Y, A)
    res, skipped = kernels.ml_scan(gram, cross, ynorm2, subsets)
    return subsets, res, skipped


def decode_matched(Y, A, w, budget: int = DEFAULT_TEST_BUDGET) -> DecodeResult:
    """Exact maximum-likelihood support search for known signal values.

    Minimizes ||Y - A_S W_pi||_F^2 jointly over candidate supports S and row
    assignments pi of the value matrix to support positions. First minimum
    in lexicographic subset order wins ties.
    """
    if isinstance(w, SignalValueMatrix):
        values = w.entries
    else:
        values = np.asarray(w, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    k, l = values.shape
    n, m = A.shape
    if Y.shape != (n, l):
        raise InvalidInputError("Y shape does not match A rows / value columns")
    if not (1 <= k <= m):
        raise InvalidInputError(f"need 1 <= k <= m, got k={k}, m={m}")
    if k > 10:
        raise InvalidInputError("row-assignment search is factorial in k; k > 10 refused")
    n_tests = math.comb(m, k) * math.factorial(k)
    if n_tests > budget:
        raise BudgetError(
            f"{n_tests} support/assignment tests exceed budget {budget}"
        )
    subsets = _enumerate_subsets(m, k)
    perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    w_perms = np.ascontiguousarray(values[perms])  # (k!, k, l)
    row_dots = np.ascontiguousarray(
        np.einsum("pab,pcb->pac", w_perms, w_perms)
    )  # (k!, k, k)
    gram, cross, ynorm2 = _gram_products(Y, A)
    res = kernels.matched_scan(gram, cross, ynorm2, subsets, w_perms, row_dots)
    best = int(np.argmin(res))
    return DecodeResult(
        tuple(subsets[best].tolist()), STATUS_UNIQUE, max(0.0, float(res[best]))
    )


def _decode_net_single(Y, A, cfg, epsilon, budget):
    # k = 1: quantization degenerates to the 2^l sign patterns of the
    # estimated magnitudes, tested literally.
    n, m = A.shape
    l = Y.shape[1]
    rho = estimate_amplitudes(Y, cfg)
    n_tests = m * 2**l
    if n_tests > budget:
        raise BudgetError(f"{n_tests} sign-pattern tests exceed budget {budget}")
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=l)))
    patterns = signs * rho[None, :]  # (2^l, l)
    gram_diag = (A * A).sum(axis=0)
    cross = A.T @ Y
    ynorm2 = float((Y * Y).sum())
    # stat[s, p] = ||Y - A_s w_p||_F^2
    stat = (
        ynorm2
        - 2.0 * cross @ patterns.T
        + gram_diag[:, None] * (patterns * patterns).sum(axis=1)[None, :]
    )
    threshold = (cfg.sigma_z_sq + epsilon * epsilon * cfg.sigma_a_sq) * n * l
    accept = (stat <= threshold).any(axis=1)
    count = int(accept.sum())
    residual = max(0.0, float(stat.min()) / (n * l))
    if count == 1:
        return DecodeResult((int(np.argmax(accept)),), STATUS_UNIQUE, residual)
    status = STATUS_NONE if count == 0 else STATUS_MULTIPLE
    return DecodeResult((0,), status, residual)


def decode_net(
    Y,
    A,
    k: int,
    cfg: ProblemConfig,
    epsilon: float | None = None,
    budget: int = DEFAULT_TEST_BUDGET,
) -> DecodeResult:
    """Quantized threshold decoder.

    Declares the unique support whose best net-quantized fit satisfies
    (1/(nl)) ||Y - A_S W_hat||_F^2 <= sigma_z^2 + epsilon^2 sigma_a^2; when
    no support or more than one accepts, the result carries the
    corresponding status and the lexicographically smallest k-subset.

    For k >= 2 the per-column nets are Q_i = Q(rho_i, epsilon) and the
    nominal test count is C(m,k) * prod_i |Q_i|, checked against ``budget``
    before scanning (the scan itself exploits that the misfit separates
    over columns, so it never walks the product net).
    """
    Y = np.asarray(Y, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    n, m = A.shape
    l = Y.shape[1]
    if not (1 <= k <= m):
        raise InvalidInputError(f"need 1 <= k <= m, got k={k}, m={m}")
    if epsilon is None:
        epsilon = cfg.epsilon
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise InvalidInputError("epsilon must be positive and finite")
    if k == 1:
        return _decode_net_single(Y, A, cfg, epsilon, budget)
    rho = estimate_amplitudes(Y, cfg)
    nets = [build_net(k, float(rho[i]), epsilon) for i in range(l)]
    n_tests = math.comb(m, k)
    for net in nets:
        n_tests *= max(1, len(net))
    if n_tests > budget:
        raise BudgetError(
            f"C({m},{k}) x prod(net sizes {[len(q) for q in nets]}) = {n_tests} "
            f"tests exceed budget {budget}"
        )
    subsets = _enumerate_subsets(m, k)
    points = np.vstack([net.points for net in nets])
    offsets = np.zeros(l + 1, dtype=np.int64)
    np.cumsum([len(net) for net in nets], out=offsets[1:])
    gram, cross, ynorm2 = _gram_products(Y, A)
    totals = kernels.net_scan(gram, cross, ynorm2, subsets, points, offsets)
    stats = totals / (n * l)
    threshold = cfg.sigma_z_sq + epsilon * epsilon * cfg.sigma_a_sq
    accept = stats <= threshold
    count = int(accept.sum())
    residual = max(0.0, float(stats.min()))
    if count == 1:
        idx = int(np.argmax(accept))
        return DecodeResult(tuple(subsets[idx].tolist()), STATUS_UNIQUE, residual)
    status = STATUS_NONE if count == 0 else STATUS_MULTIPLE
    return DecodeResult(tuple(range(k)), status, residual)
