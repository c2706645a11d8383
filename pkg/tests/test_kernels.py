"""The numba and numpy kernel builds must agree bitwise."""

import itertools

import numpy as np

from mmvsr import kernels


def _random_problem(seed, n=12, m=9, k=3, l=2):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, m))
    Y = rng.standard_normal((n, l))
    gram = A.T @ A
    cross = A.T @ Y
    ynorm2 = float((Y * Y).sum())
    subsets = np.array(list(itertools.combinations(range(m), k)), dtype=np.int64)
    return A, Y, gram, cross, ynorm2, subsets


def test_ml_scan_builds_agree_bitwise():
    for seed in range(5):
        _, _, gram, cross, ynorm2, subsets = _random_problem(seed)
        res_np, skip_np = kernels.ml_scan_numpy(gram, cross, ynorm2, subsets)
        res_nb, skip_nb = kernels.ml_scan_loops(gram, cross, ynorm2, subsets)
        assert np.array_equal(res_np, res_nb)
        assert np.array_equal(skip_np, skip_nb)


def test_ml_scan_matches_lstsq_oracle():
    A, Y, gram, cross, ynorm2, subsets = _random_problem(2, n=10, m=6, k=2)
    res, skipped = kernels.ml_scan(gram, cross, ynorm2, subsets)
    assert not skipped.any()
    for row, got in zip(subsets, res):
        G, *_ = np.linalg.lstsq(A[:, row], Y, rcond=None)
        want = float(((Y - A[:, row] @ G) ** 2).sum())
        assert abs(got - want) <= 1e-8 * max(1.0, want)


def test_ml_scan_skips_duplicated_columns():
    A, Y, gram, cross, ynorm2, _ = _random_problem(3, n=8, m=5, k=2)
    A = A.copy()
    A[:, 1] = A[:, 0]  # exact rank deficiency for subset (0, 1)
    gram = A.T @ A
    cross = A.T @ Y
    subsets = np.array(list(itertools.combinations(range(5), 2)), dtype=np.int64)
    for impl in (kernels.ml_scan_numpy, kernels.ml_scan_loops):
        res, skipped = impl(gram, cross, ynorm2, subsets)
        assert skipped[0]  # (0, 1) comes first lexicographically
        assert np.isinf(res[0])
        assert not skipped[1:].any()


def test_matched_scan_builds_agree_bitwise():
    for seed in range(5):
        _, _, gram, cross, ynorm2, subsets = _random_problem(seed, k=3)
        rng = np.random.default_rng(100 + seed)
        W = rng.standard_normal((3, 2))
        perms = np.array(list(itertools.permutations(range(3))), dtype=np.int64)
        w_perms = np.ascontiguousarray(W[perms])
        row_dots = np.ascontiguousarray(np.einsum("pab,pcb->pac", w_perms, w_perms))
        a = kernels.matched_scan_numpy(gram, cross, ynorm2, subsets, w_perms, row_dots)
        b = kernels.matched_scan_loops(gram, cross, ynorm2, subsets, w_perms, row_dots)
        assert np.array_equal(a, b)


def test_matched_scan_matches_direct_oracle():
    A, Y, gram, cross, ynorm2, subsets = _random_problem(7, n=9, m=7, k=2)
    W = np.random.default_rng(8).standard_normal((2, 2))
    perms = np.array(list(itertools.permutations(range(2))), dtype=np.int64)
    w_perms = np.ascontiguousarray(W[perms])
    row_dots = np.ascontiguousarray(np.einsum("pab,pcb->pac", w_perms, w_perms))
    got = kernels.matched_scan(gram, cross, ynorm2, subsets, w_perms, row_dots)
    for row, value in zip(subsets, got):
        want = min(
            float(((Y - A[:, row] @ W[list(p)]) ** 2).sum())
            for p in itertools.permutations(range(2))
        )
        assert abs(value - want) <= 1e-9 * max(1.0, want)


def test_net_scan_builds_agree_bitwise():
    for seed in range(5):
        _, _, gram, cross, ynorm2, subsets = _random_problem(seed)
        rng = np.random.default_rng(200 + seed)
        pts = np.vstack([rng.standard_normal((31, 3)), rng.standard_normal((17, 3))])
        offsets = np.array([0, 31, 48], dtype=np.int64)
        a = kernels.net_scan_numpy(gram, cross, ynorm2, subsets, pts, offsets)
        b = kernels.net_scan_loops(gram, cross, ynorm2, subsets, pts, offsets)
        assert np.array_equal(a, b)


def test_net_scan_matches_direct_minimum():
    A, Y, gram, cross, ynorm2, subsets = _random_problem(11, n=10, m=6, k=2)
    rng = np.random.default_rng(12)
    pts = np.vstack([rng.standard_normal((13, 2)), rng.standard_normal((9, 2))])
    offsets = np.array([0, 13, 22], dtype=np.int64)
    got = kernels.net_scan(gram, cross, ynorm2, subsets, pts, offsets)
    for row, value in zip(subsets, got):
        M = gram[np.ix_(row, row)]
        total = ynorm2
        for i in range(2):
            block = pts[offsets[i] : offsets[i + 1]]
            phis = [float(q @ M @ q - 2.0 * (q @ cross[row, i])) for q in block]
            total += min(phis)
        assert abs(value - total) <= 1e-9 * max(1.0, abs(total))
