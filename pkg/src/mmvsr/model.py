"""Signal and measurement model.

A jointly sparse signal X (m rows, l columns) has exactly k nonzero rows.
Their values come from a fixed k-by-l value matrix W; the row locations are
drawn uniformly without replacement. Measurements are Y = A X + Z with the
entries of A i.i.d. normal(0, sigma_a^2) and Z i.i.d. normal(0, sigma_z^2).

Reproducibility contract
------------------------
* All randomness flows through numpy Generators (PCG64 bit stream, the
  standard_normal ziggurat transform). One seed fully determines an
  instance.
* Independent streams are derived with ``derive_rng(master, *path)`` which
  wraps ``numpy.random.SeedSequence(master, spawn_key=path)``. The mapping
  from (master seed, trial index) to a stream does not depend on execution
  order, so parallel trial generation is order independent.
* Within ``generate_instance`` the draw order is fixed: support, then A,
  then Z.
* Y is assembled by ``accumulate_measurements``, a fixed-order multiply-add
  over the support, so ``Y == A @ X + Z`` holds bit-for-bit when re-evaluated
  through the same routine.
"""

import base64
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .output import dumps, format_float

MODES = ("strict", "generalized")

_MAX_SEED = 2**64


@dataclass(frozen=True)
class SignalValueMatrix:
    """The k-by-l matrix of nonzero row values, with its validity mode.

    ``strict`` requires every entry nonzero; ``generalized`` only forbids
    all-zero rows and all-zero columns. Entry-pattern validity is checked by
    :func:`validate_values`, not at construction; construction only rejects
    inputs no mode could accept (empty or non-finite).
    """

    entries: np.ndarray
    mode: str = "strict"

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise InvalidInputError(
                "value matrix must be 2-D with at least one row and column"
            )
        if not np.all(np.isfinite(entries)):
            raise InvalidInputError("value matrix has non-finite entries")
        if self.mode not in MODES:
            raise InvalidInputError(f"mode must be one of {MODES}, got {self.mode!r}")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    @property
    def l(self) -> int:
        return self.entries.shape[1]


@dataclass(frozen=True)
class Violation:
    """Names the first entry, row, or column that breaks the mode's rule."""

    kind: str  # "zero-entry" | "zero-row" | "zero-column"
    row: int | None  # 1-based, None when not applicable
    col: int | None
    message: str


def validate_values(w: SignalValueMatrix) -> Violation | None:
    """Check the zero pattern of ``w`` against its mode.

    Returns None when valid, otherwise a :class:`Violation` naming the first
    offending entry (strict mode) or the first all-zero row / column
    (generalized mode). Indices in the report are 1-based.
    """
    entries = w.entries
    if w.mode == "strict":
        zero = entries == 0.0
        if zero.any():
            i, j = np.argwhere(zero)[0]
            return Violation(
                "zero-entry",
                int(i) + 1,
                int(j) + 1,
                f"strict mode forbids zero entries; entry ({int(i)+1},{int(j)+1}) is zero",
            )
        return None
    row_zero = ~np.any(entries != 0.0, axis=1)
    if row_zero.any():
        i = int(np.argmax(row_zero))
        return Violation(
            "zero-row", i + 1, None, f"row {i+1} is all-zero (generalized mode)"
        )
    col_zero = ~np.any(entries != 0.0, axis=0)
    if col_zero.any():
        j = int(np.argmax(col_zero))
        return Violation(
            "zero-column", None, j + 1, f"column {j+1} is all-zero (generalized mode)"
        )
    return None


def ensure_valid(w: SignalValueMatrix) -> None:
    """Raise InvalidInputError when :func:`validate_values` reports a violation."""
    violation = validate_values(w)
    if violation is not None:
        raise InvalidInputError(violation.message)


@dataclass(frozen=True)
class ProblemConfig:
    """Dimensions, variances, decoder tolerance, and master seed."""

    m: int
    n: int
    sigma_a_sq: float
    sigma_z_sq: float
    epsilon: float
    seed: int = 0

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidInputError("m must be a positive integer")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidInputError("n must be a positive integer")
        if not (self.sigma_a_sq > 0 and np.isfinite(self.sigma_a_sq)):
            raise InvalidInputError("sigma_a_sq must be positive and finite")
        if not (self.sigma_z_sq > 0 and np.isfinite(self.sigma_z_sq)):
            raise InvalidInputError("sigma_z_sq must be positive and finite")
        if not (self.epsilon > 0 and np.isfinite(self.epsilon)):
            raise InvalidInputError("epsilon must be positive and finite")
        if int(self.seed) != self.seed or not (0 <= self.seed < _MAX_SEED):
            raise InvalidInputError("seed must be an integer in [0, 2^64)")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def alpha(self) -> float:
        """Variance ratio sigma_a^2 / sigma_z^2."""
        return self.sigma_a_sq / self.sigma_z_sq


def default_epsilon(sigma_a_sq: float, sigma_z_sq: float) -> float:
    """Decoder tolerance 0.25 * sigma_z / sigma_a.

    Keeps the net decoder's acceptance threshold sigma_z^2 + eps^2 sigma_a^2
    within about 7% of sigma_z^2.
    """
    return 0.25 * float(np.sqrt(sigma_z_sq / sigma_a_sq))


@dataclass(frozen=True)
class SparseInstance:
    """One realized trial: planted support plus the matrices X, A, Z, Y.

    ``support`` is a sorted tuple of 0-based row indices. Row j of the value
    matrix sits at the j-th smallest support index; with i.i.d. measurement
    columns this is distribution-equivalent to assigning rows in draw order.
    Arrays are read-only, so instances are safe to share across threads.
    """

    support: tuple
    X: np.ndarray
    A: np.ndarray
    Z: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        for name in ("X", "A", "Z", "Y"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "support", tuple(int(s) for s in self.support))


def derive_rng(master_seed: int, *path) -> np.random.Generator:
    """Independent generator for (master_seed, path).

    The documented splitting function: PCG64 seeded from
    SeedSequence(master_seed, spawn_key=path). Streams for distinct paths are
    independent and do not depend on the order in which they are created.
    """
    seq = np.random.SeedSequence(
        int(master_seed), spawn_key=tuple(int(p) for p in path)
    )
    return np.random.default_rng(seq)


def sample_support(m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Draw k distinct indices from [m], uniform over size-k subsets.

    Returned sorted ascending (the canonical support order). 0-based.
    """
    if not (1 <= k <= m):
        raise InvalidInputError(f"need 1 <= k <= m, got k={k}, m={m}")
    idx = rng.choice(m, size=k, replace=False)
    return np.sort(idx.astype(np.int64))


def accumulate_measurements(A, support, values, Z) -> np.ndarray:
    """Canonical multiply-add Y = Z + sum_j outer(A[:, s_j], values[j, :]).

    Accumulates in float64 in ascending j; no BLAS call, so the result is
    bit-stable across runs and backends and the instance invariant
    ``Y == accumulate_measurements(A, support, values, Z)`` is exactly
    testable.
    """
    Y = np.array(Z, dtype=np.float64, copy=True)
    values = np.asarray(values, dtype=np.float64)
    for j, s in enumerate(support):
        Y += A[:, int(s) : int(s) + 1] * values[j][None, :]
    return Y


def generate_instance(
    w: SignalValueMatrix, cfg: ProblemConfig, rng: np.random.Generator | None = None
) -> SparseInstance:
    """Draw one sparse instance: support, A, Z (in that order), then Y.

    With ``rng=None`` a fresh stream is derived from ``cfg.seed``, so the
    triple (w, cfg, seed) fully determines the instance.
    """
    ensure_valid(w)
    k, l = w.k, w.l
    if cfg.m < k:
        raise InvalidInputError(f"m={cfg.m} must be at least k={k}")
    if rng is None:
        rng = derive_rng(cfg.seed)
    support = sample_support(cfg.m, k, rng)
    A = rng.standard_normal((cfg.n, cfg.m)) * np.sqrt(cfg.sigma_a_sq)
    Z = rng.standard_normal((cfg.n, l)) * np.sqrt(cfg.sigma_z_sq)
    X = np.zeros((cfg.m, l))
    X[support] = w.entries
    Y = accumulate_measurements(A, support, w.entries, Z)
    return SparseInstance(tuple(support.tolist()), X, A, Z, Y)


# ---------------------------------------------------------------------------
# file formats


def load_values_csv(path, mode: str = "strict") -> SignalValueMatrix:
    """Read a value matrix from CSV: one row per line, '.' decimal point."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(cell) for cell in line.split(",")])
            except ValueError as exc:
                raise InvalidInputError(f"bad CSV cell in {path}: {exc}") from exc
    if not rows:
        raise InvalidInputError(f"empty value matrix file: {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InvalidInputError(f"ragged rows in value matrix file: {path}")
    return SignalValueMatrix(np.array(rows, dtype=np.float64), mode=mode)


def save_values_csv(path, w: SignalValueMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in w.entries:
            fh.write(",".join(format_float(x) for x in row) + "\n")


def _encode_matrix(arr: np.ndarray) -> dict:
    data = np.ascontiguousarray(arr, dtype="<f8")
    return {
        "shape": [int(s) for s in arr.shape],
        "dtype": "<f8",
        "data_b64": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def _decode_matrix(obj) -> np.ndarray:
    shape = tuple(int(s) for s in obj["shape"])
    if obj.get("dtype", "<f8") != "<f8":
        raise InvalidInputError("instance matrices must be little-endian float64")
    raw = base64.b64decode(obj["data_b64"])
    arr = np.frombuffer(raw, dtype="<f8")
    if arr.size != int(np.prod(shape)):
        raise InvalidInputError("matrix payload size does not match shape")
    return arr.reshape(shape).astype(np.float64)


def dump_instance(inst: SparseInstance, cfg: ProblemConfig) -> str:
    """Serialize an instance to the JSON debug format.

    Support indices are 1-based in the file; matrices are base64-encoded
    little-endian float64 with explicit shapes. The generating config rides
    along so decoders can be run from the file alone.
    """
    doc = {
        "format": "mmvsr-instance",
        "version": 1,
        "config": {
            "m": cfg.m,
            "n": cfg.n,
            "k": len(inst.support),
            "l": int(inst.Y.shape[1]),
            "sigma_a_sq": cfg.sigma_a_sq,
            "sigma_z_sq": cfg.sigma_z_sq,
            "epsilon": cfg.epsilon,
            "seed": cfg.seed,
        },
        "support": [s + 1 for s in inst.support],
        "A": _encode_matrix(inst.A),
        "X": _encode_matrix(inst.X),
        "Z": _encode_matrix(inst.Z),
        "Y": _encode_matrix(inst.Y),
    }
    return dumps(doc) + "\n"


def load_instance(text: str):
    """Parse the JSON debug format; returns (SparseInstance, ProblemConfig)."""
    import json as _json

    try:
        doc = _json.loads(text)
    except ValueError as exc:
        raise InvalidInputError(f"instance file is not valid JSON: {exc}") from exc
    if doc.get("format") != "mmvsr-instance":
        raise InvalidInputError("not an mmvsr instance document")
    cfg_doc = doc["config"]
    cfg = ProblemConfig(
        m=int(cfg_doc["m"]),
        n=int(cfg_doc["n"]),
        sigma_a_sq=float(cfg_doc["sigma_a_sq"]),
        sigma_z_sq=float(cfg_doc["sigma_z_sq"]),
        epsilon=float(cfg_doc["epsilon"]),
        seed=int(cfg_doc.get("seed", 0)),
    )
    support = tuple(int(s) - 1 for s in doc["support"])
    if any(s < 0 or s >= cfg.m for s in support):
        raise InvalidInputError("support indices out of range")
    l = int(cfg_doc["l"])
    matrices = {name: _decode_matrix(doc[name]) for name in ("X", "A", "Z", "Y")}
    expected = {
        "X": (cfg.m, l),
        "A": (cfg.n, cfg.m),
        "Z": (cfg.n, l),
        "Y": (cfg.n, l),
    }
    for name, arr in matrices.items():
        if arr.shape != expected[name]:
            raise InvalidInputError(
                f"matrix {name} has shape {arr.shape}, config implies {expected[name]}"
            )
    inst = SparseInstance(
        support, matrices["X"], matrices["A"], matrices["Z"], matrices["Y"]
    )
    return inst, cfg
