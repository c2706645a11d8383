"""Quantization nets covering the Euclidean ball.

The decoder quantizes candidate value vectors on a finite net Q(r, zeta)
inside the ball B_k(r) with covering radius zeta/2. A minimal net is NP-hard
to build, so an axis-aligned grid is used instead: spacing zeta/sqrt(k)
(cell half-diagonal zeta/2), offset to include the origin, kept inside
B_k(r + zeta/2), then projected onto B_k(r). Projection onto a convex ball
is a contraction, so the covering radius survives it. The point count equals
the grid count inside B_k(r + zeta/2), which is non-decreasing in r for
fixed zeta by construction.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NetTooLargeError

DEFAULT_POINT_CAP = 10**7


@dataclass(frozen=True)
class EpsilonNet:
    """Finite covering of B_k(radius) with covering radius resolution/2."""

    radius: float
    resolution: float
    points: np.ndarray  # (count, k), each row inside the closed ball

    def __post_init__(self):
        pts = np.ascontiguousarray(self.points, dtype=np.float64)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self):
        return self.points.shape[0]


def build_net(k: int, r: float, zeta: float, point_cap: int = DEFAULT_POINT_CAP) -> EpsilonNet:
    """Grid covering net for B_k(r) at resolution zeta.

    Raises NetTooLargeError when the candidate grid would exceed
    ``point_cap`` points, naming the offending (k, r, zeta).
    """
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    if not (r >= 0 and math.isfinite(r)):
        raise InvalidInputError("r must be nonnegative and finite")
    if not (zeta > 0 and math.isfinite(zeta)):
        raise InvalidInputError("zeta must be positive and finite")
    spacing = zeta / math.sqrt(k)
    reach = r + zeta / 2.0
    jmax = int(math.floor(reach / spacing))
    per_axis = 2 * jmax + 1
    if per_axis**k > point_cap:
        raise NetTooLargeError(
            f"net would need up to {per_axis}^{k} grid candidates "
            f"(cap {point_cap}) for (k={k}, r={r}, zeta={zeta})"
        )
    axis = np.arange(-jmax, jmax + 1, dtype=np.float64) * spacing
    mesh = np.meshgrid(*([axis] * k), indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    norms = np.sqrt((pts * pts).sum(axis=1))
    keep = norms <= reach
    pts = pts[keep]
    norms = norms[keep]
    outside = norms > r
    if outside.any():
        pts = pts.copy()
        pts[outside] *= (r / norms[outside])[:, None]
    return EpsilonNet(float(r), float(zeta), pts)


def covering_shortfall(net: EpsilonNet, samples: np.ndarray) -> float:
    """Worst covering margin over sample points of B_k(radius).

    Returns max over samples of (distance to nearest net point) - zeta/2;
    a covering net yields a nonpositive value. Used by property tests.
    """
    pts = net.points
    worst = -math.inf
    chunk = max(1, 10**7 // max(1, pts.shape[0]))
    for start in range(0, samples.shape[0], chunk):
        block = samples[start : start + chunk]
        d2 = (
            (block * block).sum(axis=1)[:, None]
            - 2.0 * block @ pts.T
            + (pts * pts).sum(axis=1)[None, :]
        )
        dmin = np.sqrt(np.maximum(d2.min(axis=1), 0.0))
        worst = max(worst, float(dmin.max()))
    return worst - net.resolution / 2.0


def sample_ball(k: int, r: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples from the closed ball B_k(r)."""
    direction = rng.standard_normal((count, k))
    norms = np.linalg.norm(direction, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radius = r * rng.random(count) ** (1.0 / k)
    return direction / norms * radius[:, None]
