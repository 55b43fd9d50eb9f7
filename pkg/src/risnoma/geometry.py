"""Spatial model: blocked user at the origin, a uniformly placed linear
reflecting surface inside the line-of-sight disc, and base stations drawn
from a homogeneous PPP on the annulus outside that disc.

Conventions used throughout the package:

* the typical (blocked) user sits at the origin;
* the reflecting surface is parallel to the x-axis, so the surface line is
  ``y = y_ris``;
* distances are metres, angles radians.

Sampling operations take an explicit integer seed and are pure given it.
Trial-level streams are derived by the simulator from
``numpy.random.SeedSequence(entropy=master_seed, spawn_key=(trial, stream))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpatialParams",
    "NetworkRealization",
    "default_sim_radius",
    "sample_ppp",
    "sample_ris",
    "sample_realization",
    "pdf_r_ru",
    "cdf_r_ru",
    "pdf_r_br",
    "cdf_r_br",
    "angle_theta_cdf",
    "split_angles",
    "realization_to_text",
    "realization_from_text",
]


def default_sim_radius(lambda_b: float) -> float:
    """Outer truncation radius keeping direct-link truncation error tiny."""
    return 30.0 / math.sqrt(math.pi * lambda_b)


@dataclass(frozen=True)
class SpatialParams:
    """Scalar constants of the spatial model.

    ``lambda_u`` is carried for completeness; the analysis pins the typical
    user at the origin and never samples the user process.  The Campbell
    truncation check on ``sim_radius`` needs a path-loss exponent and is
    therefore enforced by :class:`risnoma.config.SystemParameters`, not here.
    """

    lambda_b: float
    lambda_u: float
    R_L: float
    r_c: float
    sim_radius: float

    def __post_init__(self):
        if not self.lambda_b > 0:
            raise ValueError(f"lambda_b must be > 0, got {self.lambda_b}")
        if not self.lambda_u > 0:
            raise ValueError(f"lambda_u must be > 0, got {self.lambda_u}")
        if not self.R_L > 0:
            raise ValueError(f"R_L must be > 0, got {self.R_L}")
        if not self.r_c > 0:
            raise ValueError(f"r_c must be > 0, got {self.r_c}")
        if not self.sim_radius > self.R_L:
            raise ValueError(
                f"sim_radius must exceed R_L, got {self.sim_radius} <= {self.R_L}"
            )


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled network drop.

    ``theta`` is the BS-surface-user angle ``|pi - |psi2 - psi1||`` of the
    serving BS as originally sampled, i.e. before the same-side reflection
    below; that raw angle is the quantity whose uniformity on [0, pi] the
    distribution tests target.  When the as-sampled serving BS lies on the
    opposite side of the surface line from the user it is mirrored across
    that line (``bs_points`` stores the mirrored position), which preserves
    its distance to the surface centre and hence the association.

    ``connected_dir`` is the unit vector from the serving BS to its
    already-connected partner user, which sits at distance ``r_c``.
    """

    bs_points: np.ndarray
    ris_point: np.ndarray
    serving_index: int
    r_br0: float
    r_ru0: float
    theta: float
    connected_dir: np.ndarray
    lambda_b: float
    sim_radius: float
    n_resamples: int = 0

    def connected_position(self, r_c: float, serving_index: int | None = None) -> np.ndarray:
        idx = self.serving_index if serving_index is None else serving_index
        return self.bs_points[idx] + r_c * self.connected_dir


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(seed))


def _sample_annulus(rng: np.random.Generator, n: int, r_in: float, r_out: float) -> np.ndarray:
    radii = np.sqrt(rng.uniform(r_in * r_in, r_out * r_out, size=n))
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))


def sample_ppp(params: SpatialParams, rng_seed) -> np.ndarray:
    """Draw the base-station process on the annulus (R_L, sim_radius).

    Returns an (N, 2) array; N is Poisson with mean
    ``lambda_b * pi * (sim_radius^2 - R_L^2)`` and the points are i.i.d.
    uniform on the annulus.  N = 0 is a valid outcome.
    """
    rng = _rng(rng_seed)
    mean = params.lambda_b * math.pi * (params.sim_radius**2 - params.R_L**2)
    n = rng.poisson(mean)
    return _sample_annulus(rng, n, params.R_L, params.sim_radius)


def sample_ris(params: SpatialParams, rng_seed) -> np.ndarray:
    """Draw the surface centre uniformly on the disc of radius R_L."""
    rng = _rng(rng_seed)
    radius = params.R_L * math.sqrt(rng.uniform())
    angle = rng.uniform(0.0, 2.0 * np.pi)
    return np.array([radius * math.cos(angle), radius * math.sin(angle)])


def _nearest_and_angle(points: np.ndarray, ris: np.ndarray) -> tuple[int, float, float]:
    """Serving index, its distance to the surface centre, and the raw
    BS-surface-user angle theta = |pi - |psi2 - psi1||."""
    d = np.hypot(points[:, 0] - ris[0], points[:, 1] - ris[1])
    idx = int(np.argmin(d))
    psi1 = math.atan2(ris[1], ris[0]) % (2.0 * math.pi)
    psi2 = math.atan2(points[idx, 1] - ris[1], points[idx, 0] - ris[0]) % (2.0 * math.pi)
    theta = abs(math.pi - abs(psi2 - psi1))
    return idx, float(d[idx]), theta


def sample_realization(params: SpatialParams, rng_seed, max_resamples: int = 1000) -> NetworkRealization:
    """Draw one full network realization.

    Draw order (fixed, part of the determinism contract): surface centre,
    BS count, BS radii, BS angles, connected-user direction.  Realizations
    with zero base stations are rejected and redrawn, with the count kept.
    """
    rng = _rng(rng_seed)
    n_resamples = 0
    while True:
        ris = sample_ris(params, rng)
        points = sample_ppp(params, rng)
        if len(points) > 0:
            break
        n_resamples += 1
        if n_resamples > max_resamples:
            raise RuntimeError(
                f"no base stations after {max_resamples} resamples; "
                f"lambda_b={params.lambda_b} is too small for this window"
            )
    phi = rng.uniform(0.0, 2.0 * np.pi)
    connected_dir = np.array([math.cos(phi), math.sin(phi)])

    idx, r_br0, theta = _nearest_and_angle(points, ris)
    # Same-side constraint: the user (origin) and the serving BS must lie on
    # the same side of the surface line y = y_ris for a reflected path to
    # exist.  Mirroring across that line preserves the distance to the
    # surface centre, so the association and r_br0 are unchanged.
    user_side = -ris[1]
    bs_side = points[idx, 1] - ris[1]
    if user_side * bs_side < 0:
        points = points.copy()
        points[idx, 1] = 2.0 * ris[1] - points[idx, 1]
    r_ru0 = float(np.hypot(ris[0], ris[1]))
    return NetworkRealization(
        bs_points=points,
        ris_point=ris,
        serving_index=idx,
        r_br0=r_br0,
        r_ru0=r_ru0,
        theta=theta,
        connected_dir=connected_dir,
        lambda_b=params.lambda_b,
        sim_radius=params.sim_radius,
        n_resamples=n_resamples,
    )


# ---------------------------------------------------------------------------
# Distance and angle laws
# ---------------------------------------------------------------------------

def pdf_r_ru(x, params: SpatialParams):
    """Density 2x/R_L^2 of the surface-to-user distance, supported on [0, R_L]."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("distance must be >= 0")
    out = np.where(arr <= params.R_L, 2.0 * arr / params.R_L**2, 0.0)
    return float(out) if np.ndim(x) == 0 else out


def cdf_r_ru(x, params: SpatialParams):
    arr = np.asarray(x, dtype=float)
    out = np.clip(arr / params.R_L, 0.0, 1.0) ** 2
    return float(out) if np.ndim(x) == 0 else out


def pdf_r_br(x, n: int, params: SpatialParams):
    """Density of the distance from the surface to its n-th nearest BS.

    2 (pi lambda_b)^n / (n-1)! * x^(2n-1) * exp(-pi lambda_b x^2), evaluated
    in log space so large n stays finite.
    """
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("distance must be >= 0")
    lam = math.pi * params.lambda_b
    with np.errstate(divide="ignore"):
        logx = np.where(arr > 0, np.log(arr), -np.inf)
    logpdf = (
        math.log(2.0)
        + n * math.log(lam)
        - math.lgamma(n)
        + (2 * n - 1) * logx
        - lam * arr * arr
    )
    out = np.where(arr > 0, np.exp(logpdf), 0.0)
    return float(out) if np.ndim(x) == 0 else out


def cdf_r_br(x, n: int, params: SpatialParams):
    """CDF of the n-th nearest BS distance: an Erlang tail in pi lambda_b x^2."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n}")
    arr = np.asarray(x, dtype=float)
    t = math.pi * params.lambda_b * np.clip(arr, 0.0, None) ** 2
    tail = np.zeros_like(t)
    term = np.ones_like(t)
    for k in range(n):
        if k > 0:
            term = term * t / k
        tail = tail + term
    out = 1.0 - np.exp(-t) * tail
    return float(out) if np.ndim(x) == 0 else out


def angle_theta_cdf(x):
    """CDF x/pi of the BS-surface-user angle, uniform on [0, pi]."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(arr > math.pi):
        raise ValueError("angle must lie in [0, pi]")
    out = arr / math.pi
    return float(out) if np.ndim(x) == 0 else out


def split_angles(theta: float, rho_a: float) -> tuple[float, float]:
    """Split the total angle into incidence and reflection parts.

    Returns (rho_a * theta, (1 - rho_a) * theta); the parts always sum to
    theta exactly.  The standalone marginal densities 1/(rho_a pi) and
    1/((1 - rho_a) pi) on (0, pi/2) normalize only at rho_a = 1/2, so the
    engine always derives both angles from the verified-uniform total angle
    through this split instead.
    """
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    if not 0.0 < rho_a < 1.0:
        raise ValueError(f"rho_a must lie in (0, 1), got {rho_a}")
    a = rho_a * theta
    b = theta - a
    # nudge the incidence part so the rounded pair sums back exactly
    for _ in range(2):
        if a + b == theta:
            break
        a = theta - b
    return a, b


# ---------------------------------------------------------------------------
# Line-oriented text serialization
# ---------------------------------------------------------------------------

def realization_to_text(real: NetworkRealization) -> str:
    """Serialize a realization, one point per line as ``x y`` in metres.

    Layout: ``#`` comment lines carry scalar metadata, the first data line
    is the surface centre, every following data line one base station.
    """
    lines = [
        "# risnoma network realization v1",
        f"# serving_index {real.serving_index}",
        f"# theta {float(real.theta)!r}",
        f"# connected_dir {float(real.connected_dir[0])!r} {float(real.connected_dir[1])!r}",
        f"# lambda_b {float(real.lambda_b)!r}",
        f"# sim_radius {float(real.sim_radius)!r}",
        f"# n_resamples {real.n_resamples}",
        f"{float(real.ris_point[0])!r} {float(real.ris_point[1])!r}",
    ]
    for p in real.bs_points:
        lines.append(f"{float(p[0])!r} {float(p[1])!r}")
    return "\n".join(lines) + "\n"


def realization_from_text(text: str) -> NetworkRealization:
    meta: dict[str, str] = {}
    coords: list[list[float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].split()
            if len(parts) >= 2:
                meta[parts[0]] = " ".join(parts[1:])
            continue
        x, y = line.split()
        coords.append([float(x), float(y)])
    if len(coords) < 2:
        raise ValueError("realization text needs the surface centre and >= 1 BS")
    ris = np.asarray(coords[0])
    points = np.asarray(coords[1:])
    dx, dy = meta["connected_dir"].split()
    return NetworkRealization(
        bs_points=points,
        ris_point=ris,
        serving_index=int(meta["serving_index"]),
        r_br0=float(np.hypot(*(points[int(meta["serving_index"])] - ris))),
        r_ru0=float(np.hypot(ris[0], ris[1])),
        theta=float(meta["theta"]),
        connected_dir=np.array([float(dx), float(dy)]),
        lambda_b=float(meta["lambda_b"]),
        sim_radius=float(meta["sim_radius"]),
        n_resamples=int(meta.get("n_resamples", 0)),
    )
