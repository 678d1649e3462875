"""Sensor sets, density conditions, and essential coverings of R^d.

Sets are finite disjoint unions of axis-aligned boxes and Euclidean balls
inside a working window.  Coverings are families of such regions together with
the overlap bound kappa, the shape parameters (eta, D, eps) and the tags of
the central elements (those meeting the concentration ball B(0, C sqrt(N))).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import concentration_radius, unit_ball_volume
from .errors import InputError, ResolutionError


@dataclass(frozen=True)
class Region:
    """Axis-aligned box (center, half_sides) or Euclidean ball (center, radius)."""

    kind: str
    center: tuple
    half_sides: tuple = None
    radius: float = None

    @staticmethod
    def box(center, half_sides):
        center = tuple(float(c) for c in center)
        half_sides = tuple(float(h) for h in half_sides)
        if len(center) != len(half_sides):
            raise InputError("center and half_sides must have equal length")
        if any(h <= 0 for h in half_sides):
            raise InputError("half-sides must be positive")
        return Region("box", center, half_sides=half_sides)

    @staticmethod
    def ball(center, radius):
        center = tuple(float(c) for c in center)
        radius = float(radius)
        if radius <= 0:
            raise InputError("radius must be positive")
        return Region("ball", center, radius=radius)

    @staticmethod
    def interval(a, b):
        """One-dimensional box [a, b]."""
        return Region.box(((a + b) / 2.0,), ((b - a) / 2.0,))

    @property
    def dimension(self):
        return len(self.center)

    def measure(self):
        if self.kind == "box":
            return math.prod(2.0 * h for h in self.half_sides)
        return unit_ball_volume(self.dimension) * self.radius ** self.dimension

    def bounding_halfwidths(self):
        if self.kind == "box":
            return self.half_sides
        return (self.radius,) * self.dimension

    def side_lengths(self):
        """Sides of the smallest enclosing axis-aligned hyperrectangle."""
        return tuple(2.0 * h for h in self.bounding_halfwidths())

    def contains(self, points):
        """Boolean mask for an (n, d) array of points (closure of the region)."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        c = np.asarray(self.center)
        if self.kind == "box":
            h = np.asarray(self.half_sides)
            return np.all(np.abs(points - c) <= h, axis=1)
        return np.sum((points - c) ** 2, axis=1) <= self.radius ** 2

    def scaled(self, factor):
        """Image under x -> factor * x (dilation about the origin)."""
        center = tuple(factor * c for c in self.center)
        if self.kind == "box":
            return Region("box", center, half_sides=tuple(factor * h for h in self.half_sides))
        return Region("ball", center, radius=factor * self.radius)

    def to_line(self):
        parts = [self.kind] + [repr(c) for c in self.center]
        if self.kind == "box":
            parts += [repr(h) for h in self.half_sides]
        else:
            parts.append(repr(self.radius))
        return " ".join(parts)

    @staticmethod
    def from_line(line, d):
        tokens = line.split()
        kind = tokens[0]
        vals = [float(t) for t in tokens[1:]]
        if kind == "box":
            if len(vals) != 2 * d:
                raise InputError(f"box line needs {2 * d} numbers, got {len(vals)}")
            return Region("box", tuple(vals[:d]), half_sides=tuple(vals[d:]))
        if kind == "ball":
            if len(vals) != d + 1:
                raise InputError(f"ball line needs {d + 1} numbers, got {len(vals)}")
            return Region("ball", tuple(vals[:d]), radius=vals[d])
        raise InputError(f"unknown region kind {kind!r}")


def _interiors_disjoint(a, b):
    """True if the interiors of the two regions can be certified disjoint.

    Box/box and ball/ball are exact; box/ball uses the exact distance from the
    box to the ball center.
    """
    ca, cb = np.asarray(a.center), np.asarray(b.center)
    if a.kind == "box" and b.kind == "box":
        gap = np.abs(ca - cb) - (np.asarray(a.half_sides) + np.asarray(b.half_sides))
        return bool(np.any(gap >= -1e-12))
    if a.kind == "ball" and b.kind == "ball":
        return float(np.linalg.norm(ca - cb)) >= a.radius + b.radius - 1e-12
    box, ball = (a, b) if a.kind == "box" else (b, a)
    delta = np.maximum(np.abs(np.asarray(ball.center) - np.asarray(box.center))
                       - np.asarray(box.half_sides), 0.0)
    return float(np.linalg.norm(delta)) >= ball.radius - 1e-12


@dataclass(frozen=True)
class SensorSet:
    """Disjoint union of regions; disjointness (up to boundary touching) is verified."""

    regions: tuple

    def __post_init__(self):
        regions = tuple(self.regions)
        object.__setattr__(self, "regions", regions)
        if not regions:
            return
        d = regions[0].dimension
        for r in regions:
            if r.dimension != d:
                raise InputError("regions of mixed dimension")
        for i in range(len(regions)):
            for j in range(i + 1, len(regions)):
                if not _interiors_disjoint(regions[i], regions[j]):
                    raise InputError(f"regions {i} and {j} have overlapping interiors")

    @property
    def dimension(self):
        if not self.regions:
            raise InputError("empty sensor set has no dimension")
        return self.regions[0].dimension

    def measure(self):
        return sum(r.measure() for r in self.regions)

    def contains(self, points):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        mask = np.zeros(points.shape[0], dtype=bool)
        for r in self.regions:
            mask |= r.contains(points)
        return mask

    def scaled(self, factor):
        return SensorSet(tuple(r.scaled(factor) for r in self.regions))

    def to_text(self):
        d = self.regions[0].dimension if self.regions else 0
        lines = [f"dim={d}"]
        lines.extend(r.to_line() for r in self.regions)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text):
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("dim="):
            raise InputError("missing dim= header")
        d = int(lines[0][4:])
        return SensorSet(tuple(Region.from_line(ln, d) for ln in lines[1:]))


@dataclass(frozen=True)
class CubeDensitySpec:
    """Per-cube density gamma^(1 + |k|^beta) on the scale-rho lattice."""

    gamma: float
    beta: float
    rho: float
    d: int

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise InputError("gamma must be strictly inside (0, 1)")
        if self.rho <= 0:
            raise InputError("rho must be positive")
        if self.beta < 0:
            raise InputError("beta must be non-negative")

    def required_ratio(self, k):
        k = np.asarray(k, dtype=float)
        return self.gamma ** (1.0 + float(np.linalg.norm(k)) ** self.beta)


@dataclass(frozen=True)
class BallDensitySpec:
    """Per-ball density gamma^(1 + |x|^alpha) at the variable scale rho(x).

    profile: "constant" uses rho(x) = R; "power" uses rho(x) = R(1+|x|^2)^((1-eps)/2),
    the largest radius allowed by the growth cap.
    """

    gamma: float
    alpha: float
    eps: float
    R: float
    profile: str = "power"

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise InputError("gamma must be strictly inside (0, 1)")
        if not 0.0 < self.eps <= 1.0:
            raise InputError("eps must lie in (0, 1]")
        if self.alpha < 0:
            raise InputError("alpha must be non-negative")
        if self.R <= 0:
            raise InputError("R must be positive")
        if self.profile not in ("constant", "power"):
            raise InputError(f"unknown radius profile {self.profile!r}")

    def radius_at(self, x):
        """rho(x) for an (n, d) array (or a single point)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim <= 1
        if x.ndim == 0:
            x = x[None, None]
        elif x.ndim == 1:
            x = x[None, :]
        if self.profile == "constant":
            out = np.full(x.shape[0], self.R)
        else:
            out = self.R * (1.0 + np.sum(x * x, axis=1)) ** ((1.0 - self.eps) / 2.0)
        return float(out[0]) if single else out

    def radius_cap(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
        return self.R * (1.0 + np.sum(x * x, axis=1)) ** ((1.0 - self.eps) / 2.0)


@dataclass(frozen=True)
class CoveringFamily:
    """Essential covering (Q_k) with overlap bound kappa and shape parameters.

    central holds the indices of J_c; transforms (Psi_k) default to the
    identity everywhere and are stored only for interface completeness.
    """

    elements: tuple
    kappa: float
    eta: float
    D: float
    eps: float
    central: tuple
    meta: dict = field(default_factory=dict)
    transforms: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "central", tuple(self.central))
        d = self.dimension
        if self.eta > d * unit_ball_volume(d) + 1e-12:
            raise InputError("eta exceeds the cap d * tau_d")

    @property
    def dimension(self):
        return self.elements[0].dimension

    def side_lengths(self, k):
        """The l_k vector of the element's enclosing hyperrectangle."""
        return self.elements[k].side_lengths()

    def overlap_at(self, points):
        """Number of covering elements containing each point."""
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        count = np.zeros(points.shape[0], dtype=int)
        for r in self.elements:
            count += r.contains(points)
        return count

    def validate(self, N):
        """Check the covering-shape hypotheses on the constructed family."""
        d = self.dimension
        if self.eta > d * unit_ball_volume(d) + 1e-12:
            raise InputError("eta exceeds d * tau_d")
        cap = self.D * N ** ((1.0 - self.eps) / 2.0)
        for k in self.central:
            l1 = sum(self.side_lengths(k))
            if l1 > cap * (1 + 1e-12):
                raise InputError(f"element {k}: ||l_k||_1 = {l1} exceeds D N^((1-eps)/2) = {cap}")
        return True

    def to_text(self):
        lines = [
            f"dim={self.dimension}",
            f"kappa={self.kappa!r}",
            f"eta={self.eta!r}",
            f"D={self.D!r}",
            f"eps={self.eps!r}",
            "central=" + ",".join(str(i) for i in self.central),
        ]
        lines.extend(r.to_line() for r in self.elements)
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text):
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        header = {}
        regions = []
        d = None
        for ln in lines:
            if "=" in ln and ln.split("=", 1)[0] in ("dim", "kappa", "eta", "D", "eps", "central"):
                key, val = ln.split("=", 1)
                header[key] = val
                if key == "dim":
                    d = int(val)
            else:
                regions.append(Region.from_line(ln, d))
        central = tuple(int(t) for t in header["central"].split(",") if t)
        return CoveringFamily(
            tuple(regions),
            kappa=float(header["kappa"]),
            eta=float(header["eta"]),
            D=float(header["D"]),
            eps=float(header["eps"]),
            central=central,
        )


def example_finite_measure_set(spec, window_radius):
    """Union of shrunken lattice cubes with side r_k = gamma^((1+|k|^beta)/d).

    Each unit cell then carries relative measure r_k^d = gamma^(1+|k|^beta),
    meeting the cube density condition with equality.  Materializes lattice
    points with |k|_inf <= window_radius.  Returns the set together with the
    exact per-cell ratios.
    """
    if window_radius <= 0:
        raise InputError("window_radius must be positive")
    if abs(spec.rho - 1.0) > 1e-15:
        raise InputError("the finite-measure example uses the unit lattice (rho = 1)")
    d = spec.d
    kmax = int(math.floor(window_radius))
    regions = []
    ratios = {}
    for k in multi_indices_window(d, kmax):
        r_k = spec.gamma ** ((1.0 + float(np.linalg.norm(k)) ** spec.beta) / d)
        regions.append(Region.box(k, (r_k / 2.0,) * d))
        ratios[k] = r_k ** d
    return SensorSet(tuple(regions)), ratios


def multi_indices_window(d, kmax):
    """Integer lattice points with |k|_inf <= kmax, deterministic order."""
    ranges = [range(-kmax, kmax + 1)] * d
    out = [()]
    for rng in ranges:
        out = [pref + (k,) for pref in out for k in rng]
    return out


@dataclass(frozen=True)
class DensityCellReport:
    cell: tuple
    measured: float
    required: float
    ok: bool


def density_check(S, spec, window_radius):
    """Exact per-lattice-cell density ratios of a box-union set against a CubeDensitySpec."""
    for r in S.regions:
        if r.kind == "ball":
            raise InputError("exact intersection volumes require box regions; rasterize balls first")
    d = spec.d
    rho = spec.rho
    kmax = int(math.floor(window_radius / rho))
    cell_volume = rho ** d
    reports = []
    for ik in multi_indices_window(d, kmax):
        k = tuple(rho * i for i in ik)
        inter = 0.0
        for r in S.regions:
            vol = 1.0
            for j in range(d):
                lo = max(k[j] - rho / 2.0, r.center[j] - r.half_sides[j])
                hi = min(k[j] + rho / 2.0, r.center[j] + r.half_sides[j])
                vol *= max(hi - lo, 0.0)
                if vol == 0.0:
                    break
            inter += vol
        measured = inter / cell_volume
        required = spec.required_ratio(k)
        reports.append(DensityCellReport(k, measured, required, measured >= required - 1e-12))
    return reports, all(rep.ok for rep in reports)


def lattice_covering(rho, d, N, kappa=1, window_margin=None):
    """Covering of the working window by lattice cubes of side rho.

    Materializes all cubes meeting B(0, C sqrt(N) + margin) with
    C = 32 d (1 + sqrt(log kappa)); J_c tags the cubes meeting B(0, C sqrt(N)).
    Parameters follow the identity-transform cube instantiation:
    eta = d^(-d/2), D = d rho, eps = 1.
    """
    if rho <= 0:
        raise InputError("rho must be positive")
    C = concentration_radius(d, kappa)
    radius = C * math.sqrt(N)
    margin = window_margin if window_margin is not None else 2.0 * rho * d
    kmax = int(math.floor((radius + margin) / rho + 0.5 * math.sqrt(d))) + 1
    half = (rho / 2.0,) * d
    ball_touch = radius + rho * math.sqrt(d) / 2.0  # center distance certifying intersection
    elements = []
    central = []
    for ik in multi_indices_window(d, kmax):
        center = tuple(rho * i for i in ik)
        if np.linalg.norm(center) > radius + margin + rho * math.sqrt(d):
            continue
        # exact cube/ball intersection test for the central tag
        delta = np.maximum(np.abs(np.asarray(center)) - rho / 2.0, 0.0)
        if np.linalg.norm(delta) < radius:
            central.append(len(elements))
        elements.append(Region.box(center, half))
    cov = CoveringFamily(
        tuple(elements),
        kappa=float(kappa),
        eta=d ** (-d / 2.0),
        D=d * rho,
        eps=1.0,
        central=tuple(central),
        meta={"C": C, "rho": rho, "N": N, "window_radius": radius + margin,
              "ball_touch": ball_touch},
    )
    cov.validate(N)
    return cov


def besicovitch_covering(spec, d, N, K=16, chunk=65536):
    """Greedy grid-based ball covering of the concentration ball A = B(0, C sqrt(N)).

    Rasterizes A at resolution min rho / 8, then repeatedly selects an
    uncovered grid point maximizing rho(.) and adds the ball centered there.
    The realized overlap is measured on the grid and reported in meta; the
    assumed overlap bound kappa = K^d enters the covering parameters.
    """
    if N < 1:
        raise InputError("N must be at least 1")
    kappa = float(K) ** d
    C = concentration_radius(d, kappa)
    A_radius = C * math.sqrt(N)
    # radius profile minimum over A: at the origin for both admitted profiles
    rho_min = spec.radius_at(np.zeros(d))
    h = rho_min / 8.0
    npts_axis = int(math.ceil(A_radius / h))
    if npts_axis > 40000:
        raise ResolutionError(
            f"grid of {npts_axis} points per semi-axis required; refine the window or profile"
        )
    side = 2 * npts_axis + 1
    axis = np.arange(-npts_axis, npts_axis + 1) * h
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    r2 = sum(g * g for g in grids).ravel()
    active = r2 <= A_radius ** 2
    if spec.profile == "constant":
        radii = np.full(r2.shape, float(spec.R))
    else:
        radii = spec.R * (1.0 + r2) ** ((1.0 - spec.eps) / 2.0)
    if np.any(radii[active] < h):
        raise ResolutionError("radius profile falls below the grid resolution")

    # grid points outside A start out "covered" so they are never selected
    covered = ~active
    overlap = np.zeros(r2.shape, dtype=np.int16)
    order = np.flatnonzero(active)
    order = order[np.argsort(-radii[order], kind="stable")]

    centers = []
    center_radii = []
    pos = 0
    n = order.shape[0]
    while pos < n:
        block = order[pos:min(pos + chunk, n)]
        for idx in block[~covered[block]]:
            if covered[idx]:
                continue
            c = np.array(np.unravel_index(int(idx), (side,) * d)) - npts_axis
            c = c * h
            r = float(radii[idx])
            _mark_ball(covered, overlap, c, r, h, npts_axis, side, d)
            centers.append(c)
            center_radii.append(r)
        pos += chunk
    if covered.sum() != covered.size:  # pragma: no cover - greedy covers by construction
        raise ResolutionError("greedy covering terminated with uncovered grid points")

    elements = tuple(Region.ball(c, r) for c, r in zip(centers, center_radii))
    cov = CoveringFamily(
        elements,
        kappa=kappa,
        eta=unit_ball_volume(d) / 2.0 ** d,
        D=4.0 * d * spec.R * C,
        eps=spec.eps,
        central=tuple(range(len(elements))),
        meta={
            "C": C,
            "A_radius": A_radius,
            "resolution": h,
            "kappa_measured": int(overlap[active].max()) if len(overlap) else 0,
            "N": N,
            "K": K,
            "has_remainder": True,
        },
    )
    cov.validate(N)
    return cov


def _mark_ball(covered, overlap, center, radius, h, npts_axis, side, d):
    """Mark all grid points within the ball as covered and bump the overlap count."""
    lo = np.maximum(np.floor((center - radius) / h).astype(np.int64), -npts_axis)
    hi = np.minimum(np.ceil((center + radius) / h).astype(np.int64), npts_axis)
    axes = [np.arange(lo[j], hi[j] + 1) for j in range(d)]
    grids = np.meshgrid(*axes, indexing="ij")
    dist2 = sum((g * h - c) ** 2 for g, c in zip(grids, center))
    mask = (dist2 <= radius ** 2).ravel()
    flat = grids[0].ravel() + npts_axis
    for j in range(1, d):
        flat = flat * side + (grids[j].ravel() + npts_axis)
    idx = flat[mask]
    covered[idx] = True
    overlap[idx] += 1


def scaled_set(S, t):
    """Dilation x -> t^(1/4) x of every region about the origin."""
    if t <= 0:
        raise InputError("t must be positive")
    return S.scaled(t ** 0.25)
