"""Piecewise variable exponents with values in [1, inf].

An exponent function assigns to each point of a box-shaped domain a value
p(x) in [1, inf].  Building blocks are constant boxes and, in one dimension,
smooth plateau bumps repeated along a center sequence.  Derived exponents
(the conjugate exponent, the fractional smoothing dual) are stored lazily as
transform chains over the same piece data so that analytic integration
routines keep access to the exact piece geometry.

Center sequences can hold astronomically many bumps (counts around 1e14 show
up in the long-interval witness constructions), so nothing here ever
materializes the full center list; queries work through the inverse of the
center map plus a short verification scan.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from itertools import combinations

import numpy as np

from .errors import DomainError, PreconditionError, SpecParseError

INF = math.inf

_MAX_OVERLAP_PIECES = 16


def as_box(obj, dimension=None):
    """Normalize to a tuple of (lo, hi) float pairs, validating shape."""
    try:
        box = tuple((float(lo), float(hi)) for lo, hi in obj)
    except (TypeError, ValueError) as exc:
        raise SpecParseError(f"malformed box: {obj!r}") from exc
    if dimension is not None and len(box) != dimension:
        raise SpecParseError(f"box has {len(box)} axes, expected {dimension}")
    for lo, hi in box:
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise SpecParseError(f"degenerate box axis ({lo}, {hi})")
    return box


def box_volume(box):
    vol = 1.0
    for lo, hi in box:
        vol *= hi - lo
    return vol


def box_intersect(a, b):
    """Intersection of two boxes, or None when the overlap has measure zero."""
    out = []
    for (alo, ahi), (blo, bhi) in zip(a, b):
        lo, hi = max(alo, blo), min(ahi, bhi)
        if hi <= lo:
            return None
        out.append((lo, hi))
    return tuple(out)


def box_subtract_volume(box, earlier):
    """Volume of box minus the union of the earlier boxes (inclusion-exclusion)."""
    clipped = [c for c in (box_intersect(box, e) for e in earlier) if c is not None]
    if len(clipped) > _MAX_OVERLAP_PIECES:
        raise PreconditionError(
            f"too many overlapping pieces ({len(clipped)}) for exact box algebra"
        )
    union = 0.0
    for r in range(1, len(clipped) + 1):
        sign = 1.0 if r % 2 == 1 else -1.0
        for combo in combinations(clipped, r):
            inter = combo[0]
            for c in combo[1:]:
                inter = box_intersect(inter, c)
                if inter is None:
                    break
            if inter is not None:
                union += sign * box_volume(inter)
    return box_volume(box) - union


def points_in_box(pts, box):
    """Boolean mask of rows of pts (m, n) lying in the closed box."""
    mask = np.ones(pts.shape[0], dtype=bool)
    for axis, (lo, hi) in enumerate(box):
        mask &= (pts[:, axis] >= lo) & (pts[:, axis] <= hi)
    return mask


@dataclass(frozen=True)
class PlateauBump:
    """Symmetric bump: flat at `height` on [-m, m], smoothly falling to 0 at +-s."""

    height: float
    plateau_halfwidth: float
    support_halfwidth: float

    def __post_init__(self):
        m, s = self.plateau_halfwidth, self.support_halfwidth
        if not (0.0 < m < s):
            raise SpecParseError(f"need 0 < plateau_halfwidth < support_halfwidth, got {m}, {s}")
        if not (self.height >= 0.0 and math.isfinite(self.height)):
            raise SpecParseError(f"bump height must be finite and >= 0, got {self.height}")

    def profile(self, dist):
        """Bump value at distance `dist` from the center (vectorized)."""
        d = np.asarray(dist, dtype=float)
        m, s = self.plateau_halfwidth, self.support_halfwidth
        u = np.clip((s - d) / (s - m), 0.0, 1.0)
        return self.height * u * u * (3.0 - 2.0 * u)

    def shoulder_integral(self, g, nodes=None):
        """Integral of g(profile) over one shoulder m <= d <= s of the bump.

        Uses fixed Gauss-Legendre quadrature; the integrand is smooth.
        """
        x, w = _gauss_nodes() if nodes is None else nodes
        m, s = self.plateau_halfwidth, self.support_halfwidth
        half = 0.5 * (s - m)
        mid = 0.5 * (s + m)
        d = mid + half * x
        return half * float(np.dot(w, g(self.profile(d))))


_GAUSS_CACHE = {}


def _gauss_nodes(order=48):
    if order not in _GAUSS_CACHE:
        _GAUSS_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GAUSS_CACHE[order]


@dataclass(frozen=True)
class CenterSequence:
    """Strictly increasing bump centers c_k for k = 1..count.

    kind "exp"   : c_k = exp(rate * k)
    kind "power" : c_k = k ** rate
    kind "fixed" : explicit positions (internal use, not serializable)
    """

    kind: str
    rate: float = 1.0
    count: int = 1
    positions: tuple = ()

    def __post_init__(self):
        if self.kind not in ("exp", "power", "fixed"):
            raise SpecParseError(f"unknown center kind {self.kind!r}")
        if self.kind == "fixed":
            if len(self.positions) == 0:
                raise SpecParseError("fixed centers need at least one position")
            object.__setattr__(self, "count", len(self.positions))
            if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
                raise SpecParseError("fixed centers must be strictly increasing")
        else:
            if not (self.rate > 0 and math.isfinite(self.rate)):
                raise SpecParseError(f"center rate must be positive, got {self.rate}")
            if int(self.count) < 1:
                raise SpecParseError(f"center count must be >= 1, got {self.count}")
            object.__setattr__(self, "count", int(self.count))

    def position(self, k):
        """Center position(s) for 1-based indices k (vectorized)."""
        k = np.asarray(k, dtype=float)
        if self.kind == "exp":
            return np.exp(self.rate * k)
        if self.kind == "power":
            return k ** self.rate
        idx = np.clip(k.astype(int) - 1, 0, self.count - 1)
        return np.asarray(self.positions, dtype=float)[idx]

    def real_index(self, x):
        """Continuous inverse of the center map (vectorized, clipped at 0)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "exp":
            return np.where(x > 0, np.log(np.maximum(x, 1e-300)) / self.rate, 0.0)
        if self.kind == "power":
            return np.where(x > 0, np.maximum(x, 0.0) ** (1.0 / self.rate), 0.0)
        # fixed: nearest index by search
        pos = np.asarray(self.positions, dtype=float)
        return np.clip(np.searchsorted(pos, x) + 0.5, 0.5, self.count + 0.5)

    def index_range_in(self, lo, hi):
        """(k_first, k_last) with c_k in [lo, hi]; empty when k_last < k_first.

        Inversion of the center map is verified by a short scan so float
        rounding at huge coordinates cannot drop or double-count a center.
        """
        if self.kind == "fixed":
            pos = np.asarray(self.positions, dtype=float)
            k_first = int(np.searchsorted(pos, lo, side="left")) + 1
            k_last = int(np.searchsorted(pos, hi, side="right"))
            return k_first, k_last
        a = float(self.real_index(max(lo, 0.0)))
        b = float(self.real_index(max(hi, 0.0)))
        k_first = max(1, int(math.floor(a)) - 2)
        while k_first <= self.count and float(self.position(k_first)) < lo:
            k_first += 1
        k_last = min(self.count, int(math.ceil(b)) + 2)
        while k_last >= 1 and float(self.position(k_last)) > hi:
            k_last -= 1
        return k_first, min(k_last, self.count)

    def nearest_distance(self, x):
        """Distance from each point of x to the closest center (vectorized)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "fixed":
            pos = np.asarray(self.positions, dtype=float)
            d = np.abs(x[..., None] - pos[None, ...])
            return d.min(axis=-1)
        k0 = np.floor(self.real_index(x))
        best = np.full(x.shape, np.inf)
        for dk in (-1.0, 0.0, 1.0, 2.0):
            k = np.clip(k0 + dk, 1, self.count)
            best = np.minimum(best, np.abs(x - self.position(k)))
        return best

    def min_spacing(self):
        if self.count < 2:
            return INF
        if self.kind == "fixed":
            pos = np.asarray(self.positions, dtype=float)
            return float(np.min(np.diff(pos)))
        # spacing is monotone in k for both families, so one end is extremal
        ends = [
            float(self.position(2) - self.position(1)),
            float(self.position(self.count) - self.position(self.count - 1)),
        ]
        return min(ends)


@dataclass(frozen=True)
class ConstantPiece:
    box: tuple
    value: float

    def __post_init__(self):
        if not (self.value >= 1.0):
            raise SpecParseError(f"exponent value must be >= 1, got {self.value}")

    def raw_values(self, pts):
        return np.full(pts.shape[0], self.value, dtype=float)


@dataclass(frozen=True)
class BumpsPiece:
    """One-dimensional piece: base level plus disjoint plateau perturbations.

    direction +1 raises the bumps above the base level, -1 digs wells below it;
    `top` is always the plateau value at a bump center.
    """

    box: tuple
    base: float
    bump: PlateauBump
    centers: CenterSequence
    direction: int = 1

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise SpecParseError(f"bump direction must be +1 or -1, got {self.direction}")
        if not math.isfinite(self.base):
            raise SpecParseError(f"bump base must be finite, got {self.base}")
        if min(self.base, self.base + self.direction * self.bump.height) < 1.0:
            raise SpecParseError(
                f"exponent values must stay >= 1: base {self.base}, "
                f"plateau {self.base + self.direction * self.bump.height}"
            )
        spacing = self.centers.min_spacing()
        need = 2.0 * self.bump.support_halfwidth
        if spacing < need * (1.0 - 1e-12):
            raise SpecParseError(
                f"bump supports overlap: min center spacing {spacing} < {need}"
            )

    @property
    def top(self):
        return self.base + self.direction * self.bump.height

    def raw_values(self, pts):
        d = self.centers.nearest_distance(pts[:, 0])
        return self.base + self.direction * self.bump.profile(d)

    def full_and_straddling(self, lo, hi):
        """Split centers touching [lo, hi] into fully-inside and straddling ones.

        Returns ((k_first, k_last), straddlers) where the index range covers
        centers whose whole support sits inside [lo, hi] and straddlers is a
        short list of (k, c_k) whose support crosses an endpoint.  Supports
        are pairwise disjoint, so at most a couple of straddlers exist per end.
        """
        s = self.bump.support_halfwidth
        k_in_first, k_in_last = self.centers.index_range_in(lo + s, hi - s)
        k_any_first, k_any_last = self.centers.index_range_in(lo - s, hi + s)
        candidates = set(range(k_any_first, min(k_any_first + 4, k_any_last) + 1))
        candidates |= set(range(max(k_any_first, k_any_last - 4), k_any_last + 1))
        straddlers = []
        for k in sorted(candidates):
            if k_in_first <= k <= k_in_last:
                continue
            c = float(self.centers.position(k))
            if min(hi, c + s) > max(lo, c - s):
                straddlers.append((k, c))
        return (k_in_first, k_in_last), straddlers

    def support_cover_length(self, lo, hi):
        """Length of [lo, hi] covered by bump supports (exact up to rounding)."""
        s = self.bump.support_halfwidth
        (k_in_first, k_in_last), straddlers = self.full_and_straddling(lo, hi)
        cover = max(0, k_in_last - k_in_first + 1) * 2.0 * s
        for _, c in straddlers:
            cover += max(0.0, min(hi, c + s) - max(lo, c - s))
        return cover


def _tf_scalar(ops, v):
    for op in ops:
        if op[0] == "conjugate":
            if v == 1.0:
                v = INF
            elif v == INF:
                v = 1.0
            else:
                v = v / (v - 1.0)
        else:
            _, alpha, n = op
            if alpha == 0.0:
                continue
            den = n - alpha * v
            v = INF if (v == INF or den <= 0.0) else n * v / den
    return v


def _tf_array(ops, values):
    v = np.array(values, dtype=float, copy=True)
    for op in ops:
        if op[0] == "conjugate":
            one = v == 1.0
            infm = np.isinf(v)
            with np.errstate(divide="ignore", invalid="ignore"):
                w = v / (v - 1.0)
            w[one] = np.inf
            w[infm] = 1.0
            v = w
        else:
            _, alpha, n = op
            if alpha == 0.0:
                continue
            den = n - alpha * v
            with np.errstate(divide="ignore", invalid="ignore"):
                w = n * v / den
            w[(den <= 0.0) | np.isinf(v)] = np.inf
            v = w
    return v


@dataclass(frozen=True)
class Strata:
    """Which of the three level regions of the exponent carry positive measure."""

    has_one: bool
    has_finite: bool
    has_inf: bool

    @property
    def count(self):
        return int(self.has_one) + int(self.has_finite) + int(self.has_inf)


@dataclass(frozen=True)
class ExponentFunction:
    dimension: int
    domain: tuple
    pieces: tuple
    transforms: tuple = ()

    def __post_init__(self):
        if self.dimension < 1:
            raise SpecParseError(f"dimension must be >= 1, got {self.dimension}")
        object.__setattr__(self, "domain", as_box(self.domain, self.dimension))
        if not self.pieces:
            raise SpecParseError("exponent needs at least one piece")
        for piece in self.pieces:
            if len(piece.box) != self.dimension:
                raise SpecParseError("piece box dimension mismatch")
            if isinstance(piece, BumpsPiece) and self.dimension != 1:
                raise SpecParseError("bump pieces are one-dimensional only")

    @classmethod
    def constant(cls, value, domain):
        box = as_box(domain)
        return cls(dimension=len(box), domain=box, pieces=(ConstantPiece(box, value),))

    # -- evaluation ---------------------------------------------------------

    def coerce_points(self, points):
        pts = np.asarray(points, dtype=float)
        if self.dimension == 1:
            pts = pts.reshape(-1, 1)
        elif pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[1] != self.dimension:
            raise DomainError(f"points have shape {np.shape(points)}, expected (m, {self.dimension})")
        return pts

    def raw_values(self, points):
        """Pre-transform exponent values; first matching piece wins."""
        pts = self.coerce_points(points)
        inside = points_in_box(pts, self.domain)
        if not inside.all():
            bad = pts[~inside][0]
            raise DomainError(f"point {bad.tolist()} outside domain {self.domain}")
        out = np.empty(pts.shape[0], dtype=float)
        done = np.zeros(pts.shape[0], dtype=bool)
        for piece in self.pieces:
            sel = ~done & points_in_box(pts, piece.box)
            if sel.any():
                out[sel] = piece.raw_values(pts[sel])
                done[sel] = True
        if not done.all():
            bad = pts[~done][0]
            raise DomainError(f"point {bad.tolist()} not covered by any piece")
        return out

    def values(self, points):
        return _tf_array(self.transforms, self.raw_values(points))

    # -- structure ----------------------------------------------------------

    def _raw_level_sets(self):
        """(atoms, open intervals) of values attained on positive measure."""
        atoms, intervals = set(), []
        for i, piece in enumerate(self.pieces):
            region = box_intersect(piece.box, self.domain)
            if region is None:
                continue
            eff = box_subtract_volume(region, [q.box for q in self.pieces[:i]])
            if eff <= 1e-12 * box_volume(region):
                continue
            cut = eff < box_volume(region) * (1.0 - 1e-12)
            if isinstance(piece, ConstantPiece):
                atoms.add(piece.value)
                continue
            lo, hi = region[0]
            s = piece.bump.support_halfwidth
            m = piece.bump.plateau_halfwidth
            if cut:
                # earlier pieces cut into this box; keep every candidate level
                atoms.add(piece.base)
                if piece.bump.height > 0:
                    atoms.add(piece.top)
                    intervals.append((piece.base, piece.top))
                continue
            kf, kl = piece.centers.index_range_in(lo - s, hi + s)
            touches_support = kl >= kf
            pf, pl = piece.centers.index_range_in(lo - m, hi + m)
            touches_plateau = pl >= pf
            cover = piece.support_cover_length(lo, hi) if touches_support else 0.0
            if (hi - lo) - cover > 1e-12 * max(1.0, hi - lo):
                atoms.add(piece.base)
            if piece.bump.height > 0 and touches_plateau:
                atoms.add(piece.top)
            if piece.bump.height > 0 and touches_support:
                intervals.append((piece.base, piece.top))
        return atoms, intervals

    def strata(self):
        atoms, intervals = self._raw_level_sets()
        t_atoms = {_tf_scalar(self.transforms, v) for v in atoms}
        t_ints = []
        for a, b in intervals:
            wa, wb = _tf_scalar(self.transforms, a), _tf_scalar(self.transforms, b)
            t_ints.append((min(wa, wb), max(wa, wb)))
        has_one = any(v == 1.0 for v in t_atoms)
        has_inf = any(v == INF for v in t_atoms)
        has_finite = any(1.0 < v < INF for v in t_atoms) or any(
            hi > 1.0 and lo < INF and hi > lo for lo, hi in t_ints
        )
        return Strata(has_one, has_finite, has_inf)

    def bounds(self):
        """Essential (inf, sup) of the exponent over its domain."""
        atoms, intervals = self._raw_level_sets()
        lows, highs = [], []
        for v in atoms:
            w = _tf_scalar(self.transforms, v)
            lows.append(w)
            highs.append(w)
        for a, b in intervals:
            wa, wb = _tf_scalar(self.transforms, a), _tf_scalar(self.transforms, b)
            lows.append(min(wa, wb))
            highs.append(max(wa, wb))
        return min(lows), max(highs)


def evaluate(p, x):
    """Exponent value at a single point."""
    if p.dimension == 1:
        pts = np.asarray([x], dtype=float)
    else:
        pts = np.asarray(x, dtype=float).reshape(1, -1)
    return float(p.values(pts)[0])


def conjugate(p):
    """Pointwise conjugate exponent: 1/p(x) + 1/p'(x) = 1, with 1/inf = 0."""
    return replace(p, transforms=p.transforms + (("conjugate",),))


def sobolev_dual(p, alpha):
    """Fractional dual exponent 1/q(x) = 1/p(x) - alpha/n, with q = inf where p = n/alpha."""
    n = p.dimension
    if not (0.0 <= alpha < n):
        raise PreconditionError(f"need 0 <= alpha < n = {n}, got alpha = {alpha}")
    if alpha == 0.0:
        return p
    p_plus = p.bounds()[1]
    if p_plus > n / alpha * (1.0 + 1e-12):
        raise PreconditionError(
            f"sobolev dual needs p_plus <= n/alpha; got p_plus = {p_plus}, n/alpha = {n / alpha}"
        )
    return replace(p, transforms=p.transforms + (("sobolev", float(alpha), float(n)),))


@dataclass(frozen=True)
class LH0Report:
    sup_value: float
    witness_x: tuple
    witness_y: tuple
    pairs_used: int


def lh0_modulus(p, num_pairs=4000, seed=0):
    """Sampled local log-continuity modulus sup |p(x)-p(y)| * (-log|x-y|).

    Pairs are drawn at geometric scales below 1/2; the reported value is a
    lower estimate of the true modulus.  Requires a bounded exponent.
    """
    if p.bounds()[1] == INF:
        raise PreconditionError("log-continuity modulus needs p_plus < inf")
    rng = np.random.default_rng(seed)
    dom = np.asarray(p.domain, dtype=float)
    n = p.dimension
    x = rng.uniform(dom[:, 0], dom[:, 1], size=(num_pairs, n))
    scales = 10.0 ** rng.uniform(-9, math.log10(0.4999), size=num_pairs)
    dirs = rng.normal(size=(num_pairs, n))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    y = np.clip(x + scales[:, None] * dirs, dom[:, 0], dom[:, 1])
    dist = np.linalg.norm(x - y, axis=1)
    keep = (dist > 0.0) & (dist < 0.5)
    if not keep.any():
        return LH0Report(0.0, (), (), 0)
    x, y, dist = x[keep], y[keep], dist[keep]
    gap = np.abs(p.values(x) - p.values(y))
    vals = gap * (-np.log(dist))
    i = int(np.argmax(vals))
    return LH0Report(float(vals[i]), tuple(x[i]), tuple(y[i]), int(keep.sum()))


# -- JSON spec format -------------------------------------------------------


def _value_from_json(v):
    if isinstance(v, str):
        if v.lower() in ("inf", "infinity"):
            return INF
        raise SpecParseError(f"bad exponent value string {v!r}")
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise SpecParseError(f"bad exponent value {v!r}") from exc


def _value_to_json(v):
    return "inf" if v == INF else v


def from_spec(data):
    """Build an ExponentFunction from a parsed JSON spec dict."""
    if not isinstance(data, dict):
        raise SpecParseError("spec root must be an object")
    try:
        dimension = int(data["dimension"])
        domain = as_box(data["domain"])
        raw_pieces = data["pieces"]
    except KeyError as exc:
        raise SpecParseError(f"spec missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise SpecParseError(f"malformed spec header: {exc}") from exc
    if not isinstance(raw_pieces, list) or not raw_pieces:
        raise SpecParseError("spec needs a nonempty pieces list")
    pieces = []
    for entry in raw_pieces:
        if not isinstance(entry, dict):
            raise SpecParseError(f"piece entries must be objects, got {entry!r}")
        try:
            box = as_box(entry["box"], dimension)
            kind = entry["kind"]
        except KeyError as exc:
            raise SpecParseError(f"piece missing field {exc}") from exc
        if kind == "constant":
            pieces.append(ConstantPiece(box, _value_from_json(entry.get("value"))))
        elif kind == "bumps":
            spec = entry.get("value")
            if not isinstance(spec, dict):
                raise SpecParseError("bumps piece needs an object under 'value'")
            try:
                centers_spec = spec["centers"]
                centers = CenterSequence(
                    kind=centers_spec["kind"],
                    rate=float(centers_spec["rate"]),
                    count=int(centers_spec["count"]),
                )
                bump = PlateauBump(
                    height=float(spec["height"]),
                    plateau_halfwidth=float(spec["plateau_halfwidth"]),
                    support_halfwidth=float(spec["support_halfwidth"]),
                )
                dir_name = spec.get("direction", "up")
                if dir_name not in ("up", "down"):
                    raise SpecParseError(f"bump direction must be 'up' or 'down', got {dir_name!r}")
                pieces.append(
                    BumpsPiece(box, float(spec["base"]), bump, centers,
                               direction=1 if dir_name == "up" else -1)
                )
            except KeyError as exc:
                raise SpecParseError(f"bumps piece missing field {exc}") from exc
            except (TypeError, ValueError) as exc:
                raise SpecParseError(f"malformed bumps piece: {exc}") from exc
        else:
            raise SpecParseError(f"unknown piece kind {kind!r}")
    return ExponentFunction(dimension=dimension, domain=domain, pieces=tuple(pieces))


def to_spec(p):
    """Serialize an ExponentFunction back to the JSON spec dict."""
    if p.transforms:
        raise SpecParseError("transform chains are not serializable; emit the base exponent")
    pieces = []
    for piece in p.pieces:
        if isinstance(piece, ConstantPiece):
            pieces.append(
                {"box": [list(ax) for ax in piece.box], "kind": "constant",
                 "value": _value_to_json(piece.value)}
            )
        else:
            if piece.centers.kind == "fixed":
                raise SpecParseError("fixed center lists are not serializable")
            pieces.append(
                {
                    "box": [list(ax) for ax in piece.box],
                    "kind": "bumps",
                    "value": {
                        "base": piece.base,
                        "height": piece.bump.height,
                        "plateau_halfwidth": piece.bump.plateau_halfwidth,
                        "support_halfwidth": piece.bump.support_halfwidth,
                        "direction": "up" if piece.direction == 1 else "down",
                        "centers": {
                            "kind": piece.centers.kind,
                            "rate": piece.centers.rate,
                            "count": piece.centers.count,
                        },
                    },
                }
            )
    return {
        "dimension": p.dimension,
        "domain": [list(ax) for ax in p.domain],
        "pieces": pieces,
    }


def load_spec(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise SpecParseError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SpecParseError(f"invalid JSON in {path}: {exc}") from exc
    return from_spec(data)


def save_spec(p, path):
    with open(path, "w") as fh:
        json.dump(to_spec(p), fh, indent=2)
        fh.write("\n")
