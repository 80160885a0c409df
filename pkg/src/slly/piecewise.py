"""Exact calculus for piecewise-exponential functions on ordering chambers.

The coincidence hyperplanes x_a = x_b cut R^N into N! open chambers, one per
ordering permutation of the coordinates.  Every function handled here is, on
each chamber, a finite sum

    sum_t  coef_t * exp(kappa_t . x),        coef_t, kappa_t complex,

so differentiation, restriction to a chamber wall and the delta-potential
matching conditions (continuity of the function, prescribed jump of the
normal derivative) all reduce to exact coefficient arithmetic.  No quadrature
or discretisation enters anywhere in this module.

Floating-point canonicalisation rules: two kappa vectors are identified when
they agree componentwise within ``KAPPA_TOL``; terms whose coefficient
magnitude falls below ``DROP_TOL`` are discarded.  Points within
``HYPERPLANE_GAP`` of a hyperplane cannot be evaluated (the calculus defines
hyperplane values only through one-sided limits).
"""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import AmbiguousPointError, DiscontinuityError

KAPPA_TOL = 1e-12
DROP_TOL = 1e-14
HYPERPLANE_GAP = 1e-9
MAX_PARTICLES = 10

#: continuity threshold required of inputs to the jump condition
JUMP_CONTINUITY_TOL = 1e-10


class ExpTerm(NamedTuple):
    """One exponential term coef * exp(sum_j kappa[j] * x_j)."""

    coef: complex
    kappa: tuple[complex, ...]


@dataclass(frozen=True, order=True)
class Region:
    """Ordering chamber of R^N labelled by a permutation.

    ``order = (s_1, ..., s_N)`` means x_{s_1} < x_{s_2} < ... < x_{s_N};
    particle labels are 1-based.
    """

    order: tuple[int, ...]

    def __post_init__(self):
        n = len(self.order)
        if sorted(self.order) != list(range(1, n + 1)):
            raise ValueError(f"order {self.order} is not a permutation of 1..{n}")

    @property
    def n(self) -> int:
        return len(self.order)

    def rank(self, j: int) -> int:
        """1-based position of particle j in the ordering (1 = leftmost)."""
        return self.order.index(j) + 1

    def sign(self, a: int, b: int) -> int:
        """Sign of x_a - x_b on this chamber (+1 iff x_a > x_b)."""
        if a == b:
            raise ValueError("sign of x_a - x_b needs a != b")
        return 1 if self.rank(a) > self.rank(b) else -1

    def swap_adjacent(self, slot: int) -> "Region":
        """Neighbouring chamber across the wall between ranks slot, slot+1 (0-based slot)."""
        o = list(self.order)
        o[slot], o[slot + 1] = o[slot + 1], o[slot]
        return Region(tuple(o))


@dataclass(frozen=True)
class Interface:
    """Wall x_a = x_b between two chambers that differ by one adjacent swap.

    Orientation convention: on ``left`` x_a < x_b, on ``right`` x_a > x_b,
    so "right" is the x_a - x_b -> 0+ side of the wall.
    """

    left: Region
    right: Region
    pair: tuple[int, int]

    def __post_init__(self):
        a, b = self.pair
        if not a < b:
            raise ValueError("interface pair must be ordered a < b")
        if self.left.sign(a, b) != -1 or self.right.sign(a, b) != 1:
            raise ValueError("interface orientation violated (left must have x_a < x_b)")
        slots = [i for i, (s, t) in enumerate(zip(self.left.order, self.right.order)) if s != t]
        if (
            len(slots) != 2
            or slots[1] != slots[0] + 1
            or sorted(self.left.order[slots[0]: slots[0] + 2]) != [a, b]
        ):
            raise ValueError("interface regions must differ by the adjacent swap of its pair")


@dataclass(frozen=True)
class RegionFunction:
    """Piecewise-exponential function: one exact exponential sum per chamber.

    ``terms`` maps a Region to a canonical tuple of ExpTerms; absent regions
    are identically zero there.  Instances are treated as immutable.
    """

    n: int
    terms: Mapping[Region, tuple[ExpTerm, ...]]

    def region_terms(self, region: Region) -> tuple[ExpTerm, ...]:
        return self.terms.get(region, ())


def _guard_size(n: int) -> None:
    if not 1 <= n <= MAX_PARTICLES:
        raise ValueError(f"particle count {n} outside supported range 1..{MAX_PARTICLES}")


def enumerate_regions(n: int) -> list[Region]:
    """All N! ordering chambers, in lexicographic order of the permutation."""
    _guard_size(n)
    return [Region(p) for p in itertools.permutations(range(1, n + 1))]


def enumerate_interfaces(n: int) -> list[Interface]:
    """All chamber walls; exactly N!*(N-1)/2 of them.

    Each wall joins two chambers differing by an adjacent transposition and
    carries the particle pair (a, b), a < b, whose coordinates coincide on it.
    """
    _guard_size(n)
    out = []
    for region in enumerate_regions(n):
        for slot in range(n - 1):
            s, t = region.order[slot], region.order[slot + 1]
            if s < t:  # region is the left (x_s < x_t) side; emit once
                out.append(Interface(left=region, right=region.swap_adjacent(slot), pair=(s, t)))
    return out


def sign_value(region: Region, a: int, b: int) -> int:
    """Chamber-constant value of the sign of x_a - x_b."""
    return region.sign(a, b)


# ---------------------------------------------------------------------------
# canonicalisation and construction
# ---------------------------------------------------------------------------

def _sort_key(item: tuple[complex, tuple[complex, ...]]):
    _, kappa = item
    key: list[float] = []
    for z in kappa:
        key.append(z.real)
        key.append(z.imag)
    return tuple(key)


def _merge_terms(raw: Iterable[tuple[complex, Sequence[complex]]]) -> tuple[ExpTerm, ...]:
    """Merge terms with kappa equal componentwise within KAPPA_TOL, drop tiny ones."""
    items = sorted(((complex(c), tuple(complex(k) for k in kap)) for c, kap in raw), key=_sort_key)
    merged: list[list] = []
    for coef, kappa in items:
        if merged:
            ref = merged[-1][1]
            if all(abs(k - r) <= KAPPA_TOL for k, r in zip(kappa, ref)):
                merged[-1][0] += coef
                continue
        merged.append([coef, kappa])
    return tuple(ExpTerm(c, k) for c, k in merged if abs(c) > DROP_TOL)


def build(n: int, data: Mapping[Region, Iterable[tuple[complex, Sequence[complex]]]]) -> RegionFunction:
    """Assemble and canonicalise a RegionFunction from raw (coef, kappa) pairs."""
    terms = {}
    for region, raw in data.items():
        if region.n != n:
            raise ValueError("all regions must carry the same particle count")
        merged = _merge_terms(raw)
        if merged:
            terms[region] = merged
    return RegionFunction(n=n, terms=terms)


def canonicalize(f: RegionFunction) -> RegionFunction:
    """Re-merge and re-sort every chamber; idempotent."""
    return build(f.n, {r: [(t.coef, t.kappa) for t in ts] for r, ts in f.terms.items()})


def constant_function(n: int, value: complex = 1.0) -> RegionFunction:
    """The chamber-wise constant function (kappa = 0 everywhere)."""
    zero = (0.0 + 0.0j,) * n
    return build(n, {r: [(value, zero)] for r in enumerate_regions(n)})


def zero_function(n: int) -> RegionFunction:
    return RegionFunction(n=n, terms={})


def add(f: RegionFunction, g: RegionFunction) -> RegionFunction:
    if f.n != g.n:
        raise ValueError("dimension mismatch")
    data: dict[Region, list] = {}
    for h in (f, g):
        for region, ts in h.terms.items():
            data.setdefault(region, []).extend((t.coef, t.kappa) for t in ts)
    return build(f.n, data)


def scale(f: RegionFunction, z: complex) -> RegionFunction:
    return build(f.n, {r: [(z * t.coef, t.kappa) for t in ts] for r, ts in f.terms.items()})


def is_zero(f: RegionFunction, tol: float = 0.0) -> bool:
    return max_coefficient(f) <= tol


def max_coefficient(f: RegionFunction) -> float:
    return max((abs(t.coef) for ts in f.terms.values() for t in ts), default=0.0)


def coefficient_distance(f: RegionFunction, g: RegionFunction) -> float:
    """Max coefficient magnitude of f - g after canonicalisation."""
    return max_coefficient(add(f, scale(g, -1.0)))


# ---------------------------------------------------------------------------
# calculus
# ---------------------------------------------------------------------------

def differentiate(f: RegionFunction, j: int) -> RegionFunction:
    """Exact d/dx_j, chamber by chamber (no distributional interface terms)."""
    if not 1 <= j <= f.n:
        raise ValueError(f"coordinate index {j} out of range 1..{f.n}")
    return build(
        f.n,
        {r: [(t.coef * t.kappa[j - 1], t.kappa) for t in ts] for r, ts in f.terms.items()},
    )


def laplacian(f: RegionFunction) -> RegionFunction:
    """Sum of second derivatives; per term a multiplication by sum kappa_j^2."""
    return build(
        f.n,
        {
            r: [(t.coef * sum(k * k for k in t.kappa), t.kappa) for t in ts]
            for r, ts in f.terms.items()
        },
    )


def multiply_sign(f: RegionFunction, a: int, b: int) -> RegionFunction:
    """Multiply by the chamber-constant sign of x_a - x_b."""
    if a == b:
        raise ValueError("multiply_sign needs a != b")
    return build(
        f.n,
        {r: [(r.sign(a, b) * t.coef, t.kappa) for t in ts] for r, ts in f.terms.items()},
    )


def evaluate(f: RegionFunction, x: Sequence[float]) -> complex:
    """Evaluate at a point strictly inside a chamber.

    Points within HYPERPLANE_GAP of a hyperplane are rejected: the function
    value there is defined only through one-sided limits, so the caller must
    pick a side explicitly.
    """
    if len(x) != f.n:
        raise ValueError("point dimension mismatch")
    order = tuple(sorted(range(1, f.n + 1), key=lambda j: x[j - 1]))
    xs = sorted(x)
    if any(xs[i + 1] - xs[i] <= HYPERPLANE_GAP for i in range(len(xs) - 1)):
        raise AmbiguousPointError(
            f"point {tuple(x)} lies within {HYPERPLANE_GAP} of a coincidence hyperplane"
        )
    total = 0.0 + 0.0j
    for term in f.region_terms(Region(order)):
        total += term.coef * cmath.exp(sum(k * xv for k, xv in zip(term.kappa, x)))
    return total


# ---------------------------------------------------------------------------
# interface restrictions and matching residuals
# ---------------------------------------------------------------------------

def _restrict_terms(terms: Iterable[ExpTerm], a: int, b: int, n: int) -> tuple[ExpTerm, ...]:
    """Substitute x_b := x_a; result lives in the N-1 variables with x_b deleted."""
    keep = [j for j in range(1, n + 1) if j != b]
    raw = []
    for t in terms:
        kap = list(t.kappa)
        kap[a - 1] = kap[a - 1] + kap[b - 1]
        raw.append((t.coef, tuple(kap[j - 1] for j in keep)))
    return _merge_terms(raw)


def restrict_to_interface(
    f: RegionFunction, iface: Interface, side: Literal["left", "right"]
) -> tuple[ExpTerm, ...]:
    """One-sided limit of f on the wall, as a canonical sum in N-1 variables.

    The reduced variables are x_1 .. x_N with x_b deleted and kappa_a merged
    to kappa_a + kappa_b, so sums restricted from either side are directly
    comparable term by term.
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    region = iface.left if side == "left" else iface.right
    a, b = iface.pair
    return _restrict_terms(f.region_terms(region), a, b, f.n)


def _sum_scale(terms: Iterable[ExpTerm], z: complex):
    return [(z * t.coef, t.kappa) for t in terms]


def _sum_max_coefficient(raw) -> float:
    merged = _merge_terms(raw)
    return max((abs(t.coef) for t in merged), default=0.0)


def continuity_residual(f: RegionFunction, iface: Interface) -> float:
    """Coefficient-wise mismatch of the two one-sided limits; 0 = continuous."""
    left = restrict_to_interface(f, iface, "left")
    right = restrict_to_interface(f, iface, "right")
    return _sum_max_coefficient(list(_sum_scale(left, 1.0)) + list(_sum_scale(right, -1.0)))


def jump_residual(
    funcs: Sequence[RegionFunction],
    iface: Interface,
    coupling: Sequence[Sequence[complex]] | np.ndarray,
) -> float:
    """Residual of the delta-potential matching condition on one wall.

    For the component vector F the condition is

        [(d/dx_a - d/dx_b) F]_{x_a-x_b -> 0+}  -  [same]_{x_a-x_b -> 0-}
            =  C . F|_{x_a = x_b},

    with C the square coupling matrix (scalar case C = [[2c]]).  Returns the
    max coefficient magnitude of the defect after canonicalisation.  Inputs
    must individually be continuous across the wall.
    """
    mat = np.asarray(coupling, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] != len(funcs):
        raise ValueError("coupling must be square with dimension = number of components")
    a, b = iface.pair
    for i, f in enumerate(funcs):
        if continuity_residual(f, iface) > JUMP_CONTINUITY_TOL:
            raise DiscontinuityError(
                f"component {i} is discontinuous across interface pair {iface.pair}"
            )
    bases = [restrict_to_interface(f, iface, "left") for f in funcs]
    worst = 0.0
    for i, f in enumerate(funcs):
        d = add(differentiate(f, a), scale(differentiate(f, b), -1.0))
        raw = list(_sum_scale(restrict_to_interface(d, iface, "right"), 1.0))
        raw += _sum_scale(restrict_to_interface(d, iface, "left"), -1.0)
        for j in range(len(funcs)):
            cij = mat[i, j]
            if cij != 0:
                raw += _sum_scale(bases[j], -cij)
        worst = max(worst, _sum_max_coefficient(raw))
    return worst


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def to_json_obj(f: RegionFunction) -> dict:
    """JSON shape: {n, regions:[{order, terms:[{re, im, kappa:[{re,im}..]}..]}..]}."""
    regions = []
    for region in sorted(f.terms):
        regions.append(
            {
                "order": list(region.order),
                "terms": [
                    {
                        "re": t.coef.real,
                        "im": t.coef.imag,
                        "kappa": [{"re": k.real, "im": k.imag} for k in t.kappa],
                    }
                    for t in f.terms[region]
                ],
            }
        )
    return {"n": f.n, "regions": regions}


def from_json_obj(obj: Mapping) -> RegionFunction:
    n = int(obj["n"])
    data = {}
    for entry in obj["regions"]:
        region = Region(tuple(int(v) for v in entry["order"]))
        data[region] = [
            (
                complex(t["re"], t["im"]),
                tuple(complex(k["re"], k["im"]) for k in t["kappa"]),
            )
            for t in entry["terms"]
        ]
    return build(n, data)


_IFACE_CACHE: dict[int, list[Interface]] = {}
_REGION_CACHE: dict[int, list[Region]] = {}


def interfaces(n: int) -> list[Interface]:
    """Cached enumerate_interfaces (interfaces are immutable)."""
    if n not in _IFACE_CACHE:
        _IFACE_CACHE[n] = enumerate_interfaces(n)
    return _IFACE_CACHE[n]


def regions(n: int) -> list[Region]:
    """Cached enumerate_regions."""
    if n not in _REGION_CACHE:
        _REGION_CACHE[n] = enumerate_regions(n)
    return _REGION_CACHE[n]
