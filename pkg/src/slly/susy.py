"""N=2 supersymmetric extension of the contact-interaction boson gas.

The superpotential is the pairwise absolute-distance sum

    W(x) = (c/2) * sum_{a<b} |x_a - x_b|,        c > 0,

whose gradient is chamber-constant: on a chamber, dW/dx_j = (c/2)(2 r_j - N - 1)
with r_j the rank of x_j in the ordering.  The supercharges act on
spinor-valued chamber functions as

    Q       = i sqrt(2) sum_j b_j      (d/dx_j + w_j),
    Q^dag   = i sqrt(2) sum_j b_j^dag  (d/dx_j - w_j),

with the normalized Fock modes of :mod:`slly.fock`; the sqrt(2) restores the
physical mode normalization (hbar = 1, mass 1/2) so that (1/2){Q, Q^dag}
equals -Laplacian + c^2 N(N^2-1)/12 on every chamber, with all delta-function
content carried by the interface matching conditions.  Eigen-statements are
therefore verified as bulk residuals per chamber plus generalized jump
residuals per wall, with the wall coupling equal to the grade block of the
exact Fock matrix Lambda_ab = 2c(I - n_a - n_b + hop).

Zero modes: exp(-W) times the top Fock state, and exp(-W) times the
alternating vector over the one-hole states.  Both are annihilated by Q and
Q^dag; one is bosonic and one fermionic under (-1)^F, so the constructed
Witten index is zero while supersymmetry stays unbroken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Mapping

import numpy as np

from . import bethe, fock
from . import piecewise as pw
from .errors import DiscontinuityError, GradingError, SingletError

SQRT2 = math.sqrt(2.0)
ZERO_MODE_TOL = 1e-12
EIGENSTATE_TOL = 1e-10


@dataclass(frozen=True)
class Superpotential:
    """Pairwise |x_a - x_b| superpotential with positive strength c.

    c = 0 is admitted only as the free degenerate case (every sector becomes
    the free gas; useful for lattice cross-checks); attraction/repulsion is
    always carried by the sector, never by the sign of c.
    """

    n: int
    c: float

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("superpotential strength must be nonnegative; "
                             "attraction/repulsion is carried by the sector")
        if not 1 <= self.n <= pw.MAX_PARTICLES:
            raise ValueError(f"particle count {self.n} outside 1..{pw.MAX_PARTICLES}")


def grad_w(region: pw.Region, j: int, sp: Superpotential) -> float:
    """Chamber value of dW/dx_j: (c/2)(2 rank(j) - N - 1)."""
    return 0.5 * sp.c * (2 * region.rank(j) - sp.n - 1)


def shift_constant(sp: Superpotential) -> float:
    """c^2 N(N^2 - 1)/12, the chamber-independent value of sum_j (dW/dx_j)^2."""
    return sp.c**2 * sp.n * (sp.n**2 - 1) / 12.0


# ---------------------------------------------------------------------------
# spinors and supercharges
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpinorFunction:
    """Map from Fock occupation masks to chamber functions (absent = zero)."""

    n: int
    components: Mapping[int, pw.RegionFunction]

    def grades(self) -> set[int]:
        return {mask.bit_count() for mask in self.components}

    def pure_grade(self) -> int:
        gs = self.grades()
        if len(gs) != 1:
            raise GradingError(f"spinor is not of pure grade (grades {sorted(gs)})")
        return gs.pop()

    def component(self, mask: int) -> pw.RegionFunction:
        return self.components.get(mask, pw.zero_function(self.n))


def spinor_from_scalar(f: pw.RegionFunction, mask: int) -> SpinorFunction:
    return SpinorFunction(n=f.n, components={mask: f})


def spinor_add(s: SpinorFunction, t: SpinorFunction) -> SpinorFunction:
    if s.n != t.n:
        raise ValueError("dimension mismatch")
    comps = dict(s.components)
    for mask, f in t.components.items():
        comps[mask] = pw.add(comps[mask], f) if mask in comps else f
    return _prune(SpinorFunction(s.n, comps))


def spinor_scale(s: SpinorFunction, z: complex) -> SpinorFunction:
    return SpinorFunction(s.n, {m: pw.scale(f, z) for m, f in s.components.items()})


def spinor_max_coefficient(s: SpinorFunction) -> float:
    return max((pw.max_coefficient(f) for f in s.components.values()), default=0.0)


def spinor_distance(s: SpinorFunction, t: SpinorFunction) -> float:
    return spinor_max_coefficient(spinor_add(s, spinor_scale(t, -1.0)))


def _prune(s: SpinorFunction) -> SpinorFunction:
    return SpinorFunction(s.n, {m: f for m, f in s.components.items() if f.terms})


def _gradw_multiply(f: pw.RegionFunction, j: int, sp: Superpotential, sgn: float) -> pw.RegionFunction:
    return pw.build(
        f.n,
        {
            r: [(t.coef * sgn * grad_w(r, j, sp), t.kappa) for t in ts]
            for r, ts in f.terms.items()
        },
    )


def _covariant(f: pw.RegionFunction, j: int, sp: Superpotential, sgn: float) -> pw.RegionFunction:
    """(d/dx_j + sgn * w_j) applied chamber by chamber."""
    return pw.add(pw.differentiate(f, j), _gradw_multiply(f, j, sp, sgn))


def apply_q(s: SpinorFunction, sp: Superpotential) -> SpinorFunction:
    """Q = i sqrt(2) sum_j b_j (d_j + w_j); lowers the grade by one."""
    out: dict[int, pw.RegionFunction] = {}
    for mask, f in s.components.items():
        for j in range(1, sp.n + 1):
            bit = 1 << (j - 1)
            if not mask & bit:
                continue
            g = pw.scale(_covariant(f, j, sp, +1.0), 1j * SQRT2 * fock.jw_sign(mask, j))
            tgt = mask ^ bit
            out[tgt] = pw.add(out[tgt], g) if tgt in out else g
    return _prune(SpinorFunction(s.n, out))


def apply_q_dagger(s: SpinorFunction, sp: Superpotential) -> SpinorFunction:
    """Q^dag = i sqrt(2) sum_j b_j^dag (d_j - w_j); raises the grade by one."""
    out: dict[int, pw.RegionFunction] = {}
    for mask, f in s.components.items():
        for j in range(1, sp.n + 1):
            bit = 1 << (j - 1)
            if mask & bit:
                continue
            g = pw.scale(_covariant(f, j, sp, -1.0), 1j * SQRT2 * fock.jw_sign(mask, j))
            tgt = mask | bit
            out[tgt] = pw.add(out[tgt], g) if tgt in out else g
    return _prune(SpinorFunction(s.n, out))


# ---------------------------------------------------------------------------
# sector Hamiltonians and eigen-verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SectorHamiltonian:
    """Grade-n block of the super-Hamiltonian as bulk-plus-coupling data.

    Bulk operator: -Laplacian + shift, acting componentwise; one coupling
    matrix per particle pair, applied on the wall x_a = x_b through the
    derivative-jump condition.  Basis order inside the grade is the fixed
    Fock order (ascending mask).
    """

    n: int
    grade: int
    c: float
    shift: float
    couplings: Mapping[tuple[int, int], np.ndarray]
    masks: tuple[int, ...]

    def block(self, a: int, b: int) -> np.ndarray:
        return self.couplings[(a, b)]


def sector_hamiltonian(grade: int, sp: Superpotential) -> SectorHamiltonian:
    """Assemble the grade block: shift constant plus one Lambda block per pair."""
    if not 0 <= grade <= sp.n:
        raise ValueError(f"grade {grade} out of range 0..{sp.n}")
    couplings = {}
    for a in range(1, sp.n + 1):
        for b in range(a + 1, sp.n + 1):
            lam = fock.delta_coupling(a, b, sp.c, sp.n)
            couplings[(a, b)] = fock.grade_project(lam, grade)
    masks = tuple(fock.fock_basis(sp.n)[fock.grade_slice(sp.n, grade)])
    return SectorHamiltonian(
        n=sp.n, grade=grade, c=sp.c, shift=shift_constant(sp), couplings=couplings, masks=masks
    )


@dataclass(frozen=True)
class EigenstateReport:
    grade: int
    energy: float
    bulk_residual: float
    interface_residual: float
    tol: float

    @property
    def accepted(self) -> bool:
        return max(self.bulk_residual, self.interface_residual) <= self.tol


def verify_eigenstate(
    s: SpinorFunction, e: float, sp: Superpotential, tol: float = EIGENSTATE_TOL
) -> EigenstateReport:
    """Check H s = E s as bulk-per-chamber plus jump-per-wall residuals.

    Bulk: every exponential term must satisfy -sum_j kappa_j^2 + shift = E.
    Walls: the component vector in the grade basis must satisfy the
    derivative-jump condition with the grade block of Lambda_ab.  Inputs with
    discontinuous components are rejected outright.
    """
    grade = s.pure_grade()
    sector = sector_hamiltonian(grade, sp)
    shift = sector.shift

    bulk = 0.0
    for f in s.components.values():
        bulk = max(bulk, bethe.bulk_energy_residual(f, e - shift))

    comps = [s.component(mask) for mask in sector.masks]
    for i, f in enumerate(comps):
        for iface in pw.interfaces(sp.n):
            if pw.continuity_residual(f, iface) > pw.JUMP_CONTINUITY_TOL:
                raise DiscontinuityError(
                    f"component {i} discontinuous across pair {iface.pair}"
                )
    wall = 0.0
    for iface in pw.interfaces(sp.n):
        wall = max(wall, pw.jump_residual(comps, iface, sector.block(*iface.pair)))
    return EigenstateReport(
        grade=grade, energy=e, bulk_residual=bulk, interface_residual=wall, tol=tol
    )


# ---------------------------------------------------------------------------
# zero modes, census, partners
# ---------------------------------------------------------------------------

def zero_mode_top(sp: Superpotential) -> SpinorFunction:
    """exp(-W) on the fully occupied Fock state; annihilated by Q and Q^dag."""
    if sp.n < 2:
        raise ValueError("zero modes are constructed for N >= 2")
    psi = bethe.nmer_ground(sp.n, sp.c)
    full = (1 << sp.n) - 1
    return spinor_from_scalar(psi, full)


def zero_mode_alternating(sp: Superpotential) -> SpinorFunction:
    """exp(-W) times the alternating one-hole vector, at grade N-1.

    The component on the state missing mode j carries sign (-1)^{j-1}; this
    is the unique (up to scale) grade-(N-1) vector killed by both
    supercharges, because sum_j w_j vanishes on every chamber while any other
    weighting meets the full rank of the chamber-wise gradient values.
    """
    if sp.n < 2:
        raise ValueError("zero modes are constructed for N >= 2")
    psi = bethe.nmer_ground(sp.n, sp.c)
    full = (1 << sp.n) - 1
    comps = {}
    for j in range(1, sp.n + 1):
        comps[full ^ (1 << (j - 1))] = pw.scale(psi, float((-1) ** (j - 1)))
    return SpinorFunction(n=sp.n, components=comps)


@dataclass(frozen=True)
class ZeroModeRecord:
    grade: int
    q_residual: float
    q_dagger_residual: float
    klein_parity: int


@dataclass(frozen=True)
class WittenCensus:
    """Count of constructed zero modes by (-1)^F parity.

    Only the two explicitly constructed modes enter, so the census is a lower
    bound on the kernel; continuous-spectrum spectral asymmetries are outside
    its scope.
    """

    modes: tuple[ZeroModeRecord, ...]
    n_b: int
    n_f: int
    index: int
    completeness: str = "lower_bound"


def annihilation_residuals(s: SpinorFunction, sp: Superpotential) -> tuple[float, float]:
    """Max coefficients of Q s and Q^dag s."""
    return (
        spinor_max_coefficient(apply_q(s, sp)),
        spinor_max_coefficient(apply_q_dagger(s, sp)),
    )


def witten_census(sp: Superpotential) -> WittenCensus:
    """Classify the two constructed zero modes by Klein parity."""
    records = []
    for mode in (zero_mode_top(sp), zero_mode_alternating(sp)):
        rq, rqd = annihilation_residuals(mode, sp)
        grade = mode.pure_grade()
        if max(rq, rqd) >= ZERO_MODE_TOL:
            raise AssertionError("constructed zero mode failed annihilation check")
        records.append(
            ZeroModeRecord(
                grade=grade,
                q_residual=rq,
                q_dagger_residual=rqd,
                klein_parity=(-1) ** grade,
            )
        )
    n_b = sum(1 for r in records if r.klein_parity == 1)
    n_f = sum(1 for r in records if r.klein_parity == -1)
    return WittenCensus(modes=tuple(records), n_b=n_b, n_f=n_f, index=n_b - n_f)


def infer_energy(s: SpinorFunction, sp: Superpotential) -> float:
    """Bulk eigenvalue -sum kappa^2 + shift read off the first term."""
    for f in s.components.values():
        for ts in f.terms.values():
            for t in ts:
                val = -sum(k * k for k in t.kappa) + shift_constant(sp)
                return val.real
    raise ValueError("cannot infer energy of the zero spinor")


@dataclass(frozen=True)
class PartnerResult:
    state: SpinorFunction
    energy: float
    report: EigenstateReport
    singlet: bool


def susy_partner(
    s: SpinorFunction, direction: Literal["raise", "lower"], sp: Superpotential
) -> PartnerResult:
    """Map a verified eigenstate to its superpartner at the same energy.

    raise -> Q^dag (grade + 1), lower -> Q (grade - 1).  Zero modes are SUSY
    singlets and rejected; a vanishing image on a positive-energy state is
    reported as a singlet rather than an error.
    """
    if direction not in ("raise", "lower"):
        raise ValueError("direction must be 'raise' or 'lower'")
    e = infer_energy(s, sp)
    src = verify_eigenstate(s, e, sp)
    if not src.accepted:
        raise ValueError(
            f"input is not a verified eigenstate (bulk {src.bulk_residual:.3e}, "
            f"interface {src.interface_residual:.3e})"
        )
    if e <= 1e-10:
        raise SingletError("zero modes are supersymmetry singlets and have no partner")
    partner = apply_q_dagger(s, sp) if direction == "raise" else apply_q(s, sp)
    if spinor_max_coefficient(partner) <= 1e-13:
        return PartnerResult(state=partner, energy=e, report=src, singlet=True)
    rep = verify_eigenstate(partner, e, sp)
    return PartnerResult(state=partner, energy=e, report=rep, singlet=False)


# ---------------------------------------------------------------------------
# algebra checks
# ---------------------------------------------------------------------------

def q_nilpotency_residual(s: SpinorFunction, sp: Superpotential, dagger: bool = False) -> float:
    """Max coefficient of Q(Q s) (or the adjoint pair); exactly zero chamber-wise."""
    op = apply_q_dagger if dagger else apply_q
    return spinor_max_coefficient(op(op(s, sp), sp))


def anticommutator_bulk_residual(s: SpinorFunction, sp: Superpotential) -> float:
    """Residual of (1/2){Q, Q^dag} s = (-Laplacian + shift) s, chamber-wise.

    Delta-function content lives only on the walls and is invisible to the
    per-chamber coefficient algebra, which is exactly why the identity closes
    without interface terms.
    """
    lhs = spinor_add(
        apply_q(apply_q_dagger(s, sp), sp),
        apply_q_dagger(apply_q(s, sp), sp),
    )
    lhs = spinor_scale(lhs, 0.5)
    shift = shift_constant(sp)
    rhs_comps = {
        mask: pw.add(pw.scale(pw.laplacian(f), -1.0), pw.scale(f, shift))
        for mask, f in s.components.items()
    }
    rhs = _prune(SpinorFunction(s.n, rhs_comps))
    return spinor_distance(lhs, rhs)


def random_spinor(
    sp: Superpotential,
    rng: np.random.Generator,
    grade: int | None = None,
    terms_per_region: int = 2,
) -> SpinorFunction:
    """Random canonical spinor for fuzzing the algebra checks.

    Components populate every mask of the requested grade (or a random
    nonempty set of masks), each holding the given number of random complex
    exponentials on every chamber.
    """
    masks = fock.fock_basis(sp.n)
    if grade is not None:
        chosen = [m for m in masks if m.bit_count() == grade]
    else:
        chosen = [m for m in masks if rng.random() < 0.5] or [int(rng.integers(0, len(masks)))]
    comps = {}
    for mask in chosen:
        data = {}
        for region in pw.regions(sp.n):
            raw = []
            for _ in range(terms_per_region):
                coef = complex(rng.standard_normal(), rng.standard_normal())
                kappa = tuple(
                    complex(rng.standard_normal(), rng.standard_normal()) for _ in range(sp.n)
                )
                raw.append((coef, kappa))
            data[region] = raw
        comps[mask] = pw.build(sp.n, data)
    return SpinorFunction(n=sp.n, components=comps)


# ---------------------------------------------------------------------------
# hard-coded exchange matrices for the two- and three-particle displays
# ---------------------------------------------------------------------------

_SIGMA1_N2 = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ],
    dtype=float,
)

_SIGMA1_N3_GRADE2 = 0.5 * np.array(
    [
        [0, 1, -1],
        [1, 0, 1],
        [-1, 1, 0],
    ],
    dtype=float,
)


@dataclass(frozen=True)
class SigmaCheckReport:
    n: int
    residual: float
    passed: bool


def exchange_sigma_check(n: int, c: float = 1.0, tol: float = 1e-12) -> SigmaCheckReport:
    """Verify the alternating zero mode is a -1 eigen-spinor of the exchange
    matrix (4x4 for two particles, 3x3 with prefactor 1/2 on the two-hole
    grade for three).  Only N = 2, 3 carry a pinned matrix."""
    if n not in (2, 3):
        raise ValueError("exchange matrix is pinned only for N = 2 and N = 3")
    sp = Superpotential(n=n, c=c)
    mode = zero_mode_alternating(sp)
    if n == 2:
        basis = fock.fock_basis(2)
        vec = [mode.component(mask) for mask in basis]
        mat = _SIGMA1_N2
    else:
        sector = sector_hamiltonian(2, sp)
        vec = [mode.component(mask) for mask in sector.masks]
        mat = _SIGMA1_N3_GRADE2
    worst = 0.0
    for i in range(len(vec)):
        image = pw.zero_function(n)
        for j in range(len(vec)):
            if mat[i, j] != 0:
                image = pw.add(image, pw.scale(vec[j], mat[i, j]))
        worst = max(worst, pw.coefficient_distance(image, pw.scale(vec[i], -1.0)))
    return SigmaCheckReport(n=n, residual=worst, passed=worst <= tol)
