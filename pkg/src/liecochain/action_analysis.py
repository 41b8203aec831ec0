"""Decision procedures for a Lie group action given by chart generators.

An action is a chart, a Lie algebra, and one generator vector field per
basis element.  Everything here is an exact symbolic check: invariance is
infinitesimal (vanishing Lie derivatives along all generators), verticality
is proportionality to a wedge of generators, and the cochain condition
i_chi d w = (-1)^q d(i_chi w) is a syntactic zero test on the residual.
Pointwise data (isotropy, fixed subspaces, ranks) is exact rational linear
algebra at user-supplied sample points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import chart_calculus as cc
from . import linalg
from . import scalar_field as sf
from .lie_cohomology import LieAlgebra, SubgroupSpec, relative_cohomology


class ActionError(Exception):
    pass


class InvalidInput(ActionError):
    """A checked precondition failed; carries the failing verdict."""

    def __init__(self, message, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class HomomorphismViolation(ActionError):
    pass


class RankDeficit(ActionError):
    pass


class NotProportional(ActionError):
    pass


class NoFrameFound(ActionError):
    pass


class NonInvariantField(ActionError):
    pass


@dataclass
class ActionSpec:
    """Chart + algebra + generators; generator i realizes basis vector e_i."""

    chart: cc.Chart
    algebra: LieAlgebra
    generators: tuple
    orbit_dim: int

    def __post_init__(self):
        if len(self.generators) != self.algebra.dim:
            raise ValueError("one generator per algebra basis vector")
        for g in self.generators:
            if g.chart != self.chart:
                raise cc.ChartMismatch("generator lives on a different chart")
        if not 1 <= self.orbit_dim <= min(self.algebra.dim, self.chart.dim):
            raise ValueError("orbit dimension out of range")


@dataclass
class Verdict:
    ok: bool
    generator: int | None = None   # index of the failing generator, if any
    witness: object = None         # residual tensor/expression on failure


@dataclass
class ActionValidation:
    ok: bool
    bracket_violations: list = field(default_factory=list)  # (i, j, residual field)
    rank_failures: list = field(default_factory=list)       # (point, observed rank)
    effective: bool = True
    kernel_basis: list = field(default_factory=list)


def validate_action(action, sample_points=()):
    """Bracket-homomorphism check (symbolic), orbit rank at sample points,
    and a symbolic effectiveness test (kernel of the generator map)."""
    alg, gens = action.algebra, action.generators
    bracket_violations = []
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            expect = cc.VectorField(action.chart, [sf.ZERO] * action.chart.dim)
            for k, c in alg.bracket_basis(i, j).items():
                expect = expect + gens[k].scaled(sf.rational(c))
            residual = cc.lie_bracket(gens[i], gens[j]) - expect
            if not residual.is_zero():
                bracket_violations.append((i, j, residual))

    rank_failures = []
    for point in sample_points:
        pt = action.chart.point_map(point)
        matrix = [[c.eval_at(pt) for c in g.components] for g in gens]
        r = linalg.rank(matrix)
        if r != action.orbit_dim:
            rank_failures.append((tuple(pt[c] for c in action.chart.coordinates), r))

    kernel = _symbolic_generator_kernel(action)
    return ActionValidation(
        ok=not bracket_violations and not rank_failures,
        bracket_violations=bracket_violations,
        rank_failures=rank_failures,
        effective=not kernel,
        kernel_basis=kernel)


def require_valid_action(action, sample_points=()):
    """Raise-style variant of validate_action for callers that cannot
    proceed with a broken action."""
    report = validate_action(action, sample_points)
    if report.bracket_violations:
        i, j, residual = report.bracket_violations[0]
        raise HomomorphismViolation(
            f"generators {i + 1}, {j + 1} do not realize the bracket; "
            f"residual components {[str(c) for c in residual.components]}")
    if report.rank_failures:
        point, r = report.rank_failures[0]
        raise RankDeficit(f"generator rank {r} != {action.orbit_dim} at {point}")
    return report


def _symbolic_generator_kernel(action):
    """Rational vectors xi with sum_i xi_i * generator_i identically zero."""
    p = len(action.generators)
    keys = {}
    cols = [{} for _ in range(p)]
    for comp_idx in range(action.chart.dim):
        cleared = sf.cleared_numerators([g.components[comp_idx] for g in action.generators])
        for gi, poly in enumerate(cleared):
            for key, c in poly:
                cols[gi][(comp_idx, key)] = c
    for col in cols:
        for k in col:
            keys.setdefault(k, len(keys))
    if not keys:
        return [list(v) for v in linalg.identity(p)]
    matrix = [[Fraction(0)] * p for _ in keys]
    for gi, col in enumerate(cols):
        for k, c in col.items():
            matrix[keys[k]][gi] = c
    return linalg.nullspace(matrix)


@dataclass
class IsotropySample:
    point: tuple
    isotropy_basis: list                        # vectors in the algebra
    fixed_tangent: list | None = None           # basis of the fixed tangent subspace
    fixed_vertical: list | None = None          # its intersection with the orbit directions
    component_reps: tuple = ()                  # adjoint matrices for extra components


def isotropy_algebra_at(action, point, component_reps=()):
    """Exact kernel of xi -> sum_i xi_i generator_i(point)."""
    pt = action.chart.point_map(point)
    cols = [[c.eval_at(pt) for c in g.components] for g in action.generators]
    # rows indexed by chart coordinate, columns by algebra basis
    matrix = [[cols[i][j] for i in range(len(cols))] for j in range(action.chart.dim)]
    basis = linalg.nullspace(matrix)
    return IsotropySample(
        point=tuple(pt[c] for c in action.chart.coordinates),
        isotropy_basis=basis,
        component_reps=tuple(component_reps))


def fixed_space_at(action, sample, tangent_reps=()):
    """Fill in the fixed-point subspaces of the linear isotropy action.

    The identity component acts through the Jacobians of the vanishing
    generators; extra components act through user-supplied n x n tangent
    matrices, whose fixed spaces are intersected in.
    """
    chart = action.chart
    point = sample.point
    rows = []
    for xi in sample.isotropy_basis:
        vf = cc.VectorField(chart, [sf.ZERO] * chart.dim)
        for i, c in enumerate(xi):
            if c != 0:
                vf = vf + action.generators[i].scaled(sf.rational(c))
        rows.extend(cc.jacobian_at(vf, point))
    for m in tangent_reps:
        for i in range(chart.dim):
            rows.append([Fraction(m[i][j]) - (1 if i == j else 0) for j in range(chart.dim)])
    if rows:
        fixed_tangent = linalg.nullspace(rows)
    else:
        fixed_tangent = [list(v) for v in linalg.identity(chart.dim)]

    # vertical part: intersect with the span of the generators at the point
    pt = chart.point_map(point)
    vert = linalg.Echelon()
    for g in action.generators:
        vert.insert([c.eval_at(pt) for c in g.components])
    fixed_vertical = _intersect(fixed_tangent, [list(r) for r in vert.rows.values()], chart.dim)
    return IsotropySample(point, sample.isotropy_basis, fixed_tangent, fixed_vertical,
                          sample.component_reps)


def _intersect(basis_a, basis_b, n):
    """Basis of span(a) meet span(b), deterministic."""
    if not basis_a or not basis_b:
        return []
    cols = [list(v) for v in basis_a] + [list(v) for v in basis_b]
    matrix = [[cols[c][r] for c in range(len(cols))] for r in range(n)]
    out = []
    ech = linalg.Echelon()
    for sol in linalg.nullspace(matrix):
        v = [sum((sol[i] * basis_a[i][r] for i in range(len(basis_a))), Fraction(0))
             for r in range(n)]
        reduced = ech.insert(v)
        if reduced is not None:
            out.append(reduced)
    return out


def check_invariant_form(action, omega):
    for i, g in enumerate(action.generators):
        residual = cc.lie_derivative_form(g, omega)
        if not residual.is_zero():
            return Verdict(False, generator=i, witness=residual)
    return Verdict(True)


def check_invariant_vectorfield(action, r):
    for i, g in enumerate(action.generators):
        residual = cc.lie_bracket(g, r)
        if not residual.is_zero():
            return Verdict(False, generator=i, witness=residual)
    return Verdict(True)


def check_invariant_multivector(action, chi):
    for i, g in enumerate(action.generators):
        residual = cc.lie_derivative_multivector(g, chi)
        if not residual.is_zero():
            return Verdict(False, generator=i, witness=residual)
    return Verdict(True)


def multivector_proportionality(chi, w):
    """Single scalar factor lambda with chi = lambda * w, or None."""
    base_idx = next((idx for idx, c in w.coeffs.items() if not c.is_zero()), None)
    if base_idx is None:
        raise sf.DivisionByZeroExpr("proportionality against the zero multivector")
    lam = chi.coefficient(base_idx) / w.coefficient(base_idx)
    residual = chi - w.scaled(lam)
    if not residual.is_zero():
        return None
    return lam


@dataclass
class VerticalResult:
    ok: bool
    frame: tuple | None = None     # generator indices of the chosen local frame
    factor: object = None          # chi = factor * wedge(frame)
    reason: str = ""


def check_vertical(action, chi, sample_points=()):
    """Find a q-subset of generators framing chi: chi = J * X_{i1}^...^X_{iq}.

    With sample points, a candidate frame must have a nonzero wedge at some
    sample; without, symbolic nonzeroness of the wedge is used.  Returns the
    frame and the factor J on success.
    """
    q = chi.degree
    if q != action.orbit_dim:
        raise InvalidInput(f"chain degree {q} differs from orbit dimension {action.orbit_dim}")
    candidates = []
    for subset in combinations(range(len(action.generators)), q):
        w = cc.wedge_vectorfields([action.generators[i] for i in subset])
        if w.is_zero():
            continue
        if sample_points:
            pts = [action.chart.point_map(p) for p in sample_points]
            ok_at = False
            for pt in pts:
                try:
                    if any(c.eval_at(pt) != 0 for c in w.coeffs.values()):
                        ok_at = True
                        break
                except (sf.UnresolvedFunctionSymbol, sf.PoleAtPoint):
                    continue
            if not ok_at:
                continue
        candidates.append((subset, w))
    if not candidates:
        raise NoFrameFound("every generator subset of orbit size is degenerate")
    for subset, w in candidates:
        lam = multivector_proportionality(chi, w)
        if lam is not None:
            return VerticalResult(True, frame=subset, factor=lam)
    return VerticalResult(False, reason="chain is not proportional to any generator frame")


def check_semibasic(action, eta):
    if eta.degree == 0:
        return Verdict(True)
    for i, g in enumerate(action.generators):
        residual = cc.interior_vector(g, eta)
        if not residual.is_zero():
            return Verdict(False, generator=i, witness=residual)
    return Verdict(True)


def _require_invariant_vertical_chain(action, chi, sample_points):
    if chi.is_zero():
        raise InvalidInput("chain vanishes identically")
    v = check_invariant_multivector(action, chi)
    if not v.ok:
        raise InvalidInput("chain is not invariant", v)
    vert = check_vertical(action, chi, sample_points)
    if not vert.ok:
        raise InvalidInput("chain is not vertical", vert)
    return vert


@dataclass
class RhoResult:
    form: cc.DiffForm
    sign: int
    semibasic: Verdict
    invariant: Verdict

    @property
    def basic(self):
        return self.semibasic.ok and self.invariant.ok


def evaluation_map(action, chi, omega, sample_points=()):
    """(-1)^((n-k)q) i_chi omega, with certificates that the result is basic.

    The quotient representative is kept on the chart; semi-basic plus
    invariant certifies that it descends.
    """
    inv = check_invariant_form(action, omega)
    if not inv.ok:
        raise InvalidInput("form is not invariant", inv)
    _require_invariant_vertical_chain(action, chi, sample_points)
    n, k, q = action.chart.dim, omega.degree, chi.degree
    if k < q:
        raise cc.DegreeUnderflow(f"form degree {k} below chain degree {q}")
    sign = -1 if ((n - k) * q) % 2 else 1
    result = cc.interior_multivector(chi, omega)
    if sign < 0:
        result = -result
    return RhoResult(result, sign,
                     semibasic=check_semibasic(action, result),
                     invariant=check_invariant_form(action, result))


@dataclass
class ConditionResult:
    ok: bool
    residual: cc.DiffForm


def cochain_condition_check(action, chi, omega, sample_points=()):
    """Residual of i_chi d(omega) - (-1)^q d(i_chi omega); zero means the
    evaluation map commutes with d on this form."""
    inv = check_invariant_form(action, omega)
    if not inv.ok:
        raise InvalidInput("form is not invariant", inv)
    _require_invariant_vertical_chain(action, chi, sample_points)
    q, n, k = chi.degree, action.chart.dim, omega.degree
    if k < q:
        raise cc.DegreeUnderflow(f"form degree {k} below chain degree {q}")
    # both sides have degree k+1-q; for top-degree omega the left side is 0
    lhs = (cc.interior_multivector(chi, cc.d_exterior(omega)) if k < n
           else cc.DiffForm.zero(action.chart, k + 1 - q))
    rhs = cc.d_exterior(cc.interior_multivector(chi, omega))
    if q % 2:
        rhs = -rhs
    residual = lhs - rhs
    return ConditionResult(residual.is_zero(), residual)


@dataclass
class StabilityEntry:
    index: int
    ok: bool
    residual: cc.MultiVectorField


@dataclass
class StabilityResult:
    entries: list

    @property
    def ok(self):
        return all(e.ok for e in self.entries)


def stability_check(action, chi, fields):
    """L_R chi = 0 for each supplied invariant field R."""
    entries = []
    for i, r in enumerate(fields):
        inv = check_invariant_vectorfield(action, r)
        if not inv.ok:
            raise NonInvariantField(f"field #{i} is not invariant")
        residual = cc.lie_derivative_multivector(r, chi)
        entries.append(StabilityEntry(i, residual.is_zero(), residual))
    return StabilityResult(entries)


def scaling_factor(action, chi, r, sample_points=()):
    """The invariant function lambda with L_R chi = lambda * chi.

    Existence is guaranteed for nonvanishing vertical invariant chains and
    invariant R; anything else raises NotProportional.
    """
    inv = check_invariant_vectorfield(action, r)
    if not inv.ok:
        raise NonInvariantField("scaling factor requires an invariant field")
    _require_invariant_vertical_chain(action, chi, sample_points)
    lr = cc.lie_derivative_multivector(r, chi)
    if lr.is_zero():
        return sf.ZERO
    lam = multivector_proportionality(lr, chi)
    if lam is None:
        raise NotProportional("derivative of the chain is not a multiple of the chain")
    for i, g in enumerate(action.generators):
        if not g.apply(lam).is_zero():
            raise InvalidInput("scaling factor is not invariant",
                               Verdict(False, generator=i, witness=g.apply(lam)))
    return lam


@dataclass
class IntegrabilityResult:
    pairs: list   # (s, t, residual ScalarExpr)

    @property
    def ok(self):
        return all(r.is_zero() for _, _, r in self.pairs)


def integrability_check(action, chi, fields, sample_points=()):
    """Residuals Z_s(lambda_t) - Z_t(lambda_s) - lambda_[Z_s,Z_t] per pair."""
    fields = list(fields)
    lams = [scaling_factor(action, chi, z, sample_points) for z in fields]
    pairs = []
    for s in range(len(fields)):
        for t in range(s + 1, len(fields)):
            zst = cc.lie_bracket(fields[s], fields[t])
            inv = check_invariant_vectorfield(action, zst)
            if not inv.ok:
                raise NonInvariantField(f"bracket of fields #{s}, #{t} is not invariant")
            lam_bracket = (sf.ZERO if zst.is_zero()
                           else scaling_factor(action, chi, zst, sample_points))
            residual = fields[s].apply(lams[t]) - fields[t].apply(lams[s]) - lam_bracket
            pairs.append((s, t, residual))
    return IntegrabilityResult(pairs)


@dataclass
class RescaleEntry:
    index: int
    ok: bool
    residual: cc.MultiVectorField


@dataclass
class RescaleResult:
    entries: list

    @property
    def ok(self):
        return all(e.ok for e in self.entries)


def rescale_verify(action, chi0, k_candidate, fields, sample_points=()):
    """Does chi = K * chi0 satisfy L_Z chi = 0 for each supplied Z?

    K must be a nonzero invariant scalar; the check is the exact residual of
    the rescaled derivative, equivalent to Z(K) + K * lambda_Z = 0.
    """
    k = sf.normalize(k_candidate)
    if k.is_zero():
        raise InvalidInput("rescaling by zero leaves no nonvanishing chain")
    for i, g in enumerate(action.generators):
        dk = g.apply(k)
        if not dk.is_zero():
            raise InvalidInput("rescaling function is not invariant",
                               Verdict(False, generator=i, witness=dk))
    _require_invariant_vertical_chain(action, chi0, sample_points)
    chi = chi0.scaled(k)
    entries = []
    for i, z in enumerate(fields):
        inv = check_invariant_vectorfield(action, z)
        if not inv.ok:
            raise NonInvariantField(f"field #{i} is not invariant")
        residual = cc.lie_derivative_multivector(z, chi)
        entries.append(RescaleEntry(i, residual.is_zero(), residual))
    return RescaleResult(entries)


@dataclass
class SurjectivityResult:
    ok: bool
    pairing: object
    invariance: Verdict


def surjectivity_certificate(action, chi, alpha, sample_points=()):
    """Certificate alpha(chi) = 1 with alpha invariant."""
    _require_invariant_vertical_chain(action, chi, sample_points)
    if alpha.degree != chi.degree:
        raise InvalidInput(f"certificate form must have degree {chi.degree}")
    paired = cc.interior_multivector(chi, alpha)
    value = paired.coefficient(())
    inv = check_invariant_form(action, alpha)
    return SurjectivityResult(sf.equals(value, 1) and inv.ok, value, inv)


UNOBSTRUCTED = "locally unobstructed"
NO_INVARIANT_CHAIN = "no invariant chain can exist"
NO_COCHAIN_MAP = "no cochain map can exist"


@dataclass
class PointObstruction:
    point: tuple
    isotropy_dim: int
    relative_dim: int      # dim of degree-q relative forms for the isotropy subgroup
    cohomology_dim: int    # dim of degree-q relative cohomology


@dataclass
class CochainReport:
    points: list
    verdict: str

    @property
    def ok(self):
        return self.verdict == UNOBSTRUCTED


def obstruction_report(action, sample_points, component_reps=None):
    """Per-point isotropy cohomology in the orbit degree, with the verdict:
    a vanishing relative space forbids any invariant chain, a vanishing
    cohomology forbids any cochain map."""
    q = action.orbit_dim
    results = []
    verdict = UNOBSTRUCTED
    for idx, point in enumerate(sample_points):
        reps = ()
        if component_reps:
            reps = tuple(component_reps[idx]) if idx < len(component_reps) else ()
        sample = isotropy_algebra_at(action, point, reps)
        sub = SubgroupSpec.from_vectors(sample.isotropy_basis, reps)
        h = relative_cohomology(action.algebra, sub, q)
        a_dim = h.relative_dims[q]
        results.append(PointObstruction(sample.point, len(sample.isotropy_basis),
                                        a_dim, h.dimension))
        if a_dim == 0:
            verdict = NO_INVARIANT_CHAIN
        elif h.dimension == 0 and verdict != NO_INVARIANT_CHAIN:
            verdict = NO_COCHAIN_MAP
    return CochainReport(results, verdict)
