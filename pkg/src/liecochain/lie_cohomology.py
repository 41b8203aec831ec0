"""Exterior algebra over a finite-dimensional Lie algebra and the relative
Chevalley-Eilenberg complex.

A Lie algebra is given by structure constants; a subgroup by a subalgebra
basis plus one adjoint matrix per extra connected component.  Relative
cohomology is computed degreewise by exact kernel/image linear algebra, the
identity component acting infinitesimally and extra components through their
matrices.

Differential convention, on basis tuples x_0..x_r:
    (d a)(x_0,...,x_r) = sum_{i<j} (-1)^{i+j} a([x_i,x_j], ..no x_i, x_j..)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import linalg
from .linalg import SingularMatrix


class CohomologyError(Exception):
    pass


class DegreeOverflow(CohomologyError):
    pass


class NotAutomorphism(CohomologyError):
    pass


class InvalidSubgroup(CohomologyError):
    pass


class RelativeComplexNotClosed(CohomologyError):
    pass


class LieAlgebra:
    """Structure constants c[i][j][k] for [e_i, e_j] = sum_k c_k e_k, i < j.

    Brackets are stored sparsely for 0-based i < j; antisymmetry and
    self-brackets are implicit.
    """

    def __init__(self, dim, brackets=None, labels=None):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.labels = tuple(labels) if labels else tuple(f"e{i+1}" for i in range(dim))
        table = {}
        for (i, j), rhs in (brackets or {}).items():
            if not 0 <= i < j < dim:
                raise ValueError(f"bracket indices must satisfy 0 <= i < j < dim, got {(i, j)}")
            rhs = {k: Fraction(c) for k, c in rhs.items() if c != 0}
            for k in rhs:
                if not 0 <= k < dim:
                    raise ValueError(f"bracket target {k} out of range")
            if rhs:
                table[(i, j)] = rhs
        self.brackets = table

    def bracket_basis(self, i, j):
        """[e_i, e_j] as a sparse {k: coefficient} map, any i, j."""
        if i == j:
            return {}
        if i < j:
            return dict(self.brackets.get((i, j), {}))
        return {k: -c for k, c in self.brackets.get((j, i), {}).items()}

    def bracket(self, u, v):
        """[u, v] for dense rational coordinate vectors."""
        out = [Fraction(0)] * self.dim
        for i in range(self.dim):
            if u[i] == 0:
                continue
            for j in range(self.dim):
                if v[j] == 0:
                    continue
                for k, c in self.bracket_basis(i, j).items():
                    out[k] += u[i] * v[j] * c
        return out

    def __eq__(self, other):
        return (isinstance(other, LieAlgebra) and self.dim == other.dim
                and self.brackets == other.brackets and self.labels == other.labels)

    def __repr__(self):
        return f"LieAlgebra(dim={self.dim}, brackets={self.brackets!r})"


@dataclass(frozen=True)
class SubgroupSpec:
    """A subgroup: subalgebra basis vectors plus the adjoint matrix of one
    representative per non-identity connected component."""

    basis: tuple = ()
    component_reps: tuple = ()

    @staticmethod
    def trivial():
        return SubgroupSpec()

    @staticmethod
    def from_vectors(vectors, component_reps=()):
        basis = tuple(tuple(Fraction(x) for x in v) for v in vectors)
        reps = tuple(tuple(tuple(Fraction(x) for x in row) for row in m) for m in component_reps)
        return SubgroupSpec(basis, reps)


@dataclass
class JacobiReport:
    ok: bool
    violations: list = field(default_factory=list)  # (i, j, k, residual vector)


def validate_lie_algebra(algebra):
    """Check the Jacobi identity on all basis triples."""
    violations = []
    n = algebra.dim
    e = linalg.identity(n)
    for i, j, k in combinations(range(n), 3):
        res = [sum(t) for t in zip(
            algebra.bracket(algebra.bracket(e[i], e[j]), e[k]),
            algebra.bracket(algebra.bracket(e[j], e[k]), e[i]),
            algebra.bracket(algebra.bracket(e[k], e[i]), e[j]))]
        if any(x != 0 for x in res):
            violations.append((i, j, k, res))
    return JacobiReport(not violations, violations)


def is_automorphism(algebra, matrix):
    """Does the matrix preserve brackets: [Mu, Mv] = M[u, v] on the basis?"""
    n = algebra.dim
    cols = [[matrix[r][c] for r in range(n)] for c in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            lhs = algebra.bracket(cols[i], cols[j])
            rhs_sparse = algebra.bracket_basis(i, j)
            rhs = [Fraction(0)] * n
            for k, c in rhs_sparse.items():
                for r in range(n):
                    rhs[r] += c * matrix[r][k]
            if lhs != rhs:
                return False
    return True


def validate_subgroup(algebra, sub):
    """Violation strings for an invalid SubgroupSpec; empty list when valid."""
    problems = []
    n = algebra.dim
    basis = [list(v) for v in sub.basis]
    if basis and linalg.rank(basis) != len(basis):
        problems.append("subalgebra basis vectors are linearly dependent")
    span = linalg.Echelon()
    for v in basis:
        span.insert(v)
    for a in range(len(basis)):
        for b in range(a + 1, len(basis)):
            if not span.contains(algebra.bracket(basis[a], basis[b])):
                problems.append(f"subalgebra not closed under bracket at pair ({a}, {b})")
    for m_idx, m in enumerate(sub.component_reps):
        m = [list(row) for row in m]
        try:
            linalg.inverse(m)
        except SingularMatrix:
            problems.append(f"component matrix {m_idx} is singular")
            continue
        if not is_automorphism(algebra, m):
            problems.append(f"component matrix {m_idx} does not preserve brackets")
        for v in basis:
            if not span.contains(linalg.matvec(m, v)):
                problems.append(f"component matrix {m_idx} does not preserve the subalgebra")
    return problems


class _AltTensor:
    """Alternating tensor on the algebra: {increasing index tuple: Fraction}."""

    def __init__(self, dim, degree, coeffs):
        if not 0 <= degree <= dim:
            raise DegreeOverflow(f"degree {degree} on a {dim}-dimensional algebra")
        clean = {}
        for idx, c in coeffs.items():
            idx = tuple(idx)
            if len(idx) != degree or list(idx) != sorted(set(idx)):
                raise ValueError(f"bad index tuple {idx} for degree {degree}")
            c = Fraction(c)
            if c != 0:
                clean[idx] = c
        self.dim = dim
        self.degree = degree
        self.coeffs = dict(sorted(clean.items()))

    def is_zero(self):
        return not self.coeffs

    def __eq__(self, other):
        return (type(self) is type(other) and self.dim == other.dim
                and self.degree == other.degree and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((type(self), self.dim, self.degree, tuple(self.coeffs.items())))

    def __add__(self, other):
        d = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            d[idx] = d.get(idx, Fraction(0)) + c
        return type(self)(self.dim, self.degree, d)

    def __neg__(self):
        return type(self)(self.dim, self.degree, {i: -c for i, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, f):
        f = Fraction(f)
        return type(self)(self.dim, self.degree, {i: f * c for i, c in self.coeffs.items()})

    def to_vector(self, index_tuples):
        return [self.coeffs.get(t, Fraction(0)) for t in index_tuples]

    @classmethod
    def from_vector(cls, dim, degree, index_tuples, vec):
        return cls(dim, degree, dict(zip(index_tuples, vec)))


class AltForm(_AltTensor):
    """Alternating r-form on the algebra, rational coefficients on the
    dual-basis wedges a^{i1} ^ ... ^ a^{ir}."""

    def eval_basis(self, idx):
        s = _sort_sign(idx)
        if s is None:
            return Fraction(0)
        sign, key = s
        return sign * self.coeffs.get(key, Fraction(0))

    def eval_vector_first(self, v, rest):
        """Evaluate with vector v in the first slot and basis indices after."""
        return sum((v[k] * self.eval_basis((k,) + tuple(rest))
                    for k in range(self.dim) if v[k] != 0), Fraction(0))


class AltMultiVec(_AltTensor):
    """Constant alternating q-vector on the algebra."""


def _sort_sign(idx):
    idx = list(idx)
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(idx, idx[1:]):
        if a == b:
            return None
    return sign, tuple(idx)


def basis_covector(dim, i):
    return AltForm(dim, 1, {(i,): Fraction(1)})


def pairing(alpha, chi):
    """Full contraction of an r-form with an r-vector."""
    if alpha.degree != chi.degree or alpha.dim != chi.dim:
        raise ValueError("pairing needs equal degrees on the same algebra")
    return sum((c * alpha.coeffs.get(idx, Fraction(0)) for idx, c in chi.coeffs.items()),
               Fraction(0))


def ce_differential(algebra, alpha):
    """Chevalley-Eilenberg differential of an alternating form."""
    p = algebra.dim
    r = alpha.degree
    if r >= p:
        raise DegreeOverflow("differential of a top-degree form")
    out = {}
    for tup in combinations(range(p), r + 1):
        total = Fraction(0)
        for a in range(r + 1):
            for b in range(a + 1, r + 1):
                rest = tup[:a] + tup[a + 1:b] + tup[b + 1:]
                sign = -1 if (a + b) % 2 else 1
                for k, c in algebra.bracket_basis(tup[a], tup[b]).items():
                    total += sign * c * alpha.eval_basis((k,) + rest)
        if total != 0:
            out[tup] = total
    return AltForm(p, r + 1, out)


def wedge(alpha, beta):
    if alpha.dim != beta.dim or type(alpha) is not type(beta):
        raise ValueError("wedge needs two tensors of the same kind on one algebra")
    if alpha.degree + beta.degree > alpha.dim:
        raise DegreeOverflow("wedge degree exceeds algebra dimension")
    out = {}
    for i1, a in alpha.coeffs.items():
        for i2, b in beta.coeffs.items():
            s = _sort_sign(i1 + i2)
            if s is None:
                continue
            sign, idx = s
            out[idx] = out.get(idx, Fraction(0)) + sign * a * b
    return type(alpha)(alpha.dim, alpha.degree + beta.degree, out)


def interior(v, alpha):
    """First-slot contraction by a coordinate vector of the algebra."""
    if alpha.degree < 1:
        raise DegreeOverflow("interior product of a 0-form")
    out = {}
    for idx, c in alpha.coeffs.items():
        for t, k in enumerate(idx):
            if v[k] == 0:
                continue
            rest = idx[:t] + idx[t + 1:]
            term = v[k] * c * (1 if t % 2 == 0 else -1)
            out[rest] = out.get(rest, Fraction(0)) + term
    return AltForm(alpha.dim, alpha.degree - 1, out)


def infinitesimal_action(algebra, v, alpha):
    """Coadjoint action (v.a)(x_1..x_r) = -sum_i a(x_1,..,[v,x_i],..,x_r)."""
    p = algebra.dim
    bracket_cols = [algebra.bracket(list(v), row) for row in linalg.identity(p)]
    out = {}
    for tup in combinations(range(p), alpha.degree):
        total = Fraction(0)
        for t in range(alpha.degree):
            col = bracket_cols[tup[t]]
            for k in range(p):
                if col[k] == 0:
                    continue
                total -= col[k] * alpha.eval_basis(tup[:t] + (k,) + tup[t + 1:])
        if total != 0:
            out[tup] = total
    return AltForm(p, alpha.degree, out)


def coadjoint_matrix_action(matrix, alpha):
    """(M.a)(v_1..v_r) = a(M^-1 v_1, ..., M^-1 v_r)."""
    p = alpha.dim
    minv = linalg.inverse([list(row) for row in matrix])
    out = {}
    for tup in combinations(range(p), alpha.degree):
        total = Fraction(0)
        for src, c in alpha.coeffs.items():
            # coefficient of alpha_src in the pullback is the (src, tup) minor
            sub = [[minv[i][j] for j in tup] for i in src]
            total += c * _det(sub)
        if total != 0:
            out[tup] = total
    return AltForm(p, alpha.degree, out)


def _det(m):
    n = len(m)
    if n == 0:
        return Fraction(1)
    m = [list(row) for row in m]
    det = Fraction(1)
    for c in range(n):
        sel = next((r for r in range(c, n) if m[r][c] != 0), None)
        if sel is None:
            return Fraction(0)
        if sel != c:
            m[c], m[sel] = m[sel], m[c]
            det = -det
        det *= m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] / m[c][c]
            m[r] = [x - f * y for x, y in zip(m[r], m[c])]
    return det


def _require_valid_subgroup(algebra, sub):
    problems = validate_subgroup(algebra, sub)
    if problems:
        raise InvalidSubgroup("; ".join(problems))


def relative_basis(algebra, sub, degree, validate=True):
    """Deterministic basis of the relative forms in the given degree:
    annihilated by the subalgebra, infinitesimally invariant under it, and
    fixed by every component matrix."""
    if validate:
        _require_valid_subgroup(algebra, sub)
    p = algebra.dim
    tuples = list(combinations(range(p), degree))
    n_cols = len(tuples)
    col = {t: i for i, t in enumerate(tuples)}
    rows = []

    def basis_form(t):
        return AltForm(p, degree, {t: Fraction(1)})

    def add_constraint(value_of_basis_form):
        row = [Fraction(0)] * n_cols
        nonzero = False
        for t in tuples:
            v = value_of_basis_form(t)
            if v != 0:
                row[col[t]] = v
                nonzero = True
        if nonzero:
            rows.append(row)

    for v in sub.basis:
        if degree >= 1:
            for rest in combinations(range(p), degree - 1):
                add_constraint(lambda t, v=v, rest=rest:
                               basis_form(t).eval_vector_first(v, rest))
        for tup in combinations(range(p), degree):
            add_constraint(lambda t, v=v, tup=tup:
                           infinitesimal_action(algebra, v, basis_form(t)).coeffs.get(tup, Fraction(0)))
    for m in sub.component_reps:
        for tup in combinations(range(p), degree):
            def fixed_row(t, m=m, tup=tup):
                acted = coadjoint_matrix_action(m, basis_form(t))
                v = acted.coeffs.get(tup, Fraction(0))
                if t == tup:
                    v -= 1
                return v
            add_constraint(fixed_row)

    if not rows:
        vecs = [r for r in linalg.identity(n_cols)]
    else:
        vecs = linalg.nullspace(rows)
    return [AltForm.from_vector(p, degree, tuples, v) for v in vecs]


def _satisfies_relative_constraints(algebra, sub, alpha):
    for v in sub.basis:
        if alpha.degree >= 1 and not interior(v, alpha).is_zero():
            return False
        if not infinitesimal_action(algebra, v, alpha).is_zero():
            return False
    for m in sub.component_reps:
        if coadjoint_matrix_action(m, alpha) != alpha:
            return False
    return True


@dataclass
class CohomologyResult:
    degree: int
    dimension: int
    representatives: list
    relative_dims: dict  # degree -> dim of the relative space, for context


def relative_cohomology(algebra, sub, degree, validate=True):
    """Relative cohomology in one degree by exact kernel/image computation."""
    if validate:
        _require_valid_subgroup(algebra, sub)
    p = algebra.dim
    if not 0 <= degree <= p:
        raise DegreeOverflow(f"degree {degree} out of range 0..{p}")
    basis_here = relative_basis(algebra, sub, degree, validate=False)
    basis_below = relative_basis(algebra, sub, degree - 1, validate=False) if degree >= 1 else []
    above_tuples = list(combinations(range(p), degree + 1))
    here_tuples = list(combinations(range(p), degree))

    if degree < p:
        diffs = []
        for b in basis_here:
            db = ce_differential(algebra, b)
            if not _satisfies_relative_constraints(algebra, sub, db):
                raise RelativeComplexNotClosed(
                    "differential left the relative subcomplex; subgroup data is inconsistent")
            diffs.append(db)
        # kernel of d on the relative space, in basis_here coordinates
        matrix_rows = [[db.coeffs.get(t, Fraction(0)) for db in diffs] for t in above_tuples]
        kernel_coords = (linalg.nullspace(matrix_rows) if basis_here else [])
    else:
        kernel_coords = [row for row in linalg.identity(len(basis_here))]

    image = linalg.Echelon()
    for b in basis_below:
        db = ce_differential(algebra, b)
        if not _satisfies_relative_constraints(algebra, sub, db):
            raise RelativeComplexNotClosed(
                "differential left the relative subcomplex; subgroup data is inconsistent")
        image.insert(db.to_vector(here_tuples))
    image_rank = len(image)

    reps = []
    quotient = linalg.Echelon()
    for row in image.rows.values():
        quotient.insert(list(row))
    for coords in kernel_coords:
        vec = [Fraction(0)] * len(here_tuples)
        for c, b in zip(coords, basis_here):
            if c != 0:
                for i, t in enumerate(here_tuples):
                    vec[i] += c * b.coeffs.get(t, Fraction(0))
        reduced = quotient.insert(vec)
        if reduced is not None:
            reps.append(AltForm.from_vector(p, degree, here_tuples, reduced))

    dims = {}
    for d in (degree - 1, degree, degree + 1):
        if d < 0 or d > p:
            continue
        if d == degree:
            dims[d] = len(basis_here)
        elif d == degree - 1:
            dims[d] = len(basis_below)
        else:
            dims[d] = len(relative_basis(algebra, sub, d, validate=False))
    dimension = len(kernel_coords) - image_rank
    assert dimension == len(reps)
    return CohomologyResult(degree, dimension, reps, dims)


def conjugate_subgroup(algebra, sub, auto):
    """Transport a subgroup along a bracket-preserving invertible matrix."""
    auto = [list(row) for row in auto]
    try:
        inv = linalg.inverse(auto)
    except SingularMatrix:
        raise NotAutomorphism("conjugating matrix is singular") from None
    if not is_automorphism(algebra, auto):
        raise NotAutomorphism("conjugating matrix does not preserve brackets")
    basis = tuple(tuple(linalg.matvec(auto, list(v))) for v in sub.basis)
    reps = tuple(
        tuple(tuple(row) for row in linalg.matmul(linalg.matmul(auto, [list(r) for r in m]), inv))
        for m in sub.component_reps)
    return SubgroupSpec(basis, reps)
