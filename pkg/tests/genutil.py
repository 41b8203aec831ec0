"""Seeded random generators for property suites: expressions, tensors,
Lie algebras (valid by construction: known tables transported along random
invertible basis changes), and rational automorphisms."""

from fractions import Fraction
from itertools import combinations

from liecochain import chart_calculus as cc
from liecochain import linalg
from liecochain import scalar_field as sf
from liecochain.lie_cohomology import AltForm, LieAlgebra


def random_rational(rng, span=3):
    num = rng.randint(-span, span)
    den = rng.randint(1, span)
    return Fraction(num, den)


def random_scalar(rng, coords, funcs=(), terms=2, allow_fraction=True):
    """Small random differential-polynomial fraction."""
    def random_term():
        e = sf.rational(rng.randint(-3, 3))
        for _ in range(rng.randint(0, 2)):
            e = e * sf.coordinate(rng.choice(coords)) ** rng.randint(1, 2)
        if funcs and rng.random() < 0.5:
            name, args = rng.choice(funcs)
            f = sf.function(name, args)
            for _ in range(rng.randint(0, 1)):
                f = sf.partial(f, rng.choice(args))
            e = e * f
        return e

    out = sf.ZERO
    for _ in range(rng.randint(1, terms)):
        out = out + random_term()
    if allow_fraction and rng.random() < 0.25:
        den = sf.ONE + sf.coordinate(rng.choice(coords)) ** 2
        out = out / den
    return out


def random_form(rng, chart, degree, funcs=(), terms=2, polynomial=False):
    coeffs = {}
    tuples = list(combinations(range(chart.dim), degree))
    for idx in rng.sample(tuples, min(len(tuples), rng.randint(1, 2))):
        coeffs[idx] = random_scalar(rng, chart.coordinates, funcs, terms,
                                    allow_fraction=not polynomial)
    return cc.DiffForm(chart, degree, coeffs)


def random_multivector(rng, chart, degree, funcs=(), terms=2, polynomial=False):
    coeffs = {}
    tuples = list(combinations(range(chart.dim), degree))
    for idx in rng.sample(tuples, min(len(tuples), rng.randint(1, 2))):
        coeffs[idx] = random_scalar(rng, chart.coordinates, funcs, terms,
                                    allow_fraction=not polynomial)
    return cc.MultiVectorField(chart, degree, coeffs)


def random_vectorfield(rng, chart, funcs=(), polynomial=False):
    comps = []
    for _ in range(chart.dim):
        if rng.random() < 0.3:
            comps.append(sf.ZERO)
        else:
            comps.append(random_scalar(rng, chart.coordinates, funcs,
                                       allow_fraction=not polynomial))
    return cc.VectorField(chart, comps)


def random_altform(rng, dim, degree):
    coeffs = {}
    tuples = list(combinations(range(dim), degree))
    for idx in rng.sample(tuples, min(len(tuples), rng.randint(1, 3))):
        c = random_rational(rng)
        if c:
            coeffs[idx] = c
    return AltForm(dim, degree, coeffs)


def random_invertible(rng, n, span=2):
    while True:
        m = [[Fraction(rng.randint(-span, span)) for _ in range(n)] for _ in range(n)]
        try:
            linalg.inverse(m)
            return m
        except linalg.SingularMatrix:
            continue


_TEMPLATES = {
    1: [{}],
    2: [{}, {(0, 1): {1: -1}}],
    3: [{}, {(0, 1): {2: 1}},                                   # Heisenberg
        {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}},      # so(3)
        {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}],     # sl(2)
    4: [{}, {(0, 1): {2: 1}}, {(0, 1): {1: -1}, (2, 3): {3: -1}}],
    5: [{}, {(0, 1): {2: 1}, (3, 4): {}},
        {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}}],
}


def transport_algebra(algebra, matrix):
    """Structure constants in the basis f_i = matrix * e_i (columns)."""
    n = algebra.dim
    inv = linalg.inverse(matrix)
    cols = [[matrix[r][c] for r in range(n)] for c in range(n)]
    brackets = {}
    for i in range(n):
        for j in range(i + 1, n):
            w = algebra.bracket(cols[i], cols[j])
            x = linalg.matvec(inv, w)
            rhs = {k: x[k] for k in range(n) if x[k] != 0}
            if rhs:
                brackets[(i, j)] = rhs
    return LieAlgebra(n, brackets)


def random_lie_algebra(rng, max_dim=5):
    p = rng.randint(1, max_dim)
    table = rng.choice(_TEMPLATES[p])
    base = LieAlgebra(p, {k: dict(v) for k, v in table.items() if v})
    return transport_algebra(base, random_invertible(rng, p))


def rational_rotation(rng, axis):
    """Rational point on the circle: cos, sin = (1-t^2, 2t)/(1+t^2)."""
    t = random_rational(rng, 2)
    c = (1 - t * t) / (1 + t * t)
    s = 2 * t / (1 + t * t)
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(3)] for i in range(3)]
    a, b = [i for i in range(3) if i != axis]
    m[a][a], m[a][b], m[b][a], m[b][b] = c, -s, s, c
    return m


def random_so3_automorphism(rng):
    cyc = [[Fraction(0), Fraction(0), Fraction(1)],
           [Fraction(1), Fraction(0), Fraction(0)],
           [Fraction(0), Fraction(1), Fraction(0)]]
    flip = [[Fraction(1), Fraction(0), Fraction(0)],
            [Fraction(0), Fraction(-1), Fraction(0)],
            [Fraction(0), Fraction(0), Fraction(-1)]]
    out = linalg.identity(3)
    for _ in range(rng.randint(1, 4)):
        piece = rng.choice(["rot", "cyc", "flip"])
        if piece == "rot":
            out = linalg.matmul(out, rational_rotation(rng, rng.randrange(3)))
        elif piece == "cyc":
            out = linalg.matmul(out, cyc)
        else:
            out = linalg.matmul(out, flip)
    return out


def random_solv2_automorphism(rng):
    beta = random_rational(rng)
    delta = Fraction(0)
    while delta == 0:
        delta = random_rational(rng)
    return [[Fraction(1), Fraction(0)], [beta, delta]]
