"""Chain-level linear algebra over k: complexes, cohomology dimensions,
null-homotopy solving, and the torsion-cone construction.

Complexes over k[t]/t^(N+1) are re-read as k-complexes: t is nilpotent, so
every hom space has finite k-dimension per degree once a degree window is
fixed.  Cohomology is computed per degree by exact rank computations;
results at window edges are flagged, never silently truncated.
"""

from __future__ import annotations

from . import linalg
from . import twisted as tw
from .hochschild import HochschildError
from .quiver import MatrixHom
from .scalars import TruncScalar


class HomologyError(HochschildError):
    pass


class Curved(HomologyError):
    pass


class FiniteComplex:
    """Per-degree finite bases over k inside a window, with differentials.

    ``bases[n]`` is a list of labels, ``diffs[n]`` the matrix of
    d: C^n -> C^(n+1) (rows indexed by the target basis).  d^2 = 0 is
    checked on construction.
    """

    def __init__(self, field, window, bases, diffs):
        self.field = field
        self.window = (int(window[0]), int(window[1]))
        lo, hi = self.window
        self.bases = {n: list(bases.get(n, [])) for n in range(lo, hi + 1)}
        self.diffs = {}
        for n in range(lo, hi):
            rows = len(self.bases[n + 1])
            cols = len(self.bases[n])
            d = diffs.get(n)
            if d is None:
                d = linalg.zeros(field, rows, cols)
            if len(d) != rows or (rows and any(len(r) != cols for r in d)):
                raise HomologyError("differential at degree %d has wrong "
                                    "shape" % n)
            self.diffs[n] = d
        for n in range(lo, hi - 1):
            square = linalg.mat_mul(field, self.diffs[n + 1], self.diffs[n])
            if any(not field.is_zero(x) for row in square for x in row):
                raise HomologyError("d^2 != 0 at degree %d" % n)

    def dimension(self, n):
        return len(self.bases.get(n, []))

    def cohomology(self):
        """Per-degree dimensions dim ker - dim im, with window-edge flags.

        Returns (dims, edges): ``dims[n]`` for every window degree, and
        ``edges`` the degrees whose value depends on data outside the
        window (the two boundary degrees).
        """
        lo, hi = self.window
        ranks = {n: linalg.rank(self.field, self.diffs[n])
                 if self.dimension(n) and self.dimension(n + 1) else 0
                 for n in range(lo, hi)}
        dims = {}
        for n in range(lo, hi + 1):
            dim = self.dimension(n)
            rank_out = ranks.get(n, 0)
            rank_in = ranks.get(n - 1, 0)
            dims[n] = dim - rank_out - rank_in
        edges = [lo, hi]
        return dims, edges

    def change_basis(self, matrices):
        """Conjugate by degreewise invertible matrices (for tests)."""
        field = self.field
        lo, hi = self.window
        diffs = {}
        for n in range(lo, hi):
            p_next = matrices.get(n + 1)
            p_this = matrices.get(n)
            d = self.diffs[n]
            if p_this is not None:
                d = linalg.mat_mul(field, d, p_this)
            if p_next is not None:
                inv = _invert(field, p_next)
                d = linalg.mat_mul(field, inv, d)
            diffs[n] = d
        return FiniteComplex(field, self.window, self.bases, diffs)


def _invert(field, mat):
    n = len(mat)
    aug = [row[:] + [field.one if i == j else field.zero
                     for j in range(n)] for i, row in enumerate(mat)]
    red, pivots = linalg.rref(field, aug)
    if pivots != list(range(n)):
        raise HomologyError("basis-change matrix is singular")
    return [row[n:] for row in red]


def _hom_basis(structure, X, Y, degree):
    """k-basis labels (j, i, key, t_power) of Hom^degree(X, Y)."""
    quiver = structure.quiver
    precision = structure.ctx.precision
    out = []
    for j, (tgt_obj, n_j) in enumerate(Y.free.summands):
        for i, (src_obj, m_i) in enumerate(X.free.summands):
            d = degree + n_j - m_i
            for b in quiver.basis(src_obj, tgt_obj, d):
                for e in range(precision + 1):
                    out.append((j, i, b.key, e))
    return out


def _label_element(structure, X, Y, degree, label, coefficient=1):
    j, i, key, e = label
    quiver = structure.quiver
    ctx = structure.ctx
    src_obj, m_i = X.free.summands[i]
    tgt_obj, n_j = Y.free.summands[j]
    el = quiver.element(src_obj, tgt_obj, degree + n_j - m_i,
                        {key: ctx.t_power(e, coefficient)})
    return MatrixHom(X, Y, degree, {(j, i): el})


def _coordinates(structure, X, Y, degree, matrix, labels):
    field = structure.ctx.field
    coords = []
    index = {(j, i, key, e): pos for pos, (j, i, key, e) in enumerate(labels)}
    coords = [field.zero] * len(labels)
    for (j, i), el in matrix.entries.items():
        for key, c in el.terms.items():
            for e in range(c.precision + 1):
                x = c.coefficient(e)
                if field.is_zero(x):
                    continue
                pos = index.get((j, i, key, e))
                if pos is None:
                    raise HomologyError(
                        "value leaves the enumerated hom basis")
                coords[pos] = field.add(coords[pos], x)
    return coords


def endomorphism_complex(structure, X, window):
    """Hom(X, X) as a finite k-complex in the window, d = arity-1 operation.

    The window is padded internally by one degree on each side so that the
    requested degrees have honest kernels and images; the returned complex
    still flags its own (padded) edges.
    """
    lo, hi = window
    lo, hi = lo - 1, hi + 1
    eta = tw.embr(structure)
    field = structure.ctx.field
    bases = {}
    diffs = {}
    for n in range(lo, hi + 1):
        bases[n] = _hom_basis(structure, X, X, n)
    for n in range(lo, hi):
        labels_in = bases[n]
        labels_out = bases[n + 1]
        cols = []
        for label in labels_in:
            f = _label_element(structure, X, X, n, label)
            df = eta.evaluate((f,))
            cols.append(_coordinates(structure, X, X, n + 1, df, labels_out))
        diffs[n] = [[cols[c][r] for c in range(len(labels_in))]
                    for r in range(len(labels_out))]
    return FiniteComplex(field, (lo, hi), bases, diffs)


def cohomology(structure, X, window):
    """Cohomology dimensions of End(X) for the requested window degrees.

    The complex is built on a padded window, so every requested degree is
    interior: the returned dict covers exactly ``window`` and the edge
    flags of the padded complex never touch it.
    """
    complex_ = endomorphism_complex(structure, X, window)
    dims, _ = complex_.cohomology()
    lo, hi = window
    return {n: dims[n] for n in range(lo, hi + 1)}


class NoSolution(Exception):
    """Definite negative: no null-homotopy inside the searched window."""


def null_homotopy(structure, X, window=None):
    """Solve eta_1(h) = 1_X for h of degree -1, exactly.

    Unknowns range over the finite hom basis inside the window; the
    returned h is re-verified.  Raises :class:`NoSolution` if the system
    is inconsistent over the window (a definite negative there).
    """
    c = tw.curvature(structure, X)
    if not c.is_zero():
        raise Curved("null-homotopies only for uncurved objects")
    window = window or structure.ctx.window
    eta = tw.embr(structure)
    field = structure.ctx.field
    labels = [lab for lab in _hom_basis(structure, X, X, -1)
              if window[0] <= _entry_degree(X, lab, -1) <= window[1]]
    if not labels:
        raise NoSolution("no degree -1 hom basis inside the window")
    out_labels = _hom_basis(structure, X, X, 0)
    unit = tw.unit_matrix(structure, X)
    rhs = _coordinates(structure, X, X, 0, unit, out_labels)
    cols = []
    for label in labels:
        h = _label_element(structure, X, X, -1, label)
        cols.append(_coordinates(structure, X, X, 0,
                                 eta.evaluate((h,)), out_labels))
    mat = [[cols[c][r] for c in range(len(labels))]
           for r in range(len(out_labels))]
    solution = linalg.solve(field, mat, rhs)
    if solution is None:
        raise NoSolution("eta_1(h) = 1 has no solution in the window")
    h = MatrixHom.zero(X, X, -1)
    for coeff, label in zip(solution, labels):
        if field.is_zero(coeff):
            continue
        h = h + _label_element(structure, X, X, -1, label, coeff)
    if eta.evaluate((h,)) != unit:
        raise HomologyError("solver returned a bad null-homotopy")
    return h


def _entry_degree(X, label, degree):
    j, i, _, _ = label
    return degree + X.free.summands[j][1] - X.free.summands[i][1]


def cone_of_tn(structure, M, n):
    """M (+) Sigma^{-1} M with connection [[delta, 0], [-t^n, delta]].

    Requires M uncurved; the result is uncurved (t^n is central and the
    construction is curvature removal with zero quotient).  Reducing mod t
    recovers the plain direct sum for n >= 1.
    """
    c = tw.curvature(structure, M)
    if not c.is_zero():
        raise Curved("torsion cone of a curved object")
    ctx = structure.ctx
    tn = ctx.t_power(n) if n <= ctx.precision else \
        TruncScalar.zero(ctx.field, ctx.precision)
    zero = MatrixHom.zero(M, M, 2)
    return tw.remove_curvature(structure, M, tn, zero,
                               name="%r_t^%d" % (M, n))


def hom_module_data(structure, X, degree, window=None):
    """(dimension, t-action matrix) of Hom^degree(X, X) as k-linear data,
    for regularity tests of scalars on it."""
    field = structure.ctx.field
    precision = structure.ctx.precision
    labels = _hom_basis(structure, X, X, degree)
    if window is not None:
        labels = [lab for lab in labels
                  if window[0] <= _entry_degree(X, lab, degree) <= window[1]]
    index = {lab: pos for pos, lab in enumerate(labels)}
    dim = len(labels)
    action = linalg.zeros(field, dim, dim)
    for pos, (j, i, key, e) in enumerate(labels):
        if e + 1 <= precision:
            action[index[(j, i, key, e + 1)]][pos] = field.one
    return dim, action
