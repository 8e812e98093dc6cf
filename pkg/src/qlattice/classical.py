"""Classical so_2n Casimir generator and the Type-m Parallel SSEP.

Everything here is exact rational arithmetic (Fraction entries); no q.

The Casimir of so_2n is represented on two tensor copies of the vector
representation through the Cartan-Weyl basis and its Killing-form dual
basis (Killing form B(X, Y) = (2n-2) Tr(XY)).  Subtracting the diagonal
matrix of row sums and negating the rows left with negative entries yields
a Markov generator G_n whose states split into 2n absorbing states, one
communicating class of 2n maximal-choice rows, and pairwise-swapping pairs.

The same transition structure arises from two stacked exclusion processes
(mass 1 particles below, masses k/m above, m = n-1): a site pair is frozen
when equal, "balanced" pairs redistribute into any other balanced pair
except the full swap, and every other pair simply swaps.  `parallel_ssep`
builds the generator from those rules; `match_classical` finds an explicit
rate-preserving state bijection onto G_n by backtracking.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactq import QMatrix

ABSORBING = "absorbing"
MAXIMAL = "maximal-choice"
PAIRWISE = "pairwise"


def _unit(n2: int, i: int, j: int) -> QMatrix:
    m = QMatrix.zeros(n2, n2, zero=Fraction(0))
    m.data[i - 1][j - 1] = Fraction(1)
    return m


def cartan_weyl_basis(n: int) -> list[tuple[str, QMatrix, QMatrix]]:
    """(name, element, Killing-dual element) triples for so_2n.

    H_i = E_ii - E_{n+i,n+i}; X_ij = E_ij - E_{n+j,n+i} (i != j);
    Y_ij = E_{i,n+j} - E_{j,n+i} and Z_ij = E_{n+i,j} - E_{n+j,i} (i < j).
    Duals carry 1/(4n-4), with a minus sign for the Y/Z pairing.
    """
    dim = 2 * n
    scale = Fraction(1, 4 * n - 4)
    out: list[tuple[str, QMatrix, QMatrix]] = []
    for i in range(1, n + 1):
        h = _unit(dim, i, i) - _unit(dim, n + i, n + i)
        out.append((f"H{i}", h, h.scale(scale)))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            x_ij = _unit(dim, i, j) - _unit(dim, n + j, n + i)
            x_ji = _unit(dim, j, i) - _unit(dim, n + i, n + j)
            out.append((f"X{i}{j}", x_ij, x_ji.scale(scale)))
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            y = _unit(dim, i, n + j) - _unit(dim, j, n + i)
            z = _unit(dim, n + i, j) - _unit(dim, n + j, i)
            out.append((f"Y{i}{j}", y, z.scale(-scale)))
            out.append((f"Z{i}{j}", z, y.scale(-scale)))
    return out


def killing_form(a: QMatrix, b: QMatrix, n: int) -> Fraction:
    prod = a * b
    return (2 * n - 2) * sum(prod.data[i][i] for i in range(prod.rows))


def casimir_rep(n: int) -> QMatrix:
    """Casimir sum A A^dual represented on C^2n (x) C^2n."""
    if n < 2:
        raise ValueError("need n >= 2")
    dim = 2 * n
    ident = QMatrix.identity(dim, zero=Fraction(0), one=Fraction(1))
    total = QMatrix.zeros(dim * dim, dim * dim, zero=Fraction(0))
    for _, elem, dual in cartan_weyl_basis(n):
        rep_a = elem.kron(ident) + ident.kron(elem)
        rep_b = dual.kron(ident) + ident.kron(dual)
        total = total + rep_a * rep_b
    return total


def casimir_block_form(n: int) -> QMatrix:
    """Block assembly of the Casimir representation used as a cross-check.

    2n x 2n grid of 2n x 2n blocks: diagonal blocks (2n-1) I +- H_i, upper
    left X_ji, lower right -X_ij, and +-Z / +-Y in the off-diagonal
    quadrants, all scaled by 1/(2n-2).
    """
    dim = 2 * n
    elems = {name: m for name, m, _ in cartan_weyl_basis(n)}
    ident = QMatrix.identity(dim, zero=Fraction(0), one=Fraction(1))
    zero_b = QMatrix.zeros(dim, dim, zero=Fraction(0))
    grid: list[list[QMatrix]] = [[zero_b] * dim for _ in range(dim)]
    for i in range(1, n + 1):
        grid[i - 1][i - 1] = ident.scale(2 * n - 1) + elems[f"H{i}"]
        grid[n + i - 1][n + i - 1] = ident.scale(2 * n - 1) - elems[f"H{i}"]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            grid[i - 1][j - 1] = elems[f"X{j}{i}"]
            grid[n + i - 1][n + j - 1] = -elems[f"X{i}{j}"]
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            grid[i - 1][n + j - 1] = -elems[f"Z{i}{j}"]
            grid[j - 1][n + i - 1] = elems[f"Z{i}{j}"]
            grid[n + i - 1][j - 1] = -elems[f"Y{i}{j}"]
            grid[n + j - 1][i - 1] = elems[f"Y{i}{j}"]
    rows = []
    for bi in range(dim):
        for r in range(dim):
            row = []
            for bj in range(dim):
                row.extend(grid[bi][bj].data[r])
            rows.append(row)
    return QMatrix(rows).scale(Fraction(1, 2 * n - 2))


@dataclass(frozen=True)
class ClassicalGenerator:
    n: int
    matrix: QMatrix
    classes: tuple[str, ...]
    pair_partner: dict[int, int]
    negated_rows: tuple[int, ...]


def generator(n: int) -> ClassicalGenerator:
    """Markov generator G_n: subtract row sums, then negate positive rows."""
    rho = casimir_rep(n)
    size = rho.rows
    mat = [[rho.data[i][j] for j in range(size)] for i in range(size)]
    for i in range(size):
        mat[i][i] -= sum(mat[i])
    negated = []
    for i in range(size):
        if mat[i][i] > 0:
            mat[i] = [-x for x in mat[i]]
            negated.append(i)
    g = QMatrix(mat)
    for i in range(size):
        if sum(g.data[i]) != 0:
            raise ArithmeticError(f"row {i} does not sum to zero")
        if g.data[i][i] > 0 or any(g.data[i][j] < 0 for j in range(size) if j != i):
            raise ArithmeticError(f"row {i} is not a generator row")
    classes, partner = classify_matrix(g)
    return ClassicalGenerator(n, g, classes, partner, tuple(negated))


def expected_maximal_rows(n: int) -> tuple[int, ...]:
    """0-based row indices of the maximal-choice set S."""
    rows = [(i - 1) * 2 * n + (n + i) - 1 for i in range(1, n + 1)]
    rows += [(n + i - 1) * 2 * n + i - 1 for i in range(1, n + 1)]
    return tuple(sorted(rows))


def classify_matrix(g: QMatrix) -> tuple[tuple[str, ...], dict[int, int]]:
    """Assign absorbing / maximal-choice / pairwise labels to every row."""
    size = g.rows
    out_degree = [sum(1 for j in range(size) if j != i and g.data[i][j])
                  for i in range(size)]
    max_deg = max(out_degree)
    classes = []
    partner: dict[int, int] = {}
    for i in range(size):
        if out_degree[i] == 0:
            classes.append(ABSORBING)
        elif out_degree[i] == max_deg and max_deg > 1:
            classes.append(MAXIMAL)
        elif out_degree[i] == 1:
            j = next(j for j in range(size) if j != i and g.data[i][j])
            back = [k for k in range(size) if k != j and g.data[j][k]]
            if back == [i]:
                classes.append(PAIRWISE)
                partner[i] = j
            else:
                raise ArithmeticError(f"row {i} has a non-mutual single transition")
        else:
            raise ArithmeticError(f"row {i} fits no state class (degree {out_degree[i]})")
    return tuple(classes), partner


@dataclass
class ClassCensus:
    absorbing: int
    maximal: int
    pairwise: int

    @staticmethod
    def of(classes: tuple[str, ...]) -> "ClassCensus":
        return ClassCensus(classes.count(ABSORBING), classes.count(MAXIMAL),
                           classes.count(PAIRWISE))


def census(matrix: QMatrix) -> ClassCensus:
    """Absorbing and maximal-choice counts without the two-site trichotomy.

    Valid for expanded (multi-site) generators, where intermediate states
    need not be pairwise; `pairwise` here counts out-degree-1 rows.
    """
    size = matrix.rows
    degrees = [sum(1 for j in range(size) if j != i and matrix.data[i][j])
               for i in range(size)]
    max_deg = max(degrees)
    return ClassCensus(absorbing=degrees.count(0),
                       maximal=degrees.count(max_deg) if max_deg else 0,
                       pairwise=degrees.count(1))


def maximal_reach_structure(g: ClassicalGenerator) -> dict[int, set[int]]:
    """Within the maximal-choice class: which members each row reaches."""
    maximal = [i for i, c in enumerate(g.classes) if c == MAXIMAL]
    reach = {}
    for i in maximal:
        reach[i] = {j for j in maximal if j != i and g.matrix.data[i][j]}
    return reach


# ---------------------------------------------------------------------------
# Kronecker-sum expansion
# ---------------------------------------------------------------------------

def expand(L: QMatrix, N: int) -> QMatrix:
    """Generator on N sites: sum of L acting on each adjacent site pair.

    L acts on two sites of local dimension d = sqrt(dim L); the result acts
    on d^N states.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    d = round(L.rows ** 0.5)
    if d * d != L.rows:
        raise ValueError("two-site generator dimension is not a square")
    ident = QMatrix.identity(d, zero=Fraction(0), one=Fraction(1))
    total = None
    for i in range(N - 1):
        term = L
        for _ in range(i):
            term = ident.kron(term)
        for _ in range(N - 2 - i):
            term = term.kron(ident)
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------------------
# Type-m Parallel SSEP from particle rules
# ---------------------------------------------------------------------------

def ssep_site_states(m: int) -> list[tuple[Fraction, int]]:
    """(top mass, bottom occupancy) site states; 2(m+1) of them."""
    masses = [Fraction(k, m) for k in range(m + 1)]
    return [(w, b) for w in masses for b in (0, 1)]


def _complement(site: tuple[Fraction, int]) -> tuple[Fraction, int]:
    return (1 - site[0], 1 - site[1])


def _pair_moves(x, z, m: int):
    """Enabled moves of one two-site subsystem; yields (x', z')."""
    if x == z:
        return
    if z == _complement(x):
        # balanced: redistribute to any other balanced pair except the swap
        for y in ssep_site_states(m):
            if y != x and y != z:
                yield y, _complement(y)
    else:
        yield z, x


def parallel_ssep(m: int, N: int = 2) -> tuple[QMatrix, list[tuple]]:
    """Generator built from the particle rules; states are site-state tuples.

    Every enabled subsystem move fires at rate 1/(2m) = 1/(2n-2); returns
    the matrix and the ordered state list.
    """
    if m < 1 or N < 2:
        raise ValueError("need m >= 1 and N >= 2")
    sites = ssep_site_states(m)
    states = list(itertools.product(sites, repeat=N))
    index = {s: k for k, s in enumerate(states)}
    rate = Fraction(1, 2 * m)
    size = len(states)
    mat = QMatrix.zeros(size, size, zero=Fraction(0))
    for s, state in enumerate(states):
        for x in range(N - 1):
            for a2, b2 in _pair_moves(state[x], state[x + 1], m):
                target = list(state)
                target[x], target[x + 1] = a2, b2
                t = index[tuple(target)]
                mat.data[s][t] += rate
                mat.data[s][s] -= rate
    return mat, states


# ---------------------------------------------------------------------------
# Rate-preserving bijection search
# ---------------------------------------------------------------------------

def _edge_lists(g: QMatrix):
    size = g.rows
    out_e = [[] for _ in range(size)]
    in_e = [[] for _ in range(size)]
    for i, j, x in g.nonzero_items():
        if i != j:
            out_e[i].append((j, x))
            in_e[j].append((i, x))
    return out_e, in_e


def _refine_colors(mats: list[QMatrix]) -> list[list[int]]:
    """Weisfeiler-Leman color refinement run jointly over several graphs.

    Initial color is (diagonal, sorted out-rate multiset, sorted in-rate
    multiset); each round folds in the colors across rated edges.  Colors
    are comparable between the graphs because the palette is shared.
    """
    edges = [_edge_lists(g) for g in mats]
    palette: dict = {}
    colors = []
    for g, (out_e, in_e) in zip(mats, edges):
        col = []
        for i in range(g.rows):
            key = (g.data[i][i],
                   tuple(sorted(x for _, x in out_e[i])),
                   tuple(sorted(x for _, x in in_e[i])))
            col.append(palette.setdefault(key, len(palette)))
        colors.append(col)
    n_classes = len(palette)
    while True:
        fresh: dict = {}
        new_colors = []
        for g, (out_e, in_e), col in zip(mats, edges, colors):
            new_col = []
            for i in range(g.rows):
                key = (col[i],
                       tuple(sorted((x, col[j]) for j, x in out_e[i])),
                       tuple(sorted((x, col[j]) for j, x in in_e[i])))
                new_col.append(fresh.setdefault(key, len(fresh)))
            new_colors.append(new_col)
        colors = new_colors
        if len(fresh) == n_classes:
            return colors
        n_classes = len(fresh)


def match_classical(a: QMatrix, b: QMatrix) -> list[int] | None:
    """Bijection p with a[i][j] == b[p[i]][p[j]] for all i, j, or None.

    Candidates are constrained by joint color refinement; the backtracking
    walks each connected component of `a` breadth-first so every placement
    after the first is anchored to already-mapped neighbors.
    """
    if a.shape != b.shape:
        return None
    size = a.rows
    colors_a, colors_b = _refine_colors([a, b])
    by_color: dict[int, list[int]] = {}
    for j, c in enumerate(colors_b):
        by_color.setdefault(c, []).append(j)
    candidates = []
    for i in range(size):
        cand = by_color.get(colors_a[i], [])
        if not cand:
            return None
        candidates.append(cand)
    if sorted(colors_a) != sorted(colors_b):
        return None
    out_a, in_a = _edge_lists(a)
    # component-wise BFS order over the undirected support of `a`
    neighbors = [set(j for j, _ in out_a[i]) | set(j for j, _ in in_a[i])
                 for i in range(size)]
    order: list[int] = []
    seen = [False] * size
    for root in sorted(range(size), key=lambda i: len(candidates[i])):
        if seen[root]:
            continue
        queue = [root]
        seen[root] = True
        while queue:
            v = queue.pop(0)
            order.append(v)
            for u in sorted(neighbors[v], key=lambda i: len(candidates[i])):
                if not seen[u]:
                    seen[u] = True
                    queue.append(u)
    out_b, in_b = _edge_lists(b)
    mapping: list[int | None] = [None] * size
    inverse: list[int | None] = [None] * size
    used = [False] * size

    def consistent(i: int, j: int) -> bool:
        for k, x in out_a[i]:
            pk = mapping[k]
            if pk is not None and b.data[j][pk] != x:
                return False
        for k, x in in_a[i]:
            pk = mapping[k]
            if pk is not None and b.data[pk][j] != x:
                return False
        for u, x in out_b[j]:
            k = inverse[u]
            if k is not None and a.data[i][k] != x:
                return False
        for u, x in in_b[j]:
            k = inverse[u]
            if k is not None and a.data[k][i] != x:
                return False
        return True

    def backtrack(pos: int) -> bool:
        if pos == size:
            return True
        i = order[pos]
        for j in candidates[i]:
            if not used[j] and consistent(i, j):
                mapping[i] = j
                inverse[j] = i
                used[j] = True
                if backtrack(pos + 1):
                    return True
                mapping[i] = None
                inverse[j] = None
                used[j] = False
        return False

    if not backtrack(0):
        return None
    p = [int(x) for x in mapping]  # type: ignore[arg-type]
    for i in range(size):
        for j in range(size):
            if a.data[i][j] != b.data[p[i]][p[j]]:
                raise AssertionError("bijection verification failed")
    return p
