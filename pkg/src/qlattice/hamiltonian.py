"""Two-site Hamiltonians from the central elements, and what they generate.

The realized central element on two tensor factors is weight-preserving, so
after subtracting the constant it carries on non-interacting states it
splits into 1x1 blocks (the diagonal states v_i (x) v_i), 2x2 drift blocks
{v_a (x) v_b, v_b (x) v_a} for non-opposite a != b, and one big block on the
weight-zero states (v_i (x) v_{2n+1-i}).  The interaction part is divisible
by (q - q^-1)^2; dividing it out normalizes the blocks so their entries are
the particle jump rates themselves.

Ground states (kernel vectors of the big block) conjugate the block into a
Markov generator, and q-exponentials of lowering operators provide the
symmetries whose sandwich between inverse ground-state factors is a duality
function.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .exactq import QMatrix, QQ, RF_ONE, RF_ZERO, RationalFunction
from .central import assemble_central, realize, realized_central
from .qgroup import (E, F, K, Kinv, Word, coproduct_action, coproduct_word,
                     fundamental_matrix, v_index_to_std)


@lru_cache(maxsize=None)
def fundamental_matrix_cached(sym, n: int) -> QMatrix:
    return fundamental_matrix(sym, n)

EMPTY, FIRST, SECOND, BOTH = 0, 1, 2, 3  # site occupancy codes


def tensor_index(v_indices: tuple[int, ...], n: int) -> int:
    """Row/column of v_{i1} (x) ... (x) v_{iN} in the standard tensor basis."""
    idx = 0
    for v in v_indices:
        idx = idx * (2 * n) + (v_index_to_std(v, n) - 1)
    return idx


def weight_zero_basis(n: int) -> list[tuple[int, int]]:
    """Ordered basis of the big block: (v_i, v_{2n+1-i}) then mirrored."""
    pairs = [(i, 2 * n + 1 - i) for i in range(1, n + 1)]
    return pairs + [(b, a) for a, b in pairs]


@dataclass(frozen=True)
class BlockDecomposition:
    n: int
    const: RationalFunction
    scale: RationalFunction
    singletons: tuple[int, ...]
    pair_blocks: tuple[tuple[int, int], ...]
    big_block: tuple[int, ...]

    def block_sizes(self) -> dict[int, int]:
        sizes = {1: len(self.singletons), 2: len(self.pair_blocks)}
        sizes[len(self.big_block)] = sizes.get(len(self.big_block), 0) + 1
        return sizes


def two_site_hamiltonian(n: int) -> QMatrix:
    """Raw realization of the central element on two sites."""
    return realized_central(n, 2)


def _components(H: QMatrix) -> list[list[int]]:
    adj: dict[int, set[int]] = {i: set() for i in range(H.rows)}
    for i, j, _ in H.nonzero_items():
        if i != j:
            adj[i].add(j)
            adj[j].add(i)
    seen: set[int] = set()
    comps = []
    for s in range(H.rows):
        if s in seen:
            continue
        stack, comp = [s], []
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def shift_and_decompose(H: QMatrix) -> BlockDecomposition:
    """Split H - const Id into connected blocks of its sparsity graph.

    const is the common diagonal value on isolated states; its existence is
    checked.  The normalization scale (q - q^-1)^2 divides every interaction
    block exactly.
    """
    dim = H.rows
    n2 = round(dim ** 0.5)
    n = n2 // 2
    if (2 * n) ** 2 != dim:
        raise ValueError("expected a two-site matrix of shape (2n)^2")
    comps = _components(H)
    singles = [c[0] for c in comps if len(c) == 1]
    if not singles:
        raise ValueError("no isolated states; cannot determine the shift")
    consts = {H.data[i][i] for i in singles}
    if len(consts) != 1:
        raise ValueError(f"isolated states carry {len(consts)} distinct diagonals")
    const = consts.pop()
    pair_blocks = tuple(tuple(c) for c in comps if len(c) == 2)
    big = [c for c in comps if len(c) > 2]
    if len(big) != 1:
        raise ValueError(f"expected one big block, found {len(big)}")
    scale = (QQ.q_power(1) - QQ.q_power(-1)) ** 2
    return BlockDecomposition(n=n, const=const, scale=scale,
                              singletons=tuple(singles),
                              pair_blocks=pair_blocks,
                              big_block=tuple(big[0]))


def normalized_block(H: QMatrix, decomp: BlockDecomposition,
                     indices: tuple[int, ...]) -> QMatrix:
    """(H - const Id)/scale restricted to the given tensor-basis indices."""
    inv = decomp.scale.inverse()
    return QMatrix([[(H.data[a][b] - (decomp.const if a == b else RF_ZERO)) * inv
                     for b in indices] for a in indices])


@lru_cache(maxsize=None)
def big_block_matrix(n: int) -> QMatrix:
    """Normalized weight-zero block in the documented basis order."""
    H = two_site_hamiltonian(n)
    decomp = shift_and_decompose(H)
    order = tuple(tensor_index(p, n) for p in weight_zero_basis(n))
    if set(order) != set(decomp.big_block):
        raise ValueError("big block does not sit on the weight-zero states")
    return normalized_block(H, decomp, order)


def ground_kernel(block: QMatrix) -> list[list[RationalFunction]]:
    """Exact kernel basis of a (shifted, normalized) block."""
    return block.kernel()


def kernel_vector_on_support(block: QMatrix, support: tuple[int, ...],
                             lead: RationalFunction) -> list[RationalFunction]:
    """The kernel vector vanishing off `support`, scaled to a given lead entry.

    `support` is 0-based within the block; `lead` is the value wanted at the
    first support position.  Raises if no such kernel vector exists or if it
    is not unique up to scale.
    """
    basis = block.kernel()
    off = [i for i in range(block.rows) if i not in support]
    constraint = QMatrix([[vec[i] for vec in basis] for i in off] or
                         [[RF_ZERO] * len(basis)])
    combos = constraint.kernel()
    if len(combos) != 1:
        raise ValueError(f"kernel support {support} selects {len(combos)} vectors")
    combo = combos[0]
    vec = [RF_ZERO] * block.rows
    for c, kv in zip(combo, basis):
        if c:
            vec = [v + c * x for v, x in zip(vec, kv)]
    first = vec[support[0]]
    if not first:
        raise ValueError("selected kernel vector vanishes at its lead position")
    factor = lead / first
    return [x * factor for x in vec]


@dataclass(frozen=True)
class DerivedGenerator:
    """Markov generator obtained by ground-state conjugation of a block."""

    matrix: QMatrix
    retained: tuple[int, ...]       # positions within the block basis
    removed: tuple[int, ...]
    state_pairs: tuple[tuple[int, int], ...]  # (v_i, v_j) labels of retained states

    def row_sums(self) -> list[RationalFunction]:
        return [sum(row, RF_ZERO) for row in self.matrix.data]

    def offdiagonals_nonnegative_at(self, points=(Fraction(1, 3), Fraction(1, 2),
                                                  Fraction(3, 4), Fraction(4, 3),
                                                  Fraction(2))) -> bool:
        for q0 in points:
            for i, j, x in self.matrix.nonzero_items():
                if i != j and x.evaluate(q0) < 0:
                    return False
        return True


def derive_generator(block: QMatrix, g: list[RationalFunction],
                     drop: tuple[int, ...], n: int) -> DerivedGenerator:
    """Conjugate a block by its ground state and remove the zero-amplitude states.

    Checks that block @ g = 0 exactly and that `drop` is precisely the zero
    set of g (states where the conjugation would be undefined).
    """
    dim = block.rows
    image = [sum((block.data[i][j] * g[j] for j in range(dim) if g[j]),
                 RF_ZERO) for i in range(dim)]
    if any(image):
        raise ValueError("g is not in the kernel of the block")
    zero_set = tuple(i for i in range(dim) if not g[i])
    if tuple(sorted(drop)) != zero_set:
        raise ValueError(f"drop set {drop} does not match the zero set {zero_set} of g")
    retained = tuple(i for i in range(dim) if i not in drop)
    entries = [[block.data[a][b] * g[b] / g[a] for b in retained] for a in retained]
    pairs = weight_zero_basis(n)
    return DerivedGenerator(matrix=QMatrix(entries), retained=retained,
                            removed=tuple(sorted(drop)),
                            state_pairs=tuple(pairs[i] for i in retained))


# ---------------------------------------------------------------------------
# Multisite ground states
# ---------------------------------------------------------------------------

def multisite_ground_state(n: int, N: int, word: Word,
                           vacuum_v: int) -> list[RationalFunction]:
    """Apply a creation/annihilation word to v_vacuum^(x)N; full coefficient vector."""
    op = coproduct_word(word, N, n)
    col = tensor_index((vacuum_v,) * N, n)
    return [op.data[r][col] for r in range(op.rows)]


def power_word(*factors: tuple[str, int, int]) -> Word:
    """Build words like F1^K E1^M from (kind, index, exponent) factors."""
    letters = []
    for kind, index, exponent in factors:
        letters.extend(Word.of(kind, [index] * exponent).letters)
    return Word(tuple(letters))


# ---------------------------------------------------------------------------
# q-exponential symmetries
# ---------------------------------------------------------------------------

def q_bracket_factorial(k: int, base_exp: int = 2) -> RationalFunction:
    """{k}! with {j} = (1 - q^(base_exp * j)) / (1 - q^base_exp)."""
    total = RF_ONE
    for j in range(2, k + 1):
        num = RF_ONE - QQ.q_power(base_exp * j)
        den = RF_ONE - QQ.q_power(base_exp)
        total = total * (num / den)
    return total


def q_exponential(x: QMatrix, base_exp: int = 2) -> QMatrix:
    """exp_{q^base_exp}(x) for a nilpotent matrix; the series must terminate."""
    dim = x.rows
    total = QMatrix.identity(dim)
    power = x
    k = 1
    while not power.is_zero:
        if k > dim:
            raise ValueError("q-exponential did not terminate; matrix is not nilpotent")
        total = total + power.scale(q_bracket_factorial(k, base_exp).inverse())
        power = power * x
        k += 1
    return total


def lowering_symmetry(f_indices: tuple[int, ...], N: int, n: int) -> QMatrix:
    """Product of exp_{q^2} of the coproduct actions of the listed F's."""
    total = QMatrix.identity((2 * n) ** N)
    for idx in f_indices:
        total = total * q_exponential(coproduct_action(F(idx), N, n))
    return total


def staircase_product_form(f_index: int, N: int, n: int) -> QMatrix:
    """Site-by-site factorization of the q-exponential symmetry.

    Computes prod_j exp_{q^2}(F^(j)) with F^(j) = 1^(j-1) (x) F (x) Kinv^(N-j);
    since F squares to zero on a single site each factor is 1 + F^(j).  Equal
    to exp_{q^2} of the iterated coproduct of F, which tests cross-check.
    """
    ident = QMatrix.identity(2 * n)
    fm = fundamental_matrix_cached(F(f_index), n)
    kinv = fundamental_matrix_cached(Kinv(f_index), n)
    total = QMatrix.identity((2 * n) ** N)
    for j in range(1, N + 1):
        parts = [ident] * (j - 1) + [fm] + [kinv] * (N - j)
        mat = parts[0]
        for p in parts[1:]:
            mat = mat.kron(p)
        total = total * (QMatrix.identity((2 * n) ** N) + mat)
    return total
