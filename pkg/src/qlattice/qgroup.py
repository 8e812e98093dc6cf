"""Root data and the fundamental representation of U_q(so_2n).

Conventions used throughout the package:

  * Weights of the 2n-dimensional fundamental representation are +-L_i.
    Weight-ordered basis vectors v_1..v_2n satisfy v_i = e_i for i <= n and
    v_i = e_{3n+1-i} for i > n, where e_k is the k-th standard basis vector
    of the matrix representation.  Thus +L_i sits at v-index i and -L_i at
    v-index 2n+1-i, and v-indices decrease as weights increase.
  * Words display products left to right; the leftmost letter acts last, so
    evaluating a word multiplies the letter matrices in the written order.
  * Raising operators move v-indices down a "mirrored Dynkin diagram" chain
    with a diamond in the middle: index n+2 raises to both n (via E_n) and
    n+1 (via E_{n-1}), and both raise on to n-1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .exactq import QMatrix, QQ, RationalFunction

E_KIND = "E"
F_KIND = "F"
K_KIND = "K"
KINV_KIND = "Kinv"
_KINDS = (E_KIND, F_KIND, K_KIND, KINV_KIND)


@dataclass(frozen=True)
class GeneratorSymbol:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.index < 1:
            raise ValueError("generator index must be >= 1")

    def __repr__(self):
        return f"{self.kind}{self.index}"


def E(i: int) -> GeneratorSymbol:
    return GeneratorSymbol(E_KIND, i)


def F(i: int) -> GeneratorSymbol:
    return GeneratorSymbol(F_KIND, i)


def K(i: int) -> GeneratorSymbol:
    return GeneratorSymbol(K_KIND, i)


def Kinv(i: int) -> GeneratorSymbol:
    return GeneratorSymbol(KINV_KIND, i)


@dataclass(frozen=True)
class Word:
    """A product of generator symbols in display order."""

    letters: tuple[GeneratorSymbol, ...]

    @staticmethod
    def of(kind: str, indices: Iterable[int]) -> "Word":
        return Word(tuple(GeneratorSymbol(kind, i) for i in indices))

    @staticmethod
    def identity() -> "Word":
        return Word(())

    @staticmethod
    def parse(text: str) -> "Word":
        """Parse 'E:2,3,1' or mixed segments like 'F:1 E:1 F:3 E:2'."""
        letters: list[GeneratorSymbol] = []
        for segment in text.split():
            kind, _, idx = segment.partition(":")
            if kind not in _KINDS or not idx:
                raise ValueError(f"bad word segment {segment!r}")
            letters.extend(GeneratorSymbol(kind, int(i)) for i in idx.split(","))
        return Word(tuple(letters))

    def format(self) -> str:
        if not self.letters:
            return "1"
        parts: list[str] = []
        for sym in self.letters:
            if parts and parts[-1].startswith(sym.kind + ":"):
                parts[-1] += f",{sym.index}"
            else:
                parts.append(f"{sym.kind}:{sym.index}")
        return " ".join(parts)

    def indices(self) -> tuple[int, ...]:
        return tuple(sym.index for sym in self.letters)

    def __len__(self):
        return len(self.letters)

    def __repr__(self):
        return self.format()


# ---------------------------------------------------------------------------
# Cartan data
# ---------------------------------------------------------------------------

class CartanData:
    """Cartan matrix, simple roots and rho for so_2n in the L-basis."""

    def __init__(self, n: int):
        if n < 2:
            raise ValueError("so_2n needs rank n >= 2")
        self.n = n

    def cartan(self, i: int, j: int) -> int:
        n = self.n
        if not (1 <= i <= n and 1 <= j <= n):
            raise ValueError("Cartan index out of range")
        if i == j:
            return 2
        pair = {i, j}
        if pair == {n - 2, n}:
            return -1
        lo, hi = min(i, j), max(i, j)
        if hi == lo + 1 and lo <= n - 2:
            return -1
        return 0

    def simple_root(self, i: int) -> tuple[int, ...]:
        """alpha_i as an integer vector in the L-basis."""
        n = self.n
        v = [0] * n
        if i < n:
            v[i - 1], v[i] = 1, -1
        else:
            v[n - 2], v[n - 1] = 1, 1
        return tuple(v)

    def rho(self) -> tuple[Fraction, ...]:
        """Half-sum of positive roots: (n-1, n-2, ..., 1, 0) in the L-basis."""
        return tuple(Fraction(self.n - i) for i in range(1, self.n + 1))

    def root_coordinates(self, target: Sequence[Fraction]) -> tuple[int, ...]:
        """Write an L-basis vector as an integer combination of simple roots.

        Raises if the target is not in the root lattice.
        """
        n = self.n
        cols = [self.simple_root(i) for i in range(1, n + 1)]
        aug = [[Fraction(cols[j][i]) for j in range(n)] + [Fraction(target[i])]
               for i in range(n)]
        m = QMatrix(aug)
        reduced, pivots = m._rref(pivot_by_terms=False)
        if pivots != list(range(n)):
            raise ValueError("simple roots did not triangulate; bad target")
        coeffs = [reduced[i][n] for i in range(n)]
        if any(c.denominator != 1 for c in coeffs):
            raise ValueError(f"{target} is not in the root lattice")
        return tuple(int(c) for c in coeffs)


# ---------------------------------------------------------------------------
# Weight labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightLabel:
    """A weight +-L_index of the fundamental representation."""

    sign: int
    index: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("sign must be +-1")

    def basis_index(self, n: int) -> int:
        """v-index in 1..2n (+L_i -> i, -L_i -> 2n+1-i)."""
        if not (1 <= self.index <= n):
            raise ValueError("weight index out of range")
        return self.index if self.sign > 0 else 2 * n + 1 - self.index

    def l_vector(self, n: int) -> tuple[int, ...]:
        v = [0] * n
        v[self.index - 1] = self.sign
        return tuple(v)

    def order_rank(self, n: int) -> int:
        """Position in the weight ordering; +-L_n share a rank."""
        b = self.basis_index(n)
        return b if b <= n else b - 1

    def __neg__(self) -> "WeightLabel":
        return WeightLabel(-self.sign, self.index)

    def __repr__(self):
        return f"{'+' if self.sign > 0 else '-'}L{self.index}"


def all_weights(n: int) -> list[WeightLabel]:
    """All 2n weights in decreasing order (v-index order)."""
    ups = [WeightLabel(1, i) for i in range(1, n + 1)]
    downs = [WeightLabel(-1, i) for i in range(n, 0, -1)]
    return ups + downs


def weight_pairs(n: int) -> list[tuple[WeightLabel, WeightLabel]]:
    """Ordered pairs (mu, lambda) with mu > lambda; C(2n,2) - 1 of them."""
    ws = all_weights(n)
    pairs = []
    for a in range(len(ws)):
        for b in range(a + 1, len(ws)):
            mu, lam = ws[a], ws[b]
            if mu.order_rank(n) < lam.order_rank(n):
                pairs.append((mu, lam))
    return pairs


# ---------------------------------------------------------------------------
# Fundamental representation
# ---------------------------------------------------------------------------

def _unit_entries(n: int, plus: tuple[int, int], minus: tuple[int, int]):
    """Sparse +-1 entry map for a difference of matrix units (1-based)."""
    return {(plus[0] - 1, plus[1] - 1): 1, (minus[0] - 1, minus[1] - 1): -1}


def fundamental_matrix(sym: GeneratorSymbol, n: int, field=QQ) -> QMatrix:
    """2n x 2n matrix of a generator in the fundamental representation."""
    i = sym.index
    if not (1 <= i <= n):
        raise ValueError(f"index {i} out of range for rank {n}")
    dim = 2 * n
    if sym.kind in (K_KIND, KINV_KIND):
        sgn = 1 if sym.kind == K_KIND else -1
        diag = [0] * dim
        if i < n:
            diag[i - 1], diag[i] = 1, -1
            diag[n + i - 1], diag[n + i] = -1, 1
        else:
            diag[n - 2], diag[n - 1] = 1, 1
            diag[2 * n - 2], diag[2 * n - 1] = -1, -1
        entries = [field.q_power(sgn * d) if d else field.one for d in diag]
        return QMatrix.diagonal(entries, zero=field.zero)
    if sym.kind == E_KIND:
        cells = (_unit_entries(n, (i, i + 1), (n + i + 1, n + i)) if i < n
                 else _unit_entries(n, (n - 1, 2 * n), (n, 2 * n - 1)))
    else:
        # F_n sign fixed so that [E_n, F_n] = (K_n - K_n^-1)/(q - q^-1) holds
        cells = (_unit_entries(n, (i + 1, i), (n + i, n + i + 1)) if i < n
                 else _unit_entries(n, (2 * n, n - 1), (2 * n - 1, n)))
    m = QMatrix.zeros(dim, dim, zero=field.zero)
    one = field.one
    for (r, c), s in cells.items():
        m.data[r][c] = one if s > 0 else -one
    return m


def act(word: Word, n: int, field=QQ) -> QMatrix:
    """Evaluate a word in the fundamental representation (written order)."""
    result = QMatrix.identity(2 * n, zero=field.zero, one=field.one)
    for sym in word.letters:
        result = result * fundamental_matrix(sym, n, field)
    return result


def v_index_to_std(v: int, n: int) -> int:
    """Map a v-index (weight order) to the standard basis index, 1-based."""
    return v if v <= n else 3 * n + 1 - v


def coproduct_action(sym: GeneratorSymbol, N: int, n: int, field=QQ) -> QMatrix:
    """(N-1)-fold coproduct of a generator acting on (C^2n)^tensor N.

    Delta(E) = E(x)1 + K(x)E, Delta(F) = 1(x)F + F(x)Kinv, Delta(K) = K(x)K,
    iterated coassociatively.
    """
    if N < 1:
        raise ValueError("need at least one tensor factor")
    base = fundamental_matrix(sym, n, field)
    if N == 1:
        return base
    if sym.kind in (K_KIND, KINV_KIND):
        out = base
        for _ in range(N - 1):
            out = out.kron(base)
        return out
    ident = QMatrix.identity(2 * n, zero=field.zero, one=field.one)
    if sym.kind == E_KIND:
        left = fundamental_matrix(K(sym.index), n, field)
        right = ident
    else:
        left = ident
        right = fundamental_matrix(Kinv(sym.index), n, field)
    total = None
    for j in range(N):
        factors = [left] * j + [base] + [right] * (N - 1 - j)
        term = factors[0]
        for f in factors[1:]:
            term = term.kron(f)
        total = term if total is None else total + term
    return total


def coproduct_word(word: Word, N: int, n: int, field=QQ) -> QMatrix:
    result = QMatrix.identity((2 * n) ** N, zero=field.zero, one=field.one)
    for sym in word.letters:
        result = result * coproduct_action(sym, N, n, field)
    return result


# ---------------------------------------------------------------------------
# Weight paths on the mirrored diagram
# ---------------------------------------------------------------------------

def _raise_steps(j: int, n: int) -> list[tuple[int, int]]:
    """(target v-index, letter) pairs one raising step above v-index j."""
    steps = []
    if 2 <= j <= n:
        steps.append((j - 1, j - 1))
    if j == n + 1:
        steps.append((n - 1, n))
    if j == n + 2:
        steps.append((n + 1, n - 1))
        steps.append((n, n))
    if n + 3 <= j <= 2 * n:
        steps.append((j - 1, 2 * n + 1 - j))
    return steps


def _lex_min_word(indices: tuple[int, ...], cartan) -> tuple[int, ...]:
    """Smallest word reachable by swapping adjacent commuting letters."""
    seen = {indices}
    frontier = [indices]
    while frontier:
        nxt = []
        for w in frontier:
            for k in range(len(w) - 1):
                if cartan(w[k], w[k + 1]) == 0 and w[k] != w[k + 1]:
                    s = w[:k] + (w[k + 1], w[k]) + w[k + 2:]
                    if s not in seen:
                        seen.add(s)
                        nxt.append(s)
        frontier = nxt
    return min(seen)


def _raising_routes(b: int, a: int, n: int) -> list[tuple[int, ...]]:
    """All applied-letter sequences climbing from v-index b up to v-index a."""
    routes: list[tuple[int, ...]] = []

    def climb(j: int, letters: tuple[int, ...]) -> None:
        if j == a:
            routes.append(letters)
            return
        for target, letter in _raise_steps(j, n):
            if target >= a or (a > n and target > n):
                climb(target, letters + (letter,))

    climb(b, ())
    return routes


def weight_path(mu: WeightLabel, lam: WeightLabel, n: int) -> tuple[Word, Word]:
    """Raising word v_lambda -> +-v_mu and lowering word v_mu -> +-v_lambda.

    Both words are canonical: the lexicographically smallest representative
    of their commuting-swap class (the two routes through the middle
    diamond are the same algebra element since E_{n-1} and E_n commute).
    """
    if mu.order_rank(n) >= lam.order_rank(n):
        raise ValueError(f"{mu} is not above {lam} in the weight ordering")
    cd = CartanData(n)
    a, b = mu.basis_index(n), lam.basis_index(n)
    routes = _raising_routes(b, a, n)
    if not routes:
        raise ValueError(f"no raising path v{b} -> v{a}")
    eword = min(_lex_min_word(tuple(reversed(r)), cd.cartan) for r in routes)
    fword = min(_lex_min_word(r, cd.cartan) for r in routes)
    return Word.of(E_KIND, eword), Word.of(F_KIND, fword)


def word_action_sign(word: Word, source_v: int, target_v: int, n: int) -> int:
    """Sign s with act(word) v_source = s * v_target; raises if not a unit map."""
    mat = act(word, n)
    col = v_index_to_std(source_v, n) - 1
    row = v_index_to_std(target_v, n) - 1
    entry = mat.data[row][col]
    others = [mat.data[r][col] for r in range(mat.rows) if r != row]
    if any(others) or not entry:
        raise ValueError(f"{word} does not map v{source_v} to a multiple of v{target_v}")
    if entry == QQ.one:
        return 1
    if entry == -QQ.one:
        return -1
    raise ValueError(f"{word} maps v{source_v} to a non-unit multiple of v{target_v}")


# ---------------------------------------------------------------------------
# Defining relations in the fundamental representation
# ---------------------------------------------------------------------------

@dataclass
class RelationCheck:
    name: str
    ok: bool
    detail: str = ""


def check_relations(n: int) -> list[RelationCheck]:
    """Verify the defining relations hold for the fundamental matrices.

    The Serre relation is reported for both candidate normalizations of the
    middle coefficient, (1+q) and (q+q^-1); in this representation all three
    monomials vanish identically, so both hold and the representation cannot
    distinguish them.
    """
    cd = CartanData(n)
    checks: list[RelationCheck] = []
    r_inv = (QQ.q_power(1) - QQ.q_power(-1)).inverse()
    es = {i: fundamental_matrix(E(i), n) for i in range(1, n + 1)}
    fs = {i: fundamental_matrix(F(i), n) for i in range(1, n + 1)}
    ks = {i: fundamental_matrix(K(i), n) for i in range(1, n + 1)}
    kinvs = {i: fundamental_matrix(Kinv(i), n) for i in range(1, n + 1)}
    for i in range(1, n + 1):
        ok = (ks[i] * kinvs[i]) == QMatrix.identity(2 * n)
        checks.append(RelationCheck(f"K{i}*Kinv{i}=1", ok))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            comm = es[i] * fs[j] - fs[j] * es[i]
            if i == j:
                expected = (ks[i] - kinvs[i]).scale(r_inv)
            else:
                expected = QMatrix.zeros(2 * n, 2 * n)
            checks.append(RelationCheck(f"[E{i},F{j}]", comm == expected))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            a = cd.cartan(i, j)
            ok_e = ks[i] * es[j] == (es[j] * ks[i]).scale(QQ.q_power(a))
            ok_f = ks[i] * fs[j] == (fs[j] * ks[i]).scale(QQ.q_power(-a))
            checks.append(RelationCheck(f"K{i}E{j} twist q^{a}", ok_e))
            checks.append(RelationCheck(f"K{i}F{j} twist q^-{a}", ok_f))
    one_plus_q = QQ.q_power(0) + QQ.q_power(1)
    q_plus_qinv = QQ.q_power(1) + QQ.q_power(-1)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            a = cd.cartan(i, j)
            if a == 0:
                ok = es[i] * es[j] == es[j] * es[i] and fs[i] * fs[j] == fs[j] * fs[i]
                checks.append(RelationCheck(f"E{i}E{j} commute", ok))
            else:
                for name, x in (("E", es), ("F", fs)):
                    lhs = x[i] * x[i] * x[j] + x[j] * x[i] * x[i]
                    mid = x[i] * x[j] * x[i]
                    ok1 = lhs == mid.scale(one_plus_q)
                    ok2 = lhs == mid.scale(q_plus_qinv)
                    detail = ("both normalizations hold (all monomials vanish)"
                              if ok1 and ok2 and lhs.is_zero and mid.is_zero else "")
                    checks.append(RelationCheck(
                        f"Serre {name}{i},{name}{j} (1+q)", ok1, detail))
                    checks.append(RelationCheck(
                        f"Serre {name}{i},{name}{j} (q+1/q)", ok2, detail))
    return checks
