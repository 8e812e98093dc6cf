"""The five particle processes carried by the two-site Hamiltonian kernels.

Each kernel vector of the weight-zero block defines one process: four of the
2n weight-zero tensor states survive the ground-state conjugation and are
identified with the site occupancies (both, second, first, empty).  The
rate parameters (n, delta) attached to each case are the ones the derived
generator matches empirically; the names record which kernel vector the
case comes from.

Multisite ground states are produced by creation/annihilation words applied
to a product vacuum; their coefficients give the (signed) diagonal G used
by the symmetry duality D = G^-1 S G^-1, with S the matrix of a product of
q-exponentials of lowering operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .asep import (BOTH, CLASS_PRESERVING, EMPTY, FIRST, SECOND, SUBSET_BOTH,
                   RateTable, digits, encode, particle_counts, sites_with_class)
from .exactq import QMatrix, QQ, RF_ZERO, RationalFunction
from .hamiltonian import (DerivedGenerator, big_block_matrix, derive_generator,
                          kernel_vector_on_support, lowering_symmetry,
                          multisite_ground_state, power_word, tensor_index,
                          weight_zero_basis)
from .qgroup import E_KIND, F_KIND, Word


@dataclass(frozen=True)
class ProcessCase:
    name: str
    n: int                       # rank of so_2n
    rate_n: int                  # rate-table parameter reproducing the matrix
    delta: int
    occupancy: dict[int, int]    # v-index -> occupancy code
    drop: tuple[int, ...]        # 0-based positions dropped from the big block
    support: tuple[int, ...]     # complementary kernel support
    lead_sign: int               # sign of the q^2 lead entry of the kernel vector
    f_symmetry: tuple[int, ...]  # lowering indices of the duality symmetry
    duality_kind: str
    vacuum_v: int | None = None  # product vacuum for the creation recipe


CASES: dict[str, ProcessCase] = {
    "g2": ProcessCase(
        name="g2", n=3, rate_n=3, delta=1,
        occupancy={1: BOTH, 2: SECOND, 5: FIRST, 6: EMPTY},
        drop=(2, 5), support=(0, 1, 3, 4), lead_sign=1,
        f_symmetry=(1,), duality_kind=CLASS_PRESERVING, vacuum_v=3),
    "g1": ProcessCase(
        name="g1", n=3, rate_n=3, delta=0,
        occupancy={2: BOTH, 3: SECOND, 4: FIRST, 5: EMPTY},
        drop=(0, 3), support=(1, 2, 4, 5), lead_sign=1,
        f_symmetry=(2, 3), duality_kind=SUBSET_BOTH, vacuum_v=5),
    "so8-first": ProcessCase(
        name="so8-first", n=4, rate_n=4, delta=1,
        occupancy={2: BOTH, 3: SECOND, 6: FIRST, 7: EMPTY},
        drop=(0, 3, 4, 7), support=(1, 2, 5, 6), lead_sign=-1,
        f_symmetry=(2,), duality_kind=CLASS_PRESERVING),
    "so8-second": ProcessCase(
        name="so8-second", n=4, rate_n=4, delta=0,
        occupancy={3: BOTH, 4: SECOND, 5: FIRST, 6: EMPTY},
        drop=(0, 1, 4, 5), support=(2, 3, 6, 7), lead_sign=-1,
        f_symmetry=(3, 4), duality_kind=SUBSET_BOTH),
    "so8-third": ProcessCase(
        name="so8-third", n=4, rate_n=4, delta=2,
        occupancy={1: BOTH, 2: SECOND, 7: FIRST, 8: EMPTY},
        drop=(2, 3, 6, 7), support=(0, 1, 4, 5), lead_sign=-1,
        f_symmetry=(1,), duality_kind=CLASS_PRESERVING, vacuum_v=4),
}


def case_rates(case: ProcessCase) -> RateTable:
    return RateTable(case.rate_n, case.delta)


def case_kernel_vector(case: ProcessCase) -> list[RationalFunction]:
    block = big_block_matrix(case.n)
    lead = QQ.q_power(2, case.lead_sign)
    return kernel_vector_on_support(block, case.support, lead)


def case_derived_generator(case: ProcessCase) -> DerivedGenerator:
    block = big_block_matrix(case.n)
    return derive_generator(block, case_kernel_vector(case), case.drop, case.n)


def creation_word(case: ProcessCase, N: int, first_count: int,
                  second_count: int) -> Word:
    """Word whose action on the vacuum spans one particle-count sector."""
    a1, a2 = first_count, second_count
    if not (0 <= a1 <= N and 0 <= a2 <= N):
        raise ValueError("particle counts out of range")
    if case.name == "g2":
        m, k = a2, N - a1
        return power_word((F_KIND, 1, k), (E_KIND, 1, m),
                          (F_KIND, 3, N - m), (E_KIND, 2, m))
    if case.name == "g1":
        return power_word((E_KIND, 2, a1), (E_KIND, 3, a2))
    if case.name == "so8-third":
        m, k = a2, N - a1
        return power_word((F_KIND, 1, k), (E_KIND, 1, m),
                          (F_KIND, 2, N - m), (E_KIND, 2, m),
                          (F_KIND, 4, N - m), (E_KIND, 3, m))
    raise ValueError(f"no creation recipe for case {case.name}")


def config_tensor_index(case: ProcessCase, state: int, N: int) -> int:
    """Tensor-basis index of the product vector representing a configuration."""
    inv = {occ: v for v, occ in case.occupancy.items()}
    return tensor_index(tuple(inv[d] for d in digits(state, N)), case.n)


def sector_ground_vector(case: ProcessCase, N: int, first_count: int,
                         second_count: int) -> dict[int, RationalFunction]:
    """Signed ground-state coefficients on one particle-count sector.

    Returns {configuration: coefficient}; checks that the creation word
    populates exactly the expected sector of process states and nothing else.
    """
    if case.vacuum_v is None:
        raise ValueError(f"case {case.name} has no creation recipe")
    word = creation_word(case, N, first_count, second_count)
    vec = multisite_ground_state(case.n, N, word, case.vacuum_v)
    allowed = set(case.occupancy)
    out: dict[int, RationalFunction] = {}
    nonzero_positions = [i for i, x in enumerate(vec) if x]
    expected = []
    for s in range(4 ** N):
        if particle_counts(s, N) == (first_count, second_count):
            expected.append(s)
    index_of = {config_tensor_index(case, s, N): s for s in expected}
    for pos in nonzero_positions:
        if pos not in index_of:
            raise ArithmeticError(
                f"{case.name}: creation word leaks outside the sector at {pos}")
        out[index_of[pos]] = vec[pos]
    if set(out) != set(expected):
        raise ArithmeticError(f"{case.name}: sector not fully populated")
    return out


def full_ground_diagonal(case: ProcessCase, N: int) -> list[RationalFunction]:
    """Signed ground-state weight for every configuration, sector by sector."""
    out: list[RationalFunction] = [RF_ZERO] * (4 ** N)
    for a1 in range(N + 1):
        for a2 in range(N + 1):
            for s, coeff in sector_ground_vector(case, N, a1, a2).items():
                out[s] = coeff
    return out


def symmetry_duality(case: ProcessCase, N: int) -> QMatrix:
    """D(eta, xi) = G(eta)^-1 S(eta, xi) G(xi)^-1 on the 4^N configurations.

    S is the matrix element <xi| prod exp_{q^2}(coproduct F) |eta> between
    the tensor vectors representing the configurations; G is the signed
    multisite ground state.
    """
    S_op = lowering_symmetry(case.f_symmetry, N, case.n)
    G = full_ground_diagonal(case, N)
    size = 4 ** N
    tindex = [config_tensor_index(case, s, N) for s in range(size)]
    D = QMatrix.zeros(size, size, zero=RF_ZERO)
    for eta in range(size):
        g_eta_inv = G[eta].inverse()
        for xi in range(size):
            s_val = S_op.data[tindex[xi]][tindex[eta]]
            if s_val:
                D.data[eta][xi] = g_eta_inv * s_val * G[xi].inverse()
    return D


def duality_support_pattern_ok(case: ProcessCase, D: QMatrix, N: int) -> bool:
    """Support of D must equal the indicator of the case's closed-form duality."""
    for eta in range(4 ** N):
        a1_eta = set(sites_with_class(eta, N, 1))
        a2_eta = set(sites_with_class(eta, N, 2))
        for xi in range(4 ** N):
            a1_xi = set(sites_with_class(xi, N, 1))
            a2_xi = set(sites_with_class(xi, N, 2))
            if case.duality_kind == CLASS_PRESERVING:
                indicator = a2_xi == a2_eta and a1_xi <= a1_eta
            else:
                indicator = a2_xi <= a2_eta and a1_xi <= a1_eta
            if bool(D.data[eta][xi]) != indicator:
                return False
    return True


def single_right_shifts(state: int, N: int) -> list[int]:
    """States reached by moving one particle one site right (if the slot is free)."""
    ds = digits(state, N)
    out = []
    for x in range(N - 1):
        for c in (1, 2):
            if ds[x] & c and not ds[x + 1] & c:
                t = list(ds)
                t[x] &= ~c
                t[x + 1] |= c
                out.append(encode(t))
    return out


def shift_ratio_law_holds(case: ProcessCase, N: int) -> bool:
    """|G(eta')| / |G(eta)| = q^-1 whenever eta' moves one particle right."""
    qinv = QQ.q_power(-1)
    for a1 in range(N + 1):
        for a2 in range(N + 1):
            sector = sector_ground_vector(case, N, a1, a2)
            for eta, coeff in sector.items():
                for eta2 in single_right_shifts(eta, N):
                    ratio = sector[eta2] / coeff
                    if ratio != qinv and ratio != -qinv:
                        return False
    return True
