import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
from scipy.sparse import csr_matrix, diags, identity, kron

from gauge_fields import MagneticSetup
from realspace_engine import OperatorKind
from special_functions import check_quantum_numbers


BASIS_CLASSES = ("SymNM", "L1NM")

# polynomial degree in the ladder operators
OPERATOR_DEGREE = {
    "PCanX": 1, "PMechX": 1, "PConsX": 1, "GccP": 1,
    "LCanZ": 2, "LMechZ": 2, "LConsZ": 2, "GccL": 2, "Hamiltonian": 2, "XSquared": 2,
}


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class FockLabel:
    """|nA>_A |nB>_B, i.e. |n, m> with n = nA and m = nA - nB."""

    nA: int
    nB: int

    def __post_init__(self) -> None:
        if self.nA < 0 or self.nB < 0:
            raise ValueError(f"occupations must be non-negative, got ({self.nA}, {self.nB})")

    @property
    def n(self) -> int:
        return self.nA

    @property
    def m(self) -> int:
        return self.nA - self.nB

    @classmethod
    def from_nm(cls, n: int, m: int) -> "FockLabel":
        check_quantum_numbers(n, m)
        return cls(nA=n, nB=n - m)


@dataclass(frozen=True)
class LadderOperatorMatrix:
    matrix: csr_matrix
    cutoff_a: int
    cutoff_b: int
    degree: int

    def index(self, label: FockLabel) -> int:
        return label.nA * (self.cutoff_b + 1) + label.nB

    def in_interior(self, label: FockLabel) -> bool:
        return label.nA <= self.cutoff_a - self.degree and label.nB <= self.cutoff_b - self.degree

    def entry(self, bra: FockLabel, ket: FockLabel) -> complex:
        for label in (bra, ket):
            if not self.in_interior(label):
                raise TruncationError(
                    f"label ({label.nA}, {label.nB}) touches the truncation boundary "
                    f"(cutoffs {self.cutoff_a}, {self.cutoff_b}, degree {self.degree})"
                )
        return complex(self.matrix[self.index(bra), self.index(ket)])

    def interior_mask(self, degree: int) -> np.ndarray:
        na = np.repeat(np.arange(self.cutoff_a + 1), self.cutoff_b + 1)
        nb = np.tile(np.arange(self.cutoff_b + 1), self.cutoff_a + 1)
        return (na <= self.cutoff_a - degree) & (nb <= self.cutoff_b - degree)


def _annihilator(cutoff: int) -> csr_matrix:
    return diags(np.sqrt(np.arange(1, cutoff + 1)), offsets=1, shape=(cutoff + 1, cutoff + 1), dtype=complex).tocsr()


class LadderAlgebra:
    """Two-oscillator algebra a, b with Pi and Pi-tilde of the symmetric gauge.

    Pi_x = -i(a - a+)/(sqrt2 l),  Pi_y = (a + a+)/(sqrt2 l)
    Pi~_x = -i(b - b+)/(sqrt2 l), Pi~_y = -(b + b+)/(sqrt2 l)
    """

    def __init__(self, setup: MagneticSetup, cutoff_a: int, cutoff_b: int) -> None:
        self.setup = setup
        self.cutoff_a = cutoff_a
        self.cutoff_b = cutoff_b
        eye_a = identity(cutoff_a + 1, dtype=complex, format="csr")
        eye_b = identity(cutoff_b + 1, dtype=complex, format="csr")
        self.identity = kron(eye_a, eye_b, format="csr")
        self.a = kron(_annihilator(cutoff_a), eye_b, format="csr")
        self.b = kron(eye_a, _annihilator(cutoff_b), format="csr")
        self.a_dag = self.a.conj().T.tocsr()
        self.b_dag = self.b.conj().T.tocsr()

        scale = 1.0 / (math.sqrt(2.0) * setup.l_B)
        self.pi_x = -1j * scale * (self.a - self.a_dag)
        self.pi_y = scale * (self.a + self.a_dag)
        self.pi_tilde_x = -1j * scale * (self.b - self.b_dag)
        self.pi_tilde_y = -scale * (self.b + self.b_dag)

        # symmetric gauge: Pi = p + eA, Pi~ = p - eA
        self.x = (self.pi_y - self.pi_tilde_y) / setup.eB
        self.y = (self.pi_tilde_x - self.pi_x) / setup.eB
        self.p_x = 0.5 * (self.pi_x + self.pi_tilde_x)
        self.p_y = 0.5 * (self.pi_y + self.pi_tilde_y)

    def canonical(self, basis_class: str) -> Tuple[csr_matrix, csr_matrix]:
        """Canonical momenta seen by the class: U+ p U with U = exp(i eB x y / 2) for L1NM."""
        if basis_class == "SymNM":
            return self.p_x, self.p_y
        half = 0.5 * self.setup.eB
        return self.p_x + half * self.y, self.p_y + half * self.x

    def potential(self, gauge_tag: str) -> Tuple[csr_matrix, csr_matrix]:
        eB = self.setup.eB
        zero = csr_matrix(self.identity.shape, dtype=complex)
        if gauge_tag == "symmetric":
            return -0.5 * eB * self.y, 0.5 * eB * self.x
        if gauge_tag == "landau1":
            return -eB * self.y, zero
        return zero, eB * self.x

    def mechanical_oam(self) -> csr_matrix:
        return self.x @ self.pi_y - self.y @ self.pi_x

    def observable(self, op: OperatorKind, basis_class: str) -> csr_matrix:
        eB = self.setup.eB
        tag = op.tag
        if tag == "PCanX":
            return self.canonical(basis_class)[0]
        if tag == "PMechX":
            return self.pi_x
        if tag == "PConsX":
            return self.pi_x + eB * self.y
        if tag == "LCanZ":
            p_x, p_y = self.canonical(basis_class)
            return self.x @ p_y - self.y @ p_x
        if tag == "LMechZ":
            return self.mechanical_oam()
        if tag == "LConsZ":
            return self.mechanical_oam() - 0.5 * eB * (self.x @ self.x + self.y @ self.y)
        if tag == "Hamiltonian":
            return (self.pi_x @ self.pi_x + self.pi_y @ self.pi_y) / (2.0 * self.setup.m_e)
        if tag == "XSquared":
            return self.x @ self.x
        ax, ay = self.potential(op.physical_gauge.tag)
        if tag == "GccP":
            return self.pi_x - ax
        return self.mechanical_oam() - (self.x @ ay - self.y @ ax)


def build_operator(
    op: OperatorKind,
    basis_class: str,
    cutoff_a: int,
    cutoff_b: int,
    setup: MagneticSetup = MagneticSetup(),
) -> LadderOperatorMatrix:
    """Assemble an operator on the truncated |nA>|nB> space by composing ladder matrices.

    L1NM operators are the conjugates U+ O(A_landau1) U acting on symmetric
    labels; covariant operators are the same in both classes.
    """
    if basis_class not in BASIS_CLASSES:
        raise ValueError(f"basis_class must be one of {BASIS_CLASSES}, got {basis_class!r}")
    if op.tag not in OPERATOR_DEGREE:
        raise ValueError(f"no ladder form for {op.label}")
    if op.tag in ("GccP", "GccL") and not op.physical_gauge.is_standard:
        raise ValueError("g.c.c. operators need a standard physical gauge")
    degree = OPERATOR_DEGREE[op.tag]
    if min(cutoff_a, cutoff_b) < 2 + degree:
        raise TruncationError(f"cutoffs ({cutoff_a}, {cutoff_b}) too small for {op.label}; need >= {2 + degree}")
    return _build_cached(op, basis_class, cutoff_a, cutoff_b, setup)


@lru_cache(maxsize=256)
def _build_cached(
    op: OperatorKind, basis_class: str, cutoff_a: int, cutoff_b: int, setup: MagneticSetup
) -> LadderOperatorMatrix:
    algebra = _algebra(setup, cutoff_a, cutoff_b)
    matrix = algebra.observable(op, basis_class).tocsr()
    return LadderOperatorMatrix(matrix=matrix, cutoff_a=cutoff_a, cutoff_b=cutoff_b, degree=OPERATOR_DEGREE[op.tag])


@lru_cache(maxsize=32)
def _algebra(setup: MagneticSetup, cutoff_a: int, cutoff_b: int) -> LadderAlgebra:
    return LadderAlgebra(setup, cutoff_a, cutoff_b)


def nm_basis_entry(
    op: OperatorKind,
    basis_class: str,
    n: int,
    m_prime: int,
    m: int,
    setup: MagneticSetup = MagneticSetup(),
    padding: int = 4,
) -> complex:
    """<n, m'| O |n, m> from the Fock engine; cutoffs sized to n + padding."""
    bra = FockLabel.from_nm(n, m_prime)
    ket = FockLabel.from_nm(n, m)
    cutoff_a = n + padding
    cutoff_b = max(bra.nB, ket.nB) + padding
    return build_operator(op, basis_class, cutoff_a, cutoff_b, setup).entry(bra, ket)


def nm_basis_closed_form(
    op: OperatorKind,
    basis_class: str,
    n: int,
    m_prime: int,
    m: int,
    setup: MagneticSetup = MagneticSetup(),
) -> complex:
    """Reference formulas for the |n, m> matrix elements of the six momenta and OAMs."""
    check_quantum_numbers(n, m)
    check_quantum_numbers(n, m_prime)
    if basis_class not in BASIS_CLASSES:
        raise ValueError(f"basis_class must be one of {BASIS_CLASSES}, got {basis_class!r}")
    diagonal = 1.0 if m_prime == m else 0.0
    nu = n - m

    def shift_momentum() -> complex:
        value = 0.0
        if m_prime == m + 1:
            value = math.sqrt(nu)
        elif m_prime == m - 1:
            value = -math.sqrt(nu + 1)
        return -1j * math.sqrt(setup.eB / 2.0) * value

    tag = op.tag
    if tag == "PCanX":
        value = shift_momentum()
        return value if basis_class == "L1NM" else 0.5 * value
    if tag == "PMechX":
        return 0j
    if tag == "PConsX":
        return shift_momentum()
    if tag == "LCanZ":
        value = m * diagonal
        if basis_class == "L1NM":
            if m_prime == m + 2:
                value += 0.5 * math.sqrt(nu * (nu - 1))
            elif m_prime == m - 2:
                value += 0.5 * math.sqrt((nu + 1) * (nu + 2))
        return complex(value)
    if tag == "LMechZ":
        return complex((2 * n + 1) * diagonal)
    if tag == "LConsZ":
        return complex(m * diagonal)
    raise ValueError(f"no closed form for {op.label}")


@dataclass(frozen=True)
class CommutatorCheck:
    name: str
    max_deviation: float
    expect_vanishing: bool = True


def _commutator(first: csr_matrix, second: csr_matrix) -> csr_matrix:
    return first @ second - second @ first


def _interior_max(matrix: csr_matrix, mask: np.ndarray) -> float:
    dense = matrix.toarray()[np.ix_(mask, mask)]
    if dense.size == 0:
        return 0.0
    return float(np.max(np.abs(dense)))


def commutator_suite(setup: MagneticSetup, cutoff_a: int, cutoff_b: int) -> List[CommutatorCheck]:
    """Canonical commutation relations on the truncation interior."""
    if min(cutoff_a, cutoff_b) < 4:
        raise TruncationError(f"commutator checks need cutoffs >= 4, got ({cutoff_a}, {cutoff_b})")
    alg = _algebra(setup, cutoff_a, cutoff_b)
    interior = LadderOperatorMatrix(alg.identity, cutoff_a, cutoff_b, 0)
    eye = alg.identity
    eB = setup.eB
    p_cons_x = alg.pi_x + eB * alg.y
    p_cons_y = alg.pi_y - eB * alg.x
    l_cons = alg.mechanical_oam() - 0.5 * eB * (alg.x @ alg.x + alg.y @ alg.y)
    hamiltonian = (alg.pi_x @ alg.pi_x + alg.pi_y @ alg.pi_y) / (2.0 * setup.m_e)

    relations = [
        ("[a, a+] = 1", alg.a, alg.a_dag, eye, 2),
        ("[b, b+] = 1", alg.b, alg.b_dag, eye, 2),
        ("[a, b] = 0", alg.a, alg.b, None, 2),
        ("[a, b+] = 0", alg.a, alg.b_dag, None, 2),
        ("[Pi_x, Pi_y] = -i eB", alg.pi_x, alg.pi_y, -1j * eB * eye, 2),
        ("[Pi~_x, Pi~_y] = +i eB", alg.pi_tilde_x, alg.pi_tilde_y, 1j * eB * eye, 2),
        ("[Pi_x, Pi~_x] = 0", alg.pi_x, alg.pi_tilde_x, None, 2),
        ("[Pi_x, Pi~_y] = 0", alg.pi_x, alg.pi_tilde_y, None, 2),
        ("[Pi_y, Pi~_x] = 0", alg.pi_y, alg.pi_tilde_x, None, 2),
        ("[Pi_y, Pi~_y] = 0", alg.pi_y, alg.pi_tilde_y, None, 2),
        ("[p_cons_x, H] = 0", p_cons_x, hamiltonian, None, 3),
        ("[p_cons_y, H] = 0", p_cons_y, hamiltonian, None, 3),
        ("[L_cons, H] = 0", l_cons, hamiltonian, None, 4),
    ]
    checks: List[CommutatorCheck] = []
    for name, first, second, expected, degree in relations:
        difference = _commutator(first, second)
        if expected is not None:
            difference = difference - expected
        checks.append(CommutatorCheck(name, _interior_max(difference, interior.interior_mask(degree))))
    noncommuting = _interior_max(_commutator(l_cons, p_cons_x), interior.interior_mask(3))
    checks.append(CommutatorCheck("[L_cons, p_cons_x] != 0", noncommuting, expect_vanishing=False))
    return checks
