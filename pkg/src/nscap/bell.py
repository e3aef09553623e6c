"""CGLMP-type Bell functionals, their relabeling orbit and the nonlocality/rate table."""
import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from nscap.behavior import SIZE, Behavior, as_array, index_of, is_normalized
from nscap.channel import sum_rate
from nscap.data import comparison_vertex
from nscap.errors import DomainError
from nscap.relabel import Relabeling, apply_to_vector, orbit_rows

_OPS = {
    "<=": lambda a, b: a <= b,
    ">=": lambda a, b: a >= b,
    "<": lambda a, b: a < b,
}


@dataclass(frozen=True)
class BellFunctional:
    """``coefficients . P + offset``; ``local_bound`` is the claimed local maximum."""

    coefficients: tuple
    offset: Fraction = Fraction(0)
    local_bound: Fraction = Fraction(0)

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if len(coeffs) != SIZE:
            raise DomainError(f"a Bell functional needs {SIZE} coefficients")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "offset", Fraction(self.offset))
        object.__setattr__(self, "local_bound", Fraction(self.local_bound))

    def __call__(self, beh):
        if not is_normalized(beh):
            raise DomainError("Bell functionals are evaluated on normalized behaviors")
        if isinstance(beh, Behavior):
            return sum(c * p for c, p in zip(self.coefficients, beh.entries) if c) + self.offset
        vals = as_array(beh)
        return float(np.dot([float(c) for c in self.coefficients], vals) + float(self.offset))

    def dual(self, rel):
        """Functional ``d`` with ``d(P) == self(apply_relabeling(rel, P))``."""
        m = rel.index_map()
        return BellFunctional(tuple(self.coefficients[m[i]] for i in range(SIZE)),
                              self.offset, self.local_bound)

    def moved(self, rel):
        """Functional ``d`` with ``d(apply_relabeling(rel, P)) == self(P)``."""
        return BellFunctional(tuple(apply_to_vector(rel, self.coefficients)),
                              self.offset, self.local_bound)


def event_functional(events, offset=0):
    """Sum over settings of P(event | x, y); ``events[(x, y)]`` is ``(op, a_shift, b_shift)``.

    The event is ``(a + a_shift) mod 4  op  (b + b_shift) mod 4``.
    """
    coeffs = [0] * SIZE
    for (x, y), (op, sa, sb) in events.items():
        for a in range(4):
            for b in range(4):
                if _OPS[op]((a + sa) % 4, (b + sb) % 4):
                    coeffs[index_of(x, y, a, b)] = 1
    return BellFunctional(tuple(coeffs), Fraction(offset))


B4 = event_functional({(0, 0): ("<=", 0, 0), (0, 1): (">=", 0, 0),
                       (1, 0): (">=", 0, 0), (1, 1): ("<", 0, 0)}, -3)
B4_TILDE = event_functional({(0, 0): ("<=", 0, 0), (0, 1): (">=", 0, 2),
                             (1, 0): (">=", 2, 0), (1, 1): ("<", 2, 2)}, -3)

# outputs of input 1 shifted by 2 (mod 4) on both sides: B4_TILDE == B4.dual(TILDE_RELABELING)
TILDE_RELABELING = Relabeling((0, 1), ((0, 1, 2, 3), (2, 3, 0, 1)),
                              (0, 1), ((0, 1, 2, 3), (2, 3, 0, 1)))


def cglmp_b4(beh):
    return B4(beh)


def cglmp_b4_tilde(beh):
    return B4_TILDE(beh)


def nonlocality_measure(beh, functional=B4):
    """``max(0, functional(P) - local_bound)``; zero on local behaviors."""
    v = functional(beh) - functional.local_bound
    return max(v, 0 * v)


# ------------------------------------------------------------ the orbit

@dataclass(frozen=True)
class FunctionalOrbit:
    """All distinct images of a functional under local reversible relabelings.

    Only the coefficient vector moves; offset and local bound are shared.
    """

    coefficients: np.ndarray
    offset: Fraction
    local_bound: Fraction

    def __len__(self):
        return len(self.coefficients)

    def __iter__(self):
        for row in self.coefficients.tolist():
            yield BellFunctional(tuple(row), self.offset, self.local_bound)

    def __contains__(self, functional):
        if functional.offset != self.offset or functional.local_bound != self.local_bound:
            return False
        if any(c.denominator != 1 for c in functional.coefficients):
            return False
        row = np.array([int(c) for c in functional.coefficients], dtype=np.int64)
        return bool(np.any(np.all(self.coefficients == row, axis=1)))

    def values_on(self, vs):
        """Exact values of every member on every vertex of ``vs`` (Fractions)."""
        raw = self.coefficients @ vs.num.T
        return [[Fraction(int(r), int(d)) + self.offset for r, d in zip(row, vs.den)]
                for row in raw]

    def max_local_violation(self, local_set):
        """Largest ``value - local_bound`` over members and local vertices, exact.

        Integer coefficients on 0/1 deterministic rows give small integer sums,
        so the float64 matrix product is exact.
        """
        if np.any(local_set.den != 1):
            raise DomainError("local vertices must be deterministic (integer rows)")
        vals = self.coefficients.astype(np.float64) @ local_set.num.T.astype(np.float64)
        top = int(np.rint(vals.max()))
        return Fraction(top) + self.offset - self.local_bound


def generate_equivalent_inequalities(base=B4):
    """Orbit of ``base`` under all 1,327,104 relabelings (integer coefficients)."""
    if any(c.denominator != 1 for c in base.coefficients):
        raise DomainError("orbit generation needs integer coefficients")
    rows = orbit_rows([int(c) for c in base.coefficients])
    order = np.lexsort(rows.T[::-1])
    return FunctionalOrbit(rows[order], base.offset, base.local_bound)


# ------------------------------------------------------------ the table

@dataclass(frozen=True)
class TableRow:
    label: str
    nonlocality: Fraction
    max_violation: Fraction
    sum_rate: float


def _anti_monotone(values, rates):
    """Nonlocality strictly increasing while the rate strictly decreases."""
    return (all(a < b for a, b in zip(values, values[1:]))
            and all(a > b for a, b in zip(rates, rates[1:])))


@dataclass(frozen=True)
class Table1Report:
    """``nonlocality`` is B4~; ``max_violation`` the largest value over the B4 orbit."""

    rows: tuple
    params: tuple
    anti_monotone: bool
    anti_monotone_max: bool

    def to_text(self):
        head = f"{'vertex':<10}{'B4~(v)':>10}{'max B4-orbit':>14}{'sum rate':>14}"
        lines = [f"sum rate at (p, q) = {self.params}", head]
        for r in self.rows:
            lines.append(f"{r.label:<10}{str(r.nonlocality):>10}{str(r.max_violation):>14}"
                         f"{r.sum_rate:>14.6f}")
        lines.append(f"anti-monotone (B4~): {self.anti_monotone}")
        lines.append(f"anti-monotone (orbit max): {self.anti_monotone_max}")
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["vertex", "b4_tilde", "b4_orbit_max", "sum_rate"])
        for r in self.rows:
            w.writerow([r.label, str(r.nonlocality), str(r.max_violation), f"{r.sum_rate:.12g}"])
        return buf.getvalue()

    def to_records(self):
        return [{"vertex": r.label, "b4_tilde": str(r.nonlocality),
                 "b4_orbit_max": str(r.max_violation), "sum_rate": r.sum_rate}
                for r in self.rows]


def table1_report(params=(1, 0), orbit=None):
    """B4~, the B4-orbit maximum and the sum rate of the three comparison vertices.

    ``orbit`` is a precomputed :func:`generate_equivalent_inequalities` result.
    """
    orbit = orbit if orbit is not None else generate_equivalent_inequalities()
    verts = [comparison_vertex(k) for k in (2, 3, 4)]
    vs_vals = []
    for v in verts:
        num, den = v.integer_form()
        top = int((orbit.coefficients @ num).max())
        vs_vals.append(Fraction(top, den) + orbit.offset)
    rows = tuple(TableRow(f"v_1/{k}", cglmp_b4_tilde(v), m, sum_rate(v, params))
                 for k, v, m in zip((2, 3, 4), verts, vs_vals))
    rates = [r.sum_rate for r in rows]
    return Table1Report(rows, tuple(params),
                        _anti_monotone([r.nonlocality for r in rows], rates),
                        _anti_monotone([r.max_violation for r in rows], rates))
