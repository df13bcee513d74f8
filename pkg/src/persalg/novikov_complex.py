"""Floer-type complexes over the Novikov field: concise barcodes and gaps.

Generators carry an action level; a differential entry from x to y is a
Novikov element P with val(P) >= l(x) - l(y), so the action never increases.
The *normalized valuation* of an entry, val(P) - l(x) + l(y), is the length
of the bar the pair would produce, and the reduction below repeatedly cancels
the entry of minimal normalized valuation (ties by generator index).  The
result is the concise barcode: finite bar lengths plus per-degree counts of
infinite bars.

Division by pivots brings in infinite Novikov series, so the reduction runs
at a working precision; a ``PrecisionError`` is raised whenever a pivoting
decision would depend on terms beyond that precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .filtered_complex import FilteredComplex, Gen
from .novikov import NOV_ONE, NovikovElement
from .persistence import INF


class PrecisionError(RuntimeError):
    pass


class CoverageError(KeyError):
    """A tabulated operation was queried outside its declared coverage."""


@dataclass(frozen=True)
class ConciseBarcode:
    """Usher-Zhang invariant: finite bar lengths (with the degree of the
    dying cycle) and per-degree infinite bar counts."""

    finite: tuple[tuple[Fraction, int], ...]  # (length, degree)
    infinite: tuple[tuple[int, int], ...]  # (degree, count)

    @property
    def finite_lengths(self) -> list[Fraction]:
        return sorted(l for l, _ in self.finite)

    def infinite_total(self) -> int:
        return sum(c for _, c in self.infinite)

    def generator_count(self) -> int:
        return 2 * len(self.finite) + self.infinite_total()


class FloerComplex:
    def __init__(self, generators: Sequence[Gen],
                 differential: dict[int, dict[int, NovikovElement]],
                 grading_modulus: int = 2, validate: bool = True):
        self.gens = tuple(generators)
        self.modulus = int(grading_modulus)
        self.diff: dict[int, dict[int, NovikovElement]] = {
            i: {j: P for j, P in row.items() if P} for i, row in differential.items()
        }
        self.diff = {i: row for i, row in self.diff.items() if row}
        if validate:
            self.validate()

    def dim(self) -> int:
        return len(self.gens)

    def degree_of(self, i: int) -> int:
        d = self.gens[i].degree
        return d % self.modulus if self.modulus else d

    def entry(self, i: int, j: int) -> NovikovElement:
        return self.diff.get(i, {}).get(j, NovikovElement.zero())

    def validate(self):
        for i, row in self.diff.items():
            for j, P in row.items():
                # level of P*g_j is l(g_j) - val(P); it must not exceed l(g_i)
                if P.valuation < self.gens[j].level - self.gens[i].level:
                    raise ValueError(
                        f"entry {self.gens[i].name}->{self.gens[j].name} raises action")
                if self.modulus and (self.gens[j].degree - self.gens[i].degree + 1) % self.modulus:
                    raise ValueError("differential entry has wrong degree")
        for i in range(self.dim()):
            acc: dict[int, NovikovElement] = {}
            for j, P in self.diff.get(i, {}).items():
                for k, Q in self.diff.get(j, {}).items():
                    acc[k] = acc.get(k, NovikovElement.zero()) + P * Q
            if any(bool(v) for v in acc.values()):
                raise ValueError(f"d^2 != 0 at generator {self.gens[i].name}")

    def apply(self, vec: dict[int, NovikovElement]) -> dict[int, NovikovElement]:
        out: dict[int, NovikovElement] = {}
        for i, c in vec.items():
            if not c:
                continue
            for j, P in self.diff.get(i, {}).items():
                out[j] = out.get(j, NovikovElement.zero()) + c * P
        return {j: v for j, v in out.items() if v}

    def level_of(self, vec: dict[int, NovikovElement]):
        lv = None
        for i, c in vec.items():
            if not c:
                continue
            cur = self.gens[i].level - c.valuation
            lv = cur if lv is None else max(lv, cur)
        return lv

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "generators": [
                {"name": g.name, "degree": g.degree, "level": str(g.level)}
                for g in self.gens
            ],
            "differential": [
                {"from": self.gens[i].name, "to": self.gens[j].name,
                 "coefficient": str(P)}
                for i, row in sorted(self.diff.items())
                for j, P in sorted(row.items())
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "FloerComplex":
        gens = [Gen(r["name"], int(r["degree"]), Fraction(r["level"]))
                for r in data["generators"]]
        index = {g.name: i for i, g in enumerate(gens)}
        diff: dict[int, dict[int, NovikovElement]] = {}
        for rec in data.get("differential", []):
            i, j = index[rec["from"]], index[rec["to"]]
            diff.setdefault(i, {})[j] = NovikovElement.parse(rec["coefficient"])
        return FloerComplex(gens, diff, int(data.get("modulus", 2)))


def _norm_val(C: FloerComplex, i: int, j: int, P: NovikovElement):
    """Bar length of the would-be pair (i, j): l(g_i) - level(P * g_j)."""
    return P.valuation + C.gens[i].level - C.gens[j].level


def _auto_precision(C: FloerComplex) -> Fraction:
    span = Fraction(0)
    if C.gens:
        levels = [g.level for g in C.gens]
        span = max(levels) - min(levels)
    ent = Fraction(0)
    for row in C.diff.values():
        for P in row.values():
            if P.exponents:
                ent = max(ent, abs(P.exponents[0]), abs(P.exponents[-1]))
    return (span + ent + 1) * (C.dim() + 2) + 8


@dataclass
class Reduction:
    """Outcome of the non-Archimedean Gaussian reduction.

    ``pairs`` lists (b_index, a_index, length); ``basis`` expresses the final
    basis vector attached to each original generator index in original
    coordinates (column-style change of basis, so d(basis[b]) has the single
    pivot at a after reduction of lower-order noise up to precision).
    """

    complex: FloerComplex
    pairs: list[tuple[int, int, Fraction]]
    unpaired: list[int]
    basis: dict[int, dict[int, NovikovElement]]


def reduce_floer(C: FloerComplex, working_precision=None) -> Reduction:
    """Two-sided elimination with minimal normalized-valuation pivoting."""
    prec = Fraction(working_precision) if working_precision is not None else _auto_precision(C)
    n = C.dim()
    cols: dict[int, dict[int, NovikovElement]] = {
        i: dict(C.diff.get(i, {})) for i in range(n)
    }
    basis: dict[int, dict[int, NovikovElement]] = {
        i: {i: NOV_ONE} for i in range(n)
    }
    alive = set(range(n))
    pairs: list[tuple[int, int, Fraction]] = []

    def is_zero(P: NovikovElement) -> bool:
        if P.exponents:
            return False
        if P.precision is not None and P.precision < prec / 2:
            raise PrecisionError(
                "entry vanished only up to working precision; increase it")
        return True

    while True:
        pivot = None
        for i in sorted(alive):
            for j, P in cols[i].items():
                if j not in alive or is_zero(P):
                    continue
                nv = _norm_val(C, i, j, P)
                if pivot is None or (nv, i, j) < pivot[:3]:
                    pivot = (nv, i, j, P)
        if pivot is None:
            break
        nv, bi, aj, P = pivot
        pairs.append((bi, aj, nv))
        alive.discard(bi)
        alive.discard(aj)
        Pinv = P.invert(prec + abs(P.valuation))
        residue = {k: Q for k, Q in cols[bi].items() if k != aj and k in alive}
        for x in list(alive):
            row = cols[x]
            Q = row.pop(aj, None)
            row.pop(bi, None)
            if Q is not None and not is_zero(Q):
                coef = Q * Pinv
                for k, R in residue.items():
                    row[k] = row.get(k, NovikovElement.zero()) + coef * R
                # track the column operation on the basis
                bvec = basis[x]
                for k, c in basis[bi].items():
                    bvec[k] = bvec.get(k, NovikovElement.zero()) + coef * c
            cols[x] = {k: v for k, v in row.items() if not is_zero(v)}
    return Reduction(C, pairs, sorted(alive), basis)


def concise_barcode(C: FloerComplex, working_precision=None) -> ConciseBarcode:
    red = reduce_floer(C, working_precision)
    finite = tuple(sorted((length, C.degree_of(aj)) for _, aj, length in red.pairs))
    inf_counts: dict[int, int] = {}
    for u in red.unpaired:
        d = C.degree_of(u)
        inf_counts[d] = inf_counts.get(d, 0) + 1
    return ConciseBarcode(finite, tuple(sorted(inf_counts.items())))


def bar_count_at(C: FloerComplex, delta, working_precision=None) -> int:
    """#finite bars of length > delta plus all infinite bars."""
    delta = Fraction(delta)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    B = concise_barcode(C, working_precision)
    return sum(1 for l, _ in B.finite if l > delta) + B.infinite_total()


def boundary_depth(C: FloerComplex, working_precision=None) -> Fraction:
    B = concise_barcode(C, working_precision)
    return max((l for l, _ in B.finite), default=Fraction(0))


def counting_lemma_bound(C: FloerComplex) -> tuple[Fraction, Fraction]:
    """If C has m generators, r of which survive in homology over the field,
    and every differential entry has normalized valuation >= v, then there
    are (m - r)/2 finite bars, each of length >= v.  Returns ((m-r)/2, v)."""
    vmin = None
    for i, row in C.diff.items():
        for j, P in row.items():
            nv = _norm_val(C, i, j, P)
            vmin = nv if vmin is None else min(vmin, nv)
    red = reduce_floer(C)
    m, r = C.dim(), len(red.unpaired)
    return Fraction(m - r, 2), vmin if vmin is not None else Fraction(0)


# -- membership / gap computations --------------------------------------------

def express_in_reduction(red: Reduction, w: dict[int, NovikovElement],
                         working_precision=None):
    """Write the cycle w as sum c_i d(B_i) + sum q_j U_j in the reduced basis.

    Returns (pair_coeffs, unpaired_coeffs) where pair_coeffs[(bi, aj)] = c and
    unpaired_coeffs[u] = q.  Raises if w is not in the span (not a cycle).
    """
    C = red.complex
    prec = Fraction(working_precision) if working_precision is not None else _auto_precision(C)
    # columns of the linear system: the boundaries d(B_i) and unpaired U_j
    columns: list[tuple[str, object, dict[int, NovikovElement]]] = []
    for bi, aj, _ in red.pairs:
        vec = _apply_original(C, red.basis[bi])
        columns.append(("pair", (bi, aj), vec))
    for u in red.unpaired:
        columns.append(("unpaired", u, dict(red.basis[u])))
    target = {k: v for k, v in w.items() if v}
    vecs = [dict(vec) for _, _, vec in columns]
    keys = [(kind, key) for kind, key, _ in columns]
    # combo[i] expresses the current column i over the original columns, so
    # column operations do not corrupt the meaning of the solution
    combos: list[dict[tuple, NovikovElement]] = [{keys[i]: NOV_ONE} for i in range(len(vecs))]
    order = []
    used_rows: set[int] = set()
    for idx in range(len(vecs)):
        vec = vecs[idx]
        pivot = None
        for r, P in vec.items():
            if r in used_rows or not P:
                continue
            nv = P.valuation - C.gens[r].level
            if pivot is None or (nv, r) < pivot[:2]:
                pivot = (nv, r, P)
        if pivot is None:
            continue
        _, r, P = pivot
        used_rows.add(r)
        order.append((idx, r, P))
        Pinv = P.invert(prec + abs(P.valuation))
        for idx2 in range(idx + 1, len(vecs)):
            Q = vecs[idx2].pop(r, None)
            if Q is not None and Q:
                coef = Q * Pinv
                for k, R in vec.items():
                    if k == r:
                        continue
                    vecs[idx2][k] = vecs[idx2].get(k, NovikovElement.zero()) + coef * R
                for ck, cv in combos[idx].items():
                    combos[idx2][ck] = combos[idx2].get(ck, NovikovElement.zero()) + coef * cv
    # forward substitution: each pivot row survives only in its own column
    residual = dict(target)
    z: dict[int, NovikovElement] = {}
    for idx, r, P in order:
        Q = residual.pop(r, None)
        if Q is None or not Q:
            continue
        coef = Q * P.invert(prec + abs(P.valuation))
        z[idx] = coef
        for k, R in vecs[idx].items():
            if k == r:
                continue
            residual[k] = residual.get(k, NovikovElement.zero()) + coef * R
    residual = {k: v for k, v in residual.items() if v and v.exponents}
    if residual:
        raise ValueError("vector is not a cycle of the complex")
    solution: dict[tuple, NovikovElement] = {}
    for idx, coef in z.items():
        for ck, cv in combos[idx].items():
            solution[ck] = solution.get(ck, NovikovElement.zero()) + coef * cv
    pair_coeffs = {key: c for (kind, key), c in solution.items() if kind == "pair" and c}
    unp_coeffs = {key: c for (kind, key), c in solution.items() if kind == "unpaired" and c}
    return pair_coeffs, unp_coeffs


def _apply_original(C: FloerComplex, vec: dict[int, NovikovElement]):
    return C.apply(vec)


def death_level(C: FloerComplex, w: dict[int, NovikovElement],
                working_precision=None):
    """inf{s : w in d(C^{<= s})}, or INF if [w] survives forever.

    ``w`` must be a cycle; the optimum is read off the orthogonalized
    reduction: with w = sum c_i d(B_i) + sum q_j U_j, the minimal primitive
    level is max_i (l(B_i) - val(c_i)), and any nonzero q_j means +inf.
    """
    red = reduce_floer(C, working_precision)
    pair_coeffs, unp_coeffs = express_in_reduction(red, w, working_precision)
    if any(bool(q) for q in unp_coeffs.values()):
        return INF
    if not pair_coeffs:
        return -INF if False else None  # w == 0
    out = None
    for (bi, aj), c in pair_coeffs.items():
        if not c:
            continue
        lv = C.level_of({k: v * c for k, v in red.basis[bi].items()})
        out = lv if out is None else max(out, lv)
    return out


# -- maps and cones ------------------------------------------------------------

class FloerMap:
    """Degree-0 chain map of Floer complexes with Novikov entries."""

    def __init__(self, source: FloerComplex, target: FloerComplex,
                 matrix: dict[int, dict[int, NovikovElement]], shift=0,
                 validate: bool = True):
        self.source = source
        self.target = target
        self.shift = Fraction(shift)
        self.mat = {i: {j: P for j, P in row.items() if P}
                    for i, row in matrix.items()}
        self.mat = {i: row for i, row in self.mat.items() if row}
        if validate:
            self.validate()

    def validate(self):
        for i, row in self.mat.items():
            gi = self.source.gens[i]
            for j, P in row.items():
                gj = self.target.gens[j]
                # level of P*gj is gj.level - val(P) <= gi.level + shift
                if P.valuation < gj.level - gi.level - self.shift:
                    raise ValueError("map entry exceeds declared shift")
                if self.source.modulus and (gj.degree - gi.degree) % self.source.modulus:
                    raise ValueError("map entry changes degree")
        for i in range(self.source.dim()):
            lhs = self.apply(self.source.diff.get(i, {}))
            rhs = self.target.apply(self.mat.get(i, {}))
            keys = set(lhs) | set(rhs)
            for k in keys:
                if lhs.get(k, NovikovElement.zero()) + rhs.get(k, NovikovElement.zero()):
                    raise ValueError("not a chain map")

    def apply(self, vec: dict[int, NovikovElement]) -> dict[int, NovikovElement]:
        out: dict[int, NovikovElement] = {}
        for i, c in vec.items():
            if not c:
                continue
            for j, P in self.mat.get(i, {}).items():
                out[j] = out.get(j, NovikovElement.zero()) + c * P
        return {j: v for j, v in out.items() if v}


def floer_cone(f: FloerMap) -> tuple[FloerComplex, int]:
    """Cone(f) = target + T(source) with d(x_src) = d_src x + f(x).

    Returns the cone and the offset of the source block."""
    A, B = f.source, f.target
    gens = [Gen(g.name, g.degree, g.level) for g in B.gens]
    gens += [Gen(f"T{g.name}", g.degree + 1, g.level) for g in A.gens]
    nb = B.dim()
    diff: dict[int, dict[int, NovikovElement]] = {}
    for i, row in B.diff.items():
        diff[i] = dict(row)
    for i in range(A.dim()):
        row: dict[int, NovikovElement] = {}
        for j, P in A.diff.get(i, {}).items():
            row[nb + j] = P
        for j, P in f.mat.get(i, {}).items():
            row[j] = row.get(j, NovikovElement.zero()) + P
        if row:
            diff[nb + i] = row
    return FloerComplex(gens, diff, B.modulus, validate=False), nb


def reach_gap_floer(w: dict[int, NovikovElement], level_r, f: FloerMap,
                    working_precision=None):
    """R(w, f) over the Novikov field via the cone trick: w is reached at
    level s iff it becomes a boundary of the cone at level s."""
    r = Fraction(level_r)
    conec, nb = floer_cone(f)
    w_cone = dict(w)
    lvl = death_level(conec, w_cone, working_precision)
    if lvl is None:
        return r
    if lvl == INF:
        return INF
    return max(lvl, r)


# -- Z2 window oracle ----------------------------------------------------------

def z2_window_complex(C: FloerComplex, radius, step) -> FilteredComplex:
    """Finite Z2 model of C: generators T^q x for q in the grid, restricted
    to levels within [-radius, radius] (a subquotient, hence a complex)."""
    radius = Fraction(radius)
    step = Fraction(step)
    qs = []
    q = -radius
    while q <= radius:
        qs.append(q)
        q += step
    gens = []
    index = {}
    for i, g in enumerate(C.gens):
        for q in qs:
            lv = g.level - q
            if -radius <= lv <= radius:
                index[(i, q)] = len(gens)
                gens.append(Gen(f"{g.name}@{q}", g.degree, lv))
    diff: dict[int, list[int]] = {}
    for (i, q), src in index.items():
        rows = []
        for j, P in C.diff.get(i, {}).items():
            if P.precision is not None and P.precision <= 2 * radius:
                raise PrecisionError("entry precision too small for the window")
            for e in P.exponents:
                key = (j, q + e)
                tgt = index.get(key)
                if tgt is not None:
                    rows.append(tgt)
                else:
                    lv = C.gens[j].level - (q + e)
                    if lv > radius:
                        raise AssertionError("window is not closed under d")
        if rows:
            diff[src] = rows
    return FilteredComplex(gens, diff, C.modulus, validate=False)


def t1_homology_rank(C: FloerComplex) -> int:
    """Rank over Z2 of the homology after setting T = 1 (entries must be
    exact)."""
    n = C.dim()
    cols = []
    for i in range(n):
        mask = 0
        for j, P in C.diff.get(i, {}).items():
            if P.precision is not None:
                raise PrecisionError("T=1 specialization needs exact entries")
            if len(P.exponents) % 2:
                mask |= 1 << j
        cols.append(mask)
    rank = 0
    basis: list[int] = []
    for v in cols:
        while v:
            hit = next((b for b in basis if b.bit_length() == v.bit_length()), None)
            if hit is None:
                basis.append(v)
                rank += 1
                break
            v ^= hit
    return n - 2 * rank
