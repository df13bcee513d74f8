"""Finite filtered chain complexes over Z2.

A complex stores named generators with integer degrees and exact rational
filtration levels, plus a strictly filtration-respecting differential given
as a sparse Z2 matrix.  Internally columns are bitmasks over the generator
list.  The key algorithms:

* ``decompose_elementary`` -- filtered Gaussian reduction into elementary
  pieces E2(a,b) (db = a) and E1(c) (dc = 0), with the filtered change of
  basis;
* ``homology_barcode`` -- persistence barcode from the decomposition;
* ``cone`` / ``internal_hom`` / ``truncate`` -- standard constructions;
* ``cone_length`` -- the exact count 2#B^{2eps} - dim H^inf together with a
  realizing sequence of weight-0 cone attachments;
* ``min_cone_decomposition`` -- brute-force minimal decomposition search
  used as the oracle for retract cone-length bounds;
* ``stability_reduce`` -- elimination of short pairs of a split differential
  d + D' where D' drops filtration by >= delta;
* ``reach_gap`` -- the energy gap R(w, f) by level-wise linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .persistence import (
    INF,
    Bar,
    Barcode,
    bar_count,
    interleaving_distance,
    retract_interleaving,
)


@dataclass(frozen=True)
class Gen:
    name: str
    degree: int
    level: Fraction

    def __post_init__(self):
        object.__setattr__(self, "level", Fraction(self.level))


def _bits(indices) -> int:
    if isinstance(indices, int):
        return indices
    v = 0
    for i in indices:
        v |= 1 << i
    return v


def _indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class FilteredComplex:
    """d is homological (degree -1) unless cohomological=True."""

    def __init__(self, generators: Sequence[Gen], differential: dict[int, Iterable[int]],
                 grading_modulus: int = 0, cohomological: bool = False, validate: bool = True):
        self.gens = tuple(generators)
        self.modulus = int(grading_modulus)
        self.cohomological = bool(cohomological)
        n = len(self.gens)
        self.dmat = [0] * n
        for i, rows in differential.items():
            self.dmat[i] = _bits(rows)
        if validate:
            self.validate()

    @property
    def d_degree(self) -> int:
        return 1 if self.cohomological else -1

    def dim(self) -> int:
        return len(self.gens)

    def degree_of(self, i: int) -> int:
        d = self.gens[i].degree
        return d % self.modulus if self.modulus else d

    def validate(self):
        n = len(self.gens)
        for i in range(n):
            for j in _indices(self.dmat[i]):
                if self.gens[j].level > self.gens[i].level:
                    raise ValueError(
                        f"differential raises filtration: {self.gens[i].name} -> {self.gens[j].name}")
                if self.modulus:
                    if (self.gens[j].degree - self.gens[i].degree - self.d_degree) % self.modulus:
                        raise ValueError("differential has wrong degree")
                elif self.gens[j].degree != self.gens[i].degree + self.d_degree:
                    raise ValueError("differential has wrong degree")
        for i in range(n):
            acc = 0
            for j in _indices(self.dmat[i]):
                acc ^= self.dmat[j]
            if acc:
                raise ValueError(f"d^2 != 0 on generator {self.gens[i].name}")

    def d_of(self, vec: int) -> int:
        acc = 0
        for i in _indices(vec):
            acc ^= self.dmat[i]
        return acc

    def level_of(self, vec: int) -> Optional[Fraction]:
        return max((self.gens[i].level for i in _indices(vec)), default=None)

    def named(self, vec: int) -> list[str]:
        return [self.gens[i].name for i in _indices(vec)]

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "cohomological": self.cohomological,
            "generators": [
                {"name": g.name, "degree": g.degree, "level": str(g.level)}
                for g in self.gens
            ],
            "differential": [
                {"from": self.gens[i].name, "to": self.gens[j].name}
                for i in range(len(self.gens))
                for j in _indices(self.dmat[i])
            ],
        }

    @staticmethod
    def from_json(data: dict) -> "FilteredComplex":
        gens = [
            Gen(rec["name"], int(rec["degree"]), Fraction(rec["level"]))
            for rec in data["generators"]
        ]
        index = {g.name: i for i, g in enumerate(gens)}
        diff: dict[int, list[int]] = {}
        for rec in data.get("differential", []):
            diff.setdefault(index[rec["from"]], []).append(index[rec["to"]])
        return FilteredComplex(gens, diff, int(data.get("modulus", 0)),
                               bool(data.get("cohomological", False)))


# -- constructors -------------------------------------------------------------

def e1(level=0, degree: int = 0, name: str = "c", modulus: int = 0) -> FilteredComplex:
    return FilteredComplex((Gen(name, degree, Fraction(level)),), {}, modulus)


def e2(level_a, level_b, degree_a: int = 0, name: str = "x", modulus: int = 0,
       cohomological: bool = False) -> FilteredComplex:
    """E2(a,b) with db = a, v(a) <= v(b), |b| = |a|+1 (homological)."""
    if Fraction(level_a) > Fraction(level_b):
        raise ValueError("E2 requires v(a) <= v(b)")
    db = 1 if not cohomological else -1
    gens = (Gen(f"{name}_a", degree_a, Fraction(level_a)),
            Gen(f"{name}_b", degree_a + db, Fraction(level_b)))
    return FilteredComplex(gens, {1: [0]}, modulus, cohomological)


def direct_sum(*complexes: FilteredComplex) -> FilteredComplex:
    base = complexes[0]
    gens: list[Gen] = []
    diff: dict[int, int] = {}
    offset = 0
    for k, C in enumerate(complexes):
        if C.modulus != base.modulus or C.cohomological != base.cohomological:
            raise ValueError("incompatible summands")
        for g in C.gens:
            gens.append(Gen(f"{g.name}#{k}" if len(complexes) > 1 else g.name,
                            g.degree, g.level))
        for i in range(C.dim()):
            diff[offset + i] = C.dmat[i] << offset
        offset += C.dim()
    return FilteredComplex(gens, diff, base.modulus, base.cohomological)


def shift_translate(C: FilteredComplex, alpha=0, t: int = 0) -> FilteredComplex:
    """Sigma^alpha T^t C: levels += alpha, degrees += t."""
    alpha = Fraction(alpha)
    gens = [Gen(g.name, g.degree + t, g.level + alpha) for g in C.gens]
    return FilteredComplex(gens, {i: C.dmat[i] for i in range(C.dim())},
                           C.modulus, C.cohomological)


# -- filtered maps ------------------------------------------------------------

class FilteredMap:
    """Degree-0 chain map between filtered complexes, entries over Z2.

    ``matrix`` maps source generator index to a bitmask over target
    generators.  The declared shift bounds level increases entrywise.
    """

    def __init__(self, source: FilteredComplex, target: FilteredComplex,
                 matrix: dict[int, Iterable[int]], shift=0, validate: bool = True):
        self.source = source
        self.target = target
        self.shift = Fraction(shift)
        self.mat = [0] * source.dim()
        for i, rows in matrix.items():
            self.mat[i] = _bits(rows)
        if validate:
            self.validate()

    def validate(self):
        for i in range(self.source.dim()):
            gi = self.source.gens[i]
            for j in _indices(self.mat[i]):
                gj = self.target.gens[j]
                if gj.level > gi.level + self.shift:
                    raise ValueError(
                        f"map entry {gi.name}->{gj.name} exceeds declared shift")
                if self.source.modulus:
                    if (gj.degree - gi.degree) % self.source.modulus:
                        raise ValueError("map entry has nonzero degree")
                elif gj.degree != gi.degree:
                    raise ValueError("map entry has nonzero degree")
        # chain map: f d = d f
        for i in range(self.source.dim()):
            lhs = self.apply(self.source.dmat[i])
            rhs = self.target.d_of(self.mat[i])
            if lhs != rhs:
                raise ValueError(f"not a chain map at generator {self.source.gens[i].name}")

    def apply(self, vec: int) -> int:
        acc = 0
        for i in _indices(vec):
            acc ^= self.mat[i]
        return acc


# -- elementary decomposition -------------------------------------------------

@dataclass
class ElementaryDecomposition:
    """Pairs (a,b) with d b = a and singles c, in a filtered new basis.

    Each pair entry holds the (a_vec, b_vec) bitmasks over the original
    generators, the exact filtration levels of the two new basis vectors,
    and the degree of the homology class (the a side); singles hold the
    cycle vector, its level, and its degree.
    """

    complex: FilteredComplex
    pairs: list[tuple[int, int, Fraction, Fraction, int]]  # a_vec, b_vec, va, vb, deg_a
    singles: list[tuple[int, Fraction, int]]  # c_vec, vc, deg_c


def decompose_elementary(C: FilteredComplex) -> ElementaryDecomposition:
    """Filtered Gaussian reduction; ties broken by generator index."""
    n = C.dim()
    order = sorted(range(n), key=lambda i: (C.gens[i].level, i))
    pos = {g: p for p, g in enumerate(order)}
    # columns in position coordinates
    def to_pos(mask: int) -> int:
        out = 0
        for i in _indices(mask):
            out |= 1 << pos[i]
        return out

    def from_pos(mask: int) -> int:
        out = 0
        for p in _indices(mask):
            out |= 1 << order[p]
        return out

    R = [to_pos(C.dmat[order[p]]) for p in range(n)]
    V = [1 << p for p in range(n)]  # change of basis, column style
    pivot_of_row: dict[int, int] = {}
    for p in range(n):
        while R[p]:
            low = R[p].bit_length() - 1
            q = pivot_of_row.get(low)
            if q is None:
                pivot_of_row[low] = p
                break
            R[p] ^= R[q]
            V[p] ^= V[q]
    pairs = []
    paired_rows = set()
    paired_cols = set()
    for low, p in sorted(pivot_of_row.items()):
        a_vec = from_pos(R[p])
        b_vec = from_pos(V[p])
        a_lead = order[low]
        b_lead = order[p]
        pairs.append((a_vec, b_vec, C.gens[a_lead].level, C.gens[b_lead].level,
                      C.degree_of(a_lead)))
        paired_rows.add(low)
        paired_cols.add(p)
    singles = []
    for p in range(n):
        if p in paired_cols or p in paired_rows:
            continue
        c_vec = from_pos(V[p])
        lead = order[p]
        singles.append((c_vec, C.gens[lead].level, C.degree_of(lead)))
    return ElementaryDecomposition(C, pairs, singles)


def homology_barcode(C: FilteredComplex) -> Barcode:
    dec = decompose_elementary(C)
    bars = []
    for _, _, va, vb, deg in dec.pairs:
        if va < vb:
            bars.append(Bar(va, vb, deg))
    for _, vc, deg in dec.singles:
        bars.append(Bar(vc, INF, deg))
    return Barcode(tuple(bars), C.modulus)


def barcode_by_rank_oracle(C: FilteredComplex) -> Barcode:
    """Independent barcode computation from ranks of inclusion-induced maps.

    For critical levels s <= t the persistence Betti number
    beta(s,t) = rank(H(C^{<=s}) -> H(C^{<=t})) is computed by plain linear
    algebra; bar multiplicities follow by inclusion-exclusion on the level
    grid.  Deliberately independent of the Gaussian pairing route.
    """
    grid = sorted(set(g.level for g in C.gens))
    degrees = sorted(set(C.degree_of(i) for i in range(C.dim())))
    m = len(grid)
    bars = []
    for deg in degrees:
        cache: dict[tuple, int] = {}

        def beta(s, t):
            key = (s, t)
            if key not in cache:
                cache[key] = _pers_rank(C, deg, s, t)
            return cache[key]

        for i in range(m):
            for j in range(i + 1, m + 1):
                # bar [grid[i], grid[j]) with j == m meaning infinity
                tm = grid[j - 1]
                mult = beta(grid[i], tm)
                if i > 0:
                    mult -= beta(grid[i - 1], tm)
                if j < m:
                    mult -= beta(grid[i], grid[j])
                    if i > 0:
                        mult += beta(grid[i - 1], grid[j])
                death = INF if j == m else grid[j]
                for _ in range(mult):
                    bars.append(Bar(grid[i], death, deg))
    return Barcode(tuple(bars), C.modulus)


def _pers_rank(C: FilteredComplex, deg: int, s, t) -> int:
    """rank of H_deg(C^{<=s}) -> H_deg(C^{<=t})."""
    idx_s = [i for i in range(C.dim()) if C.gens[i].level <= s and C.degree_of(i) == deg]
    cyc_s = _cycle_basis(C, idx_s)
    bnd_t = [C.dmat[i] for i in range(C.dim())
             if C.gens[i].level <= t and C.dmat[i] and _deg_match(C, i, deg)]
    return _rank(cyc_s + bnd_t) - _rank(bnd_t)


def _deg_match(C: FilteredComplex, i: int, deg: int) -> bool:
    d = C.gens[i].degree + C.d_degree
    if C.modulus:
        return d % C.modulus == deg % C.modulus
    return d == deg


def _cycle_basis(C: FilteredComplex, idx: list[int]) -> list[int]:
    """Basis of the kernel of d restricted to the span of generators idx."""
    rows: list[tuple[int, int]] = []  # echelon of (dvec, source vec)
    basis = []
    for i in idx:
        cur_v, cur_d = 1 << i, C.dmat[i]
        changed = True
        while cur_d and changed:
            changed = False
            for rd, rv in rows:
                if cur_d.bit_length() == rd.bit_length():
                    cur_d ^= rd
                    cur_v ^= rv
                    changed = True
        if cur_d:
            rows.append((cur_d, cur_v))
        else:
            basis.append(cur_v)
    return basis


def _rank(vectors: list[int]) -> int:
    return len(_echelon(list(vectors)))


# -- truncation ---------------------------------------------------------------

def truncate(C: FilteredComplex, delta) -> tuple[FilteredComplex, FilteredMap, FilteredMap]:
    """Remove elementary pairs of gap <= delta; returns (V_delta, section,
    projection) with section: V_delta -> C and projection: C -> V_delta,
    both filtered chain maps of shift 0 (composite = id on V_delta)."""
    delta = Fraction(delta)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    dec = decompose_elementary(C)
    kept: list[tuple[str, int, Fraction, int]] = []  # name, vec, level, degree
    diff: dict[int, list[int]] = {}
    db = C.d_degree
    for k, (a_vec, b_vec, va, vb, deg) in enumerate(dec.pairs):
        if vb - va > delta:
            ia = len(kept)
            kept.append((f"p{k}_a", a_vec, va, deg))
            ib = len(kept)
            kept.append((f"p{k}_b", b_vec, vb, deg - db))
            diff[ib] = [ia]
    for k, (c_vec, vc, deg) in enumerate(dec.singles):
        kept.append((f"s{k}", c_vec, vc, deg))
    gens = [Gen(nm, dg, lv) for nm, _, lv, dg in kept]
    V = FilteredComplex(gens, diff, C.modulus, C.cohomological)
    section = FilteredMap(V, C, {i: vec for i, (_, vec, _, _) in enumerate(kept)})
    # projection: express original basis in the new full basis, drop removed
    full: list[tuple[int, Optional[int]]] = []  # (vec over C, index in V or None)
    names = {nm: i for i, (nm, _, _, _) in enumerate(kept)}
    for k, (a_vec, b_vec, va, vb, deg) in enumerate(dec.pairs):
        keep = vb - va > delta
        full.append((a_vec, names.get(f"p{k}_a") if keep else None))
        full.append((b_vec, names.get(f"p{k}_b") if keep else None))
    for k, (c_vec, vc, deg) in enumerate(dec.singles):
        full.append((c_vec, names[f"s{k}"]))
    # invert the basis matrix over GF(2)
    n = C.dim()
    cols = [vec for vec, _ in full]
    inv = _invert_gf2(cols, n)
    proj_mat: dict[int, int] = {}
    for i in range(n):
        # original e_i = sum_j inv[i][j] newbasis_j; project to kept coords
        acc = 0
        for j in _indices(inv[i]):
            tgt = full[j][1]
            if tgt is not None:
                acc ^= 1 << tgt
        proj_mat[i] = acc
    projection = FilteredMap(C, V, proj_mat)
    return V, section, projection


def _invert_gf2(cols: list[int], n: int) -> list[int]:
    """Given n column vectors (bitmasks over n rows) forming an invertible
    matrix M, return the columns of M^{-1}: inv[i] = coordinates of e_i in
    the new basis."""
    # solve M x = e_i for each i; gaussian elimination with augmented identity
    aug = [(cols[j], 1 << j) for j in range(n)]
    # forward eliminate to echelon by leading bit
    basis: list[tuple[int, int]] = []
    for v, c in aug:
        while v:
            lead = v.bit_length() - 1
            hit = next((k for k, (bv, _) in enumerate(basis)
                        if bv.bit_length() - 1 == lead), None)
            if hit is None:
                basis.append((v, c))
                basis.sort(key=lambda t: t[0].bit_length(), reverse=True)
                break
            v ^= basis[hit][0]
            c ^= basis[hit][1]
        else:
            raise ValueError("basis matrix is singular")
    inv = [0] * n
    for i in range(n):
        v, c = 1 << i, 0
        while v:
            lead = v.bit_length() - 1
            hit = next(k for k, (bv, _) in enumerate(basis)
                       if bv.bit_length() - 1 == lead)
            v ^= basis[hit][0]
            c ^= basis[hit][1]
        inv[i] = c
    return inv


# -- cones and homs -----------------------------------------------------------

def cone(f: FilteredMap, lam=0) -> FilteredComplex:
    """lambda-filtered mapping cone: target + Sigma^lam T(source), with
    d(x_src) = T(d_src x) + f(x)."""
    lam = Fraction(lam)
    if lam < f.shift:
        raise ValueError(f"cone parameter {lam} below map shift {f.shift}")
    A, B = f.source, f.target
    t_up = 1 if not B.cohomological else -1
    gens = [Gen(g.name, g.degree, g.level) for g in B.gens]
    gens += [Gen(f"T{g.name}", g.degree + t_up, g.level + lam) for g in A.gens]
    nb = B.dim()
    diff: dict[int, int] = {}
    for i in range(nb):
        diff[i] = B.dmat[i]
    for i in range(A.dim()):
        diff[nb + i] = (A.dmat[i] << nb) | f.mat[i]
    return FilteredComplex(gens, diff, B.modulus, B.cohomological)


def internal_hom(C: FilteredComplex, D: FilteredComplex) -> FilteredComplex:
    """hom(C, D): generators are elementary maps c_i -> d_j with level
    v(d_j) - v(c_i); differential is the graded commutator with d."""
    if C.modulus != D.modulus or C.cohomological != D.cohomological:
        raise ValueError("incompatible complexes")
    gens = []
    pairs = []
    for i, gc in enumerate(C.gens):
        for j, gd in enumerate(D.gens):
            pairs.append((i, j))
            gens.append(Gen(f"[{gc.name}->{gd.name}]", gd.degree - gc.degree,
                            gd.level - gc.level))
    index = {p: k for k, p in enumerate(pairs)}
    diff: dict[int, list[int]] = {}
    for k, (i, j) in enumerate(pairs):
        rows = []
        for j2 in _indices(D.dmat[j]):
            rows.append(index[(i, j2)])
        for i2 in range(C.dim()):
            if (C.dmat[i2] >> i) & 1:
                rows.append(index[(i2, j)])
        diff[k] = rows
    # the hom differential has degree -1 homological regardless of input flag
    return FilteredComplex(gens, diff, C.modulus, C.cohomological, validate=False)


def hom_barcode_oracle(C: FilteredComplex, D: FilteredComplex) -> Barcode:
    """Barcode of H(hom(C,D)) by level-wise ranks of the space of chain maps
    of shift <= s modulo homotopies (independent of the pairing route)."""
    H = internal_hom(C, D)
    return barcode_by_rank_oracle(H)


# -- cone length --------------------------------------------------------------

@dataclass
class ConeStep:
    object_name: str
    shift: Fraction
    translation: int
    weight: Fraction


@dataclass
class ConeDecomposition:
    steps: list[ConeStep]
    mode: str  # "to_target" or "to_zero"

    @property
    def total_weight(self) -> Fraction:
        return sum((s.weight for s in self.steps), Fraction(0))

    def __len__(self):
        return len(self.steps)


def cone_length(C: FilteredComplex, eps, mode: str = "to_target") -> tuple[int, ConeDecomposition]:
    """Exact weight-0 cone length over k: 2#B^{2eps}(H(C)) - dim H(C)^inf.

    Also emits a realizing decomposition: the generators of the delta-
    truncation V_{2eps}, attached in level order (a before b in each pair).
    """
    eps = Fraction(eps)
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if mode not in ("to_target", "to_zero"):
        raise ValueError("mode must be to_target or to_zero")
    B = homology_barcode(C)
    count = bar_count(B, 2 * eps)
    n_inf = sum(1 for b in B.bars if b.infinite)
    value = 2 * count - n_inf
    dec = decompose_elementary(C)
    items = []  # (level, tiebreak, name, degree)
    for k, (_, _, va, vb, deg) in enumerate(dec.pairs):
        if vb - va > 2 * eps:
            items.append((va, 0, f"p{k}_a", deg))
            items.append((vb, 1, f"p{k}_b", deg - C.d_degree))
    for k, (_, vc, deg) in enumerate(dec.singles):
        items.append((vc, 0, f"s{k}", deg))
    items.sort(key=lambda t: (t[0], t[1]))
    steps = [ConeStep(nm, lv, dg, Fraction(0)) for lv, _, nm, dg in items]
    if mode == "to_zero":
        steps = steps[::-1]
    assert len(steps) == value
    return value, ConeDecomposition(steps, mode)


def weighted_cone_length(C: FilteredComplex, eps) -> int:
    """The weight-budget variant: decompositions of lambda-weighted cones
    with total weight (including the weighted end-isomorphism) at most eps.

    Attachment shifts range over all reals here, so a lambda-cone over a
    shift-alpha source equals the plain cone over the shift-(alpha+lambda)
    source; positive per-step weights therefore buy nothing and the whole
    budget is best spent on the end isomorphism, giving the exact identity
    N'(C; k, eps) = N(C; k, eps/2).  The sandwich
    N(C; 2 eps) <= N'(C; eps) <= N(C; eps/4) is then the monotonicity of N."""
    eps = Fraction(eps)
    value, _ = cone_length(C, eps / 2)
    return value


def family_constant(hom_GG: FilteredComplex) -> Fraction:
    """k(G) = 1 / N(hom(G,G); k, 0) from the Yoneda-module bound."""
    n, _ = cone_length(hom_GG, 0)
    if n <= 0:
        raise ValueError("hom(G,G) has zero cone length; constant undefined")
    return Fraction(1, n)


def retract_cone_length_lower(A: FilteredComplex, G: FilteredComplex, eps) -> int:
    """Certified lower bound k(G) * #B^{2eps}(H(hom(G,A))), rounded up."""
    eps = Fraction(eps)
    kG = family_constant(internal_hom(G, G))
    count = bar_count(homology_barcode(internal_hom(G, A)), 2 * eps)
    return math.ceil(kG * count)


def retract_cone_length_over(A: FilteredComplex, G: FilteredComplex, eps,
                             budget: int = 6, node_cap: int = 200000
                             ) -> tuple[int, Optional[int]]:
    """Certified bracket (lower, upper) for the weighted retract cone-length
    N^r(A; G, eps).  The upper bound comes from the brute-force decomposition
    search within ``budget`` steps and may be None (unknown)."""
    lower = retract_cone_length_lower(A, G, eps)
    target = homology_barcode(A)
    upper = min_cone_decomposition(target, [G], eps, budget, metric="retract",
                                   node_cap=node_cap)
    return lower, upper


# -- brute-force decomposition search ----------------------------------------

def _barcode_key(B: Barcode):
    return tuple(sorted((b.birth, b.death, b.degree) for b in B.bars))


def _zero_complex(modulus: int, cohomological: bool) -> FilteredComplex:
    return FilteredComplex((), {}, modulus, cohomological)


def _chain_map_classes(F: FilteredComplex, X: FilteredComplex) -> list[dict[int, int]]:
    """Representatives of homotopy classes of shift-<=0 chain maps F -> X:
    cycles of hom(F,X) at level <= 0 modulo boundaries of level <= 0."""
    H = internal_hom(F, X)
    idx = [k for k in range(H.dim()) if H.gens[k].level <= 0 and
           (H.gens[k].degree % H.modulus == 0 if H.modulus else H.gens[k].degree == 0)]
    cycles = _cycle_basis(H, idx)
    # boundaries at level <= 0 in degree 0
    bnd = [H.dmat[k] for k in range(H.dim())
           if H.gens[k].level <= 0 and H.dmat[k] and _deg_match(H, k, 0)]
    combined = _echelon(bnd)
    quotient_basis: list[int] = []
    for v in cycles:
        red = _reduce_against(v, combined)
        if red:
            quotient_basis.append(red)
            combined.append(red)
    maps = []
    for bits in range(1 << len(quotient_basis)):
        v = 0
        for t in range(len(quotient_basis)):
            if (bits >> t) & 1:
                v ^= quotient_basis[t]
        # hom generator k encodes the elementary map gen_{k // dim D} -> gen_{k % dim D}
        mat: dict[int, int] = {}
        for k in _indices(v):
            i, j = divmod(k, X.dim())
            mat[i] = mat.get(i, 0) | (1 << j)
        maps.append(mat)
    return maps


def _echelon(vectors: list[int]) -> list[int]:
    basis = []
    for v in vectors:
        v = _reduce_against(v, basis)
        if v:
            basis.append(v)
            basis.sort(key=int.bit_length, reverse=True)
    return basis


def _reduce_against(v: int, basis: list[int]) -> int:
    changed = True
    while v and changed:
        changed = False
        for b in basis:
            if b and v.bit_length() == b.bit_length():
                v ^= b
                changed = True
    return v


def min_cone_decomposition(target: Barcode, family: Sequence[FilteredComplex],
                           eps, max_steps: int, metric: str = "retract",
                           node_cap: int = 200000, tensor_rank: int = 1
                           ) -> Optional[int]:
    """Minimal number of weight-0 cone attachments over shifts/translates of
    ``family`` members needed to reach within eps of ``target`` (d_rint for
    metric="retract", d_int for metric="interleaving"), or None if not found
    within ``max_steps``.  Exhaustive over homotopy classes of attaching maps
    with shifts drawn from the level differences of the instance.

    ``tensor_rank`` > 1 enables the tensor linearization: each step may
    attach a cone over a direct sum of up to that many shifted/translated
    copies of a single family member (i.e. F tensor V for a small filtered
    graded vector space V)."""
    eps = Fraction(eps)
    modulus = family[0].modulus
    cohom = family[0].cohomological
    dist: Callable = retract_interleaving if metric == "retract" else interleaving_distance

    t_ends = [b.birth for b in target.bars] + [b.death for b in target.bars if not b.infinite]
    if not t_ends:
        t_ends = [Fraction(0)]
    shifts = set()
    for F in family:
        f_levels = [g.level for g in F.gens] or [Fraction(0)]
        for te in t_ends:
            for fl in f_levels:
                shifts.add(te - fl)
    t_degs = set(b.degree for b in target.bars) or {0}
    translations = set()
    for F in family:
        f_degs = set(g.degree for g in F.gens) or {0}
        for td in t_degs:
            for fd in f_degs:
                translations.add(td - fd)
                translations.add(td - fd - 1)
                translations.add(td - fd + 1)
    if modulus:
        translations = {t % modulus for t in translations}

    pieces = []
    for F in family:
        for t in sorted(translations):
            for alpha in sorted(shifts):
                pieces.append((id(F), alpha, t, shift_translate(F, alpha, t)))
    attachables = [p[3] for p in pieces]
    if tensor_rank > 1:
        import itertools as _it

        by_family: dict[int, list[FilteredComplex]] = {}
        for fid, alpha, t, Ft in pieces:
            by_family.setdefault(fid, []).append(Ft)
        for fid, opts in by_family.items():
            for r in range(2, tensor_rank + 1):
                for combo in _it.combinations_with_replacement(opts, r):
                    attachables.append(direct_sum(*combo))

    start = _zero_complex(modulus, cohom)
    frontier: list[FilteredComplex] = [start]
    seen = {_barcode_key(homology_barcode(start))}
    nodes = 0
    if dist(target, homology_barcode(start)) <= eps:
        return 0
    for depth in range(1, max_steps + 1):
        nxt: list[FilteredComplex] = []
        for X in frontier:
            for Ft in attachables:
                for mat in _chain_map_classes(Ft, X):
                    nodes += 1
                    if nodes > node_cap:
                        return None
                    fmap = FilteredMap(Ft, X, mat, shift=0, validate=False)
                    Y = cone(fmap, 0)
                    key = _barcode_key(homology_barcode(Y))
                    if key in seen:
                        continue
                    seen.add(key)
                    if dist(target, homology_barcode(Y)) <= eps:
                        return depth
                    nxt.append(Y)
        frontier = nxt
        if not frontier:
            return None
    return None


# -- stability reduction -------------------------------------------------------

def stability_reduce(C: FilteredComplex, dprime: dict[int, Iterable[int]], delta,
                     eps=None) -> tuple[FilteredComplex, tuple[int, int]]:
    """Given D = d + D' with d = C's differential, d^2 = 0 = D^2 and D'
    dropping filtration by >= delta, eliminate the short d-pairs via
    a0' = a0 + D'(b0).  Pairs of gap <= eps are eliminated when eps < delta
    is supplied; by default everything with gap < delta goes.  Returns the
    filtration-preserving retract (with its full differential D) and the
    (before, after) dimensions."""
    delta = Fraction(delta)
    if eps is not None:
        eps = Fraction(eps)
        if not (0 <= eps < delta):
            raise ValueError("eps must satisfy 0 <= eps < delta")
    n = C.dim()
    Dp = [0] * n
    for i, rows in dprime.items():
        Dp[i] = _bits(rows)
    for i in range(n):
        li = C.gens[i].level
        for j in _indices(Dp[i]):
            if C.gens[j].level > li - delta:
                raise ValueError("D' does not drop filtration by delta")
    D = [C.dmat[i] ^ Dp[i] for i in range(n)]
    for i in range(n):
        acc = 0
        for j in _indices(D[i]):
            acc ^= D[j]
        if acc:
            raise ValueError("(d + D')^2 != 0")

    # change to the d-elementary basis
    dec = decompose_elementary(C)
    new_basis: list[tuple[str, int, Fraction, int]] = []  # name, vec, level, degree
    d_elem: dict[int, list[int]] = {}
    for k, (a_vec, b_vec, va, vb, deg) in enumerate(dec.pairs):
        ia = len(new_basis)
        new_basis.append((f"p{k}_a", a_vec, va, deg))
        ib = len(new_basis)
        new_basis.append((f"p{k}_b", b_vec, vb, deg - C.d_degree))
        d_elem[ib] = [ia]
    for k, (c_vec, vc, deg) in enumerate(dec.singles):
        new_basis.append((f"s{k}", c_vec, vc, deg))
    cols = [vec for _, vec, _, _ in new_basis]
    inv = _invert_gf2(cols, n)

    def to_new(vec: int) -> int:
        acc = 0
        for i in _indices(vec):
            acc ^= inv[i]
        return acc

    m = len(new_basis)
    D_new = [0] * m
    for j, (_, vec, _, _) in enumerate(new_basis):
        img = 0
        for i in _indices(vec):
            img ^= D[i]
        D_new[j] = to_new(img)
    d_new = [0] * m
    for j, rows in d_elem.items():
        d_new[j] = _bits(rows)
    levels = [lv for _, _, lv, _ in new_basis]
    degrees = [dg for _, _, _, dg in new_basis]
    names = [nm for nm, _, _, _ in new_basis]
    alive = list(range(m))
    pair_list = []
    for k in range(len(dec.pairs)):
        pair_list.append((2 * k, 2 * k + 1))  # (a index, b index) in new basis

    def eliminate(ia: int, ib: int):
        """Cancel the D-pair (a' = D(b), b) from the alive complex."""
        nonlocal D_new
        # j1: for x with <D x, a> = 1, send x to x + b; then D stays within
        # the complement; p1 projection: drop coordinates a and b after
        # substituting a -> D'(b) (i.e. a' -> 0).
        a_mask = 1 << ia
        b_mask = 1 << ib
        Db = D_new[ib]  # = a' in new coordinates (contains a + lower)
        for x in alive:
            if x in (ia, ib):
                continue
            if (D_new[x] >> ia) & 1:
                # x -> x + b changes D x by D b
                D_new[x] ^= Db
        # now no alive x (other than b) hits a; remove a, b
        alive.remove(ia)
        alive.remove(ib)
        for x in alive:
            assert not (D_new[x] & (a_mask | b_mask))

    def is_short(gap) -> bool:
        return gap <= eps if eps is not None else gap < delta

    changed = True
    while changed:
        changed = False
        best = None
        for (ia, ib) in pair_list:
            if ia in alive and ib in alive:
                gap = levels[ib] - levels[ia]
                if is_short(gap) and (best is None or gap < best[0]):
                    best = (gap, ia, ib)
        if best is not None:
            _, ia, ib = best
            eliminate(ia, ib)
            changed = True

    remap = {old: new for new, old in enumerate(alive)}
    gens = [Gen(names[i], degrees[i], levels[i]) for i in alive]
    diff: dict[int, int] = {}
    for old in alive:
        mask = 0
        for j in _indices(D_new[old]):
            if j in remap:
                mask |= 1 << remap[j]
            else:
                raise AssertionError("differential leaks outside the retract")
        diff[remap[old]] = mask
    retract = FilteredComplex(gens, diff, C.modulus, C.cohomological)
    return retract, (n, retract.dim())


def full_differential(C: FilteredComplex, dprime: dict[int, Iterable[int]]) -> FilteredComplex:
    """The complex (C, d + D') as a FilteredComplex."""
    n = C.dim()
    diff = {}
    for i in range(n):
        extra = dprime.get(i, 0)
        diff[i] = C.dmat[i] ^ _bits(extra)
    return FilteredComplex(C.gens, diff, C.modulus, C.cohomological)


# -- reach gap ----------------------------------------------------------------

def reach_gap(w_vec: int, level_r, f: FilteredMap):
    """R(w, f) = inf{s >= r : class of w at level s lies in image H(f)_s}.

    ``w_vec`` is a cycle of f.target given as a bitmask, ``level_r`` its
    level.  Solves f(v) + d u = w with v a cycle of the source sublevel
    complex and u in the target sublevel, at each critical level."""
    r = Fraction(level_r)
    T, S = f.target, f.source
    if T.d_of(w_vec):
        raise ValueError("w is not a cycle")
    levels = sorted(set([g.level for g in S.gens] + [g.level for g in T.gens] + [r]))
    levels = [s for s in levels if s >= r]
    for s in levels:
        src_idx = [i for i in range(S.dim()) if S.gens[i].level <= s]
        tgt_idx = [i for i in range(T.dim()) if T.gens[i].level <= s]
        cyc = _cycle_basis(S, src_idx)
        span = [f.apply(v) for v in cyc] + [T.dmat[i] for i in tgt_idx if T.dmat[i]]
        # is w in the span?
        basis = _echelon(span)
        if not _reduce_against(w_vec, basis):
            return s
    return INF
