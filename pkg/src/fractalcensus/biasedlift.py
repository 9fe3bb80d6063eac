"""Lift matroids of biased graphs over the doubled-cycle class.

The graphs here come in three shapes: a single vertex carrying loops, two
vertices joined by up to four edges (plus loops), and a cycle of length at
least three in which each edge may be doubled into a parallel pair (plus
loops).  A biased graph designates some cycles balanced, subject to the
linear-class condition: no theta subgraph contains exactly two balanced
cycles.  The lift matroid has a circuit for every balanced cycle, every
theta whose three cycles are all unbalanced, and every pair of unbalanced
cycles meeting in at most one vertex.

Spikes are lifts over the fully doubled cycle with a balanced class of
Hamiltonian cycles, encoded as pick vectors (one bit per pair).  On top of
the constructions this module carries the membership machinery for the
spike-minor classes: category classification against generated catalogs,
exact and stratified censuses, trun-signature isomorphism for large-rank
lifts, and the composition-driven excluded-minor generator.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Iterable, Iterator

import numpy as np

from .kernel import (
    MAX_GROUND,
    MalformedDocument,
    Matroid,
    MatroidError,
    OutOfRange,
    RankedFlat,
    direct_sum,
    is_excluded_minor,
    relabel,
    uniform,
)
from .sparsepaving import (
    CompositionSolution,
    NotASolution,
    TooSmall,
    _canonical_cells,
)

SINGLE = "single"
TWO = "two"
CYCLE = "cycle"
_KINDS = (SINGLE, TWO, CYCLE)


class InvalidGraph(MatroidError):
    """Shape parameters outside the three supported graph kinds."""


class InvalidLinearClass(MatroidError):
    """Balanced-cycle family violating the theta condition."""


class TooLarge(MatroidError):
    """Requested computation above the supported size bounds."""


class PremiseViolated(MatroidError):
    """Contraction-recovery input does not match the declared graph."""


class TooLargeForExact(MatroidError):
    """Exact category classification is capped at 14 elements."""


class TooLargeForFull(MatroidError):
    """Full kernel excluded-minor verification is capped at 14 elements."""


class HypothesisViolated(MatroidError):
    """Trun-signature machinery needs rank >= 5 and >= 2 members."""


class OddSize(MatroidError):
    """Strata census rows are defined for even sizes only."""


# -- graphs -------------------------------------------------------------------


@dataclass(frozen=True)
class GGraph:
    """Graph shape: ``t`` parallel pairs, ``s`` thin edges, ``p`` loops.

    Edge labels are positional: pair i occupies labels (2i, 2i+1), thins
    follow at 2t..2t+s-1, loops last.  For the cycle kind the rim order is
    pairs first, thins after; the order never changes the lift matroid, so
    one fixed layout loses nothing.  Loops sit on an arbitrary vertex for
    the same reason.
    """

    kind: str
    t: int
    s: int
    p: int

    @property
    def n(self) -> int:
        return 2 * self.t + self.s + self.p

    @property
    def vertex_count(self) -> int:
        if self.kind == SINGLE:
            return 1
        if self.kind == TWO:
            return 2
        return self.t + self.s

    @property
    def joining(self) -> int:
        """Number of non-loop edges."""
        return 2 * self.t + self.s

    def thins_mask(self) -> int:
        return ((1 << self.s) - 1) << (2 * self.t)

    def loops_mask(self) -> int:
        return ((1 << self.p) - 1) << self.joining


def validate_ggraph(g: GGraph) -> GGraph:
    if g.kind not in _KINDS:
        raise InvalidGraph(f"unknown graph kind {g.kind!r}")
    if g.t < 0 or g.s < 0 or g.p < 0:
        raise InvalidGraph("negative shape parameter")
    if g.kind == SINGLE and (g.t or g.s):
        raise InvalidGraph("single-vertex graphs carry loops only")
    if g.kind == TWO and not 1 <= g.joining <= 4:
        raise InvalidGraph(f"two-vertex graphs need 1..4 joining edges, got {g.joining}")
    if g.kind == CYCLE and g.t + g.s < 3:
        raise InvalidGraph(f"cycle graphs need rim length >= 3, got {g.t + g.s}")
    return g


def ggraph(kind: str, t: int, s: int, p: int) -> GGraph:
    return validate_ggraph(GGraph(kind, t, s, p))


def _pair_mask(i: int) -> int:
    return 0b11 << (2 * i)


def _ham_mask(g: GGraph, pick: int) -> int:
    """Edge mask of the Hamiltonian cycle choosing side ``pick`` per pair."""
    m = g.thins_mask()
    for i in range(g.t):
        m |= 1 << (2 * i + (pick >> i & 1))
    return m


def _pick_of_ham(g: GGraph, mask: int) -> int | None:
    """Inverse of :func:`_ham_mask`, or None when mask is not a Hamiltonian."""
    if mask & g.loops_mask() or (mask & g.thins_mask()) != g.thins_mask():
        return None
    pick = 0
    for i in range(g.t):
        sub = mask >> (2 * i) & 0b11
        if sub == 0b10:
            pick |= 1 << i
        elif sub != 0b01:
            return None
    return pick


def cycles_of(g: GGraph) -> tuple[int, ...]:
    """Edge masks of all cycles, ascending."""
    validate_ggraph(g)
    out = [1 << e for e in range(g.joining, g.n)]
    if g.kind == TWO:
        out += [(1 << x) | (1 << y) for x, y in combinations(range(g.joining), 2)]
    elif g.kind == CYCLE:
        out += [_pair_mask(i) for i in range(g.t)]
        out += [_ham_mask(g, pick) for pick in range(1 << g.t)]
    return tuple(sorted(out))


def _cycle_vertexmask(g: GGraph, cmask: int) -> int:
    if g.kind == SINGLE:
        return 1
    if g.kind == TWO:
        return 1 if cmask & g.loops_mask() else 0b11
    if cmask & g.loops_mask():
        return 1
    rim = g.t + g.s
    for i in range(g.t):
        if cmask == _pair_mask(i):
            return (1 << i) | (1 << (i + 1) % rim)
    return (1 << rim) - 1


# -- linear classes -----------------------------------------------------------


@dataclass(frozen=True)
class LinearClass:
    """Balanced cycles as a sorted tuple of edge masks."""

    members: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def linear_class(members: Iterable[int]) -> LinearClass:
    return LinearClass(tuple(sorted(set(int(m) for m in members))))


def ham_class(g: GGraph, picks: Iterable[int]) -> LinearClass:
    """Linear class of Hamiltonian cycles given by pick vectors."""
    return linear_class(_ham_mask(g, pick) for pick in picks)


def validate_linear_class(g: GGraph, cls: LinearClass) -> LinearClass:
    """Check membership in the cycle set plus the theta condition.

    Only the balance structure is validated here; category-specific shape
    restrictions (Hamiltonian-only members, edge-disjointness, the one-loop
    cap) belong to the catalog builders that need them.
    """
    validate_ggraph(g)
    if g.kind == CYCLE:
        bal_pairs = set()
        ham_picks = set()
        for m in cls.members:
            if m.bit_count() == 1 and m & g.loops_mask():
                continue
            if m.bit_count() == 2 and any(m == _pair_mask(i) for i in range(g.t)):
                bal_pairs.add((m.bit_length() - 1) // 2)
                continue
            pick = _pick_of_ham(g, m)
            if pick is None:
                raise InvalidLinearClass(f"member {m:#x} is not a cycle")
            ham_picks.add(pick)
        # theta = Hamiltonian plus the other edge of one pair; its cycles are
        # the two picks at distance one and the pair itself
        for h1, h2 in combinations(sorted(ham_picks), 2):
            d = h1 ^ h2
            if d.bit_count() == 1 and (d.bit_length() - 1) not in bal_pairs:
                raise InvalidLinearClass(
                    f"picks {h1:#x} and {h2:#x} differ in a single pair"
                )
        for i in bal_pairs:
            for h in ham_picks:
                if h ^ (1 << i) not in ham_picks:
                    raise InvalidLinearClass(
                        f"balanced pair {i} needs picks closed under flipping it"
                    )
        return cls
    allowed = set(cycles_of(g))
    for m in cls.members:
        if m not in allowed:
            raise InvalidLinearClass(f"member {m:#x} is not a cycle")
    if g.kind == TWO:
        bal = set(cls.members)
        for x, y, z in combinations(range(g.joining), 3):
            trio = (1 << x | 1 << y, 1 << x | 1 << z, 1 << y | 1 << z)
            if sum(c in bal for c in trio) == 2:
                raise InvalidLinearClass("theta with exactly two balanced cycles")
    return cls


# -- lift assembly --------------------------------------------------------------


def lift_circuits(g: GGraph, cls: LinearClass) -> tuple[int, ...]:
    """Circuit masks from the three clauses: balanced cycles, all-unbalanced
    thetas, and near-disjoint pairs of unbalanced cycles."""
    bal = set(cls.members)
    out = set(bal)
    loops = [1 << e for e in range(g.joining, g.n)]
    unb_loops = [l for l in loops if l not in bal]
    for l1, l2 in combinations(unb_loops, 2):
        out.add(l1 | l2)
    if g.kind == TWO:
        subs = [(1 << x) | (1 << y) for x, y in combinations(range(g.joining), 2)]
        unb_subs = [m for m in subs if m not in bal]
        for x, y, z in combinations(range(g.joining), 3):
            trio = (1 << x | 1 << y, 1 << x | 1 << z, 1 << y | 1 << z)
            if not any(c in bal for c in trio):
                out.add(1 << x | 1 << y | 1 << z)
        for l in unb_loops:
            for m in unb_subs:
                out.add(l | m)
    elif g.kind == CYCLE:
        pair2 = [_pair_mask(i) for i in range(g.t)]
        hams = [_ham_mask(g, pick) for pick in range(1 << g.t)]
        unb_pairs = [m for m in pair2 if m not in bal]
        unb_hams = [h for h in hams if h not in bal]
        for i in range(g.t):
            for pick in range(1 << g.t):
                if pick >> i & 1:
                    continue
                trio = (pair2[i], hams[pick], hams[pick | 1 << i])
                if not any(c in bal for c in trio):
                    out.add(trio[1] | trio[2])
        # unbalanced cycle pairs: any two pair-cycles share at most a rim
        # vertex, loops share at most the host; Hamiltonians meet everything
        # else in two or more vertices except loops
        for m1, m2 in combinations(unb_pairs, 2):
            out.add(m1 | m2)
        for l in unb_loops:
            for m in unb_pairs:
                out.add(l | m)
            for h in unb_hams:
                out.add(l | h)
    return tuple(sorted(out))


def _popcounts(n: int) -> "np.ndarray":
    counts = np.zeros(1, dtype=np.uint8)
    for _ in range(n):
        counts = np.concatenate([counts, counts + 1])
    return counts


def _matroid_from_circuits(n: int, r: int, circuits: tuple[int, ...]) -> Matroid:
    """Assemble bases by up-closing the circuit masks over all subsets."""
    if n > MAX_GROUND:
        raise TooLarge(f"ground size {n} above {MAX_GROUND}")
    dep = np.zeros(1 << n, dtype=bool)
    if circuits:
        dep[list(circuits)] = True
    for e in range(n):
        half = dep.reshape(-1, 2, 1 << e)
        half[:, 1, :] |= half[:, 0, :]
    indep = ~dep
    counts = _popcounts(n)
    top = int(counts[indep].max())
    if top != r:
        raise MatroidError(
            f"circuit clauses give rank {top} but the vertex count says {r}"
        )
    bases = np.flatnonzero(indep & (counts == r))
    return Matroid(n, r, tuple(int(b) for b in bases))


def lift_matroid(g: GGraph, cls: LinearClass) -> Matroid:
    """Lift matroid of the biased graph (g, cls)."""
    validate_ggraph(g)
    if g.n > MAX_GROUND:
        raise TooLarge(f"ground size {g.n} above {MAX_GROUND}")
    validate_linear_class(g, cls)
    all_cycles = cycles_of(g)
    balanced_graph = len(set(cls.members)) == len(all_cycles)
    r = g.vertex_count - (1 if balanced_graph else 0)
    return _matroid_from_circuits(g.n, r, lift_circuits(g, cls))


def cycle_matroid(g: GGraph) -> Matroid:
    """Graphic matroid of the shape: every cycle is a circuit."""
    validate_ggraph(g)
    if g.n > MAX_GROUND:
        raise TooLarge(f"ground size {g.n} above {MAX_GROUND}")
    return _matroid_from_circuits(g.n, g.vertex_count - 1, cycles_of(g))


# -- spikes ---------------------------------------------------------------------


@dataclass(frozen=True)
class SpikeSpec:
    """Doubled-cycle lift description: rank t and sorted pick vectors."""

    t: int
    picks: tuple[int, ...]


def _check_picks(t: int, picks: tuple[int, ...]) -> tuple[int, ...]:
    full = (1 << t) - 1
    for p in picks:
        if p < 0 or p > full:
            raise OutOfRange(f"pick {p:#x} outside {t} pairs")
    if len(picks) > 1 << max(t - 1, 0):
        raise InvalidLinearClass(f"{len(picks)} picks exceed the distance bound")
    for p1, p2 in combinations(picks, 2):
        if (p1 ^ p2).bit_count() < 2:
            raise InvalidLinearClass(
                f"picks {p1:#x} and {p2:#x} differ in fewer than two pairs"
            )
    return picks


def _parse_pick(t: int, value) -> int:
    if isinstance(value, str):
        if len(value) != t or set(value) - {"0", "1"}:
            raise OutOfRange(f"pick string {value!r} is not {t} binary digits")
        return sum(1 << i for i, ch in enumerate(value) if ch == "1")
    return int(value)


def pick_string(t: int, pick: int) -> str:
    return "".join("1" if pick >> i & 1 else "0" for i in range(t))


def spike_spec(t: int, picks: Iterable) -> SpikeSpec:
    if t < 3:
        raise TooSmall(f"spike rank {t} below 3")
    cleaned = tuple(sorted(set(_parse_pick(t, p) for p in picks)))
    return SpikeSpec(t, _check_picks(t, cleaned))


def spike_from_spec(spec: SpikeSpec) -> Matroid:
    g = ggraph(CYCLE, spec.t, 0, 0)
    return lift_matroid(g, ham_class(g, spec.picks))


def spike(t: int, picks: Iterable) -> Matroid:
    """Lift over the fully doubled t-cycle with the given balanced picks."""
    return spike_from_spec(spike_spec(t, picks))


def dual_picks(picks: Iterable[int], t: int) -> tuple[int, ...]:
    """Complementary pick vectors: flip the choice at every pair."""
    full = (1 << t) - 1
    return tuple(sorted(int(p) ^ full for p in picks))


def dual_spec(spec: SpikeSpec) -> SpikeSpec:
    return SpikeSpec(spec.t, dual_picks(spec.picks, spec.t))


def duality_check(spec: SpikeSpec) -> bool:
    """Dual of a spike equals the spike on complementary picks, on the nose."""
    return spike_from_spec(spec).dual() == spike_from_spec(dual_spec(spec))


def spike_cyclic_flats(spec: SpikeSpec) -> list[RankedFlat]:
    """Closed-form cyclic flats: ground set, empty set, each balanced
    Hamiltonian at corank one, and every union of 2..t-2 parallel pairs."""
    t = spec.t
    g = ggraph(CYCLE, t, 0, 0)
    out = [RankedFlat(0, 0), RankedFlat((1 << 2 * t) - 1, t)]
    for pick in spec.picks:
        out.append(RankedFlat(_ham_mask(g, pick), t - 1))
    for q in range(2, t - 1):
        for combo in combinations(range(t), q):
            out.append(RankedFlat(sum(_pair_mask(i) for i in combo), q + 1))
    return sorted(out, key=lambda rf: (rf.rank, rf.flat))


def lift_from_contraction(M: Matroid, e: int, g: GGraph) -> tuple[GGraph, LinearClass]:
    """Recover M as a lift when contracting e leaves the cycle matroid of g.

    The new loop takes the last label; graph label j maps back to element
    j (or j+1 past e) of M, so ``relabel`` with that alignment reproduces M
    bit-exactly.
    """
    validate_ggraph(g)
    if not 0 <= e < M.n:
        raise OutOfRange(f"element {e} not within ground set")
    if g.n != M.n - 1 or M.contract(e) != cycle_matroid(g):
        raise PremiseViolated("contraction does not match the cycle matroid")
    circuits = set(M.circuits().members)
    low = (1 << e) - 1
    members = []
    for c in cycles_of(g):
        if (c & low) | (c & ~low) << 1 in circuits:
            members.append(c)
    g2 = GGraph(g.kind, g.t, g.s, g.p + 1)
    cls = LinearClass(tuple(sorted(members)))
    perm = [j if j < e else j + 1 for j in range(M.n - 1)] + [e]
    if relabel(lift_matroid(g2, cls), perm) != M:
        raise PremiseViolated("recovered lift does not reproduce the matroid")
    return g2, cls


# -- trun signatures ------------------------------------------------------------


@dataclass(frozen=True)
class GlanceKey:
    """Isomorphism key for large-rank doubled-cycle lifts: loop count, thin
    count, and the canonical trun cell vector."""

    p: int
    s: int
    sig: tuple[int, ...]


def _glance_parts(desc) -> tuple[int, int, int, tuple[int, ...]]:
    if isinstance(desc, SpikeSpec):
        return desc.t, 0, 0, desc.picks
    t, s, p, picks = desc
    cleaned = tuple(sorted(set(_parse_pick(t, x) for x in picks)))
    return t, s, p, _check_picks(t, cleaned)


def glance_signature(desc) -> GlanceKey:
    """Key for a SpikeSpec or a (t, s, p, picks) lift description.

    The signature is the lexicographically least cell vector of the
    truncated intersection pattern over all orderings of the picks; two
    descriptions with rank >= 5 give isomorphic lifts exactly when their
    keys agree.
    """
    t, s, p, picks = _glance_parts(desc)
    r = t + s
    m = len(picks)
    if r < 5 or m < 2:
        raise HypothesisViolated(f"need rank >= 5 and >= 2 picks, got ({r}, {m})")
    # two distance-two picks force t >= 2, so the loops-only corner with
    # p >= 1 and t = 0 cannot arise here
    assert t >= 2
    ncells = 1 << (m - 1)
    best = None
    for last in range(m):
        others = [i for i in range(m) if i != last]
        cells = [0] * ncells
        for j in range(t):
            side = picks[last] >> j & 1
            pattern = 0
            for pos, i in enumerate(others):
                if picks[i] >> j & 1 == side:
                    pattern |= 1 << pos
            cells[pattern] += 1
        cells[ncells - 1] += s
        cand = _canonical_cells(tuple(cells), m - 1)
        if best is None or cand < best:
            best = cand
    return GlanceKey(p, s, best)


def glance_isomorphic(d1, d2) -> bool:
    return glance_signature(d1) == glance_signature(d2)


# -- composition machinery for trun orbits ---------------------------------------


@lru_cache(maxsize=None)
def _trun_pair_selectors(m: int) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Per cell, the indices of ordered-pair distances it contributes to.

    Pairs are (i, j) over the truncated indices plus (i, last); a cell
    splits (i, j) when exactly one of the bits is set and (i, last) when
    bit i is clear.
    """
    idxpairs = list(combinations(range(m - 1), 2)) + [(i, m) for i in range(m - 1)]
    rows = []
    for cell in range(1 << (m - 1)):
        hit = []
        for pi, (i, j) in enumerate(idxpairs):
            if j == m:
                if not cell >> i & 1:
                    hit.append(pi)
            elif (cell >> i ^ cell >> j) & 1:
                hit.append(pi)
        rows.append(tuple(hit))
    return tuple(rows), len(idxpairs)


@lru_cache(maxsize=None)
def _trun_perm_maps(m: int) -> tuple[tuple[int, ...], ...]:
    """Cell-index gather tables realizing every reordering of m picks.

    Reordering the picks permutes trun cells: with new last pick l, a cell
    I maps to the agreement pattern against l, pulled back through the
    permutation.  Tables satisfy new_vec[J] = old_vec[tab[J]].
    """
    ncells = 1 << (m - 1)
    tabs = []
    for sigma in permutations(range(m)):
        last = sigma[m - 1]
        tab = [0] * ncells
        for cell in range(ncells):
            def val(u: int) -> int:
                return 0 if u == m - 1 or cell >> u & 1 else 1
            vl = val(last)
            target = 0
            for pos in range(m - 1):
                if val(sigma[pos]) == vl:
                    target |= 1 << pos
            tab[target] = cell
        tabs.append(tuple(tab))
    return tuple(tabs)


def _trun_vectors(total: int, m: int) -> list[tuple[int, ...]]:
    """Cell vectors with the given total whose pairwise distances all reach 2."""
    rows, npairs = _trun_pair_selectors(m)
    ncells = 1 << (m - 1)
    # suffix aids for pruning: which pairs any later cell can still feed,
    # and the largest number of pairs a later cell feeds at once
    suffix_mask = [0] * (ncells + 1)
    suffix_width = [0] * (ncells + 1)
    for pos in range(ncells - 1, -1, -1):
        pm = 0
        for pi in rows[pos]:
            pm |= 1 << pi
        suffix_mask[pos] = suffix_mask[pos + 1] | pm
        suffix_width[pos] = max(suffix_width[pos + 1], len(rows[pos]))
    deficits = [2] * npairs
    out: list[tuple[int, ...]] = []
    cells = [0] * ncells

    def rec(pos: int, rest: int, need_mask: int, need_sum: int) -> None:
        if need_mask & ~suffix_mask[pos]:
            return
        if need_sum > rest * suffix_width[pos]:
            return
        saved = [deficits[pi] for pi in rows[pos]]
        if pos == ncells - 1:
            remaining = need_sum
            for pi in rows[pos]:
                drop = min(rest, deficits[pi])
                deficits[pi] -= drop
                remaining -= drop
            if remaining == 0:
                cells[pos] = rest
                out.append(tuple(cells))
                cells[pos] = 0
        else:
            for v in range(rest + 1):
                if v:
                    for pi in rows[pos]:
                        if deficits[pi] > 0:
                            deficits[pi] -= 1
                            need_sum -= 1
                            if deficits[pi] == 0:
                                need_mask &= ~(1 << pi)
                cells[pos] = v
                rec(pos + 1, rest - v, need_mask, need_sum)
            cells[pos] = 0
        for pi, old in zip(rows[pos], saved):
            deficits[pi] = old

    rec(0, total, (1 << npairs) - 1, 2 * npairs)
    return out


@lru_cache(maxsize=None)
def _trun_orbits(t: int, m: int) -> tuple[tuple[int, ...], ...]:
    """Canonical trun cell vectors with total t over subsets of m-1 indices."""
    if m < 2:
        raise ValueError("orbit enumeration needs at least two picks")
    vectors = _trun_vectors(t, m)
    if not vectors:
        return ()
    arr = np.array(vectors, dtype=np.uint8)
    best = arr.copy()
    rowidx = np.arange(len(arr))
    for tab in _trun_perm_maps(m)[1:]:
        cand = arr[:, tab]
        neq = cand != best
        first = neq.argmax(axis=1)
        better = neq.any(axis=1) & (cand[rowidx, first] < best[rowidx, first])
        if better.any():
            best[better] = cand[better]
    uniq = np.unique(best, axis=0)
    return tuple(tuple(int(v) for v in row) for row in uniq)


def _family_from_cells(cells: tuple[int, ...], m: int) -> tuple[int, ...]:
    """Witness pick family realizing a trun cell vector (last pick all-zero)."""
    picks = [0] * m
    pos = 0
    for cellmask, cnt in enumerate(cells):
        for _ in range(cnt):
            for i in range(m - 1):
                if not cellmask >> i & 1:
                    picks[i] |= 1 << pos
            pos += 1
    return tuple(picks)


# -- category catalogs -----------------------------------------------------------


@dataclass(frozen=True)
class Category:
    tag: str


_CATALOG_N_CAP = 14
_CATALOG_K_CAP = 6


def _invariant_key(m: Matroid) -> tuple:
    return (m.r, len(m.bases), tuple(sorted(m.basis_degrees())))


def _bucket_new(buckets: dict, m: Matroid) -> bool:
    reps = buckets.setdefault(_invariant_key(m), [])
    if any(m.is_isomorphic(rep) for rep in reps):
        return False
    reps.append(m)
    return True


def _cycle_shapes(n: int) -> Iterator[tuple[int, int, int]]:
    for t in range(n // 2 + 1):
        for s in range(n - 2 * t + 1):
            p = n - 2 * t - s
            if t + s >= 3:
                yield t, s, p


def _catalog_a(n: int, k: int) -> Iterator[Matroid]:
    for t, s, p in _cycle_shapes(n):
        g = GGraph(CYCLE, t, s, p)
        families: list[tuple[int, ...]] = [()]
        if k >= 1:
            families.append((0,))
        for m in range(2, k + 1):
            if t < 2:
                break
            families += [_family_from_cells(c, m) for c in _trun_orbits(t, m)]
        for picks in families:
            yield lift_matroid(g, ham_class(g, picks))


def _catalog_b(n: int, k: int) -> Iterator[Matroid]:
    for j in range(1, min(4, n) + 1):
        g = GGraph(TWO, 0, j, n - j)
        disjoint = (0b11, 0b1100)
        for b in range(min(k, j // 2) + 1):
            yield lift_matroid(g, LinearClass(disjoint[:b]))


def _catalog_c(n: int, k: int) -> Iterator[Matroid]:
    if n == 0:
        yield lift_matroid(GGraph(SINGLE, 0, 0, 0), LinearClass(()))
        return
    g = GGraph(SINGLE, 0, 0, n)
    for b in range(min(k, 1) + 1):
        yield lift_matroid(g, LinearClass((1,)[:b]))


def _catalog_d(n: int) -> Iterator[Matroid]:
    yield cycle_matroid(GGraph(SINGLE, 0, 0, n))
    for j in range(1, min(4, n) + 1):
        yield cycle_matroid(GGraph(TWO, 0, j, n - j))
    for t, s, p in _cycle_shapes(n):
        yield cycle_matroid(GGraph(CYCLE, t, s, p))


def _catalog_f(n: int) -> Iterator[Matroid]:
    for q in range(n // 2 + 1):
        for c in range(n - 2 * q + 1):
            m = uniform(0, n - 2 * q - c)
            m = direct_sum(m, uniform(c, c))
            for _ in range(q):
                m = direct_sum(m, uniform(1, 2))
            yield m


@lru_cache(maxsize=None)
def _category_catalog(n: int, k: int) -> dict[str, dict]:
    """Members of each category at size n, deduplicated within category."""
    catalog: dict[str, dict] = {tag: {} for tag in "ABCDEF"}
    for tag, gen in (
        ("A", _catalog_a(n, k)),
        ("B", _catalog_b(n, k)),
        ("C", _catalog_c(n, k)),
        ("D", _catalog_d(n)),
        ("F", _catalog_f(n)),
    ):
        for m in gen:
            _bucket_new(catalog[tag], m)
    for key, reps in catalog["D"].items():
        for m in reps:
            _bucket_new(catalog["E"], m.dual())
    return catalog


def categorize(m: Matroid, k: int) -> Category | None:
    """First category tag whose generated members contain m, else None.

    Classification is generate-and-test against the catalogs, so a result
    of None is a certificate that m lies outside the class for this bound.
    Catalogs are cached per (size, bound); the very largest combination
    (14 elements with bound 6) takes a few minutes to build on first use.
    """
    if k < 0:
        raise OutOfRange(f"negative bound {k}")
    if m.n > _CATALOG_N_CAP:
        raise TooLargeForExact(f"ground size {m.n} above {_CATALOG_N_CAP}")
    if k > _CATALOG_K_CAP:
        raise TooLarge(f"bound {k} above {_CATALOG_K_CAP}")
    catalog = _category_catalog(m.n, k)
    key = _invariant_key(m)
    for tag in "ABCDEF":
        if any(m.is_isomorphic(rep) for rep in catalog[tag].get(key, ())):
            return Category(tag)
    return None


def camera_fixtures() -> tuple[Matroid, ...]:
    """Five small matroids outside the spike-minor class for any bound."""
    doubled_triangle = ggraph(CYCLE, 1, 2, 0)
    return (
        direct_sum(direct_sum(uniform(0, 1), uniform(1, 1)), uniform(1, 3)),
        direct_sum(direct_sum(uniform(0, 1), uniform(1, 1)), uniform(2, 3)),
        direct_sum(uniform(0, 1), uniform(2, 4)),
        direct_sum(uniform(1, 1), uniform(2, 4)),
        direct_sum(uniform(1, 2), cycle_matroid(doubled_triangle)),
    )


# -- censuses --------------------------------------------------------------------


def census_sk_exact(n: int, k: int) -> int:
    """Isomorphism classes of n-element members, by global kernel dedupe."""
    if n < 0 or k < 0:
        raise OutOfRange("size and bound must be non-negative")
    if n > 12:
        raise TooLarge(f"exact census capped at 12 elements, got {n}")
    if k > _CATALOG_K_CAP:
        raise TooLarge(f"bound {k} above {_CATALOG_K_CAP}")
    catalog = _category_catalog(n, k)
    seen: dict = {}
    count = 0
    for tag in "ABCDEF":
        for reps in catalog[tag].values():
            for m in reps:
                if _bucket_new(seen, m):
                    count += 1
    return count


@dataclass(frozen=True)
class StratumRow:
    n: int
    k: int
    category: str
    r: int
    m: int
    count: int
    mode: str


def _orbit_count(t: int, m: int) -> int:
    if m <= 1:
        return 1
    if t < 2:
        return 0
    return len(_trun_orbits(t, m))


def _strata_rows(n: int, k: int) -> list[StratumRow]:
    rows = []
    # doubled-cycle lifts keyed by (rank, members, loops, thins, orbit)
    for r in range(3, n + 1):
        for m in range(k + 1):
            count = 0
            for s in range(max(0, 2 * r - n), r + 1):
                count += _orbit_count(r - s, m)
            if count:
                rows.append(StratumRow(n, k, "A", r, m, count, "upper"))
    if n >= 1:
        two_counts: dict[int, int] = {}
        for j in range(1, min(4, n) + 1):
            for b in range(min(k, j // 2) + 1):
                balanced = n == j and (j == 1 or (j == 2 and b == 1))
                r = 1 if balanced else 2
                two_counts[r] = two_counts.get(r, 0) + 1
        for r in sorted(two_counts):
            rows.append(StratumRow(n, k, "B", r, 0, two_counts[r], "upper"))
        one_counts: dict[int, int] = {}
        for b in range(min(k, 1) + 1):
            r = 0 if n == 1 and b == 1 else 1
            one_counts[r] = one_counts.get(r, 0) + 1
        for r in sorted(one_counts):
            rows.append(StratumRow(n, k, "C", r, 0, one_counts[r], "exact"))
        rows.append(StratumRow(n, k, "D", 0, 0, 1, "exact"))
        rows.append(StratumRow(n, k, "D", 1, 0, min(4, n), "exact"))
        graphic: dict[int, int] = {}
        for t, s, p in _cycle_shapes(n):
            r = t + s - 1
            graphic[r] = graphic.get(r, 0) + 1
        for r in sorted(graphic):
            rows.append(StratumRow(n, k, "D", r, 0, graphic[r], "exact"))
        rows.append(StratumRow(n, k, "E", n, 0, 1, "exact"))
        rows.append(StratumRow(n, k, "E", n - 1, 0, min(4, n), "exact"))
        for r in sorted(graphic):
            rows.append(StratumRow(n, k, "E", n - r, 0, graphic[r], "exact"))
    for r in range(n + 1):
        rows.append(StratumRow(n, k, "F", r, 0, min(r, n - r) + 1, "exact"))
    order = {tag: i for i, tag in enumerate("ABCDEF")}
    rows.sort(key=lambda row: (order[row.category], row.r, row.m))
    return rows


def census_sk_strata(n: int, k: int) -> list[StratumRow]:
    """Stratified upper-bound census at an even size.

    Category rows are parameter counts; the doubled-cycle stratum counts
    (loops, thins, canonical orbit) keys per rank and member count.
    Overlaps between categories are deliberately not subtracted, so the
    total over-counts the exact census.
    """
    if n < 0 or k < 0:
        raise OutOfRange("size and bound must be non-negative")
    if n % 2:
        raise OddSize(f"strata census is defined for even sizes, got {n}")
    if k > _CATALOG_K_CAP:
        raise TooLarge(f"bound {k} above {_CATALOG_K_CAP}")
    return _strata_rows(n, k)


def strata_total(rows: list[StratumRow]) -> int:
    return sum(row.count for row in rows)


def strata_csv(rows: list[StratumRow]) -> str:
    lines = ["n,k,category,r,m,count,mode"]
    for row in rows:
        lines.append(
            f"{row.n},{row.k},{row.category},{row.r},{row.m},{row.count},{row.mode}"
        )
    return "\n".join(lines) + "\n"


# -- excluded-minor generation -----------------------------------------------------


def bottom_index_sets(k: int) -> tuple[int, ...]:
    """Index-set masks with 1..k-2 of the k bits set, ascending."""
    if k < 2:
        raise TooSmall(f"bound {k} below 2")
    return tuple(m for m in range(1, 1 << k) if 1 <= m.bit_count() <= k - 2)


def bottom_solutions(t: int, k: int) -> Iterator[CompositionSolution]:
    """Non-negative assignments summing to t - 2(k+1), lexicographically."""
    sets = bottom_index_sets(k)
    if t < 2 * (k + 1):
        raise TooSmall(f"half-size {t} below 2(k+1) = {2 * (k + 1)}")
    target = t - 2 * (k + 1)
    if not sets:
        if target == 0:
            yield CompositionSolution((), ())
        return

    def rec(pos: int, rest: int) -> Iterator[tuple[int, ...]]:
        if pos == len(sets) - 1:
            yield (rest,)
            return
        for v in range(rest + 1):
            for tail in rec(pos + 1, rest - v):
                yield (v,) + tail

    for values in rec(0, target):
        yield CompositionSolution(sets, values)


def bottom_solution_count(t: int, k: int) -> int:
    nvars = len(bottom_index_sets(k))
    if t < 2 * (k + 1):
        raise TooSmall(f"half-size {t} below 2(k+1) = {2 * (k + 1)}")
    target = t - 2 * (k + 1)
    if nvars == 0:
        return 1 if target == 0 else 0
    return comb(target + nvars - 1, nvars - 1)


def bottom_construct(phi: CompositionSolution, t: int, k: int) -> SpikeSpec:
    """Spike with k+1 balanced picks realizing a composition solution.

    Two pair positions sit in none of the index sets, two sit in all but
    one for each index, and the rest follow the solution; the final pick
    takes the unmarked side everywhere.
    """
    sets = bottom_index_sets(k)
    if phi.index_sets != sets or any(v < 0 for v in phi.values):
        raise NotASolution("assignment does not cover the index sets")
    if sum(phi.values) != t - 2 * (k + 1):
        raise NotASolution(
            f"values sum to {sum(phi.values)}, need {t - 2 * (k + 1)}"
        )
    marks = [0] * k
    pos = 0

    def allocate(pattern: int, count: int) -> None:
        nonlocal pos
        for _ in range(count):
            for i in range(k):
                if pattern >> i & 1:
                    marks[i] |= 1 << pos
            pos += 1

    allocate(0, 2)
    full = (1 << k) - 1
    for i in range(k):
        allocate(full ^ (1 << i), 2)
    for pattern, value in zip(sets, phi.values):
        allocate(pattern, value)
    assert pos == t
    tfull = (1 << t) - 1
    picks = [marks[i] ^ tfull for i in range(k)] + [0]
    return spike_spec(t, picks)


def verify_sk_excluded_minor(spec: SpikeSpec, k: int, mode: str = "auto") -> bool:
    """Excluded-minor check for a spike against the bound-k class.

    Full mode runs the kernel excluded-minor test with categorize as the
    membership oracle.  Structural mode checks the pick-incidence facts
    that the full test reduces to: more than k picks, pairwise distance
    at least two, and every element lying in at least max(1, m-k) and at
    most k picks, so both single-element minors drop to at most k.
    """
    if mode not in ("auto", "full", "structural"):
        raise OutOfRange(f"unknown mode {mode!r}")
    n = 2 * spec.t
    if mode == "auto":
        mode = "full" if n <= _CATALOG_N_CAP else "structural"
    if mode == "full":
        if n > _CATALOG_N_CAP:
            raise TooLargeForFull(f"ground size {n} above {_CATALOG_N_CAP}")
        m = spike_from_spec(spec)
        return is_excluded_minor(m, lambda q: categorize(q, k) is not None)
    m = len(spec.picks)
    if m <= k:
        return False
    for p1, p2 in combinations(spec.picks, 2):
        if (p1 ^ p2).bit_count() < 2:
            return False
    lo = max(1, m - k)
    for j in range(spec.t):
        deg = sum(p >> j & 1 for p in spec.picks)
        if not lo <= deg <= k or not lo <= m - deg <= k:
            return False
    return True


def sk_excluded_minor_classes(t: int, k: int) -> list[SpikeSpec]:
    """Constructed excluded minors at half-size t, one per signature class."""
    out = []
    seen = set()
    for phi in bottom_solutions(t, k):
        spec = bottom_construct(phi, t, k)
        key = glance_signature(spec)
        if key not in seen:
            seen.add(key)
            out.append(spec)
    return out


# -- serialization ----------------------------------------------------------------


def ggraph_to_json(g: GGraph) -> str:
    doc = {"kind": g.kind, "t": g.t, "s": g.s, "p": g.p}
    return json.dumps(doc, separators=(", ", ": ")) + "\n"


def ggraph_from_json(text: str) -> GGraph:
    try:
        doc = json.loads(text)
        parts = str(doc["kind"]), int(doc["t"]), int(doc["s"]), int(doc["p"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"not a graph document: {exc}") from exc
    return ggraph(*parts)


def spikespec_to_json(spec: SpikeSpec) -> str:
    strings = sorted(pick_string(spec.t, p) for p in spec.picks)
    doc = {"t": spec.t, "picks": strings}
    return json.dumps(doc, separators=(", ", ": ")) + "\n"


def spikespec_from_json(text: str) -> SpikeSpec:
    try:
        doc = json.loads(text)
        t, picks = int(doc["t"]), list(doc["picks"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"not a spike document: {exc}") from exc
    return spike_spec(t, picks)
