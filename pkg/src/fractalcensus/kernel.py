"""Ground-truth matroid oracle over explicit basis lists.

A matroid lives on ground set {0..n-1} with every basis stored as a bitmask.
This module is deliberately definition-driven: ranks come from scanning
bases, circuits from minimal dependent sets, hyperplanes from closed sets of
corank one.  Higher layers construct matroids through combinatorial formulas
and use these oracles as the independent check, so nothing here may assume
any structure beyond the basis-exchange axiom.

Desk-scale bound: ground sets are capped at 24 elements (masks stay inside a
machine word).  The subset-table oracles (circuits, hyperplanes, cyclic
flats) materialise 2^n entries and are intended for n well below the cap.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Callable, Iterable, Sequence

import numpy as np

from .bitset import bits, elements_of, mask_from, subset_masks

MAX_GROUND = 24


class MatroidError(Exception):
    """Base class for kernel validation failures."""


class EmptyBases(MatroidError):
    pass


class NonEquicardinal(MatroidError):
    pass


class ExchangeViolation(MatroidError):
    """Witness: bases b1, b2 and x in b1-b2 with no valid exchange."""

    def __init__(self, b1: int, b2: int, x: int):
        self.b1, self.b2, self.x = b1, b2, x
        super().__init__(
            f"exchange fails for bases {sorted(elements_of(b1))} and "
            f"{sorted(elements_of(b2))} at element {x}"
        )


class RankOutOfRange(MatroidError):
    pass


class SizeOverflow(MatroidError):
    pass


class OutOfRange(MatroidError):
    pass


class RankZero(MatroidError):
    pass


class OverlappingSets(MatroidError):
    pass


class MalformedDocument(MatroidError):
    pass


@dataclass(frozen=True)
class SetFamily:
    """A finite family of subsets of {0..n-1}, each subset a bitmask."""

    n: int
    members: tuple[int, ...]

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, mask: int) -> bool:
        return mask in set(self.members)

    def as_sets(self) -> list[tuple[int, ...]]:
        return [elements_of(m) for m in self.members]


@dataclass(frozen=True)
class RankedFlat:
    flat: int
    rank: int


class Matroid:
    """Immutable matroid given by ground-set size, rank and basis masks.

    Direct construction trusts its input; use :func:`make_matroid` for
    anything that has not already been proven to satisfy basis exchange.
    """

    __slots__ = ("n", "r", "bases", "_cache")

    def __init__(self, n: int, r: int, bases: tuple[int, ...]):
        self.n = n
        self.r = r
        self.bases = bases
        self._cache: dict = {}

    # -- identity ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matroid)
            and self.n == other.n
            and self.r == other.r
            and self.bases == other.bases
        )

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.bases))

    def __repr__(self) -> str:
        return f"Matroid(n={self.n}, r={self.r}, bases={len(self.bases)})"

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    # -- rank and closure --------------------------------------------------

    def rank_of(self, subset: int) -> int:
        """Rank of a subset: the largest overlap with any basis."""
        if subset < 0 or subset > self.full_mask:
            raise OutOfRange(f"subset {subset:#x} not within ground set")
        return max((subset & b).bit_count() for b in self.bases)

    def _tables(self) -> tuple["np.ndarray", "np.ndarray"]:
        """Independence and rank over all 2^n subsets, as flat arrays.

        Down-closure marks subsets of bases independent; the rank of x is
        then the largest independent set inside x, spread by a subset-max
        sweep. Both sweeps are n vectorized passes over the 2^n table.
        """
        got = self._cache.get("tab")
        if got is None:
            size = 1 << self.n
            indep = np.zeros(size, dtype=bool)
            indep[list(self.bases)] = True
            rank = np.full(size, -1, dtype=np.int8)
            rank[list(self.bases)] = self.r
            for e in range(self.n):
                step = 1 << e
                iv = indep.reshape(-1, 2, step)
                iv[:, 0, :] |= iv[:, 1, :]
                rv = rank.reshape(-1, 2, step)
                np.maximum(rv[:, 0, :], rv[:, 1, :] - 1, out=rv[:, 0, :])
            # spread: rank of x is the max rank over independent subsets
            for e in range(self.n):
                step = 1 << e
                rv = rank.reshape(-1, 2, step)
                np.maximum(rv[:, 1, :], rv[:, 0, :], out=rv[:, 1, :])
            got = (indep, rank)
            self._cache["tab"] = got
        return got

    def closure(self, subset: int) -> int:
        _, rank = self._tables()
        rk = rank[subset]
        out = subset
        for e in range(self.n):
            b = 1 << e
            if not subset & b and rank[subset | b] == rk:
                out |= b
        return out

    # -- circuits, hyperplanes, flats ---------------------------------------

    def _circuit_array(self) -> "np.ndarray":
        got = self._cache.get("circarr")
        if got is None:
            indep, _ = self._tables()
            minimal = ~indep
            for e in range(self.n):
                step = 1 << e
                mv = minimal.reshape(-1, 2, step)
                iv = indep.reshape(-1, 2, step)
                mv[:, 1, :] &= iv[:, 0, :]
            got = np.flatnonzero(minimal)
            self._cache["circarr"] = got
        return got

    def circuits(self) -> SetFamily:
        """Minimal dependent sets, ascending by mask."""
        got = self._cache.get("circuits")
        if got is None:
            got = SetFamily(self.n, tuple(int(x) for x in self._circuit_array()))
            self._cache["circuits"] = got
        return got

    def _flat_table(self) -> "np.ndarray":
        got = self._cache.get("flat")
        if got is None:
            _, rank = self._tables()
            got = np.ones(1 << self.n, dtype=bool)
            for e in range(self.n):
                step = 1 << e
                fv = got.reshape(-1, 2, step)
                rv = rank.reshape(-1, 2, step)
                fv[:, 0, :] &= rv[:, 1, :] > rv[:, 0, :]
            self._cache["flat"] = got
        return got

    def non_spanning_circuits(self) -> tuple[int, ...]:
        _, rank = self._tables()
        arr = self._circuit_array()
        return tuple(int(c) for c in arr[rank[arr] < self.r])

    def hyperplanes(self) -> SetFamily:
        """Flats of rank r-1 (maximal proper flats)."""
        if self.r == 0:
            raise RankZero("rank-0 matroid has no hyperplanes")
        got = self._cache.get("hyperplanes")
        if got is None:
            _, rank = self._tables()
            hits = np.flatnonzero(self._flat_table() & (rank == self.r - 1))
            got = SetFamily(self.n, tuple(int(x) for x in hits))
            self._cache["hyperplanes"] = got
        return got

    def circuit_hyperplanes(self) -> tuple[int, ...]:
        """Circuits that are simultaneously hyperplanes, ascending."""
        _, rank = self._tables()
        flat = self._flat_table()
        arr = self._circuit_array()
        hits = arr[(rank[arr] == self.r - 1) & flat[arr]]
        return tuple(int(c) for c in hits)

    def cyclic_flats(self) -> list[RankedFlat]:
        """Closed sets whose restriction has no coloop.

        Computed as the join-closure of circuit closures: every cyclic flat
        is a join (closure of union) of circuit closures, and joins of
        cyclic flats stay cyclic, so the scan is output-sensitive instead of
        walking all 2^n subsets.
        """
        got = self._cache.get("cyclic_flats")
        if got is None:
            _, rt = self._tables()
            seeds = {self.closure(0)}
            for c in self.circuits():
                seeds.add(self.closure(c))
            flats = set(seeds)
            frontier = list(seeds)
            while frontier:
                f = frontier.pop()
                for s in seeds:
                    j = self.closure(f | s)
                    if j not in flats:
                        flats.add(j)
                        frontier.append(j)
            got = sorted(
                (RankedFlat(f, int(rt[f])) for f in flats),
                key=lambda rf: (rf.rank, rf.flat),
            )
            self._cache["cyclic_flats"] = got
        return list(got)

    # -- minors, duality, components ----------------------------------------

    def _minor_single(self, e: int, is_contract: bool) -> "Matroid | None":
        """Vectorized one-element minor; None when rank degenerates."""
        arr = self._cache.get("basesarr")
        if arr is None:
            arr = np.array(self.bases, dtype=np.uint32)
            self._cache["basesarr"] = arr
        hit = (arr >> e) & 1 == 1
        if is_contract:
            if not hit.any():  # loop: contraction equals deletion
                return self._minor_single(e, False)
            keep = arr[hit] ^ (1 << e)
            r2 = self.r - 1
        else:
            keep = arr[~hit]
            if not len(keep):  # coloop: rank drops, generic path
                return None
            r2 = self.r
        low = np.uint32((1 << e) - 1)
        keep = (keep & low) | (keep >> 1) & ~low
        keep.sort()
        return Matroid(self.n - 1, r2, tuple(int(b) for b in keep))

    def minor(self, delete: int, contract: int) -> "Matroid":
        """Delete and contract disjoint subsets, then relabel to {0..n'-1}.

        Relabelling is order-preserving on the surviving elements.
        """
        full = self.full_mask
        if delete < 0 or delete > full or contract < 0 or contract > full:
            raise OutOfRange("minor arguments outside ground set")
        if delete & contract:
            raise OverlappingSets(
                f"delete and contract share elements "
                f"{sorted(elements_of(delete & contract))}"
            )
        removed = delete | contract
        if removed.bit_count() == 1:
            got = self._minor_single(removed.bit_length() - 1, bool(contract))
            if got is not None:
                return got
        # greedy maximal independent subset of the contracted part
        ic = 0
        rk = 0
        for e in bits(contract):
            trial = ic | (1 << e)
            t = self.rank_of(trial)
            if t > rk:
                ic, rk = trial, t
        nb = sorted({b ^ ic for b in self.bases if b & contract == ic})
        keep = [b for b in nb if not b & delete]
        remaining = full & ~delete & ~contract
        if not keep:
            # deletion removed every basis of the contraction: rank drops
            r2 = max((b & remaining).bit_count() for b in nb)
            grown = set()
            for b in nb:
                avail = elements_of(b & remaining)
                if len(avail) < r2:
                    continue
                for combo in combinations(avail, r2):
                    grown.add(mask_from(combo))
            keep = sorted(grown)
        else:
            r2 = self.r - rk
        # order-preserving compaction: drop removed bit positions high to low
        removed = sorted(elements_of(full ^ remaining), reverse=True)
        squeezed = []
        for b in keep:
            for e in removed:
                low = (1 << e) - 1
                b = (b & low) | (b >> 1) & ~low
            squeezed.append(b)
        squeezed.sort()
        return Matroid(remaining.bit_count(), r2, tuple(squeezed))

    def delete(self, e: int) -> "Matroid":
        return self.minor(1 << e, 0)

    def contract(self, e: int) -> "Matroid":
        return self.minor(0, 1 << e)

    def dual(self) -> "Matroid":
        full = self.full_mask
        return Matroid(
            self.n, self.n - self.r, tuple(sorted(full ^ b for b in self.bases))
        )

    def components(self) -> tuple[int, ...]:
        """Partition of the ground set into connected components (as masks).

        Two elements are connected when some circuit contains both; loops
        are singleton circuits, coloops lie in no circuit, and both end up
        as singleton blocks.
        """
        parent = list(range(self.n))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for c in self.circuits():
            es = elements_of(c)
            for e in es[1:]:
                ra, rb = find(es[0]), find(e)
                if ra != rb:
                    parent[rb] = ra
        blocks: dict[int, int] = {}
        for e in range(self.n):
            root = find(e)
            blocks[root] = blocks.get(root, 0) | (1 << e)
        return tuple(sorted(blocks.values()))

    # -- isomorphism --------------------------------------------------------

    def basis_degrees(self) -> tuple[int, ...]:
        got = self._cache.get("deg")
        if got is None:
            deg = [0] * self.n
            for b in self.bases:
                for e in bits(b):
                    deg[e] += 1
            got = tuple(deg)
            self._cache["deg"] = got
        return got

    def _pair_degrees(self) -> list[list[int]]:
        got = self._cache.get("pairdeg")
        if got is None:
            got = [[0] * self.n for _ in range(self.n)]
            for b in self.bases:
                es = elements_of(b)
                for i, e in enumerate(es):
                    row = got[e]
                    for f in es[i + 1:]:
                        row[f] += 1
                        got[f][e] += 1
            self._cache["pairdeg"] = got
        return got

    def _profiles(self) -> list[tuple]:
        deg = self.basis_degrees()
        pd = self._pair_degrees()
        return [
            (deg[e], tuple(sorted(pd[e][f] for f in range(self.n) if f != e)))
            for e in range(self.n)
        ]

    def is_isomorphic(self, other: "Matroid") -> bool:
        """Permutation isomorphism via pruned backtracking.

        Pruning layers: (n, r, basis count), basis-degree multisets,
        per-element pair-degree profiles, then a backtracking search that
        keeps partial maps pair-degree-consistent and finally checks that
        the bases map onto the bases.  Tests validate the pruning against
        an unpruned full-permutation scan on small ground sets.
        """
        if (self.n, self.r, len(self.bases)) != (
            other.n,
            other.r,
            len(other.bases),
        ):
            return False
        if self.bases == other.bases:
            return True
        if sorted(self.basis_degrees()) != sorted(other.basis_degrees()):
            return False
        n = self.n
        prof_m = self._profiles()
        prof_n = other._profiles()
        if sorted(prof_m) != sorted(prof_n):
            return False
        pd_m = self._pair_degrees()
        pd_n = other._pair_degrees()
        cand = [
            [j for j in range(n) if prof_n[j] == prof_m[i]] for i in range(n)
        ]
        order = sorted(range(n), key=lambda i: (len(cand[i]), i))
        target = set(other.bases)
        mapping = [-1] * n
        used = [False] * n
        placed: list[int] = []

        def accept() -> bool:
            for b in self.bases:
                img = 0
                for e in bits(b):
                    img |= 1 << mapping[e]
                if img not in target:
                    return False
            return True

        def extend(pos: int) -> bool:
            if pos == n:
                return accept()
            i = order[pos]
            row_m = pd_m[i]
            for j in cand[i]:
                if used[j]:
                    continue
                row_n = pd_n[j]
                ok = True
                for i2 in placed:
                    if row_m[i2] != row_n[mapping[i2]]:
                        ok = False
                        break
                if not ok:
                    continue
                mapping[i] = j
                used[j] = True
                placed.append(i)
                if extend(pos + 1):
                    return True
                placed.pop()
                used[j] = False
                mapping[i] = -1
            return False

        return extend(0)

    # -- sparse paving ------------------------------------------------------

    def is_sparse_paving(self) -> bool:
        """True when every non-spanning circuit is a hyperplane."""
        if self.r in (0, self.n):
            return True
        _, rank = self._tables()
        flat = self._flat_table()
        arr = self._circuit_array()
        low = rank[arr] < self.r
        good = (rank[arr] == self.r - 1) & flat[arr]
        return bool((~low | good).all())


# -- constructors -----------------------------------------------------------


def _exchange_witness(bases: Sequence[int]) -> tuple[int, int, int] | None:
    bset = set(bases)
    for b1 in bases:
        for b2 in bases:
            diff = b1 & ~b2
            if not diff:
                continue
            gain = b2 & ~b1
            for x in bits(diff):
                bx = b1 ^ (1 << x)
                for y in bits(gain):
                    if bx | (1 << y) in bset:
                        break
                else:
                    return b1, b2, x
    return None


def make_matroid(n: int, bases: Iterable[int]) -> Matroid:
    """Validate basis masks against the exchange axiom and build a Matroid.

    This is the axiom gate: every construction in the package that is not
    itself proven correct must come through here.
    """
    if n < 0 or n > MAX_GROUND:
        raise SizeOverflow(f"ground set size {n} outside [0, {MAX_GROUND}]")
    cleaned = sorted(set(bases))
    if not cleaned:
        raise EmptyBases("a matroid needs at least one basis")
    full = (1 << n) - 1
    for b in cleaned:
        if b < 0 or b > full:
            raise OutOfRange(f"basis {b:#x} not within ground set of size {n}")
    r = cleaned[0].bit_count()
    for b in cleaned:
        if b.bit_count() != r:
            raise NonEquicardinal(
                f"bases {sorted(elements_of(cleaned[0]))} and "
                f"{sorted(elements_of(b))} have different sizes"
            )
    witness = _exchange_witness(cleaned)
    if witness is not None:
        raise ExchangeViolation(*witness)
    return Matroid(n, r, tuple(cleaned))


def uniform(r: int, n: int) -> Matroid:
    if n < 0 or n > MAX_GROUND:
        raise SizeOverflow(f"ground set size {n} outside [0, {MAX_GROUND}]")
    if r < 0 or r > n:
        raise RankOutOfRange(f"rank {r} outside [0, {n}]")
    return Matroid(n, r, tuple(subset_masks(n, r)))


def direct_sum(m1: Matroid, m2: Matroid) -> Matroid:
    if m1.n + m2.n > MAX_GROUND:
        raise SizeOverflow(
            f"direct sum would have {m1.n + m2.n} > {MAX_GROUND} elements"
        )
    shifted = [b2 << m1.n for b2 in m2.bases]
    bases = tuple(sorted(b1 | s for b1 in m1.bases for s in shifted))
    return Matroid(m1.n + m2.n, m1.r + m2.r, bases)


def relabel(m: Matroid, perm: Sequence[int]) -> Matroid:
    """Apply the bijection e -> perm[e] to the ground set."""
    if sorted(perm) != list(range(m.n)):
        raise OutOfRange("relabelling is not a permutation of the ground set")
    out = []
    for b in m.bases:
        img = 0
        for e in bits(b):
            img |= 1 << perm[e]
        out.append(img)
    return Matroid(m.n, m.r, tuple(sorted(out)))


def is_excluded_minor(m: Matroid, member: Callable[[Matroid], bool]) -> bool:
    """True when m is outside the class but every single-element minor is in.

    ``member`` must be the membership predicate of a minor-closed class.
    """
    if member(m):
        return False
    for e in range(m.n):
        if not member(m.delete(e)):
            return False
        if not member(m.contract(e)):
            return False
    return True


def isomorphism_scan(m1: Matroid, m2: Matroid) -> bool:
    """Unpruned reference scan over all n! relabellings (test oracle)."""
    if (m1.n, m1.r, len(m1.bases)) != (m2.n, m2.r, len(m2.bases)):
        return False
    target = set(m2.bases)
    for perm in permutations(range(m1.n)):
        ok = True
        for b in m1.bases:
            img = 0
            for e in bits(b):
                img |= 1 << perm[e]
            if img not in target:
                ok = False
                break
        if ok:
            return True
    return False


# -- serialization ------------------------------------------------------------


def matroid_to_json(m: Matroid) -> str:
    """Interchange form: sorted element lists, bases in lexicographic order."""
    rows = sorted(list(elements_of(b)) for b in m.bases)
    doc = {"n": m.n, "rank": m.r, "bases": rows}
    return json.dumps(doc, separators=(", ", ": ")) + "\n"


def matroid_from_json(text: str) -> Matroid:
    try:
        doc = json.loads(text)
        n = int(doc["n"])
        rank = int(doc["rank"])
        rows = [mask_from(int(e) for e in row) for row in doc["bases"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise MalformedDocument(f"not a matroid document: {exc}") from exc
    m = make_matroid(n, rows)
    if m.r != rank:
        raise RankOutOfRange(
            f"declared rank {rank} disagrees with basis size {m.r}"
        )
    return m
