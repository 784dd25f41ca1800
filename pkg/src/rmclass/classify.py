"""Descending classification of B(s,t,m) under AGL(m,2).

One descent step turns a complete classification at level r into one at
level r-1.  For each representative f with stabilizer generators L:

  phase 1: enumerate the orbits of the degree-r homogeneous forms under the
           boundary action u |-> hom_r(u o g) + hom_r(f o g + f), g in <L>;
           the orbit/stabilizer formula gives each child stabilizer order;
  phase 2: for every orbit seed u, harvest Schreier generators over a fresh
           breadth-first transversal until the known order is reached, which
           yields generators of the stabilizer of f+u at level r-1.

Forms of degree r are ints over the C(m,r) monomial coefficients, monomial
masks ascending.  The boundary action of one generator is applied through
byte-sliced XOR lookup tables, so the orbit sweep is a few array operations
per generator and frontier block.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from math import comb
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .bits import hex_of_bits, bits_of_hex, masks_of_degree, space_dimension
from .bfcore import BooleanFunction, mobius, monomial_truth_table
from .errors import (
    InternalConsistencyError,
    InvalidInputError,
    ResourceRefusedError,
)
from .group import AffineMap, SubgroupOracle, act, generators_stu, group_order

_UNSEEN = 255
_SEED = 254
_BLOCK = 1 << 18


@dataclass
class OrbitConfig:
    """Resource policy for orbit enumeration."""

    mem_limit_bytes: int = 2 << 30
    dense_threshold: int = 32  # flat arrays up to this form-space dimension


@dataclass
class ClassRecord:
    """One orbit at a given level: representative, stabilizer order and a
    generator set of the stabilizer."""

    level: int
    rep: BooleanFunction
    stab_order: int
    stab_gens: List[AffineMap]

    @property
    def m(self) -> int:
        return self.rep.m

    def orbit_size(self) -> int:
        return group_order(self.m) // self.stab_order

    def to_line(self) -> str:
        fields = [
            str(self.level),
            hex_of_bits(self.rep.anf, 1 << self.m),
            str(self.stab_order),
            str(len(self.stab_gens)),
        ]
        fields.extend(g.serialize() for g in self.stab_gens)
        return " ".join(fields)

    @classmethod
    def from_line(cls, m: int, line: str) -> "ClassRecord":
        parts = line.split()
        if len(parts) < 4:
            raise InvalidInputError(f"malformed record line: {line!r}")
        level = int(parts[0])
        rep = BooleanFunction(m, anf=bits_of_hex(parts[1], 1 << m))
        order = int(parts[2])
        ngens = int(parts[3])
        if len(parts) != 4 + ngens:
            raise InvalidInputError(f"record line announces {ngens} generators: {line!r}")
        gens = [AffineMap.parse(m, p) for p in parts[4:]]
        return cls(level, rep, order, gens)


class BoundaryAction:
    """The affine action of a level-r stabilizer on degree-r forms.

    For each generator g the linear part u |-> hom_r(u o g) is precomputed
    columnwise on the monomial basis and folded into 256-entry XOR tables per
    byte of the form index; the shift hom_r(f o g + f) is one constant.
    """

    def __init__(self, f: BooleanFunction, r: int, gens: Sequence[AffineMap]):
        if not 0 <= r <= f.m:
            raise InvalidInputError(f"boundary level r={r} outside 0..{f.m}")
        if len(gens) > 253:
            raise InternalConsistencyError("more than 253 stabilizer generators")
        self.f = f
        self.r = r
        self.m = f.m
        self.monomials = masks_of_degree(f.m, r)
        self.dim = len(self.monomials)
        self.index = {mask: i for i, mask in enumerate(self.monomials)}
        self.keep_mask = 0
        for mask in self.monomials:
            self.keep_mask |= 1 << mask
        self.n_chunks = max(1, (self.dim + 7) // 8)
        self.gens = list(gens)
        self._fwd = [self._tables_for(g) for g in self.gens]
        self._inv = [self._tables_for(g.inverse()) for g in self.gens]
        self._np_fwd = [
            ([np.array(t, dtype=np.int64) for t in tabs], np.int64(delta))
            for tabs, delta in self._fwd
        ]

    # -- representation changes ------------------------------------------

    def form_to_anf(self, u: int) -> int:
        anf = 0
        while u:
            low = u & -u
            anf |= 1 << self.monomials[low.bit_length() - 1]
            u ^= low
        return anf

    def anf_to_form(self, anf: int) -> int:
        u = 0
        masked = anf & self.keep_mask
        while masked:
            low = masked & -masked
            u |= 1 << self.index[low.bit_length() - 1]
            masked ^= low
        return u

    # -- action tables ----------------------------------------------------

    def _image_anf(self, tt: int, pmap: bytes) -> int:
        gathered = 0
        for x in range(1 << self.m):
            gathered |= ((tt >> pmap[x]) & 1) << x
        return mobius(gathered, 1 << self.m)

    def _tables_for(self, g: AffineMap):
        if g.m != self.m:
            raise InvalidInputError("generator has wrong m")
        pmap = g.pmap
        cols = []
        for mask in self.monomials:
            img = self._image_anf(monomial_truth_table(mask, self.m), pmap)
            cols.append(self.anf_to_form(img))
        shifted = self._image_anf(self.f.truth_table, pmap) ^ self.f.anf
        low_only = (1 << (1 << self.m)) - 1
        if shifted & ~(self.keep_mask | self._low_mask()) & low_only:
            raise InvalidInputError(
                "map is not in the level-%d stabilizer of the representative" % self.r
            )
        delta = self.anf_to_form(shifted)
        tables = []
        for c in range(self.n_chunks):
            tab = [0] * 256
            base = 8 * c
            for b in range(1, 256):
                low = b & -b
                j = base + low.bit_length() - 1
                tab[b] = tab[b ^ low] ^ (cols[j] if j < self.dim else 0)
            tables.append(tab)
        return tables, delta

    def _low_mask(self) -> int:
        low = 0
        for mask in range(1 << self.m):
            if mask.bit_count() < self.r:
                low |= 1 << mask
        return low

    # -- applying the action ---------------------------------------------

    def apply(self, u: int, gi: int) -> int:
        tables, delta = self._fwd[gi]
        acc = delta
        for c, tab in enumerate(tables):
            acc ^= tab[(u >> (8 * c)) & 255]
        return acc

    def apply_inv(self, u: int, gi: int) -> int:
        tables, delta = self._inv[gi]
        acc = delta
        for c, tab in enumerate(tables):
            acc ^= tab[(u >> (8 * c)) & 255]
        return acc

    def apply_block(self, arr: np.ndarray, gi: int) -> np.ndarray:
        tables, delta = self._np_fwd[gi]
        acc = tables[0][arr & 255]
        for c in range(1, len(tables)):
            acc ^= tables[c][(arr >> (8 * c)) & 255]
        return acc ^ delta


def boundary_act(u: int, g: AffineMap, ctx: BoundaryAction) -> int:
    """Image of a form under one stabilizer element, computed directly from
    the function action (reference route; the tables are the fast route)."""
    fu = BooleanFunction(ctx.m, anf=ctx.form_to_anf(u) ^ ctx.f.anf)
    image = act(fu, g).anf ^ ctx.f.anf
    high = image & ~ctx.keep_mask
    while high:
        low = high & -high
        if (low.bit_length() - 1).bit_count() > ctx.r:
            raise InvalidInputError("map is not in the stabilizer at this level")
        high ^= low
    return ctx.anf_to_form(image)


# -- orbit enumeration ------------------------------------------------------


class SpaceOrbits:
    """Partition of the full form space with a per-element transversal.

    Each visited form stores only the index of the generator that reached it;
    the predecessor is recovered by applying that generator's inverse, so a
    path walk to the seed rebuilds the transversal element on demand.
    """

    def __init__(self, ctx: BoundaryAction, dense: bool):
        self.ctx = ctx
        self.space = 1 << ctx.dim
        self.dense = dense
        if dense:
            self.genidx = np.full(self.space, _UNSEEN, dtype=np.uint8)
        else:
            self.genidx: Dict[int, int] = {}
        self.orbits: List[Tuple[int, int]] = []

    def tag(self, x: int) -> int:
        if self.dense:
            return int(self.genidx[x])
        return self.genidx.get(x, _UNSEEN)

    def is_visited(self, x: int) -> bool:
        return self.tag(x) != _UNSEEN

    def path_gens(self, x: int) -> List[int]:
        """Generator indices applied to the seed to reach x, in order."""
        rev = []
        while True:
            t = self.tag(x)
            if t == _SEED:
                break
            if t == _UNSEEN:
                raise InvalidInputError(f"form {x} was never visited")
            rev.append(t)
            x = self.ctx.apply_inv(x, t)
        rev.reverse()
        return rev

    def root_of(self, x: int) -> int:
        while True:
            t = self.tag(x)
            if t == _SEED:
                return x
            if t == _UNSEEN:
                raise InvalidInputError(f"form {x} was never visited")
            x = self.ctx.apply_inv(x, t)

    def element_to(self, x: int) -> AffineMap:
        """A group element carrying the seed of x's orbit to x."""
        elem = AffineMap.identity(self.ctx.m)
        for gi in self.path_gens(x):
            elem = elem.compose(self.ctx.gens[gi])
        return elem

    def orbit_members(self, seed: int) -> List[int]:
        """Recompute the member list of one orbit (small spaces only)."""
        ctx = self.ctx
        seen = {seed}
        queue = deque([seed])
        while queue:
            x = queue.popleft()
            for gi in range(len(ctx.gens)):
                y = ctx.apply(x, gi)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)


@dataclass
class OrbitSet:
    """One orbit: seed (the numerically smallest member), size, and a view
    onto the shared transversal storage."""

    seed: int
    size: int
    store: SpaceOrbits


def estimate_orbit_bytes(dim: int, dense: bool) -> int:
    space = 1 << dim
    if dense:
        return space + 3 * _BLOCK * 8 + (64 << 20)
    return 90 * space + (64 << 20)


def orbit_enumerate(
    ctx: BoundaryAction,
    gens: Optional[Sequence[AffineMap]] = None,
    config: Optional[OrbitConfig] = None,
) -> List[OrbitSet]:
    """Partition the form space into orbits under the boundary action.

    Seeds come out as the numerically smallest member of each orbit because
    the space is scanned in increasing order and every orbit is fully closed
    before the scan moves on.
    """
    if gens is not None and list(gens) != ctx.gens:
        raise InvalidInputError("generator list does not match the action context")
    config = config or OrbitConfig()
    dense = ctx.dim <= config.dense_threshold
    need = estimate_orbit_bytes(ctx.dim, dense)
    if need > config.mem_limit_bytes:
        raise ResourceRefusedError(
            f"orbit enumeration over 2^{ctx.dim} forms needs about {need} bytes "
            f"({'dense' if dense else 'sparse'} backend); limit is "
            f"{config.mem_limit_bytes} (raise --mem-limit to allow)"
        )
    store = SpaceOrbits(ctx, dense)
    if dense:
        _enumerate_dense(ctx, store)
    else:
        _enumerate_sparse(ctx, store)
    total = sum(size for _, size in store.orbits)
    if total != store.space:
        raise InternalConsistencyError(
            f"orbit sizes sum to {total}, expected {store.space}"
        )
    return [OrbitSet(seed, size, store) for seed, size in store.orbits]


def _next_unseen_dense(genidx: np.ndarray, start: int) -> int:
    n = genidx.shape[0]
    pos = start
    chunk = 1 << 16
    while pos < n:
        hits = np.nonzero(genidx[pos : pos + chunk] == _UNSEEN)[0]
        if hits.size:
            return pos + int(hits[0])
        pos += chunk
    return -1


def _enumerate_dense(ctx: BoundaryAction, store: SpaceOrbits) -> None:
    genidx = store.genidx
    ngens = len(ctx.gens)
    scan = 0
    while True:
        seed = _next_unseen_dense(genidx, scan)
        if seed < 0:
            break
        scan = seed
        genidx[seed] = _SEED
        size = 1
        frontier = np.array([seed], dtype=np.int64)
        while frontier.size:
            new_parts = []
            for gi in range(ngens):
                for lo in range(0, frontier.size, _BLOCK):
                    imgs = ctx.apply_block(frontier[lo : lo + _BLOCK], gi)
                    fresh = imgs[genidx[imgs] == _UNSEEN]
                    genidx[fresh] = gi
                    if fresh.size:
                        new_parts.append(fresh)
            if new_parts:
                frontier = np.concatenate(new_parts)
                size += int(frontier.size)
            else:
                frontier = np.empty(0, dtype=np.int64)
        store.orbits.append((seed, size))


def _enumerate_sparse(ctx: BoundaryAction, store: SpaceOrbits) -> None:
    genidx = store.genidx
    ngens = len(ctx.gens)
    space = store.space
    seed = 0
    while seed < space:
        if seed in genidx:
            seed += 1
            continue
        genidx[seed] = _SEED
        size = 1
        queue = deque([seed])
        while queue:
            x = queue.popleft()
            for gi in range(ngens):
                y = ctx.apply(x, gi)
                if y not in genidx:
                    genidx[y] = gi
                    size += 1
                    queue.append(y)
        store.orbits.append((seed, size))
        seed += 1


# -- stabilizer orders and generators ---------------------------------------


def stab_order_from_class_formula(parent_order: int, orbit_size: int) -> int:
    """Order of the child stabilizer: parent order divided by orbit size."""
    if orbit_size <= 0 or parent_order % orbit_size:
        raise InternalConsistencyError(
            f"orbit size {orbit_size} does not divide parent order {parent_order}"
        )
    return parent_order // orbit_size


def generator_set(
    u: int,
    L: Sequence[AffineMap],
    s_u: int,
    ctx: BoundaryAction,
) -> List[AffineMap]:
    """Generators of the stabilizer of a form u under the group spanned by L,
    given the stabilizer order.

    Breadth-first sweep of the orbit of u carrying a transversal R.  Every
    already-seen edge (x, lam) yields the candidate R[x] * lam * R[x o lam]^-1,
    which fixes u; candidates not already inside the harvested subgroup are
    kept, and the sweep stops as soon as the subgroup order matches s_u.
    """
    if list(L) != ctx.gens:
        raise InvalidInputError("generator list does not match the action context")
    if s_u == 1:
        return []
    m = ctx.m
    oracle = SubgroupOracle(m)
    harvested: List[AffineMap] = []
    visited: Dict[int, int] = {u: _SEED}
    queue = deque([u])
    elem_cache: Dict[int, bytes] = {u: AffineMap.identity(m).table}

    def elem_of(x: int) -> bytes:
        # R[x] as a padded permutation table; R[child] = R[parent] * lam, and
        # compose(a, b).pmap = b.pmap.translate(a.table), so appending a
        # generator is gens[gi].table.translate(accumulated).
        got = elem_cache.get(x)
        if got is None:
            rev = []
            y = x
            while y != u:
                gi = visited[y]
                rev.append(gi)
                y = ctx.apply_inv(y, gi)
                cached = elem_cache.get(y)
                if cached is not None:
                    break
            else:
                cached = elem_cache[u]
            got = cached
            for gi in reversed(rev):
                got = ctx.gens[gi].table.translate(got)
            elem_cache[x] = got
        return got

    while oracle.order() < s_u:
        if not queue:
            raise InternalConsistencyError(
                f"Schreier sweep exhausted at order {oracle.order()} < {s_u}"
            )
        x = queue.popleft()
        rx = None
        for gi, lam in enumerate(ctx.gens):
            y = ctx.apply(x, gi)
            if y not in visited:
                visited[y] = gi
                queue.append(y)
            else:
                if rx is None:
                    rx = elem_of(x)
                t = lam.table.translate(rx)  # R[x] * lam
                ry = elem_of(y)
                ry_inv = bytearray(256)
                for i, v in enumerate(ry):
                    ry_inv[v] = i
                cand = bytes(ry_inv).translate(t)  # (R[x] * lam) * R[y]^-1
                if not oracle.contains_perm(cand):
                    oracle._add_perm(cand)
                    harvested.append(AffineMap(m, cand[: 1 << m]))
    if oracle.order() != s_u:
        raise InternalConsistencyError(
            f"harvested subgroup has order {oracle.order()}, expected {s_u}"
        )
    return harvested


# -- the descent -------------------------------------------------------------


def _level_space_dim(m: int, lo: int, k: int) -> int:
    """Dimension of B(lo, k, m), the space a level-(lo-1) classification covers."""
    return space_dimension(m, lo, k)


def verify_level_mass(records: Sequence[ClassRecord], k: int) -> None:
    """Orbit masses must partition the acted-on space exactly."""
    if not records:
        raise InternalConsistencyError("empty classification level")
    m = records[0].m
    level = records[0].level
    total = 0
    order = group_order(m)
    for rec in records:
        if rec.level != level:
            raise InternalConsistencyError("records from mixed levels")
        if order % rec.stab_order:
            raise InternalConsistencyError("stabilizer order does not divide the group order")
        total += order // rec.stab_order
    expect = 1 << _level_space_dim(m, level + 1, k)
    if total != expect:
        raise InternalConsistencyError(
            f"mass check failed at level {level}: {total} != 2^{_level_space_dim(m, level + 1, k)}"
        )


def descend_iter(
    records: Sequence[ClassRecord],
    k: int,
    config: Optional[OrbitConfig] = None,
) -> Iterator[Tuple[int, ClassRecord, List[ClassRecord]]]:
    """Yield (parent index, parent record, children) for one descent step."""
    if not records:
        raise InvalidInputError("cannot descend from an empty classification")
    r = records[0].level
    if r < 0:
        raise InvalidInputError("already at level -1; nothing to descend")
    config = config or OrbitConfig()
    space = 1 << comb(records[0].m, r)
    for idx, rec in enumerate(records):
        if rec.level != r:
            raise InvalidInputError("records from mixed levels")
        ctx = BoundaryAction(rec.rep, r, rec.stab_gens)
        orbits = orbit_enumerate(ctx, config=config)
        if sum(o.size for o in orbits) != space:
            raise InternalConsistencyError("orbit partition does not cover the form space")
        children = []
        for orb in orbits:
            child_order = stab_order_from_class_formula(rec.stab_order, orb.size)
            gens = generator_set(orb.seed, rec.stab_gens, child_order, ctx)
            child_rep = BooleanFunction(
                rec.m, anf=rec.rep.anf ^ ctx.form_to_anf(orb.seed)
            )
            _check_record_fix(child_rep, r - 1, gens)
            children.append(ClassRecord(r - 1, child_rep, child_order, gens))
        yield idx, rec, children


def _check_record_fix(rep: BooleanFunction, level: int, gens: Sequence[AffineMap]) -> None:
    """Every stabilizer generator must fix the representative at its level."""
    keep = _high_mask(rep.m, level)
    for g in gens:
        if (act(rep, g).anf ^ rep.anf) & keep:
            raise InternalConsistencyError(
                "harvested generator does not fix the representative at its level"
            )


def _high_mask(m: int, level: int) -> int:
    mask = 0
    for s in range(1 << m):
        if s.bit_count() > level:
            mask |= 1 << s
    return mask


def descend(
    records: Sequence[ClassRecord],
    k: int,
    config: Optional[OrbitConfig] = None,
    progress: Optional[Callable[[int, int, int], None]] = None,
) -> List[ClassRecord]:
    """One full descent step with the mass check replayed on the output."""
    out: List[ClassRecord] = []
    total = len(records)
    for idx, _parent, children in descend_iter(records, k, config):
        out.extend(children)
        if progress is not None:
            progress(idx + 1, total, len(out))
    verify_level_mass(out, k)
    return out


def top_record(m: int, t: int) -> ClassRecord:
    """The starting point: the zero class at level t, stabilized by everything."""
    return ClassRecord(t, BooleanFunction.zero(m), group_order(m), generators_stu(m))


def classify_space(
    s: int,
    t: int,
    m: int,
    config: Optional[OrbitConfig] = None,
    progress: Optional[Callable[[int, int, int, int], None]] = None,
) -> List[ClassRecord]:
    """Complete classification of B(s,t,m) at level s-1, in t-s+1 descents."""
    if not (0 <= s <= m and t <= m):
        raise InvalidInputError(f"need 0 <= s <= m and t <= m, got s={s} t={t} m={m}")
    if s > t + 1:
        raise InvalidInputError(f"B({s},{t},{m}) with s > t+1 has no canonical start")
    records = [top_record(m, t)]
    for r in range(t, s - 1, -1):
        hook = None
        if progress is not None:
            hook = lambda done, total, n, _r=r: progress(_r, done, total, n)
        records = descend(records, t, config, hook)
    return records


def stab_histogram(records: Sequence[ClassRecord]) -> Dict[int, int]:
    """Multiplicity of each stabilizer order."""
    return dict(sorted(Counter(rec.stab_order for rec in records).items()))


# -- record files -------------------------------------------------------------


def write_level_file(path, records: Sequence[ClassRecord]) -> None:
    """One record per line; header carries m and level, trailer the count."""
    if not records:
        raise InvalidInputError("refusing to write an empty level file")
    m = records[0].m
    level = records[0].level
    with open(path, "w") as fh:
        fh.write(f"# rmclass m={m} level={level}\n")
        for rec in records:
            fh.write(rec.to_line() + "\n")
        fh.write(f"# complete {len(records)}\n")


def read_level_file(path) -> List[ClassRecord]:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# rmclass m="):
            raise InvalidInputError(f"{path}: not a level file")
        fields = dict(kv.split("=") for kv in header[2:].split() if "=" in kv)
        m = int(fields["m"])
        records = []
        complete = None
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("# complete"):
                complete = int(line.split()[2])
                break
            records.append(ClassRecord.from_line(m, line))
    if complete is None:
        raise InvalidInputError(f"{path}: missing completion marker (truncated run?)")
    if complete != len(records):
        raise InvalidInputError(f"{path}: trailer says {complete} records, found {len(records)}")
    return records
