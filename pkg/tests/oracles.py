"""Brute-force reference implementations used only by the tests.

Everything here is written for obviousness, not speed, and deliberately
avoids the library's fast paths (bit butterflies, Schreier chains, boundary
tables) so that agreement between the two is meaningful evidence.
"""

from __future__ import annotations

from itertools import product

from rmclass.bfcore import BooleanFunction
from rmclass.group import AffineMap, enumerate_agl


def point_bits(x: int, m: int):
    return [(x >> j) & 1 for j in range(m)]


def anf_by_definition(tt: int, m: int) -> int:
    """a_S = parity of f over the subcube below S, straight from the sum."""
    anf = 0
    for s in range(1 << m):
        acc = 0
        for x in range(1 << m):
            if x & ~s == 0:
                acc ^= (tt >> x) & 1
        anf |= acc << s
    return anf


def walsh_by_definition(f: BooleanFunction):
    """W(a) = sum_x (-1)^(f(x) + a.x), evaluated term by term."""
    m = f.m
    tt = f.truth_table
    out = []
    for a in range(1 << m):
        acc = 0
        for x in range(1 << m):
            bit = ((tt >> x) & 1) ^ ((a & x).bit_count() & 1)
            acc += 1 - 2 * bit
        out.append(acc)
    return out


def act_by_definition(f: BooleanFunction, s: AffineMap) -> BooleanFunction:
    """Evaluate f(sigma(x)) pointwise through coordinates."""
    m = f.m
    rows = s.rows
    b = s.translation
    tt = 0
    for x in range(1 << m):
        y = b
        for i in range(m):
            if (x >> i) & 1:
                y ^= rows[i]
        tt |= ((f.truth_table >> y) & 1) << x
    return BooleanFunction(m, truth_table=tt)


def reduce_anf(anf: int, m: int, r: int) -> int:
    """Clear coefficients of degree <= r."""
    out = 0
    for s in range(1 << m):
        if s.bit_count() > r and (anf >> s) & 1:
            out |= 1 << s
    return out


def orbit_partition_bruteforce(s: int, t: int, m: int):
    """Partition B(s,t,m) under the full group, acting one function at a
    time with explicit reduction; returns sorted orbit-minimum ANFs and the
    orbit sizes.  Only feasible for m <= 3."""
    if m > 3:
        raise ValueError("full-group brute force is m <= 3 only")
    group = list(enumerate_agl(m))
    basis = [mask for mask in range(1 << m) if s <= mask.bit_count() <= t]
    space = []
    for choice in product((0, 1), repeat=len(basis)):
        anf = 0
        for bit, mask in zip(choice, basis):
            if bit:
                anf |= 1 << mask
        space.append(anf)
    seen = set()
    orbits = []
    for anf in sorted(space):
        if anf in seen:
            continue
        f = BooleanFunction(m, anf=anf)
        orbit = set()
        for g in group:
            img = act_by_definition(f, g)
            orbit.add(reduce_anf(img.anf, m, s - 1))
        orbits.append((min(orbit), len(orbit)))
        seen |= orbit
    return orbits


def stabilizer_order_bruteforce(f: BooleanFunction, level: int) -> int:
    """Count substitutions fixing f modulo degree <= level (m <= 3)."""
    m = f.m
    count = 0
    for g in enumerate_agl(m):
        diff = act_by_definition(f, g).anf ^ f.anf
        if reduce_anf(diff, m, level) == 0:
            count += 1
    return count


def fixed_function_count_bruteforce(s: int, t: int, m: int, sigma: AffineMap) -> int:
    """#{f in B(s,t,m) : f o sigma = f mod RM(s-1,m)} by scanning the space."""
    basis = [mask for mask in range(1 << m) if s <= mask.bit_count() <= t]
    count = 0
    for choice in range(1 << len(basis)):
        anf = 0
        for j, mask in enumerate(basis):
            if (choice >> j) & 1:
                anf |= 1 << mask
        f = BooleanFunction(m, anf=anf)
        diff = act_by_definition(f, sigma).anf ^ anf
        if reduce_anf(diff, m, s - 1) == 0:
            count += 1
    return count
