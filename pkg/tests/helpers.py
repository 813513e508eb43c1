"""Shared test utilities: independent tangent-weight oracles and random
minuscule slice sampling."""

import random

from grslice.cartan import CartanDatum, Coweight, pairing
from grslice.slices import SliceSpec


def oracle_up_crossings(spec, p):
    """Independent multiplicity counter: up-crossings with a -1 correction
    on levels strictly between 0 and the final height."""
    sigma = p.sigma()
    entries = {}
    for root in spec.cartan.root_list:
        heights = [pairing(s, root) for s in sigma]
        mu_h = pairing(spec.mu, root)
        for n in range(min(heights), max(heights)):
            c2 = 2 * n + 1
            ups = sum(1 for a, b in zip(heights, heights[1:]) if 2 * a < c2 < 2 * b)
            mult = ups - 1 if 0 < c2 < 2 * mu_h else ups
            assert mult >= 0
            if mult:
                entries[(root, n)] = mult
    return entries


def oracle_down_crossings(spec, p):
    """Independent multiplicity counter: down-crossings with a -1 correction
    on levels strictly between the final height and 0."""
    sigma = p.sigma()
    entries = {}
    for root in spec.cartan.root_list:
        heights = [pairing(s, root) for s in sigma]
        mu_h = pairing(spec.mu, root)
        for n in range(min(heights), max(heights)):
            c2 = 2 * n + 1
            downs = sum(1 for a, b in zip(heights, heights[1:]) if 2 * b < c2 < 2 * a)
            mult = downs - 1 if 2 * mu_h < c2 < 0 else downs
            assert mult >= 0
            if mult:
                entries[(root, n)] = mult
    return entries


_POOL = [
    CartanDatum("A", 1),
    CartanDatum("A", 2),
    CartanDatum("A", 3),
    CartanDatum("B", 2),
    CartanDatum("C", 2),
    CartanDatum("D", 4),
]


def random_minuscule_specs(count, seed, max_dim=12, max_len=4):
    """Deterministic stream of valid minuscule slice specs with dim <= max_dim."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        datum = rng.choice(_POOL)
        l = rng.randint(1, max_len)
        lam = [rng.choice(sorted(datum.minuscule_indices)) for _ in range(l)]
        total = datum.zero_coweight()
        for i in lam:
            total = total + datum.fundamental_coweight(i)
        # sample mu among achievable weights (suffix-sum closure of the orbits)
        sums = {datum.zero_coweight()}
        for i in lam:
            orbit = datum.weyl_orbit(datum.fundamental_coweight(i))
            sums = {d + s for d in orbit for s in sums}
        candidates = [
            mu for mu in sorted(sums)
            if pairing(total - mu, datum.two_rho_check) <= max_dim
        ]
        if not candidates:
            continue
        mu = rng.choice(candidates)
        out.append(SliceSpec(datum, lam, mu))
    return out
