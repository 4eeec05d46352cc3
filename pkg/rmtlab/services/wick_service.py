# rmtlab/services/wick_service.py - Wick-type trace identity for GUE x Haar products

import math
from collections import Counter
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from rmtlab.config import settings
from rmtlab.models.ensembles import Group, GroupKind
from rmtlab.models.ubm import PairingSystem, WickReport
from rmtlab.services.ensemble_service import ds_trace_moment, haar_matrix
from rmtlab.utils.errors import PreconditionError
from rmtlab.utils.logger import logger


def pairings(elements: Sequence[int]) -> Iterator[Dict[int, int]]:
    """All perfect matchings of the given elements as involutions."""
    if not elements:
        yield {}
        return
    first, rest = elements[0], elements[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for sub in pairings(remaining):
            match = {first: partner, partner: first}
            match.update(sub)
            yield match


def lift(pi: Dict[int, int]) -> Dict[int, int]:
    """pi tilde(2l - 1) = 2 pi(l), pi tilde(2l) = 2 pi(l) - 1."""
    out = {}
    for l, p in pi.items():
        out[2 * l - 1] = 2 * p
        out[2 * l] = 2 * p - 1
    return out


def rho(j: int) -> Dict[int, int]:
    """(23)(45)...(2j, 1) on the first half, (2j+2l-1, 2j+2((l mod j)+1)) on the second half."""
    pairs: List[Tuple[int, int]] = [(2 * l, 2 * l + 1) for l in range(1, j)] + [(2 * j, 1)]
    pairs += [(2 * j + 2 * l - 1, 2 * j + 2 * ((l % j) + 1)) for l in range(1, j + 1)]
    out = {}
    for a, b in pairs:
        out[a], out[b] = b, a
    return out


def orbits(perm: Dict[int, int], start: Sequence[int]) -> List[Tuple[int, ...]]:
    seen, out = set(), []
    for w in start:
        if w in seen:
            continue
        orbit, x = [], w
        while x not in seen:
            seen.add(x)
            orbit.append(x)
            x = perm[x]
        out.append(tuple(orbit))
    return out


def pairing_system(j: int) -> PairingSystem:
    if j < 1:
        raise PreconditionError(f"j must be positive, got {j}")
    r = rho(j)
    evens = list(range(2, 4 * j + 1, 2))
    pis = list(pairings(list(range(1, 2 * j + 1))))
    lifted = [lift(p) for p in pis]
    orbit_sets = [orbits({w: lt[r[w]] for w in evens}, evens) for lt in lifted]
    return PairingSystem(j=j, pairings=pis, lifted=lifted, rho=r, orbits=orbit_sets)


def exponents(sigma: Sequence[int]) -> Dict[int, int]:
    """s hat on the even indices 2l: sigma_l (l <= j), -sigma_j (l = j+1), -sigma_{l-j-1} (l >= j+2)."""
    j = len(sigma)
    out = {}
    for l in range(1, 2 * j + 1):
        if l <= j:
            value = sigma[l - 1]
        elif l == j + 1:
            value = -sigma[j - 1]
        else:
            value = -sigma[l - j - 2]
        out[2 * l] = value
    return out


def _orbit_powers(orbit_set: List[Tuple[int, ...]], s_hat: Dict[int, int]) -> List[int]:
    return [sum(s_hat[w] for w in o) for o in orbit_set]


def _haar_trace_product(powers_list: List[List[int]], n: int, samples: int, rng: np.random.Generator) -> float:
    group = Group(kind=GroupKind.U, n=n)
    total = 0.0
    for _ in range(samples):
        theta = np.angle(np.linalg.eigvals(haar_matrix(group, rng)[0]))
        for powers in powers_list:
            total += np.prod([np.exp(1j * p * theta).sum() for p in powers]).real
    return total / samples


def wick_rhs(sigma: Sequence[int], n: int, rng: Optional[np.random.Generator] = None,
             samples: Optional[int] = None) -> WickReport:
    """sum over C_2j of E prod_orbits Tr U^{sum of s hat}, exact where the trace moments are."""
    system = pairing_system(len(sigma))
    s_hat = exponents(sigma)
    exact_total, fallback = 0.0, []
    for orbit_set in system.orbits:
        powers = _orbit_powers(orbit_set, s_hat)
        zeros = sum(1 for p in powers if p == 0)
        top = max([abs(p) for p in powers] + [1])
        a, b = [0] * top, [0] * top
        for p, count in Counter(p for p in powers if p != 0).items():
            (a if p > 0 else b)[abs(p) - 1] += count
        moment = ds_trace_moment(a, b, n)
        if moment is None:
            fallback.append(powers)
        else:
            exact_total += n ** zeros * moment
    exact_mode = not fallback
    if fallback:
        if rng is None:
            raise PreconditionError("trace moments outside the exact regime need a random generator")
        count = samples or settings.default_samples
        logger.warning(f"Wick sigma={list(sigma)}, n={n}: {len(fallback)} terms outside the exact regime, using {count} Haar samples")
        exact_total += _haar_trace_product(fallback, n, count, rng)
    return WickReport(j=len(sigma), sigma=list(sigma), n=n, exact=exact_total, exact_mode=exact_mode)


def gue(n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (g + g.conj().T)


def wick_mc(sigma: Sequence[int], n: int, samples: int, rng: np.random.Generator) -> Tuple[float, float]:
    """E |Tr(H U^{s_1} ... H U^{s_j})|^2 over GUE x Haar samples."""
    group = Group(kind=GroupKind.U, n=n)
    values = np.empty(samples)
    for i in range(samples):
        h = gue(n, rng)
        u, _ = haar_matrix(group, rng)
        product = np.eye(n, dtype=complex)
        for s in sigma:
            power = np.linalg.matrix_power(u, s) if s >= 0 else np.linalg.matrix_power(u.conj().T, -s)
            product = product @ h @ power
        values[i] = abs(np.trace(product)) ** 2
    se = float(values.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return float(values.mean()), se


def wick_report(sigma: Sequence[int], n: int, samples: int, rng: np.random.Generator) -> WickReport:
    report = wick_rhs(sigma, n, rng, samples)
    report.mc, report.se = wick_mc(sigma, n, samples, rng)
    logger.info(f"Wick sigma={list(sigma)} n={n}: exact {report.exact:.6g}, MC {report.mc:.6g} +/- {report.se:.2g}")
    return report
