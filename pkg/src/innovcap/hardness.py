"""Localized packing families and Fano lower bounds.

A reference law ``P0`` is represented by a sample cloud. Its typical set is
cut into ``2m`` boxes of equal empirical mass, paired as ``(A_i+, A_i-)``. For
each sign vector ``v`` of a Varshamov-Gilbert code the perturbed law has
density ratio ``1 + alpha v_i`` on ``A_i+``, ``1 - alpha v_i`` on ``A_i-`` and 1
elsewhere. Separation and closeness of these laws are exact functions of the
Hamming distance, which feeds Fano's inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import InsufficientData, InvalidInput, MaxSamplesExceeded, NotPSD
from .geometry import binary_entropy

#: log(2) * (1 - h2(1/4)): exponent rate of the code size in nats
C0 = math.log(2.0) * (1.0 - binary_entropy(0.25))

OUTSIDE = -2  # not typical
UNCELLED = -1  # typical but in no cell


# ---------------------------------------------------------------------------
# sample clouds


@dataclass
class SampleCloud:
    """Samples of ``P0`` with a typical-set mask.

    For Gaussian clouds ``cov`` and ``eta`` describe the typical set
    ``{y : |-log f(y) - h| <= eta}`` so fresh points can be classified.
    """

    points: np.ndarray
    typical_mask: np.ndarray
    cov: np.ndarray | None = None
    eta: float | None = None
    entropy: float | None = None

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        self.typical_mask = np.asarray(self.typical_mask, dtype=bool).reshape(-1)
        if self.typical_mask.size != self.points.shape[0]:
            raise InvalidInput("mask length must match the number of samples")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        return self.dim

    @property
    def n_samples(self) -> int:
        return self.points.shape[0]

    @property
    def p(self) -> float:
        return float(self.typical_mask.mean())

    def is_typical(self, y) -> np.ndarray:
        if self.cov is None:
            raise InvalidInput("typical-set membership of new points needs a Gaussian cloud")
        y = np.atleast_2d(np.asarray(y, dtype=float))
        q = np.einsum("ij,ij->i", y @ np.linalg.inv(self.cov), y)
        return np.abs(0.5 * (q - self.dim)) <= self.eta


def _gaussian_draw(cov, n, rng):
    Lc = np.linalg.cholesky(cov)
    return rng.standard_normal((n, cov.shape[0])) @ Lc.T


def gaussian_typical_set(cov, epsilon: float, n_samples: int, seed, *, multiple_of: int = 1) -> SampleCloud:
    """Gaussian samples and the entropy-typical set holding at least ``1 - epsilon`` of them.

    ``-log f(y) - h = (q - dim) / 2`` with ``q`` the Mahalanobis norm, so ``eta``
    is an order statistic of ``|q - dim| / 2``. With ``multiple_of = k`` the
    typical count is rounded up to a multiple of ``k`` (when the sample allows),
    so the set can be split into ``k`` cells of identical count.
    """
    cov = spectral.symmetrize(cov)
    if not 0 < epsilon < 1:
        raise InvalidInput("epsilon must lie in (0, 1)")
    if n_samples < 1 or multiple_of < 1:
        raise InvalidInput("n_samples and multiple_of must be positive")
    info = spectral.rank_info(cov)
    if info.rank < cov.shape[0]:
        raise NotPSD("covariance is rank deficient")
    rng = np.random.default_rng(seed)
    y = _gaussian_draw(cov, n_samples, rng)
    dim = cov.shape[0]
    q = np.einsum("ij,ij->i", y @ np.linalg.inv(cov), y)
    dev = np.abs(0.5 * (q - dim))
    need = int(math.ceil((1.0 - epsilon) * n_samples - 1e-9))
    need = max(need, 1)
    rounded = -(-need // multiple_of) * multiple_of
    if rounded <= n_samples:
        need = rounded
    order = np.sort(dev)
    eta = float(order[need - 1])
    mask = dev <= eta
    h = 0.5 * dim * math.log(2 * math.pi * math.e) + 0.5 * float(np.sum(np.log(info.retained_eigenvalues)))
    return SampleCloud(y, mask, cov, eta, h)


# ---------------------------------------------------------------------------
# equal-mass cells


@dataclass
class CellPartition:
    """``2m`` half-open boxes ``[lo, hi)`` intersected with the typical set.

    Cells ``2i`` and ``2i + 1`` are ``A_i+`` and ``A_i-``. ``counts`` are the
    construction-cloud counts, ``n_samples`` its size.
    """

    m: int
    lo: np.ndarray
    hi: np.ndarray
    counts: np.ndarray
    n_samples: int
    p_typical: float

    @property
    def masses(self) -> np.ndarray:
        return self.counts / self.n_samples

    @property
    def p(self) -> float:
        """Empirical mass of the union of the cells."""
        return float(self.counts.sum() / self.n_samples)

    @property
    def target_mass(self) -> float:
        return self.p / (2 * self.m)

    def locate(self, y, typical) -> np.ndarray:
        """Cell index of each point, ``UNCELLED`` or ``OUTSIDE``."""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        out = np.full(y.shape[0], OUTSIDE, dtype=np.int64)
        out[typical] = UNCELLED
        for c in range(2 * self.m):
            inside = typical & np.all((y >= self.lo[c]) & (y < self.hi[c]), axis=1)
            out[inside] = c
        return out


def equal_mass_partition(cloud: SampleCloud, m: int) -> CellPartition:
    """Split the typical samples into ``2m`` boxes with identical counts.

    Each cell receives ``c = floor(n_typ / 2m)`` samples. The ``n_typ - 2mc``
    leftover samples are first cut off as a slab at the top of axis 0; they stay
    typical but belong to no cell. Remaining boxes are split recursively at
    empirical quantiles, cycling through the axes.
    """
    if m < 1:
        raise InvalidInput("m must be >= 1")
    pts = cloud.points[cloud.typical_mask]
    n_typ = pts.shape[0]
    if n_typ < 50 * 2 * m:
        raise InsufficientData(f"{n_typ} typical samples; need at least {100 * m}")
    dim = cloud.dim
    c = n_typ // (2 * m)
    lo0 = np.full(dim, -np.inf)
    hi0 = np.full(dim, np.inf)
    leftover = n_typ - 2 * m * c
    if leftover:
        order = np.argsort(pts[:, 0], kind="stable")
        keep = n_typ - leftover
        cut = 0.5 * (pts[order[keep - 1], 0] + pts[order[keep], 0])
        if not cut > pts[order[keep - 1], 0]:
            raise InsufficientData("tied samples prevent an exact split")
        hi0 = hi0.copy()
        hi0[0] = cut
        pts = pts[order[:keep]]
    boxes: list[tuple[np.ndarray, np.ndarray, int]] = []

    def split(P, lo, hi, leaves, depth):
        if leaves == 1:
            boxes.append((lo, hi, P.shape[0]))
            return
        axis = depth % dim
        left = leaves // 2
        k = left * c
        order = np.argsort(P[:, axis], kind="stable")
        a, b = P[order[k - 1], axis], P[order[k], axis]
        cut = 0.5 * (a + b)
        if not a < cut <= b:
            raise InsufficientData("tied samples prevent an exact split")
        hl, lr = hi.copy(), lo.copy()
        hl[axis] = cut
        lr[axis] = cut
        split(P[order[:k]], lo, hl, left, depth + 1)
        split(P[order[k:]], lr, hi, leaves - left, depth + 1)

    split(pts, lo0, hi0, 2 * m, 0)
    lo = np.array([b[0] for b in boxes])
    hi = np.array([b[1] for b in boxes])
    counts = np.array([b[2] for b in boxes])
    part = CellPartition(m, lo, hi, counts, cloud.n_samples, cloud.p)
    check = part.locate(cloud.points, cloud.typical_mask)
    if not np.array_equal(np.bincount(check[check >= 0], minlength=2 * m), counts):
        raise InsufficientData("cell boxes do not reproduce the construction counts")
    return part


# ---------------------------------------------------------------------------
# codes


@dataclass
class SignCode:
    m: int
    codewords: np.ndarray  # |V| x m, entries +-1 (int8)
    min_distance: int
    target: int
    exhausted: bool = False
    c0: float = C0

    @property
    def size(self) -> int:
        return self.codewords.shape[0]

    def index(self, v) -> int:
        v = np.asarray(v).astype(np.int8).reshape(-1)
        hits = np.flatnonzero(np.all(self.codewords == v, axis=1))
        if not hits.size:
            raise InvalidInput("vector is not a codeword")
        return int(hits[0])


def gv_target(m: int) -> int:
    """``ceil(2^{m (1 - h2(1/4))})``."""
    return int(math.ceil(2.0 ** (m * (1.0 - binary_entropy(0.25))) - 1e-9))


def hamming_matrix(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    return np.rint((A.shape[1] - A @ B.T) / 2).astype(np.int64)


def vg_code(m: int, seed, target: int | None = None, max_candidates: int | None = None) -> SignCode:
    """Greedy sign code with pairwise Hamming distance at least ``ceil(m/4)``.

    Candidates are all of ``{+-1}^m`` in random order for ``m <= 20``, otherwise
    random draws (at most ``max_candidates``, default ``200 * target``). Stops at
    ``target`` codewords (default the Gilbert-Varshamov count).
    """
    if m < 8:
        raise InvalidInput("m must be >= 8")
    dmin = -(-m // 4)
    target = gv_target(m) if target is None else int(target)
    if target < 1:
        raise InvalidInput("target must be >= 1")
    rng = np.random.default_rng(seed)
    kept = np.empty((target, m), dtype=np.float64)
    size = 0
    if m <= 20:
        ints = rng.permutation(2 ** m)
        bits = ((ints[:, None] >> np.arange(m)) & 1).astype(np.float64)
        candidates = iter(2 * bits - 1)
        budget = 2 ** m
    else:
        budget = 200 * target if max_candidates is None else max_candidates
        candidates = (2.0 * rng.integers(0, 2, m) - 1 for _ in range(budget))
    used = 0
    for v in candidates:
        used += 1
        if size and np.min((m - kept[:size] @ v) / 2) < dmin:
            continue
        kept[size] = v
        size += 1
        if size == target:
            break
    code = kept[:size].astype(np.int8)
    md = m if size < 2 else int(_min_offdiag(hamming_matrix(code, code)))
    return SignCode(m, code, md, target, exhausted=size < target)


def _min_offdiag(D) -> int:
    D = D.copy()
    np.fill_diagonal(D, np.iinfo(D.dtype).max)
    return int(D.min())


def pairwise_distance_extremes(code: SignCode, chunk: int = 1024) -> tuple[int, int]:
    """``(min, max)`` Hamming distance over distinct codeword pairs."""
    V = code.codewords
    lo, hi = code.m + 1, -1
    for s in range(0, V.shape[0], chunk):
        D = hamming_matrix(V[s:s + chunk], V)
        for r in range(D.shape[0]):
            row = np.delete(D[r], s + r)
            if row.size:
                lo = min(lo, int(row.min()))
                hi = max(hi, int(row.max()))
    return lo, hi


# ---------------------------------------------------------------------------
# packing family


@dataclass
class PackingFamily:
    partition: CellPartition
    code: SignCode
    alpha: float
    ratios: np.ndarray  # |V| x 2m density ratios on the cells
    extremes: tuple = field(default=None)

    @property
    def m(self) -> int:
        return self.code.m

    @property
    def p(self) -> float:
        return self.partition.p

    @property
    def size(self) -> int:
        return self.code.size

    def distance_extremes(self) -> tuple[int, int]:
        if self.extremes is None:
            self.extremes = pairwise_distance_extremes(self.code)
        return self.extremes

    def ratio_at(self, v_index: int, cells) -> np.ndarray:
        """Density ratio ``dP_v/dP0`` at points with the given cell labels."""
        cells = np.asarray(cells)
        out = np.ones(cells.shape)
        inside = cells >= 0
        out[inside] = self.ratios[v_index, cells[inside]]
        return out

    def total_mass(self, v_index: int) -> float:
        """``sum_cells mass * ratio + (1 - mass of cells)`` on the construction cloud."""
        masses = self.partition.masses
        return float(masses @ self.ratios[v_index] + (1.0 - masses.sum()))


def build_family(cloud: SampleCloud, partition: CellPartition, code: SignCode, alpha: float) -> PackingFamily:
    if not 0 < alpha <= 0.5:
        raise InvalidInput("alpha must lie in (0, 1/2]")
    if code.m != partition.m:
        raise InvalidInput("code length must equal the number of cell pairs")
    V = code.codewords.astype(float)
    ratios = np.empty((code.size, 2 * code.m))
    ratios[:, 0::2] = 1.0 + alpha * V
    ratios[:, 1::2] = 1.0 - alpha * V
    return PackingFamily(partition, code, float(alpha), ratios)


def _kl_rate(alpha: float) -> float:
    return alpha * math.log((1 + alpha) / (1 - alpha))


@dataclass(frozen=True)
class PairDivergence:
    d_H: int
    tv: float
    kl: float
    kl_bound: float


def pairwise_tv_kl(family: PackingFamily, v, v_prime) -> PairDivergence:
    """Exact TV and KL between two members (cells of mass ``p / 2m``)."""
    i, j = family.code.index(v), family.code.index(v_prime)
    return _pair(family, i, j)


def _pair(family, i, j) -> PairDivergence:
    V = family.code.codewords
    d = int(np.sum(V[i] != V[j]))
    m, p, a = family.m, family.p, family.alpha
    tv = a / m * d * p
    kl = d / m * p * _kl_rate(a)
    bound = 4 * p * a * a * d / m
    if kl > bound * (1 + 1e-12):
        raise AssertionError("KL exceeds the quadratic bound")
    return PairDivergence(d, tv, kl, bound)


def monte_carlo_tv_kl(family: PackingFamily, cloud: SampleCloud, i: int, j: int, n_samples: int, seed):
    """TV and KL between members ``i`` and ``j`` estimated on a fresh Gaussian sample of ``P0``."""
    rng = np.random.default_rng(seed)
    y = _gaussian_draw(cloud.cov, n_samples, rng)
    cells = family.partition.locate(y, cloud.is_typical(y))
    fi = family.ratio_at(i, cells)
    fj = family.ratio_at(j, cells)
    tv = 0.5 * float(np.mean(np.abs(fi - fj)))
    kl = float(np.mean(fi * np.log(fi / fj)))
    return tv, kl


# ---------------------------------------------------------------------------
# Fano


@dataclass(frozen=True)
class FanoBound:
    n: int
    test_error_lb: float
    tv_risk_lb: float
    sample_rich: bool


def _family_constants(family: PackingFamily):
    if family.size < 2:
        raise InvalidInput("Fano's inequality needs at least two hypotheses")
    dmin, dmax = family.distance_extremes()
    m, p, a = family.m, family.p, family.alpha
    return a / m * dmin * p, dmax / m * p * _kl_rate(a), math.log(family.size)


def fano_bound(family: PackingFamily, n: int) -> FanoBound:
    """``P(error) >= 1 - (n KL_max + log 2) / log|V|`` and the implied TV risk ``(Delta/2) P(error)``."""
    if n < 0:
        raise InvalidInput("n must be nonnegative")
    delta, kl_max, log_v = _family_constants(family)
    raw = 1.0 - (n * kl_max + math.log(2.0)) / log_v
    err = max(0.0, raw)
    return FanoBound(int(n), err, 0.5 * delta * err, raw <= 0)


def fano_curve(family: PackingFamily, ns) -> list[FanoBound]:
    return [fano_bound(family, int(n)) for n in ns]


def sample_complexity(family: PackingFamily, target_risk_fraction: float, max_n: int = 10 ** 12) -> int:
    """Smallest ``n`` with ``tv_risk_lb(n) < target_risk_fraction * Delta / 2``."""
    if not 0 < target_risk_fraction < 1:
        raise InvalidInput("target fraction must lie in (0, 1)")
    _, kl_max, log_v = _family_constants(family)
    need = (1.0 - target_risk_fraction) * log_v - math.log(2.0)
    if need < 0:
        return 0
    if kl_max <= 0 or need / kl_max >= max_n:
        raise MaxSamplesExceeded(f"sample complexity exceeds {max_n}")
    n = int(math.floor(need / kl_max)) + 1
    # guard the floor against rounding at the boundary
    while n > 0 and fano_bound(family, n - 1).test_error_lb < target_risk_fraction:
        n -= 1
    while fano_bound(family, n).test_error_lb >= target_risk_fraction:
        n += 1
    return n


def family_summary(family: PackingFamily, ns=None) -> dict:
    delta, kl_max, log_v = _family_constants(family)
    dmin, dmax = family.distance_extremes()
    if ns is None:
        top = max(1, int(math.ceil(2 * log_v / kl_max)))
        ns = np.unique(np.linspace(0, top, 21).astype(int))
    curve = fano_curve(family, ns)
    return {
        "m": family.m,
        "alpha": family.alpha,
        "p": family.p,
        "p_typical": family.partition.p_typical,
        "V": family.size,
        "V_target": family.code.target,
        "min_d_H": dmin,
        "max_d_H": dmax,
        "min_tv": delta,
        "max_kl": kl_max,
        "c0": C0,
        "fano_curve": [
            {"n": b.n, "test_error_lb": b.test_error_lb, "tv_risk_lb": b.tv_risk_lb, "sample_rich": b.sample_rich}
            for b in curve
        ],
    }


def make_family(m: int, alpha: float, *, dim: int = 4, epsilon: float = 0.1, n_samples: int | None = None,
                seed: int = 0, code_target: int | None = None) -> tuple[SampleCloud, PackingFamily]:
    """Gaussian cloud (identity covariance), equal-mass cells and a VG code in one call."""
    if n_samples is None:
        n_samples = max(20000, int(math.ceil(200 * m / (1 - epsilon))))
    cloud = gaussian_typical_set(np.eye(dim), epsilon, n_samples, seed, multiple_of=2 * m)
    part = equal_mass_partition(cloud, m)
    code = vg_code(m, seed + 1, target=code_target)
    return cloud, build_family(cloud, part, code, alpha)
