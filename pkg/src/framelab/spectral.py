"""Submatrix spectra, the inverse-energy functional, and limiting densities.

For a frame A (n x m, unit rows) and a pattern s of k row indices, the inverse
energy of the k x m submatrix A_s is

    eta_s = (1/m) tr((A_s A_s')^{-1}),

the amplification factor of the least-squares encoder.  eta_s >= k/m always,
with equality exactly when the rows of A_s are orthonormal.  Singular
submatrices report eta = inf rather than an overflow artifact.

The two reference eigenvalue laws for Gram matrices A_s A_s' of random
patterns are Marchenko--Pastur (i.i.d. frames) and MANOVA (random DFT-spectrum
and difference-set frames), together with their 1/x moments, which give the
limiting eta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import cho_factor, solve_triangular, LinAlgError

__all__ = [
    "EigenSample",
    "EigenHistogram",
    "gram_eigenvalues",
    "inverse_energy",
    "eta_from_eigenvalues",
    "mp_edges",
    "mp_density",
    "mp_eta_limit",
    "manova_edges",
    "manova_density",
    "manova_eta_limit",
    "eigen_histogram",
    "l1_density_distance",
]

# lambda_min <= SINGULARITY_RATIO * lambda_max counts as singular: the log
# histograms need to tell "huge but finite" from "gone".
SINGULARITY_RATIO = 1e-12


def _canonical_submatrix(frame, pattern):
    """Pattern submatrix with rows in canonical (lexicographic) order.

    Reordering rows conjugates the Gram by a permutation, which leaves
    eigenvalues and eta mathematically fixed but perturbs floating point;
    sorting first makes eta bitwise invariant under row/pattern relabeling.
    """
    idx = np.asarray(sorted(int(i) for i in getattr(pattern, "indices", pattern)))
    if idx.size == 0:
        raise ValueError("empty pattern")
    if idx[0] < 0 or idx[-1] >= frame.n:
        raise IndexError(f"pattern index out of range for n={frame.n}")
    if np.unique(idx).size != idx.size:
        raise ValueError("repeated pattern index")
    a_s = frame.data[idx]
    key = a_s.view(np.float64).reshape(idx.size, -1)
    order = np.lexsort(key.T[::-1])
    return a_s[order]


def eta_from_eigenvalues(eigenvalues, m):
    """(1/m) sum 1/lambda_i, or inf under the singularity threshold."""
    w = np.asarray(eigenvalues, dtype=float)
    wmin, wmax = w.min(), w.max()
    if wmin <= SINGULARITY_RATIO * wmax or wmin <= 0.0:
        return math.inf
    return float(np.sum(1.0 / w)) / m


@dataclass(frozen=True)
class EigenSample:
    """Spectrum of one pattern Gram A_s A_s' (ascending) plus its eta."""

    eigenvalues: np.ndarray
    pattern: tuple
    eta: float


def gram_eigenvalues(frame, pattern) -> EigenSample:
    a_s = _canonical_submatrix(frame, pattern)
    g = a_s @ a_s.conj().T
    w = np.linalg.eigvalsh(g)
    idx = tuple(int(i) for i in getattr(pattern, "indices", pattern))
    return EigenSample(eigenvalues=w, pattern=idx, eta=eta_from_eigenvalues(w, frame.m))


def inverse_energy(frame, pattern):
    """eta_s via a Cholesky solve of the pattern Gram; inf when singular.

    tr(G^{-1}) = ||L^{-1}||_F^2 for G = L L'.  A failed or suspicious
    factorization (pivot ratio at the singularity threshold) falls back to the
    eigenvalue route, which owns the singular/finite decision.
    """
    a_s = _canonical_submatrix(frame, pattern)
    g = a_s @ a_s.conj().T
    g = (g + g.conj().T) / 2.0
    try:
        low, lower = cho_factor(g, lower=True, check_finite=False)
    except LinAlgError:
        return gram_eigenvalues(frame, pattern).eta
    d = np.abs(np.diag(low))
    # pivots are sqrt-eigenvalue-like; stay an order away from the threshold
    if d.min() ** 2 <= 1e2 * SINGULARITY_RATIO * d.max() ** 2:
        return gram_eigenvalues(frame, pattern).eta
    inv_low = solve_triangular(low, np.eye(g.shape[0], dtype=g.dtype),
                               lower=True, check_finite=False)
    return float(np.real(np.vdot(inv_low, inv_low))) / frame.m


# --- Marchenko--Pastur (i.i.d. frames), aspect ratio 1/beta ------------------

def mp_edges(beta):
    c = 1.0 / beta
    return (1.0 - math.sqrt(c)) ** 2, (1.0 + math.sqrt(c)) ** 2


def mp_density(x, beta):
    """Marchenko--Pastur density for Gram eigenvalues of a k x m i.i.d. matrix
    with entry variance 1/m, at ratio k/m = 1/beta (mean eigenvalue 1)."""
    if beta < 1.0:
        raise ValueError("beta >= 1 required (k <= m)")
    lo, hi = mp_edges(beta)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > lo) & (x < hi)
    xi = x[inside]
    out[inside] = beta * np.sqrt((hi - xi) * (xi - lo)) / (2.0 * np.pi * xi)
    return out if out.ndim else float(out)


def mp_eta_limit(beta):
    """Limit of eta for i.i.d. frames: 1/(beta-1); inf at beta <= 1, where the
    support of the spectral law touches zero."""
    if beta <= 1.0:
        return math.inf
    return 1.0 / (beta - 1.0)


# --- MANOVA (random-spectrum / DSS frames) ----------------------------------

def manova_edges(m_over_n, beta):
    w = m_over_n
    r = math.sqrt((1.0 - w) / beta)
    t = math.sqrt(1.0 - w / beta)
    return (r - t) ** 2, (r + t) ** 2


def _check_manova_params(m_over_n, beta, allow_sub_unit_beta=False):
    w = m_over_n
    if not 0.0 < w < 1.0:
        raise ValueError("need 0 < m/n < 1")
    if beta < 1.0 and not allow_sub_unit_beta:
        raise ValueError("beta >= 1 required")
    if beta > 1.0 / w:
        raise ValueError("beta cannot exceed n/m (k >= 1 rows of n)")
    # k + m > n forces rank overlap between the selected rows and the frame's
    # column space, putting a point mass at n/m that the continuous density
    # misses.  Only possible when m/n > 1/2.
    if 1.0 <= beta < w / (1.0 - w):
        raise ValueError("k + m > n: spectral law has a point mass at n/m, "
                         "continuous density alone does not apply")


def manova_density(x, m_over_n, beta):
    """Limiting eigenvalue density of A_s A_s' for random row subsets (ratio
    1/beta) of random column subsets (ratio m/n) of a scaled unitary DFT."""
    _check_manova_params(m_over_n, beta)
    lo, hi = manova_edges(m_over_n, beta)
    w = m_over_n
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = (x > lo) & (x < hi)
    xi = x[inside]
    out[inside] = beta * np.sqrt((xi - lo) * (hi - xi)) / (2.0 * np.pi * xi * (1.0 - w * xi))
    return out if out.ndim else float(out)


def manova_eta_limit(beta, m_over_n=0.5):
    """Limiting eta for DFT-spectrum frames: the 1/x moment of the MANOVA law
    scaled by 1/beta, by adaptive quadrature (relative tolerance 1e-8).

    At beta <= 1 the support reaches zero and the moment diverges (inf).
    At m/n = 1/2 the integrand reduces to
    sqrt(c^2 - (x-1)^2) / (pi x^2 (2-x)),  c = sqrt((1/beta)(2 - 1/beta)),
    on [1-c, 1+c]; the general ratio goes through the density directly.
    """
    _check_manova_params(m_over_n, beta, allow_sub_unit_beta=True)
    if beta <= 1.0:
        return math.inf
    lo, hi = manova_edges(m_over_n, beta)
    if m_over_n == 0.5:
        c = math.sqrt((1.0 / beta) * (2.0 - 1.0 / beta))

        def integrand(x):
            return math.sqrt(max(c * c - (x - 1.0) ** 2, 0.0)) / (math.pi * x * x * (2.0 - x))
    else:
        def integrand(x):
            return manova_density(x, m_over_n, beta) / (beta * x)

    val, _ = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-10, limit=200)
    return val


# --- empirical spectra -------------------------------------------------------

@dataclass(frozen=True)
class EigenHistogram:
    """Area-1 histogram of Gram eigenvalues over random patterns."""

    bin_edges: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    n_samples: int
    min_eigenvalue: float
    max_eigenvalue: float
    trials: int
    seed: int

    @property
    def bin_centers(self):
        return (self.bin_edges[:-1] + self.bin_edges[1:]) / 2.0


def eigen_histogram(frame, k, trials, bins=100, seed=0, value_range=None) -> EigenHistogram:
    """Aggregate eigenvalues of A_s A_s' over `trials` uniform random patterns.

    Default range [0, n/m] covers the DFT-spectrum support; i.i.d. frames
    spill past n/m, so pass an explicit range there.  Per-trial RNG streams
    are derived from (seed, trial), so the aggregate is independent of
    evaluation order.
    """
    from .patterns import sample_pattern  # deferred: patterns imports spectral

    if k > frame.m:
        raise ValueError(f"k={k} exceeds m={frame.m}")
    if value_range is None:
        value_range = (0.0, frame.n / frame.m)
    all_w = []
    for t in range(trials):
        s = sample_pattern(frame.n, k, seed=(seed, t))
        all_w.append(gram_eigenvalues(frame, s).eigenvalues)
    w = np.concatenate(all_w)
    counts, edges = np.histogram(w, bins=bins, range=value_range)
    total = counts.sum()
    widths = np.diff(edges)
    density = counts / (total * widths) if total else np.zeros(bins)
    return EigenHistogram(
        bin_edges=edges,
        density=density,
        counts=counts,
        n_samples=int(w.size),
        min_eigenvalue=float(w.min()),
        max_eigenvalue=float(w.max()),
        trials=trials,
        seed=seed,
    )


def l1_density_distance(hist, density_fn, subdivisions=16):
    """L1 distance between an empirical histogram and a reference density,
    both seen as piecewise-constant on the histogram bins."""
    edges = hist.bin_edges
    ref = np.empty(len(edges) - 1)
    for i in range(len(ref)):
        xs = np.linspace(edges[i], edges[i + 1], subdivisions + 1)
        ys = np.asarray(density_fn(xs), dtype=float)
        ref[i] = np.trapezoid(ys, xs) / (edges[i + 1] - edges[i])
    return float(np.sum(np.abs(hist.density - ref) * np.diff(edges)))
