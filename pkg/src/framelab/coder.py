"""End-to-end Monte Carlo simulation of the analog coding chain.

Per trial: the k important samples x_s are expanded through the pseudo-inverse
B_s into m transformed samples f, white quantization noise q is added, and the
decoder applies the frame and a scalar Wiener factor:

    x_hat_s = alpha A_s (f + q),  B_s = A_s'(A_s A_s')^{-1},  A_s B_s = I.

Validated model quantities: distortion sigma_x^2 sigma_q^2/(sigma_x^2+sigma_q^2),
transformed-sample energy (1/m)E||f||^2 = eta_s sigma_x^2, and the rate
(m/n)(1/2) log2(1 + energy/sigma_q^2).  Complex frames use circularly-symmetric
complex Gaussians with the same per-sample variances, so the scalar identities
carry over unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from . import spectral
from .patterns import sample_pattern
from .rd import wiener_alpha, wiener_distortion

__all__ = ["SingularPatternError", "encoder_matrix", "PatternTally", "CoderReport", "simulate"]


class SingularPatternError(ValueError):
    """Pattern submatrix is rank deficient; no pseudo-inverse encoder."""


def encoder_matrix(frame, pattern):
    """Pseudo-inverse B_s = A_s'(A_s A_s')^{-1} (m x k), via a Cholesky solve.

    ||B_s||_F^2 / m equals the inverse energy eta_s.
    """
    idx = tuple(int(i) for i in getattr(pattern, "indices", pattern))
    a_s = frame.submatrix(idx)
    g = a_s @ a_s.conj().T
    g = (g + g.conj().T) / 2.0
    try:
        factor = cho_factor(g, lower=True, check_finite=False)
    except LinAlgError:
        raise SingularPatternError(f"pattern {idx} has a singular Gram") from None
    d = np.abs(np.diag(factor[0]))
    if d.min() ** 2 <= 1e2 * spectral.SINGULARITY_RATIO * d.max() ** 2:
        raise SingularPatternError(f"pattern {idx} is numerically rank deficient")
    return cho_solve(factor, a_s, check_finite=False).conj().T


@dataclass
class PatternTally:
    """Per-pattern accumulator for the energy identity check."""

    eta: float
    count: int = 0
    f_energy_sum: float = 0.0
    f_energy_sqsum: float = 0.0

    @property
    def f_energy_mean(self):
        return self.f_energy_sum / self.count

    @property
    def f_energy_se(self):
        mean = self.f_energy_mean
        var = self.f_energy_sqsum / self.count - mean * mean
        return math.sqrt(max(var, 0.0) / self.count)


@dataclass(frozen=True)
class CoderReport:
    empirical_distortion: float
    model_distortion: float
    empirical_f_energy: float
    model_f_energy: float
    empirical_rate: float
    max_interp_error: float  # largest per-trial reconstruction error (q=0 diagnostics)
    alpha: float
    sigma_x2: float
    sigma_q2: float
    trials: int
    seed: int
    n: int
    m: int
    k: int
    singular_skipped: int
    per_pattern: dict = field(repr=False)


def _draw(rng, size, variance, complex_field):
    if variance == 0.0:
        return np.zeros(size, dtype=complex if complex_field else float)
    if complex_field:
        z = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return z * math.sqrt(variance / 2.0)
    return rng.standard_normal(size) * math.sqrt(variance)


def simulate(frame, k, sigma_x2, sigma_q2, trials, seed=0, pattern=None) -> CoderReport:
    """Run the coding chain over `trials` draws and report empirical vs model
    quantities.

    With `pattern` fixed, every trial reuses that pattern and its cached
    encoder; otherwise each trial draws a uniform pattern from a per-trial
    substream (seed, t).  Trials whose sampled pattern is singular are counted
    in singular_skipped and excluded from the averages.
    """
    n, m = frame.n, frame.m
    if k > m:
        raise ValueError(f"k={k} exceeds m={m}")
    complex_field = frame.field == "complex"
    alpha = wiener_alpha(sigma_x2, sigma_q2)
    cache = {}  # pattern indices -> (A_s, B_s, eta) or None when singular

    def lookup(idx):
        if idx not in cache:
            try:
                b = encoder_matrix(frame, idx)
            except SingularPatternError:
                cache[idx] = None
            else:
                cache[idx] = (frame.submatrix(idx), b,
                              float(np.vdot(b, b).real) / m)
        return cache[idx]

    fixed = None
    if pattern is not None:
        fixed = tuple(int(i) for i in getattr(pattern, "indices", pattern))
        if len(fixed) != k:
            raise ValueError("fixed pattern size disagrees with k")
        if lookup(fixed) is None:
            raise SingularPatternError(f"fixed pattern {fixed} is singular")
    elif k == n:
        fixed = tuple(range(n))
        if lookup(fixed) is None:
            raise SingularPatternError("the full pattern is singular")

    tallies = {}
    sq_err_sum = 0.0
    f_energy_sum = 0.0
    max_interp = 0.0
    used = 0
    skipped = 0

    if fixed is not None:
        # single pattern: one stream, vectorized over trials
        a_s, b, eta = lookup(fixed)
        tally = tallies.setdefault(fixed, PatternTally(eta=eta))
        rng = np.random.default_rng(seed)
        x = _draw(rng, (trials, k), sigma_x2, complex_field)
        q = _draw(rng, (trials, m), sigma_q2, complex_field)
        f = x @ b.T
        xhat = alpha * (f + q) @ a_s.T
        err = np.abs(xhat - x) ** 2
        fe = np.sum(np.abs(f) ** 2, axis=1) / m
        sq_err_sum = float(err.sum())
        f_energy_sum = float(fe.sum())
        max_interp = float(np.sqrt(err.sum(axis=1).max()))
        tally.count = trials
        tally.f_energy_sum = f_energy_sum
        tally.f_energy_sqsum = float((fe * fe).sum())
        used = trials
    else:
        for t in range(trials):
            rng = np.random.default_rng((seed, t))
            idx = sample_pattern(n, k, seed=(seed, t, 1)).indices
            entry = lookup(idx)
            if entry is None:
                skipped += 1
                continue
            a_s, b, eta = entry
            tally = tallies.setdefault(idx, PatternTally(eta=eta))
            x = _draw(rng, k, sigma_x2, complex_field)
            q = _draw(rng, m, sigma_q2, complex_field)
            f = b @ x
            xhat = alpha * (a_s @ (f + q))
            err = float(np.sum(np.abs(xhat - x) ** 2))
            fe = float(np.sum(np.abs(f) ** 2)) / m
            sq_err_sum += err
            f_energy_sum += fe
            max_interp = max(max_interp, math.sqrt(err))
            tally.count += 1
            tally.f_energy_sum += fe
            tally.f_energy_sqsum += fe * fe
            used += 1

    if used == 0:
        raise SingularPatternError("every sampled pattern was singular")
    emp_d = sq_err_sum / (used * k)
    emp_energy = f_energy_sum / used
    if sigma_q2 > 0.0:
        emp_rate = (m / n) * 0.5 * math.log2(1.0 + emp_energy / sigma_q2)
    else:
        emp_rate = math.inf
    model_energy = math.fsum(t.eta * t.count for t in tallies.values()) / used * sigma_x2
    return CoderReport(
        empirical_distortion=emp_d,
        model_distortion=wiener_distortion(sigma_x2, sigma_q2),
        empirical_f_energy=emp_energy,
        model_f_energy=model_energy,
        empirical_rate=emp_rate,
        max_interp_error=max_interp,
        alpha=alpha,
        sigma_x2=sigma_x2,
        sigma_q2=sigma_q2,
        trials=trials,
        seed=seed,
        n=n,
        m=m,
        k=k,
        singular_skipped=skipped,
        per_pattern=tallies,
    )
