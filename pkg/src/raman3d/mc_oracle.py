"""Brute-force Monte-Carlo ensemble averages over sampled atom positions.

This module never touches the closed forms of :mod:`raman3d.signal_mode` or
:mod:`raman3d.noise_engine`; it averages the raw position-dependent phases
and pump profile directly, so agreement between the two is a genuine check.

Positions: x, y ~ N(0, R0²/2) each (density ∝ exp(-ρ²/R0²)), z ~ U[-L/2, L/2].
Pump profile: u⊥(r) = exp(-ρ²/r0²), identically 1 for an infinite pump radius.

Random streams
--------------
Batch ``b`` of a run with seed ``s`` draws from ``numpy.random.Philox`` keyed
by ``(b << 64) | s``.  Every batch is therefore an independent, reproducible
stream no matter which worker evaluates it or in what order, and per-batch
partial sums are reduced in batch order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import _backend
from .core_model import EnsembleGeometry, PumpBeam, derive_scales
from .errors import DomainError

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SampleConfig:
    n_samples: int = 1_000_000
    seed: int = 0
    batch_size: int = 50_000
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1000:
            raise DomainError("n_samples must be at least 1000")
        if self.batch_size < 1 or self.n_samples % self.batch_size:
            raise DomainError("batch_size must divide n_samples")
        if not (0 <= int(self.seed) <= _SEED_MASK):
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise DomainError("workers must be positive")

    @property
    def n_batches(self) -> int:
        return self.n_samples // self.batch_size


@dataclass(frozen=True)
class McEstimate:
    """Sample mean with its standard error.

    For complex estimates ``std_error`` refers to the real part and
    ``std_error_imag`` to the imaginary part.
    """

    mean: complex | float
    std_error: float
    n: int
    std_error_imag: float | None = None

    def z_score(self, reference: float) -> float:
        diff = float(np.real(self.mean)) - reference
        if self.std_error == 0.0:
            return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return diff / self.std_error

    def to_json(self) -> dict:
        out = asdict(self)
        if isinstance(self.mean, complex):
            out["mean"] = [self.mean.real, self.mean.imag]
        return out


# ---------------------------------------------------------------- sampling

def batch_generator(seed: int, batch: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(batch) << 64) | (int(seed) & _SEED_MASK)))


def _batch_positions(geom: EnsembleGeometry, seed: int, batch: int, size: int):
    rng = batch_generator(seed, batch)
    sd = geom.radius_R0 / math.sqrt(2.0)
    x = rng.normal(0.0, sd, size)
    y = rng.normal(0.0, sd, size)
    z = rng.uniform(-0.5 * geom.length_L, 0.5 * geom.length_L, size)
    return x, y, z, rng


def sample_positions(geom: EnsembleGeometry, cfg: SampleConfig):
    """All sampled positions as three arrays (x, y, z), batches concatenated in order."""
    parts = [_batch_positions(geom, cfg.seed, b, cfg.batch_size)[:3] for b in range(cfg.n_batches)]
    return tuple(np.concatenate([p[i] for p in parts]) for i in range(3))


def _pump_profile(x, y, pump: PumpBeam):
    if pump.is_broad:
        return np.ones_like(x)
    return np.exp(-(x * x + y * y) / pump.radius_r0**2)


def _map_batches(fn, cfg: SampleConfig):
    """fn(batch_index) for every batch, results in batch order."""
    if cfg.workers == 1:
        return [fn(b) for b in range(cfg.n_batches)]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(fn, range(cfg.n_batches)))


def _mean_and_error(total, total2, n):
    mean = total / n
    var = max(total2 / n - mean * mean, 0.0) * n / (n - 1)
    return mean, math.sqrt(var / n)


# ---------------------------------------------------------------- F and G

def _mode_batches(thetas, phi, geom, pump, cfg):
    k0 = 2.0 * math.pi / pump.wavelength_lambda0
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))

    def run(b):
        x, y, z, _ = _batch_positions(geom, cfg.seed, b, cfg.batch_size)
        u = _pump_profile(x, y, pump)
        return np.array(_backend.kernels.mode_sums(x, y, z, u, k0, thetas, float(phi)))

    return np.array(_map_batches(run, cfg))  # (batch, 4, angle)


def estimate_F(theta, phi, geom: EnsembleGeometry, pump: PumpBeam, cfg: SampleConfig) -> McEstimate:
    """⟨u⊥ exp(i k0 z(1-cosθ) - i k0 sinθ (x cosφ + y sinφ))⟩ over sampled atoms."""
    if not (0.0 <= theta <= math.pi):
        raise DomainError("theta must lie in [0, pi]")
    sums = _mode_batches([theta], phi, geom, pump, cfg).sum(axis=0)[:, 0]
    n = cfg.n_samples
    re, se_re = _mean_and_error(sums[0], sums[2], n)
    im, se_im = _mean_and_error(sums[1], sums[3], n)
    return McEstimate(complex(re, im), se_re, n, se_im)


def estimate_G(theta, theta_p, delta_phi, geom: EnsembleGeometry, pump: PumpBeam,
               cfg: SampleConfig) -> McEstimate:
    """⟨|u⊥|² exp(-i(k-k')·r)⟩ with k, k' at polar angles θ, θ' and azimuths 0, Δφ."""
    return _corr(theta, theta_p, lambda rng, size: np.full(size, float(delta_phi)), geom, pump, cfg)


def estimate_G_averaged(theta, theta_p, geom: EnsembleGeometry, pump: PumpBeam,
                        cfg: SampleConfig) -> McEstimate:
    """G averaged over the relative azimuth: Δφ is drawn uniformly per sample."""
    return _corr(theta, theta_p, lambda rng, size: rng.uniform(0.0, 2.0 * math.pi, size), geom, pump, cfg)


def _corr(theta, theta_p, draw_dphi, geom, pump, cfg):
    for t in (theta, theta_p):
        if not (0.0 <= t <= math.pi):
            raise DomainError("polar angles must lie in [0, pi]")
    k0 = 2.0 * math.pi / pump.wavelength_lambda0

    def run(b):
        x, y, z, rng = _batch_positions(geom, cfg.seed, b, cfg.batch_size)
        u = _pump_profile(x, y, pump)
        dphi = draw_dphi(rng, cfg.batch_size)
        return _backend.kernels.corr_sums(x, y, z, u * u, k0, float(theta), float(theta_p), dphi)

    sums = np.sum(_map_batches(run, cfg), axis=0)
    n = cfg.n_samples
    re, se_re = _mean_and_error(sums[0], sums[2], n)
    im, se_im = _mean_and_error(sums[1], sums[3], n)
    return McEstimate(complex(re, im), se_re, n, se_im)


# ---------------------------------------------------------------- angular integrals

@dataclass(frozen=True)
class AngularGrid:
    """Gauss-Legendre rule on [0, theta_cut] for the forward-cone integrals."""

    n_nodes: int = 64
    cut_in_theta_f: float = 10.0

    def nodes(self, scales, theta_max=math.pi):
        top = min(theta_max, self.cut_in_theta_f * scales.theta_f, math.pi)
        x, w = leggauss(self.n_nodes)
        return 0.5 * top * (x + 1.0), 0.5 * top * w


def estimate_ratio_pc_p2(geom: EnsembleGeometry, pump: PumpBeam, cfg: SampleConfig,
                         angular_spec: AngularGrid = AngularGrid(), phis=(0.0, 0.5 * math.pi)) -> McEstimate:
    """∫|⟨u e^{iΔk·r}⟩|² dΩ / ∫(⟨|u|²⟩ - |⟨u e^{iΔk·r}⟩|²) dΩ from sampled atoms.

    |⟨…⟩|² is estimated without bias as (|Σ|² - Σ|·|²)/(n(n-1)); the same
    positions are reused at every angle (common random numbers).  The result
    is the full ratio including the forward-cone subtraction in the
    denominator, i.e. r/(1-r) in terms of the large-k0L closed form r.
    """
    scales = derive_scales(geom, pump)
    thetas, weights = angular_spec.nodes(scales)
    w_omega = 2.0 * math.pi * weights * np.sin(thetas) / len(phis)
    k0 = scales.k0

    def run(b):
        x, y, z, _ = _batch_positions(geom, cfg.seed, b, cfg.batch_size)
        u = _pump_profile(x, y, pump)
        rows = []
        for phi in phis:
            sre, sim, sre2, sim2 = _backend.kernels.mode_sums(x, y, z, u, k0, thetas, float(phi))
            rows.append(np.concatenate([sre, sim, sre2 + sim2]))
        # the ⟨|u|²⟩ sum is appended so the denominator is estimated from the same atoms
        return np.concatenate([np.concatenate(rows), [np.sum(u * u)]])

    per_batch = np.array(_map_batches(run, cfg))
    m = len(thetas)
    n = cfg.n_samples

    # delete-one-batch jackknife; leave-one-out sums contain fewer atoms
    def stat(s, count):
        num = 0.0
        for p in range(len(phis)):
            block = s[3 * m * p: 3 * m * (p + 1)]
            sre, sim, sq = block[:m], block[m:2 * m], block[2 * m:]
            f2 = (sre * sre + sim * sim - sq) / (count * (count - 1))
            num += float(np.dot(w_omega, f2))
        return num / (4.0 * math.pi * s[-1] / count - num)

    k = per_batch.shape[0]
    total = per_batch.sum(axis=0)
    full = stat(total, n)
    loo = np.array([stat(total - per_batch[i], n - cfg.batch_size) for i in range(k)])
    mean = k * full - (k - 1) * loo.mean()
    err = math.sqrt((k - 1) / k * np.sum((loo - loo.mean()) ** 2))
    return McEstimate(float(mean), float(err), n)


def estimate_chi(geom: EnsembleGeometry, pump: PumpBeam, cfg: SampleConfig, theta_max: float = math.pi,
                 angular_spec: AngularGrid = AngularGrid()) -> McEstimate:
    """χ from χ+1 = ⟨|u|² |H(r)|²⟩ / (∫|f|² dΩ)², H(r) = ∫ f(Ω) e^{-iΔk·r} dΩ.

    The detected mode f is taken from the Gaussian-cell amplitude; only the
    correlation average over atoms is sampled.  The azimuthal part of H is
    done exactly, 2π J0(k0 ρ sinθ).
    """
    scales = derive_scales(geom, pump)
    thetas, weights = angular_spec.nodes(scales, theta_max)
    s, h = np.sin(thetas), np.sin(0.5 * thetas) ** 2
    f = scales.amplitude_prefactor * np.exp(-0.25 * scales.k0_reff_sq * s * s) * np.sinc(scales.k0L * h / math.pi)
    coef = 2.0 * math.pi * weights * s * f
    norm = float(np.dot(coef, f))

    def run(b):
        x, y, z, _ = _batch_positions(geom, cfg.seed, b, cfg.batch_size)
        u = _pump_profile(x, y, pump)
        return _backend.kernels.chi_sums(x, y, z, u * u, scales.k0, thetas, coef)

    sums = np.sum(_map_batches(run, cfg), axis=0)
    mean, err = _mean_and_error(sums[0], sums[1], cfg.n_samples)
    return McEstimate(mean / norm**2 - 1.0, err / norm**2, cfg.n_samples)


def oracle_record(name: str, estimate: McEstimate, closed_form: float) -> dict:
    """One JSON-ready line of an oracle report."""
    return {
        "name": name,
        "estimate": float(np.real(estimate.mean)),
        "std_error": estimate.std_error,
        "closed_form": float(closed_form),
        "z": estimate.z_score(float(closed_form)),
        "n": estimate.n,
    }

