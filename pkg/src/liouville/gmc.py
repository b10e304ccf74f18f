"""Monte Carlo evaluation of correlations through Gaussian multiplicative chaos.

The sphere field is ``X = P phi + X_D`` on the unit disk and an independent
copy of the Dirichlet part outside it, both sharing the circle field
``phi(theta) = sum_{n != 0} phi_n e^{i n theta}``.  In the coordinates
``z = e^{-t + i theta}`` (inside) and ``z = e^{t + i theta}`` (outside),

    X(t, theta) = B_t + 2 Re sum_{n=1}^{N} (X_n(t) + phi_n e^{-n t}) e^{i n theta}

with ``B`` a standard Brownian motion and ``X_n(t) = U_n(t) - e^{-n t} U_n(0)``
for a stationary complex Ornstein-Uhlenbeck process ``U_n`` of rate ``n`` and
``E|U_n|^2 = 1/(2n)``.  The truncated variance is ``|ln|z|| + H_N``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import ConditionError
from .special import LiouvilleParams, conformal_weight, dozz

__all__ = [
    "Grid",
    "GffSample",
    "GmcConfig",
    "GmcEstimate",
    "SeibergReport",
    "MobiusReport",
    "sample_gff",
    "gmc_weight",
    "truncated_variance",
    "truncated_covariance",
    "seiberg_check",
    "correlation_mc",
    "mobius_check",
    "compare_with_dozz",
]

_CHUNK = 16


@dataclass(frozen=True)
class Grid:
    """Polar midpoint grid, identical on both hemispheres."""

    n_theta: int = 256
    dt: float = 1.0 / 64
    t_max: float = 6.0

    def __post_init__(self):
        if self.n_theta < 2 or self.dt <= 0 or self.t_max <= 0:
            raise ValueError("invalid grid")

    @property
    def n_t(self) -> int:
        return int(round(self.t_max / self.dt))

    @property
    def t(self) -> np.ndarray:
        return (np.arange(self.n_t) + 0.5) * self.dt

    @property
    def theta(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * (2 * np.pi / self.n_theta)

    def points(self) -> np.ndarray:
        """Midpoints with shape ``(2, n_t, n_theta)``; index 0 is the inner disk."""
        t = self.t[:, None]
        e = np.exp(1j * self.theta)[None, :]
        return np.stack([np.exp(-t) * e, np.exp(t) * e])

    def log_measure(self) -> np.ndarray:
        """``log`` of ``int_cell dz / |z|_+^4`` per radial row (same on both hemispheres)."""
        lo = np.arange(self.n_t) * self.dt
        # int e^{-2t} dt over [lo, lo + dt] times the angular width
        return -2 * lo + np.log(-np.expm1(-2 * self.dt) / 2) + np.log(2 * np.pi / self.n_theta)

    def total_measure(self) -> float:
        return 2 * np.pi * -np.expm1(-2 * self.n_t * self.dt)

    def check_point(self, z: complex):
        r = abs(z)
        if r == 0 or not math.exp(-self.n_t * self.dt) < r < math.exp(self.n_t * self.dt):
            raise ConditionError(f"insertion {z} lies outside the resolved annulus")
        t = abs(math.log(r))
        k = t / self.dt - 0.5
        j = (math.atan2(z.imag, z.real) % (2 * math.pi)) / (2 * math.pi / self.n_theta) - 0.5
        if abs(k - round(k)) < 1e-9 and abs(j - round(j)) < 1e-9:
            raise ConditionError(f"insertion {z} sits on a grid midpoint")


@dataclass
class GffSample:
    """One joint sample: ``field[h, k, j]`` at hemisphere ``h``, radial row ``k``, angle ``j``."""

    phi: np.ndarray
    field: np.ndarray
    grid: Grid
    N_modes: int

    def circle(self, theta) -> np.ndarray:
        """Truncated boundary field ``phi(theta)``."""
        n = np.arange(1, self.N_modes + 1)
        theta = np.asarray(theta, dtype=float)
        return 2 * np.real(np.exp(1j * np.multiply.outer(theta, n)) @ self.phi)


def _draw(seed: int, index: int, N: int, n_t: int) -> np.ndarray:
    """Standard normals for one sample: ``phi`` pairs, then per hemisphere OU pairs and Brownian increments."""
    # counter-based stream: key from the seed, sample index in the high counter word
    counter = np.array([0, 0, 0, index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=seed, counter=counter))
    return rng.standard_normal(2 * N + 2 * (2 * N * n_t + n_t))


def _fields(seed: int, indices, N: int, grid: Grid):
    """Field values for a block of sample indices: ``(phi, field)`` with field shape ``(B, 2, n_t, n_theta)``.

    ``X_n(t) + phi_n e^{-n t}`` is an Ornstein-Uhlenbeck path started at
    ``phi_n``, so it is generated directly by the recursion without the
    stationary start ``U_n(0)``.
    """
    n_t, M = grid.n_t, grid.n_theta
    if M < 2 * N:
        raise ValueError("angular resolution must be at least 2 * N_modes")
    B = len(indices)
    per = 2 * N * n_t + n_t
    noise = np.empty((B, 2 * N + 2 * per))
    for row, i in enumerate(indices):
        noise[row] = _draw(seed, int(i), N, n_t)
    n = np.arange(1, N + 1, dtype=float)
    phi = noise[:, : 2 * N].view(complex) / (2 * np.sqrt(n))
    h = grid.dt
    rho = np.exp(-n * h)
    # midpoint offsets e^{i n pi / M} folded into the (real-coefficient) recursion
    phase = np.exp(1j * np.pi * n / M)
    sd_half = np.sqrt(-np.expm1(-n * h) / (4 * n)) * phase
    sd = np.sqrt(-np.expm1(-2 * n * h) / (4 * n)) * phase
    start = np.exp(-n * h / 2) * phase * phi
    out = np.empty((B, 2, n_t, M))
    spec = np.zeros((B, n_t, M // 2 + 1), dtype=complex)
    V = spec[:, :, 1 : N + 1]
    for hemi in range(2):
        block = noise[:, 2 * N + hemi * per : 2 * N + (hemi + 1) * per]
        V[:] = block[:, : 2 * N * n_t].view(complex).reshape(B, n_t, N)
        V[:, 0] *= sd_half
        V[:, 0] += start
        V[:, 1:] *= sd
        for k in range(1, n_t):
            V[:, k] += rho * V[:, k - 1]
        if 2 * N == M:
            # irfft keeps only the real part of the Nyquist bin and does not double it
            spec[:, :, N] *= 2
        out[:, hemi] = np.fft.irfft(spec, n=M, axis=-1)
        out[:, hemi] *= M
        bm = block[:, 2 * N * n_t :] * math.sqrt(h)
        bm[:, 0] *= math.sqrt(0.5)
        np.cumsum(bm, axis=1, out=bm)
        out[:, hemi] += bm[:, :, None]
    return phi, out


def sample_gff(seed: int, N_modes: int = 128, grid: Grid | None = None, index: int = 0) -> GffSample:
    """Joint sample of the truncated sphere field; deterministic in ``(seed, index)``."""
    grid = grid or Grid()
    if N_modes < 1:
        raise ValueError("N_modes must be positive")
    phi, f = _fields(seed, [index], N_modes, grid)
    return GffSample(phi[0], f[0], grid, N_modes)


def truncated_variance(z, N_modes: int) -> float:
    return abs(math.log(abs(z))) + float(np.sum(1.0 / np.arange(1, N_modes + 1)))


def truncated_covariance(z, w, N_modes: int) -> float:
    """Exact covariance of the mode-truncated field at two points."""
    z, w = complex(z), complex(w)
    n = np.arange(1, N_modes + 1)
    tz, tw = math.log(abs(z)), math.log(abs(w))
    dth = math.atan2(z.imag, z.real) - math.atan2(w.imag, w.real)
    cos = np.cos(n * dth)
    # reduce both to disk coordinates t >= 0
    inside_z, inside_w = tz < 0, tw < 0
    a, b = abs(tz), abs(tw)
    pphi = float(np.sum(np.exp(-n * (a + b)) * cos / n))
    if inside_z != inside_w:
        return pphi
    dirichlet = min(a, b) + float(np.sum((np.exp(-n * abs(a - b)) - np.exp(-n * (a + b))) * cos / n))
    return pphi + dirichlet


def gmc_weight(sample: GffSample, gamma: float) -> np.ndarray:
    """Cell weights ``exp(gamma X - gamma^2 Var_N / 2) * int_cell dz / |z|_+^4``, shape ``(2, n_t, n_theta)``."""
    if not 0 <= gamma < 2:
        raise ValueError("gamma must lie in [0, 2)")
    grid = sample.grid
    var = grid.t + float(np.sum(1.0 / np.arange(1, sample.N_modes + 1)))
    logw = gamma * sample.field - 0.5 * gamma**2 * var[None, :, None] + grid.log_measure()[None, :, None]
    return np.exp(logw)


@dataclass
class SeibergReport:
    passed: bool
    sum_margin: float  # sum(alpha) - 2Q
    max_margin: float  # Q - max(alpha)
    n: int

    def __bool__(self):
        return self.passed


def seiberg_check(alphas, params: LiouvilleParams) -> SeibergReport:
    a = [float(x) for x in alphas]
    Q = params.Q
    sm = sum(a) - 2 * Q
    mm = Q - max(a) if a else -math.inf
    return SeibergReport(sm > 0 and mm > 0, sm, mm, len(a))


@dataclass
class GmcConfig:
    gamma: float
    mu: float
    insertions: list  # [(z, alpha), ...]
    N_modes: int = 128
    grid: Grid = field(default_factory=Grid)
    n_samples: int = 4096
    seed: int = 0
    n_batches: int = 32
    workers: int = 1
    regularization: str = "truncated"

    def to_json(self) -> dict:
        d = asdict(self)
        d["insertions"] = [[complex(z).real, complex(z).imag, float(a)] for z, a in self.insertions]
        return d

    @classmethod
    def from_json(cls, data: dict) -> "GmcConfig":
        data = dict(data)
        data["insertions"] = [(complex(x, y), a) for x, y, a in data["insertions"]]
        data["grid"] = Grid(**data.get("grid", {}))
        return cls(**data)

    @classmethod
    def load(cls, path) -> "GmcConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class GmcEstimate:
    value: float
    std_error: float
    s: float
    mean_Z_power: float
    batch_means: list
    config: GmcConfig

    @property
    def relative_error(self) -> float:
        return self.std_error / abs(self.value)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "s": self.s,
            "mean_Z_power": self.mean_Z_power,
            "batch_means": self.batch_means,
            "config": self.config.to_json(),
        }


def _truncated_green(grid: Grid, z: complex, N: int) -> np.ndarray:
    """``G_N(x, z) - ln|z|_+`` at every midpoint ``x``: the mode-truncated covariance
    with the ``z``-only term removed, which tends to ``ln|x|_+ - ln|x - z|``."""
    tz = math.log(abs(z))
    hz, az = int(tz > 0), abs(tz)
    t = grid.t[:, None]
    dth = grid.theta[None, :] - math.atan2(z.imag, z.real)
    out = np.empty((2, grid.n_t, grid.n_theta))
    for h in range(2):
        same = h == hz
        q = np.exp(-np.abs(t - az)) if same else np.exp(-(t + az))
        w = q * np.exp(1j * dth)
        acc = np.zeros(w.shape, dtype=complex)
        wn = np.ones(w.shape, dtype=complex)
        for n in range(1, N + 1):
            wn *= w
            acc += wn / n
        out[h] = acc.real + (np.minimum(t, az) if same else 0.0) - max(tz, 0.0)
    return out


def _log_insertion_factor(grid: Grid, insertions, gamma: float, N: int | None = None) -> np.ndarray:
    """``sum_i gamma a_i (ln|x|_+ - ln|x - z_i|)`` at midpoints, or its mode-truncated version when ``N`` is given."""
    pts = grid.points()
    log_plus = np.maximum(np.log(np.abs(pts)), 0.0)
    out = np.zeros(pts.shape)
    for z, a in insertions:
        if N is None:
            out += gamma * a * (log_plus - np.log(np.abs(pts - z)))
        else:
            out += gamma * a * _truncated_green(grid, complex(z), N)
    return out


def _log_Z(cfg: GmcConfig, roll: int = 0) -> np.ndarray:
    """``log Z`` per sample index, in index order."""
    grid = cfg.grid
    gamma = cfg.gamma
    H = float(np.sum(1.0 / np.arange(1, cfg.N_modes + 1)))
    base = (
        -0.5 * gamma**2 * (grid.t + H)[None, :, None]
        + grid.log_measure()[None, :, None]
        + _log_insertion_factor(grid, cfg.insertions, gamma, cfg.N_modes if cfg.regularization == "truncated" else None)
    )
    chunks = [range(i, min(i + _CHUNK, cfg.n_samples)) for i in range(0, cfg.n_samples, _CHUNK)]

    def run(idx):
        _, f = _fields(cfg.seed, idx, cfg.N_modes, grid)
        if roll:
            f = np.roll(f, roll, axis=-1)
        f *= gamma
        f += base
        # exponents stay far from overflow at chaos variances of order ten
        np.exp(f, out=f)
        return np.log(f.sum(axis=(1, 2, 3)))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(c) for c in chunks]
    return np.concatenate(parts)


def _validate(cfg: GmcConfig, params: LiouvilleParams) -> float:
    if len(cfg.insertions) < 3:
        raise ConditionError("at least three insertions are required")
    alphas = [a for _, a in cfg.insertions]
    report = seiberg_check(alphas, params)
    if not report:
        raise ConditionError(
            f"Seiberg bounds violated: sum margin {report.sum_margin:.6g}, max margin {report.max_margin:.6g}"
        )
    zs = [complex(z) for z, _ in cfg.insertions]
    if len(set(zs)) != len(zs):
        raise ConditionError("insertions must be pairwise distinct")
    for z in zs:
        cfg.grid.check_point(z)
    if cfg.n_samples < 2 * cfg.n_batches or cfg.n_batches < 2:
        raise ValueError("need at least two samples per batch and two batches")
    s = (sum(alphas) - 2 * params.Q) / params.gamma
    if not s > 0:
        raise ConditionError("s must be positive")
    return s


def _estimate(cfg: GmcConfig, params: LiouvilleParams, log_z: np.ndarray, s: float) -> GmcEstimate:
    zs = [complex(z) for z, _ in cfg.insertions]
    alphas = [float(a) for _, a in cfg.insertions]
    log_pref = -math.log(params.gamma) + float(gammaln(s))
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            log_pref -= alphas[i] * alphas[j] * math.log(abs(zs[i] - zs[j]))
    powers = np.exp(-s * log_z)
    batches = np.array([b.mean() for b in np.array_split(powers, cfg.n_batches)])
    mean = float(batches.mean())
    err = float(batches.std(ddof=1) / math.sqrt(len(batches)))
    pref = math.exp(log_pref)
    mu_factor = params.mu ** (-s)
    return GmcEstimate(
        value=pref * mean * mu_factor,
        std_error=pref * err * mu_factor,
        s=s,
        mean_Z_power=mean,
        batch_means=[float(b) for b in batches],
        config=cfg,
    )


def correlation_mc(cfg: GmcConfig) -> GmcEstimate:
    """Estimate ``<prod V_{a_i}(z_i)>`` from ``gamma^{-1} prod |z_j - z_k|^{-a_j a_k} mu^{-s} Gamma(s) E[Z^{-s}]``."""
    params = LiouvilleParams(cfg.gamma, cfg.mu)
    s = _validate(cfg, params)
    return _estimate(cfg, params, _log_Z(cfg), s)


@dataclass
class MobiusReport:
    residual: float
    combined_sigma: float  # relative
    mapped: GmcEstimate
    original: GmcEstimate
    coupled: bool

    @property
    def z_score(self) -> float:
        return self.residual / self.combined_sigma if self.combined_sigma else (0.0 if self.residual == 0 else math.inf)

    @property
    def passed(self) -> bool:
        return self.residual <= 3 * self.combined_sigma


def _grid_rotation(psi, grid: Grid):
    a, b, c, d = (complex(x) for x in psi)
    if b != 0 or c != 0 or abs(abs(a / d) - 1) > 1e-15:
        return None
    theta = math.atan2((a / d).imag, (a / d).real) % (2 * math.pi)
    k = theta / (2 * math.pi / grid.n_theta)
    return int(round(k)) % grid.n_theta if abs(k - round(k)) < 1e-9 else None


def mobius_check(cfg: GmcConfig, psi) -> MobiusReport:
    """Compare ``<prod V(psi(z_i))>`` with ``prod |psi'(z_i)|^{-2 Delta_i} <prod V(z_i)>`` at shared seeds.

    For rotations by a multiple of the angular spacing the mapped field is
    coupled to the original by the grid symmetry, so the two estimates agree
    up to summation order.
    """
    a, b, c, d = (complex(x) for x in psi)
    if abs(a * d - b * c - 1) > 1e-12:
        raise ValueError("Mobius coefficients must satisfy ad - bc = 1")
    params = LiouvilleParams(cfg.gamma, cfg.mu)
    mapped_ins = []
    log_jac = 0.0
    for z, al in cfg.insertions:
        z = complex(z)
        den = c * z + d
        if den == 0:
            raise ConditionError("insertion mapped to infinity")
        mapped_ins.append(((a * z + b) / den, al))
        log_jac += -2 * conformal_weight(al, params.Q) * -2 * math.log(abs(den))
    mapped_cfg = GmcConfig(**{**cfg.__dict__, "insertions": mapped_ins})
    s = _validate(cfg, params)
    _validate(mapped_cfg, params)
    original = _estimate(cfg, params, _log_Z(cfg), s)
    roll = _grid_rotation(psi, cfg.grid)
    mapped = _estimate(mapped_cfg, params, _log_Z(mapped_cfg, roll=roll or 0), s)
    target = math.exp(log_jac) * original.value
    residual = abs(mapped.value - target) / abs(target)
    sigma = math.hypot(mapped.relative_error, original.relative_error)
    return MobiusReport(residual, sigma, mapped, original, roll is not None)


def compare_with_dozz(est) -> dict:
    """Strip the three-point kinematic factor and compare with ``C^DOZZ / 2``."""
    cfg = est.config
    p = LiouvilleParams(cfg.gamma, cfg.mu)
    (z1, a1), (z2, a2), (z3, a3) = [(complex(z), float(a)) for z, a in cfg.insertions]
    d1, d2, d3 = p.delta(a1), p.delta(a2), p.delta(a3)
    kin = (
        abs(z1 - z2) ** (2 * (d3 - d1 - d2))
        * abs(z1 - z3) ** (2 * (d2 - d1 - d3))
        * abs(z2 - z3) ** (2 * (d1 - d2 - d3))
    )
    target = 0.5 * dozz(a1, a2, a3, p).real
    value, err = est.value / kin, est.std_error / kin
    return {
        "structure_constant": value,
        "std_error": err,
        "half_dozz": target,
        "relative_difference": abs(value - target) / abs(target),
        "z_score": abs(value - target) / err if err else math.inf,
    }
