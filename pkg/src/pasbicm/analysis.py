"""Information-theoretic utilities for real-valued ASK inputs on AWGN.

Entropy, average energy, mutual information (Gauss-Hermite quadrature with
an optional Monte Carlo cross-check), required SNR at a target rate, and
the Maxwell-Boltzmann reference family.

SNR convention used throughout: snr_db = 10*log10(Es / sigma^2) where Es
is the average energy of the distribution under test itself, so curves
for differently shaped inputs are compared at equal transmit power.
"""

import numpy as np

LOG2 = np.log(2.0)


def _logsumexp(a: np.ndarray, axis: int) -> np.ndarray:
    amax = np.max(a, axis=axis, keepdims=True)
    amax = np.where(np.isfinite(amax), amax, 0.0)
    out = np.log(np.sum(np.exp(a - amax), axis=axis)) + np.squeeze(amax, axis=axis)
    return out


def binary_entropy(p: float) -> float:
    """H2(p) in bits, with the 0*log(0) = 0 convention."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-(p * np.log2(p) + (1 - p) * np.log2(1 - p)))


class InputDistribution:
    """Probability assignment over a set of real ASK symbols."""

    def __init__(self, symbols, prob):
        self.symbols = np.asarray(symbols, dtype=float)
        self.prob = np.asarray(prob, dtype=float)
        if self.symbols.shape != self.prob.shape:
            raise ValueError("symbols and probabilities must align")
        if np.any(self.prob < -1e-15):
            raise ValueError("negative probability")
        if abs(self.prob.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {self.prob.sum()!r}, not 1")

    @classmethod
    def uniform(cls, symbols):
        symbols = np.asarray(symbols, dtype=float)
        return cls(symbols, np.full(symbols.size, 1.0 / symbols.size))

    def entropy(self) -> float:
        """Shannon entropy in bits."""
        p = self.prob[self.prob > 0]
        return float(-(p * np.log2(p)).sum())

    def average_energy(self) -> float:
        return float(np.sum(self.prob * self.symbols**2))

    def sample(self, n, rng) -> np.ndarray:
        return rng.choice(self.symbols, size=n, p=self.prob)


def mutual_information(dist: InputDistribution, noise_var: float,
                       nodes: int = 96, cross_check: bool = False,
                       mc_samples: int = 10**6, rng=None) -> float:
    """I(X; X+N) in bits for N ~ Gaussian(0, noise_var).

    Evaluated by Gauss-Hermite quadrature.  With cross_check=True a Monte
    Carlo estimate over mc_samples draws is computed as well and a
    disagreement beyond 0.005 bits raises ArithmeticError.
    """
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    t, w = np.polynomial.hermite.hermgauss(nodes)
    x = dist.symbols
    logp = np.where(dist.prob > 0, np.log(np.maximum(dist.prob, 1e-300)), -np.inf)
    sigma = np.sqrt(noise_var)
    # y grid per conditioning symbol: y = x_i + sqrt(2) sigma t_q
    y = x[:, None] + np.sqrt(2.0) * sigma * t[None, :]
    # log p(y | x_j) up to a common constant
    ll = -((y[:, :, None] - x[None, None, :]) ** 2) / (2.0 * noise_var)
    log_py = _logsumexp(ll + logp[None, None, :], axis=2)
    log_cond = ll[np.arange(x.size), :, np.arange(x.size)]  # (M, Q)
    integrand = (log_cond - log_py) / LOG2
    mi = float(np.sum(dist.prob[:, None] * w[None, :] * integrand) / np.sqrt(np.pi))
    mi = max(mi, 0.0)
    if cross_check:
        mc = mutual_information_mc(dist, noise_var, mc_samples, rng)
        if abs(mc - mi) > 0.005:
            raise ArithmeticError(
                f"quadrature MI {mi:.4f} and Monte Carlo MI {mc:.4f} disagree"
            )
    return mi


def mutual_information_mc(dist: InputDistribution, noise_var: float,
                          samples: int = 10**6, rng=None) -> float:
    """Monte Carlo estimate of I(X; X+N); independent of the quadrature path."""
    rng = np.random.default_rng(0x4D49) if rng is None else rng
    x = dist.sample(samples, rng)
    y = x + rng.normal(0.0, np.sqrt(noise_var), size=samples)
    logp = np.where(dist.prob > 0, np.log(np.maximum(dist.prob, 1e-300)), -np.inf)
    ll = -((y[:, None] - dist.symbols[None, :]) ** 2) / (2.0 * noise_var)
    log_py = _logsumexp(ll + logp[None, :], axis=1)
    log_cond = -((y - x) ** 2) / (2.0 * noise_var)
    return float(np.mean(log_cond - log_py) / LOG2)


def snr_db_to_noise_var(dist: InputDistribution, snr_db: float) -> float:
    """Noise variance realising snr_db under the own-energy convention."""
    return dist.average_energy() / 10.0 ** (snr_db / 10.0)


def required_snr(dist: InputDistribution, target_rate: float,
                 lo_db: float = -30.0, hi_db: float = 60.0,
                 tol_bits: float = 1e-4) -> float:
    """SNR in dB at which I(X;Y) reaches target_rate, by bisection.

    MI is strictly increasing in SNR, so plain bisection on the dB axis
    converges; iteration stops once |MI - target| < tol_bits.
    """
    if target_rate <= 0:
        raise ValueError("target rate must be positive")
    if target_rate >= dist.entropy():
        raise ValueError(
            f"target rate {target_rate} not attainable: entropy is {dist.entropy():.4f}"
        )
    lo, hi = lo_db, hi_db
    if mutual_information(dist, snr_db_to_noise_var(dist, hi)) < target_rate:
        raise ValueError("target rate unreachable inside the SNR bracket")
    if mutual_information(dist, snr_db_to_noise_var(dist, lo)) > target_rate:
        raise ValueError("SNR bracket lies entirely above the target rate")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        mi = mutual_information(dist, snr_db_to_noise_var(dist, mid))
        if abs(mi - target_rate) < tol_bits:
            return mid
        if mi < target_rate:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def maxwell_boltzmann(symbols, average_energy: float) -> InputDistribution:
    """MB distribution p(x) proportional to exp(-nu x^2) hitting a target energy.

    nu is solved by bisection; nu = 0 recovers the uniform distribution, so
    the target must not exceed the uniform average energy.
    """
    symbols = np.asarray(symbols, dtype=float)
    e_uniform = float(np.mean(symbols**2))
    if not 0 < average_energy <= e_uniform:
        raise ValueError(f"energy must lie in (0, {e_uniform}]")

    def dist_for(nu):
        w = np.exp(-nu * symbols**2)
        return w / w.sum()

    lo, hi = 0.0, 1.0
    while np.sum(dist_for(hi) * symbols**2) > average_energy:
        hi *= 2.0
        if hi > 1e6:
            raise ValueError("energy target too small for this alphabet")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sum(dist_for(mid) * symbols**2) > average_energy:
            lo = mid
        else:
            hi = mid
    return InputDistribution(symbols, dist_for(0.5 * (lo + hi)))


def mb_required_snr(symbols, target_rate: float) -> float:
    """Required SNR at target_rate for the best Maxwell-Boltzmann input.

    Scans the MB family (coarse grid over the energy fraction, then a
    refinement pass) and returns the minimum required SNR.
    """
    symbols = np.asarray(symbols, dtype=float)
    e_uniform = float(np.mean(symbols**2))

    def snr_at(frac):
        d = maxwell_boltzmann(symbols, frac * e_uniform)
        if d.entropy() <= target_rate:
            return np.inf
        return required_snr(d, target_rate)

    fracs = np.linspace(0.2, 1.0, 17)
    vals = [snr_at(f) for f in fracs]
    i = int(np.argmin(vals))
    lo = fracs[max(i - 1, 0)]
    hi = fracs[min(i + 1, len(fracs) - 1)]
    fine = np.linspace(lo, hi, 21)
    vals = [snr_at(f) for f in fine]
    return float(np.min(vals))


def write_mi_csv(path, snr_db_list, uniform: InputDistribution,
                 shaped: InputDistribution, mb: InputDistribution) -> None:
    """Write rows of (snr_db, mi_uniform, mi_shaped, mi_mb) for plotting."""
    with open(path, "w", newline="\n") as f:
        f.write("snr_db,mi_uniform,mi_shaped,mi_mb\n")
        for snr in snr_db_list:
            cols = [
                mutual_information(d, snr_db_to_noise_var(d, snr))
                for d in (uniform, shaped, mb)
            ]
            f.write(f"{snr:.6g}," + ",".join(f"{v:.6g}" for v in cols) + "\n")
