"""A compact (mu/mu_w, lambda) covariance-matrix-adaptation evolution strategy.

Maximising, ask/tell style, with weighted recombination of the mu best,
rank-one and rank-mu covariance updates and cumulative step-size adaptation.
Samples can be confined to a box: out-of-box draws are resampled up to a
retry cap and then coordinate-clamped. All randomness comes from the
generator handed in, so identical seeds give identical sample sequences.
"""
from __future__ import annotations

import logging

import numpy as np

logger = logging.getLogger(__name__)

EIGEN_FLOOR = 1e-20  # repair threshold for covariance eigenvalues
RESAMPLE_CAP = 100


class CmaEs:
    def __init__(self, mean0, sigma0: float, population: int, parents: int,
                 rng: np.random.Generator, bounds=None):
        self.mean = np.asarray(mean0, dtype=float).copy()
        self.dim = len(self.mean)
        if population < 2:
            raise ValueError("population must be >= 2")
        if not 1 <= parents <= population:
            raise ValueError("parents must lie in [1, population]")
        if sigma0 <= 0:
            raise ValueError("sigma0 must be > 0")
        self.sigma = float(sigma0)
        self.lam = int(population)
        self.mu = int(parents)
        self.rng = rng
        self.bounds = None
        if bounds is not None:
            lo, hi = (np.asarray(b, dtype=float) for b in bounds)
            self.bounds = (lo, hi)

        n = self.dim
        raw = np.log((self.lam + 1) / 2.0) - np.log(np.arange(1, self.mu + 1))
        self.weights = raw / raw.sum()
        self.mu_eff = 1.0 / float(self.weights @ self.weights)
        self.c_sigma = (self.mu_eff + 2.0) / (n + self.mu_eff + 5.0)
        self.d_sigma = (1.0 + 2.0 * max(0.0, np.sqrt((self.mu_eff - 1.0) / (n + 1.0)) - 1.0)
                        + self.c_sigma)
        self.c_c = (4.0 + self.mu_eff / n) / (n + 4.0 + 2.0 * self.mu_eff / n)
        self.c_1 = 2.0 / ((n + 1.3) ** 2 + self.mu_eff)
        self.c_mu = min(1.0 - self.c_1,
                        2.0 * (self.mu_eff - 2.0 + 1.0 / self.mu_eff)
                        / ((n + 2.0) ** 2 + self.mu_eff))
        self.chi_n = np.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))

        self.cov = np.eye(n)
        self.p_sigma = np.zeros(n)
        self.p_c = np.zeros(n)
        self.generation = 0
        self._decompose()
        self._pending = None  # (z, y, x) of the outstanding ask

    def _decompose(self) -> None:
        self.cov = (self.cov + self.cov.T) / 2.0
        eigvals, eigvecs = np.linalg.eigh(self.cov)
        if (eigvals < EIGEN_FLOOR).any():
            logger.warning("covariance lost positive-definiteness; repairing eigenvalues")
            eigvals = np.maximum(eigvals, EIGEN_FLOOR)
            self.cov = (eigvecs * eigvals) @ eigvecs.T
        self._eigvecs = eigvecs
        self._eig_sqrt = np.sqrt(eigvals)

    def ask(self) -> np.ndarray:
        """Draw the next population, shape (lambda, dim)."""
        z = self.rng.standard_normal((self.lam, self.dim))
        y = z @ (self._eigvecs * self._eig_sqrt).T
        x = self.mean + self.sigma * y
        if self.bounds is not None:
            lo, hi = self.bounds
            for _ in range(RESAMPLE_CAP):
                outside = ((x < lo) | (x > hi)).any(axis=1)
                if not outside.any():
                    break
                k = int(outside.sum())
                z[outside] = self.rng.standard_normal((k, self.dim))
                y[outside] = z[outside] @ (self._eigvecs * self._eig_sqrt).T
                x[outside] = self.mean + self.sigma * y[outside]
            else:
                x = np.clip(x, lo, hi)
                with np.errstate(invalid="ignore", divide="ignore"):
                    y = (x - self.mean) / self.sigma
                    z = y @ (self._eigvecs / self._eig_sqrt).T
        self._pending = (z, y, x)
        return x.copy()

    def tell(self, fitnesses) -> None:
        """Rank the outstanding population (higher is better) and adapt."""
        if self._pending is None:
            raise RuntimeError("tell() without a preceding ask()")
        z, y, x = self._pending
        self._pending = None
        f = np.asarray(fitnesses, dtype=float)
        if f.shape != (self.lam,):
            raise ValueError(f"expected {self.lam} fitness values, got shape {f.shape}")
        f = np.where(np.isfinite(f), f, -np.inf)  # non-finite ranks worst
        order = np.argsort(-f, kind="stable")[:self.mu]

        z_w = self.weights @ z[order]
        y_w = self.weights @ y[order]
        self.mean = self.mean + self.sigma * y_w

        self.p_sigma = ((1.0 - self.c_sigma) * self.p_sigma
                        + np.sqrt(self.c_sigma * (2.0 - self.c_sigma) * self.mu_eff)
                        * (self._eigvecs @ z_w))
        self.generation += 1
        expected = np.sqrt(1.0 - (1.0 - self.c_sigma) ** (2.0 * self.generation))
        h_sigma = (np.linalg.norm(self.p_sigma) / expected
                   < (1.4 + 2.0 / (self.dim + 1.0)) * self.chi_n)
        self.p_c = ((1.0 - self.c_c) * self.p_c
                    + h_sigma * np.sqrt(self.c_c * (2.0 - self.c_c) * self.mu_eff) * y_w)

        rank_mu = (self.weights[:, None] * y[order]).T @ y[order]
        delta = (1.0 - h_sigma) * self.c_c * (2.0 - self.c_c)
        self.cov = ((1.0 - self.c_1 - self.c_mu) * self.cov
                    + self.c_1 * (np.outer(self.p_c, self.p_c) + delta * self.cov)
                    + self.c_mu * rank_mu)
        self.sigma = self.sigma * float(np.exp(
            (self.c_sigma / self.d_sigma)
            * (np.linalg.norm(self.p_sigma) / self.chi_n - 1.0)))
        if not np.isfinite(self.sigma) or self.sigma <= 0.0:
            logger.warning("step size left (0, inf); resetting")
            self.sigma = float(np.finfo(float).tiny)
        self._decompose()

    def step(self, fitnesses) -> np.ndarray:
        """Fused tell-then-ask: absorb fitnesses, return the next samples."""
        self.tell(fitnesses)
        return self.ask()

    def cov_trace(self) -> float:
        """Trace of the effective sampling covariance sigma^2 * C."""
        return float(self.sigma**2 * np.trace(self.cov))

    # --- checkpointing ------------------------------------------------------

    def state_dict(self) -> dict:
        if self._pending is not None:
            raise RuntimeError("cannot checkpoint between ask() and tell()")
        return {
            "mean": self.mean.tolist(),
            "sigma": self.sigma,
            "cov": self.cov.tolist(),
            "p_sigma": self.p_sigma.tolist(),
            "p_c": self.p_c.tolist(),
            "generation": self.generation,
            "rng_state": _rng_state_to_jsonable(self.rng.bit_generator.state),
        }

    def load_state_dict(self, state: dict) -> None:
        self.mean = np.asarray(state["mean"], dtype=float)
        self.sigma = float(state["sigma"])
        self.cov = np.asarray(state["cov"], dtype=float)
        self.p_sigma = np.asarray(state["p_sigma"], dtype=float)
        self.p_c = np.asarray(state["p_c"], dtype=float)
        self.generation = int(state["generation"])
        self.rng.bit_generator.state = _rng_state_from_jsonable(state["rng_state"])
        self._pending = None
        self._decompose()


def _rng_state_to_jsonable(state: dict) -> dict:
    out = dict(state)
    out["state"] = {k: int(v) for k, v in state["state"].items()}
    return out


def _rng_state_from_jsonable(state: dict) -> dict:
    out = dict(state)
    out["state"] = {k: int(v) for k, v in state["state"].items()}
    return out
