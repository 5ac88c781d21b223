"""Reference computations that share no code path with the package."""

import numpy as np
from scipy import integrate, stats


def lloyd_max_quad(bits, tol=1e-10, max_iter=5000):
    """Plain Lloyd-Max alternation with adaptive quadrature for N(0, 1).

    Returns ``(thresholds, levels, mse)``.
    """
    n = 2 ** bits
    pdf = stats.norm.pdf
    levels = np.linspace(-2.0, 2.0, n) if n > 1 else np.zeros(1)
    for _ in range(max_iter):
        t = 0.5 * (levels[:-1] + levels[1:])
        edges = np.concatenate(([-np.inf], t, [np.inf]))
        new = np.array([
            integrate.quad(lambda x: x * pdf(x), a, b)[0] / integrate.quad(pdf, a, b)[0]
            for a, b in zip(edges[:-1], edges[1:])
        ])
        done = np.max(np.abs(new - levels)) < tol
        levels = new
        if done:
            break
    t = 0.5 * (levels[:-1] + levels[1:])
    edges = np.concatenate(([-np.inf], t, [np.inf]))
    mse = sum(integrate.quad(lambda x: (x - c) ** 2 * pdf(x), a, b)[0]
              for a, b, c in zip(edges[:-1], edges[1:], levels))
    return t, levels, mse


def full_lmmse(Z_p, F, d, p_p, alpha, kappa):
    """Vectorized LMMSE over vec(G) with explicit Kronecker-structured covariances.

    Only sensible for tiny ``M * tau``.
    """
    M, tau = Z_p.shape
    K = F.shape[1]
    Sigma_g = np.kron(np.diag(d), np.eye(M))
    # vec(G F^T) = (F kron I_M) vec(G), column-major vec
    Fbar = np.kron(F, np.eye(M))
    sig_qp = alpha * kappa * np.diag(np.diag(p_p * Fbar @ Sigma_g @ Fbar.conj().T + np.eye(M * tau)))
    Sigma_z = kappa ** 2 * p_p * Fbar @ Sigma_g @ Fbar.conj().T + kappa ** 2 * np.eye(M * tau) + sig_qp
    z = Z_p.reshape(-1, order="F")
    g_hat = kappa * np.sqrt(p_p) * Sigma_g @ Fbar.conj().T @ np.linalg.solve(Sigma_z, z)
    cov_hat = kappa ** 2 * p_p * Sigma_g @ Fbar.conj().T @ np.linalg.solve(Sigma_z, Fbar @ Sigma_g)
    return g_hat.reshape(M, K, order="F"), cov_hat


def psi_quadratic(sigma2, theta, M, K):
    """Positive root of ``psi (theta + psi + M s) = K s (theta + psi)``."""
    bq = theta + (M - K) * sigma2
    return 0.5 * (-bq + np.sqrt(bq * bq + 4 * K * sigma2 * theta))


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)


def empirical_traces(M, K, sigma2, theta, draws, seed):
    """Mean of ``(1/M) tr A^{-1}`` and ``(1/M) tr A^{-2}`` for ``A = G G^H + theta I``.

    ``sigma2`` may be a scalar or a length-K vector of column variances.
    """
    rng = np.random.default_rng(seed)
    s = np.broadcast_to(np.asarray(sigma2, float), (K,))
    t1, t2 = [], []
    for _ in range(draws):
        G = (rng.standard_normal((M, K)) + 1j * rng.standard_normal((M, K))) * np.sqrt(s / 2)
        w = np.linalg.eigvalsh(G @ G.conj().T) + theta
        t1.append(np.mean(1 / w))
        t2.append(np.mean(1 / w ** 2))
    return float(np.mean(t1)), float(np.mean(t2))
