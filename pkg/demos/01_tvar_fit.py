"""
Fitting a time-varying AR model
===============================

A TVAR(2) process whose resonance drifts is simulated from Legendre
coefficients, then refitted by the covariance and autocorrelation methods.
"""

import numpy as np

from tvarglrt import eval_trajectories, fit_autocorrelation, fit_covariance, make_basis, simulate_tvar

n, p, q = 2000, 2, 2
basis = make_basis("legendre", q, n)

# alpha is basis-major: [alpha_0 (constant part), alpha_1, alpha_2], each of length p
alpha = np.array([1.2, -0.8, 0.25, 0.0, -0.1, 0.0])
x = simulate_tvar(alpha, basis, p, sigma=1.0, seed=1, burn_in=200)

cov = fit_covariance(x, p, basis)
acf = fit_autocorrelation(x, p, basis)
print("true alpha         ", alpha)
print("covariance fit     ", np.round(cov.alpha, 3), "sigma2 =", round(cov.sigma2, 3))
print("autocorrelation fit", np.round(acf.alpha, 3), "sigma2 =", round(acf.sigma2, 3))

# coefficient trajectories a_i[n] at a few instants
A_true = eval_trajectories(alpha, basis, p)
A_fit = eval_trajectories(cov.alpha, basis, p)
for t in (0, n // 2, n - 1):
    print(f"n={t:4d}  true a[n]={np.round(A_true[t], 3)}  fitted={np.round(A_fit[t], 3)}")

# the Fourier basis is a drop-in alternative
fb = make_basis("fourier", 2, n)
print("fourier fit sigma2:", round(fit_covariance(x, p, fb).sigma2, 3))
