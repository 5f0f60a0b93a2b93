"""Scalar fast path for 1-D linear-loss runs.

The synthetic counterexample takes millions of rounds, so the per-round
work is written as one tight scalar loop and compiled with numba when it
is available (plain Python otherwise).  The loop mirrors the numpy step
functions in :mod:`cadam.optim` operation-for-operation, so trajectories
agree *bitwise* with the canonical path; tests enforce that.
"""

from __future__ import annotations

import math

import numpy as np

# variant codes shared with oco.py
SGD, ADAM, AMSGRAD, CADAM, CADAM_V2 = 0, 1, 2, 3, 4
CASE_NONE, CASE1, CASE2 = 0, 1, 2


def _linear_run(variant, slopes, x0, lower, upper,
                alpha0, inv_sqrt, beta1, beta1_decaying, rho, beta2,
                eps, eps0, decay_running_max,
                margin_coeff, margin_od2, margin_enabled,
                hit_target, hit_tol, stride,
                hist_g, hist_vaux, collect_history):
    T = slopes.shape[0]
    n_rows = T // stride + (1 if T % stride else 0)
    row_t = np.empty(n_rows, dtype=np.int64)
    row_loss = np.empty(n_rows)
    row_avg_regret = np.empty(n_rows)
    row_x = np.empty(n_rows)
    row_psi = np.empty(n_rows)
    row_lam = np.empty(n_rows)
    row_lr = np.empty(n_rows)
    row_grad = np.empty(n_rows)
    row_m = np.empty(n_rows)
    row_v = np.empty(n_rows)
    row_vaux = np.empty(n_rows)
    row_case = np.empty(n_rows, dtype=np.int8)

    x = x0
    m = 0.0
    v = 0.0
    vaux = 0.0
    v_raw = 0.0
    b1pow = 1.0
    b2pow = 1.0
    rhopow = 1.0
    cumloss = 0.0
    slope_sum = 0.0
    prev_scaled = 0.0
    psi_min = math.inf
    margin_min = math.inf
    lam_strict_max = -1.0
    case1_count = 0
    last_outside = 0
    row = 0
    status = 0

    for t in range(1, T + 1):
        g = slopes[t - 1]
        loss = g * x
        cumloss += loss
        slope_sum += g

        if inv_sqrt:
            alpha_t = alpha0 / math.sqrt(t)
        else:
            alpha_t = alpha0
        if beta1_decaying:
            beta1_t = beta1 * rhopow
        else:
            beta1_t = beta1

        lam = -1.0
        case = CASE_NONE
        if variant == SGD:
            proposed = x - alpha_t * g
            denom = 1.0
            lr = alpha_t
        elif variant == ADAM:
            m = beta1_t * m + (1.0 - beta1_t) * g
            v = beta2 * v + (1.0 - beta2) * (g * g)
            b1pow = b1pow * beta1
            b2pow = b2pow * beta2
            m_bar = m / (1.0 - b1pow)
            v_bar = v / (1.0 - b2pow)
            denom = math.sqrt(v_bar + eps)
            proposed = x - alpha_t * m_bar / denom
            lr = alpha_t / denom
        elif variant == AMSGRAD:
            m = beta1_t * m + (1.0 - beta1_t) * g
            if decay_running_max:
                v = beta2 * vaux + (1.0 - beta2) * (g * g)
            else:
                v = beta2 * v + (1.0 - beta2) * (g * g)
            vaux = max(v, vaux)
            denom = math.sqrt(vaux + eps)
            proposed = x - alpha_t * m / denom
            lr = alpha_t / denom
        else:  # CADAM / CADAM_V2
            m = beta1_t * m + (1.0 - beta1_t) * g
            if decay_running_max:
                v = beta2 * vaux + (1.0 - beta2) * (g * g)
            else:
                v = beta2 * v + (1.0 - beta2) * (g * g)
            cap = max(vaux, v)
            if variant == CADAM_V2 and eps0 > cap:
                cap = eps0
            if cap > 0.0:
                lam = vaux / cap
            else:
                lam = 1.0
            cand = (1.0 - lam) * cap + lam * vaux
            new_vaux = min(max(cand, vaux), cap)
            if lam == 1.0:
                case = CASE1
                case1_count += 1
            else:
                case = CASE2
                if lam > lam_strict_max:
                    lam_strict_max = lam
            vaux = new_vaux
            denom = math.sqrt(vaux + eps)
            proposed = x - alpha_t * m / denom
            lr = alpha_t / denom

        x = min(max(proposed, lower), upper)
        rhopow = rhopow * rho

        if not (math.isfinite(x) and math.isfinite(m) and math.isfinite(vaux)
                and math.isfinite(v)):
            status = t
            break

        if variant == ADAM:
            scaled = math.sqrt(v) / alpha_t
        elif variant == SGD:
            scaled = 0.0
        else:
            scaled = math.sqrt(vaux) / alpha_t
        psi = scaled - prev_scaled
        prev_scaled = scaled
        if variant != SGD and psi < psi_min:
            psi_min = psi

        v_raw = beta2 * v_raw + (1.0 - beta2) * (g * g)
        if margin_enabled:
            margin = margin_coeff * math.sqrt(v_raw / margin_od2) - abs(m)
            if margin < margin_min:
                margin_min = margin

        if abs(x - hit_target) > hit_tol:
            last_outside = t

        if collect_history:
            hist_g[t - 1] = g
            if variant == ADAM:
                hist_vaux[t - 1] = v
            else:
                hist_vaux[t - 1] = vaux

        if t % stride == 0 or t == T:
            row_t[row] = t
            row_loss[row] = loss
            row_avg_regret[row] = (cumloss + abs(slope_sum)) / t
            row_x[row] = x
            row_psi[row] = psi
            row_lam[row] = lam
            row_lr[row] = lr
            row_grad[row] = abs(g)
            row_m[row] = abs(m)
            row_v[row] = abs(v)
            row_vaux[row] = abs(vaux)
            row_case[row] = case
            row += 1

    return (row_t[:row], row_loss[:row], row_avg_regret[:row], row_x[:row],
            row_psi[:row], row_lam[:row], row_lr[:row], row_grad[:row],
            row_m[:row], row_v[:row], row_vaux[:row], row_case[:row],
            x, m, v, vaux, b1pow, b2pow, rhopow,
            cumloss, slope_sum, psi_min, margin_min,
            lam_strict_max, case1_count, last_outside, status)


try:  # pragma: no cover - exercised indirectly via equivalence tests
    from numba import njit

    linear_run_compiled = njit(cache=True)(_linear_run)
except ImportError:  # pragma: no cover
    linear_run_compiled = _linear_run
