"""Compiled scalar kernels shared by the fluid and stochastic engines.

Everything here works on a flat float64 parameter vector ``P`` and a state
vector of length ``N_STATE``; the dataclass layer in the public modules packs
into these.  Kernels are plain numba functions so both the RK4 loop and the
event-driven simulator can call them without leaving nopython mode.
"""

import math

import numpy as np
from numba import njit

# --- parameter vector layout -------------------------------------------------
DEMAND_KIND = 0  # 0 = bass, 1 = constant
P_INNOV = 1
Q_IMIT = 2
MARKET = 3  # bass market size, or arrival cap of the constant process (inf = none)
CONST_RATE = 4

# per-swarm blocks: legal at LEGAL, illicit at ILLICIT
LEGAL = 5
ILLICIT = 11
MU = 0
ETA = 1
CAP = 2
SERVER = 3
GAMMA = 4
ENABLED = 5

PRICE = 17
DELTA = 18
ALPHA = 19
TAU = 20
RHO_LEGAL = 21
RHO_ILLICIT = 22
RHO_ROGUE = 23
KAPPA = 24
KAPPA_ROGUE = 25
Y_FLOOR = 26
N_PARAMS = 27

BASS = 0
CONSTANT = 1

# --- state vector layout -----------------------------------------------------
XL = 0
YL = 1
XI = 2
YI = 3
ADOPTERS = 4
GROSS = 5
SHARED = 6
DONE_L = 7
DONE_I = 8
N_STATE = 9

STATE_FIELDS = (
    "x_L",
    "y_L",
    "x_I",
    "y_I",
    "A",
    "gross_revenue",
    "shared_revenue",
    "completed_L",
    "completed_I",
)

# event kinds in the stochastic log
EV_ARRIVAL = 0
EV_COMPLETION = 1
EV_DEPARTURE = 2
EVENT_NAMES = ("arrival", "completion", "departure")

_REWARD_ITERS = 60


@njit(cache=True)
def bass_rate(p, q, m, a):
    if a < 0.0:
        a = 0.0
    left = m - a
    if left <= 0.0:
        return 0.0
    return (p + q * a / m) * left


@njit(cache=True)
def arrival_rate(P, a):
    if P[DEMAND_KIND] == BASS:
        return bass_rate(P[P_INNOV], P[Q_IMIT], P[MARKET], a)
    if a >= P[MARKET]:
        return 0.0
    return P[CONST_RATE]


@njit(cache=True)
def service_rate(x, y, mu, eta, cap, server):
    if x <= 0.0:
        return 0.0
    if y < 0.0:
        y = 0.0
    upload = mu * (eta * x + y) + server
    down = cap * x
    return down if down < upload else upload


@njit(cache=True)
def delay_estimate(x, y, mu, eta, cap, server):
    if x <= 0.0:
        return 0.0
    r = service_rate(x, y, mu, eta, cap, server)
    if r <= 0.0:
        return math.inf
    return x / r


@njit(cache=True)
def perceived_delay(x, y, mu, eta, cap, server):
    # x/r where the swarm is busy; its x -> 0 limit otherwise
    if x > 0.0:
        return delay_estimate(x, y, mu, eta, cap, server)
    if y < 0.0:
        y = 0.0
    if mu * y + server > 0.0:
        rate = cap
    else:
        rate = min(cap, mu * eta)
    if rate <= 0.0:
        return math.inf
    return 1.0 / rate


@njit(cache=True)
def seed_reward(delta, price, purchase_rate, y_legal, y_floor, gamma_legal):
    if delta <= 0.0:
        return 0.0
    pool = y_legal if y_legal > y_floor else y_floor
    return delta * price * purchase_rate / pool / gamma_legal


@njit(cache=True)
def frac_legal(delay_legal, delay_illicit, reward, price, alpha, tau):
    eff = price - reward
    if eff < 0.0:
        eff = 0.0
    c_l = eff
    c_i = 0.0
    if alpha > 0.0:
        c_l += alpha * delay_legal
        c_i += alpha * delay_illicit
    if tau <= 0.0:
        return 1.0 if c_l <= c_i else 0.0
    if math.isinf(c_l) and math.isinf(c_i):
        return 0.5
    if math.isinf(c_i):
        return 1.0
    if math.isinf(c_l):
        return 0.0
    z = (c_l - c_i) / tau
    if z > 0.0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


@njit(cache=True)
def seed_probs_legal(reward, rho0, kappa, rho_rogue, kappa_rogue):
    p_legal = rho0 + kappa * reward
    p_legal = min(max(p_legal, 0.0), 1.0)
    p_rogue = rho_rogue - kappa_rogue * reward
    p_rogue = min(max(p_rogue, 0.0), 1.0 - p_legal)
    return p_legal, p_rogue, 1.0 - (p_legal + p_rogue)


@njit(cache=True)
def split_and_reward(P, lam, x_l, y_l, x_i, y_i):
    """Join fraction and the self-consistent myopic reward at a state.

    The reward depends on the legal purchase rate, which depends on the join
    split, which depends on the reward.  The map is monotone, so iterating
    from zero reward climbs to the least fixed point.
    """
    L = LEGAL
    I = ILLICIT
    d_l = perceived_delay(x_l, y_l, P[L + MU], P[L + ETA], P[L + CAP], P[L + SERVER])
    if P[I + ENABLED] > 0.0:
        d_i = perceived_delay(x_i, y_i, P[I + MU], P[I + ETA], P[I + CAP], P[I + SERVER])
    else:
        d_i = math.inf
    price = P[PRICE]
    reward = 0.0
    frac = frac_legal(d_l, d_i, reward, price, P[ALPHA], P[TAU])
    if P[I + ENABLED] <= 0.0:
        frac = 1.0
    if P[DELTA] <= 0.0:
        return frac, 0.0
    for _ in range(_REWARD_ITERS):
        new = seed_reward(P[DELTA], price, lam * frac, y_l, P[Y_FLOOR], P[L + GAMMA])
        if P[I + ENABLED] > 0.0:
            frac = frac_legal(d_l, d_i, new, price, P[ALPHA], P[TAU])
        if abs(new - reward) <= 1e-13 * (1.0 + new):
            reward = new
            break
        reward = new
    return frac, reward


@njit(cache=True)
def rhs(s, P, out):
    x_l = max(s[XL], 0.0)
    y_l = max(s[YL], 0.0)
    x_i = max(s[XI], 0.0)
    y_i = max(s[YI], 0.0)
    a = min(max(s[ADOPTERS], 0.0), P[MARKET])
    L = LEGAL
    I = ILLICIT
    lam = arrival_rate(P, a)
    frac, reward = split_and_reward(P, lam, x_l, y_l, x_i, y_i)
    r_l = service_rate(x_l, y_l, P[L + MU], P[L + ETA], P[L + CAP], P[L + SERVER])
    r_i = service_rate(x_i, y_i, P[I + MU], P[I + ETA], P[I + CAP], P[I + SERVER])
    p_seed, p_rogue, _ = seed_probs_legal(
        reward, P[RHO_LEGAL], P[KAPPA], P[RHO_ROGUE], P[KAPPA_ROGUE]
    )
    if P[I + ENABLED] <= 0.0:
        p_rogue = 0.0
    buy = lam * frac
    out[XL] = buy - r_l
    out[YL] = p_seed * r_l - P[L + GAMMA] * y_l
    out[XI] = lam - buy - r_i
    out[YI] = p_rogue * r_l + P[RHO_ILLICIT] * r_i - P[I + GAMMA] * y_i
    out[ADOPTERS] = lam
    out[GROSS] = P[PRICE] * buy
    out[SHARED] = P[DELTA] * P[PRICE] * buy
    out[DONE_L] = r_l
    out[DONE_I] = r_i
    for k in range(4):
        if s[k] <= 0.0 and out[k] < 0.0:
            out[k] = 0.0


@njit(cache=True)
def _rk4_step(y, P, h, k1, k2, k3, k4, tmp):
    rhs(y, P, k1)
    for j in range(N_STATE):
        tmp[j] = y[j] + 0.5 * h * k1[j]
    rhs(tmp, P, k2)
    for j in range(N_STATE):
        tmp[j] = y[j] + 0.5 * h * k2[j]
    rhs(tmp, P, k3)
    for j in range(N_STATE):
        tmp[j] = y[j] + h * k3[j]
    rhs(tmp, P, k4)
    for j in range(N_STATE):
        y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])


@njit(cache=True)
def rk4(y0, P, dt, n_steps, every):
    """Fixed-step RK4 with projection; records every ``every`` steps.

    A step in which capped constant demand runs out is split at the exact
    exhaustion time, so the arrival cutoff never straddles a stage.

    Returns (states, ok).  ``ok`` is False if the state became non-finite,
    in which case ``states`` is truncated at the last good record.
    """
    n_rec = n_steps // every + 1
    states = np.empty((n_rec, N_STATE))
    y = y0.copy()
    k1 = np.empty(N_STATE)
    k2 = np.empty(N_STATE)
    k3 = np.empty(N_STATE)
    k4 = np.empty(N_STATE)
    tmp = np.empty(N_STATE)
    capped = P[DEMAND_KIND] == CONSTANT and P[CONST_RATE] > 0.0 and math.isfinite(P[MARKET])
    open_p = P.copy()
    open_p[MARKET] = math.inf
    shut_p = P.copy()
    shut_p[CONST_RATE] = 0.0
    states[0] = y
    rec = 1
    for step in range(1, n_steps + 1):
        left = P[MARKET] - y[ADOPTERS]
        if capped and 0.0 < left < P[CONST_RATE] * dt:
            h = left / P[CONST_RATE]
            _rk4_step(y, open_p, h, k1, k2, k3, k4, tmp)
            y[ADOPTERS] = P[MARKET]
            _rk4_step(y, shut_p, dt - h, k1, k2, k3, k4, tmp)
        else:
            _rk4_step(y, P, dt, k1, k2, k3, k4, tmp)
        for j in range(4):
            if y[j] < 0.0:
                y[j] = 0.0
        if y[ADOPTERS] < 0.0:
            y[ADOPTERS] = 0.0
        elif y[ADOPTERS] > P[MARKET]:
            y[ADOPTERS] = P[MARKET]
        for j in range(N_STATE):
            if not math.isfinite(y[j]):
                return states[:rec], False
        if step % every == 0:
            states[rec] = y
            rec += 1
    return states, True


@njit(cache=True)
def _arrival_bound(P, a):
    # valid upper bound on the arrival rate, exact at saturation
    if P[DEMAND_KIND] == BASS:
        left = P[MARKET] - a
        if left < 1.0:
            return 0.0
        return (P[P_INNOV] + P[Q_IMIT]) * left
    if a + 1.0 > P[MARKET]:
        return 0.0
    return P[CONST_RATE]


@njit(cache=True, nogil=True)
def ssa(y0, P, grid, rng, log_events):
    """Exact-jump simulation of the finite model.

    Returns (states_on_grid, final_state, status, log_array).  ``status`` is 0
    on success and 1 if a rate went non-finite.  ``log_array`` rows are
    (time, kind, swarm, x_L, y_L, x_I, y_I, A); empty unless ``log_events``.
    """
    L = LEGAL
    I = ILLICIT
    s = y0.copy()
    n_grid = grid.shape[0]
    horizon = grid[n_grid - 1]
    out = np.empty((n_grid, N_STATE))
    log = np.empty((1024 if log_events else 0, 8))
    n_log = 0
    g = 0
    t = 0.0
    # ledgers are rebuilt from the purchase count so no rounding accumulates
    price = P[PRICE]
    gross0 = y0[GROSS]
    shared0 = y0[SHARED]
    n_buy = 0.0
    while True:
        a = s[ADOPTERS]
        bound = _arrival_bound(P, a)
        r_l = service_rate(s[XL], s[YL], P[L + MU], P[L + ETA], P[L + CAP], P[L + SERVER])
        r_i = service_rate(s[XI], s[YI], P[I + MU], P[I + ETA], P[I + CAP], P[I + SERVER])
        dep_l = P[L + GAMMA] * s[YL]
        dep_i = P[I + GAMMA] * s[YI]
        total = bound + r_l + r_i + dep_l + dep_i
        if not math.isfinite(total):
            while g < n_grid:
                out[g] = s
                g += 1
            return out, s, 1, log[:n_log]
        if total <= 0.0:
            t_next = math.inf
        else:
            t_next = t + rng.exponential(1.0) / total
        while g < n_grid and grid[g] < t_next:
            out[g] = s
            g += 1
        if t_next > horizon:
            break
        t = t_next
        u = rng.random() * total
        kind = -1
        swarm = 0
        if u < bound:
            lam = arrival_rate(P, a)
            if rng.random() * bound < lam:
                frac, _ = split_and_reward(P, lam, s[XL], s[YL], s[XI], s[YI])
                kind = EV_ARRIVAL
                s[ADOPTERS] += 1.0
                if rng.random() < frac:
                    s[XL] += 1.0
                    n_buy += 1.0
                    sale = price * n_buy
                    s[GROSS] = gross0 + sale
                    s[SHARED] = shared0 + P[DELTA] * sale
                else:
                    s[XI] += 1.0
                    swarm = 1
        elif u < bound + r_l:
            kind = EV_COMPLETION
            lam = arrival_rate(P, a)
            _, reward = split_and_reward(P, lam, s[XL], s[YL], s[XI], s[YI])
            p_seed, p_rogue, _ = seed_probs_legal(
                reward, P[RHO_LEGAL], P[KAPPA], P[RHO_ROGUE], P[KAPPA_ROGUE]
            )
            if P[I + ENABLED] <= 0.0:
                p_rogue = 0.0
            s[XL] -= 1.0
            s[DONE_L] += 1.0
            v = rng.random()
            if v < p_seed:
                s[YL] += 1.0
            elif v < p_seed + p_rogue:
                s[YI] += 1.0
        elif u < bound + r_l + r_i:
            kind = EV_COMPLETION
            swarm = 1
            s[XI] -= 1.0
            s[DONE_I] += 1.0
            if rng.random() < P[RHO_ILLICIT]:
                s[YI] += 1.0
        elif u < bound + r_l + r_i + dep_l:
            kind = EV_DEPARTURE
            s[YL] -= 1.0
        elif dep_i > 0.0:
            kind = EV_DEPARTURE
            swarm = 1
            s[YI] -= 1.0
        if log_events and kind >= 0:
            if n_log == log.shape[0]:
                bigger = np.empty((2 * n_log, 8))
                bigger[:n_log] = log
                log = bigger
            log[n_log, 0] = t
            log[n_log, 1] = kind
            log[n_log, 2] = swarm
            log[n_log, 3] = s[XL]
            log[n_log, 4] = s[YL]
            log[n_log, 5] = s[XI]
            log[n_log, 6] = s[YI]
            log[n_log, 7] = s[ADOPTERS]
            n_log += 1
    while g < n_grid:
        out[g] = s
        g += 1
    return out, s, 0, log[:n_log]
