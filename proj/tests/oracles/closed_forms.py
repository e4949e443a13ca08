"""Reference values frozen into the unit tests.

Evaluated with mpmath at 50 significant digits, independently of the C++
code. Re-run with `python3 closed_forms.py` to regenerate the table.
"""
from mpmath import mp, mpf, e, exp, log, findroot

mp.dps = 50

a, A1, A2, A3 = e, mpf("0.1"), mpf("3.33e-5"), mpf(0)
T0, alpha, beta, d = mpf("2.85e-4"), mpf(1500), mpf(1), mpf(60000)


def acc(x):
    return A1 * a ** (A2 * x) - A3


def acc_slope(x):
    return A1 * A2 * log(a) * a ** (A2 * x)


def cost(y, t0=T0, al=alpha):
    if y == d:
        return al * acc(0)
    return al * acc(d - y) + beta * t0 * y


def stationary(t0=T0, al=alpha):
    return d + log(al * A1 * A2 * log(a) / (beta * t0)) / (A2 * log(a))


def br_theta(lam, di, theta, s, B, total):
    # dV/dy = -P'(di - y) + theta*A'(total - y - s) + B
    f = lambda y: -lam / (di - y + 1) + theta * acc_slope(total - y - s) + B
    return findroot(f, (mpf(1), di - 1), solver="bisect", tol=mpf(10) ** -40)


rows = {
    "accuracy_at_60000": acc(60000),
    "cost_keep_none": cost(mpf(0)),
    "cost_jump": (alpha * acc(0) + beta * T0 * d) - cost(d),
    "stationary_defaults": stationary(),
    "stationary_t0_005": stationary(t0=mpf("0.05")),
    "stationary_oversupply": stationary(t0=mpf("0.05"), al=mpf(10000)),
    "demand_threshold": alpha * acc_slope(d) - beta * T0,
    "demand_interior_b0001": log(alpha * acc_slope(d) / (beta * T0 + mpf("0.001"))) / (A2 * log(a)),
    "buy_all_at_0": ((alpha * acc(0) + beta * T0 * d) - cost(mpf(0))) / d,
    "min_price_sell_all": 10 * log(mpf(6001)) / 6000,
    "reservation_30": mpf(30) / 6001,
    "best_response_theta5": br_theta(mpf(10), mpf(6000), mpf(5), mpf(0), mpf("0.01"), mpf(6000)),
    "full_payment": 10 * log(mpf(6001)),
    "privacy_k05": 2 * mpf(4) ** mpf("0.5") / mpf("0.5"),
}

if __name__ == "__main__":
    for k, v in rows.items():
        print(f"{k:28s} {mp.nstr(v, 17)}")
