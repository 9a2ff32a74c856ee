#!/usr/bin/env python3
"""Writes a synthetic GOOG-shaped option chain for 2015-02-02 (S0 = 523.76).

Strike ladders are laid out so the chain selection rules keep 47, 49, 52,
87, 98, 101 and 48 quotes per expiry. Each side of every ladder ends in two
consecutive zero bids followed by a few stale quotes with positive bids,
and the first expiry has one isolated zero bid inside its put ladder.
"""
import argparse
import datetime as dt
import math

S0 = 523.76
T0 = dt.date(2015, 2, 2)
TICK = 0.05

# expiry, strike step, kept quotes
EXPIRIES = [
    (dt.date(2015, 2, 27), 2.5, 47),
    (dt.date(2015, 3, 20), 2.5, 49),
    (dt.date(2015, 4, 17), 2.5, 52),
    (dt.date(2015, 6, 19), 5.0, 87),
    (dt.date(2015, 9, 18), 5.0, 98),
    (dt.date(2016, 1, 15), 5.0, 101),
    (dt.date(2017, 1, 20), 10.0, 48),
]

CURVE = [
    (0.07, 0.0001),
    (0.13, 0.000129508),
    (0.20, 0.00017541),
    (0.38, 0.00046087),
    (0.62, 0.000955435),
    (0.95, 0.001602174),
    (1.97, 0.004786339),
]


def ncdf(x):
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def rate(t):
    if t <= CURVE[0][0]:
        return CURVE[0][1]
    for (t0, r0), (t1, r1) in zip(CURVE, CURVE[1:]):
        if t <= t1:
            return r0 + (r1 - r0) * (t - t0) / (t1 - t0)
    return CURVE[-1][1]


def smile(k, t):
    m = math.log(k / S0) / math.sqrt(max(t, 0.25))
    return min(max(0.24 - 0.22 * m + 0.10 * m * m, 0.15), 0.80)


def black_scholes(kind, k, t):
    r = rate(t)
    v = smile(k, t)
    sd = v * math.sqrt(t)
    d1 = (math.log(S0 / k) + (r + 0.5 * v * v) * t) / sd
    d2 = d1 - sd
    df = math.exp(-r * t)
    if kind == "call":
        return S0 * ncdf(d1) - k * df * ncdf(d2)
    return k * df * ncdf(-d2) - S0 * ncdf(-d1)


def ticks(x):
    return round(x / TICK) * TICK


def quote(kind, k, t, zero_bid=False):
    mid = black_scholes(kind, k, t)
    half = max(0.5 * TICK, 0.02 * mid)
    if zero_bid:
        return 0.0, ticks(max(mid + half, TICK))
    bid = max(ticks(mid - half), TICK)
    ask = max(ticks(mid + half), bid + 2 * TICK)
    return bid, ask


def ladder(first, step, kept, direction, isolated_zero=None):
    """Strikes moving away from the spot with their zero-bid flags."""
    out = []
    k = first
    n_positive = 0
    while n_positive < kept:
        zero = isolated_zero is not None and len(out) == isolated_zero
        out.append((k, zero))
        n_positive += not zero
        k += direction * step
    out += [(k, True), (k + direction * step, True)]
    k += 2 * direction * step
    out += [(k + direction * i * step, False) for i in range(3)]
    return out


def rows():
    for expiry, step, kept in EXPIRIES:
        t = (expiry - T0).days / 365.0
        n_puts = math.ceil(0.54 * kept)
        n_calls = kept - n_puts
        below = math.floor(S0 / step) * step
        above = below + step
        isolated = 10 if expiry == EXPIRIES[0][0] else None
        puts = ladder(below, step, n_puts, -1, isolated)
        calls = ladder(above, step, n_calls, +1)
        # in-the-money quotes on the other side, dropped by the selection
        itm_puts = [k for k, _ in calls[:n_calls]]
        itm_calls = [k for k, _ in puts[:n_puts]]
        entries = [("put", k, z) for k, z in puts] + [("call", k, z) for k, z in calls]
        entries += [("put", k, False) for k in itm_puts] + [("call", k, False) for k in itm_calls]
        entries.sort(key=lambda e: (e[0], e[1]))
        for kind, k, zero in entries:
            bid, ask = quote(kind, k, t, zero)
            yield kind, k, expiry.isoformat(), bid, ask


def fmt(x):
    return f"{x:.2f}".rstrip("0").rstrip(".") if x != int(x) else str(int(x))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--chain", default="goog_2015-02-02.csv")
    ap.add_argument("--curve", default="treasury_2015-02-02.csv")
    args = ap.parse_args()
    with open(args.chain, "w") as f:
        f.write("type,strike,expiry,bid,ask\n")
        for kind, k, expiry, bid, ask in rows():
            f.write(f"{kind},{fmt(k)},{expiry},{bid:.2f},{ask:.2f}\n")
    with open(args.curve, "w") as f:
        f.write("tenor,rate\n")
        for t, r in CURVE:
            f.write(f"{t},{r}\n")


if __name__ == "__main__":
    main()
