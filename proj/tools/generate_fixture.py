#!/usr/bin/env python3
"""Writes the bundled synthetic case-count fixture (data/fixture.csv).

Eight regions, 949 calendar days from 2020-02-01, daily counts built from
epidemic waves of different steepness, a day-of-week reporting pattern and
negative-binomial noise. One region has an empty cases field on one date,
so alignment leaves 948 shared observations.
"""
import argparse
import datetime as dt

import numpy as np

REGIONS = [
    # name, population scale, waves as (peak day, width days, height, skew)
    ("Los Angeles", 1.00, [(330, 28, 14000, 1.0), (560, 40, 3000, 1.4), (700, 16, 30000, 0.8), (880, 45, 6000, 1.2)]),
    ("San Diego", 0.35, [(330, 30, 13000, 1.1), (570, 45, 3500, 1.3), (705, 17, 28000, 0.8), (900, 50, 5000, 1.0)]),
    ("Orange", 0.30, [(325, 26, 15000, 1.0), (565, 38, 2500, 1.5), (702, 15, 31000, 0.9), (875, 40, 5500, 1.1)]),
    ("Riverside", 0.25, [(335, 32, 16000, 1.2), (575, 50, 4000, 1.2), (710, 18, 26000, 0.7), (890, 55, 4500, 1.3)]),
    ("San Bernardino", 0.23, [(338, 33, 16500, 1.1), (580, 48, 4200, 1.3), (712, 19, 25000, 0.8), (895, 52, 4800, 1.2)]),
    ("Santa Clara", 0.20, [(320, 25, 9000, 1.0), (555, 35, 2000, 1.6), (698, 14, 33000, 0.9), (870, 38, 7000, 1.0)]),
    ("Alameda", 0.17, [(322, 27, 9500, 1.0), (558, 37, 2200, 1.5), (700, 15, 32000, 0.9), (872, 40, 6800, 1.1)]),
    ("Sacramento", 0.15, [(328, 30, 11000, 1.1), (568, 42, 3800, 1.3), (706, 17, 27000, 0.8), (885, 47, 5200, 1.2)]),
]

WEEKDAY_FACTOR = np.array([1.08, 1.02, 1.00, 0.98, 1.12, 0.90, 0.90])


def wave(t, peak, width, height, skew):
    z = (t - peak) / width
    z = np.where(z < 0, z * skew, z / skew)
    return height * np.exp(-0.5 * z * z)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="data/fixture.csv")
    parser.add_argument("--days", type=int, default=949)
    parser.add_argument("--seed", type=int, default=20200201)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    start = dt.date(2020, 2, 1)
    t = np.arange(args.days, dtype=float)
    missing = ("Riverside", 400)

    rows = []
    for name, scale, waves in REGIONS:
        mean = 20.0 + 0.002 * t * t
        for peak, width, height, skew in waves:
            mean = mean + wave(t, peak, width, height, skew)
        mean = mean * scale * WEEKDAY_FACTOR[(t.astype(int) + start.weekday()) % 7]
        # Negative binomial with dispersion 30: variance = mean + mean^2 / 30.
        dispersion = 30.0
        counts = rng.negative_binomial(dispersion, dispersion / (dispersion + mean))
        for day in range(args.days):
            date = (start + dt.timedelta(days=day)).isoformat()
            value = "" if (name, day) == missing else str(int(counts[day]))
            rows.append((date, name, value))

    with open(args.out, "w", encoding="utf-8") as f:
        f.write("date,area,cases\n")
        for date, name, value in rows:
            f.write(f"{date},{name},{value}\n")


if __name__ == "__main__":
    main()
