#!/usr/bin/env python3
"""Regenerate data/synthetic_panel.csv.

Deterministic 17-entity daily yield panel: one year of business days, a
slow common factor with per-country loadings plus AR(1) idiosyncratic
noise around country-specific base levels. The output file is committed;
rerun this script only if the fixture itself is meant to change.
"""

import datetime
import math
import random

COUNTRIES = [
    ("Austria", 1.30, 0.90),
    ("Belgium", 1.58, 0.95),
    ("Czech", 1.88, 0.45),
    ("France", 1.40, 0.92),
    ("Germany", 0.95, 0.88),
    ("Greece", 9.16, 1.40),
    ("Hungary", 4.67, 0.35),
    ("Iceland", 5.72, 0.10),
    ("Ireland", 2.82, 1.10),
    ("Italy", 2.96, 1.25),
    ("Netherlands", 1.16, 0.90),
    ("Poland", 3.68, 0.40),
    ("Portugal", 4.30, 1.20),
    ("Romania", 4.91, 0.30),
    ("Spain", 2.70, 1.15),
    ("Switzerland", 0.33, 0.70),
    ("UK", 1.81, 0.60),
]

T = 260


def business_days(start: datetime.date, count: int):
    day = start
    out = []
    while len(out) < count:
        if day.weekday() < 5:
            out.append(day)
        day += datetime.timedelta(days=1)
    return out


def main():
    rng = random.Random(20200101)
    dates = business_days(datetime.date(2020, 1, 1), T)

    factor = [0.0]
    for t in range(1, T):
        shock = rng.gauss(0.0, 0.12)
        factor.append(0.97 * factor[-1] + 0.06 * math.sin(2.0 * math.pi * t / 90.0) + shock)

    columns = []
    for _, level, loading in COUNTRIES:
        noise = [0.0]
        for _ in range(1, T):
            noise.append(0.88 * noise[-1] + rng.gauss(0.0, 0.05))
        columns.append([level + loading * f + z for f, z in zip(factor, noise)])

    with open("data/synthetic_panel.csv", "w", newline="\n") as out:
        out.write("date," + ",".join(name for name, _, _ in COUNTRIES) + "\n")
        for t, day in enumerate(dates):
            cells = ",".join(f"{columns[i][t]:.4f}" for i in range(len(COUNTRIES)))
            out.write(f"{day.isoformat()},{cells}\n")


if __name__ == "__main__":
    main()
