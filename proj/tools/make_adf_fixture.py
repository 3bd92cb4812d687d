"""Writes tests/data/adf_white_noise.txt: a seeded white-noise series and
reference ADF statistics (lag 0, constant) from statsmodels."""
import numpy as np
from statsmodels.tsa.stattools import adfuller

rng = np.random.default_rng(42)
x = rng.standard_normal(200)
walk = np.cumsum(x)


def stat(v):
    return adfuller(v, maxlag=0, regression="c", autolag=None)[0]


with open("adf_white_noise.txt", "w") as f:
    f.write(f"# statsmodels adfuller(maxlag=0, regression='c', autolag=None)\n")
    f.write(f"stat_noise {float(stat(x))!r}\n")
    f.write(f"stat_walk {float(stat(walk))!r}\n")
    f.write(f"stat_walk_diff {float(stat(np.diff(walk)))!r}\n")
    f.write("values " + " ".join(repr(float(v)) for v in x) + "\n")
