"""Generate the synthetic Italy-like contact/CFR tables shipped in data/.

The tables are synthetic. An age pyramid and an age-CFR profile of
roughly Italian shape are combined with a per-age contact-count law
whose mean declines with age; free shape parameters are fitted so the
resulting joint law over (r, p) hits the target moments below.

Run from the repository root:  python3 data/generate_italy_like.py
"""
import csv
import pathlib

import numpy as np
from scipy import optimize, stats

HERE = pathlib.Path(__file__).resolve().parent

# Target moments of the (r, p) law.
TARGET_ER = 12.1          # E[r]
TARGET_ER2_ER = 13.5      # E[r^2] / E[r]
TARGET_ICU_RATIO = 0.331  # E[r p^(2/3)] / E[r p^(1/3)]
# Soft targets for the edge-weighted severity moments: share of infections
# ending in death, E[r p] / E[r], and deaths per hospital admission,
# E[r p] / E[r p^(1/3)].
SOFT_IFR_EDGE = 0.030
SOFT_DEATH_PER_ADMISSION = 0.18

R_MAX = 30
R_GRID = np.arange(0, R_MAX + 1)

# 3-year age bins 0-2, 3-5, ..., 84-86, >=87.
AGE_LO = np.arange(0, 88, 3)
AGE_LABELS = [f"{a}-{a + 2}" for a in AGE_LO[:-1]] + [">=87"]
AGE_MID = np.append(AGE_LO[:-1] + 1.0, 90.0)

# Population by 5-year band (millions), 0-4 ... 85-89, 90+
POP5 = np.array([2.2, 2.6, 2.8, 2.9, 3.0, 3.2, 3.4, 3.8, 4.4, 4.8,
                 4.9, 4.5, 3.9, 3.6, 3.4, 2.7, 2.2, 1.4, 0.8])
# CFR by decade 0-9 ... 80-89, 90+
CFR10 = np.array([0.0010, 0.0005, 0.0010, 0.0030, 0.0090,
                  0.0270, 0.1000, 0.2500, 0.3000, 0.2700])


def age_mass():
    per_year = np.repeat(POP5[:-1] / 5.0, 5)            # ages 0..89
    per_year = np.append(per_year, np.full(10, POP5[-1] / 10.0))  # 90..99
    m = np.array([per_year[a:a + 3].sum() for a in AGE_LO[:-1]])
    m = np.append(m, per_year[87:].sum())
    return m / m.sum()


def cfr_by_bin(scale, tilt):
    decade = np.minimum((AGE_MID // 10).astype(int), 9)
    base = CFR10[decade]
    # tilt reshapes the age gradient on the log scale around age 60
    p = scale * base * np.exp(tilt * (AGE_MID - 60.0) / 30.0)
    return np.clip(p, 1e-6, 0.95)


def contact_hist(mean, disp):
    # negative binomial on 0..R_MAX, truncated and renormalised
    n = 1.0 / disp
    prob = n / (n + mean)
    h = stats.nbinom.pmf(R_GRID, n, prob)
    return h / h.sum()


def mean_contacts(params):
    young, peak, old, peak_age = params
    a = AGE_MID
    rise = young + (peak - young) * np.clip(a / peak_age, 0, 1)
    fall = peak + (old - peak) * np.clip((a - peak_age) / (90.0 - peak_age), 0, 1)
    return np.where(a <= peak_age, rise, fall)


def joint(x):
    young, peak, old, peak_age, disp, scale, tilt = x
    am = age_mass()
    means = mean_contacts((young, peak, old, peak_age))
    tab = np.array([am[i] * contact_hist(means[i], disp) for i in range(len(am))])
    return tab, cfr_by_bin(scale, tilt)


def moments(x):
    tab, p = joint(x)
    r = R_GRID[None, :]
    pp = p[:, None]
    er = (tab * r).sum()
    er2 = (tab * r * r).sum()
    a = (tab * r * np.cbrt(pp)).sum()
    b = (tab * r * np.cbrt(pp) ** 2).sum()
    c = (tab * r * pp).sum()
    return er, er2 / er, b / a, c / er, c / a


def residual(x):
    er, ratio, icu, ifr, dpa = moments(x)
    return [
        (er - TARGET_ER) / TARGET_ER * 100,
        (ratio - TARGET_ER2_ER) / TARGET_ER2_ER * 100,
        (icu - TARGET_ICU_RATIO) / TARGET_ICU_RATIO * 100,
        (ifr - SOFT_IFR_EDGE) / SOFT_IFR_EDGE * 3,
        (dpa - SOFT_DEATH_PER_ADMISSION) / SOFT_DEATH_PER_ADMISSION * 3,
    ]


def main():
    x0 = [10.0, 18.0, 5.0, 20.0, 0.05, 1.0, 0.0]
    lo = [2.0, 8.0, 1.0, 10.0, 0.001, 0.05, -3.0]
    hi = [25.0, 29.0, 15.0, 40.0, 2.0, 3.0, 3.0]
    fit = optimize.least_squares(residual, x0, bounds=(lo, hi))
    er, ratio, icu, ifr, dpa = moments(fit.x)
    print("params", np.round(fit.x, 5))
    print(f"E[r]={er:.4f} E[r2]/E[r]={ratio:.4f} icu_ratio={icu:.4f} "
          f"ifr_edge={ifr:.4f} deaths_per_admission={dpa:.4f}")
    tab, p = joint(fit.x)
    with open(HERE / "italy_like_contacts.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["age_bin", "r", "mass"])
        for i, lab in enumerate(AGE_LABELS):
            for r in R_GRID:
                w.writerow([lab, int(r), f"{tab[i, r]:.12e}"])
    with open(HERE / "italy_like_cfr.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["age_bin", "p"])
        for i, lab in enumerate(AGE_LABELS):
            w.writerow([lab, f"{p[i]:.8e}"])


if __name__ == "__main__":
    main()
