#!/usr/bin/env python3
"""Independent high-precision reference values for the unit tests.

Everything here is recomputed from the model definitions with mpmath at 40
significant digits; nothing is imported from the C++ library. Run from the
repository root to regenerate tests/oracles/oracle_values.hpp:

    python3 tests/oracles/make_oracles.py > tests/oracles/oracle_values.hpp
"""
import mpmath as mp

mp.mp.dps = 40

LOG2E = 1 / mp.log(2)

# Reference cluster.
B = mp.mpf(720000)
N0_DBM = mp.mpf(-174)
NU = mp.mpf("2.5")
T_H = mp.mpf("0.001")
D_G = [mp.mpf(10), mp.mpf(50)]
D_J = [mp.mpf("27.3"), mp.mpf(77)]
D_GJ = mp.mpf(30)
P_J = mp.mpf(20) / 1000
N_SAMPLES = 100
N_D = 256
LAMBDA = mp.mpf(50)
CAL_PD = mp.mpf("0.1")
CAL_PT = mp.mpf(50) / 1000

SIGMA2 = B * mp.power(10, N0_DBM / 10) * mp.mpf("1e-3")


def q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def capacity(g):
    return mp.log(1 + g, 2)


def dispersion(g, standard=False):
    inner = 1 - 1 / (1 + g) ** 2 if standard else 1 - 1 / (1 + g * g)
    return inner * LOG2E**2


def success(g, nb, nd, standard=False):
    """1 - BLER; the argument of Q changes sign."""
    if g == 0:
        return mp.mpf(0)
    v = dispersion(g, standard)
    arg = mp.sqrt(mp.mpf(nb) / v) * (capacity(g) - mp.mpf(nd) / nb)
    return q(-arg)


def bler(g, nb, nd, standard=False):
    if g == 0:
        return mp.mpf(1)
    v = dispersion(g, standard)
    arg = mp.sqrt(mp.mpf(nb) / v) * (capacity(g) - mp.mpf(nd) / nb)
    return q(arg)


def pd_awgn(snr, pth, n=N_SAMPLES):
    return q(mp.sqrt(n) * (pth / ((snr + 1) * SIGMA2) - 1))


def pd_rayleigh(pt, pth, n=N_SAMPLES):
    mean_snr = pt * D_GJ ** (-NU) / SIGMA2
    step = pth / SIGMA2 - 1  # detector argument crosses zero here
    f = lambda s: pd_awgn(s, pth, n) * mp.exp(-s / mean_snr) / mean_snr
    # Panels at most half an e-fold of the exponential wide, and never wider
    # than the detector's transition, up to well past the step. When the
    # probability is tiny the mass sits far below the step, so the whole
    # range from zero is covered.
    transition = max(abs(step), 1) / mp.sqrt(n)
    span = max(step, mp.mpf(0)) + 6 * transition
    width = min(mean_snr / 2, transition)
    panels = min(4000, int(mp.ceil(span / width)))
    pts = [span * k / panels for k in range(panels + 1)]
    tail = [span + mean_snr * j for j in (1, 5, 20, 60)]
    return mp.quad(f, pts + tail + [mp.inf])


def calibrate(target, pt):
    g = lambda lg: pd_rayleigh(pt, SIGMA2 * mp.e**lg) - target
    lo, hi = mp.mpf(0), mp.mpf(60)
    for _ in range(140):  # bisection: slow but unconditionally robust
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return SIGMA2 * mp.e ** ((lo + hi) / 2)


def chain(gain, powers, ue, jam=0):
    out = []
    for i in range(ue, len(powers)):
        interference = gain * sum(powers[:i])
        out.append(gain * powers[i] / (interference + jam + SIGMA2))
    return out


def cascade(gammas, nb, nd):
    p = mp.mpf(1)
    for g in gammas:
        p *= success(g, nb, nd)
    return p


def point(powers_mw, nb, L, pth, mode="Reactive"):
    powers = [mp.mpf(p) / 1000 for p in powers_mw]
    pt = sum(powers)
    pd = {"None": mp.mpf(0), "Barrage": mp.mpf(1)}.get(mode)
    if pd is None:
        pd = pd_rayleigh(pt, pth)
    tf = T_H + mp.mpf(nb) / B
    rows = []
    for ue in range(len(powers)):
        g = D_G[ue] ** (-NU)
        gj = D_J[ue] ** (-NU)
        p = cascade(chain(g, powers, ue), nb, N_D)
        pj = cascade(chain(g, powers, ue, gj * P_J), nb, N_D)
        P = pj * pd + p * (1 - pd)
        outage = (1 - P) ** L
        rho = LAMBDA * L * tf
        delay = (2 - rho) / (2 * (1 - rho)) * L * tf
        rate = N_D * (1 - outage) / delay
        rows.append(dict(p=p, pj=pj, P=P, R=1 - outage, outage=outage, rho=rho, D=delay, r=rate))
    return pd, tf, rows


def num(x):
    # Below half the smallest subnormal a double rounds to zero.
    return mp.nstr(x, 20) if abs(x) >= mp.mpf("2.5e-324") else "0.0"


def emit():
    print("#pragma once")
    print("// Generated by tests/oracles/make_oracles.py (mpmath, 40 digits). Do not edit.")
    print()
    print("namespace oracle {")
    print()
    print(f"inline constexpr double kNoisePowerW = {num(SIGMA2)};")

    print("\nstruct QCase { double x, q; };")
    print("inline constexpr QCase kQ[] = {")
    for x in ["-10", "-3", "-1", "-1e-8", "0", "1e-8", "0.5", "1", "1.6448536269514722", "2", "3.5", "5", "8",
              "12", "20", "37.5"]:
        print(f"    {{{x}, {num(q(mp.mpf(x)))}}},")
    print("};")

    print("\nstruct FblCase { double sinr; int n_b; int n_d; bool standard; double capacity, dispersion, bler, success; };")
    print("inline constexpr FblCase kFbl[] = {")
    for g in ["0.01", "0.5", "1", "3", "6", "8.347", "10", "100", "1e4"]:
        for nb, nd in [(40, 256), (80, 256), (120, 256), (400, 256), (100, 32)]:
            for std in (False, True):
                gg = mp.mpf(g)
                print(f"    {{{g}, {nb}, {nd}, {'true' if std else 'false'}, {num(capacity(gg))}, "
                      f"{num(dispersion(gg, std))}, {num(bler(gg, nb, nd, std))}, {num(success(gg, nb, nd, std))}}},")
    print("};")

    print("\nstruct AwgnCase { double snr, threshold_over_noise; int n; double pd; };")
    print("inline constexpr AwgnCase kAwgn[] = {")
    for snr, thr, n in [(0, "1.2", 100), (0, "1", 100), ("0.5", "1.2", 10), (3, 5, 100), (1e3, 1e3, 50),
                        (1e9, "2e9", 100), (1e9, "8e9", 100)]:
        val = pd_awgn(mp.mpf(snr), mp.mpf(thr) * SIGMA2, n)
        print(f"    {{{snr}, {thr}, {n}, {num(val)}}},")
    print("};")

    pth = calibrate(CAL_PD, CAL_PT)
    print(f"\n// Threshold with P_d = {mp.nstr(CAL_PD, 3)} at P_t = 50 mW.")
    print(f"inline constexpr double kCalibratedThresholdW = {num(pth)};")

    print("\nstruct RayleighCase { double total_power_mw; double pd; };")
    print("inline constexpr RayleighCase kRayleigh[] = {")
    for pt in ["1", "5", "9", "10", "20", "50", "70", "100", "1000"]:
        print(f"    {{{pt}, {num(pd_rayleigh(mp.mpf(pt) / 1000, pth))}}},")
    print("};")

    half = calibrate(mp.mpf("0.5"), CAL_PT)
    print(f"inline constexpr double kHalfDetectionThresholdW = {num(half)};")

    print("\nstruct UeRef { double p, pj, success, reliability, outage, rho, delay_s, rate_bps; };")
    print("struct PointRef { double p1_mw, p2_mw; int n_b, L; int mode; double pd, frame_s; UeRef ue[2]; double esr_bps; };")
    print("// mode: 0 None, 1 Barrage, 2 Reactive")
    print("inline constexpr PointRef kPoints[] = {")
    modes = {"None": 0, "Barrage": 1, "Reactive": 2}
    cases = [((10, 60), nb, L, "Reactive") for nb in (65, 80, 100, 120, 160) for L in (1, 2, 5)]
    cases += [((1, 8), 101, 1, "Reactive"), ((1, 13), 80, 2, "Reactive"), ((10, 60), 100, 2, "Barrage"),
              ((10, 60), 100, 2, "None"), ((13, 57), 83, 1, "Reactive")]
    for (p1, p2), nb, L, mode in cases:
        pd, tf, rows = point((p1, p2), nb, L, pth, mode)
        ues = ", ".join("{" + ", ".join(num(r[k]) for k in ("p", "pj", "P", "R", "outage", "rho", "D", "r")) + "}"
                        for r in rows)
        esr = sum(r["r"] for r in rows)
        print(f"    {{{p1}, {p2}, {nb}, {L}, {modes[mode]}, {num(pd)}, {num(tf)}, {{{ues}}}, {num(esr)}}},")
    print("};")
    print()
    print("}  // namespace oracle")


if __name__ == "__main__":
    emit()
