"""High-precision reference values frozen into the Rust test suite.

Everything here is computed independently of the Rust code: polariton roots
come from the polynomial obtained by clearing the Lorentz denominators, and
propagator samples from direct numerical Fourier inversion on the real axis.

    python3 tools/freeze_oracles.py
"""
import mpmath as mp

mp.mp.dps = 40


def poly_mul(a, b):
    out = [mp.mpc(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def poly_add(a, b):
    n = max(len(a), len(b))
    a = a + [mp.mpc(0)] * (n - len(a))
    b = b + [mp.mpc(0)] * (n - len(b))
    return [x + y for x, y in zip(a, b)]


def denom(wn, g):
    # wn^2 - (W + i g)^2 = (wn^2 + g^2) - 2 i g W - W^2, ascending powers
    return [mp.mpc(wn**2 + g**2), mp.mpc(0, -2 * g), mp.mpc(-1)]


def secular_poly(res, wa):
    """(wa^2 - W^2) prod d_n - W^2 sum f_n prod_{m != n} d_m."""
    prod_all = [mp.mpc(1)]
    for (_, wn, g) in res:
        prod_all = poly_mul(prod_all, denom(wn, g))
    p = poly_mul([mp.mpc(wa**2), 0, mp.mpc(-1)], prod_all)
    for n, (f, _, _) in enumerate(res):
        q = [mp.mpc(f)]
        for m, (_, wm, gm) in enumerate(res):
            if m != n:
                q = poly_mul(q, denom(wm, gm))
        p = poly_add(p, poly_mul([0, 0, mp.mpc(-1)], q))
    return p


def eps(res, w):
    return 1 + sum(f / (wn**2 - (w + 1j * g) ** 2) for (f, wn, g) in res)


def deps(res, w):
    return sum(f * 2 * (w + 1j * g) / (wn**2 - (w + 1j * g) ** 2) ** 2 for (f, wn, g) in res)


def roots(res, wa):
    p = secular_poly(res, wa)
    r = mp.polyroots(list(reversed(p)), maxsteps=200, extraprec=200)
    return sorted([z for z in r if mp.re(z) > 0], key=lambda z: mp.re(z))


def dval(res, wa, w):
    return wa / w + w**2 * deps(res, w) / (2 * wa)


def h_direct(res, wa, tau):
    # H = (1/2pi) int e^{-i w tau} [1/(wa^2 - eps w^2) - 1/(wa^2 - w^2)] dw + sin(wa tau)/wa
    # the vacuum piece is taken with the causal prescription, so shift both
    # integrands by +i eta and undo the damping; eta cancels exactly.
    eta = mp.mpf("0.05")

    def diff(w):
        z = w + 1j * eta
        return mp.exp(-1j * w * tau) * (1 / (wa**2 - eps(res, z) * z**2) - 1 / (wa**2 - z**2))

    # Piecewise Gauss-Legendre over the resonant region, oscillatory rule
    # only for the smooth tail (a single quadosc call loses ~1e-8 at small τ).
    g = lambda w: diff(w) + diff(-w)
    pts = [mp.mpf(k) / 4 for k in range(0, 41)] + [mp.mpf(k) for k in range(11, 101)]
    val = mp.quad(g, pts) + mp.quadosc(g, [100, mp.inf], omega=tau)
    return mp.re(mp.exp(eta * tau) * val / (2 * mp.pi)) + mp.sin(wa * tau) / wa


REF = [(1, 1, mp.mpf("0.1"))]
TWO = [(1, 1, mp.mpf("0.3")), (mp.mpf("0.5"), 3, mp.mpf("0.05"))]

for name, res, was in [("REF", REF, [mp.mpf("0.5"), 1, 2]), ("TWO", TWO, [2])]:
    for wa in was:
        rs = roots(res, wa)
        print(f"{name} wa={wa}")
        im_sum = 0
        re_sum = 0
        for z in rs:
            d = dval(res, wa, z)
            im_sum += mp.im(1 / d) / wa
            re_sum += mp.re(eps(res, z) * z / d) / wa
            print(f"  root {mp.nstr(mp.re(z), 17)} {mp.nstr(mp.im(z), 17)}  D {mp.nstr(mp.re(d), 17)} {mp.nstr(mp.im(d), 17)}")
        print(f"  im_sum {mp.nstr(im_sum, 5)} re_sum-1 {mp.nstr(re_sum - 1, 5)}")

for tau in [mp.mpf("0.5"), 1, 2]:
    print(f"H_ref(wa=1, tau={tau}) = {mp.nstr(h_direct(REF, 1, tau), 17)}")

# Longitudinal single resonance zero
print("long root", mp.sqrt(2), "- 0.05i")
