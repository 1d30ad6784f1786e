"""Singular time of the S^2 x S^1 flow, computed in log-scale variables.

With w = lambda*h^2 and sigma = ln(lambda) the system is regular up to the
singularity: dw/dsigma = w(1-2w)/(w-1), dt/dsigma = exp(sigma)/(w-1).
T is the value of t as sigma -> -infinity.
"""
import sys
import mpmath as mp

mp.mp.dps = 30


def singular_time(h0sq, sigma_end=-60):
    def rhs(sigma, y):
        w, t = y
        return [w * (1 - 2 * w) / (w - 1), mp.e**sigma / (w - 1)]

    sol = mp.odefun(rhs, 0, [mp.mpf(h0sq), mp.mpf(0)])
    # integrate toward negative sigma by substitution s = -sigma
    def rhs_neg(s, y):
        d = rhs(-s, y)
        return [-d[0], -d[1]]

    sol = mp.odefun(rhs_neg, 0, [mp.mpf(h0sq), mp.mpf(0)])
    w, t = sol(-sigma_end)
    return t, w


if __name__ == "__main__":
    for h0sq in [float(a) for a in sys.argv[1:]] or [0.1]:
        t, w = singular_time(h0sq)
        print(f"h0^2={h0sq}: T_sing={mp.nstr(t, 20)}  w_end={mp.nstr(w, 20)}")
