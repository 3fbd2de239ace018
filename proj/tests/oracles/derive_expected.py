#!/usr/bin/env python3
"""Derives the frozen expected values used in the C++ unit tests.

Everything here is computed with plain Python floats and brute force only, so the
numbers are an independent route to the library's closed forms. Run it and paste
the printed constants into the tests; each test cites the matching label.
"""
import itertools
import math


def block_mean(xs, ws):
    tw = sum(ws)
    return sum(w * x for w, x in zip(ws, xs)) / tw


def main():
    print("== cond_expect: x=(1,2,3,4), uniform, blocks {0,1},{2,3} ==")
    print([block_mean([1, 2], [0.25, 0.25]), block_mean([3, 4], [0.25, 0.25])])

    print("== cond_norm p=2, same setup ==")
    a = math.sqrt(block_mean([1, 4], [0.25, 0.25]))
    b = math.sqrt(block_mean([9, 16], [0.25, 0.25]))
    print([a, b], "squares:", [a * a, b * b])

    print("== entropic beta=1, x=(1,2,3,4), uniform, 2 blocks ==")
    ea = math.log((math.exp(-1) + math.exp(-2)) / 2)
    eb = math.log((math.exp(-3) + math.exp(-4)) / 2)
    print([ea, eb])

    print("== entropic conjugate, block y=(-1.5,-0.5), uniform weights ==")
    closed = (1.5 * math.log(1.5) + 0.5 * math.log(0.5)) / 2
    print("closed form:", closed)
    # brute route: sup over x-grid of E[x*y|F] - (1/b) log E[exp(-b x)|F], b = 1
    best = -1e18
    arg = None
    steps = 2001
    for i in range(steps):
        for j in range(steps):
            x0 = -12 + 24 * i / (steps - 1)
            x1 = -12 + 24 * j / (steps - 1)
            pair = 0.5 * (x0 * -1.5 + x1 * -0.5)
            f = math.log(0.5 * (math.exp(-x0) + math.exp(-x1)))
            v = pair - f
            if v > best:
                best, arg = v, (x0, x1)
    print("grid sup:", best, "at", arg)

    print("== avar lambda=0.5, block x=(1,2), uniform weights ==")
    # brute force over the test-density polytope vertices: 0 <= q <= w/lambda,
    # sum q = 1 with w = (0.5, 0.5); value = -<q, x>
    cap = 0.5 / 0.5  # w / lambda per coordinate... per-atom cap on q
    best = -1e18
    grid = 100001
    for k in range(grid):
        q0 = k / (grid - 1) * cap
        q1 = 1 - q0
        if -1e-12 <= q1 <= cap + 1e-12:
            v = -(q0 * 1 + q1 * 2)
            if v > best:
                best, argq = v, (q0, q1)
    print("value:", best, "q:", argq, "maximizer y = -q/w:", [-argq[0] / 0.5, -argq[1] / 0.5])

    print("== entropic dual rep at x=(1,2,3,4): plug y* and recompute ==")
    for xs in ([1.0, 2.0], [3.0, 4.0]):
        z = 0.5 * (math.exp(-xs[0]) + math.exp(-xs[1]))
        ys = [-math.exp(-x) / z for x in xs]
        pair = 0.5 * (xs[0] * ys[0] + xs[1] * ys[1])
        ent = 0.5 * ((-ys[0]) * math.log(-ys[0]) + (-ys[1]) * math.log(-ys[1]))
        print("  block", xs, "value:", pair - ent, "feasible mean:", 0.5 * (ys[0] + ys[1]))

    print("== separation: x=(2,.5,.5,.5), box [0,1]^4, uniform, blocks {0,1},{2,3} ==")
    # Euclidean projection onto the box per block, u = residual / (P(atom) * |residual|)
    x = [2.0, 0.5, 0.5, 0.5]
    proj = [min(1.0, max(0.0, v)) for v in x]
    r = [xi - pi for xi, pi in zip(x, proj)]
    nrmA = math.hypot(r[0], r[1])
    u = [r[0] / (0.25 * nrmA), r[1] / (0.25 * nrmA), 0.0, 0.0]
    pair_xu = (0.25 * x[0] * u[0] + 0.25 * x[1] * u[1]) / 0.5
    # sup over box of the same pairing: coordinatewise, positive coefficient -> 1
    sup_m = (0.25 * 1.0 * u[0] + 0.25 * 1.0 * max(u[1], 0.0)) / 0.5
    print("u:", u, "E[x.u|F] block A:", pair_xu, "sup_M:", sup_m, "margin:", pair_xu - sup_m)

    print("== distance: same x and box, p=inf -> per-block max |x - clamp(x)| ==")
    d = [abs(xi - pi) for xi, pi in zip(x, proj)]
    print([max(d[0], d[1]), max(d[2], d[3])])

    print("== gauge of the sup-norm unit ball at x=(1,2,3,4) == ")
    print([max(1, 2), max(3, 4)])

    print("== polar of {(1,1,1,1)}: y=(2,-1,0,0) block means ==")
    print([block_mean([2, -1], [0.25, 0.25]), block_mean([0, 0], [0.25, 0.25])])

    print("== concatenation hull of {0000, 1111} over 2 blocks ==")
    gens = [(0, 0, 0, 0), (1, 1, 1, 1)]
    hull = set()
    for ga, gb in itertools.product(gens, gens):
        hull.add((ga[0], ga[1], gb[2], gb[3]))
    print(sorted(hull))

    print("== local sup reduction: f=cond_expect, G={(0,0,4,4),(2,2,0,0)} ==")
    fvals = [(block_mean(g[:2], [1, 1]),) * 2 + (block_mean(g[2:], [1, 1]),) * 2
             for g in [(0, 0, 4, 4), (2, 2, 0, 0)]]
    sup_g = [max(col) for col in zip(*fvals)]
    hull_vals = []
    for ga, gb in itertools.product([(0, 0, 4, 4), (2, 2, 0, 0)], repeat=2):
        glued = ga[:2] + gb[2:]
        hull_vals.append((block_mean(glued[:2], [1, 1]),) * 2
                         + (block_mean(glued[2:], [1, 1]),) * 2)
    sup_h = [max(col) for col in zip(*hull_vals)]
    print("sup over G:", sup_g, "sup over hull:", sup_h)

    print("== backward recursion hand values ==")
    dt = 1.0
    yu, yd = 1.0, -1.0
    z = (yu - yd) / (2 * math.sqrt(dt))
    print("zero driver, terminal (1,-1):  Z:", z, "Y0:", (yu + yd) / 2)
    yu, yd = -1.0, 1.0
    z = (yu - yd) / (2 * math.sqrt(dt))
    print("g=0.5|z|, terminal (-1,1):     Z:", z, "Y0:", (yu + yd) / 2 + 0.5 * abs(z) * dt)

    print("== recursion Lipschitz constants e^(8(1+mu^2)T), T=1 ==")
    print({mu: math.exp(8 * (1 + mu * mu)) for mu in (0.0, 0.5, 1.0)})

    print("== ball membership eps-lambda example: x=(1,2,3,4), p=inf, eps=3, lambda=0.6 ==")
    norms = [2, 2, 4, 4]
    p_below = sum(0.25 for v in norms if v < 3)
    print("P{norm < 3} =", p_below, "> 1 - 0.6:", p_below > 1 - 0.6)


if __name__ == "__main__":
    main()
