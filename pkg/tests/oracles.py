"""Brute-force reference computations, written independently of the package."""
import math


def process_value(x, r, w, k, z):
    """n * T(k/n, z) by explicit summation; x is a list of tuples."""
    total = 0.0
    for i in range(k):
        if w[i] and all(xi <= zi for xi, zi in zip(x[i], z)):
            total += r[i] * w[i]
    return total


def ks_profile(x, r, w=None):
    """Sup over the coordinate lattice (exact in any dimension) for every k."""
    n = len(r)
    w = w or [1.0] * n
    d = len(x[0])
    coords = [sorted({p[j] for p in x}) for j in range(d)]
    lattice = [()]
    for c in coords:
        lattice = [z + (v,) for z in lattice for v in c]
    out = [0.0]
    for k in range(1, n + 1):
        out.append(max([0.0] + [abs(process_value(x, r, w, k, z)) for z in lattice]) / n)
    return out


def cvm_profile(x, r, w=None):
    n = len(r)
    w = w or [1.0] * n
    out = [0.0]
    for k in range(1, n + 1):
        out.append(sum((process_value(x, r, w, k, z) / n) ** 2 for z in x) / n)
    return out


def epa2(u):
    return 0.75 * (1 - u * u) if abs(u) <= 1 else 0.0


def epa4(u):
    return 15 / 32 * (3 - 10 * u * u + 7 * u ** 4) if abs(u) <= 1 else 0.0


def loocv(x, y, kern, h):
    """Double-loop leave-one-out CV for d = 1 without trimming."""
    n = len(y)
    errs = []
    for i in range(n):
        num = den = 0.0
        for j in range(n):
            if j != i:
                wt = kern((x[i] - x[j]) / h)
                num += wt * y[j]
                den += wt
        if abs(den) >= 1e-10:
            errs.append((y[i] - num / den) ** 2)
    if len(errs) < max(5, math.ceil(0.1 * n)):
        return math.inf
    return sum(errs) / len(errs)
