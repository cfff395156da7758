#!/usr/bin/env python3
"""Regenerate the classical-form fixture files under fixtures/.

Requires a PARI/GP Python binding (cypari2 or passagemath-pari). The C++
library never calls PARI; it only reads the text files written here.

Basis fixtures  (N<N>_k<k>.txt): line 1 "N k dim T", then dim rows of T
integers spanning the q-expansion lattice M_k(Gamma0(N)) cap Z[[q]].
Newform fixtures (<label>.txt):   line 1 "N k label T", line 2 a_0..a_{T-1}.
"""
import argparse
import os

import cypari2

pari = cypari2.Pari()
pari.allocatemem(4 * 10**9)

LEVELS = [19, 29, 41, 53, 59, 61, 89]
WEIGHTS = [2, 4, 6]

# Newforms attached to elliptic curves, given by Weierstrass models.
CURVES = {
    "58a": [1, -1, 0, -1, 1],
    "4617a": [0, 0, 1, 9, -10],
    "15104a": [0, 1, 0, -62893, -6091893],
}
# Rational newforms used as g; any curve in the isogeny class gives the
# same a_n (models located by a small search matching mfeigenbasis data).
CURVES.update({
    "58b": [1, 1, 1, 5, 9],
    "19a": [0, 1, 0, 11, 3],
    "118a": [0, -1, 0, 8, 44],
})


def basis_rows(N, k, T):
    mf = pari(f"mfinit([{N},{k}],4)")
    B = pari.mfbasis(mf)
    rows = pari.matrix(len(B), T)
    C = pari.mfcoefs(mf, T - 1)  # columns = basis forms
    A = pari.mattranspose(C)
    den = pari.denominator(A)
    A = A * den
    # Z^T cap (Q-row space), then LLL for small entries.
    S = pari.matrixqz(pari.mattranspose(A), -2)
    S = pari.mattranspose(S)
    U = pari.qflll(pari.mattranspose(S))
    S = pari.mattranspose(pari.mattranspose(S) * U)
    return [[int(S[i, j]) for j in range(T)] for i in range(len(B))]


def write_basis(outdir, N, k, T):
    rows = basis_rows(N, k, T)
    path = os.path.join(outdir, f"N{N}_k{k}.txt")
    with open(path, "w") as fh:
        fh.write(f"{N} {k} {len(rows)} {T}\n")
        for r in rows:
            fh.write(" ".join(str(x) for x in r) + "\n")
    print("wrote", path, len(rows))


def curve_coeffs(ainv, T):
    E = pari.ellinit(ainv)
    an = pari.ellan(E, T - 1)
    return [0] + [int(x) for x in an]


def write_newform(outdir, label, N, coeffs):
    path = os.path.join(outdir, f"{label}.txt")
    with open(path, "w") as fh:
        fh.write(f"{N} 2 {label} {len(coeffs)}\n")
        fh.write(" ".join(str(x) for x in coeffs) + "\n")
    print("wrote", path, len(coeffs))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "fixtures"))
    ap.add_argument("--T", type=int, default=3000)
    ap.add_argument("--newform-T", type=int, default=100000)
    ap.add_argument("--only", choices=["bases", "newforms", "all"], default="all")
    ap.add_argument("--weights", type=int, nargs="+", default=WEIGHTS)
    ap.add_argument("--levels", type=int, nargs="+", default=LEVELS)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    if args.only in ("bases", "all"):
        for N in args.levels:
            for k in args.weights:
                write_basis(args.out, N, k, args.T)
    if args.only in ("newforms", "all"):
        for label, ainv in CURVES.items():
            N = int(pari.ellglobalred(pari.ellinit(ainv))[0])
            write_newform(args.out, label, N, curve_coeffs(ainv, args.newform_T))


if __name__ == "__main__":
    main()
