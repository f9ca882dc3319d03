"""
Fix the coefficients c_n of

    sum_{n=0}^{tau} c_n tanh^{2n}(a/2) F(-tau, 1+tau; 1+n; -sinh^2(a/2)) = 1

by expansion in x = sinh^2(a/2). With tanh^2 = x/(1+x), multiplying by
(1+x)^tau turns the identity into the polynomial identity

    sum_n c_n x^n (1+x)^(tau-n) F_n(x) = (1+x)^tau,

which is triangular in c_n (the n-th term starts at x^n with coefficient 1).
The first tau+1 coefficients determine c_n; the remaining ones up to x^(2 tau)
must then cancel. The solved c_n are compared with the two readings of the
sign, (-1)^n and (-1)^(n!).
"""

import argparse
import math
from fractions import Fraction
from pathlib import Path
from typing import List

Poly = List[Fraction]


def poly_mul(p: Poly, q: Poly) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def binomial_power(power: int) -> Poly:
    """(1 + x)^power"""
    return [Fraction(math.comb(power, j)) for j in range(power + 1)]


def hypergeometric_poly(tau: int, n: int) -> Poly:
    """F(-tau, 1+tau; 1+n; -x) as a polynomial in x"""
    coeffs, term = [Fraction(1)], Fraction(1)
    for j in range(tau):
        term = term * (j - tau) * (1 + tau + j) / ((1 + n + j) * (j + 1)) * -1
        coeffs.append(term)
    return coeffs


def term_poly(tau: int, n: int) -> Poly:
    """x^n (1+x)^(tau-n) F(-tau, 1+tau; 1+n; -x)"""
    return [Fraction(0)] * n + poly_mul(binomial_power(tau - n), hypergeometric_poly(tau, n))


def coefficient(poly: Poly, power: int) -> Fraction:
    return poly[power] if power < len(poly) else Fraction(0)


def solve(tau: int):
    terms = [term_poly(tau, n) for n in range(tau + 1)]
    target = binomial_power(tau)
    c: List[Fraction] = []
    for n in range(tau + 1):
        known = sum((c[m] * coefficient(terms[m], n) for m in range(n)), Fraction(0))
        c.append((coefficient(target, n) - known) / coefficient(terms[n], n))
    leftover = [
        coefficient(target, p) - sum((c[n] * coefficient(terms[n], p) for n in range(tau + 1)), Fraction(0))
        for p in range(2 * tau + 1)
    ]
    return c, leftover


def magnitude(tau: int, n: int) -> int:
    return math.factorial(tau + n) // (math.factorial(n) ** 2 * math.factorial(tau - n))


def render(tau_max: int) -> str:
    lines = [
        "# Unity identity: coefficient derivation",
        "",
        "Generated by `scripts/derive_unity_sign.py`. For each tau the coefficients",
        "c_n are solved from the low powers of x = sinh^2(a/2); `leftover` lists the",
        "coefficients of x^0 .. x^(2 tau) of (1+x)^tau minus the assembled sum and must",
        "be all zero.",
        "",
    ]
    for tau in range(tau_max + 1):
        c, leftover = solve(tau)
        lines.append(f"## tau = {tau}")
        lines.append("")
        lines.append("| n | solved c_n | (-1)^n m_n | (-1)^(n!) m_n |")
        lines.append("|---|------------|------------|---------------|")
        for n, value in enumerate(c):
            m = magnitude(tau, n)
            lines.append(f"| {n} | {value} | {(-1) ** n * m} | {(-1) ** math.factorial(n) * m} |")
        lines.append("")
        lines.append(f"leftover: {[str(v) for v in leftover]}")
        matches = all(value == (-1) ** n * magnitude(tau, n) for n, value in enumerate(c))
        lines.append(f"matches (-1)^n: {matches}")
        lines.append("")
    lines.append("m_n = (tau+n)! / ((n!)^2 (tau-n)!)")
    lines.append("")
    return "\n".join(lines)


def main():
    parser = argparse.ArgumentParser(description='Derive the sign of the unity identity coefficients')
    parser.add_argument('--tau-max', type=int, default=3, help='Largest tau to expand')
    parser.add_argument('--output', default='docs/unity_sign_derivation.md', help='Derivation log')
    args = parser.parse_args()

    text = render(args.tau_max)
    Path(args.output).parent.mkdir(parents=True, exist_ok=True)
    Path(args.output).write_text(text)
    print(f"Derivation log written to {args.output}")


if __name__ == '__main__':
    main()
