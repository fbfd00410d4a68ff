"""Independent oracles used by the tests.

The flow-generator oracle recomputes the generating Hamiltonian of a flow
word entirely in the free associative algebra: the word maps to the group
element W(tau) = prod_i exp(c_i(tau) X_i) (pointwise inverse maps to the
series inverse), and the generator is V = W' W^{-1}, rewritten into the
Lyndon basis per tau power.  This shares no code path with the pullback
ODE used by flows.path_generator.

The field oracle differentiates closed-form sympy expressions with the
coordinate bracket {f, g} = f_q g_p - f_p g_q.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import sympy as sp

from bracketlab import flows
from bracketlab.liepoly import LiePoly
from bracketlab.lyndon import env_add_into, env_mul, lie_envelope_to_lyndon

# -- envelope tau-series -------------------------------------------------------


class EnvSeries:
    """coeffs[k] is an envelope polynomial (dict word -> Fraction); the
    empty word "" is the unit."""

    def __init__(self, coeffs: list[dict], truncation: int, max_degree: int):
        self.coeffs = coeffs
        self.T = truncation
        self.D = max_degree

    @classmethod
    def unit(cls, T: int, D: int) -> "EnvSeries":
        return cls([{"": Fraction(1)}] + [{} for _ in range(T)], T, D)

    def prune(self) -> "EnvSeries":
        for c in self.coeffs:
            for w in [w for w, v in c.items() if len(w) > self.D or not v]:
                del c[w]
        return self

    def mul(self, other: "EnvSeries") -> "EnvSeries":
        out = [dict() for _ in range(self.T + 1)]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > self.T or not b:
                    continue
                env_add_into(out[i + j], env_mul(a, b))
        return EnvSeries(out, self.T, self.D).prune()

    def add(self, other: "EnvSeries", scale=1) -> "EnvSeries":
        out = [dict(c) for c in self.coeffs]
        for k, c in enumerate(other.coeffs):
            env_add_into(out[k], c, scale)
        return EnvSeries(out, self.T, self.D).prune()

    def d_dtau(self) -> "EnvSeries":
        out = [dict() for _ in range(self.T + 1)]
        for k in range(1, self.T + 1):
            out[k - 1] = {w: Fraction(k) * v for w, v in self.coeffs[k].items()}
        return EnvSeries(out, self.T, self.D)

    def inverse(self) -> "EnvSeries":
        # split W = C0 + (tau terms); C0 is group-like with unit constant
        # word, so it inverts by degree-nilpotent geometric series, after
        # which the tau part inverts by tau-nilpotent geometric series
        c0 = self.coeffs[0]
        assert c0.get("", 0) == 1, "group element must have unit constant term"
        c0_inv = _env_unit_inverse(c0, self.D)
        c0_inv_series = EnvSeries([dict(c0_inv)] + [{} for _ in range(self.T)], self.T, self.D)
        n = c0_inv_series.mul(self).add(EnvSeries.unit(self.T, self.D), -1)
        assert not n.coeffs[0], "normalized series must start at the unit"
        out = EnvSeries.unit(self.T, self.D)
        power = EnvSeries.unit(self.T, self.D)
        for k in range(1, self.T + 1):
            power = power.mul(n)
            out = out.add(power, (-1) ** k)
        return out.mul(c0_inv_series)


def _env_unit_inverse(c0: dict, D: int) -> dict:
    """(1 + M)^{-1} for an envelope element with unit empty-word part;
    M raises word length, so the geometric series stops at degree D."""
    m = {w: v for w, v in c0.items() if w}
    out = {"": Fraction(1)}
    power = {"": Fraction(1)}
    for k in range(1, D + 1):
        power = {w: v for w, v in env_mul(power, m).items() if len(w) <= D}
        if not power:
            break
        env_add_into(out, power, (-1) ** k)
    return out


def _exp_factor(factor: flows.Factor, T: int, D: int) -> EnvSeries:
    # exp(c(tau) X): sum_k c^k / k! X^k; the power of X is bounded by the
    # degree cap D (constant parts of c contribute at every tau order)
    x_env = {w: c for w, c in factor.generator.terms.items()}
    c_poly = list(factor.time) + [Fraction(0)] * (T + 1 - len(factor.time))
    out = EnvSeries.unit(T, D)
    xk = {"": Fraction(1)}
    ck = [Fraction(1)] + [Fraction(0)] * T  # c^0
    fact = 1
    for k in range(1, D + 1):
        xk = {w: v for w, v in env_mul(xk, x_env).items() if len(w) <= D}
        if not xk:
            break
        new_ck = [Fraction(0)] * (T + 1)
        for i, a in enumerate(ck):
            if not a:
                continue
            for j, b in enumerate(c_poly[: T + 1 - i]):
                if b:
                    new_ck[i + j] += a * b
        ck = new_ck
        fact *= k
        term = [
            {w: v * ck[t] / fact for w, v in xk.items()} if ck[t] else {}
            for t in range(T + 1)
        ]
        out = out.add(EnvSeries(term, T, D))
    return out.prune()


def _word_element(word: flows.FlowWord, T: int, D: int) -> EnvSeries:
    word = word.normalized()
    if isinstance(word, flows.Factor):
        return _exp_factor(word, T, D)
    if isinstance(word, flows.Product):
        out = _word_element(word.children[0], T, D)
        for child in word.children[1:]:
            out = out.mul(_word_element(child, T, D))
        return out
    if isinstance(word, flows.Inverse):
        return _word_element(word.child, T, D).inverse()
    raise TypeError(word)


def oracle_generator(word: flows.FlowWord, T: int) -> list[LiePoly]:
    """Generator series V = W' W^{-1} as Lyndon-basis coefficients.

    W is carried one tau order beyond T so its derivative is complete
    through tau^T; degree truncation is a graded-algebra quotient, so one
    extra degree keeps every component of V up to degree T+1 exact.
    """
    W = _word_element(word, T + 1, T + 2)
    V = W.d_dtau().mul(W.inverse())
    out = []
    for k in range(T + 1):
        terms = lie_envelope_to_lyndon(V.coeffs[k])
        out.append(LiePoly({w: c for w, c in terms.items() if len(w) <= T + 1}, T + 1))
    return out


# -- sympy field oracle ----------------------------------------------------------

P_SYM, Q_SYM = sp.symbols("p q")


def sym_bracket(f: sp.Expr, g: sp.Expr) -> sp.Expr:
    return sp.diff(f, Q_SYM) * sp.diff(g, P_SYM) - sp.diff(f, P_SYM) * sp.diff(g, Q_SYM)


def sym_grid_values(expr: sp.Expr, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    fn = sp.lambdify((P_SYM, Q_SYM), sp.expand(expr), "numpy")
    out = fn(P, Q)
    return np.broadcast_to(np.asarray(out, dtype=float), P.shape)
