"""Sieve weights over reduced residues and their diagnostics.

The weight w_a is the square of a signed divisor sum with a smooth cutoff F
supported (through its mixed derivative) on the simplex
Delta_k(theta; eps) = {t >= 0 : t_1 + ... + t_k <= (theta - eps)/2}.
It concentrates mass on residues a mod q for which several of the shifted
values a + q*h_i are prime.  This module computes:

  * the small-prime setup (w, W_q, b_0) that removes small-prime obstructions;
  * lambda_f divisor sums and the weights themselves (tensor cutoffs exactly,
    via the product of one-dimensional divisor sums);
  * the singular integrals I(F), J_i(F) of the mixed derivative, in closed
    form for tensor cutoffs and by dimension-reduced grid quadrature (with a
    Monte-Carlo cross-check) for the psi-product family;
  * the detection ratio sum_i J_i / I and the (k, rho) selection rule;
  * the exact finite sum S = sum_a (#primes - (m-1) - k * #small-factors) w_a
    whose positivity pigeonholes an m-cluster into some progression;
  * the exact discrepancy of reduced residues in progressions (level of
    distribution diagnostic).

Everything below the asymptotic regime is computed exactly by enumeration;
no main-term/error-term estimates are asserted.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import ceil, exp, floor, fsum, gcd, log, log10
from typing import Optional, Sequence, Union

import numpy as np

from .errors import BudgetExceeded, InvalidParameter, UsageError
from .primes import _base_primes, factorize, iter_prime_segments

# ---------------------------------------------------------------------------
# small-prime setup: w, W_q, b_0
# ---------------------------------------------------------------------------


def small_primorial_coprime(
    q: int, w_override: Optional[int] = None
) -> tuple[int, int]:
    """(w, W_q): w = max(2, floor(log log log q)) or the override; W_q is the
    product of primes <= w not dividing q.

    At desk scale the triple logarithm is below 2, so W_q is usually trivial;
    the override lets callers exercise a nontrivial W_q.
    """
    if w_override is not None:
        w = int(w_override)
        if w < 2:
            raise UsageError(f"w override must be >= 2, got {w}")
    else:
        if q < 16:
            raise UsageError(f"need q >= 16 for log log log q (got {q})")
        lll = log(log(log(q)))
        w = max(2, floor(lll))
    Wq = 1
    for p in map(int, _base_primes(w)):
        if q % p != 0:
            Wq *= p
    return w, Wq


def choose_b0(q: int, Wq: int, offsets: Sequence[int]) -> int:
    """Smallest b0 in [1, Wq] with gcd(b0 + q*h_i, Wq) = 1 for all offsets.

    Existence is guaranteed by admissibility of the offsets (CRT over the
    primes dividing Wq, each of which misses a class).
    """
    if Wq == 1:
        return 1
    for b0 in range(1, Wq + 1):
        if all(gcd((b0 + q * h) % Wq, Wq) == 1 for h in offsets):
            return b0
    raise InvalidParameter(
        f"no admissible b0 mod {Wq}; offsets {tuple(offsets)} are not "
        f"admissible for the primes dividing W_q"
    )


# ---------------------------------------------------------------------------
# cutoff functions
# ---------------------------------------------------------------------------


class PiecewiseLinear:
    """Continuous piecewise-linear f on [0, s], zero outside; f(s) = 0."""

    def __init__(self, nodes: Sequence[tuple[float, float]]):
        nodes = tuple((float(t), float(v)) for t, v in nodes)
        if len(nodes) < 2:
            raise UsageError("need at least two nodes")
        ts = [t for t, _ in nodes]
        if ts != sorted(ts) or len(set(ts)) != len(ts):
            raise UsageError("node times must be strictly increasing")
        if ts[0] != 0.0:
            raise UsageError("support must start at 0")
        if nodes[-1][1] != 0.0:
            raise UsageError("f must vanish at the end of its support")
        self.nodes = nodes
        self.support = ts[-1]

    @classmethod
    def ramp(cls, s: float) -> "PiecewiseLinear":
        """f(t) = 1 - t/s on [0, s]."""
        return cls(((0.0, 1.0), (float(s), 0.0)))

    def __call__(self, t: float) -> float:
        if t < 0.0 or t > self.support:
            return 0.0
        for (t0, v0), (t1, v1) in zip(self.nodes, self.nodes[1:]):
            if t <= t1:
                return v0 + (v1 - v0) * (t - t0) / (t1 - t0)
        return 0.0

    def deriv_segments(self) -> list[tuple[float, float, float]]:
        """(t0, t1, slope) triples."""
        return [
            (t0, t1, (v1 - v0) / (t1 - t0))
            for (t0, v0), (t1, v1) in zip(self.nodes, self.nodes[1:])
        ]

    def integral_deriv(self) -> float:
        """int f' = -f(0)."""
        return -self.nodes[0][1]

    def integral_deriv_sq(self) -> float:
        """int (f')^2."""
        return fsum(s * s * (t1 - t0) for t0, t1, s in self.deriv_segments())


@dataclass(frozen=True)
class CutoffF:
    """Cutoff family: either a tensor product of one-dimensional pieces, or
    the psi-product whose mixed derivative is
    1_Delta(t) * prod_i psi(t_i), psi(t) = 1/(c + (k-1) t),
    c = 1/log k - 1/log^2 k."""

    family: str  # 'tensor' | 'psi_product'
    fs: Optional[tuple[PiecewiseLinear, ...]] = None
    k: int = 0
    theta: float = 0.5
    eps_k: float = 0.0

    @classmethod
    def tensor(cls, fs: Sequence[PiecewiseLinear]) -> "CutoffF":
        fs = tuple(fs)
        if not fs:
            raise UsageError("empty tensor family")
        return cls(family="tensor", fs=fs, k=len(fs))

    @classmethod
    def ramp_tensor(cls, k: int, s: float) -> "CutoffF":
        return cls.tensor([PiecewiseLinear.ramp(s)] * k)

    @classmethod
    def psi_product(
        cls, k: int, theta: float = 0.5, eps_k: Optional[float] = None
    ) -> "CutoffF":
        if k < 2:
            raise UsageError("psi family needs k >= 2")
        if eps_k is None:
            eps_k = 1.0 / log(k)
        if not 0 <= eps_k < theta:
            raise UsageError(f"need 0 <= eps_k < theta, got {eps_k} vs {theta}")
        return cls(family="psi_product", k=k, theta=float(theta), eps_k=float(eps_k))

    @property
    def simplex_cap(self) -> float:
        """(theta - eps)/2 for the psi family; sum of supports for tensor."""
        if self.family == "psi_product":
            return (self.theta - self.eps_k) / 2.0
        return fsum(f.support for f in self.fs)

    @property
    def psi_c(self) -> float:
        lk = log(self.k)
        return 1.0 / lk - 1.0 / lk**2

    def support_per_coordinate(self, i: int) -> float:
        if self.family == "tensor":
            return self.fs[i].support
        return self.simplex_cap


def validate_cutoff(F: CutoffF, theta: float, eps_k: float):
    """Tensor supports must fit inside the simplex: sum s_i <= (theta-eps)/2."""
    if F.family == "tensor":
        total = fsum(f.support for f in F.fs)
        if total > (theta - eps_k) / 2.0 + 1e-12:
            raise InvalidParameter(
                f"tensor supports sum to {total:.6f} > (theta-eps)/2 = "
                f"{(theta - eps_k) / 2:.6f}"
            )


# ---------------------------------------------------------------------------
# sieve parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SieveParams:
    """All sieve configuration: target cluster size m, level of distribution
    theta, simplex shrink eps_k, tuple length k, small-prime cutoff exponent
    rho, small-prime bound w, primorial W_q, residue b0, ratio constant C2."""

    m: int
    theta: float
    eps_k: float
    k: int
    rho: Union[Fraction, float]
    w: int
    Wq: int
    b0: int
    C2: float = 0.0

    @classmethod
    def build(
        cls,
        q: int,
        offsets: Sequence[int],
        m: int,
        theta: float = 0.5,
        eps_k: Optional[float] = None,
        rho: Optional[Union[Fraction, float]] = None,
        w_override: Optional[int] = None,
        C2: float = 0.0,
    ) -> "SieveParams":
        k = len(offsets)
        if k < 1:
            raise UsageError("need at least one offset")
        if eps_k is None:
            eps_k = 1.0 / log(k) if k >= 2 else 0.0
        if rho is None:
            rho = Fraction(1, 100 * k)
        if not 0 < Fraction(rho) <= Fraction(1, 100 * k):
            raise InvalidParameter(f"need 0 < rho <= 1/(100k) = 1/{100 * k}")
        w, Wq = small_primorial_coprime(q, w_override)
        b0 = choose_b0(q, Wq, offsets)
        return cls(
            m=m, theta=float(theta), eps_k=float(eps_k), k=k, rho=rho,
            w=w, Wq=Wq, b0=b0, C2=float(C2),
        )


# ---------------------------------------------------------------------------
# divisor sums
# ---------------------------------------------------------------------------


def _distinct_primes(n: int) -> list[int]:
    return sorted(factorize(n))


def _mu_divisors_bounded(primes: Sequence[int], cap: float) -> list[tuple[float, int]]:
    """(log d, mu(d)) over squarefree divisors d = products of the given
    primes with log d <= cap.  Primes above exp(cap) are pruned up front."""
    logs = [log(p) for p in primes if log(p) <= cap + 1e-12]
    out = [(0.0, 1)]
    for lp in logs:
        out.extend(
            (ld + lp, -mu) for ld, mu in list(out) if ld + lp <= cap + 1e-12
        )
    return out


def lambda_f(n: int, f: PiecewiseLinear, q: int) -> float:
    """sum over squarefree d | n of mu(d) * f(log d / log q), enumerating only
    divisors inside the support (d <= q^s)."""
    if n < 1:
        raise UsageError(f"need n >= 1, got {n}")
    logq = log(q)
    cap = f.support * logq
    terms = [
        mu * f(ld / logq) for ld, mu in _mu_divisors_bounded(_distinct_primes(n), cap)
    ]
    return fsum(terms)


def _lambda_from_primes(primes: Sequence[int], f: PiecewiseLinear, logq: float) -> float:
    terms = [
        mu * f(ld / logq)
        for ld, mu in _mu_divisors_bounded(primes, f.support * logq)
    ]
    return fsum(terms)


def weight(
    a: int,
    q: int,
    params: SieveParams,
    F: CutoffF,
    offsets: Sequence[int],
    budget: int = 200_000,
) -> float:
    """The sieve weight w_a >= 0 (a square), vanishing off the b0 class.

    Tensor cutoffs factor exactly as (prod_i lambda_{f_i}(a + q h_i))^2.
    The psi family needs one k-dimensional integral per divisor tuple, so a
    work budget guards the enumeration.
    """
    if gcd(a, q) != 1:
        raise UsageError(f"gcd({a}, {q}) != 1")
    if len(offsets) != params.k:
        raise UsageError("offsets length differs from params.k")
    if params.Wq > 1 and a % params.Wq != params.b0 % params.Wq:
        return 0.0
    validate_cutoff(F, params.theta, params.eps_k)
    logq = log(q)
    ns = [a + q * h for h in offsets]
    if F.family == "tensor":
        prod = 1.0
        for n_i, f_i in zip(ns, F.fs):
            prod *= _lambda_from_primes(_distinct_primes(n_i), f_i, logq)
        return prod * prod

    # psi family: direct k-fold enumeration with F values from quadrature
    cap_total = F.simplex_cap * logq
    per_coord = [
        _mu_divisors_bounded(_distinct_primes(n_i), cap_total) for n_i in ns
    ]
    n_leaves = 1
    for lst in per_coord:
        n_leaves *= len(lst)
    if n_leaves > budget:
        raise BudgetExceeded(
            f"{n_leaves} divisor tuples exceed weight budget {budget}"
        )
    terms = []
    t = [0.0] * params.k

    def rec(i: int, logsum: float, mu: int):
        if logsum > cap_total + 1e-12:
            return
        if i == params.k:
            terms.append(mu * cutoff_value(F, t))
            return
        for ld, m in per_coord[i]:
            t[i] = ld / logq
            rec(i + 1, logsum + ld, mu * m)
        t[i] = 0.0

    rec(0, 0.0, 1)
    inner = fsum(terms)
    return inner * inner


# ---------------------------------------------------------------------------
# psi-family numerics: pointwise values and singular integrals
# ---------------------------------------------------------------------------

_GRID_N = 1 << 13
_GRID_TOL = 1e-6
_PSI_POINT_KMAX = 6


def _trap_conv(f: np.ndarray, g: np.ndarray, dx: float) -> np.ndarray:
    """Trapezoid discretization of (f*g)(t) = int_0^t f(u) g(t-u) du on the
    same grid."""
    n = len(f)
    s = np.convolve(f, g)[:n]
    s = s - 0.5 * (f[0] * g + f * g[0])
    return s * dx


def _psi_vals(F: CutoffF, x: np.ndarray) -> np.ndarray:
    return 1.0 / (F.psi_c + (F.k - 1) * x)


def _psi_capital(F: CutoffF, x: np.ndarray) -> np.ndarray:
    """Psi(x) = int_0^x psi."""
    c = F.psi_c
    return np.log1p((F.k - 1) * x / c) / (F.k - 1)


def _grid_I_J(F: CutoffF, n_grid: int) -> tuple[float, float]:
    """I and J_1 for the psi family by dimension reduction:
    I = int_0^R rho^{*k}, J = int_0^R rho^{*(k-1)}(s) Psi(R-s)^2 ds,
    rho = psi^2 (convolutions on a 1-d grid)."""
    R = F.simplex_cap
    x = np.linspace(0.0, R, n_grid + 1)
    dx = R / n_grid
    rho = _psi_vals(F, x) ** 2
    conv = rho.copy()
    for _ in range(F.k - 2):
        conv = _trap_conv(conv, rho, dx)
    # conv is now rho^{*(k-1)}
    J = float(np.trapezoid(conv * _psi_capital(F, R - x) ** 2, dx=dx))
    conv_k = _trap_conv(conv, rho, dx)
    I = float(np.trapezoid(conv_k, dx=dx))
    return I, J


@lru_cache(maxsize=64)
def _grid_I_J_refined(F: CutoffF) -> tuple[float, float]:
    """Richardson-checked grid values; raises when not converged."""
    I1, J1 = _grid_I_J(F, _GRID_N)
    I2, J2 = _grid_I_J(F, 2 * _GRID_N)
    if abs(I2 - I1) > _GRID_TOL * max(1.0, abs(I2)) or abs(J2 - J1) > _GRID_TOL * max(
        1.0, abs(J2)
    ):
        raise BudgetExceeded(
            f"grid quadrature did not converge for k={F.k}: "
            f"dI={abs(I2 - I1):.2e}, dJ={abs(J2 - J1):.2e}"
        )
    return I2, J2


def cutoff_value(F: CutoffF, t: Sequence[float], n_grid: int = 1024) -> float:
    """F evaluated at a point of [0, inf)^k.

    Tensor: prod f_i(t_i) exactly.  Psi family: the integral of the mixed
    derivative over {u >= t} inside the simplex (the sign convention is
    immaterial because weights are squared); zero once sum(t) leaves the
    simplex.  Cost grows with k; k > 6 is refused.
    """
    t = [float(v) for v in t]
    if len(t) != F.k:
        raise UsageError(f"point has {len(t)} coordinates, expected {F.k}")
    if any(v < 0 for v in t):
        raise UsageError("coordinates must be >= 0")
    if F.family == "tensor":
        out = 1.0
        for f_i, v in zip(F.fs, t):
            out *= f_i(v)
        return out
    if F.k > _PSI_POINT_KMAX:
        raise BudgetExceeded(
            f"pointwise psi-family values limited to k <= {_PSI_POINT_KMAX}"
        )
    S = F.simplex_cap - fsum(t)
    if S <= 0:
        return 0.0
    x = np.linspace(0.0, S, n_grid + 1)
    dx = S / n_grid
    conv = _psi_vals(F, t[0] + x)
    for i in range(1, F.k):
        conv = _trap_conv(conv, _psi_vals(F, t[i] + x), dx)
    return float(np.trapezoid(conv, dx=dx))


def singular_I(F: CutoffF, method: str = "auto") -> float:
    """I(dF) = int (mixed derivative)^2.  Tensor: prod int (f_i')^2 in closed
    form; psi family by the reduced grid quadrature."""
    if F.family == "tensor":
        if method in ("auto", "closed"):
            out = 1.0
            for f in F.fs:
                out *= f.integral_deriv_sq()
            return out
        if method == "quad":
            from scipy.integrate import quad

            out = 1.0
            for f in F.fs:
                pts = [t for t, _ in f.nodes]
                segs = f.deriv_segments()

                def fp2(x, segs=segs):
                    for t0, t1, s in segs:
                        if t0 <= x <= t1:
                            return s * s
                    return 0.0

                val, _ = quad(fp2, 0.0, f.support, points=pts, limit=200)
                out *= val
            return out
        raise UsageError(f"unknown method {method!r} for tensor family")
    I, _ = _grid_I_J_refined(F)
    return I


def singular_J(F: CutoffF, i: int, method: str = "auto") -> float:
    """J_i(dF) = int (int dF dt_i)^2 over the remaining coordinates."""
    if not 0 <= i < F.k:
        raise UsageError(f"coordinate {i} outside range(k={F.k})")
    if F.family == "tensor":
        if method in ("auto", "closed"):
            out = F.fs[i].integral_deriv() ** 2
            for j, f in enumerate(F.fs):
                if j != i:
                    out *= f.integral_deriv_sq()
            return out
        if method == "quad":
            from scipy.integrate import quad

            f = F.fs[i]
            segs = f.deriv_segments()

            def fp(x, segs=segs):
                for t0, t1, s in segs:
                    if t0 <= x <= t1:
                        return s
                return 0.0

            val, _ = quad(fp, 0.0, f.support, points=[t for t, _ in f.nodes], limit=200)
            out = val * val
            for j, g in enumerate(F.fs):
                if j != i:
                    out *= singular_I(CutoffF.tensor([g]), method="quad")
            return out
        raise UsageError(f"unknown method {method!r} for tensor family")
    _, J = _grid_I_J_refined(F)  # symmetric in i
    return J


def singular_mc(
    F: CutoffF, n_samples: int = 10**6, seed: int = 0, chunk: int = 1 << 20
) -> dict:
    """Monte-Carlo estimates of I and J_1 with standard errors (independent
    cross-check of the grid route)."""
    if F.family != "psi_product":
        raise UsageError("Monte-Carlo path is for the psi family")
    R = F.simplex_cap
    k = F.k
    rng = np.random.default_rng(seed)

    def simplex_uniform(n, dim):
        e = rng.exponential(size=(n, dim + 1))
        return R * e[:, :dim] / e.sum(axis=1, keepdims=True)

    def mc(dim, integrand):
        total = 0.0
        total2 = 0.0
        done = 0
        vol = R**dim
        for j in range(2, dim + 1):
            vol /= j
        while done < n_samples:
            n = min(chunk, n_samples - done)
            u = simplex_uniform(n, dim)
            vals = integrand(u)
            total += float(vals.sum())
            total2 += float((vals * vals).sum())
            done += n
        mean = total / n_samples
        var = max(total2 / n_samples - mean * mean, 0.0)
        se = vol * (var / n_samples) ** 0.5
        return vol * mean, se

    I_est, I_se = mc(k, lambda u: np.prod(_psi_vals(F, u), axis=1) ** 2)

    def j_integrand(u):
        base = np.prod(_psi_vals(F, u), axis=1) ** 2
        return base * _psi_capital(F, R - u.sum(axis=1)) ** 2

    J_est, J_se = mc(k - 1, j_integrand)
    return {"I": I_est, "I_se": I_se, "J": J_est, "J_se": J_se}


@dataclass(frozen=True)
class RatioReport:
    ratio: float  # sum_i J_i / I
    I: float
    J_sum: float
    bound: Optional[float]  # (theta/2) log k - C2
    exceeds_bound: Optional[bool]
    m: Optional[int]
    detects_m: Optional[bool]  # ratio > m - 1


def detection_ratio(
    F: CutoffF,
    theta: Optional[float] = None,
    C2: float = 0.0,
    m: Optional[int] = None,
) -> RatioReport:
    """sum_i J_i(dF) / I(dF), flagged against (theta/2) log k - C2 and, when
    m is given, against the m-cluster success criterion ratio > m - 1."""
    I = singular_I(F)
    if I <= 0:
        raise InvalidParameter("I(F) must be positive")
    if F.family == "psi_product":
        J_sum = F.k * singular_J(F, 0)
        theta = F.theta if theta is None else theta
    else:
        J_sum = fsum(singular_J(F, i) for i in range(F.k))
    ratio = J_sum / I
    bound = None
    exceeds = None
    if theta is not None and F.k >= 2:
        bound = (theta / 2.0) * log(F.k) - C2
        exceeds = ratio > bound
    return RatioReport(
        ratio=ratio, I=I, J_sum=J_sum, bound=bound, exceeds_bound=exceeds,
        m=m, detects_m=(ratio > m - 1) if m is not None else None,
    )


@dataclass(frozen=True)
class SelectKRho:
    k: int
    rho_log10: float
    rho: Optional[Fraction]  # materialized only for moderate k
    rho_ok_smallprime: bool  # rho <= 1/(100 k)
    desk_scale: bool
    note: str


# largest k for which k^-k is materialized as an exact Fraction
_RHO_EXACT_KMAX = 5000


def select_k_rho(m: int, theta: float, C2: float = 0.0) -> SelectKRho:
    """k = ceil(exp((2/theta)(m + C2))), rho = k^-k.

    rho is reported in log10 always and as an exact Fraction when k is small
    enough to materialize k^k.  k > 12 is proof-scale, not desk-scale.
    """
    if m < 2:
        raise UsageError(f"need m >= 2, got {m}")
    if not 0 < theta <= 1:
        raise UsageError(f"need theta in (0, 1], got {theta}")
    if C2 < 0:
        raise UsageError(f"need C2 >= 0, got {C2}")
    k = ceil(exp((2.0 / theta) * (m + C2)))
    rho = Fraction(1, k**k) if k <= _RHO_EXACT_KMAX else None
    # rho <= 1/(100k)  <=>  k^(k-1) >= 100
    ok = (k - 1) * log(k) >= log(100.0)
    desk = k <= 12
    note = "" if desk else f"k={k} is proof-scale; desk runs use small k directly"
    return SelectKRho(
        k=k, rho_log10=-k * log10(k), rho=rho, rho_ok_smallprime=ok,
        desk_scale=desk, note=note,
    )


# ---------------------------------------------------------------------------
# the exact pigeonhole sum S
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SSumReport:
    """Component sums of S over the b0 class of reduced residues.

    S = sum_i prime_sums[i] - (m-1) * nonprime_sum - k * sum_i smallfactor_sums[i]
    and #{a : at least m of the a + q h_i are prime} >= S / (k * max_weight).
    """

    q: int
    m: int
    k: int
    offsets: tuple[int, ...]
    nonprime_sum: float
    prime_sums: tuple[float, ...]
    smallfactor_sums: tuple[float, ...]
    S: float
    max_weight: float
    census_lower_bound: float
    residues_enumerated: int
    smallprime_cutoff: int  # floor(q^rho)

    def recombine(self) -> float:
        """Recompute S from the stored parts (canonical order)."""
        return fsum(self.prime_sums) - (self.m - 1) * self.nonprime_sum - self.k * fsum(
            self.smallfactor_sums
        )


def s_sum_bruteforce(
    q: int,
    m: int,
    offsets: Sequence[int],
    params: SieveParams,
    F: CutoffF,
    work_cap: int = 2_000_000,
) -> SSumReport:
    """Exact evaluation of all three component sums by looping over the
    reduced residues a = b0 (mod W_q).  Tensor cutoffs only (exact weights)."""
    if F.family != "tensor":
        raise UsageError("s_sum_bruteforce needs the tensor family (exact weights)")
    validate_cutoff(F, params.theta, params.eps_k)
    offsets = tuple(offsets)
    k = len(offsets)
    if k != params.k:
        raise UsageError("offsets length differs from params.k")
    top = q + q * offsets[-1]
    n_residues = q // max(params.Wq, 1) + 1
    if n_residues * k > work_cap or top > 2**40:
        raise BudgetExceeded(
            f"{n_residues} residues x {k} offsets exceeds work cap {work_cap}"
        )

    # prime indicator for every candidate a + q h_i
    flags = np.zeros(top + 1, dtype=bool)
    for seg in iter_prime_segments(2, top + 1):
        flags[seg.lo : seg.hi] = seg.bits

    logq = log(q)
    p_cut = floor(exp(float(Fraction(params.rho)) * logq))
    start = params.b0 % params.Wq if params.Wq > 1 else 1
    if start == 0:
        start = params.Wq

    w_terms: list[float] = []
    prime_terms: list[list[float]] = [[] for _ in range(k)]
    small_terms: list[list[float]] = [[] for _ in range(k)]
    max_w = 0.0
    count = 0
    for a in range(start, q + 1, params.Wq if params.Wq > 1 else 1):
        if gcd(a, q) != 1:
            continue
        count += 1
        prod = 1.0
        primes_of_n = []
        for h, f_i in zip(offsets, F.fs):
            ps = _distinct_primes(a + q * h)
            primes_of_n.append(ps)
            prod *= _lambda_from_primes(ps, f_i, logq)
        w_a = prod * prod
        if w_a == 0.0:
            continue
        max_w = max(max_w, w_a)
        w_terms.append(w_a)
        for i, h in enumerate(offsets):
            if flags[a + q * h]:
                prime_terms[i].append(w_a)
            if p_cut >= 2:
                c = sum(1 for p in primes_of_n[i] if p <= p_cut)
                if c:
                    small_terms[i].append(c * w_a)

    nonprime = fsum(w_terms)
    primes_s = tuple(fsum(ts) for ts in prime_terms)
    smalls = tuple(fsum(ts) for ts in small_terms)
    S = fsum(primes_s) - (m - 1) * nonprime - k * fsum(smalls)
    lower = S / (k * max_w) if max_w > 0 else 0.0
    return SSumReport(
        q=q, m=m, k=k, offsets=offsets,
        nonprime_sum=nonprime, prime_sums=primes_s, smallfactor_sums=smalls,
        S=S, max_weight=max_w, census_lower_bound=lower,
        residues_enumerated=count, smallprime_cutoff=p_cut,
    )


# ---------------------------------------------------------------------------
# level of distribution of reduced residues
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscrepancyReport:
    q: int
    R: int
    value: float
    exact: Fraction
    moduli_used: int


def discrepancy_reduced(q: int, R: int, work_cap: int = 10**9) -> DiscrepancyReport:
    """Exact sum over r <= R coprime to q of
    max_c | #{a <= q reduced, a = c mod r} - phi(q)/r |."""
    if not 1 <= R < q:
        raise UsageError(f"need 1 <= R < q, got R={R}, q={q}")
    if q * R > work_cap:
        raise BudgetExceeded(f"q*R = {q * R} exceeds work cap {work_cap}")
    a = np.arange(1, q + 1, dtype=np.int64)
    reduced = a[np.gcd(a, q) == 1]
    phi = len(reduced)
    total = Fraction(0)
    used = 0
    for r in range(1, R + 1):
        if gcd(r, q) != 1:
            continue
        used += 1
        counts = np.bincount(reduced % r, minlength=r)
        dev = np.abs(counts * r - phi)  # |r*count_c - phi| over classes c
        total += Fraction(int(dev.max()), r)
    return DiscrepancyReport(q=q, R=R, value=float(total), exact=total, moduli_used=used)
