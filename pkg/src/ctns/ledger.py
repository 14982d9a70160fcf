"""Constant bookkeeping for the smallness certificate.

Everything here is scalar analysis: the weighted-convolution constants
C1..C7 and sigma, the elementary inequality checkers, the ordered
selection of (M1..M4, eps) that makes the four certificate inequalities
hold with positive slack (plus its variant trading smallness of the
oxygen level for smallness of its gradient), and validation of initial
data against the resulting thresholds.

Sup-type constants are computed by adaptive quadrature with algebraic
endpoint weights on a logarithmic t grid; they are empirical values with
stated grid stability, not proved optima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma as gamma_fn

from .grid import ScalarField, VectorField, lp_norm, lp_norm_values, mean
from .operators import grad_centered

__all__ = [
    "ParameterSet",
    "Certificate",
    "LedgerError",
    "default_parameters",
    "sigma",
    "lemma24_sup_ratio",
    "compute_C1_to_C7",
    "choose_M_eps",
    "choose_M_eps_alternative",
    "scalar_inequality_suite",
    "check_initial_smallness",
]

T_GRID_LO = 1e-4
T_GRID_HI = 1e2
T_GRID_POINTS = 400


class LedgerError(ValueError):
    pass


@dataclass
class ParameterSet:
    """All scalar inputs of the certificate machinery.

    k1..k4 are heat-semigroup constants, k5/k6 projection bounds, k7..k9
    Stokes-semigroup constants; each is either user-supplied, estimated
    empirically on the grid, or a documented default of 1.0 (provenance
    per constant).  The exponent arguments those constants carry in the
    estimates are dropped: one uniform value per constant.
    """

    m: float
    p0: float
    q0: float
    beta: float
    alpha1: float
    alpha2: float
    mu: float
    C_S: float
    grad_phi_inf: float
    volume: float
    lambda1: float
    lambda1_prime: float
    N: int = 2
    q1: float = 0.0  # defaults to q0
    k: dict = field(default_factory=lambda: {f"k{i}": 1.0 for i in range(1, 10)})
    k_provenance: dict = field(
        default_factory=lambda: {f"k{i}": "default" for i in range(1, 10)}
    )

    def __post_init__(self):
        if self.q1 == 0.0:
            self.q1 = self.q0
        self.validate()

    def validate(self):
        N = self.N
        if N not in (2, 3):
            raise LedgerError("N must be 2 or 3")
        if self.m <= 0:
            raise LedgerError("m must be positive")
        if not N / 2 < self.p0 < N:
            raise LedgerError(f"p0 must lie in (N/2, N) = ({N/2}, {N})")
        if not (self.q0 > N and 1.0 / self.q0 > 1.0 / self.p0 - 1.0 / N):
            raise LedgerError("q0 must satisfy q0 > N and 1/q0 > 1/p0 - 1/N")
        if not N / 4 < self.beta < 1:
            raise LedgerError("beta must lie in (N/4, 1)")
        if not 0 < self.alpha1 < min(self.m, self.lambda1):
            raise LedgerError("alpha1 must lie in (0, min(m, lambda1))")
        if not 0 < self.alpha2 < min(self.alpha1, self.lambda1_prime):
            raise LedgerError("alpha2 must lie in (0, min(alpha1, lambda1'))")
        if not self.alpha2 < self.mu < self.lambda1_prime:
            raise LedgerError("mu must lie in (alpha2, lambda1')")
        if self.C_S < 0 or self.volume <= 0 or self.grad_phi_inf < 0:
            raise LedgerError("C_S, |Omega|, |grad Phi| must be admissible")
        missing = [f"k{i}" for i in range(1, 10) if f"k{i}" not in self.k]
        if missing:
            raise LedgerError(f"missing constants: {missing}")
        if any(v <= 0 for v in self.k.values()):
            raise LedgerError("all k constants must be positive")


def default_parameters(
    lambda1: float,
    lambda1_prime: float,
    volume: float = 1.0,
    m: float = 1.0,
    C_S: float = 1.0,
    grad_phi_inf: float = 1.0,
    k: dict | None = None,
    k_provenance: dict | None = None,
) -> ParameterSet:
    """The default 2D parameter block: p0=1.5, q0=3, beta=0.75, rates at
    80% of their ceilings, mu the midpoint of (alpha2, lambda1')."""
    alpha1 = 0.8 * min(m, lambda1)
    alpha2 = 0.8 * min(alpha1, lambda1_prime)
    mu = 0.5 * (alpha2 + lambda1_prime)
    kwargs = {}
    if k is not None:
        kwargs["k"] = dict(k)
    if k_provenance is not None:
        kwargs["k_provenance"] = dict(k_provenance)
    return ParameterSet(
        m=m,
        p0=1.5,
        q0=3.0,
        beta=0.75,
        alpha1=alpha1,
        alpha2=alpha2,
        mu=mu,
        C_S=C_S,
        grad_phi_inf=grad_phi_inf,
        volume=volume,
        lambda1=lambda1,
        lambda1_prime=lambda1_prime,
        **kwargs,
    )


# ---------------------------------------------------------------------------
# sigma and the weighted-convolution constants


def sigma_integral(a: float, al: float) -> float:
    """int_0^inf (1 + s^-a) e^(-al s) ds by quadrature, cross-checked
    against the closed form 1/al + Gamma(1-a) al^(a-1)."""
    if not 0 < a < 1:
        raise LedgerError("sigma needs the singular exponent in (0, 1)")
    if al <= 0:
        raise LedgerError("sigma needs a positive rate")
    head = quad(lambda s: math.exp(-al * s), 0.0, 1.0, weight="alg", wvar=(-a, 0.0))[0]
    # cut the tail where the integrand underflows; the infinite-range rule
    # complains about the slow algebraic factor otherwise
    s_max = max(2.0, 745.0 / al)
    tail = quad(lambda s: s**-a * math.exp(-al * s), 1.0, s_max, limit=200)[0]
    val = 1.0 / al + head + tail
    closed = 1.0 / al + gamma_fn(1.0 - a) * al ** (a - 1.0)
    if abs(val - closed) > 1e-8 * closed:
        raise LedgerError("sigma quadrature disagrees with the closed form")
    return val


def sigma(params: ParameterSet, alpha1: float | None = None) -> float:
    """sigma = int_0^inf (1 + s^(-N/2p0)) e^(-alpha1 s) ds."""
    return sigma_integral(
        params.N / (2.0 * params.p0),
        params.alpha1 if alpha1 is None else alpha1,
    )


def _conv_integral(side_s, side_ts, rate_s, rate_ts, t):
    """int_0^t prod-of-power-sums * e^(-rate_s*s - rate_ts*(t-s)) ds.

    side_s / side_ts are lists of (coef, expo) meaning sum coef*s^(-expo)
    (resp. in t-s).  Integration runs along the variable with the larger
    rate so the factored exponential decays; the convolution is symmetric
    under swapping the sides together with their rates.
    """
    if rate_ts > rate_s:
        side_s, side_ts = side_ts, side_s
        rate_s, rate_ts = rate_ts, rate_s
    diff = rate_s - rate_ts
    total = 0.0
    for ca, ea in side_s:
        for cb, eb in side_ts:
            if ea == 0.0 and eb == 0.0:
                part = t if diff == 0.0 else -math.expm1(-diff * t) / diff
            else:
                part = quad(
                    lambda s: math.exp(-diff * s),
                    0.0,
                    t,
                    weight="alg",
                    wvar=(-ea, -eb),
                )[0]
            total += ca * cb * part
    return total * math.exp(-rate_ts * t)


def _default_t_grid(refine: int = 1):
    return np.geomspace(T_GRID_LO, T_GRID_HI, T_GRID_POINTS * refine)


def _sup_ratio(side_s, side_ts, rate_s, rate_ts, rhs_rate, rhs_pow, t_grid):
    """sup_t of the convolution divided by e^(-rhs_rate*t)(1+t^rhs_pow)."""
    best = 0.0
    for t in t_grid:
        lhs = _conv_integral(side_s, side_ts, rate_s, rate_ts, t)
        rhs = math.exp(-rhs_rate * t) * (1.0 + t**rhs_pow)
        best = max(best, lhs / rhs)
    if not math.isfinite(best):
        raise LedgerError("sup ratio diverged on the t grid")
    return best


def lemma24_sup_ratio(alpha, beta, gamma, delta, eta, t_grid=None) -> float:
    """Empirical constant for the weighted-convolution bound

      int_0^t (1+s^-alpha)(1+(t-s)^-beta) e^(-gamma s) e^(-delta (t-s)) ds
        <= C(eta) e^(-min(gamma,delta) t) (1 + t^min(0, 1-alpha-beta)).

    Hypotheses: alpha in [0, 1-eta], beta in [eta, 1-eta], and
    eta <= |gamma - delta| <= 1/eta (the absolute value admits the
    role-exchanged form of the statement directly).
    """
    if eta <= 0:
        raise LedgerError("eta must be positive")
    if not 0.0 <= alpha <= 1.0 - eta:
        raise LedgerError("alpha must lie in [0, 1-eta]")
    if not eta <= beta <= 1.0 - eta:
        raise LedgerError("beta must lie in [eta, 1-eta]")
    if not eta <= abs(gamma - delta) <= 1.0 / eta:
        raise LedgerError("need eta <= |gamma - delta| <= 1/eta")
    if t_grid is None:
        t_grid = _default_t_grid()
    return _sup_ratio(
        [(1.0, 0.0), (1.0, alpha)],
        [(1.0, 0.0), (1.0, beta)],
        gamma,
        delta,
        min(gamma, delta),
        min(0.0, 1.0 - alpha - beta),
        t_grid,
    )


def compute_C1_to_C7(params: ParameterSet, refine: int = 1) -> tuple:
    """The seven convolution constants, as sups over a log t grid.

    C5 and C6 are the displayed theta-free bounds; C7 is additionally
    maximized over theta in {q0, 2q0, 10q0, 1e6*q0} to sample its claimed
    uniformity in theta >= q0.
    """
    N, p0, q0 = params.N, params.p0, params.q0
    a1, a2, muv, l1 = params.alpha1, params.alpha2, params.mu, params.lambda1
    tg = _default_t_grid(refine)
    apq = (N / 2.0) * (1.0 / p0 - 1.0 / q0)

    C1 = _sup_ratio([(1, 0), (1, apq)], [(1, 0)], a1, muv, a2, 0.0, tg)
    C2 = _sup_ratio(
        [(1, 0), (1, 1.0 - N / (2 * q0))], [(1, 0.5)], a2, muv, a2, -0.5 + N / (2 * q0), tg
    )
    C3 = _sup_ratio([(1, 0), (1, apq)], [(1, 0.5)], a1, muv, a2, -0.5, tg)
    C4 = _sup_ratio(
        [(1, 0), (1, 1.0 - N / (2 * q0))],
        [(1, 0.5 + N / (2 * q0))],
        2.0 * a2,
        muv,
        a2,
        -0.5,
        tg,
    )
    C5 = _sup_ratio(
        [(1, 0), (1, N / (2 * p0))], [(1, 0), (1, 0.5)], a1, l1, a1, -0.5, tg
    )
    C6 = _sup_ratio(
        [(1, 0), (1, 1.0 - N / (2 * q0))],
        [(1, 0), (1, 0.5 + N / (2 * q0))],
        a1,
        l1,
        a1,
        -0.5,
        tg,
    )
    C7 = 0.0
    for theta in (q0, 2 * q0, 10 * q0, 1e6 * q0):
        C7 = max(
            C7,
            _sup_ratio(
                [(1, 0), (1, 0.5 + apq)],
                [(1, 0), (1, 0.5 + (N / 2.0) * (1.0 / q0 - 1.0 / theta))],
                a1,
                l1,
                a1,
                -(N / 2.0) * (1.0 / p0 - 1.0 / theta),
                tg,
            ),
        )
    return C1, C2, C3, C4, C5, C6, C7


# ---------------------------------------------------------------------------
# certificate selection


@dataclass
class Certificate:
    M1: float
    M2: float
    M3: float
    M4: float
    eps: float
    A: float
    slacks: list  # inequality slacks, order (M3, M4, M2, M1)
    m0: float | None = None  # only set by the alternative selection

    def to_dict(self, params: ParameterSet) -> dict:
        return {
            "m": params.m,
            "p0": params.p0,
            "q0": params.q0,
            "beta": params.beta,
            "alpha1": params.alpha1,
            "alpha2": params.alpha2,
            "mu": params.mu,
            "M1": self.M1,
            "M2": self.M2,
            "M3": self.M3,
            "M4": self.M4,
            "eps": self.eps,
            "A": self.A,
            "slacks": list(self.slacks),
            "k_provenance": dict(params.k_provenance),
        }


def _certificate_slacks(params, cert, C, sig, two_k1=False, M_c0=None):
    """Left-hand sides vs the half-M right-hand sides of the four
    certificate inequalities; returns slacks in order (M3, M4, M2, M1)."""
    k = params.k
    N, q0, p0 = params.N, params.q0, params.p0
    C1, C2, C3, C4, C5, C6, C7 = C
    M1, M2, M3, M4, eps = cert.M1, cert.M2, cert.M3, cert.M4, cert.eps
    vol = params.volume
    k1eff = (2.0 if two_k1 else 1.0) * k["k1"]

    lhs3 = (
        k["k7"]
        + k["k5"] * k["k7"] * (M1 + k1eff) * C1 * params.grad_phi_inf
        + 3.0 * k["k7"] * k["k5"] * M3 * M4 * C2 * eps
    )
    lhs4 = (
        k["k8"]
        + k["k8"] * k["k5"] * vol ** ((q0 - N) / (N * q0)) * (M1 + k1eff) * C3 * params.grad_phi_inf
        + 3.0 * k["k8"] * k["k5"] * C4 * M3 * M4 * eps
    )
    if M_c0 is None:
        lhs2 = (
            k["k2"]
            + C5 * k["k2"] * (params.m + (M1 + k1eff) * eps) * math.exp((M1 + k1eff) * sig * eps)
            + 3.0 * k["k2"] * M2 * M3 * C6 * eps
        )
        mass_term = 3.0 * params.C_S * C7 * k["k4"] * M2 * params.m * vol ** (1.0 / q0)
    else:
        # variant: the oxygen level enters through its bound M_c0 and the
        # cell mass through eps |Omega|^(-1/p0); the exponential is bounded
        # by e^A, valid for every admissible m by the sigma comparison
        lhs2 = (
            k["k3"]
            + C5 * k["k2"] * (vol ** (-1.0 / p0) + M1 + k1eff) * M_c0 * math.exp(cert.A) * eps
            + 3.0 * k["k2"] * M2 * M3 * C6 * eps
        )
        mass_term = 3.0 * params.C_S * C7 * k["k4"] * M2 * eps * vol ** (-1.0 / p0)
    lhs1 = (
        mass_term
        + 3.0 * params.C_S * C7 * k["k4"] * M2 * (M1 + k1eff) * eps
        + 3.0 * (M1 + k1eff) * C7 * k["k4"] * M3 * eps
    )
    return [M3 / 2.0 - lhs3, M4 / 2.0 - lhs4, M2 / 2.0 - lhs2, M1 / 2.0 - lhs1]


def choose_M_eps(params: ParameterSet, C=None, refine: int = 1) -> Certificate:
    """Ordered selection of (M1..M4, eps) for the main certificate.

    Follows the constructive order: A and M2 first (strict quarter
    inequality with 1% headroom), then M1, M3, M4 from their
    eps-independent parts, then eps as 99% of the displayed minimum.
    All four final inequalities are re-verified; their slacks must be
    nonnegative.
    """
    k = params.k
    if C is None:
        C = compute_C1_to_C7(params, refine)
    C1, C2, C3, C4, C5, C6, C7 = C
    sig = sigma(params)
    vol = params.volume

    A = 1.0
    M2 = 4.04 * (k["k2"] + C5 * k["k2"] * params.m * math.exp(A))
    M1 = 4.04 * 3.0 * params.C_S * C7 * k["k4"] * M2 * params.m * vol ** (1.0 / params.q0)
    M3 = 4.04 * (
        k["k7"] + k["k5"] * k["k7"] * (M1 + k["k1"]) * C1 * params.grad_phi_inf
    )
    M4 = 4.04 * (
        k["k8"]
        + k["k8"]
        * k["k5"]
        * vol ** ((params.q0 - params.N) / (params.N * params.q0))
        * (M1 + k["k1"])
        * C3
        * params.grad_phi_inf
    )
    eps = 0.99 * min(
        A / ((M1 + k["k1"]) * sig),
        1.0 / (12.0 * k["k7"] * k["k5"] * M4 * C2),
        1.0 / (12.0 * k["k8"] * k["k5"] * M3 * C4),
        M2 / (4.0 * C5 * k["k2"] * (M1 + k["k1"]) * math.exp(A) + 12.0 * k["k2"] * M2 * M3 * C6),
        M1 / (12.0 * C7 * k["k4"] * (M1 + k["k1"]) * (params.C_S * M2 + M3)),
    )
    if eps <= 0:
        raise LedgerError("no positive eps exists for these constants")
    cert = Certificate(M1, M2, M3, M4, eps, A, [])
    cert.slacks = _certificate_slacks(params, cert, C, sig)
    if min(cert.slacks) < 0:
        raise LedgerError(f"certificate inequalities violated: slacks {cert.slacks}")
    return cert


def choose_M_eps_alternative(
    params: ParameterSet, M_c0: float, C=None, refine: int = 1
) -> Certificate:
    """Variant certificate: the oxygen level is only bounded (by M_c0),
    smallness moves to |n0|_{p0} and |grad c0|_N, and a mass threshold m0
    with m0 < eps |Omega|^(-1/p0) is returned on the certificate.

    C1..C7 are evaluated at the supplied rates, standing in for the
    uniform margin-class constants.
    """
    if M_c0 <= 0:
        raise LedgerError("the oxygen bound must be positive")
    k = params.k
    if C is None:
        C = compute_C1_to_C7(params, refine)
    C1, C2, C3, C4, C5, C6, C7 = C
    vol = params.volume
    p0, q0, N = params.p0, params.q0, params.N

    M1 = 1.0
    A = 1.01 * (M1 + 2.0 * k["k1"]) * (
        8.0 * vol ** (1.0 / p0) + 1.0 / (1.0 - N / (2.0 * p0))
    )
    M2 = 4.04 * (
        k["k3"]
        + C5 * k["k2"] * (vol ** (-1.0 / p0) + M1 + 2.0 * k["k1"]) * M_c0 * math.exp(A) * A
    )
    M3 = 4.04 * (
        k["k7"] + k["k5"] * k["k7"] * (M1 + 2.0 * k["k1"]) * params.grad_phi_inf * C1
    )
    M4 = 4.04 * (
        k["k8"]
        + k["k8"]
        * k["k5"]
        * vol ** ((q0 - N) / (N * q0))
        * (M1 + 2.0 * k["k1"])
        * params.grad_phi_inf
        * C3
    )
    eps = 0.99 * min(
        A,
        1.0 / (12.0 * k["k2"] * M3 * C6),
        1.0 / (12.0 * M3 * k["k8"] * k["k5"] * C4),
        1.0 / (12.0 * k["k7"] * k["k5"] * C2 * M4),
        M1
        / (
            2.0
            * (
                3.0 * params.C_S * C7 * k["k4"] * M2 * (vol ** (-1.0 / p0) + M1 + 2.0 * k["k1"])
                + 3.0 * (M1 + 2.0 * k["k1"]) * C7 * k["k4"] * M3
            )
        ),
        1.0,
    )
    if eps <= 0:
        raise LedgerError("no positive eps exists for these constants")

    m0 = 0.99 * eps * vol ** (-1.0 / p0)
    if sigma(params, alpha1=m0 / 2.0) >= A / ((M1 + 2.0 * k["k1"]) * eps):
        raise LedgerError("mass threshold m0 infeasible for this eps")

    cert = Certificate(M1, M2, M3, M4, eps, A, [], m0=m0)
    cert.slacks = _certificate_slacks(
        params, cert, C, sig=0.0, two_k1=True, M_c0=M_c0
    )
    if min(cert.slacks) < 0:
        raise LedgerError(f"certificate inequalities violated: slacks {cert.slacks}")
    return cert


# ---------------------------------------------------------------------------
# elementary inequalities and initial-data checks


def scalar_inequality_suite(samples: int = 100000, seed: int = 0) -> dict:
    """Random checks of the two elementary prefactor inequalities:
    (1+t^a) <= 2(1+t^b) for 0 >= a >= b, and
    (1+t^a)(1+t^b) <= 3(1+t^(a+b)) for a, b of one sign.
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(1e-4, 1e4, samples)

    b = -rng.uniform(0.0, 3.0, samples)
    a = b * rng.uniform(0.0, 1.0, samples)  # 0 >= a >= b
    viol1 = int(np.sum(1.0 + t**a > 2.0 * (1.0 + t**b) * (1.0 + 1e-12)))

    sgn = rng.choice([-1.0, 1.0], samples)
    a2 = sgn * rng.uniform(0.0, 3.0, samples)
    b2 = sgn * rng.uniform(0.0, 3.0, samples)
    lhs = (1.0 + t**a2) * (1.0 + t**b2)
    viol2 = int(np.sum(lhs > 3.0 * (1.0 + t ** (a2 + b2)) * (1.0 + 1e-12)))

    return {
        "samples": samples,
        "violations_monotone": viol1,
        "violations_product": viol2,
        "passed": viol1 == 0 and viol2 == 0,
    }


def check_initial_smallness(
    n0: ScalarField,
    c0: ScalarField,
    u0: VectorField,
    params: ParameterSet,
    cert: Certificate,
    variant: str = "main",
) -> dict:
    """Margins of the initial-data smallness conditions.

    main:        mean(n0)=m, |n0-mean|_{p0} <= eps, |c0|_inf <= eps,
                 |u0|_N <= eps
    alternative: mean(n0)=m with m > m0, |n0|_{p0} <= eps,
                 |grad c0|_N <= eps, |u0|_N <= eps
    A margin is (threshold - value); the check passes when all margins
    are nonnegative.
    """
    if variant not in ("main", "alternative"):
        raise LedgerError(f"unknown variant {variant!r}")
    eps = cert.eps
    nbar = mean(n0)
    pN = float(params.N)
    u_norm = u0.l2_norm() if params.N == 2 else None
    if u_norm is None:
        raise LedgerError("only N=2 velocity norms are implemented")

    report = {"variant": variant, "eps": eps}
    report["mean_n0"] = nbar
    report["mass_margin"] = 1e-10 * max(1.0, params.m) - abs(nbar - params.m)
    if variant == "main":
        dev = ScalarField(n0.domain, n0.values - nbar)
        report["n_margin"] = eps - lp_norm(dev, params.p0)
        report["c_margin"] = eps - lp_norm(c0, np.inf)
    else:
        report["n_margin"] = eps - lp_norm(n0, params.p0)
        gx, gy = grad_centered(c0)
        report["c_margin"] = eps - lp_norm_values(np.hypot(gx, gy), c0.domain.h, pN)
        if cert.m0 is None:
            raise LedgerError("alternative check needs a certificate with m0")
        report["mass_threshold_margin"] = params.m - cert.m0
    report["u_margin"] = eps - u_norm
    keys = [k for k in report if k.endswith("margin")]
    report["passed"] = all(report[k] >= 0.0 for k in keys)
    return report
