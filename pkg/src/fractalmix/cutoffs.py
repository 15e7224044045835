"""Smooth time-cutoff families for the alternating shear construction.

Four families are built from one C-infinity step profile
Phi(v) = 1/(1 + exp(-2 s v / (1 - v^2))) on [-1, 1]:

* zeta: even bumps of unit spacing forming a partition of unity with
  support in [-2/3, 2/3] and a calibrated squared integral (9/10 default);
* xi: wider plateaus of spacing two, partition of unity over odd shifts;
* zeta_hat / xi_hat: window cutoffs on the tau'' lattice whose transitions
  happen over tau', with xi_hat a partition of unity and zeta_hat equal to
  one on the inner core of each window.

All derivatives are analytic, computed by truncated Taylor (jet)
arithmetic on the closed form; no numerical differentiation anywhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import CalibrationError, CapExceededError, DomainError
from .jets import jet_derivatives, jet_exp, jet_mul, jet_recip, jet_var, jet_const
from .params import ParameterSchedule, slot_index

__all__ = [
    "CutoffFamily",
    "calibrate_profiles",
    "eval_cutoff",
    "verify_family",
    "step_scalar",
]

_H_MAX = 500.0  # |argument of exp| beyond which the profile is flat to double precision


def _v_edge(sharpness: float) -> float:
    s = sharpness / _H_MAX
    return -s + math.sqrt(s * s + 1.0)


def step_scalar(v: np.ndarray, sharpness: float) -> np.ndarray:
    """Closed-form step Phi on [-1, 1]: 0 left, 1 right, antisymmetric about 0."""
    v = np.asarray(v, dtype=float)
    out = np.where(v >= 0.0, 1.0, 0.0)
    edge = _v_edge(sharpness)
    inner = np.abs(v) < edge
    vi = v[inner]
    h = 2.0 * sharpness * vi / (1.0 - vi * vi)
    out_flat = out.copy()
    out_flat[inner] = 1.0 / (1.0 + np.exp(-h))
    return out_flat


def _step_derivs(u: np.ndarray, halfwidth: float, order: int, sharpness: float) -> np.ndarray:
    """Derivative stack d^j/du^j Phi(u/halfwidth), j = 0..order, shape (order+1, ...)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = u / halfwidth
    out = np.zeros((order + 1,) + u.shape)
    out[0] = np.where(v >= 0.0, 1.0, 0.0)
    edge = _v_edge(sharpness)
    inner = np.abs(v) < edge
    if np.any(inner):
        vv = np.abs(v[inner])
        jv = jet_var(vv, order)
        num = 2.0 * sharpness * jv
        den = jet_const(1.0, order, vv.shape)
        den[0] = 1.0 - vv * vv
        if order >= 1:
            den[1] = -2.0 * vv
        if order >= 2:
            den[2] = -1.0
        h = jet_mul(num, jet_recip(den))
        e = jet_exp(-h)  # exp(-h), h >= 0 on |v| branch, never overflows
        one_plus = e.copy()
        one_plus[0] = one_plus[0] + 1.0
        phi = jet_recip(one_plus)
        d = jet_derivatives(phi)  # derivatives w.r.t. |v|
        neg = v[inner] < 0.0
        signs = np.array([-((-1.0) ** j) for j in range(order + 1)])
        for j in range(order + 1):
            vals = d[j].copy()
            if j == 0:
                vals = np.where(neg, 1.0 - vals, vals)
            else:
                vals = np.where(neg, signs[j] * vals, vals)
            out[j][inner] = vals / halfwidth**j
    return out


@dataclass(frozen=True)
class CutoffFamily:
    """Calibrated cutoff profiles with analytic derivative evaluation."""

    sharpness: float
    sigma_zeta: float
    sigma_xi: float
    deriv_cap: int
    target_l2sq: float
    l2sq_measured: float
    calibration_tol: float

    # --- base profiles in slot units -------------------------------------

    def zeta(self, t, deriv: int = 0) -> np.ndarray:
        """Base zeta profile (unit spacing, support [-1/2-sigma, 1/2+sigma])."""
        self._check(deriv)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        up = _step_derivs(t + 0.5, self.sigma_zeta, deriv, self.sharpness)
        dn = _step_derivs(t - 0.5, self.sigma_zeta, deriv, self.sharpness)
        return up[deriv] - dn[deriv]

    def xi(self, t, deriv: int = 0) -> np.ndarray:
        """Base xi profile (spacing two, plateau [-1+sigma_xi, 1-sigma_xi])."""
        self._check(deriv)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        up = _step_derivs(t + 1.0, self.sigma_xi, deriv, self.sharpness)
        dn = _step_derivs(t - 1.0, self.sigma_xi, deriv, self.sharpness)
        return up[deriv] - dn[deriv]

    # --- scheduled families ----------------------------------------------

    def zeta_mk(self, schedule: ParameterSchedule, m: int, k: int, t, deriv: int = 0):
        tau = schedule.tau_f(m)
        u = (np.asarray(t, dtype=float) - k * tau) / tau
        return self.zeta(u, deriv) / tau**deriv

    def xi_mk(self, schedule: ParameterSchedule, m: int, k: int, t, deriv: int = 0):
        tau = schedule.tau_f(m)
        u = (np.asarray(t, dtype=float) - k * tau) / tau
        return self.xi(u, deriv) / tau**deriv

    def zeta_hat_ml(self, schedule: ParameterSchedule, m: int, l: int, t, deriv: int = 0):
        """Window cutoff: 1 on [(l-1/2)tau''+2tau', (l+1/2)tau''-2tau'],
        supported in [(l-1/2)tau''+tau', (l+1/2)tau''-tau']."""
        self._check(deriv)
        tp, tpp = schedule.tau_p_f(m), schedule.tau_pp_f(m)
        t = np.atleast_1d(np.asarray(t, dtype=float)) - l * tpp
        up = _step_derivs(t + 0.5 * tpp - 1.5 * tp, 0.5 * tp, deriv, self.sharpness)
        dn = _step_derivs(t - 0.5 * tpp + 1.5 * tp, 0.5 * tp, deriv, self.sharpness)
        # product rule on up * (1 - dn)
        out = np.zeros_like(up[deriv])
        for j in range(deriv + 1):
            c = math.comb(deriv, j)
            right = (1.0 - dn[0]) if deriv - j == 0 else -dn[deriv - j]
            out += c * up[j] * right
        return out

    def xi_hat_ml(self, schedule: ParameterSchedule, m: int, l: int, t, deriv: int = 0):
        """Partition-of-unity window cutoff with transitions of width 2tau'
        centred on the window edges (l +- 1/2) tau''."""
        self._check(deriv)
        tp, tpp = schedule.tau_p_f(m), schedule.tau_pp_f(m)
        t = np.atleast_1d(np.asarray(t, dtype=float)) - l * tpp
        up = _step_derivs(t + 0.5 * tpp, tp, deriv, self.sharpness)
        dn = _step_derivs(t - 0.5 * tpp, tp, deriv, self.sharpness)
        return up[deriv] - dn[deriv]

    def zetahat_zeta(self, schedule: ParameterSchedule, m: int, k: int, t, deriv: int = 0):
        """The modulation zeta_hat_{m, l_k} * zeta_{m,k} acting on slot k."""
        if deriv == 0:
            l = slot_index(schedule, m, k)
            return self.zeta_hat_ml(schedule, m, l, t) * self.zeta_mk(schedule, m, k, t)
        l = slot_index(schedule, m, k)
        out = np.zeros_like(np.atleast_1d(np.asarray(t, dtype=float)))
        for j in range(deriv + 1):
            out += math.comb(deriv, j) * self.zeta_hat_ml(schedule, m, l, t, j) * \
                self.zeta_mk(schedule, m, k, t, deriv - j)
        return out

    def _check(self, deriv: int) -> None:
        if deriv < 0 or deriv > self.deriv_cap:
            raise CapExceededError(
                f"derivative order {deriv} beyond cap {self.deriv_cap}")


def _ramp_overlap_integral(sharpness: float) -> float:
    """I(s) = int_0^1 Phi(v) (1 - Phi(v)) dv for the closed-form step."""
    def f(v):
        p = step_scalar(np.array([v]), sharpness)[0]
        return p * (1.0 - p)

    val, _ = quad(f, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def calibrate_profiles(
    target_l2sq: float = 0.9,
    tol: float = 1e-6,
    deriv_cap: int = 6,
    sharpness_grid: tuple = (8.0, 4.0, 2.0, 1.0, 0.5, 0.25, 0.1, 0.05),
    sigma_xi: float = 0.24,
) -> CutoffFamily:
    """Pick (sharpness, sigma) so that the zeta profile meets all constraints.

    The ramp construction gives int zeta^2 = 1 - 4 sigma I(s) exactly, so for
    each sharpness the transition half-width sigma is determined; feasibility
    requires sigma <= 1/6 (support inside [-2/3, 2/3]).  The returned value is
    cross-checked against direct adaptive quadrature of zeta^2.
    """
    if not (0.0 < target_l2sq < 1.0):
        raise DomainError("target_l2sq must be in (0, 1)")
    if tol <= 0:
        raise DomainError("tol must be positive")
    last = None
    for s in sharpness_grid:
        ramp = _ramp_overlap_integral(s)
        sigma = (1.0 - target_l2sq) / (4.0 * ramp)
        last = (s, sigma)
        if sigma <= 1.0 / 6.0:
            fam = CutoffFamily(
                sharpness=s, sigma_zeta=sigma, sigma_xi=sigma_xi,
                deriv_cap=deriv_cap, target_l2sq=target_l2sq,
                l2sq_measured=math.nan, calibration_tol=tol,
            )
            measured = _zeta_l2sq(fam)
            if abs(measured - target_l2sq) < tol:
                return CutoffFamily(
                    sharpness=s, sigma_zeta=sigma, sigma_xi=sigma_xi,
                    deriv_cap=deriv_cap, target_l2sq=target_l2sq,
                    l2sq_measured=measured, calibration_tol=tol,
                )
    raise CalibrationError(
        f"no feasible (sharpness, sigma) in the search box; last tried {last}")


def _zeta_l2sq(family: CutoffFamily) -> float:
    f = lambda t: float(family.zeta(t)[0]) ** 2
    val, _ = quad(f, 0.0, 2.0 / 3.0, epsabs=1e-12, epsrel=1e-12, limit=400)
    return 2.0 * val


def eval_cutoff(
    family: CutoffFamily,
    which: str,
    schedule: ParameterSchedule,
    m: int,
    index: int,
    t,
    deriv: int = 0,
):
    """Evaluate one scheduled cutoff; index is k for zeta/xi, l for the hats."""
    if m > schedule.depth:
        raise DomainError(f"level {m} beyond schedule depth {schedule.depth}")
    if which == "zeta":
        return family.zeta_mk(schedule, m, index, t, deriv)
    if which == "xi":
        return family.xi_mk(schedule, m, index, t, deriv)
    if which == "zeta_hat":
        return family.zeta_hat_ml(schedule, m, index, t, deriv)
    if which == "xi_hat":
        return family.xi_hat_ml(schedule, m, index, t, deriv)
    raise DomainError(f"unknown cutoff family {which!r}")


@dataclass
class CutoffReport:
    l2sq: float
    l2sq_error: float
    partition_dev_zeta: float
    partition_dev_xi: float
    partition_dev_xi_hat: float
    evenness_dev: float
    support_violation: float
    plateau_dev: float
    transition_gap: float  # min dist(supp d/dt xi_mk, supp zeta_ml), odd k, l
    transition_gap_required: float
    hat_overlap: float  # max |zeta_hat_{m,l} zeta_{m,k}| over l != l_k
    deriv_constants: list  # fitted C_j with |d^j zeta_mk| <= C_j tau^-j

    @property
    def ok(self) -> bool:
        return (
            self.l2sq_error < 1e-6
            and self.partition_dev_zeta < 1e-10
            and self.partition_dev_xi < 1e-10
            and self.partition_dev_xi_hat < 1e-10
            and self.support_violation == 0.0
            and self.hat_overlap == 0.0
            and self.transition_gap >= self.transition_gap_required
        )


def verify_family(
    family: CutoffFamily,
    schedule: ParameterSchedule,
    m: int,
    n_grid: int = 100_000,
) -> CutoffReport:
    """Dense-grid verification of all support, partition, and overlap claims."""
    tau = schedule.tau_f(m)
    tpp = schedule.tau_pp_f(m)
    r2 = schedule.slot_ratio(m)

    # Partition of unity for zeta over one window period.
    t = np.linspace(-0.5 * tpp, 1.5 * tpp, n_grid)
    u = t / tau
    kc = np.floor(u).astype(int)
    acc = np.zeros_like(t)
    for off in (-2, -1, 0, 1, 2):
        acc += family.zeta(u - (kc + off))
    dev_zeta = float(np.max(np.abs(acc - 1.0)))

    # Partition for xi over odd k.
    acc = np.zeros_like(t)
    kodd = (2 * np.floor((u - 1.0) / 2.0) + 1).astype(int)
    for off in (-4, -2, 0, 2, 4):
        acc += family.xi(u - (kodd + off))
    dev_xi = float(np.max(np.abs(acc - 1.0)))

    # Partition for xi_hat over l.
    lc = np.round(t / tpp).astype(int)
    acc = np.zeros_like(t)
    for ll in range(int(np.min(lc)) - 1, int(np.max(lc)) + 2):
        acc += family.xi_hat_ml(schedule, m, ll, t)
    dev_xihat = float(np.max(np.abs(acc - 1.0)))

    # Evenness of zeta.
    uu = np.linspace(-0.75, 0.75, 20_001)
    dev_even = float(np.max(np.abs(family.zeta(uu) - family.zeta(-uu))))

    # Support and plateau checks (slot units).
    z = family.zeta(uu)
    supp_viol = float(np.max(np.abs(z[np.abs(uu) > 2.0 / 3.0]), initial=0.0))
    x = family.xi(np.linspace(-1.6, 1.6, 20_001))
    xx = np.linspace(-1.6, 1.6, 20_001)
    supp_viol = max(supp_viol, float(np.max(np.abs(x[np.abs(xx) > 1.25]), initial=0.0)))
    plateau = float(np.max(np.abs(x[np.abs(xx) <= 0.75] - 1.0), initial=0.0))
    th = np.linspace(-0.5 * tpp, 0.5 * tpp, 40_001)
    zh = family.zeta_hat_ml(schedule, m, 0, th)
    tp = schedule.tau_p_f(m)
    core = np.abs(th) <= 0.5 * tpp - 2.0 * tp
    outside = np.abs(th) >= 0.5 * tpp - tp
    plateau = max(plateau, float(np.max(np.abs(zh[core] - 1.0), initial=0.0)))
    supp_viol = max(supp_viol, float(np.max(np.abs(zh[outside]), initial=0.0)))
    xh = family.xi_hat_ml(schedule, m, 0, th)
    on_part = np.abs(th) <= 0.5 * tpp - tp
    plateau = max(plateau, float(np.max(np.abs(xh[on_part] - 1.0), initial=0.0)))

    # Transition gap: supp d/dt xi_{m,k} vs supp zeta_{m,l}, both odd.
    # In slot units the xi transition lives within [k-1-sx, k-1+sx] u [k+1-sx, k+1+sx]
    # and zeta_l occupies [l - 2/3, l + 2/3]; measured here on a grid.
    grid_u = np.linspace(-2.0, 2.0, 400_001)
    dxi = family.xi(grid_u + 1.0, deriv=1)  # xi_{k=1} transition near u = 0 and 2
    zmask = np.abs(family.zeta(grid_u - 1.0)) > 0.0  # zeta_{l=1}
    dmask = np.abs(dxi) > 0.0
    if np.any(dmask) and np.any(zmask):
        td, tz = grid_u[dmask], grid_u[zmask]
        gap = float(np.min(np.abs(td.reshape(-1, 1)[::50] - tz.reshape(1, -1)[:, ::50])))
    else:
        gap = np.inf
    gap_time = gap * tau

    # zeta_hat_{m,l} zeta_{m,k} for l != l_k.
    worst = 0.0
    for k in range(-r2, 2 * r2):
        lk = slot_index(schedule, m, k)
        ts = (k + np.linspace(-0.7, 0.7, 2001)) * tau
        zz = family.zeta_mk(schedule, m, k, ts)
        for l in (lk - 1, lk + 1):
            worst = max(worst, float(np.max(np.abs(family.zeta_hat_ml(schedule, m, l, ts) * zz))))

    # Fitted derivative-bound constants for zeta_mk.
    consts = []
    tl = np.linspace(-0.7, 0.7, 30_001)
    for j in range(family.deriv_cap + 1):
        cj = float(np.max(np.abs(family.zeta(tl, deriv=j))))
        consts.append(cj)  # in slot units; scheduled bound is cj * tau^-j

    measured = _zeta_l2sq(family)
    return CutoffReport(
        l2sq=measured,
        l2sq_error=abs(measured - family.target_l2sq),
        partition_dev_zeta=dev_zeta,
        partition_dev_xi=dev_xi,
        partition_dev_xi_hat=dev_xihat,
        evenness_dev=dev_even,
        support_violation=supp_viol,
        plateau_dev=plateau,
        transition_gap=gap_time,
        transition_gap_required=tau / 12.0,
        hat_overlap=worst,
        deriv_constants=consts,
    )
