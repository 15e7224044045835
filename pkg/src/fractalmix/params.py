"""Exponents, length scales, and time scales of the multiscale construction.

A ParameterSchedule fixes everything the other modules consume: the
regularity exponent beta and its derived exponents, the super-geometric
ladder of lengths eps_m with shear strengths a_m = eps_m^(beta-2), and the
three time-scale sequences tau_m << tau'_m << tau''_m per level.  Strict
mode reproduces the reference constants; desk mode relaxes the time
prefactors so that the scales stay resolvable in simulations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import mpmath as mp

from .errors import DomainError, InvariantViolation, OverflowScaleError

__all__ = [
    "Exponents",
    "ParameterSchedule",
    "StartScale",
    "ScheduleReport",
    "derive_exponents",
    "build_schedule",
    "custom_schedule",
    "slot_index",
    "choose_start_scale",
    "validate_schedule",
]


@dataclass(frozen=True)
class Exponents:
    beta: float
    q: float
    delta: float
    gamma: float
    n_star: int


def derive_exponents(beta: float) -> Exponents:
    """Closed-form exponents (q, delta, gamma, N*) for a given beta in (1, 4/3)."""
    if not (1.0 < beta < 4.0 / 3.0):
        raise DomainError(f"beta must lie strictly in (1, 4/3), got {beta}")
    q = 0.5 * (1.0 + (2.0 - beta) / (2.0 * (beta - 1.0)))
    delta = (q - 1.0) ** 2 / (4.0 * (q + 1.0) * (4.0 * q - 1.0))
    gamma = (q - 1.0) * beta / (q + 1.0)
    n_star = math.ceil(1.0 / delta**2 + 500.0 / delta)
    return Exponents(beta=beta, q=q, delta=delta, gamma=gamma, n_star=n_star)


def _eps_inv_exact(lam: int, q: float, m: int, max_eps_inv: int) -> int:
    """ceil(Lambda^(q^m/(q-1))) with arbitrary-precision arithmetic."""
    exponent = mp.power(mp.mpf(q), m) / (mp.mpf(q) - 1)
    bits = float(exponent) * math.log2(lam) + 64
    if bits > 64 * 1024:
        raise OverflowScaleError(
            f"eps_{m}^-1 needs ~2^{float(exponent) * math.log2(lam):.3g}, beyond any sane budget"
        )
    with mp.workprec(int(bits)):
        exponent = mp.power(mp.mpf(q), m) / (mp.mpf(q) - 1)
        val = mp.power(lam, exponent)
        out = int(mp.ceil(val))
    if out > max_eps_inv:
        raise OverflowScaleError(
            f"eps_{m}^-1 = {out} exceeds the configured representable range {max_eps_inv}"
        )
    return out


@dataclass(frozen=True)
class ParameterSchedule:
    """Immutable bundle of all scales for one run.

    Times are stored exactly as Fractions; float mirrors are provided for
    numerics.  Index m runs from 0 (unit scale) to depth M inclusive.
    Level-0 time entries are placeholders (no shears act at level 0).
    """

    beta: float
    q: float
    delta: float
    gamma: float
    n_star: int
    lam: int
    depth: int
    mode: str  # "strict" | "desk"
    eps_inv: tuple[int, ...]
    a: tuple[float, ...]
    tau: tuple[Fraction, ...]
    tau_p: tuple[Fraction, ...]
    tau_pp: tuple[Fraction, ...]
    desk_overrides: dict = field(default_factory=dict)
    custom: bool = False
    nstar_cap: int = 8

    @property
    def eps(self) -> tuple[float, ...]:
        return tuple(1.0 / e for e in self.eps_inv)

    def eps_f(self, m: int) -> float:
        return 1.0 / self.eps_inv[m]

    def tau_f(self, m: int) -> float:
        return float(self.tau[m])

    def tau_p_f(self, m: int) -> float:
        return float(self.tau_p[m])

    def tau_pp_f(self, m: int) -> float:
        return float(self.tau_pp[m])

    def slot_ratio(self, m: int) -> int:
        """tau''_m / tau_m as an exact integer."""
        r = self.tau_pp[m] / self.tau[m]
        if r.denominator != 1:
            raise InvariantViolation(f"tau''/tau not an integer at level {m}")
        return int(r)

    def series_cap(self) -> int:
        return min(self.n_star, self.nstar_cap)

    def describe(self) -> str:
        rows = [f"beta={self.beta} q={self.q:.6g} delta={self.delta:.6g} "
                f"gamma={self.gamma:.6g} N*={self.n_star} Lambda={self.lam} mode={self.mode}"]
        for m in range(self.depth + 1):
            rows.append(
                f"  m={m} eps^-1={self.eps_inv[m]} a={self.a[m]:.6g} "
                f"tau={self.tau_f(m):.6g} tau'={self.tau_p_f(m):.6g} tau''={self.tau_pp_f(m):.6g}"
            )
        return "\n".join(rows)


def _times_for_level(
    eps_prev: float,
    a_prev: float,
    delta: float,
    mode: str,
    prefactor: Fraction,
    desk_ratio: int,
) -> tuple[Fraction, Fraction, Fraction, int]:
    if mode == "strict":
        ratio = 4 * math.ceil(eps_prev ** (-delta)) + 1
        denom = math.ceil(a_prev / eps_prev ** (2.0 * delta))
        tau_pp = Fraction(1, 2**25 * denom)
    else:
        ratio = desk_ratio
        denom = math.ceil(a_prev / eps_prev ** (2.0 * delta))
        tau_pp = prefactor / denom
    tau_p = tau_pp / ratio
    tau = tau_pp / ratio**2
    return tau, tau_p, tau_pp, ratio


def build_schedule(
    beta: float,
    lam: int,
    depth: int,
    mode: str = "desk",
    *,
    desk_time_prefactor: Fraction = Fraction(1, 4),
    desk_ratio: int = 5,
    nstar_cap: int = 8,
    max_eps_inv: int = 2**62,
    time_rule: str = "default",
    kappa_ref: Optional[float] = None,
    exprat_target: Optional[float] = None,
) -> ParameterSchedule:
    """Build the full schedule for a given (beta, Lambda, depth).

    time_rule "default" applies the per-mode prefactor formula.  The desk
    rule "exprat" instead sizes tau_m so that eps_m^2/(kappa_m tau_m) tracks
    eps_{m-1}^(2 delta) (kappa_m estimated by the closed-form recursion from
    kappa_ref); those times generally cannot satisfy the 1/tau'' in 4N
    divisibility and are flagged as such by validate_schedule.
    """
    ex = derive_exponents(beta)
    if mode not in ("strict", "desk"):
        raise DomainError(f"mode must be 'strict' or 'desk', got {mode!r}")
    if mode == "strict" and lam < 2**7:
        raise DomainError(f"strict mode requires Lambda >= 128, got {lam}")
    if mode == "desk" and lam < 2:
        raise DomainError(f"Lambda >= 2 required, got {lam}")
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if desk_ratio % 4 != 1 or desk_ratio < 5:
        raise DomainError("desk ratio must be in 4N+1 and >= 5")
    if (1 / desk_time_prefactor) % 4 != 0:
        raise DomainError("desk time prefactor must be 1/(4N)")
    if time_rule not in ("default", "exprat"):
        raise DomainError(f"unknown time_rule {time_rule!r}")
    if time_rule == "exprat" and (mode != "desk" or kappa_ref is None):
        raise DomainError("time_rule='exprat' needs desk mode and kappa_ref")

    eps_inv = [1]
    for m in range(1, depth + 1):
        eps_inv.append(_eps_inv_exact(lam, ex.q, m, max_eps_inv))
    eps = [1.0 / e for e in eps_inv]
    a = [e ** (beta - 2.0) for e in eps]

    tau = [Fraction(1)]
    tau_p = [Fraction(1)]
    tau_pp = [Fraction(1)]
    if time_rule == "exprat":
        # Bootstrap kappa_m with the closed-form recursion, deepest level first.
        kap = [0.0] * (depth + 1)
        kap[depth] = kappa_ref
        for m in range(depth, 0, -1):
            kap[m - 1] = kap[m] + 9.0 * a[m] ** 2 * eps[m] ** 4 / (80.0 * kap[m])
        for m in range(1, depth + 1):
            target = exprat_target if exprat_target is not None else eps[m - 1] ** (2.0 * ex.delta)
            t_raw = eps[m] ** 2 / (kap[m] * target)
            tpp_raw = t_raw * desk_ratio**2
            denom = round(1.0 / (4.0 * tpp_raw))
            if denom >= 1:
                tpp = Fraction(1, 4 * denom)
            else:
                tpp = Fraction(tpp_raw).limit_denominator(10**12)
            tau_pp.append(tpp)
            tau_p.append(tpp / desk_ratio)
            tau.append(tpp / desk_ratio**2)
    else:
        for m in range(1, depth + 1):
            t, tp, tpp, _ = _times_for_level(
                eps[m - 1], a[m - 1], ex.delta, mode, desk_time_prefactor, desk_ratio
            )
            tau.append(t)
            tau_p.append(tp)
            tau_pp.append(tpp)

    return ParameterSchedule(
        beta=beta, q=ex.q, delta=ex.delta, gamma=ex.gamma, n_star=ex.n_star,
        lam=lam, depth=depth, mode=mode,
        eps_inv=tuple(eps_inv), a=tuple(a),
        tau=tuple(tau), tau_p=tuple(tau_p), tau_pp=tuple(tau_pp),
        desk_overrides={"time_prefactor": desk_time_prefactor, "ratio": desk_ratio,
                        "time_rule": time_rule},
        nstar_cap=nstar_cap,
    )


def custom_schedule(
    beta: float,
    eps: list[float],
    tau: list,
    *,
    a: Optional[list[float]] = None,
    ratio: int = 5,
    nstar_cap: int = 8,
) -> ParameterSchedule:
    """Hand-built desk schedule from explicit lengths and slot times.

    eps[0] must be 1; tau[m] is the slot duration at level m (tau[0] ignored).
    tau'' = ratio^2 * tau and tau' = ratio * tau, preserving the odd-ratio
    slot structure.  Amplitudes default to eps^(beta-2) but can be overridden,
    in which case the shear amplitude identity is reported as waived.
    """
    ex = derive_exponents(beta)
    if eps[0] != 1.0:
        raise DomainError("custom schedule requires eps[0] == 1")
    if ratio % 4 != 1 or ratio < 5:
        raise DomainError("ratio must be in 4N+1 and >= 5")
    depth = len(eps) - 1
    if len(tau) != depth + 1:
        raise DomainError("tau list must match eps list length")
    eps_inv = []
    for e in eps:
        inv = 1.0 / e
        if abs(inv - round(inv)) > 1e-9:
            raise DomainError(f"1/eps must be an integer, got 1/{e} = {inv}")
        eps_inv.append(round(inv))
    a_list = [e ** (beta - 2.0) for e in eps] if a is None else list(a)
    tau_fr = [Fraction(t).limit_denominator(10**12) if not isinstance(t, Fraction) else t
              for t in tau]
    tau_fr[0] = Fraction(1)
    return ParameterSchedule(
        beta=beta, q=ex.q, delta=ex.delta, gamma=ex.gamma, n_star=ex.n_star,
        lam=2, depth=depth, mode="desk",
        eps_inv=tuple(eps_inv), a=tuple(a_list),
        tau=tuple(tau_fr),
        tau_p=tuple(t * ratio for t in tau_fr),
        tau_pp=tuple(t * ratio**2 for t in tau_fr),
        desk_overrides={"ratio": ratio, "time_rule": "custom"},
        custom=True,
        nstar_cap=nstar_cap,
    )


def slot_index(schedule: ParameterSchedule, m: int, k) -> "int | object":
    """Flow-window index l_k of slot k at level m.

    Nearest integer to k*tau_m/tau''_m; ties cannot occur because the slot
    ratio is odd.  This choice makes the slot interval k*tau + [-tau/2, tau/2]
    land inside window l_k*tau'' + [-tau''/2, tau''/2] for every integer k
    (the naive ceiling form fails that containment at e.g. k = 0).
    """
    r2 = schedule.slot_ratio(m)
    half = (r2 - 1) // 2
    import numpy as np

    k_arr = np.asarray(k)
    l = (k_arr + half) // r2
    if np.ndim(k) == 0:
        return int(l)
    return l


@dataclass(frozen=True)
class StartScale:
    """Result of mapping a molecular diffusivity to its starting level."""

    kappa: float
    m: Optional[int]
    permissible: bool
    ambiguous: bool
    intervals: tuple  # ((m, lo, hi), ...) nearest or matched intervals

    def __bool__(self) -> bool:
        return self.permissible


def permissible_interval(schedule: ParameterSchedule, m: int) -> tuple[float, float]:
    expo = 2.0 * schedule.beta / (schedule.q + 1.0)
    center = schedule.eps_f(m) ** expo
    return 0.5 * center, 2.0 * center


def choose_start_scale(schedule: ParameterSchedule, kappa: float) -> StartScale:
    """Locate kappa inside the ladder of permissible intervals.

    With small scale separation consecutive intervals can overlap; the level
    whose center is nearest in log scale wins and the result is flagged
    ambiguous.  A kappa outside every interval yields a non-permissible
    result carrying the two nearest intervals (not an error).
    """
    if kappa <= 0:
        raise DomainError("kappa must be positive")
    expo = 2.0 * schedule.beta / (schedule.q + 1.0)
    hits = []
    all_iv = []
    for m in range(1, schedule.depth + 1):
        lo, hi = permissible_interval(schedule, m)
        all_iv.append((m, lo, hi))
        if lo <= kappa <= hi:
            hits.append((abs(math.log(kappa / schedule.eps_f(m) ** expo)), m, lo, hi))
    if hits:
        hits.sort()
        _, m, lo, hi = hits[0]
        return StartScale(kappa, m, True, len(hits) > 1,
                          tuple((mm, lo2, hi2) for _, mm, lo2, hi2 in hits))
    all_iv.sort(key=lambda t: min(abs(math.log(kappa / t[1])), abs(math.log(kappa / t[2]))))
    return StartScale(kappa, None, False, False, tuple(all_iv[:2]))


@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    skipped: bool = False
    note: str = ""


@dataclass
class ScheduleReport:
    checks: list

    @property
    def ok(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    def failed(self) -> list:
        return [c for c in self.checks if not c.passed and not c.skipped]

    def __str__(self) -> str:
        lines = []
        for c in self.checks:
            tag = "SKIP" if c.skipped else ("PASS" if c.passed else "FAIL")
            lines.append(f"[{tag}] {c.name} margin={c.margin:.3g} {c.note}")
        return "\n".join(lines)


def validate_schedule(schedule: ParameterSchedule, k_range: int = 10**6) -> ScheduleReport:
    """Evaluate every schedule invariant and report pass/fail with margins."""
    s = schedule
    checks: list[CheckResult] = []
    strict = s.mode == "strict"
    unscaled = s.desk_overrides.get("time_rule") in ("exprat", "custom")

    checks.append(CheckResult("eps0 == 1", s.eps_inv[0] == 1, 0.0))

    # Exponent identities.
    lhs = s.q * (s.beta - s.gamma)
    rhs = s.beta + s.gamma
    checks.append(CheckResult("q*(beta-gamma) == beta+gamma",
                              abs(lhs - rhs) < 1e-12 * rhs, abs(lhs - rhs)))
    qmax = (2.0 - s.beta) / (2.0 * (s.beta - 1.0))
    checks.append(CheckResult("1 < q < (2-beta)/(2(beta-1))",
                              1.0 < s.q < qmax, min(s.q - 1.0, qmax - s.q)))
    checks.append(CheckResult("0 < delta <= 1/16", 0.0 < s.delta <= 1.0 / 16.0,
                              1.0 / 16.0 - s.delta))

    # Minimal separation and super-geometric decay.
    for m in range(s.depth):
        sep = s.eps_f(m) / s.eps_f(m + 1)
        checks.append(CheckResult(f"eps_{m}/eps_{m + 1} >= Lambda", sep >= s.lam,
                                  sep - s.lam))
    for m in range(1, s.depth):
        lo = (2.0 / 3.0) * s.eps_f(m) ** s.q
        hi = (4.0 / 3.0) * s.eps_f(m) ** s.q
        ok = lo <= s.eps_f(m + 1) <= hi
        checks.append(CheckResult(
            f"(2/3)eps_{m}^q <= eps_{m + 1} <= (4/3)eps_{m}^q", ok,
            min(s.eps_f(m + 1) - lo, hi - s.eps_f(m + 1)),
            skipped=not strict, note="strict-mode bound" if not strict else ""))

    # Shear amplitude identity a_m eps_m^2 = eps_m^beta.
    for m in range(s.depth + 1):
        want = s.eps_f(m) ** s.beta
        got = s.a[m] * s.eps_f(m) ** 2
        ok = abs(got - want) <= 1e-13 * want
        checks.append(CheckResult(f"a_{m}*eps_{m}^2 == eps_{m}^beta", ok,
                                  abs(got - want) / want,
                                  skipped=s.custom and not ok,
                                  note="custom amplitude" if s.custom and not ok else ""))

    # Divisibility of the time scales.
    for m in range(1, s.depth + 1):
        for name, t in (("tau", s.tau[m]), ("tau'", s.tau_p[m]), ("tau''", s.tau_pp[m])):
            inv = 1 / t
            ok = inv.denominator == 1 and inv.numerator % 4 == 0
            checks.append(CheckResult(
                f"1/{name}_{m} in 4N", ok, 0.0,
                skipped=unscaled and not ok,
                note="waived: unscaled desk times" if unscaled and not ok else ""))
        for name, t in (("tau'", s.tau_p[m]), ("tau''", s.tau_pp[m])):
            rat = t / s.tau[m]
            ok = rat.denominator == 1 and rat.numerator % 4 == 1
            checks.append(CheckResult(f"{name}_{m}/tau_{m} in 4N+1", ok, 0.0))

    # Strict time-scale bounds.
    for m in range(1, s.depth + 1):
        ep = s.eps_f(m - 1)
        lo, hi = 2.0**-33 * ep ** (2 - s.beta + 4 * s.delta), 2.0**-28 * ep ** (2 - s.beta + 4 * s.delta)
        ok = lo <= s.tau_f(m) <= hi
        checks.append(CheckResult(f"tau_{m} within strict band", ok,
                                  min(s.tau_f(m) - lo, hi - s.tau_f(m)),
                                  skipped=not strict, note="" if strict else "strict-mode bound"))
        lo2, hi2 = 2.0**-25 * ep ** (2 - s.beta + 2 * s.delta), 2.0**-24 * ep ** (2 - s.beta + 2 * s.delta)
        ok2 = lo2 <= s.tau_pp_f(m) <= hi2
        checks.append(CheckResult(f"tau''_{m} within strict band", ok2,
                                  min(s.tau_pp_f(m) - lo2, hi2 - s.tau_pp_f(m)),
                                  skipped=not strict, note="" if strict else "strict-mode bound"))

    # Slot containment at every level, exhaustive over k.
    import numpy as np

    for m in range(1, s.depth + 1):
        r2 = s.slot_ratio(m)
        k = np.arange(-k_range, k_range + 1, dtype=np.int64)
        l = (k + (r2 - 1) // 2) // r2
        worst = int(np.max(np.abs(k - l * r2)))
        ok = worst <= (r2 - 1) // 2
        checks.append(CheckResult(
            f"slot containment level {m} (|k - l_k*R| <= (R-1)/2)", ok,
            (r2 - 1) // 2 - worst,
            note="ceiling form of l_k would fail this at k=0; nearest-integer form used"))

    return ScheduleReport(checks)
