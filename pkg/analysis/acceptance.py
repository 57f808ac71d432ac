"""
Acceptance Suite
================

Runs the model's validation criteria end to end and reports each one with
its measured value and threshold. Two scales are available:
- quick: the statistical 2x2 checks at full length, the rest shortened
- full: every criterion at its reference sample count
"""

import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional

import numpy as np

from analysis.scenario import TrackingPolicy, UpdateRule, RULE_EVERY_K, run_tracking, sorted_decomposition
from analysis.statistics import (
    band_rejection, count_crossings, detect_swaps, distribution_compare, empirical_cdf,
    oob_rejection, rayleigh_slope, selection_equivalence,
)
from constants import Defaults, Scenario
from models.doppler import periodogram, value_filter, vector_filter
from models.eigenmodel import assemble_trace, gen_first_vector_series, generate, gen_singular_values
from models.types import EigenTrace, ModelConfig
from utils.errors import ConfigError
from utils.numkit import householder_transition, unitarity_error
from utils.seeding import StreamFactory

logger = logging.getLogger(__name__)

PROFILE_QUICK = "quick"
PROFILE_FULL = "full"


@dataclass(frozen=True)
class Profile:
    name: str
    samples_2x2: int
    samples_4x4: int
    samples_equivalence: int
    samples_swap: int
    seed: int = 2024


PROFILES = {
    PROFILE_QUICK: Profile(PROFILE_QUICK, samples_2x2=100_000, samples_4x4=20_000,
                           samples_equivalence=2_000, samples_swap=1_000),
    PROFILE_FULL: Profile(PROFILE_FULL, samples_2x2=100_000, samples_4x4=100_000,
                          samples_equivalence=10_000, samples_swap=4_000),
}


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    value: Any
    threshold: str
    detail: str = ""

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["passed"] = bool(self.passed)
        return data


@dataclass
class AcceptanceReport:
    profile: str
    results: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "profile": self.profile,
            "passed": self.passed,
            "criteria": {str(r.criterion): r.to_dict() for r in self.results},
        }


def _rounded(values):
    return [round(float(v), 4) for v in values]


class AcceptanceRunner:
    """Lazily builds the shared traces and evaluates criteria on demand"""

    def __init__(self, profile: Profile):
        self.profile = profile
        self._cache: Dict[str, Any] = {}

    def _cached(self, key: str, build: Callable[[], Any]):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def config(self, n: int, m: int, samples: int, **extra) -> ModelConfig:
        return ModelConfig(n=n, m=m, n_sam=samples, seed=self.profile.seed, **extra)

    @property
    def trace_2x2(self) -> EigenTrace:
        return self._cached("2x2", lambda: generate(self.config(2, 2, self.profile.samples_2x2)))

    @property
    def trace_4x4(self) -> EigenTrace:
        return self._cached("4x4", lambda: generate(self.config(4, 4, self.profile.samples_4x4)))

    @property
    def sorted_2x2(self) -> EigenTrace:
        return self._cached("2x2-sorted", lambda: sorted_decomposition(self.trace_2x2))

    # criteria ------------------------------------------------------------

    def rayleigh_slope_2x2(self) -> CheckResult:
        H = assemble_trace(self.trace_2x2).H
        slopes = [rayleigh_slope(empirical_cdf(np.abs(H[:, i, j]))) for i in range(2) for j in range(2)]
        passed = all(abs(s - 10.0) <= 1.0 for s in slopes)
        return CheckResult(1, "rayleigh_cdf_slope", passed, _rounded(slopes), "10 +/- 1 dB/decade",
                           "slope of every |h_ij| CDF for p in [1e-3, 1e-1]")

    def _diagonal_rejection(self, trace: EigenTrace, pairs) -> List[float]:
        cfg = trace.config
        H = assemble_trace(trace).H
        return [oob_rejection(periodogram(H[:, i, j], cfg.f_s, f_d=cfg.f_d), cfg.f_d) for i, j in pairs]

    def oob_2x2(self) -> CheckResult:
        values = self._diagonal_rejection(self.trace_2x2, [(i, j) for i in range(2) for j in range(2)])
        return CheckResult(2, "oob_rejection_2x2", min(values) >= 40.0, _rounded(values), ">= 40 dB")

    def oob_4x4(self) -> CheckResult:
        values = self._diagonal_rejection(self.trace_4x4, [(i, i) for i in range(4)])
        return CheckResult(3, "oob_rejection_4x4", min(values) >= 30.0, _rounded(values), ">= 30 dB",
                           "diagonal elements h_11 .. h_44")

    def normalization(self) -> CheckResult:
        errors = []
        for n, m in ((2, 2), (4, 4), (4, 2), (2, 4)):
            cfg = self.config(n, m, 2_000)
            values = gen_singular_values(cfg, StreamFactory(cfg.seed).child("s"))
            total = float(np.sum(np.mean(np.abs(values) ** 2, axis=0)))
            errors.append(abs(total - n * m) / (n * m))
        return CheckResult(4, "power_normalization", max(errors) < 1e-9, [float(e) for e in errors],
                           "< 1e-9 relative", "sum of mean |s_i|^2 against N*M for 2x2, 4x4, 4x2, 2x4")

    def unitarity(self) -> CheckResult:
        trace = self.trace_4x4
        worst = max(unitarity_error(trace.U), unitarity_error(trace.V))
        return CheckResult(5, "unitarity_4x4", worst < 1e-8, float(worst), "< 1e-8",
                           f"{len(trace)} samples with periodic re-orthonormalization")

    def capping_rate(self) -> CheckResult:
        rates = []
        for dim in (2, 4):
            cfg = self.config(dim, dim, self.profile.samples_2x2 if dim == 2 else self.profile.samples_4x4)
            series = gen_first_vector_series(dim, cfg, StreamFactory(cfg.seed).child("u"))
            rates.append(series.cap_rate)
        return CheckResult(6, "constraint_capping_rate", max(rates) < 0.01, _rounded(rates), "< 1% of samples",
                           "dim 2 and dim 4 first-column series")

    def perfect_csi(self) -> CheckResult:
        policy = TrackingPolicy()
        failures = []
        for model_class in ("I", "II", "III", "IV", "V"):
            for size in (2, 4):
                cfg = self.config(size, size, 500, model_class=model_class, s_f=Defaults.S_F_SCENARIO)
                series = run_tracking(generate(cfg), policy)
                if not np.all(np.isposinf(series.sir_db)):
                    failures.append(f"{model_class}:{size}x{size}")
        return CheckResult(7, "perfect_csi_sir", not failures, failures, "+inf at every sample and mode",
                           "classes I-V, 2x2 and 4x4")

    def forced_swap_stress(self) -> CheckResult:
        period = 2
        cfg = self.config(4, 4, self.profile.samples_swap, s_f=Defaults.S_F_SCENARIO)
        trace = generate(cfg)
        policy = TrackingPolicy(u_update=UpdateRule(RULE_EVERY_K, 2 * period), v_update=UpdateRule(),
                                swap_injection=period)
        sir1 = run_tracking(trace, policy).capped_db()[:, 0]
        blocks = len(sir1) // period
        medians = np.median(sir1[: blocks * period].reshape(blocks, period), axis=1)
        share = float(np.mean(np.abs(np.diff(medians)) >= 40.0))
        swaps = detect_swaps(trace.U, Scenario.SWAP_THRESHOLD)
        passed = share >= 0.95 and not swaps
        return CheckResult(8, "forced_swap_alternation", passed, {"alternating_share": round(share, 4),
                           "natural_path_swaps": len(swaps)}, ">= 95% block pairs differ by >= 40 dB; no swaps",
                           f"swap period {period}, 4x4, S_f = {cfg.s_f:g}")

    def selection(self) -> CheckResult:
        trace = self.trace_4x4
        if len(trace) > self.profile.samples_equivalence:
            cut = self.profile.samples_equivalence
            trace = EigenTrace(config=trace.config.with_updates(n_sam=cut), U=trace.U[:cut],
                               S=trace.S[:cut], V=trace.V[:cut], t=trace.t[:cut])
        worst = selection_equivalence(trace)
        return CheckResult(9, "selection_equivalence", worst < 1e-8, float(worst), "< 1e-8 relative",
                           f"{len(trace)} samples, 4x4")

    def distribution_overlap(self) -> CheckResult:
        natural = np.abs(self.trace_2x2.singular_values)
        ordered = np.abs(self.sorted_2x2.singular_values)

        def distance(values):
            reference = float(np.sqrt(np.mean(values ** 2)))
            return distribution_compare(empirical_cdf(values[:, 0], reference), empirical_cdf(values[:, 1], reference))

        overlap, separation = distance(natural), distance(ordered)
        passed = overlap < 0.03 and separation > 0.1
        return CheckResult(10, "distribution_overlap", passed,
                           {"natural": round(overlap, 4), "sorted": round(separation, 4)},
                           "natural < 0.03, sorted > 0.1", "|s_1| vs |s_2| on a shared RMS reference")

    def spectral_narrowness(self, window: int = 4096) -> CheckResult:
        trace = self.trace_2x2
        cfg = trace.config
        edge = 0.3 * cfg.f_d
        full = band_rejection(periodogram(trace.U[:, 0, 0], cfg.f_s, f_d=cfg.f_d), edge)

        crossings = [c for c in count_crossings(trace.singular_values) if window // 2 <= c < len(trace) - window // 2]
        if not crossings:
            return CheckResult(11, "vector_spectral_narrowness", False, {"natural": round(full, 2)},
                               ">= 30 dB and sorted < natural", "no mode crossing inside the trace")
        lo = crossings[0] - window // 2
        span = slice(lo, lo + window)
        natural = band_rejection(periodogram(trace.U[span, 0, 0], cfg.f_s, segments=8, f_d=cfg.f_d), edge)
        ordered = band_rejection(periodogram(self.sorted_2x2.U[span, 0, 0], cfg.f_s, segments=8, f_d=cfg.f_d), edge)
        passed = full >= 30.0 and ordered < natural
        return CheckResult(11, "vector_spectral_narrowness", passed,
                           {"natural_full": round(full, 2), "natural_window": round(natural, 2),
                            "sorted_window": round(ordered, 2)},
                           ">= 30 dB beyond 0.3 f_d; sorted < natural around a crossing",
                           f"window of {window} samples at crossing {crossings[0]}")

    def property_suites(self) -> CheckResult:
        problems = []
        rng = np.random.default_rng(self.profile.seed)

        worst = 0.0
        for _ in range(200):
            a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
            a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
            T = householder_transition(a, b)
            worst = max(worst, float(np.max(np.abs(T @ a - b))), unitarity_error(T))
        if worst >= 1e-10:
            problems.append(f"householder {worst:.2e}")

        for model_class in ("I", "II", "III", "IV"):
            for size in (2, 4):
                trace = generate(self.config(size, size, 200, model_class=model_class))
                err = max(unitarity_error(trace.U), unitarity_error(trace.V))
                gains = np.sum(np.abs(trace.singular_values) ** 2, axis=1)
                if err >= 1e-9 or np.ptp(gains) > 1e-9:
                    problems.append(f"class {model_class} {size}x{size}")

        checks = [
            (vector_filter(0.0, 1.0, 3000, 0.0, 2), 1 / np.sqrt(2)),
            (vector_filter(0.1, 1.0, 3000, 0.0, 2), 1 / (0.6 * 3000 * 0.1)),
            (vector_filter(0.5, 1.0, 3000, 0.0, 2), 0.0),
            (value_filter(0.5, 1.0), 1 / np.sqrt(0.75)),
            (value_filter(1.5, 1.0), 0.0),
        ]
        if any(abs(got - want) > 1e-12 for got, want in checks):
            problems.append("filter point checks")

        from storage.trace_io import read_trace, write_trace

        trace = generate(self.config(2, 2, 100))
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "roundtrip.evcm")
            write_trace(trace, path)
            back = read_trace(path)
        if not (np.array_equal(back.U, trace.U) and np.array_equal(back.S, trace.S) and np.array_equal(back.V, trace.V)):
            problems.append("trace round trip")

        return CheckResult(12, "property_suites", not problems, problems, "all pass",
                           "Householder, class I-IV invariants, filter points, trace round trip")

    CRITERIA = {
        1: rayleigh_slope_2x2, 2: oob_2x2, 3: oob_4x4, 4: normalization, 5: unitarity, 6: capping_rate,
        7: perfect_csi, 8: forced_swap_stress, 9: selection, 10: distribution_overlap,
        11: spectral_narrowness, 12: property_suites,
    }


def run_acceptance(profile: str = PROFILE_QUICK, criteria: Optional[Iterable[int]] = None) -> AcceptanceReport:
    if profile not in PROFILES:
        raise ConfigError("profile", f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    runner = AcceptanceRunner(PROFILES[profile])
    report = AcceptanceReport(profile=profile)
    selected = sorted(criteria) if criteria is not None else sorted(AcceptanceRunner.CRITERIA)
    unknown = [c for c in selected if c not in AcceptanceRunner.CRITERIA]
    if unknown:
        raise ConfigError("criteria", f"unknown criterion numbers {unknown}; valid are 1-{len(AcceptanceRunner.CRITERIA)}")

    logger.info(f"🚀 acceptance suite ({profile}): criteria {selected}")
    for number in selected:
        check = AcceptanceRunner.CRITERIA[number]
        try:
            result = check(runner)
        except Exception as e:
            logger.error(f"❌ criterion {number} raised: {e}")
            result = CheckResult(number, check.__name__, False, None, "", f"error: {e}")
        marker = "✅" if result.passed else "❌"
        logger.info(f"{marker} {number:2d} {result.name}: {result.value} ({result.threshold})")
        report.results.append(result)
    return report
