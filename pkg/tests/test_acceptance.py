"""Acceptance suite: one printed pass/fail line per criterion.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines.  Every
expected value is computed by an independent brute-force oracle (see
``util.py``) or is a frozen hand-checked constant.
"""

import random
import time
from collections import Counter
from fractions import Fraction

import numpy as np

from ulafit import (
    CouplingModel,
    Scenario,
    SubUla,
    coupling_leakage,
    coupling_matrix,
    coprime,
    decompose,
    dual,
    estimate_from_covariance,
    exact_covariance,
    idca,
    lower_bound_udof,
    nested,
    optimal_params_3bl,
    optimal_params_4bl,
    report,
    rmse_stats,
    run_trials,
    sdca,
    search_gaps,
    uf3bl,
    uf4bl,
)
from util import brute_udof, brute_weights, random_array, random_sub_ula_pair


def _criterion(num: int, description: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[{status}] criterion {num:2d}: {description}"
    if detail and not ok:
        line += f" ({detail})"
    print(line)
    assert ok, line


# Case tables for the closed-form uDOF of the two designs, written as
# (n^2 + 4n + numerator_offset) / 2 so everything stays in integers.
_UDOF_OFFSETS_3BL = {0: -22, 4: -22, 1: -19, 3: -19, 2: -18, 5: -27}
_UDOF_OFFSETS_4BL = {0: 10, 1: 27, 7: 27, 2: 22, 6: 22, 3: 25, 5: 25, 4: 26}


def _table_udof_3bl(n: int) -> int:
    num = n * n + 4 * n + _UDOF_OFFSETS_3BL[n % 6]
    assert num % 2 == 0
    return num // 2


def _table_udof_4bl(n: int) -> int:
    num = n * n + 4 * n + _UDOF_OFFSETS_4BL[n % 8]
    assert num % 2 == 0
    return num // 2


def test_criterion_01_uf3bl_udof_closed_form():
    started = time.monotonic()
    spot = {17: 165, 18: 187, 20: 231}
    ok = True
    detail = ""
    for n in range(17, 121):
        oracle = brute_udof(uf3bl(n).positions)
        if oracle != _table_udof_3bl(n) or spot.get(n, oracle) != oracle:
            ok, detail = False, f"n={n}: oracle {oracle}, table {_table_udof_3bl(n)}"
            break
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 10.0
    _criterion(1, "3BL uDOF closed form matches brute force on n in [17, 120]",
               ok, detail or f"elapsed {elapsed:.1f}s")


def test_criterion_02_uf3bl_weights():
    ok, detail = True, ""
    for n in range(17, 121):
        nb = optimal_params_3bl(n).base_count
        w = brute_weights(uf3bl(n).positions)
        if (w[1], w[2], w[3]) != (1, 1, 3 * nb - 1):
            ok, detail = False, f"n={n}: got {(w[1], w[2], w[3])}"
            break
    _criterion(2, "3BL weights are w(1)=1, w(2)=1, w(3)=3*Nb-1 on n in [17, 120]",
               ok, detail)


def test_criterion_03_uf4bl_udof_closed_form():
    started = time.monotonic()
    spot = {32: 581, 34: 657, 36: 733}
    ok, detail = True, ""
    for n in range(32, 121):
        arr = uf4bl(n)
        oracle = brute_udof(arr.positions)
        if oracle != 2 * report(arr).j_value + 1 or spot.get(n, oracle) != oracle:
            ok, detail = False, f"n={n}: oracle {oracle}"
            break
        table = _table_udof_4bl(n)
        if n % 8 in (1, 7):
            # documented inconsistency: the case table overshoots by 5
            if table - oracle != 5:
                ok, detail = False, f"n={n}: table {table}, oracle {oracle}"
                break
        elif table != oracle:
            ok, detail = False, f"n={n}: table {table}, oracle {oracle}"
            break
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 10.0
    _criterion(3, "4BL uDOF matches brute force; case table exact except "
                  "remainders {1,7} (off by 5, documented)", ok,
               detail or f"elapsed {elapsed:.1f}s")


def test_criterion_04_uf4bl_weights():
    ok, detail = True, ""
    for n in range(32, 121):
        nb = optimal_params_4bl(n).base_count
        w = brute_weights(uf4bl(n).positions)
        if (w[1], w[2], w[3], w[4]) != (1, 1, 2, 4 * nb - 3):
            ok, detail = False, f"n={n}: got {(w[1], w[2], w[3], w[4])}"
            break
    _criterion(4, "4BL weights are w(1)=1, w(2)=1, w(3)=2, w(4)=4*Nb-3 "
                  "on n in [32, 120]", ok, detail)


def test_criterion_05_decomposition_exactness():
    rng = random.Random(20260824)
    arrays = [uf3bl(17), uf4bl(32), nested(5, 5), coprime(3, 5)]
    arrays += [random_array(rng) for _ in range(100)]
    ok, detail = True, ""
    for arr in arrays:
        total = decompose(arr).total()
        if dict(total) != dict(brute_weights(arr.positions)):
            ok, detail = False, f"positions {arr.positions}"
            break
    _criterion(5, "SDCA + IDCA sum equals the brute-force weight function "
                  "on 104 arrays", ok, detail)


def test_criterion_06_sub_ula_pair_properties():
    rng = random.Random(7)
    ok, detail = True, ""
    periodic_cases = 0
    for _ in range(500):
        a, b, gap = random_sub_ula_pair(rng)
        # SDCA coefficients: w(m*S) = N - m, zero elsewhere
        expected = Counter()
        for m in range(a.count):
            expected[m * a.interspace] += a.count - m
            if m:
                expected[-m * a.interspace] += a.count - m
        if dict(sdca(a)) != dict(expected):
            ok, detail = False, f"SDCA mismatch for {a}"
            break
        # IDCA minimum lag equals the gap
        poly = idca(a, b)
        if min(poly.support()) != gap:
            ok, detail = False, f"min lag != gap for {a}, {b}"
            break
        # disjoint-period case: each period holds exactly Na lags
        if b.interspace > a.aperture:
            periodic_cases += 1
            lags = sorted(poly.support())
            for j in range(b.count):
                lo = gap + j * b.interspace
                inside = [g for g in lags if lo <= g <= lo + a.aperture]
                if len(inside) != a.count:
                    ok, detail = False, f"period {j} of {a}, {b}"
                    break
            if len(lags) != a.count * b.count:
                ok, detail = False, f"lag collision for {a}, {b}"
            if not ok:
                break
    ok = ok and periodic_cases >= 50
    _criterion(6, "sub-ULA pair properties (SDCA coefficients, minimum lag = gap, "
                  "per-period count) on 500 random pairs", ok,
               detail or f"only {periodic_cases} disjoint-period cases")


def test_criterion_07_duality():
    rng = random.Random(3)
    ok, detail = True, ""
    for _ in range(200):
        arr = random_array(rng)
        if brute_weights(dual(arr.positions)) != brute_weights(arr.positions):
            ok, detail = False, f"positions {arr.positions}"
            break
    _criterion(7, "dual array keeps the weight function on 200 random arrays",
               ok, detail)


def test_criterion_08_lower_bound():
    ok, detail = True, ""
    for n in range(17, 121):
        if brute_udof(uf3bl(n).positions) < lower_bound_udof(n):
            ok, detail = False, f"3BL n={n}"
            break
    if ok:
        for n in range(32, 121):
            if brute_udof(uf4bl(n).positions) < lower_bound_udof(n):
                ok, detail = False, f"4BL n={n}"
                break
    _criterion(8, "uDOF of both designs meets the (n^2+beta)/2+1 lower bound",
               ok, detail)


def test_criterion_09_spatial_efficiency():
    ok, detail = True, ""
    if report(uf3bl(36)).spatial_efficiency != Fraction(354, 390):
        ok, detail = False, "uf3bl(36) efficiency mismatch"
    threshold = Fraction(9, 10)
    for n in range(36, 201):
        for build in (uf3bl, uf4bl):
            eff = report(build(n)).spatial_efficiency
            if not eff > threshold:
                ok, detail = False, f"{build.__name__}({n}) -> {eff}"
                break
        if not ok:
            break
    _criterion(9, "spatial efficiency exceeds 9/10 for both designs at n >= 36",
               ok, detail)


def test_criterion_10_coupling_leakage_ordering():
    started = time.monotonic()
    model = CouplingModel()  # c1 = 0.5 exp(j pi/3), band 100
    ok, detail = True, ""
    for n in (35, 40, 44):
        leaks = {}
        for name, arr in (("uf4bl", uf4bl(n)), ("uf3bl", uf3bl(n)),
                          ("nested", nested(n // 2, n - n // 2))):
            leaks[name] = coupling_leakage(coupling_matrix(arr.positions, model))
        if not leaks["uf4bl"] < leaks["uf3bl"] < leaks["nested"]:
            ok, detail = False, f"n={n}: {leaks}"
            break
    elapsed = time.monotonic() - started
    ok = ok and elapsed < 5.0
    _criterion(10, "coupling leakage orders uf4bl < uf3bl < nested at "
                   "n in {35, 40, 44}", ok, detail or f"elapsed {elapsed:.1f}s")


def test_criterion_11_gap_search_recovery():
    started = time.monotonic()
    # 3BL layout at Nb=2, Nt=3 (St = 11); expected gaps (4, 2+3*Nb, 3, 4, 3)
    protos3 = [(3, 2), (1, 2), (11, 3), (3, 2), (2, 2), (3, 2)]
    found3 = search_gaps(protos3, transfer_index=2, max_gap=10)
    ok3 = (4, 8, 3, 4, 3) in found3
    # 4BL layout at Nb=3, Nt=3 (St = 19); expected gaps (4, 5, 6, 8, 7, 3, 5)
    protos4 = [(3, 2), (4, 3), (1, 2), (4, 3), (19, 3), (4, 3), (2, 2), (4, 3)]
    found4 = search_gaps(protos4, transfer_index=4, max_gap=10)
    ok4 = (4, 5, 6, 8, 7, 3, 5) in found4
    elapsed = time.monotonic() - started
    ok = ok3 and ok4 and elapsed < 60.0
    _criterion(11, "gap search recovers the published 3BL and 4BL gap tuples",
               ok, f"3BL {ok3}, 4BL {ok4}, elapsed {elapsed:.1f}s")


_DOA_BUDGET_S = 300.0
_doa_elapsed = {"total": 0.0}


def _timed(fn):
    started = time.monotonic()
    out = fn()
    _doa_elapsed["total"] += time.monotonic() - started
    return out


def test_criterion_12a_exact_covariance_recovery():
    def run():
        arr = nested(3, 3)
        angles = tuple(np.linspace(-60.0, 60.0, 9))
        result = estimate_from_covariance(
            exact_covariance(arr.positions, angles), arr.positions, q=9)
        return result.missing == 0 and np.allclose(result.estimates, angles,
                                                   atol=1e-9)
    _criterion(12, "(a) exact-covariance MUSIC recovers Q=9=J sources to grid "
                   "resolution on nested(3,3)", _timed(run))


def test_criterion_12b_monte_carlo_accuracy():
    def run():
        angles = tuple(np.linspace(-60.0, 60.0, 30))
        scenario = Scenario(angles_deg=angles, noise_power=1.0, snapshots=1000,
                            master_seed=1201)
        results = run_trials(scenario, uf3bl(17), trials=20)
        stats = rmse_stats([r.estimates for r in results], angles)
        return stats.hit_rate == 1.0 and stats.rmse < 0.3, stats
    ok, stats = _timed(run)
    _criterion(12, "(b) uf3bl(17), Q=30, SNR 0 dB, 1000 snapshots: hit rate 1.0 "
                   "and RMSE < 0.3 deg", ok,
               f"hit {stats.hit_rate}, rmse {stats.rmse:.3f}")


def test_criterion_12c_coupling_robustness():
    def run():
        angles = tuple(np.linspace(-60.0, 60.0, 20))
        model = CouplingModel()
        rates = {}
        for name, arr in (("uf3bl", uf3bl(17)), ("nested", nested(8, 9))):
            scenario = Scenario(angles_deg=angles, noise_power=1.0,
                                snapshots=1000, coupling_enabled=True,
                                master_seed=1202)
            results = run_trials(scenario, arr, model, trials=20)
            rates[name] = rmse_stats(
                [r.estimates for r in results], angles).hit_rate
        return rates["uf3bl"] > rates["nested"], rates
    ok, rates = _timed(run)
    _criterion(12, "(c) with |c1|=0.5 coupling, uf3bl(17) hit rate exceeds the "
                   "17-sensor nested array", ok, str(rates))


def test_criterion_12d_rmse_vs_snr_monotone():
    def run():
        angles = tuple(np.linspace(-60.0, 60.0, 8))
        rmses = []
        for snr_db in (-10.0, 0.0, 10.0):
            scenario = Scenario(angles_deg=angles,
                                noise_power=10.0 ** (-snr_db / 10.0),
                                snapshots=500, master_seed=1203)
            results = run_trials(scenario, uf3bl(17), trials=50)
            rmses.append(rmse_stats([r.estimates for r in results],
                                    angles).rmse)
        return all(b <= a for a, b in zip(rmses, rmses[1:])), rmses
    ok, rmses = _timed(run)
    within_budget = _doa_elapsed["total"] < _DOA_BUDGET_S
    _criterion(12, "(d) RMSE is nonincreasing over SNR {-10, 0, 10} dB; DOA "
                   "suite within the 5 min budget", ok and within_budget,
               f"rmses {rmses}, total {_doa_elapsed['total']:.0f}s")


def test_criterion_13_base_layer_weight_table():
    covers = (
        [SubUla(0, 1, 12)],
        [SubUla(0, 2, 6), SubUla(12, 2, 6)],
        [SubUla(0, 3, 4), SubUla(10, 3, 4), SubUla(20, 3, 4)],
    )
    expected = ((11, 10, 9), (0, 10, 0), (0, 0, 9))
    ok, detail = True, ""
    for cover, want in zip(covers, expected):
        total = Counter()
        for sub in cover:
            total.update(dict(sdca(sub)))
        got = (total[1], total[2], total[3])
        if got != want:
            ok, detail = False, f"cover {cover}: got {got}, want {want}"
            break
    _criterion(13, "base-layer covers give (w(1), w(2), w(3)) = "
                   "(11,10,9) / (0,10,0) / (0,0,9)", ok, detail)
