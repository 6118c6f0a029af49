"""Acceptance gate: nine checks against the published regimes.

Each gate test appends one PASS/FAIL line to the terminal summary and
then asserts.  Gates 2, 4 and 9 encode claims the implementation cannot
reproduce; the analysis behind each is in the project decision log, and
the companion regression tests pin the behavior actually measured.
"""

import csv
import json
import os
import time

import numpy as np
import pytest

import conftest
import oracles
from ptssh import (
    HybridChainSpec,
    PotentialStack,
    QuenchProtocol,
    band_sweep,
    build_hamiltonian,
    decompose,
    default_energy_grid,
    edge_overlap,
    find_edge_states,
    propagate_expm,
    propagate_spectral,
    reflection_signal,
    reflection_sweep,
    run_quench,
    scattering_matrix,
    stack_transfer,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

V_GRID = [round(0.05 * i, 12) for i in range(17)]  # 0.0 .. 0.8

PT_STACK = PotentialStack.alternating(10, 6.0, 10.0, -0.3, 0.1)
HERMITIAN_STACK = PotentialStack.alternating(10, 6.0, 10.0, -0.3, 0.0)


def gate(number, name, passed, detail):
    line = f"gate {number}/9 {'PASS' if passed else 'FAIL'} {name}: {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert passed, line


@pytest.fixture(scope="module")
def sweep_table(full_chain):
    t0 = time.perf_counter()
    table = band_sweep(full_chain, V_GRID, threads=4)
    table.elapsed = time.perf_counter() - t0
    return table


@pytest.fixture(scope="module")
def quench_signals(full_chain):
    post = full_chain.with_v(0.5)
    t0 = time.perf_counter()
    signals = {}
    for side, site in (("left", 1), ("right", 220)):
        protocol = QuenchProtocol(pre_spec=full_chain, post_spec=post,
                                  initial_side=side)
        signals[side] = reflection_signal(run_quench(protocol), site)
    elapsed = time.perf_counter() - t0
    return signals, elapsed


@pytest.fixture(scope="module")
def pt_sweep():
    return reflection_sweep(PT_STACK, default_energy_grid())


def sweep_arrays(sweep):
    r_l = np.array([r.r_left for r in sweep.results])
    r_r = np.array([r.r_right for r in sweep.results])
    t = np.array([r.transmission for r in sweep.results])
    e = np.array([r.energy for r in sweep.results])
    return e, r_l, r_r, t


def test_gate_1_zero_mode_boundary(sweep_table):
    v = sweep_table.v_values
    min_real = sweep_table.min_abs_real
    low = min_real[v <= 0.35 + 1e-9]
    high = min_real[v >= 0.45 - 1e-9]
    ok = bool(np.all(low < 1e-6) and np.all(high > 1e-3)
              and sweep_table.elapsed < 120)
    gate(1, "zero modes persist to v=0.35 and are gone by v=0.45", ok,
         f"max min|Re E| below boundary {low.max():.2e}, "
         f"min above boundary {high.min():.2e}, "
         f"sweep took {sweep_table.elapsed:.1f}s")


def test_gate_2_gain_peak_location(sweep_table):
    v = sweep_table.v_values
    f = sweep_table.max_abs_imag
    i_max = int(np.argmax(f))
    v_max = float(v[i_max])
    f_at = dict(zip(np.round(v, 12), f))
    in_window = 0.3 <= v_max <= 0.5
    strong = f[i_max] >= 5 * f_at[0.1] and f[i_max] >= 5 * f_at[0.8]
    gate(2, "spectral gain peaks between v=0.3 and v=0.5", in_window and strong,
         f"global max {f[i_max]:.4e} sits at v={v_max}, "
         f"values at v=0.1/0.8 are {f_at[0.1]:.4e}/{f_at[0.8]:.4e}; "
         f"interface-pair modes dominate below v=0.15")


def test_gate_3_edge_localization(full_chain):
    dec = decompose(build_hamiltonian(full_chain))
    reports = find_edge_states(dec)
    plain = decompose(build_hamiltonian(full_chain.hermitian_counterpart()))
    two_states = len(reports) == 2
    heavy = all(r.edge_weight >= 0.99 for r in reports)
    overlaps = [edge_overlap(dec, plain, side) for side in ("left", "right")]
    close = all(o > 0.99 for o in overlaps)

    weights = []
    for v in (0.1, 0.2, 0.3, 0.35):
        sub = find_edge_states(decompose(build_hamiltonian(full_chain.with_v(v))))
        weights.append(max(r.edge_weight for r in sub))
    monotone = all(a > b for a, b in zip(weights, weights[1:]))

    ok = two_states and heavy and close and monotone
    gate(3, "edge states localized and tracking the gain-free chain", ok,
         f"{len(reports)} states, min weight "
         f"{min((r.edge_weight for r in reports), default=float('nan')):.6f}, "
         f"overlaps {overlaps[0]:.4f}/{overlaps[1]:.4f}, "
         f"weights along v {['%.4f' % w for w in weights]}")


def test_gate_4_quench_asymmetry(quench_signals):
    signals, elapsed = quench_signals
    peak_left = signals["left"].reemergence_peak
    peak_right = signals["right"].reemergence_peak
    ratio = peak_right / peak_left
    ok = ratio >= 2.0 and elapsed < 300
    gate(4, "right-initialized reflection at least twice the left", ok,
         f"peaks right/left {peak_right:.4e}/{peak_left:.4e}, ratio {ratio:.4f} "
         f"(the measured asymmetry runs the other way; {elapsed:.1f}s)")


def test_gate_5_propagator_equivalence():
    spec = HybridChainSpec(n_sites=40, v=0.5, w=0.4, u_re=-0.3, u_im=0.1,
                           pt_first_site=19, pt_last_site=22)
    h = build_hamiltonian(spec)
    psi0 = np.zeros(40, dtype=np.complex128)
    psi0[0] = 1.0
    times = np.linspace(0.0, 50.0, 101)
    deviation = np.abs(propagate_expm(h, psi0, times)
                       - propagate_spectral(decompose(h), psi0, times)).max()

    plain = build_hamiltonian(spec.hermitian_counterpart())
    norms = np.linalg.norm(propagate_expm(plain, psi0, times), axis=1)
    drift = np.abs(norms - 1.0).max()

    ok = deviation < 1e-6 and drift < 1e-10
    gate(5, "matrix-exponential and spectral propagators agree", ok,
         f"max deviation {deviation:.2e}, norm drift {drift:.2e}")


def test_gate_6_reflection_sweep_regimes(pt_sweep):
    herm = reflection_sweep(HERMITIAN_STACK, default_energy_grid())
    _, h_l, h_r, h_t = sweep_arrays(herm)
    reciprocal = np.abs(h_l - h_r).max() < 1e-10
    flux = np.abs(h_l + h_t - 1.0).max() < 1e-10

    _, p_l, p_r, _ = sweep_arrays(pt_sweep)
    split = np.abs(p_l - p_r).max()
    high = scattering_matrix(stack_transfer(PT_STACK, 50.0), 50.0)
    restored = abs(high.r_left - high.r_right) < 1e-3

    ok = reciprocal and flux and split > 0.05 and restored and not pt_sweep.failures
    gate(6, "reflection symmetric without gain, split with it, restored at E=50",
         ok,
         f"gain-free max|R_L-R_R| {np.abs(h_l - h_r).max():.2e}, "
         f"flux defect {np.abs(h_l + h_t - 1).max():.2e}, "
         f"split {split:.2f}, E=50 diff {abs(high.r_left - high.r_right):.2e}")


def test_gate_7_transfer_matrix_oracle():
    rng = np.random.default_rng(7)
    energies = rng.uniform(0.05, 5.0, size=20)
    worst = 0.0
    for energy in energies:
        direct = stack_transfer(PT_STACK, float(energy)).array
        reference = oracles.ode_stack_transfer(PT_STACK, float(energy))
        worst = max(worst, float(np.abs(direct - reference).max()))
    gate(7, "transfer matrices match direct wave-equation integration",
         worst < 1e-7, f"worst entrywise difference {worst:.2e} over 20 energies")


def test_gate_8_conjugation_symmetry(full_chain):
    worst = 0.0
    for v in (0.1, 0.4, 0.45):
        e = decompose(build_hamiltonian(full_chain.with_v(v)),
                      with_left=False).eigenvalues
        closure = np.abs(e.conj()[:, None] - e[None, :]).min(axis=1).max()
        worst = max(worst, float(closure))

    plain = full_chain.hermitian_counterpart()
    max_imag = float(np.abs(decompose(build_hamiltonian(plain),
                                      with_left=False).eigenvalues.imag).max())
    ok = worst < 1e-8 and max_imag < 1e-10
    gate(8, "spectra closed under conjugation, real when gain-free", ok,
         f"worst closure defect {worst:.2e}, gain-free max|Im E| {max_imag:.2e}")


def test_gate_9_generalized_conservation(pt_sweep):
    _, r_l, r_r, t = sweep_arrays(pt_sweep)
    violation = np.abs(np.abs(t - 1.0) - np.sqrt(r_l * r_r))
    ok = bool(violation.max() < 1e-6)
    gate(9, "|T-1| equals sqrt(R_L R_R) across the sweep", ok,
         f"max violation {violation.max():.2f}, median {np.median(violation):.2f} "
         f"(holds only for stacks unchanged by reversal plus conjugation; "
         f"see the equal-length control test)")


# ----------------------------------------------------- companion regressions

def test_asymmetry_ratio_regression(quench_signals):
    """Pin the measured reflection ratio to within 5%."""
    signals, _ = quench_signals
    with open(os.path.join(FIXTURES, "asymmetry_ratio.json")) as fh:
        frozen = json.load(fh)
    ratio = (signals["right"].reemergence_peak
             / signals["left"].reemergence_peak)
    assert ratio == pytest.approx(frozen["ratio_right_over_left"], rel=0.05)
    assert signals["left"].reemergence_peak == pytest.approx(
        frozen["peak_left_site1"], rel=0.05)


def test_reflection_curve_regression(pt_sweep):
    """Pin the full reflection sweep against the frozen curve."""
    with open(os.path.join(FIXTURES, "reflection_curve.csv")) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == len(pt_sweep.results)
    for row, result in zip(rows, pt_sweep.results):
        assert result.energy == pytest.approx(float(row["E"]), rel=1e-12)
        assert result.r_left == pytest.approx(float(row["r_left"]), rel=1e-6)
        assert result.r_right == pytest.approx(float(row["r_right"]), rel=1e-6)
        assert result.transmission == pytest.approx(float(row["transmission"]),
                                                    rel=1e-6)


def test_equal_length_control_obeys_conservation():
    """Blocks of equal width do satisfy the conservation identity."""
    stack = PotentialStack.alternating(10, 8.0, 8.0, -0.3, 0.1)
    sweep = reflection_sweep(stack, default_energy_grid())
    _, r_l, r_r, t = sweep_arrays(sweep)
    violation = np.abs(np.abs(t - 1.0) - np.sqrt(r_l * r_r))
    assert violation.max() < 1e-8
