"""Figures of merit, checked on hand-built logs and on full runs."""

import math
from types import SimpleNamespace

import pytest

from lmsharq.errors import DataError
from lmsharq.metrics import RunMetrics, decode_histogram, delay, delay_s, efficiency
from lmsharq.schemes import CodewordState, Transmission
from lmsharq.sim import RunLog, SimConfig

CFG = SimConfig(clear_sky=True, duration_s=30.0)
PEAK_EFFICIENCY = 8920 / 6690


def make_cw(cid, bits_list, decoded=True):
    cw = CodewordState(id=cid)
    for i, bits in enumerate(bits_list):
        cw.transmissions.append(Transmission(0.1 * i, bits, 1.0))
        cw.n_total_sent += bits
    cw.decoded = decoded
    if decoded:
        cw.decode_time_s = 0.1 * len(bits_list)
    return cw


def make_log(codewords, horizon=4):
    total = sum(c.n_total_sent for c in codewords)
    return RunLog(
        config=CFG,
        codewords=list(codewords),
        censored=[],
        total_bits=total,
        total_symbols=total // 2,
        effective_max_transmissions=horizon,
    )


def test_single_codeword_efficiency_is_exact():
    log = make_log([make_cw(0, [13380])])
    assert efficiency(log) == PEAK_EFFICIENCY


def test_nothing_decoded_means_zero_efficiency():
    log = make_log([make_cw(0, [13380], decoded=False)])
    assert efficiency(log) == 0.0


def test_doubling_the_spent_bits_halves_efficiency():
    one = make_log([make_cw(0, [13380])])
    two = make_log([make_cw(0, [13380, 13380])])
    assert efficiency(two) == efficiency(one) / 2.0


def test_empty_log_is_rejected():
    log = make_log([])
    with pytest.raises(DataError, match="empty"):
        efficiency(log)


def test_delay_reference_points():
    assert abs(delay(13380, 1, CFG) - 0.27676) <= 1e-12
    assert abs(delay(53520, 4, CFG) - 1.85704) <= 1e-12


def test_delay_reduces_to_airtime_without_propagation():
    link = SimpleNamespace(bit_rate_bps=5e5, t_propag_s=0.0)
    assert delay(13380, 1, link) == 13380 / 5e5


def test_delay_needs_at_least_one_transmission():
    with pytest.raises(DataError):
        delay(13380, 0, CFG)


def test_mean_delay_is_nan_when_nothing_decodes():
    log = make_log([make_cw(0, [13380], decoded=False)])
    assert math.isnan(delay_s(log))


def test_histogram_of_a_first_round_decode():
    log = make_log([make_cw(0, [13380])])
    bins = decode_histogram(log)
    assert bins.tolist() == [1.0, 0.0, 0.0, 0.0]
    m = RunMetrics.from_log(log)
    assert m.wer == 0.0
    assert m.total_decode_fraction == 1.0


def test_summary_bundle_fields():
    log = make_log([make_cw(0, [13380]), make_cw(1, [13380, 6000], decoded=False)])
    m = RunMetrics.from_log(log)
    assert (m.scheme, m.seed) == ("adaptive", 1)
    assert m.es_n0_ref_db == 10.0
    assert (m.generated, m.decoded, m.censored) == (2, 1, 0)
    assert m.wer == 0.5
    assert m.total_decode_fraction == sum(m.decode_fraction_per_transmission)
    assert m.mean_delay_s == delay(13380, 1, CFG)


@pytest.mark.grid
def test_decode_fractions_and_wer_partition_the_codewords(its_grid):
    for m, _ in its_grid.values():
        assert abs(sum(m.decode_fraction_per_transmission) + m.wer - 1.0) <= 1e-12


@pytest.mark.grid
def test_fixed_size_bursts_bound_the_mean_delay(its_grid):
    lo = delay(13380, 1, CFG)
    hi = delay(4 * 13380, 4, CFG)
    for (scheme, es), (m, _) in its_grid.items():
        if scheme != "classical":
            continue
        assert lo - 1e-12 <= m.mean_delay_s <= hi + 1e-12


@pytest.mark.grid
def test_classical_delay_falls_as_the_link_improves(its_grid):
    delays = [its_grid["classical", es][0].mean_delay_s for es in range(7, 14)]
    assert all(a > b for a, b in zip(delays, delays[1:]))


@pytest.mark.grid
def test_adaptive_decode_split_is_stable_across_the_sweep(its_grid):
    rounds = zip(
        *(its_grid["adaptive", es][0].decode_fraction_per_transmission
          for es in range(7, 14))
    )
    for values in rounds:
        assert max(values) - min(values) <= 0.1


@pytest.mark.grid
def test_fixed_size_schemes_cannot_beat_the_single_burst_rate(its_grid, open_grid):
    for grid in (its_grid, open_grid):
        for (scheme, es), (m, _) in grid.items():
            if scheme == "classical":
                assert m.efficiency_bits_per_symbol <= PEAK_EFFICIENCY + 1e-9


def test_unfaded_fixed_scheme_hits_the_single_burst_rate(code_spec, mi_table):
    from lmsharq.sim import run

    cfg = SimConfig(scheme="classical", clear_sky=True, duration_s=30.0)
    log = run(cfg, None, code_spec, mi_table)
    assert log.generated > 500
    assert efficiency(log) == PEAK_EFFICIENCY
