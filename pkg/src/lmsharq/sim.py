"""Continuous-time link simulation.

A saturated transmitter keeps the forward link busy with back-to-back
bursts. Each codeword follows stop-and-wait HARQ: after a burst the
receiver's verdict comes back one round-trip later, and the link fills
the gap with bursts of other codewords. Retransmissions whose feedback
has arrived take priority over new codewords.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from lmsharq.channel import EmpiricalCdf, LmsModel, empirical_cdf, generate_series
from lmsharq.errors import ConfigError
from lmsharq.fec import CodeSpec, is_decodable
from lmsharq.mi import MiTable, db_to_linear
from lmsharq.schemes import (
    PROB_PRESETS,
    STATIC_PRESETS,
    CodewordState,
    DecodingProbTable,
    SchemeExhausted,
    StaticBitTable,
    adaptive_bits_needed,
    build_enhanced_table,
    conditional_prob,
    mi_needed,
    mi_update,
    next_burst_classical,
)

SCHEMES = ("classical", "enhanced", "adaptive")

CALIB_DURATION_S = 3600.0
CALIB_SEED = 90210

_REL_TOL = 1e-9


@dataclass
class SimConfig:
    """One run of the link simulation."""

    scheme: str = "adaptive"
    environment: str = "its"
    es_n0_ref_db: float = 10.0
    rtt_s: float = 0.5
    t_propag_s: float = 0.25
    bit_rate_bps: float = 5e5
    symbol_time_s: float = 4e-6
    duration_s: float = 600.0
    max_transmissions: int = 4
    probs_preset: str = "case3"
    static_preset: str = "classical-equal"
    seed: int = 1
    clear_sky: bool = False
    calib_duration_s: float = CALIB_DURATION_S
    calib_seed: int = CALIB_SEED

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if abs(self.rtt_s - 2.0 * self.t_propag_s) > _REL_TOL:
            raise ConfigError("rtt_s must equal twice t_propag_s")
        if self.bit_rate_bps <= 0.0 or self.symbol_time_s <= 0.0:
            raise ConfigError("rates must be positive")
        if abs(self.bit_rate_bps * self.symbol_time_s - 2.0) > 1e-6:
            raise ConfigError("bit rate and symbol time imply a non-QPSK modulation")
        if self.duration_s <= 0.0:
            raise ConfigError("duration_s must be positive")
        if self.max_transmissions < 1:
            raise ConfigError("max_transmissions must be at least 1")
        if self.probs_preset not in PROB_PRESETS:
            raise ConfigError(f"unknown probability preset {self.probs_preset!r}")
        if self.static_preset not in STATIC_PRESETS:
            raise ConfigError(f"unknown static preset {self.static_preset!r}")


@dataclass
class RunLog:
    """Outcome of one run: per-codeword records plus link totals.

    codewords holds every codeword whose HARQ exchange finished inside
    the horizon; censored holds the ones cut off by the end of the run
    (their bursts still count in the totals).
    """

    config: SimConfig
    codewords: list
    censored: list
    total_bits: int
    total_symbols: int
    effective_max_transmissions: int

    @property
    def generated(self) -> int:
        return len(self.codewords)

    @property
    def decoded(self) -> int:
        return sum(1 for c in self.codewords if c.decoded)


def _degenerate_clear_sky_cdf() -> EmpiricalCdf:
    return EmpiricalCdf(sorted_rho=np.array([1.0]))


def calibration_cdf(model: LmsModel, config: SimConfig) -> EmpiricalCdf:
    """Empirical attenuation distribution from a long calibration run."""
    series = generate_series(model, config.calib_duration_s, config.calib_seed)
    return empirical_cdf(series)


def run(
    config: SimConfig,
    model: Optional[LmsModel],
    spec: CodeSpec,
    mi_table: MiTable,
    cdf: Optional[EmpiricalCdf] = None,
) -> RunLog:
    """Simulate one configuration. Deterministic for a fixed config."""
    if config.clear_sky:
        series = None
        if cdf is None:
            cdf = _degenerate_clear_sky_cdf()
    else:
        if model is None:
            raise ConfigError("a channel model is required unless clear_sky is set")
        series = generate_series(model, config.duration_s, config.seed)
        if series.time_s[-1] + series.sample_dt_s < config.duration_s:
            raise ValueError("attenuation series shorter than the run duration")
        if cdf is None:
            cdf = calibration_cdf(model, config)

    es_n0_lin = float(db_to_linear(config.es_n0_ref_db))
    probs = DecodingProbTable(PROB_PRESETS[config.probs_preset])

    if config.scheme == "classical":
        bit_table = StaticBitTable(STATIC_PRESETS[config.static_preset])
        if sum(bit_table.n_sent) > spec.mother_codeword_bits:
            raise ConfigError("static bit table exceeds the mother codeword")
    elif config.scheme == "enhanced":
        bit_table = build_enhanced_table(cdf, probs, spec, es_n0_lin, mi_table)
    else:
        bit_table = None

    if bit_table is not None:
        horizon = min(config.max_transmissions, len(bit_table))
    else:
        horizon = min(config.max_transmissions, len(probs))

    def first_bits() -> int:
        if bit_table is not None:
            return next_burst_classical(bit_table, 1)
        p1 = conditional_prob(probs, 1)
        _, mi_1 = mi_needed(cdf, p1, es_n0_lin, mi_table)
        return adaptive_bits_needed(CodewordState(id=-1), spec, mi_1)

    adaptive_first = first_bits()

    t = 0.0
    next_id = 0
    total_bits = 0
    completed: list[CodewordState] = []
    pending: deque = deque()  # (ready_time_s, state, bits_next)
    in_flight: dict[int, CodewordState] = {}

    while True:
        if pending and pending[0][0] <= t:
            _, cw, bits = pending.popleft()
        else:
            cw = CodewordState(id=next_id)
            bits = adaptive_first
            airtime = bits / config.bit_rate_bps
            if t + airtime > config.duration_s:
                break
            next_id += 1
            in_flight[cw.id] = cw
        airtime = bits / config.bit_rate_bps
        if t + airtime > config.duration_s:
            break

        rho = 1.0 if config.clear_sky else series.rho_at(t)
        mi_update(cw, bits, rho, es_n0_lin, mi_table, start_time_s=t)
        total_bits += bits
        j = cw.n_transmissions
        receive_time = t + airtime + config.t_propag_s

        if is_decodable(spec, cw.n_total_sent, cw.mi_acc_per_bit):
            cw.decoded = True
            cw.decode_time_s = receive_time
            completed.append(cw)
            del in_flight[cw.id]
        elif j >= horizon:
            completed.append(cw)
            del in_flight[cw.id]
        else:
            try:
                if bit_table is not None:
                    bits_next = next_burst_classical(bit_table, j + 1)
                else:
                    p_next = conditional_prob(probs, j + 1)
                    _, mi_next = mi_needed(cdf, p_next, es_n0_lin, mi_table)
                    bits_next = adaptive_bits_needed(cw, spec, mi_next)
            except SchemeExhausted:
                completed.append(cw)
                del in_flight[cw.id]
            else:
                pending.append((t + airtime + config.rtt_s, cw, bits_next))
        t += airtime

    censored = sorted(in_flight.values(), key=lambda c: c.id)
    completed.sort(key=lambda c: c.id)
    assert total_bits % 2 == 0
    return RunLog(
        config=config,
        codewords=completed,
        censored=censored,
        total_bits=total_bits,
        total_symbols=total_bits // 2,
        effective_max_transmissions=horizon,
    )


def sweep(
    base_config: SimConfig,
    es_n0_list_db,
    schemes,
    seeds,
    model: Optional[LmsModel] = None,
    spec: Optional[CodeSpec] = None,
    mi_table: Optional[MiTable] = None,
) -> list[RunLog]:
    """Cross-product of schemes, Es/N0 points and seeds, in stable order.

    Runs sharing a seed share the channel realization, which makes
    scheme comparisons paired. The channel model, code spec and MI
    table default to the shipped assets.
    """
    from lmsharq import presets

    if mi_table is None:
        mi_table = presets.default_mi_table()
    if spec is None:
        spec = presets.default_code_spec(mi_table)
    if model is None and not base_config.clear_sky:
        model = presets.load_environment(base_config.environment)
    cdf = None
    if not base_config.clear_sky:
        cdf = calibration_cdf(model, base_config)

    logs = []
    for scheme in schemes:
        for es_db in es_n0_list_db:
            for seed in seeds:
                cfg = replace(
                    base_config, scheme=scheme, es_n0_ref_db=float(es_db), seed=int(seed)
                )
                logs.append(run(cfg, model, spec, mi_table, cdf=cdf))
    return logs
