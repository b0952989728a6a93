"""Scenario configuration, Monte-Carlo sweep execution, CSV emission, PSD verification.

Determinism: trial k of a scenario owns RandomSource(master_seed, k); workers
return per-trial results which are folded in trial order, so any worker count
produces bit-identical rows.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import welch

from . import metrics
from .channel import los_dft, rician_mix, sample_nlos
from .metrics import TrialResult
from .modem import make_constellation
from .numerics import RandomSource
from .phasenoise import (
    OscillatorTopology,
    StationaryModel,
    WienerModel,
    beta_from_sigma2,
    design_mask_filter,
    lorentzian_level,
    mask_level_db,
    resolve_mask,
    stationary_path,
    wiener_path,
)
from .receiver import CSI_MODES, RxConfig, simulate_trial

__all__ = [
    "Scenario",
    "SweepRow",
    "parse_scenario",
    "parse_scenario_file",
    "scenario_to_text",
    "validate_scenario",
    "run_scenario",
    "run_sweep",
    "write_rows",
    "CSV_COLUMNS",
    "PsdReport",
    "psd_check",
]

PN_MODELS = ("none", "wiener", "stationary")

# per-trial substream keys
_KEY_NLOS = 0
_KEY_PN = 1
_KEY_DATA = 2
_KEY_NOISE = 3


@dataclass(frozen=True)
class Scenario:
    """Complete description of one Monte-Carlo experiment."""

    scenario_id: str
    n: int = 4
    snr_db: tuple[float, ...] = (25.0,)
    k_db: float = math.inf
    constellation: str = "QAM16"
    l_d: int = 1000
    trials: int = 2000
    pn_model: str = "none"
    sigma2_delta: float = 1e-4
    mask: str = "reynolds85"
    topology: str = "individual-individual"
    compensation: bool = False
    alpha: float = 0.1
    csi: str = "training"
    master_seed: int = 20260815
    ts: float = 1e-9
    filter_len: int = 4097


@dataclass(frozen=True)
class SweepRow:
    """One (scenario, SNR) result point.

    evm is the frame-mean RMS EVM (the convention link floors are quoted in);
    evm_pooled is the pooled RMS over all symbols.  wall_time_s is the wall time
    of the whole scenario run, repeated on each of its rows.  Only CSV_COLUMNS
    end up in files.
    """

    scenario_id: str
    n: int
    k_db: float
    constellation: str
    pn_model: str
    sigma2_or_mask: str
    topology: str
    compensated: bool
    snr_db: float
    evm: float
    ser: float
    symbols: int
    seed: int
    evm_pooled: float = math.nan
    wall_time_s: float = 0.0


CSV_COLUMNS = (
    "scenario_id",
    "N",
    "K_db",
    "constellation",
    "pn_model",
    "sigma2_or_mask",
    "topology",
    "compensated",
    "snr_db",
    "evm",
    "ser",
    "symbols",
    "seed",
)


def _parse_bool(v: str) -> bool:
    s = v.strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _parse_float(v: str) -> float:
    s = v.strip().lower()
    if s in ("inf", "+inf", "infinity"):
        return math.inf
    return float(v)


def _parse_snr_list(v: str) -> tuple[float, ...]:
    parts = [p for p in v.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("empty snr_db list")
    return tuple(float(p) for p in parts)


# key -> (scenario field, parser)
_SCHEMA = {
    "id": ("scenario_id", str.strip),
    "n": ("n", int),
    "snr_db": ("snr_db", _parse_snr_list),
    "k_db": ("k_db", _parse_float),
    "constellation": ("constellation", str.strip),
    "l_d": ("l_d", int),
    "trials": ("trials", int),
    "pn_model": ("pn_model", lambda v: v.strip().lower()),
    "sigma2_delta": ("sigma2_delta", float),
    "mask": ("mask", str.strip),
    "topology": ("topology", str.strip),
    "compensation": ("compensation", _parse_bool),
    "alpha": ("alpha", float),
    "csi": ("csi", lambda v: v.strip().lower()),
    "master_seed": ("master_seed", int),
    "ts": ("ts", float),
    "filter_len": ("filter_len", int),
}


def parse_scenario(text: str, default_id: str = "scenario") -> Scenario:
    """Parse the flat key = value scenario format.

    One pair per line, '#' starts a comment, unknown or repeated keys are
    errors.  perfect_csi = true/false is accepted as shorthand for
    csi = perfect / csi = training.
    """
    fields: dict = {}
    seen: set[str] = set()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {ln}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        if key in seen:
            raise ValueError(f"line {ln}: repeated key {key!r}")
        seen.add(key)
        if key == "perfect_csi":
            if "csi" in seen:
                raise ValueError(f"line {ln}: give either csi or perfect_csi, not both")
            seen.add("csi")
            fields["csi"] = "perfect" if _parse_bool(val) else "training"
            continue
        if key == "csi" and "csi" in fields:
            raise ValueError(f"line {ln}: give either csi or perfect_csi, not both")
        if key not in _SCHEMA:
            raise ValueError(f"line {ln}: unknown scenario key {key!r}")
        name, parser = _SCHEMA[key]
        try:
            fields[name] = parser(val)
        except ValueError as e:
            raise ValueError(f"line {ln}: bad value for {key!r}: {e}") from None
    fields.setdefault("scenario_id", default_id)
    s = Scenario(**fields)
    validate_scenario(s)
    return s


def parse_scenario_file(path) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    stem = os.path.splitext(os.path.basename(path))[0]
    return parse_scenario(text, default_id=stem)


def scenario_to_text(s: Scenario) -> str:
    """Serialize a Scenario back to the key = value format (round-trips)."""
    lines = [
        f"id = {s.scenario_id}",
        f"n = {s.n}",
        "snr_db = " + " ".join(f"{v:.10g}" for v in s.snr_db),
        f"k_db = {'inf' if math.isinf(s.k_db) else format(s.k_db, '.10g')}",
        f"constellation = {s.constellation}",
        f"l_d = {s.l_d}",
        f"trials = {s.trials}",
        f"pn_model = {s.pn_model}",
        f"sigma2_delta = {s.sigma2_delta:.10g}",
        f"mask = {s.mask}",
        f"topology = {s.topology}",
        f"compensation = {'true' if s.compensation else 'false'}",
        f"alpha = {s.alpha:.10g}",
        f"csi = {s.csi}",
        f"master_seed = {s.master_seed}",
        f"ts = {s.ts:.10g}",
        f"filter_len = {s.filter_len}",
    ]
    return "\n".join(lines) + "\n"


def validate_scenario(s: Scenario) -> None:
    """Fail fast with the offending parameter named."""
    if s.n < 1:
        raise ValueError(f"n must be >= 1, got {s.n}")
    if not s.snr_db:
        raise ValueError("snr_db must be non-empty")
    if s.l_d < 1:
        raise ValueError(f"l_d must be >= 1, got {s.l_d}")
    if s.trials < 1:
        raise ValueError(f"trials must be >= 1, got {s.trials}")
    if s.pn_model not in PN_MODELS:
        raise ValueError(f"pn_model must be one of {PN_MODELS}, got {s.pn_model!r}")
    if s.csi not in CSI_MODES:
        raise ValueError(f"csi must be one of {CSI_MODES}, got {s.csi!r}")
    if not math.isinf(s.k_db) and not math.isfinite(s.k_db):
        raise ValueError("k_db must be finite or inf")
    make_constellation(s.constellation)
    OscillatorTopology.from_name(s.topology)
    RxConfig(s.compensation, s.alpha, "per_stream", s.csi)
    if s.pn_model == "wiener" and s.sigma2_delta < 0:
        raise ValueError(f"sigma2_delta must be >= 0, got {s.sigma2_delta}")
    if s.pn_model == "stationary":
        StationaryModel(resolve_mask(s.mask), filter_len=s.filter_len, f_sample=1.0 / s.ts)
    if s.csi != "perfect":
        from .numerics import hadamard

        try:
            hadamard(s.n)
        except Exception as e:
            raise ValueError(f"n = {s.n}: no Hadamard training matrix ({e})") from None


def _components(s: Scenario):
    c = make_constellation(s.constellation)
    top = OscillatorTopology.from_name(s.topology)
    model = None
    if s.pn_model == "wiener":
        model = WienerModel(s.sigma2_delta, s.ts)
    elif s.pn_model == "stationary":
        model = StationaryModel(resolve_mask(s.mask), filter_len=s.filter_len, f_sample=1.0 / s.ts)
    mode = "averaged" if (s.compensation and top.fully_common) else "per_stream"
    cfg = RxConfig(s.compensation, s.alpha, mode, s.csi)
    return c, top, model, cfg


def _trial_results(s: Scenario, k: int, parts) -> list[TrialResult]:
    from .modem import build_frame
    from .phasenoise import oscillator_bank

    c, top, model, cfg = parts
    rs = RandomSource(s.master_seed, k)
    if math.isinf(s.k_db):
        h = rician_mix(los_dft(s.n), None, math.inf)
    else:
        h = rician_mix(los_dft(s.n), sample_nlos(s.n, rs.derive(_KEY_NLOS)), 10.0 ** (s.k_db / 10.0))
    frame = build_frame(s.n, s.l_d, c, rs.derive(_KEY_DATA), training=(s.csi != "perfect"))
    bank = None
    if model is not None:
        bank = oscillator_bank(top, model, model, s.n, frame.l_f, rs.derive(_KEY_PN))
    return simulate_trial(h, bank, frame, s.snr_db, cfg, rs.derive(_KEY_NOISE))


def _chunk_worker(args) -> list[list[TrialResult]]:
    s, start, stop = args
    parts = _components(s)
    return [_trial_results(s, k, parts) for k in range(start, stop)]


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".10g")


def _sigma2_or_mask(s: Scenario) -> str:
    if s.pn_model == "wiener":
        return _fmt(s.sigma2_delta)
    if s.pn_model == "stationary":
        return s.mask
    return ""


def run_scenario(s: Scenario, workers: int = 1) -> list[SweepRow]:
    """Run all trials at every SNR point and reduce to one row per SNR.

    Results are bit-identical for any worker count: trial k always uses stream
    k of the scenario's master seed, and per-trial results are folded in trial
    order regardless of which process produced them.
    """
    validate_scenario(s)
    t0 = time.monotonic()
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        per_trial = _chunk_worker((s, 0, s.trials))
    else:
        n_chunks = min(s.trials, workers * 4)
        bounds = np.linspace(0, s.trials, n_chunks + 1).astype(int)
        tasks = [(s, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            per_trial = [r for chunk in ex.map(_chunk_worker, tasks) for r in chunk]

    # fold in trial order per SNR point so any worker count gives the same sums
    totals = [metrics.merge(col) for col in zip(*per_trial)]
    dt = time.monotonic() - t0

    rows = []
    for snr, acc in zip(s.snr_db, totals):
        rows.append(
            SweepRow(
                scenario_id=s.scenario_id,
                n=s.n,
                k_db=s.k_db,
                constellation=s.constellation,
                pn_model=s.pn_model,
                sigma2_or_mask=_sigma2_or_mask(s),
                topology=s.topology,
                compensated=s.compensation,
                snr_db=snr,
                evm=metrics.frame_evm(acc),
                ser=metrics.ser(acc),
                symbols=acc.symbols,
                seed=s.master_seed,
                evm_pooled=metrics.evm(acc),
                wall_time_s=dt,
            )
        )
    return rows


def _row_record(r: SweepRow) -> str:
    vals = (
        r.scenario_id,
        str(r.n),
        "inf" if math.isinf(r.k_db) else _fmt(r.k_db),
        r.constellation,
        r.pn_model,
        r.sigma2_or_mask,
        r.topology,
        "1" if r.compensated else "0",
        _fmt(r.snr_db),
        _fmt(r.evm),
        _fmt(r.ser),
        str(r.symbols),
        str(r.seed),
    )
    return ",".join(vals)


def write_rows(path, rows, append: bool = False) -> None:
    """Write sweep rows as CSV; append mode reuses an existing header."""
    header = ",".join(CSV_COLUMNS)
    mode = "a" if append and os.path.exists(path) and os.path.getsize(path) > 0 else "w"
    if mode == "a":
        with open(path) as fh:
            first = fh.readline().strip()
        if first != header:
            raise ValueError(f"{path}: existing header does not match; refusing to append")
    with open(path, mode) as fh:
        if mode == "w":
            fh.write(header + "\n")
        for r in rows:
            fh.write(_row_record(r) + "\n")


def run_sweep(scenarios, out_path=None, workers: int = 1, append: bool = False) -> list[SweepRow]:
    """Run scenarios in order, optionally writing the concatenated CSV."""
    rows: list[SweepRow] = []
    for s in scenarios:
        rows.extend(run_scenario(s, workers=workers))
    if out_path is not None:
        write_rows(out_path, rows, append=append)
    return rows


@dataclass(frozen=True)
class PsdReport:
    """Band-averaged PSD comparison against the model's target spectrum.

    freq_hz are log-spaced band centers over the measurable range; in_band
    marks the centers used for the pass/fail verdict (max |err| <= tol_db).
    """

    kind: str
    passed: bool
    tol_db: float
    max_abs_err_db: float
    freq_hz: np.ndarray
    est_db: np.ndarray
    target_db: np.ndarray
    in_band: np.ndarray
    n_samples: int


def _log_band_average(
    f: np.ndarray, pxx: np.ndarray, lo: float, hi: float, per_decade: int = 12, min_bins: int = 6
):
    """Average a PSD estimate over log-spaced bands; returns (centers, means).

    Bands with fewer than min_bins Welch bins are merged into their neighbor so
    the per-band scatter stays well below the comparison tolerance.
    """
    if hi <= lo:
        raise ValueError("empty averaging range")
    n_bands = max(1, int(math.ceil(math.log10(hi / lo) * per_decade)))
    edges = np.logspace(math.log10(lo), math.log10(hi), n_bands + 1)
    centers, means = [], []
    take: list[int] = []
    band_lo = edges[0]
    for a, b in zip(edges[:-1], edges[1:]):
        take.extend(np.nonzero((f >= a) & (f < b))[0])
        if len(take) >= min_bins or b == edges[-1]:
            if take:
                centers.append(math.sqrt(band_lo * b))
                means.append(float(np.mean(pxx[take])))
            take = []
            band_lo = b
    return np.asarray(centers), np.asarray(means)


def psd_check(
    model,
    samples: int = 2**20,
    out_path=None,
    rs: RandomSource | int | None = None,
    nperseg: int = 2**16,
    tol_db: float = 3.0,
) -> PsdReport:
    """Verify a generated phase path against its target PSD.

    Wiener targets the Lorentzian of the implied linewidth, estimated from the
    increment process (Welch of increments divided by the random-walk transfer
    4 sin^2(pi f T_s)); stationary targets the mask.  Estimates are one-sided
    Welch halved to the two-sided convention, then averaged in log-spaced bands
    to tame per-bin scatter.  The verdict uses only bands inside the region the
    generator can physically render (above the Lorentzian knee, above the FIR
    resolution limit).
    """
    if rs is None:
        rs = RandomSource(20260815, 0, (97,))
    elif isinstance(rs, int):
        rs = RandomSource(rs, 0, (97,))

    if isinstance(model, WienerModel):
        if samples < 65536:
            raise ValueError(f"insufficient samples: need >= 65536, got {samples}")
        fs = 1.0 / model.ts
        beta = beta_from_sigma2(model.sigma2_delta, model.ts)
        if beta <= 0:
            raise ValueError("sigma2_delta must be > 0 for a PSD check")
        path = wiener_path(model, samples, rs)
        seg = min(nperseg, samples // 4)
        f, pxx = welch(np.diff(path), fs=fs, nperseg=seg, detrend="constant")
        f, pxx = f[1:], pxx[1:]
        s_theta = (pxx / 2.0) / (4.0 * np.sin(np.pi * f / fs) ** 2)
        lo = max(10.0 * beta, 4.0 * fs / seg)
        hi = 0.15 * fs
        fc, est = _log_band_average(f, s_theta, lo, hi)
        est_db = 10.0 * np.log10(est)
        target_db = lorentzian_level(beta, fc)
        in_band = np.ones(fc.shape, dtype=bool)
        kind = "wiener"
    elif isinstance(model, StationaryModel):
        if samples < 16 * model.filter_len:
            raise ValueError(
                f"insufficient samples: need >= 16 filter lengths = {16 * model.filter_len}, got {samples}"
            )
        fs = model.f_sample
        taps = design_mask_filter(model)
        path = stationary_path(model, taps, samples, rs) - model.theta_const
        seg = min(nperseg, samples // 4)
        f, pxx = welch(path, fs=fs, nperseg=seg, detrend="constant")
        f, pxx = f[1:], pxx[1:] / 2.0
        # 2x the FIR resolution limit: below that, window smearing of the
        # realized response dominates and the mask is not renderable anyway
        lo = max(2.0 * fs / model.filter_len, 4.0 * fs / seg)
        hi = 0.45 * fs
        fc, est = _log_band_average(f, pxx, lo, hi)
        est_db = 10.0 * np.log10(est)
        target_db = mask_level_db(model.mask, fc)
        f1, flast = model.mask[0][0], model.mask[-1][0]
        in_band = (fc >= max(f1, lo) / 1.15) & (fc <= min(flast, hi) * 1.15)
        if not np.any(in_band):
            in_band = np.isclose(fc, np.clip(f1, lo, hi), rtol=0.25)
        kind = "stationary"
    else:
        raise TypeError(f"unsupported model {type(model).__name__}")

    err = np.abs(est_db - target_db)
    max_err = float(err[in_band].max()) if np.any(in_band) else math.inf
    report = PsdReport(kind, bool(max_err <= tol_db), tol_db, max_err, fc, est_db, target_db, in_band, samples)
    if out_path is not None:
        with open(out_path, "w") as fh:
            fh.write("freq_hz,est_db,target_db,in_band\n")
            for i in range(len(fc)):
                fh.write(f"{fc[i]:.10g},{est_db[i]:.10g},{target_db[i]:.10g},{int(in_band[i])}\n")
    return report
