"""Monte Carlo time-tag simulation of a pulsed pair source with lossy
detectors, plus the analysis chain: coincidence histogramming, Gaussian peak
fitting, SNR, herald-triggered g2(0), and absolute detector calibration from
pair correlations.

Timestamps are integer picoseconds throughout. Simulations are deterministic
per seed: pulses are processed in fixed-size blocks, each drawing from an
independently derived child seed stream, so results never depend on how the
blocks are executed.
"""

from __future__ import annotations

import csv
import json
import math
import warnings
from dataclasses import dataclass, asdict, field

import numpy as np

from .peakfit import GaussianFit, fit_peak, gaussian_peak, initial_guess

__all__ = [
    "DetectorSpec",
    "PulseTrainSpec",
    "TimeTagStream",
    "CoincidenceHistogram",
    "GaussianFit",
    "simulate_streams",
    "build_histogram",
    "fit_gaussian",
    "snr",
    "SNR_SHAPE_CONSTANT",
    "heralded_g2",
    "simulate_heralded_counts",
    "simulate_independent_counts",
    "klyshko_calibrate",
    "simulate_pair_thinning",
    "predict_peak_areas",
    "write_stream_csv",
    "read_stream_csv",
    "write_stream_npz",
    "read_stream_npz",
    "histogram_to_json",
    "histogram_from_json",
    "fit_to_json",
    "fit_from_json",
]

_PS_PER_NS = 1_000
_BLOCK_PULSES = 65_536


@dataclass(frozen=True)
class DetectorSpec:
    """Parametric single-photon detector."""

    efficiency: float
    dark_rate_hz: float = 0.0
    jitter_fwhm_ps: float = 0.0
    dead_time_ns: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in [0, 1], got {self.efficiency}")
        if self.dark_rate_hz < 0:
            raise ValueError("dark rate must be non-negative")
        if self.jitter_fwhm_ps < 0:
            raise ValueError("timing jitter must be non-negative")
        if self.dead_time_ns < 0:
            raise ValueError("dead time must be non-negative")


@dataclass(frozen=True)
class PulseTrainSpec:
    """Pulsed pump: period, mean pairs per pulse, and pulse count."""

    mean_pairs_per_pulse: float
    n_pulses: int
    period_ns: float = 12.5

    def __post_init__(self):
        if self.mean_pairs_per_pulse < 0:
            raise ValueError("mean pairs per pulse must be non-negative")
        if self.mean_pairs_per_pulse >= 1:
            warnings.warn(
                "mean pairs per pulse >= 1: multi-pair emission will dominate",
                stacklevel=3,
            )
        if self.n_pulses < 1:
            raise ValueError("pulse count must be positive")
        if not self.period_ns > 0:
            raise ValueError("pulse period must be positive")

    @property
    def period_ps(self) -> int:
        return int(round(self.period_ns * _PS_PER_NS))

    @property
    def duration_ps(self) -> int:
        return self.n_pulses * self.period_ps


@dataclass(frozen=True)
class TimeTagStream:
    """Sorted integer-picosecond time tags on one detector channel."""

    channel: str
    timestamps: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.int64)
        object.__setattr__(self, "timestamps", ts)
        if ts.size > 1 and np.any(np.diff(ts) <= 0):
            raise ValueError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return int(self.timestamps.size)


@dataclass(frozen=True)
class CoincidenceHistogram:
    """Binned counts of pairwise arrival-time differences."""

    bin_width_ps: int
    t_min_ps: int
    t_max_ps: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        expected = (self.t_max_ps - self.t_min_ps) // self.bin_width_ps
        if counts.size != expected:
            raise ValueError(
                f"counts length {counts.size} inconsistent with range/bin width ({expected})"
            )

    @property
    def bin_centers(self) -> np.ndarray:
        edges = self.t_min_ps + self.bin_width_ps * np.arange(self.counts.size + 1)
        return (edges[:-1] + edges[1:]) / 2.0

    def total(self) -> int:
        return int(self.counts.sum())


def _fwhm_to_std(fwhm: float) -> float:
    return fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))


def _dead_time_prune(times: np.ndarray, dead_ps: int) -> np.ndarray:
    if dead_ps <= 0 or times.size == 0:
        return times
    keep = np.empty(times.size, dtype=bool)
    last = -(1 << 62)
    for i, t in enumerate(times):
        if t - last >= dead_ps:
            keep[i] = True
            last = t
        else:
            keep[i] = False
    return times[keep]


def simulate_streams(
    pulses: PulseTrainSpec,
    arm_transmissions: tuple[float, float],
    detectors: tuple[DetectorSpec, DetectorSpec],
    seed: int,
    poisson_pairs: bool = True,
) -> tuple[TimeTagStream, TimeTagStream]:
    """Simulate detector time tags for both arms of a pulsed pair source.

    Per pulse the pair count is Poisson (or exactly round(mu) pairs when
    ``poisson_pairs`` is False, a debug mode). Each photon independently
    survives its arm transmission times detector efficiency; detection times
    get per-detector Gaussian jitter. Dark counts arrive as a homogeneous
    Poisson process, and dead-time pruning runs per channel at the end.
    """
    for tr in arm_transmissions:
        if not 0.0 <= tr <= 1.0:
            raise ValueError(f"arm transmission must be in [0, 1], got {tr}")
    mu = pulses.mean_pairs_per_pulse
    period = pulses.period_ps
    p_det = [arm_transmissions[k] * detectors[k].efficiency for k in (0, 1)]
    sigma = [_fwhm_to_std(detectors[k].jitter_fwhm_ps) for k in (0, 1)]
    dark_per_ps = [detectors[k].dark_rate_hz * 1e-12 for k in (0, 1)]

    n_blocks = (pulses.n_pulses + _BLOCK_PULSES - 1) // _BLOCK_PULSES
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    parts: tuple[list, list] = ([], [])
    fixed_pairs = int(round(mu))
    for blk, child in enumerate(children):
        rng = np.random.default_rng(child)
        start = blk * _BLOCK_PULSES
        stop = min(start + _BLOCK_PULSES, pulses.n_pulses)
        n_p = stop - start
        if poisson_pairs:
            n_pairs = rng.poisson(mu, n_p)
        else:
            n_pairs = np.full(n_p, fixed_pairs, dtype=np.int64)
        pulse_times = (np.int64(start) + np.arange(n_p, dtype=np.int64)) * period
        emission = np.repeat(pulse_times, n_pairs)
        for k in (0, 1):
            detected = emission[rng.random(emission.size) < p_det[k]]
            if sigma[k] > 0 and detected.size:
                detected = detected + np.rint(
                    rng.normal(0.0, sigma[k], detected.size)
                ).astype(np.int64)
            t0 = start * period
            t1 = stop * period
            n_dark = rng.poisson(dark_per_ps[k] * (t1 - t0))
            if n_dark:
                darks = rng.integers(t0, t1, n_dark, dtype=np.int64)
                detected = np.concatenate([detected, darks])
            parts[k].append(detected)

    streams = []
    for k in (0, 1):
        tags = np.concatenate(parts[k]) if parts[k] else np.empty(0, dtype=np.int64)
        tags = np.unique(tags)  # sorts; same-ps collisions are one click anyway
        tags = _dead_time_prune(tags, int(round(detectors[k].dead_time_ns * _PS_PER_NS)))
        streams.append(TimeTagStream(channel=f"ch{k + 1}", timestamps=tags))
    return streams[0], streams[1]


def build_histogram(
    a: TimeTagStream,
    b: TimeTagStream,
    bin_width_ps: int,
    window_ps: int,
) -> CoincidenceHistogram:
    """Histogram of all pairwise differences t_b - t_a within the window.

    Two-pointer sweep over the sorted streams, linear in stream length plus
    the number of in-window pairs. Bins are aligned on multiples of the bin
    width around zero and cover [-window, +window] rounded up to bin edges.
    """
    if bin_width_ps <= 0:
        raise ValueError("bin width must be positive")
    if window_ps <= 0:
        raise ValueError("window must be positive")
    half_bins = (window_ps + bin_width_ps - 1) // bin_width_ps
    t_min = -half_bins * bin_width_ps
    t_max = half_bins * bin_width_ps
    counts = np.zeros(2 * half_bins, dtype=np.int64)

    ta = a.timestamps
    tb = b.timestamps
    lo = 0
    for t in ta:
        while lo < tb.size and tb[lo] < t + t_min:
            lo += 1
        j = lo
        while j < tb.size and tb[j] < t + t_max:
            counts[(tb[j] - t - t_min) // bin_width_ps] += 1
            j += 1
    return CoincidenceHistogram(
        bin_width_ps=bin_width_ps, t_min_ps=t_min, t_max_ps=t_max, counts=counts
    )


def fit_gaussian(hist: CoincidenceHistogram, init: GaussianFit | None = None) -> GaussianFit:
    """Least-squares Gaussian peak fit to a coincidence histogram."""
    if hist.counts.size == 0:
        raise ValueError("histogram is empty")
    return fit_peak(hist.bin_centers, hist.counts.astype(float), init=init)


# Shape factor of the FWHM Gaussian relative to a flat background:
# sqrt(pi/(16*ln2)) * erf(2*sqrt(ln2)).
SNR_SHAPE_CONSTANT = math.sqrt(math.pi / (16.0 * math.log(2.0))) * math.erf(
    2.0 * math.sqrt(math.log(2.0))
)


def snr(fit: GaussianFit) -> float:
    """Signal-to-noise ratio of a fitted peak, ~0.5224 * a/b."""
    if fit.b <= 0:
        raise ValueError("background must be positive for a finite SNR")
    if fit.a < 0:
        raise ValueError("signal amplitude must be non-negative")
    return (fit.a / fit.b) * SNR_SHAPE_CONSTANT


def heralded_g2(counts: dict) -> float:
    """Zero-delay g2 from herald-triggered beamsplitter counts.

    ``counts`` holds N_A heralds, N_AB and N_AC double coincidences with the
    two splitter outputs, and N_ABC triples: g2 = N_ABC*N_A / (N_AB*N_AC).
    """
    n_a = counts["N_A"]
    n_ab = counts["N_AB"]
    n_ac = counts["N_AC"]
    n_abc = counts["N_ABC"]
    if min(n_a, n_ab, n_ac, n_abc) < 0:
        raise ValueError("counts must be non-negative")
    if n_ab == 0 or n_ac == 0:
        raise ValueError("double-coincidence counts must be positive")
    return (n_abc * n_a) / (n_ab * n_ac)


def simulate_heralded_counts(
    n_pulses: int,
    mean_pairs_per_pulse: float,
    eta_herald: float,
    eta_idler: float,
    seed: int,
    splitter: float = 0.5,
    max_pairs: int | None = None,
) -> dict:
    """Herald-triggered beamsplitter measurement on a pulsed pair source.

    The herald arm sees one photon per pair with efficiency ``eta_herald``;
    the partner photons pass efficiency ``eta_idler`` and a beamsplitter
    with transmission ``splitter`` into outputs B and C. ``max_pairs`` clamps
    the per-pulse pair number (1 models an ideal single-pair source).
    """
    rng = np.random.default_rng(seed)
    n = rng.poisson(mean_pairs_per_pulse, n_pulses)
    if max_pairs is not None:
        n = np.minimum(n, max_pairs)
    heralds = rng.binomial(n, eta_herald) > 0
    detected = rng.binomial(n, eta_idler)
    to_b = rng.binomial(detected, splitter)
    to_c = detected - to_b
    b = to_b > 0
    c = to_c > 0
    return {
        "N_A": int(np.count_nonzero(heralds)),
        "N_AB": int(np.count_nonzero(heralds & b)),
        "N_AC": int(np.count_nonzero(heralds & c)),
        "N_ABC": int(np.count_nonzero(heralds & b & c)),
    }


def simulate_independent_counts(
    n_pulses: int,
    p_herald: float,
    p_b: float,
    p_c: float,
    seed: int,
) -> dict:
    """Statistically independent click channels (Poisson-light reference)."""
    rng = np.random.default_rng(seed)
    a = rng.random(n_pulses) < p_herald
    b = rng.random(n_pulses) < p_b
    c = rng.random(n_pulses) < p_c
    return {
        "N_A": int(np.count_nonzero(a)),
        "N_AB": int(np.count_nonzero(a & b)),
        "N_AC": int(np.count_nonzero(a & c)),
        "N_ABC": int(np.count_nonzero(a & b & c)),
    }


def klyshko_calibrate(n_s: int, n_i: int, n_c: int) -> tuple[float, float]:
    """Absolute system detection efficiencies from pair correlations.

    eta_s = N_c/N_i and eta_i = N_c/N_s; the unknown emitted pair number
    cancels, so neither estimate needs the opposite arm's efficiency.
    """
    if n_s <= 0 or n_i <= 0:
        raise ValueError("singles counts must be positive")
    if n_c < 0 or n_c > min(n_s, n_i):
        raise ValueError("coincidences must satisfy 0 <= N_c <= min(N_s, N_i)")
    return n_c / n_i, n_c / n_s


def simulate_pair_thinning(
    n_pairs: int, eta_s: float, eta_i: float, seed: int
) -> tuple[int, int, int]:
    """Binomial thinning of emitted pairs into (N_s, N_i, N_c)."""
    rng = np.random.default_rng(seed)
    s = rng.random(n_pairs) < eta_s
    i = rng.random(n_pairs) < eta_i
    return int(np.count_nonzero(s)), int(np.count_nonzero(i)), int(np.count_nonzero(s & i))


def predict_peak_areas(pulses: PulseTrainSpec, eta_pair: tuple[float, float]) -> dict:
    """First-order areas of the proper peak and one accidental side peak.

    Proper coincidences need both photons of one pair; an accidental side
    peak pairs detections from neighbouring pulses, so its area carries an
    extra factor of mu. Valid for small mu (<= 0.2).
    """
    mu = pulses.mean_pairs_per_pulse
    if mu > 0.2:
        raise ValueError("first-order peak-area model requires mu <= 0.2")
    e1, e2 = eta_pair
    n = pulses.n_pulses
    proper = n * mu * e1 * e2
    accidental = n * (mu * e1) * (mu * e2)
    return {"proper": proper, "accidental": accidental}


# ---------------------------------------------------------------------------
# stream / histogram / fit serialization


def write_stream_csv(path, stream: TimeTagStream) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["channel", "t_ps"])
        for t in stream.timestamps:
            writer.writerow([stream.channel, int(t)])


def read_stream_csv(path) -> TimeTagStream:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["channel", "t_ps"]:
            raise ValueError(f"unexpected stream CSV header: {header}")
        channel = None
        times = []
        for row in reader:
            channel = row[0]
            times.append(int(row[1]))
    return TimeTagStream(channel=channel or "ch", timestamps=np.array(times, dtype=np.int64))


def write_stream_npz(path, stream: TimeTagStream) -> None:
    np.savez(path, channel=np.array(stream.channel), timestamps=stream.timestamps)


def read_stream_npz(path) -> TimeTagStream:
    data = np.load(path)
    return TimeTagStream(channel=str(data["channel"]), timestamps=data["timestamps"])


def histogram_to_json(hist: CoincidenceHistogram) -> dict:
    return {
        "bin_width_ps": hist.bin_width_ps,
        "t_min_ps": hist.t_min_ps,
        "t_max_ps": hist.t_max_ps,
        "counts": hist.counts.tolist(),
    }


def histogram_from_json(obj: dict) -> CoincidenceHistogram:
    return CoincidenceHistogram(
        bin_width_ps=obj["bin_width_ps"],
        t_min_ps=obj["t_min_ps"],
        t_max_ps=obj["t_max_ps"],
        counts=np.asarray(obj["counts"], dtype=np.int64),
    )


def fit_to_json(fit: GaussianFit) -> dict:
    return asdict(fit)


def fit_from_json(obj: dict) -> GaussianFit:
    return GaussianFit(**obj)
