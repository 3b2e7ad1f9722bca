"""Deterministic physics of SPDC pair generation.

Wavelength relations from energy conservation, (quasi-)phase matching for
periodically poled crystals, chi(2) tensor algebra for the effective
nonlinearity, and the pair-generation amplitude. All functions are pure;
refractive-index dispersion is deliberately out of scope, so every phase
mismatch ``delta_k`` enters as an input.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "WavelengthNm",
    "SpdcType",
    "CrystalSpec",
    "PolarizationTriple",
    "PairAmplitude",
    "idler_wavelength",
    "idler_uncertainty",
    "qpm_residual",
    "required_poling_period",
    "fourier_coefficient",
    "pair_amplitude",
    "reduce_tensor",
    "expand_tensor",
    "effective_nonlinearity",
    "conversion_efficiency",
    "spdc_polarizations",
    "tuning_curve",
    "write_tuning_curve_csv",
    "load_crystal_file",
    "builtin_crystals",
]


@dataclass(frozen=True)
class WavelengthNm:
    """A wavelength in nanometers with an optional 1-sigma uncertainty."""

    value: float
    uncertainty: float = 0.0

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"wavelength must be positive, got {self.value}")
        if self.uncertainty < 0:
            raise ValueError(f"uncertainty must be non-negative, got {self.uncertainty}")


def _as_wavelength(x) -> WavelengthNm:
    if isinstance(x, WavelengthNm):
        return x
    return WavelengthNm(float(x))


class SpdcType(str, Enum):
    TYPE0 = "Type0"
    TYPE1 = "TypeI"
    TYPE2 = "TypeII"


@dataclass(frozen=True)
class PolarizationTriple:
    pump: str
    signal: str
    idler: str

    def __post_init__(self):
        for pol in (self.pump, self.signal, self.idler):
            if pol not in ("H", "V"):
                raise ValueError(f"polarization must be 'H' or 'V', got {pol!r}")


# Polarizations of (pump, signal, idler) for each process type and pump input.
_SPDC_POLARIZATIONS = {
    (SpdcType.TYPE0, "H"): PolarizationTriple("H", "H", "H"),
    (SpdcType.TYPE0, "V"): PolarizationTriple("V", "V", "V"),
    (SpdcType.TYPE1, "H"): PolarizationTriple("H", "V", "V"),
    (SpdcType.TYPE1, "V"): PolarizationTriple("V", "H", "H"),
    (SpdcType.TYPE2, "H"): PolarizationTriple("H", "H", "V"),
    (SpdcType.TYPE2, "V"): PolarizationTriple("V", "V", "H"),
}


@dataclass(frozen=True)
class CrystalSpec:
    """Periodically poled nonlinear crystal.

    ``d_contracted`` is the 3x6 contracted chi(2) matrix in pm/V. The poling
    period ``poling_period_um`` (Lambda), duty cycle D in (0, 1] and QPM
    order m describe the rectangular domain grating.
    """

    d_contracted: np.ndarray
    length_mm: float
    poling_period_um: float
    duty_cycle: float
    qpm_order: int
    spdc_type: SpdcType

    def __post_init__(self):
        d = np.asarray(self.d_contracted, dtype=float)
        if d.shape != (3, 6):
            raise ValueError(f"d_contracted must be 3x6, got shape {d.shape}")
        object.__setattr__(self, "d_contracted", d)
        if not self.length_mm > 0:
            raise ValueError("crystal length must be positive")
        if not self.poling_period_um > 0:
            raise ValueError("poling period must be positive")
        if not 0 < self.duty_cycle <= 1:
            raise ValueError(f"duty cycle must be in (0, 1], got {self.duty_cycle}")
        if int(self.qpm_order) != self.qpm_order or self.qpm_order < 1:
            raise ValueError(f"QPM order must be a positive integer, got {self.qpm_order}")
        object.__setattr__(self, "spdc_type", SpdcType(self.spdc_type))


@dataclass(frozen=True)
class PairAmplitude:
    """Unnormalized pair-generation amplitude and its overall scale constant."""

    value: float
    constant_c: float


def idler_wavelength(pump, signal) -> WavelengthNm:
    """Idler central wavelength from energy conservation.

    lambda_i = lambda_p * lambda_s / (lambda_s - lambda_p). Requires the
    signal to be redder than the pump; the degenerate limit lambda_s ->
    lambda_p is rejected rather than returning infinity.
    """
    p, s = _as_wavelength(pump), _as_wavelength(signal)
    if s.value <= p.value:
        raise ValueError(
            "non-physical input: signal wavelength must exceed the pump wavelength "
            f"(got pump={p.value} nm, signal={s.value} nm)"
        )
    return WavelengthNm(p.value * s.value / (s.value - p.value))


def idler_uncertainty(pump, signal) -> float:
    """Propagated 1-sigma uncertainty of the idler wavelength, in nm.

    First-order absolute-value propagation through the energy-conservation
    relation: |d lambda_i / d lambda_p| * dp + |d lambda_i / d lambda_s| * ds.
    """
    p, s = _as_wavelength(pump), _as_wavelength(signal)
    if s.value <= p.value:
        raise ValueError(
            "non-physical input: signal wavelength must exceed the pump wavelength "
            f"(got pump={p.value} nm, signal={s.value} nm)"
        )
    denom = (p.value - s.value) ** 2
    return (s.value**2 / denom) * p.uncertainty + (p.value**2 / denom) * s.uncertainty


def qpm_residual(delta_k_per_um: float, crystal: CrystalSpec) -> float:
    """Quasi-phase-matching residual delta_k - 2*pi*m/Lambda, in 1/um.

    Zero means the grating exactly compensates the phase mismatch.
    """
    return delta_k_per_um - 2.0 * math.pi * crystal.qpm_order / crystal.poling_period_um


def required_poling_period(delta_k_per_um: float, m: int) -> float:
    """Poling period Lambda = 2*pi*m/delta_k that zeroes the QPM residual."""
    if int(m) != m or m < 1:
        raise ValueError(f"QPM order must be a positive integer, got {m}")
    if delta_k_per_um <= 0:
        raise ValueError(
            "delta_k must be positive: a non-positive mismatch needs no finite poling period"
        )
    return 2.0 * math.pi * m / delta_k_per_um


def fourier_coefficient(m: int, duty_cycle: float) -> float:
    """Grating Fourier coefficient G_m = 2/(pi*m) * sin(pi*m*D)."""
    if int(m) != m or m < 1:
        raise ValueError(f"order must be a positive integer, got {m}")
    if not 0 < duty_cycle <= 1:
        raise ValueError(f"duty cycle must be in (0, 1], got {duty_cycle}")
    return 2.0 / (math.pi * m) * math.sin(math.pi * m * duty_cycle)


def _sinc(x: float) -> float:
    # sin(x)/x with the removable singularity at 0.
    if x == 0.0:
        return 1.0
    return math.sin(x) / x


def pair_amplitude(
    delta_k_per_mm: float,
    crystal: CrystalSpec,
    d_eff_pm_v: float,
    constant_c: float = 1.0,
) -> PairAmplitude:
    """Pair-generation amplitude C * d_eff * L * sinc(delta_k * L / 2).

    The phase accumulates over the full crystal length, so L appears inside
    the sinc argument; sinc(x) = sin(x)/x with sinc(0) = 1.
    """
    arg = 0.5 * delta_k_per_mm * crystal.length_mm
    value = constant_c * d_eff_pm_v * crystal.length_mm * _sinc(arg)
    return PairAmplitude(value=value, constant_c=constant_c)


# Contracted-index map: (beta, gamma) -> zeta, for the symmetric index pairs.
_CONTRACTION = {
    (0, 0): 0,
    (1, 1): 1,
    (2, 2): 2,
    (1, 2): 3,
    (2, 1): 3,
    (0, 2): 4,
    (2, 0): 4,
    (0, 1): 5,
    (1, 0): 5,
}


def reduce_tensor(chi2: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Contract a Kleinman-symmetric 3x3x3 chi(2) tensor to the 3x6 d matrix.

    Raises if the tensor is not symmetric in its last two indices, naming the
    first violating index pair (1-based, as conventionally printed).
    """
    chi = np.asarray(chi2, dtype=float)
    if chi.shape != (3, 3, 3):
        raise ValueError(f"chi(2) tensor must be 3x3x3, got shape {chi.shape}")
    for a in range(3):
        for b in range(3):
            for g in range(b + 1, 3):
                if abs(chi[a, b, g] - chi[a, g, b]) > tol:
                    raise ValueError(
                        "tensor is not symmetric in its last two indices: "
                        f"element ({a + 1},{b + 1},{g + 1}) != ({a + 1},{g + 1},{b + 1})"
                    )
    d = np.zeros((3, 6))
    for a in range(3):
        d[a, 0] = chi[a, 0, 0]
        d[a, 1] = chi[a, 1, 1]
        d[a, 2] = chi[a, 2, 2]
        d[a, 3] = chi[a, 1, 2]
        d[a, 4] = chi[a, 0, 2]
        d[a, 5] = chi[a, 0, 1]
    return d


def expand_tensor(d: np.ndarray) -> np.ndarray:
    """Expand a 3x6 contracted d matrix back to the full symmetric 3x3x3 tensor."""
    dm = np.asarray(d, dtype=float)
    if dm.shape != (3, 6):
        raise ValueError(f"d matrix must be 3x6, got shape {dm.shape}")
    chi = np.zeros((3, 3, 3))
    for (b, g), z in _CONTRACTION.items():
        for a in range(3):
            chi[a, b, g] = dm[a, z]
    return chi


def _unit(vec, name: str, tol: float = 1e-9) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector, got shape {v.shape}")
    if abs(np.linalg.norm(v) - 1.0) > tol:
        raise ValueError(f"{name} must be unit-norm (|v|={np.linalg.norm(v):.12f})")
    return v


def effective_nonlinearity(d, pump_dir, signal_dir, idler_dir) -> float:
    """Effective nonlinearity d_eff = p . d . f(s, i), in pm/V.

    f is the contracted quadratic form of the signal/idler unit polarization
    vectors: (sx*ix, sy*iy, sz*iz, sy*iz+sz*iy, sx*iz+sz*ix, sx*iy+sy*ix).
    Equals the full 27-term contraction of the expanded symmetric tensor.
    """
    dm = np.asarray(d, dtype=float)
    if dm.shape != (3, 6):
        raise ValueError(f"d matrix must be 3x6, got shape {dm.shape}")
    p = _unit(pump_dir, "pump_dir")
    s = _unit(signal_dir, "signal_dir")
    i = _unit(idler_dir, "idler_dir")
    f = np.array(
        [
            s[0] * i[0],
            s[1] * i[1],
            s[2] * i[2],
            s[1] * i[2] + s[2] * i[1],
            s[0] * i[2] + s[2] * i[0],
            s[0] * i[1] + s[1] * i[0],
        ]
    )
    return float(p @ dm @ f)


def conversion_efficiency(n_pairs: int, n_pump: int) -> float:
    """SPDC conversion efficiency: generated pairs per pump photon."""
    if n_pump <= 0:
        raise ValueError("pump photon number must be positive")
    if n_pairs < 0:
        raise ValueError("pair number must be non-negative")
    return n_pairs / n_pump


def spdc_polarizations(spdc_type, pump: str) -> PolarizationTriple:
    """Polarizations of (pump, signal, idler) for a process type and pump input."""
    key = (SpdcType(spdc_type), pump)
    if key not in _SPDC_POLARIZATIONS:
        raise ValueError(f"unknown combination {spdc_type!r}, pump={pump!r}")
    return _SPDC_POLARIZATIONS[key]


def tuning_curve(pump, signals: Iterable) -> list[tuple[float, float, float, float]]:
    """Rows (lambda_p, lambda_s, lambda_i, d_lambda_i), all in nm."""
    p = _as_wavelength(pump)
    rows = []
    for s in signals:
        sw = _as_wavelength(s)
        li = idler_wavelength(p, sw)
        dli = idler_uncertainty(p, sw)
        rows.append((p.value, sw.value, li.value, dli))
    return rows


def write_tuning_curve_csv(path, pump, signals: Iterable) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda_p_nm", "lambda_s_nm", "lambda_i_nm", "d_lambda_i_nm"])
        for row in tuning_curve(pump, signals):
            writer.writerow([f"{x:.6f}" for x in row])


def _crystal_from_dict(spec: dict) -> CrystalSpec:
    return CrystalSpec(
        d_contracted=np.asarray(spec["d_contracted"], dtype=float),
        length_mm=float(spec["length_mm"]),
        poling_period_um=float(spec["poling_period_um"]),
        duty_cycle=float(spec.get("duty_cycle", 0.5)),
        qpm_order=int(spec.get("qpm_order", 1)),
        spdc_type=SpdcType(spec["spdc_type"]),
    )


def load_crystal_file(path) -> dict[str, CrystalSpec]:
    """Load crystal presets from a JSON config file."""
    data = json.loads(Path(path).read_text())
    return {name: _crystal_from_dict(spec) for name, spec in data["crystals"].items()}


def builtin_crystals() -> dict[str, CrystalSpec]:
    """Crystal presets shipped with the package."""
    data = json.loads(resources.files("photonlab.data").joinpath("crystals.json").read_text())
    return {name: _crystal_from_dict(spec) for name, spec in data["crystals"].items()}
