"""Curated single-photon detector presets.

Numbers are representative figures for each detector family, stored with the
family's documented efficiency bound and usable wavelength interval so that
simulations start from defensible parameters. Presets are immutable and
validated against their family bounds at load time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .photostats import DetectorSpec

__all__ = [
    "DetectorPreset",
    "FAMILY_EFFICIENCY_CAPS",
    "load_preset",
    "available_presets",
    "validate_for_wavelength",
]

# Hard per-family efficiency caps used to validate presets and overrides.
FAMILY_EFFICIENCY_CAPS = {
    "PMT": 0.40,
    "SPAD_Si": 0.85,
    "SPAD_InGaAs": 0.45,
    "SSPD": 0.90,
    "UCSPD": 0.60,
    "TES": 0.99,
}


@dataclass(frozen=True)
class DetectorPreset:
    family: str
    variant: str
    spec: DetectorSpec
    wavelength_range_nm: tuple[float, float]
    efficiency_range: tuple[float, float]
    efficiency_kind: str  # "device" or "system"
    representative: bool
    note: str
    version: int

    def __post_init__(self):
        if self.family not in FAMILY_EFFICIENCY_CAPS:
            raise ValueError(f"unknown detector family {self.family!r}")
        lo, hi = self.wavelength_range_nm
        if not lo < hi:
            raise ValueError("wavelength interval must be non-empty")
        cap = FAMILY_EFFICIENCY_CAPS[self.family]
        if self.spec.efficiency > cap + 1e-12:
            raise ValueError(
                f"{self.family} efficiency {self.spec.efficiency} exceeds the "
                f"family bound {cap}"
            )
        elo, ehi = self.efficiency_range
        if not 0 <= elo <= ehi <= cap + 1e-12:
            raise ValueError(f"efficiency range {self.efficiency_range} violates family bound {cap}")
        if self.efficiency_kind not in ("device", "system"):
            raise ValueError("efficiency kind must be 'device' or 'system'")


def _preset_from_dict(obj: dict, version: int) -> DetectorPreset:
    return DetectorPreset(
        family=obj["family"],
        variant=obj["variant"],
        spec=DetectorSpec(
            efficiency=obj["efficiency"],
            dark_rate_hz=obj["dark_rate_hz"],
            jitter_fwhm_ps=obj["jitter_fwhm_ps"],
            dead_time_ns=obj["dead_time_ns"],
        ),
        wavelength_range_nm=tuple(obj["wavelength_range_nm"]),
        efficiency_range=tuple(obj["efficiency_range"]),
        efficiency_kind=obj["efficiency_kind"],
        representative=obj.get("representative", True),
        note=obj.get("note", ""),
        version=version,
    )


def _load_catalog(path=None) -> dict[tuple[str, str], DetectorPreset]:
    if path is None:
        text = resources.files("photonlab.data").joinpath("detector_presets.json").read_text()
    else:
        text = Path(path).read_text()
    data = json.loads(text)
    version = int(data["version"])
    catalog = {}
    for obj in data["presets"]:
        preset = _preset_from_dict(obj, version)
        catalog[(preset.family, preset.variant)] = preset
    return catalog


def available_presets(path=None) -> list[tuple[str, str]]:
    """(family, variant) pairs available in the catalog."""
    return sorted(_load_catalog(path).keys())


def load_preset(family: str, variant: str = "default", path=None) -> DetectorPreset:
    """Load an immutable detector preset; overrides may come from ``path``."""
    catalog = _load_catalog(path)
    key = (family, variant)
    if key not in catalog:
        raise KeyError(f"no preset {family}/{variant}; available: {sorted(catalog)}")
    return catalog[key]


def validate_for_wavelength(preset: DetectorPreset, wavelength_nm: float) -> tuple[bool, str]:
    """Whether the preset covers a wavelength (closed interval), with a diagnostic."""
    lo, hi = preset.wavelength_range_nm
    if lo <= wavelength_nm <= hi:
        return True, (
            f"{preset.family}/{preset.variant} covers {wavelength_nm:g} nm "
            f"(range {lo:g}-{hi:g} nm)"
        )
    return False, (
        f"{preset.family}/{preset.variant} does not cover {wavelength_nm:g} nm: "
        f"usable range is {lo:g}-{hi:g} nm"
    )
