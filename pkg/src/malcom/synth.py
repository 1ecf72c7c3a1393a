"""Planted-family corpus generator.

Stands in for a real malware corpus: each family has signature features
its members carry with high probability, all families share a pool of
common features, and every sample gets uniquely-named noise features
(maximal idf, mirroring app-specific strings).  Signature leakage across
families adds realistic confusion.  Fully deterministic for a fixed seed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, FeatureDictionaryEntry, Sample


class SynthError(ValueError):
    pass


@dataclass
class SynthConfig:
    num_families: int = 13
    samples_per_family: int = 50
    signature_features_per_family: int = 30
    common_features: int = 20
    noise_features_per_sample: int = 5
    signature_presence_prob: float = 0.9
    common_presence_prob: float = 0.8
    cross_family_leak_prob: float = 0.05
    rng_seed: int = 0

    def validate(self) -> None:
        counts = (
            self.num_families,
            self.samples_per_family,
            self.signature_features_per_family,
            self.common_features,
            self.noise_features_per_sample,
        )
        if any(c < 0 for c in counts):
            raise SynthError("all counts must be >= 0")
        if self.num_families == 0 and self.samples_per_family > 0:
            raise SynthError("cannot generate samples with zero families")
        probs = (
            self.signature_presence_prob,
            self.common_presence_prob,
            self.cross_family_leak_prob,
        )
        if any(not (0.0 <= p <= 1.0) for p in probs):
            raise SynthError("probabilities must be in [0, 1]")


def _family_label(f: int) -> str:
    return f"fam{f:02d}"


def _signature_names(cfg: SynthConfig, f: int) -> list[str]:
    return [
        f"api/sig{f:02d}_{i:02d}"
        for i in range(cfg.signature_features_per_family)
    ]


def _common_names(cfg: SynthConfig) -> list[str]:
    return [f"perm/common{i:02d}" for i in range(cfg.common_features)]


def generate(cfg: SynthConfig) -> Dataset:
    """Emit a labeled corpus plus a dictionary covering every feature
    (signatures and common features platform-defined, noise app-specific)."""
    cfg.validate()
    rng = np.random.default_rng(cfg.rng_seed)
    signatures = [_signature_names(cfg, f) for f in range(cfg.num_families)]
    common = _common_names(cfg)

    samples = []
    noise_names: list[str] = []
    idx = 0
    for f in range(cfg.num_families):
        for _ in range(cfg.samples_per_family):
            sid = f"s{idx:04d}"
            idx += 1
            features: dict[str, float] = {}
            # own signatures
            for name in signatures[f]:
                if rng.random() < cfg.signature_presence_prob:
                    features[name] = float(1 + rng.poisson(1.0))
            # leaked foreign signatures
            for g in range(cfg.num_families):
                if g == f:
                    continue
                for name in signatures[g]:
                    if rng.random() < cfg.cross_family_leak_prob:
                        features[name] = float(1 + rng.poisson(1.0))
            # shared features
            for name in common:
                if rng.random() < cfg.common_presence_prob:
                    features[name] = 1.0
            # per-sample unique noise
            for i in range(cfg.noise_features_per_sample):
                name = f"str/noise_{sid}_{i}"
                noise_names.append(name)
                features[name] = float(1 + rng.poisson(1.0))
            samples.append(
                Sample(id=sid, family=_family_label(f), features=features)
            )

    dictionary = []
    for fam_sigs in signatures:
        for name in fam_sigs:
            dictionary.append(
                FeatureDictionaryEntry(name, "FS3", "platform-defined", "numeric")
            )
    for name in common:
        dictionary.append(
            FeatureDictionaryEntry(name, "FS1", "platform-defined", "boolean")
        )
    for name in noise_names:
        dictionary.append(
            FeatureDictionaryEntry(name, "FS8", "app-specific", "numeric")
        )
    return Dataset(samples=samples, dictionary=dictionary)
