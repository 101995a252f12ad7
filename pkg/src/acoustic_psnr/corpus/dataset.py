"""
Labeled Datasets
Desk-scale experiment datasets with session-disjoint train/valid/test splits,
persisted as WAV files plus a manifest CSV
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..dsp import AudioClip, read_wav, write_wav
from ..exceptions import DataError, UsageError
from ..mixing import MixSpec, mix_at_snr
from .synth import NOISE_KINDS, gen_call, gen_noise, random_call_spec, random_noise_spec

SPLITS: Tuple[str, ...] = ("train", "valid", "test")
MANIFEST_COLUMNS = ["path", "label", "session_id", "split", "generator_spec"]
POSITIVE_SNR_RANGE = (10.0, 30.0)


@dataclass(frozen=True)
class LabeledClip:
    """One clip with its label, recording session, split and provenance"""

    clip: AudioClip
    label: bool
    session_id: str
    split: str
    generator_spec: Dict[str, Any] = field(default_factory=dict, compare=False)


@dataclass
class LabeledDataset:
    """Labeled clips; a session never spans two splits"""

    clips: List[LabeledClip]

    def __post_init__(self):
        self.check_session_disjoint()

    def __len__(self) -> int:
        return len(self.clips)

    @property
    def labels(self) -> np.ndarray:
        return np.array([c.label for c in self.clips], dtype=bool)

    @property
    def audio(self) -> List[AudioClip]:
        return [c.clip for c in self.clips]

    def sessions(self, split: Optional[str] = None) -> List[str]:
        return sorted({c.session_id for c in self.clips if split is None or c.split == split})

    def by_split(self, split: str) -> "LabeledDataset":
        return LabeledDataset([c for c in self.clips if c.split == split])

    def positives(self) -> List[LabeledClip]:
        return [c for c in self.clips if c.label]

    def negatives(self) -> List[LabeledClip]:
        return [c for c in self.clips if not c.label]

    def extended(self, extra: Sequence[LabeledClip]) -> "LabeledDataset":
        return LabeledDataset(list(self.clips) + list(extra))

    def check_session_disjoint(self) -> None:
        owner: Dict[str, str] = {}
        for c in self.clips:
            split = owner.setdefault(c.session_id, c.split)
            if split != c.split:
                raise DataError(
                    f"Session '{c.session_id}' appears in both '{split}' and '{c.split}'",
                    detail={"session_id": c.session_id, "splits": sorted({split, c.split})},
                )

    def counts(self) -> pd.DataFrame:
        """Positive / negative counts per split"""
        frame = pd.DataFrame({"split": [c.split for c in self.clips], "label": self.labels})
        return (
            frame.groupby(["split", "label"]).size().unstack(fill_value=0).rename(
                columns={True: "positive", False: "negative"}
            )
        )


def build_experiment_datasets(
    n_pos: int,
    n_neg: int,
    sessions: int = 3,
    seed: int = 0,
    splits: Sequence[str] = SPLITS,
    noise_kinds: Sequence[str] = NOISE_KINDS,
    snr_range: Tuple[float, float] = POSITIVE_SNR_RANGE,
) -> LabeledDataset:
    """
    Synthetic positives (calls over noise at high SNR) and pure-noise negatives

    Clips are dealt to sessions round-robin and sessions to splits
    round-robin, so no session spans two splits.

    Args:
        n_pos: number of positive clips
        n_neg: number of negative clips
        sessions: number of recording sessions (>= number of splits)
        seed: master seed
        splits: split names
        noise_kinds: noise families to cycle through
        snr_range: SNR window (dB) for the positives

    Returns:
        LabeledDataset
    """
    if n_pos < 1 or n_neg < 1:
        raise UsageError(f"Need at least one positive and one negative, got {n_pos} / {n_neg}")
    if sessions < len(splits):
        raise UsageError(f"{sessions} sessions cannot cover {len(splits)} splits")
    if snr_range[0] > snr_range[1]:
        raise UsageError(f"SNR range is reversed: {snr_range}")

    session_ids = [f"session{s:02d}" for s in range(sessions)]
    session_split = {sid: splits[s % len(splits)] for s, sid in enumerate(session_ids)}

    clips: List[LabeledClip] = []
    for index in range(n_pos + n_neg):
        positive = index < n_pos
        rng = np.random.default_rng([seed, int(positive), index])
        kind = noise_kinds[index % len(noise_kinds)]
        noise_spec = random_noise_spec(rng, kind, seed=int(rng.integers(2**31)))
        noise = gen_noise(noise_spec)
        spec: Dict[str, Any] = {"noise": noise_spec.model_dump()}
        if positive:
            call_spec = random_call_spec(rng, seed=int(rng.integers(2**31)))
            snr = float(rng.uniform(*snr_range))
            clip = mix_at_snr(gen_call(call_spec), noise, MixSpec(target_snr=snr)).clip
            spec.update(call=call_spec.model_dump(), snr=snr)
        else:
            clip = noise
        session_id = session_ids[index % sessions]
        clips.append(LabeledClip(clip, positive, session_id, session_split[session_id], spec))

    dataset = LabeledDataset(clips)
    logger.info(
        f"🗂️ Built dataset: {n_pos} positives, {n_neg} negatives over {sessions} sessions"
    )
    return dataset


def save_dataset(dataset: LabeledDataset, out_dir: Union[str, Path]) -> pd.DataFrame:
    """Write clips/<index>.wav and manifest.csv under out_dir"""
    out_dir = Path(out_dir)
    rows = []
    for i, item in enumerate(dataset.clips):
        rel = Path("clips") / f"{i:05d}.wav"
        write_wav(out_dir / rel, item.clip)
        rows.append(
            {
                "path": rel.as_posix(),
                "label": int(item.label),
                "session_id": item.session_id,
                "split": item.split,
                "generator_spec": json.dumps(item.generator_spec, sort_keys=True),
            }
        )
    manifest = pd.DataFrame(rows, columns=MANIFEST_COLUMNS)
    manifest.to_csv(out_dir / "manifest.csv", index=False)
    logger.info(f"💾 Saved {len(manifest)} clips to {out_dir}")
    return manifest


def load_dataset(manifest_path: Union[str, Path]) -> LabeledDataset:
    """Read a manifest CSV (or the directory holding manifest.csv)"""
    manifest_path = Path(manifest_path)
    if manifest_path.is_dir():
        manifest_path = manifest_path / "manifest.csv"
    if not manifest_path.exists():
        raise DataError(f"Manifest not found: {manifest_path}")

    manifest = pd.read_csv(manifest_path, dtype={"session_id": str, "split": str})
    missing = set(MANIFEST_COLUMNS) - set(manifest.columns)
    if missing:
        raise DataError(f"Manifest {manifest_path} lacks columns {sorted(missing)}")

    root = manifest_path.parent
    clips = [
        LabeledClip(
            clip=read_wav(root / row.path),
            label=bool(row.label),
            session_id=row.session_id,
            split=row.split,
            generator_spec=json.loads(row.generator_spec) if isinstance(row.generator_spec, str) else {},
        )
        for row in manifest.itertuples(index=False)
    ]
    logger.info(f"📂 Loaded {len(clips)} clips from {manifest_path}")
    return LabeledDataset(clips)
