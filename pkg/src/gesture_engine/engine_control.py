"""Engine Control Class."""
import json
import logging
import logging.config
import os
from dataclasses import asdict, replace
from pathlib import Path
from typing import Any

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from gesture_engine.conditioning.audio_features import align_audio_to_frames, extract_audio_features, read_wav
from gesture_engine.conditioning.text_encoder import HashingTextEncoder, embed_text
from gesture_engine.dataset.normalization import fit_norm_stats
from gesture_engine.dataset.splits import assign_splits, filter_text_lengths
from gesture_engine.dataset.synthetic import make_synthetic_corpus
from gesture_engine.denoiser.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from gesture_engine.denoiser.model import GestureDenoiser, NetworkDenoiser
from gesture_engine.denoiser.training import TrainingResult, train
from gesture_engine.diffusion.schedule import NoiseSchedule, cosine_schedule
from gesture_engine.doubletake.composition import PromptScript, Segment, compose_long, segment_conditions
from gesture_engine.interfaces.interface_condition_bundle import ConditionBundle
from gesture_engine.interfaces.interface_dataset_entry import DatasetEntry
from gesture_engine.interfaces.interface_engine_parameter import EngineConfig, MotionConfig
from gesture_engine.interfaces.interface_feature_layout import FeatureLayout, FeatureSequence
from gesture_engine.interfaces.interface_motion_clip import MotionClip
from gesture_engine.interfaces.interface_skeleton import Skeleton
from gesture_engine.metrics.report import evaluate
from gesture_engine.motion_repr.bvh import parse_bvh, write_bvh
from gesture_engine.motion_repr.canonicalize import canonicalize, resample_clip
from gesture_engine.motion_repr.features import decode_features, encode_features
from gesture_engine.utilities.json_encoder import dumps, file_digest
from gesture_engine.utilities.load_config import apply_overrides, config_digest
from gesture_engine.utilities.plotting import plot_loss_curve
from gesture_engine.utilities.tensor_file import read_tensor, write_tensor

LOG_LEVELS = [
    logging.DEBUG,
    logging.INFO,
    logging.WARNING,
    logging.ERROR,
    logging.CRITICAL,
]

MANIFEST_NAME = "manifest.json"


def _write_json(path: Path, document: Any) -> None:
    with open(path, "w", encoding="utf-8") as file:
        file.write(dumps(document) + "\n")


def _read_json(path: Path) -> Any:
    with open(path, encoding="utf-8") as file:
        return json.load(file)


class EngineControl:
    """Engine control class.

    Orchestrates the pipeline behind every command: dataset preparation, training, generation of
    single clips and long compositions, and evaluation. Every output document embeds the digest of
    the effective configuration and the seed it was produced with.
    """

    def __init__(
        self,
        config: EngineConfig | None = None,
        console_log_level: int = logging.INFO,
        file_log_level: int = logging.DEBUG,
        log_file: str | os.PathLike | None = None,
    ):
        """Construct engine control class.

        Parameters
        ----------
        config, optional
            Engine configuration, by default the built-in defaults
        console_log_level, optional
            Logging level of the terminal output, by default INFO
        file_log_level, optional
            Logging level of the log file, by default DEBUG
        log_file, optional
            Path of a log file, by default None (terminal only)
        """
        self._setup_logging(console_level=console_log_level, file_level=file_log_level, log_file=log_file)
        self.log = logging.getLogger("Engine")
        self.config = config or EngineConfig()
        self.config_digest = config_digest(self.config)
        self.log.debug("Engine control started with config digest %s", self.config_digest)

    def _setup_logging(self, console_level: int, file_level: int, log_file: str | os.PathLike | None) -> None:
        # Check if log levels are valid
        if console_level not in LOG_LEVELS:
            raise ValueError("Invalid console log level")
        if file_level not in LOG_LEVELS:
            raise ValueError("Invalid file log level")

        # Reset logging configuration, module loggers stay enabled
        logging.config.dictConfig({"version": 1, "disable_existing_loggers": False})  # type: ignore[attr-defined]
        root = logging.getLogger("")
        for handler in list(root.handlers):
            root.removeHandler(handler)
        root.setLevel(min(console_level, file_level) if log_file else console_level)

        # Set up logging to file
        if log_file is not None:
            file_handler = logging.FileHandler(log_file, mode="a", encoding="utf-8")
            file_handler.setLevel(file_level)
            file_handler.setFormatter(
                logging.Formatter("%(asctime)s %(name)-9s: %(levelname)-8s >> %(message)s", datefmt="%d-%m-%Y, %H:%M")
            )
            root.addHandler(file_handler)

        # Define a Handler which writes messages to the sys.stderr
        console = logging.StreamHandler()
        console.setLevel(console_level)
        console.setFormatter(logging.Formatter("%(name)-9s: %(levelname)-8s >> %(message)s"))
        root.addHandler(console)

    @property
    def schedule(self) -> NoiseSchedule:
        """Noise schedule of the current configuration."""
        diffusion = self.config.diffusion
        return cosine_schedule(diffusion.num_steps, diffusion.cosine_offset, diffusion.alpha_floor)

    # Preprocessing

    def load_motion(self, path: str | os.PathLike, motion: MotionConfig | None = None) -> MotionClip:
        """Parse a BVH file, resample it to the configured frame rate and canonicalize it."""
        motion = motion or self.config.motion
        with open(path, "rb") as file:
            _, clip = parse_bvh(file.read(), motion.axis_map)
        if not np.isclose(clip.fps, motion.fps):
            self.log.warning("Resampling %s from %.2f to %.2f FPS", os.path.basename(path), clip.fps, motion.fps)
            clip = resample_clip(clip, motion.fps)
        return canonicalize(clip, motion.target_height)

    def _bvh_entries(self, bvh_dir: Path) -> tuple[Skeleton, list[DatasetEntry]]:
        """Encode every BVH file of a directory with its text and audio sidecars."""
        paths = sorted(bvh_dir.glob("*.bvh"))
        if len(paths) < 2:
            raise ValueError(f"{bvh_dir} contains {len(paths)} BVH files, at least 2 are required")
        skeleton: Skeleton | None = None
        encoder = HashingTextEncoder(self.config.denoiser.text_dim)
        entries = []
        for path in paths:
            clip = self.load_motion(path)
            if skeleton is None:
                skeleton = clip.skeleton
            elif clip.skeleton != skeleton:
                raise ValueError(f"{path.name} uses a different skeleton than {paths[0].name}")
            features = encode_features(clip.skeleton, clip, self.config.motion).data
            text_path, audio_path = path.with_suffix(".txt"), path.with_suffix(".wav")
            embedding = None
            if text_path.exists():
                embedding = embed_text(text_path.read_text(encoding="utf-8").strip(), encoder,
                                       self.config.dataset.max_text_tokens)
            audio = None
            if audio_path.exists():
                audio = align_audio_to_frames(extract_audio_features(read_wav(audio_path), self.config.audio),
                                              clip.num_frames)
            bundle = ConditionBundle.create(
                clip.num_frames, self.config.audio.dim, embedding, audio, self.config.denoiser.text_dim
            )
            entry = DatasetEntry(features, bundle, "bvh", clip.num_frames, path.stem)
            entries.append(replace(entry, source=f"bvh_{entry.modality}"))
        if skeleton is None:
            raise ValueError(f"No BVH files found in {bvh_dir}")
        return skeleton, entries

    def preprocess(
        self, out_dir: str | os.PathLike, bvh_dir: str | os.PathLike | None = None, seed: int = 0
    ) -> dict[str, Any]:
        """Encode a BVH directory or the synthetic corpus into feature tensors with a dataset manifest.

        Parameters
        ----------
        out_dir
            Output directory, created if missing
        bvh_dir, optional
            Directory of BVH files with optional ``.txt`` and ``.wav`` sidecars, by default None which
            generates the synthetic corpus
        seed, optional
            Seed of the synthetic corpus and of the split assignment, by default 0

        Returns
        -------
            Dataset manifest
        """
        rng = np.random.default_rng(seed)
        if bvh_dir is None:
            corpus = make_synthetic_corpus(self.config, rng)
            skeleton, motion, entries = corpus.skeleton, corpus.motion, corpus.entries
        else:
            skeleton, entries = self._bvh_entries(Path(bvh_dir))
            motion = self.config.motion
        dataset = self.config.dataset
        entries = filter_text_lengths(entries, dataset.min_text_frames, dataset.max_text_frames)
        splits = assign_splits([entry.name for entry in entries], dataset.split_ratios, rng)

        out = Path(out_dir)
        records = []
        tensors: dict[str, np.ndarray] = {}
        for entry in entries:
            record = {
                "name": entry.name,
                "source": entry.source,
                "modality": entry.modality,
                "split": splits[entry.name],
                "frames": entry.num_frames,
                "original_length": entry.original_length,
                "features": f"features/{entry.name}.ftkt",
                "text": f"text/{entry.name}.ftkt" if entry.bundle.has_text else None,
                "audio": f"audio/{entry.name}.ftkt" if entry.bundle.has_audio else None,
            }
            tensors[record["features"]] = entry.features
            if record["text"]:
                tensors[record["text"]] = entry.bundle.text_embedding
            if record["audio"]:
                tensors[record["audio"]] = entry.bundle.audio_features
            records.append(record)
        manifest = {
            "config": self.config.dict(),
            "config_digest": self.config_digest,
            "seed": seed,
            "skeleton": skeleton.dict(),
            "motion": motion.dict(),
            "entries": records,
        }

        for sub in ("features", "text", "audio"):
            (out / sub).mkdir(parents=True, exist_ok=True)
        for relative, array in tensors.items():
            write_tensor(out / relative, array)
        _write_json(out / MANIFEST_NAME, manifest)
        self.log.info("Wrote %d entries to %s", len(records), out)
        return manifest

    def load_dataset(self, data_dir: str | os.PathLike) -> tuple[dict[str, Any], list[DatasetEntry], list[str]]:
        """Read a preprocessed dataset.

        Returns
        -------
            Manifest, dataset entries and the split of every entry
        """
        root = Path(data_dir)
        manifest = _read_json(root / MANIFEST_NAME)
        audio_dim, text_dim = self.config.audio.dim, self.config.denoiser.text_dim
        entries, splits = [], []
        for record in manifest["entries"]:
            features = read_tensor(root / record["features"])
            text = read_tensor(root / record["text"]) if record["text"] else None
            audio = read_tensor(root / record["audio"]) if record["audio"] else None
            bundle = ConditionBundle.create(features.shape[0], audio_dim, text, audio, text_dim)
            entries.append(DatasetEntry(features, bundle, record["source"], record["original_length"], record["name"]))
            splits.append(record["split"])
        return manifest, entries, splits

    # Training

    def train(
        self, data_dir: str | os.PathLike, out_path: str | os.PathLike, seed: int = 0, plot: bool = False
    ) -> TrainingResult:
        """Fit normalization statistics on the training split, train the denoiser and write the checkpoint.

        Besides the checkpoint, the loss curve is written to ``<out>.loss.csv`` with the config digest and seed
        in every row and, if requested, plotted to ``<out>.loss.png``.

        Parameters
        ----------
        data_dir
            Directory written by ``preprocess``
        out_path
            Checkpoint path
        seed, optional
            Seed of network initialization and batch sampling, by default 0
        plot, optional
            Save a loss curve figure, by default False

        Returns
        -------
            Training result
        """
        manifest, entries, splits = self.load_dataset(data_dir)
        train_entries = [entry for entry, split in zip(entries, splits) if split == "train"]
        norm = fit_norm_stats(train_entries, self.config.dataset.std_floor)
        feature_dim = norm.mean.size
        if feature_dim != self.config.denoiser.feature_dim:
            raise ValueError(
                f"Dataset feature dimension {feature_dim} does not match denoiser.feature_dim "
                f"{self.config.denoiser.feature_dim}"
            )
        sources: dict[str, list[DatasetEntry]] = {}
        for entry in train_entries:
            sources.setdefault(entry.source, []).append(replace(entry, features=norm.apply(entry.features)))

        model = GestureDenoiser(self.config.denoiser, seed=seed)
        weights = self.config.dataset.source_weights or None
        result = train(model, sources, self.config.training, self.schedule, self.config.diffusion.num_frames,
                       np.random.default_rng(seed), weights)

        checkpoint = Checkpoint.from_model(
            model,
            self.config,
            Skeleton.from_dict(manifest["skeleton"]),
            norm,
            seed=seed,
            dataset_config_digest=manifest["config_digest"],
            sources=dict(zip(result.sources, result.weights)),
            steps=len(result.loss_curve),
            initial_loss=result.loss_curve[0] if result.loss_curve else None,
            final_loss=result.loss_curve[-1] if result.loss_curve else None,
        )
        out = Path(out_path)
        save_checkpoint(out, checkpoint)
        curve = pd.DataFrame({"step": np.arange(1, len(result.loss_curve) + 1), "loss": result.loss_curve})
        curve["config_digest"] = self.config_digest
        curve["seed"] = seed
        curve.to_csv(out.with_suffix(".loss.csv"), index=False)
        if plot:
            fig, _ = plot_loss_curve(result.loss_curve)
            fig.savefig(
                out.with_suffix(".loss.png"),
                metadata={"Description": f"config digest {self.config_digest}, seed {seed}"},
            )
            plt.close(fig)
        self.log.info("Checkpoint written to %s", out)
        return result

    # Generation

    def _generate(
        self, checkpoint: Checkpoint, script: PromptScript, base_dir: Path, seed: int
    ) -> tuple[bytes, dict[str, Any]]:
        """Compose a script with a trained model and return BVH bytes with the composition metadata."""
        config = checkpoint.config
        num_frames = config.diffusion.num_frames
        try:
            too_long = [k for k, segment in enumerate(script.segments) if segment.frames > num_frames]
            if too_long:
                raise ValueError(f"Segments {too_long} exceed the trained window of {num_frames} frames")
            script.check_lengths(config.handshake.handshake_size)
        except ValueError as err:
            self.log.exception(err, exc_info=True)
            raise err
        conditions = segment_conditions(script, config, base_dir)

        diffusion = config.diffusion
        schedule = cosine_schedule(diffusion.num_steps, diffusion.cosine_offset, diffusion.alpha_floor)
        denoiser = NetworkDenoiser(checkpoint.build_model())
        composition = compose_long(denoiser, conditions, config.handshake, schedule, np.random.default_rng(seed))

        features = checkpoint.norm_stats.invert(composition.features.data)
        layout = FeatureLayout.from_dim(features.shape[1])
        clip = decode_features(FeatureSequence(features, layout), checkpoint.skeleton, config.motion.fps)
        metadata = {
            "config_digest": config_digest(config),
            "seed": seed,
            "script": [asdict(segment) for segment in script.segments],
            **composition.metadata,
        }
        return write_bvh(checkpoint.skeleton, clip), metadata

    def load_model(self, model_path: str | os.PathLike, overrides: list[str] | None = None) -> Checkpoint:
        """Read a checkpoint and apply ``section.field=value`` overrides to its configuration."""
        checkpoint = load_checkpoint(model_path)
        if overrides:
            checkpoint = Checkpoint(
                apply_overrides(checkpoint.config, overrides),
                checkpoint.skeleton,
                checkpoint.norm_stats,
                checkpoint.parameters,
                checkpoint.metadata,
            )
        return checkpoint

    def sample(
        self,
        checkpoint: Checkpoint,
        out_path: str | os.PathLike,
        frames: int,
        text: str = "",
        audio: str | os.PathLike | None = None,
        gamma: float = 1.0,
        seed: int = 0,
    ) -> dict[str, Any]:
        """Generate a single clip and write it as BVH with a metadata document alongside.

        The clip is the composition of a one-segment script, so ``compose`` reproduces it byte by byte.
        """
        # Relative audio paths resolve against the working directory and are recorded as given
        audio_path = None if audio is None else os.fspath(audio)
        script = PromptScript((Segment(text, audio_path, frames, gamma),))
        return self._write_generation(checkpoint, script, Path("."), out_path, seed)

    def compose(
        self, checkpoint: Checkpoint, script_path: str | os.PathLike, out_path: str | os.PathLike, seed: int = 0
    ) -> dict[str, Any]:
        """Compose a prompt script into one long motion, boundary metadata is written next to the BVH file."""
        script = PromptScript.load(script_path)
        return self._write_generation(checkpoint, script, Path(script_path).parent, out_path, seed)

    def _write_generation(
        self, checkpoint: Checkpoint, script: PromptScript, base_dir: Path, out_path: str | os.PathLike, seed: int
    ) -> dict[str, Any]:
        data, metadata = self._generate(checkpoint, script, base_dir, seed)
        out = Path(out_path)
        with open(out, "wb") as file:
            file.write(data)
        _write_json(out.with_suffix(".json"), metadata)
        self.log.info("Wrote %d frames to %s", metadata["total_frames"], out)
        return metadata

    # Evaluation

    def evaluate(
        self, generated_dir: str | os.PathLike, reference_dir: str | os.PathLike, report_path: str | os.PathLike
    ) -> dict[str, Any]:
        """Evaluate generated against reference BVH files.

        The report JSON carries metric values, conventions and input digests, the per-clip kinematics
        table is written to ``<report>.csv``.
        """
        sets: dict[str, dict[str, MotionClip]] = {}
        inputs: dict[str, dict[str, str]] = {}
        for key, directory in (("generated", Path(generated_dir)), ("reference", Path(reference_dir))):
            paths = sorted(directory.glob("*.bvh"))
            try:
                if not paths:
                    raise FileNotFoundError(f"No BVH files found in {directory}")
            except FileNotFoundError as err:
                self.log.exception(err, exc_info=True)
                raise err
            sets[key] = {path.stem: self.load_motion(path) for path in paths}
            inputs[key] = {path.name: file_digest(path) for path in paths}
        report = evaluate(sets["generated"], sets["reference"], self.config.motion, inputs)
        document = {"config_digest": self.config_digest, **report.dict()}
        out = Path(report_path)
        _write_json(out, document)
        report.clips.assign(config_digest=self.config_digest).to_csv(out.with_suffix(".csv"), index=False)
        return document

