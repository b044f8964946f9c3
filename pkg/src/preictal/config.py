"""Plain-text `key = value` pipeline configuration.

Every paper-silent default lives here, visible and overridable; unknown keys
are rejected so typos cannot silently fall back to defaults.  See README.md
for the full key table.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError

_BOOL_TRUE = {"true", "yes", "1", "on"}
_BOOL_FALSE = {"false", "no", "0", "off"}


@dataclass
class PipelineConfig:
    # inputs
    record: str = ""
    annotations: str = ""          # optional sidecar CSV
    channel: str = "ECG"           # EDF channel label (which Siena lead is used
                                   # is unstated upstream, so it is configuration)
    patient_id: str = ""           # defaults to the record's own id
    # preprocessing
    window_s: int = 1
    overlap_s: int = 0
    cutoff_hz: float = 40.0
    filter_order: int = 4
    zero_phase: bool = True
    # representation & model
    representation: str = "spectrogram"
    architecture: str = "mh_c_lstm_ae"
    # training
    epochs: int = 50
    batch_size: int = 32
    patience: int = 5
    min_delta: float = 1e-5
    holdout_fraction: float = 0.1
    min_baseline_segments: int = 60
    seed: int = 0
    # anomaly post-processing
    smoothing_w: int = 31
    k: float = 2.0
    # evaluation
    preictal_len_s: float | None = None   # None -> dynamic: 3600 s if record >= 4 h else 1800 s
    postictal_len_s: float = 600.0
    refractory_gap_s: float = 60.0
    # output
    out: str = "runs/out"

    def require_inputs(self):
        if not self.record:
            raise ConfigError("config key 'record' is required")


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}
_VALID_KEYS = set(_FIELD_TYPES)

_ENUMS = {
    "representation": ("dwt", "scalogram", "spectrogram"),
    "architecture": ("lstm_ae", "mh_c_lstm_ae", "t_ee"),
}


def _parse_value(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if kind == "bool":
            low = raw.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "float | None":
            if raw.lower() in ("", "auto", "none"):
                return None
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"config key '{key}': {exc}") from exc


def validate_config(text: str, overrides: dict | None = None) -> PipelineConfig:
    """Parse `key = value` lines (# comments allowed) and apply defaults.

    Raises ConfigError on unknown keys, unparsable or out-of-range values.
    """
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in _VALID_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        values[key] = _parse_value(key, raw)

    for key, val in (overrides or {}).items():
        if key not in _VALID_KEYS:
            raise ConfigError(f"unknown config override {key!r}")
        values[key] = val

    cfg = PipelineConfig(**values)
    _validate_ranges(cfg)
    return cfg


def _validate_ranges(cfg: PipelineConfig):
    from .preprocess import OVERLAP_CHOICES_S, WINDOW_CHOICES_S

    if cfg.window_s not in WINDOW_CHOICES_S:
        raise ConfigError(f"window_s must be one of {WINDOW_CHOICES_S}, got {cfg.window_s}")
    if cfg.overlap_s not in OVERLAP_CHOICES_S:
        raise ConfigError(f"overlap_s must be one of {OVERLAP_CHOICES_S}, got {cfg.overlap_s}")
    if cfg.overlap_s >= cfg.window_s:
        raise ConfigError(f"overlap_s ({cfg.overlap_s}) must be smaller than window_s ({cfg.window_s})")
    for key, choices in _ENUMS.items():
        if getattr(cfg, key) not in choices:
            raise ConfigError(f"{key} must be one of {choices}, got {getattr(cfg, key)!r}")
    if cfg.cutoff_hz <= 0:
        raise ConfigError(f"cutoff_hz must be positive, got {cfg.cutoff_hz}")
    if cfg.filter_order < 1:
        raise ConfigError(f"filter_order must be >= 1, got {cfg.filter_order}")
    if cfg.epochs < 1 or cfg.batch_size < 1 or cfg.patience < 1:
        raise ConfigError("epochs, batch_size and patience must all be >= 1")
    if not 0 <= cfg.holdout_fraction < 1:
        raise ConfigError(f"holdout_fraction must be in [0, 1), got {cfg.holdout_fraction}")
    if cfg.smoothing_w < 1 or cfg.smoothing_w % 2 == 0:
        raise ConfigError(f"smoothing_w must be odd and >= 1, got {cfg.smoothing_w}")
    if cfg.preictal_len_s is not None and cfg.preictal_len_s <= 0:
        raise ConfigError("preictal_len_s must be positive (or 'auto')")
    if cfg.postictal_len_s < 0 or cfg.refractory_gap_s < 0:
        raise ConfigError("postictal_len_s and refractory_gap_s must be >= 0")
    if cfg.min_baseline_segments < 1:
        raise ConfigError("min_baseline_segments must be >= 1")


def config_text(cfg: PipelineConfig) -> str:
    """Canonical serialized form (sorted keys); used for the config digest."""
    lines = []
    for f in sorted(fields(PipelineConfig), key=lambda f: f.name):
        val = getattr(cfg, f.name)
        if val is None:
            val = "auto"
        elif isinstance(val, bool):
            val = "true" if val else "false"
        lines.append(f"{f.name} = {val}")
    return "\n".join(lines) + "\n"
