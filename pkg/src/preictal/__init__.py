"""preictal: seizure prediction from single-channel ECG.

Reconstruction models are trained on a patient's baseline signal; pre-ictal
anomalies are flagged where the smoothed reconstruction error exceeds a
patient-specific statistical threshold.

Subpackages / modules
---------------------
 ingest      -- EDF/CSV records, annotation sidecars, synthetic ECG oracle
 preprocess  -- low-pass filtering, segmentation, phase labeling
 features    -- DWT / scalogram / spectrogram representations, normalization
 nn          -- dense-tensor kernel: layers, reverse-mode grads, Adam
 models      -- the three reconstruction architectures, training, scoring
 anomaly     -- error smoothing, tau = mu + k*sigma thresholding, alarms
 evaluation  -- weighted confusion metrics, seizure-level outcomes
 pipeline    -- staged end-to-end runs with cached artifacts
 cli         -- `preictal` command-line entry point
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataError, NumericError, PreictalError

__all__ = ["__version__", "PreictalError", "ConfigError", "DataError", "NumericError"]
