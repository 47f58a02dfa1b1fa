"""Explicit RGB skin-colour rules, ground-truth ingestion and TP/FP evaluation."""
from .dataset import (
    DatasetPair,
    ImageBuffer,
    LabeledRecord,
    MaskImage,
    load_image,
    load_mask,
    pair_dataset,
    read_records_csv,
    transform_records,
    write_records_csv,
)
from .errors import (
    AnnotationError,
    DatasetWarning,
    DegenerateClassError,
    EmptyDatasetError,
    EmptyHistogramError,
    EmptyInputError,
    FormatError,
    InputError,
    LayoutError,
    PairingError,
    ParameterError,
    SkinError,
)
from .evaluation import (
    EvalResult,
    ReportTable,
    compare,
    evaluate_dataset,
    evaluate_records,
    render_mask,
    save_mask,
)
from .features import (
    FeatureHistogram,
    FeatureKind,
    ThresholdSuggestion,
    build_histogram,
    compute_features,
    suggest_thresholds,
)
from .rules import (
    ChannelRanges,
    RgbPixel,
    RuleKind,
    RuleLut,
    SkinLabel,
    build_lut,
    channel_ranges,
    classify,
    classify_kovac,
    classify_kovac_rewritten,
    classify_rgb_ratio,
    classify_saleh,
    classify_swift,
    load_lut,
)

__version__ = "0.1.0"
