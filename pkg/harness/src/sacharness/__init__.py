"""Cross-validated classifier comparison over exported feature matrices."""

from .harness import (
    AUC_TABLE_HEADER,
    AucRow,
    Cell,
    CLASSIFIER_FACTORIES,
    EvalSpec,
    FeatureMatrix,
    HarnessError,
    evaluate,
    learner_documentation,
    read_features,
    write_auc_table,
)

__version__ = "0.1.0"

__all__ = [
    "AUC_TABLE_HEADER",
    "AucRow",
    "Cell",
    "CLASSIFIER_FACTORIES",
    "EvalSpec",
    "FeatureMatrix",
    "HarnessError",
    "evaluate",
    "learner_documentation",
    "read_features",
    "write_auc_table",
    "__version__",
]
