"""relaylearn: mmWave link synthesis, strong/weak-link classification, and
relay-selection simulation."""

__version__ = "0.1.0"

from .baselines import (
    DummyModel,
    LogisticModel,
    SVMModel,
    dummy_train,
    hinge_loss,
    logreg_train,
    poly_expand,
    svm_train,
)
from .channelsim import (
    FIParams,
    LinkSample,
    ScenarioConfig,
    fi_path_loss,
    gen_dataset,
    gen_link,
    sample_shadow,
)
from .dataset import (
    DEFAULT_FEATURE_NAMES,
    CsvFormatError,
    Dataset,
    LabelRule,
    Normalizer,
    SchemaError,
    apply_normalizer,
    extract_features,
    fit_normalizer,
    label,
    labels_array,
    read_csv,
    split,
    write_csv,
)
from .metrics import (
    ConfusionMatrix,
    EvalReport,
    accuracy,
    auc,
    compare,
    confusion,
    f1,
    pr_curve,
    precision,
    recall,
    report,
    roc_curve,
)
from .mlp import (
    Activation,
    Adam,
    Layer,
    MLPArchitecture,
    PRESETS,
    TrainConfig,
    TrainedMLP,
    backward,
    bce_loss,
    forward,
    init_layers,
    preset_architecture,
    preset_learning_rate,
    step_activation,
    train,
)
from .modelio import load_model, save_model
from .relay import (
    CandidateSet,
    HandoverTrace,
    OracleModel,
    RelayDecision,
    group_candidates,
    handover_sim,
    select_oracle,
    select_predicted,
    selection_accuracy,
)
