"""Hand-skeleton sign recognition toolkit.

Submodules:

* ``handmodel`` — skeleton types, gesture templates, JSON persistence
* ``features`` — the 22 normalised distance features and gesture vectors
* ``dtree`` — from-scratch entropy/information-gain decision tree
* ``evaluate`` — stratified splits, 10-fold CV, grid search, result reports
* ``stream`` — dwell-based keypose detection and real-time sequence matching
* ``synthdata`` — seeded synthetic corpus and scripted frame streams
* ``service`` — HTTP/WebSocket facade for the practice frontend (imports
  FastAPI, so it is not re-exported here)
"""

__version__ = "0.1.0"

from signum.dtree import DecisionTree, TreeParams, fit, load_tree, save_tree
from signum.features import (
    FEATURE_NAMES,
    build_feature_matrix,
    extract_gesture_features,
    extract_pose_features,
    palm_length,
)
from signum.handmodel import (
    Category,
    HandFrame,
    Handedness,
    PoseSnapshot,
    Side,
    SignDatabase,
    SignGesture,
    build_sign,
    load_database,
    save_database,
)
from signum.stream import (
    DwellConfig,
    PracticeMode,
    StreamEngine,
    detect_keyposes,
    match_sequence,
    replay_stream,
)
from signum.synthdata import GeneratorConfig, canonical_hand, generate_corpus, script_stream
