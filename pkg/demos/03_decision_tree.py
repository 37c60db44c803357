"""Training the decision tree and reading its predictions.

Run:  python demos/03_decision_tree.py
"""

import numpy as np

from signum.dtree import TreeParams, best_split, entropy, fit, information_gain
from signum.features import build_feature_matrix
from signum.synthdata import GeneratorConfig, generate_corpus

# Entropy in bits and the information gain of a candidate split: the split
# with the highest gain (ties: lowest feature index, lowest threshold) wins.
print("entropy {A:4, B:4}      =", entropy({"A": 4, "B": 4}))
print("entropy {A:2, B:6}      =", round(entropy({"A": 2, "B": 6}), 6))
print("gain of perfect split    =",
      information_gain({"A": 4, "B": 4}, [{"A": 4}, {"B": 4}]))

x = np.array([[0.1], [0.2], [0.8], [0.9]])
print("best_split on 1-D toy    =", best_split(x, ["A", "A", "B", "B"]))

# Train on the synthetic corpus (500 jittered instances of 50 signs).
cfg = GeneratorConfig(seed=7)
db, instances = generate_corpus(cfg)
features, labels = build_feature_matrix(instances, pad_arity=3)
tree = fit(features, labels,
           TreeParams(max_depth=6, min_samples_split=8, min_samples_leaf=4))
print(f"\ntrained: {len(tree.classes)} classes, "
      f"{features.shape[1]} features, max depth {tree.max_node_depth()}")

# predict returns the winning label plus a confidence per gesture (the leaf's
# class proportions over every trained class).
prediction = tree.predict(features[0])
top = sorted(prediction.per_gesture.items(), key=lambda kv: -kv[1])[:3]
print(f"sample 0 truth={labels[0]} -> predicted={prediction.label} "
      f"(confidence {prediction.confidence:.2f})")
print("top per-gesture confidences:", [(k, round(v, 2)) for k, v in top])

# The per-gesture view restricted to a chosen list of signs:
subset = [s.id for s in db.signs[:3]]
print("restricted to", subset, "->",
      {k: round(v, 2) for k, v in tree.classify_per_gesture(features[0], subset).items()})

train_accuracy = float(np.mean(tree.predict_labels(features) == labels))
print(f"\ntraining accuracy: {train_accuracy:.3f}")
