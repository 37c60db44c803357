"""The full evaluation protocol: 70/30 split, 10-fold CV, grid search.

Reproduces the two headline experiments (alphabet-only and all-signs) on the
synthetic corpus and prints the four-column results table.  Takes ~25 s.

Run:  python demos/04_evaluation.py
"""

from signum.evaluate import format_results_table, run_headline_experiments
from signum.synthdata import GeneratorConfig, generate_corpus

cfg = GeneratorConfig(seed=7, jitter_sigma=0.005)
db, instances = generate_corpus(cfg)
print(f"corpus: {len(db.signs)} signs x {cfg.instances_per_sign} instances, "
      f"jitter {cfg.jitter_sigma * 1000:.0f} mm\n")

alphabet, all_signs = run_headline_experiments(db, instances, seed=7)
print(format_results_table(alphabet, all_signs))

print("chosen hyperparameters (alphabet):", alphabet.chosen_params)
print("chosen hyperparameters (all signs):", all_signs.chosen_params)
print(f"\nheld-out 30% (reported alongside the CV means, never mixed):")
print(f"  alphabet  acc {alphabet.holdout_test_accuracy:.3f}  "
      f"F1 {alphabet.holdout_test_f1:.3f}")
print(f"  all signs acc {all_signs.holdout_test_accuracy:.3f}  "
      f"F1 {all_signs.holdout_test_f1:.3f}")
