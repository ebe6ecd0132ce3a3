"""Weighted majority rules and their exact accuracy, step by step.

Five experts guess a binary ground truth independently; expert e is right
with probability p_e.  A rule assigns each expert a weight and follows the
heavier side.  This script walks through the motivating five-expert panel.
"""

import numpy as np

import jurysim as js

experts = [0.6, 0.6, 0.6, 0.7, 0.9]

# The optimal weighting is the log-odds of each competence.
w_star = js.optimal_weights(experts)
print("competences:     ", experts)
print("log-odds weights:", np.round(w_star, 3))

# The strongest expert outweighs everyone else combined, so the rule just
# follows them: a dictator.
print("rest combined:", round(float(np.sum(w_star[:-1])), 3), "<", round(float(w_star[-1]), 3))
print("same rule as a pure dictator?",
      js.rules_equivalent(w_star, [0, 0, 0, 0, 1]))

# Accuracy is the probability the rule outputs the truth.  With a dictator
# that is exactly the dictator's competence.
print("accuracy (log-odds):", js.exact_accuracy(experts, w_star).mean)
print("accuracy (equal weights):", js.exact_accuracy(experts, [1] * 5).mean)

# Monte Carlo agrees with the exact enumeration within sampling error.
est = js.mc_accuracy(experts, w_star, iterations=100_000, seed=42)
print(f"monte carlo: {est.mean:.4f} +- {est.std_error:.4f} ({est.iterations} draws)")

# Rules are identified by their outcome on every vote profile.  Scaling all
# weights never changes the rule; small perturbations usually don't either.
print("scaled weights, same rule?", js.rules_equivalent(w_star, 10 * w_star))
sig = js.rule_signature([1, 1, 2])
print("weights (1,1,2) tie on split profiles:",
      sig.outcome_of([1, 1, 0]), sig.outcome_of([0, 0, 1]))

# On five agents there are exactly seven genuinely different rules (up to
# relabelling the agents, nonnegative weights, no tie profiles).
print("distinct 5-agent rules found:", js.count_distinct_rules(5))
