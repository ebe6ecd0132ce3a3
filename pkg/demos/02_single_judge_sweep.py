"""A single judge of varying competence weights a fixed expert panel.

The judge does not know the true competences.  They perceive expert e at
p_je = 1/2 + 2(p_j - 1/2)(p_e - 1/2) (the chance the expert agrees with
them) and assign log-odds weights to those perceptions.  Sweeping the
judge competence p_j shows how much judgment quality matters.
"""

import numpy as np

import jurysim as js

experts = [0.6, 0.6, 0.6, 0.7, 0.9]

# What a mediocre judge believes, and the weights that follow.
print("perceived by a 0.6 judge:",
      np.round([js.perceived_competence(0.6, p) for p in experts], 3))
print("weights from a 0.6 judge:", np.round(js.judge_weights(0.6, experts), 3))

table = js.fixed_expert_sweep(experts, js.default_judge_grid(0.05))
print("\n p_j   accuracy")
for pj, acc in zip(table.x, table.mean):
    bar = "#" * int(round(40 * acc))
    print(f" {pj:4.2f}  {acc:8.5f}  {bar}")

# The accuracy moves in steps: between two grid points it only changes
# when the induced winning coalitions change.  A judge barely above 1/2
# already rivals the optimal rule; matching it exactly takes far more.
res = js.find_optimality_threshold(experts)
print(f"\njudge competence needed for the exactly-optimal rule: {res.threshold:.4f}")
print("accuracy at p_j=0.60:", table.column(0.60)[0])
print("accuracy at p_j=1.00:", table.column(1.00)[0])
